// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/program/parser.hpp"

#include <charconv>
#include <fmt/format.h>
#include <set>

namespace shapecraft::program
{

namespace
{

enum class Tok
{
    Ident,
    Int,
    Real,
    String,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Equals,
    Dot,
    Newline,
    End,
    Invalid,
};

struct Token
{
    Tok kind;
    int line;
    std::string text;  // identifier name, string contents, or raw spelling
    std::int64_t int_value = 0;
    double real_value = 0.0;
};

struct SyntaxError
{
    int line;
    std::string message;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string spell(const Token& t)
{
    switch (t.kind)
    {
        case Tok::Newline: return "end of line";
        case Tok::End: return "end of input";
        case Tok::String: return fmt::format("string \"{}\"", t.text);
        default: return fmt::format("'{}'", t.text);
    }
}

class Lexer
{
public:
    explicit Lexer(std::string_view src) : _src(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (_pos < _src.size())
        {
            const char c = _src[_pos];
            if (c == '\n')
            {
                out.push_back({Tok::Newline, _line, "\\n"});
                ++_line;
                ++_pos;
            }
            else if (c == ' ' || c == '\t' || c == '\r')
                ++_pos;
            else if (c == '#')
            {
                while (_pos < _src.size() && _src[_pos] != '\n')
                    ++_pos;
            }
            else if (ident_start(c))
            {
                const std::size_t start = _pos;
                while (_pos < _src.size() && ident_char(_src[_pos]))
                    ++_pos;
                out.push_back({Tok::Ident, _line, std::string(_src.substr(start, _pos - start))});
            }
            else if (digit(c) || ((c == '-' || c == '+' || c == '.') && starts_number()))
                out.push_back(number());
            else if (c == '"' || c == '\'')
                out.push_back(string_literal());
            else
            {
                static const std::string_view punct = "()[],=.";
                static const Tok kinds[] = {Tok::LParen, Tok::RParen, Tok::LBrack, Tok::RBrack,
                                            Tok::Comma,  Tok::Equals, Tok::Dot};
                const auto p = punct.find(c);
                out.push_back({p == std::string_view::npos ? Tok::Invalid : kinds[p], _line, std::string(1, c)});
                ++_pos;
            }
        }
        out.push_back({Tok::End, _line, ""});
        return out;
    }

private:
    bool starts_number() const
    {
        std::size_t i = _pos;
        if (_src[i] == '-' || _src[i] == '+')
            ++i;
        if (i < _src.size() && _src[i] == '.')
            ++i;
        return i < _src.size() && digit(_src[i]);
    }

    Token number()
    {
        const std::size_t start = _pos;
        bool real = false;
        if (_src[_pos] == '-' || _src[_pos] == '+')
            ++_pos;
        while (_pos < _src.size() && digit(_src[_pos]))
            ++_pos;
        if (_pos < _src.size() && _src[_pos] == '.')
        {
            real = true;
            ++_pos;
            while (_pos < _src.size() && digit(_src[_pos]))
                ++_pos;
        }
        if (_pos < _src.size() && (_src[_pos] == 'e' || _src[_pos] == 'E'))
        {
            std::size_t i = _pos + 1;
            if (i < _src.size() && (_src[i] == '+' || _src[i] == '-'))
                ++i;
            if (i < _src.size() && digit(_src[i]))
            {
                real = true;
                _pos = i;
                while (_pos < _src.size() && digit(_src[_pos]))
                    ++_pos;
            }
        }
        Token t{real ? Tok::Real : Tok::Int, _line, std::string(_src.substr(start, _pos - start))};
        std::string body = t.text;
        if (!body.empty() && body[0] == '+')
            body.erase(0, 1);
        // from_chars wants a digit before the decimal point.
        const std::size_t dot = body.find('.');
        if (dot != std::string::npos && (dot == 0 || !digit(body[dot - 1])))
            body.insert(dot, "0");
        const char* first = body.data();
        const char* last = body.data() + body.size();
        if (real)
        {
            auto [ptr, ec] = std::from_chars(first, last, t.real_value);
            if (ec != std::errc{} || ptr != last)
                return {Tok::Invalid, _line, t.text};
        }
        else
        {
            auto [ptr, ec] = std::from_chars(first, last, t.int_value);
            if (ec != std::errc{} || ptr != last)
                return {Tok::Invalid, _line, t.text};
        }
        return t;
    }

    Token string_literal()
    {
        const char quote = _src[_pos++];
        const int line = _line;
        std::string value;
        while (true)
        {
            if (_pos >= _src.size() || _src[_pos] == '\n')
                return {Tok::Invalid, line, std::string(1, quote) + value};
            const char c = _src[_pos++];
            if (c == quote)
                break;
            if (c == '\\' && _pos < _src.size())
            {
                const char e = _src[_pos++];
                switch (e)
                {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    default: value += e; break;
                }
                continue;
            }
            value += c;
        }
        return {Tok::String, line, value};
    }

    std::string_view _src;
    std::size_t _pos = 0;
    int _line = 1;
};

class Parser
{
public:
    explicit Parser(std::vector<Token> tokens) : _t(std::move(tokens)) {}

    void run(ShapeProgram& program, std::vector<Diagnostic>& diagnostics)
    {
        while (true)
        {
            skip_newlines();
            if (cur().kind == Tok::End)
                break;
            const std::size_t start = _i;
            try
            {
                program.statements.push_back(statement());
            }
            catch (const SyntaxError& e)
            {
                diagnostics.push_back({e.line, Severity::Error, e.message});
                recover(start);
            }
        }
    }

private:
    const Token& cur() const { return _t[_i]; }
    const Token& at(std::size_t k) const { return _t[std::min(k, _t.size() - 1)]; }

    void skip_newlines()
    {
        while (cur().kind == Tok::Newline)
            ++_i;
    }

    // Inside brackets line breaks are insignificant.
    const Token& inner()
    {
        skip_newlines();
        return cur();
    }

    // True when token k begins something shaped like a new statement.
    bool statement_start(std::size_t k) const
    {
        if (at(k).kind != Tok::Ident)
            return false;
        std::size_t j = k + 1;
        if (at(j).kind == Tok::Equals && at(j + 1).kind == Tok::Ident)
            j += 2;
        if (at(j).kind == Tok::Dot && at(j + 1).kind == Tok::Ident)
            j += 2;
        return at(j).kind == Tok::LParen;
    }

    bool at_line_start(std::size_t k) const { return k == 0 || at(k - 1).kind == Tok::Newline; }

    [[noreturn]] void fail(const Token& t, std::string message) { throw SyntaxError{t.line, std::move(message)}; }

    [[noreturn]] void unclosed()
    {
        fail(_t[_open.front()], fmt::format("unbalanced parenthesis: '{}' opened on line {} is never closed",
                                            _t[_open.front()].text, _t[_open.front()].line));
    }

    void check_inside(const Token& t)
    {
        if (t.kind == Tok::End || (at_line_start(_i) && statement_start(_i)))
            unclosed();
        if (t.kind == Tok::Invalid)
            invalid(t);
    }

    [[noreturn]] void invalid(const Token& t)
    {
        if (t.text.size() >= 1 && (t.text[0] == '"' || t.text[0] == '\''))
            fail(t, "unterminated string literal");
        if (t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/")
            fail(t, fmt::format("unexpected character '{}'; arithmetic expressions are not supported", t.text));
        if (!t.text.empty() && (digit(t.text[0]) || t.text[0] == '-' || t.text[0] == '+' || t.text[0] == '.'))
            fail(t, fmt::format("number '{}' is out of range", t.text));
        fail(t, fmt::format("unexpected character '{}'", t.text));
    }

    Statement statement()
    {
        static const std::set<std::string, std::less<>> python_words = {
            "import", "from", "def", "return", "for", "while", "if", "else", "elif", "with", "class", "print", "lambda"};
        Statement st;
        const Token& first = cur();
        st.line = first.line;
        if (first.kind == Tok::RParen || first.kind == Tok::RBrack)
            fail(first, fmt::format("unbalanced parenthesis: unexpected '{}'", first.text));
        if (first.kind == Tok::Invalid)
            invalid(first);
        if (first.kind != Tok::Ident)
            fail(first, fmt::format("expected a builtin call, found {}", spell(first)));
        if (python_words.count(first.text) && !(at(_i + 1).kind == Tok::Equals || at(_i + 1).kind == Tok::LParen))
            fail(first, fmt::format("'{}' is not supported; write one builtin call per line", first.text));
        if (at(_i + 1).kind == Tok::Equals)
        {
            st.target = first.text;
            _i += 2;
            if (cur().kind != Tok::Ident)
                fail(cur(), fmt::format("expected a builtin call after '{} =', found {}", *st.target, spell(cur())));
        }
        st.callee = cur().text;
        ++_i;
        if (cur().kind == Tok::Dot)
        {
            ++_i;
            if (cur().kind != Tok::Ident)
                fail(cur(), fmt::format("expected a name after '{}.'", st.callee));
            st.callee += "." + cur().text;
            ++_i;
        }
        if (cur().kind != Tok::LParen)
        {
            if (cur().kind == Tok::Equals)
                fail(cur(), "chained assignment is not supported");
            fail(cur(), fmt::format("expected '(' after '{}', found {}", st.callee, spell(cur())));
        }
        _open.assign(1, _i);
        ++_i;
        arguments(st);
        _open.clear();
        if (cur().kind != Tok::Newline && cur().kind != Tok::End)
        {
            if (cur().kind == Tok::RParen || cur().kind == Tok::RBrack)
                fail(cur(), fmt::format("unbalanced parenthesis: unexpected '{}'", cur().text));
            fail(cur(), fmt::format("unexpected {} after the call; write one call per line", spell(cur())));
        }
        return st;
    }

    void arguments(Statement& st)
    {
        std::set<std::string, std::less<>> seen;
        bool keyword_seen = false;
        while (true)
        {
            const Token& t = inner();
            check_inside(t);
            if (t.kind == Tok::RParen)
            {
                ++_i;
                return;
            }
            if (t.kind == Tok::Ident && at(_i + 1).kind == Tok::Equals)
            {
                const Token& name = t;
                _i += 2;
                if (!seen.insert(name.text).second)
                    fail(name, fmt::format("duplicate keyword argument '{}'", name.text));
                keyword_seen = true;
                st.keywords.push_back({name.text, value()});
            }
            else
            {
                if (keyword_seen)
                    fail(t, "positional argument after keyword argument");
                st.positional.push_back(value());
            }
            const Token& sep = inner();
            check_inside(sep);
            if (sep.kind == Tok::Comma)
            {
                ++_i;
                continue;
            }
            if (sep.kind == Tok::RParen)
                continue;
            fail(sep, fmt::format("expected ',' or ')' in call to '{}', found {}", st.callee, spell(sep)));
        }
    }

    Value value()
    {
        const Token& t = inner();
        check_inside(t);
        switch (t.kind)
        {
            case Tok::Int: ++_i; return t.int_value;
            case Tok::Real: ++_i; return t.real_value;
            case Tok::String: ++_i; return t.text;
            case Tok::Ident:
            {
                ++_i;
                if (t.text == "true" || t.text == "True")
                    return true;
                if (t.text == "false" || t.text == "False")
                    return false;
                if (cur().kind == Tok::LParen || cur().kind == Tok::Dot)
                    fail(t, "nested calls are not supported; bind the result on its own line first");
                return Identifier{t.text};
            }
            case Tok::LParen: return tuple();
            case Tok::LBrack: return list();
            default: fail(t, fmt::format("expected a value, found {}", spell(t)));
        }
    }

    TupleLit tuple()
    {
        const Token& open = cur();
        _open.push_back(_i);
        ++_i;
        TupleLit out;
        while (true)
        {
            const Token& t = inner();
            check_inside(t);
            if (t.kind == Tok::RParen)
            {
                ++_i;
                break;
            }
            switch (t.kind)
            {
                case Tok::Int: out.items.emplace_back(t.int_value); break;
                case Tok::Real: out.items.emplace_back(t.real_value); break;
                case Tok::Ident:
                    if (t.text == "true" || t.text == "True")
                        out.items.emplace_back(true);
                    else if (t.text == "false" || t.text == "False")
                        out.items.emplace_back(false);
                    else
                        fail(t, fmt::format("tuple elements must be numbers or booleans, found '{}'", t.text));
                    break;
                default: fail(t, fmt::format("tuple elements must be numbers or booleans, found {}", spell(t)));
            }
            ++_i;
            const Token& sep = inner();
            check_inside(sep);
            if (sep.kind == Tok::Comma)
                ++_i;
            else if (sep.kind != Tok::RParen)
                fail(sep, fmt::format("expected ',' or ')' in tuple, found {}", spell(sep)));
        }
        _open.pop_back();
        if (out.items.size() < 2 || out.items.size() > 3)
            fail(open, fmt::format("tuples must have 2 or 3 elements, found {}", out.items.size()));
        return out;
    }

    ListLit list()
    {
        _open.push_back(_i);
        ++_i;
        ListLit out;
        while (true)
        {
            const Token& t = inner();
            check_inside(t);
            if (t.kind == Tok::RBrack)
            {
                ++_i;
                break;
            }
            if (t.kind != Tok::LParen)
                fail(t, fmt::format("list elements must be tuples, found {}", spell(t)));
            out.items.push_back(tuple());
            const Token& sep = inner();
            check_inside(sep);
            if (sep.kind == Tok::Comma)
                ++_i;
            else if (sep.kind != Tok::RBrack)
                fail(sep, fmt::format("expected ',' or ']' in list, found {}", spell(sep)));
        }
        _open.pop_back();
        return out;
    }

    // Skips to the start of the next statement after a syntax error.
    void recover(std::size_t start)
    {
        _open.clear();
        std::size_t k = start + 1;
        int depth = 0;
        for (std::size_t j = start; j < _i && j < _t.size(); ++j)
        {
            if (_t[j].kind == Tok::LParen || _t[j].kind == Tok::LBrack)
                ++depth;
            else if (_t[j].kind == Tok::RParen || _t[j].kind == Tok::RBrack)
                --depth;
        }
        k = std::max(k, _i);
        while (k < _t.size() && _t[k].kind != Tok::End)
        {
            const Token& t = _t[k];
            if (at_line_start(k) && statement_start(k))
                break;
            if (t.kind == Tok::Newline && depth <= 0)
                break;
            if (t.kind == Tok::LParen || t.kind == Tok::LBrack)
                ++depth;
            else if (t.kind == Tok::RParen || t.kind == Tok::RBrack)
                --depth;
            ++k;
        }
        _i = k;
    }

    std::vector<Token> _t;
    std::size_t _i = 0;
    std::vector<std::size_t> _open;
};

std::string print_real(double d)
{
    std::string s = fmt::format("{}", d);
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::string print_scalar(const Scalar& s)
{
    if (const auto* i = std::get_if<std::int64_t>(&s))
        return fmt::format("{}", *i);
    if (const auto* d = std::get_if<double>(&s))
        return print_real(*d);
    return std::get<bool>(s) ? "True" : "False";
}

std::string print_tuple(const TupleLit& t)
{
    std::string out = "(";
    for (std::size_t i = 0; i < t.items.size(); ++i)
        out += (i ? ", " : "") + print_scalar(t.items[i]);
    return out + ")";
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c: s)
    {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n')
        {
            out += "\\n";
            continue;
        }
        if (c == '\t')
        {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

ParseResult parse(std::string_view source)
{
    ParseResult result;
    ShapeProgram program;
    program.source = std::string(source);
    Parser parser(Lexer(source).run());
    parser.run(program, result.diagnostics);
    if (!has_errors(result.diagnostics))
        result.program = std::move(program);
    return result;
}

std::string print(const Value& value)
{
    struct Visitor
    {
        std::string operator()(std::int64_t i) const { return fmt::format("{}", i); }
        std::string operator()(double d) const { return print_real(d); }
        std::string operator()(const std::string& s) const { return quote(s); }
        std::string operator()(bool b) const { return b ? "True" : "False"; }
        std::string operator()(const TupleLit& t) const { return print_tuple(t); }
        std::string operator()(const ListLit& l) const
        {
            std::string out = "[";
            for (std::size_t i = 0; i < l.items.size(); ++i)
                out += (i ? ", " : "") + print_tuple(l.items[i]);
            return out + "]";
        }
        std::string operator()(const Identifier& id) const { return id.name; }
    };
    return std::visit(Visitor{}, value);
}

std::string print(const ShapeProgram& program)
{
    std::string out;
    for (const auto& st: program.statements)
    {
        if (st.target)
            out += *st.target + " = ";
        out += st.callee + "(";
        bool first = true;
        for (const auto& v: st.positional)
        {
            out += (first ? "" : ", ") + print(v);
            first = false;
        }
        for (const auto& kw: st.keywords)
        {
            out += (first ? "" : ", ") + kw.name + "=" + print(kw.value);
            first = false;
        }
        out += ")\n";
    }
    return out;
}

} // namespace shapecraft::program
