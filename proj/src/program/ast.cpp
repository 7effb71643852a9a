// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/program/ast.hpp"

#include <fmt/format.h>

namespace shapecraft::program
{

bool structurally_equal(const ShapeProgram& a, const ShapeProgram& b)
{
    if (a.statements.size() != b.statements.size())
        return false;
    for (std::size_t i = 0; i < a.statements.size(); ++i)
    {
        const auto& x = a.statements[i];
        const auto& y = b.statements[i];
        if (x.target != y.target || x.callee != y.callee || x.positional != y.positional || x.keywords != y.keywords)
            return false;
    }
    return true;
}

std::string describe(const Value& v)
{
    struct Visitor
    {
        std::string operator()(std::int64_t) const { return "integer"; }
        std::string operator()(double) const { return "real"; }
        std::string operator()(const std::string&) const { return "string"; }
        std::string operator()(bool) const { return "boolean"; }
        std::string operator()(const TupleLit& t) const { return fmt::format("{}-tuple", t.items.size()); }
        std::string operator()(const ListLit&) const { return "list"; }
        std::string operator()(const Identifier& id) const { return fmt::format("identifier '{}'", id.name); }
    };
    return std::visit(Visitor{}, v);
}

} // namespace shapecraft::program
