// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/program/interpreter.hpp"

#include "shapecraft/geometry/csg.hpp"
#include "shapecraft/geometry/curves.hpp"
#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/modifiers.hpp"
#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"
#include "shapecraft/program/builtins.hpp"
#include "shapecraft/program/parser.hpp"

#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <map>

namespace shapecraft::program
{

namespace g = shapecraft::geometry;

namespace
{

struct RuntimeError
{
    std::string message;
};

bool is_identifier(std::string_view s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c: s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

// Defaults are written once, in the registry, and parsed from there.
const Value& default_value(const std::string& text)
{
    static const std::map<std::string, Value> cache = [] {
        std::map<std::string, Value> out;
        for (const auto& spec: builtin_registry())
            for (const auto& p: spec.params)
                if (p.default_text && !p.default_text->empty() && !out.count(*p.default_text))
                {
                    auto parsed = parse("d(v=" + *p.default_text + ")");
                    out.emplace(*p.default_text, parsed.program->statements.at(0).keywords.at(0).value);
                }
        return out;
    }();
    return cache.at(text);
}

bool is_resolution_param(std::string_view name)
{
    return name == "segments" || name == "rings" || name == "vertices" || name == "sides";
}

class Scene
{
public:
    std::vector<SceneObject> objects;

    SceneObject* find(std::string_view key)
    {
        for (auto& o: objects)
            if (o.key == key)
                return &o;
        return nullptr;
    }

    void erase(std::string_view key)
    {
        std::erase_if(objects, [&](const SceneObject& o) { return o.key == key; });
    }

    std::size_t triangles() const
    {
        std::size_t n = 0;
        for (const auto& o: objects)
            n += o.mesh.triangles.size();
        return n;
    }
};

class Args
{
public:
    Args(const BuiltinSpec& spec, const Statement& st, Scene& scene, const ExecutionLimits& limits)
        : _spec(spec), _scene(scene), _limits(limits), _slots(spec.params.size(), nullptr)
    {
        if (st.positional.size() > spec.params.size())
            fail(fmt::format("{}() takes at most {} positional arguments but {} were given", spec.name,
                             spec.params.size(), st.positional.size()));
        for (std::size_t i = 0; i < st.positional.size(); ++i)
            _slots[i] = &st.positional[i];
        for (const auto& kw: st.keywords)
        {
            const std::size_t i = index(kw.name);
            if (i == npos)
                fail(fmt::format("'{}' got an unexpected keyword argument '{}'", spec.name, kw.name));
            if (_slots[i])
                fail(fmt::format("'{}' got multiple values for argument '{}'", spec.name, kw.name));
            _slots[i] = &kw.value;
        }
        for (std::size_t i = 0; i < spec.params.size(); ++i)
            if (!_slots[i] && !spec.params[i].default_text)
                fail(fmt::format("missing required argument '{}' for '{}'", spec.params[i].name, spec.name));
    }

    double real(std::string_view name) const
    {
        const Value& v = get(name);
        if (const auto* i = std::get_if<std::int64_t>(&v))
            return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v))
            return *d;
        mismatch(name, "a number", v);
    }

    int integer(std::string_view name) const
    {
        const Value& v = get(name);
        double d = 0.0;
        if (const auto* i = std::get_if<std::int64_t>(&v))
            d = static_cast<double>(*i);
        else if (const auto* r = std::get_if<double>(&v); r && std::floor(*r) == *r)
            d = *r;
        else
            mismatch(name, "an integer", v);
        if (std::abs(d) > 1e9)
            fail(fmt::format("argument '{}' of '{}' is out of range", name, _spec.name));
        const int out = static_cast<int>(d);
        if (is_resolution_param(name) && out > _limits.max_resolution)
            fail(fmt::format("argument '{}' of '{}' must be at most {}", name, _spec.name, _limits.max_resolution));
        return out;
    }

    bool flag(std::string_view name) const
    {
        const Value& v = get(name);
        if (const auto* b = std::get_if<bool>(&v))
            return *b;
        mismatch(name, "a boolean", v);
    }

    std::string text(std::string_view name) const
    {
        const Value& v = get(name);
        if (const auto* s = std::get_if<std::string>(&v))
            return *s;
        mismatch(name, "a string", v);
    }

    std::optional<std::string> optional_text(std::string_view name) const
    {
        if (!_slots[index(name)])
            return std::nullopt;
        return text(name);
    }

    g::Vec3 vec(std::string_view name) const
    {
        const Value& v = get(name);
        const auto* t = std::get_if<TupleLit>(&v);
        if (!t || t->items.size() != 3)
            mismatch(name, "a 3-tuple of numbers", v);
        g::Vec3 out;
        for (std::size_t i = 0; i < 3; ++i)
            out[static_cast<int>(i)] = number(t->items[i], name, v, "a 3-tuple of numbers");
        return out;
    }

    std::array<bool, 3> bools(std::string_view name) const
    {
        const Value& v = get(name);
        const auto* t = std::get_if<TupleLit>(&v);
        if (!t || t->items.size() != 3)
            mismatch(name, "a 3-tuple of booleans", v);
        std::array<bool, 3> out{};
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto* b = std::get_if<bool>(&t->items[i]);
            if (!b)
                mismatch(name, "a 3-tuple of booleans", v);
            out[i] = *b;
        }
        return out;
    }

    std::vector<g::Vec3> points(std::string_view name) const
    {
        const Value& v = get(name);
        const auto* list = std::get_if<ListLit>(&v);
        if (!list)
            mismatch(name, "a list of point tuples", v);
        std::vector<g::Vec3> out;
        for (const auto& t: list->items)
        {
            g::Vec3 p{};
            for (std::size_t i = 0; i < t.items.size(); ++i)
                p[static_cast<int>(i)] = number(t.items[i], name, v, "a list of point tuples");
            out.push_back(p);
        }
        return out;
    }

    // Returns the key of the referenced live object.
    std::string object(std::string_view name) const
    {
        const Value& v = get(name);
        const auto* id = std::get_if<Identifier>(&v);
        if (!id)
            mismatch(name, "an object reference", v);
        if (!_scene.find(id->name))
            fail(fmt::format("unbound identifier '{}'", id->name));
        return id->name;
    }

    [[noreturn]] static void fail(std::string message) { throw RuntimeError{std::move(message)}; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t index(std::string_view name) const
    {
        for (std::size_t i = 0; i < _spec.params.size(); ++i)
            if (_spec.params[i].name == name)
                return i;
        return npos;
    }

    const Value& get(std::string_view name) const
    {
        const std::size_t i = index(name);
        if (_slots[i])
            return *_slots[i];
        return default_value(*_spec.params[i].default_text);
    }

    double number(const Scalar& s, std::string_view name, const Value& whole, std::string_view expected) const
    {
        if (const auto* i = std::get_if<std::int64_t>(&s))
            return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&s))
            return *d;
        mismatch(name, expected, whole);
    }

    [[noreturn]] void mismatch(std::string_view name, std::string_view expected, const Value& got) const
    {
        if (const auto* id = std::get_if<Identifier>(&got); id && expected != "an object reference" &&
                                                            !_scene.find(id->name))
            fail(fmt::format("unbound identifier '{}'", id->name));
        fail(fmt::format("argument '{}' of '{}' expects {}, got {}", name, _spec.name, expected, describe(got)));
    }

    const BuiltinSpec& _spec;
    Scene& _scene;
    const ExecutionLimits& _limits;
    std::vector<const Value*> _slots;
};

class Interpreter
{
public:
    Interpreter(const ExecutionLimits& limits, std::vector<Diagnostic>& diagnostics)
        : _limits(limits), _diagnostics(diagnostics)
    {
    }

    bool run(const ShapeProgram& program)
    {
        std::size_t count = 0;
        for (const auto& st: program.statements)
        {
            try
            {
                if (++count > _limits.max_statements)
                    Args::fail(fmt::format("statement budget of {} exceeded", _limits.max_statements));
                statement(st);
                if (_scene.triangles() > _limits.max_triangles)
                    Args::fail(fmt::format("scene exceeds the triangle budget of {}", _limits.max_triangles));
            }
            catch (const RuntimeError& e)
            {
                _diagnostics.push_back({st.line, Severity::Error, e.message});
                return false;
            }
            catch (const g::GeometryError& e)
            {
                _diagnostics.push_back({st.line, Severity::Error, fmt::format("{}: {}", st.callee, e.what())});
                return false;
            }
        }
        return true;
    }

    SceneObjects finish()
    {
        SceneObjects out;
        out.objects = std::move(_scene.objects);
        for (const auto& o: out.objects)
            g::append(out.result, o.mesh);
        return out;
    }

private:
    void statement(const Statement& st)
    {
        if (is_unsupported_builtin(st.callee))
            Args::fail(fmt::format("unsupported builtin '{}'", st.callee));
        const BuiltinSpec* spec = find_builtin(st.callee);
        if (!spec)
            Args::fail(fmt::format("unknown builtin '{}'", st.callee));
        const Args args(*spec, st, _scene, _limits);
        g::Warnings warnings;
        const std::string& name = spec->name;

        if (name.rfind("Modifiers.", 0) == 0)
            modifier(st, *spec, args, warnings);
        else
        {
            g::Mesh mesh = create(name, args, warnings);
            create_object(st, name, args.optional_text("name"), std::move(mesh));
        }
        for (auto& w: warnings)
            _diagnostics.push_back({st.line, Severity::Warning, fmt::format("{}: {}", st.callee, w)});
    }

    g::Mesh create(const std::string& name, const Args& args, g::Warnings& warnings)
    {
        if (name == "cube_bounding_box")
        {
            g::Transform t;
            t.position = args.vec("position");
            t.scale = args.vec("scale");
            return g::transform(g::make_primitive(g::PrimitiveKind::Cube), t, &warnings);
        }
        if (name == "bezier_curve" || name == "circle" || name == "polyline")
        {
            const g::CurveKind kind = g::parse_curve_kind(name);
            g::CurveParams p;
            if (kind == g::CurveKind::Circle)
            {
                p.location = args.vec("location");
                p.radius = args.real("radius");
                p.segments = args.integer("segments");
            }
            else
            {
                p.points = args.points("points");
                p.fill_caps = args.flag("fill_caps");
                if (kind == g::CurveKind::Polyline)
                    p.closed = args.flag("closed");
            }
            p.bevel_depth = args.real("bevel_depth");
            p.extrude = args.real("extrude");
            args.flag("to_mesh");  // type-checked, objects are always meshes
            return g::make_curve_object(kind, p, &warnings);
        }

        const g::PrimitiveKind kind = g::parse_primitive_kind(name);
        g::PrimitiveParams p;
        switch (kind)
        {
            case g::PrimitiveKind::Sphere:
                p.segments = args.integer("segments");
                p.rings = args.integer("rings");
                break;
            case g::PrimitiveKind::Cylinder:
                p.vertices = args.integer("vertices");
                p.depth = args.real("depth");
                break;
            case g::PrimitiveKind::Cone:
                p.vertices = args.integer("vertices");
                p.radius = args.real("radius");
                p.depth = args.real("depth");
                break;
            case g::PrimitiveKind::Plane: p.size = args.real("size"); break;
            case g::PrimitiveKind::Pyramid:
                p.base_size = args.real("base_size");
                p.height = args.real("height");
                break;
            case g::PrimitiveKind::Capsule:
                p.radius = args.real("radius");
                p.height = args.real("height");
                p.segments = args.integer("segments");
                break;
            case g::PrimitiveKind::Prism:
                p.sides = args.integer("sides");
                p.radius = args.real("radius");
                p.height = args.real("height");
                break;
            case g::PrimitiveKind::Cube: break;
        }
        g::Transform t;
        t.position = args.vec("position");
        t.rotation = args.vec("rotation");
        t.scale = args.vec("scale");
        return g::transform(g::make_primitive(kind, p), t, &warnings);
    }

    void create_object(const Statement& st, const std::string& builtin, const std::optional<std::string>& name,
                       g::Mesh mesh)
    {
        ++_created;
        std::string key;
        if (st.target)
            key = *st.target;
        else if (name && is_identifier(*name))
        {
            // Unbound objects never replace each other, like duplicate names in a modelling scene.
            key = *name;
            for (int n = 1; _scene.find(key); ++n)
                key = fmt::format("{}_{}", *name, n);
        }
        else
            key = fmt::format("_obj{}", _created);

        if (SceneObject* existing = _scene.find(key))
        {
            existing->builtin = builtin;
            existing->mesh = std::move(mesh);
            return;
        }
        _scene.objects.push_back({key, builtin, std::move(mesh)});
    }

    void modifier(const Statement& st, const BuiltinSpec& spec, const Args& args, g::Warnings& warnings)
    {
        const std::string& name = spec.name;
        const std::string key = args.object(name == "Modifiers.boolean" ? "obj_a" : "obj");
        const g::Mesh& target = _scene.find(key)->mesh;
        g::Mesh result;

        if (name == "Modifiers.boolean")
        {
            const std::string other = args.object("obj_b");
            if (other == key)
                Args::fail("boolean operands must be different objects");
            g::BooleanModifier m;
            m.operation = g::parse_boolean_op(args.text("operation"));
            const bool remove = args.flag("remove");
            result = g::apply_modifier(target, m, &_scene.find(other)->mesh, &warnings);
            if (remove)
                _scene.erase(other);
        }
        else if (name == "Modifiers.subdivision")
        {
            g::SubdivisionModifier m;
            m.levels = args.integer("levels");
            m.render_levels = args.integer("render_levels");
            if (m.levels > _limits.max_subdivision_levels)
                Args::fail(fmt::format("levels of {} exceeds the limit of {}", m.levels,
                                       _limits.max_subdivision_levels));
            double predicted = static_cast<double>(target.triangles.size());
            for (int i = 0; i < m.levels; ++i)
                predicted *= 4.0;
            if (predicted > static_cast<double>(_limits.max_triangles))
                Args::fail(fmt::format("scene exceeds the triangle budget of {}", _limits.max_triangles));
            result = g::apply_modifier(target, m, nullptr, &warnings);
        }
        else if (name == "Modifiers.bevel")
        {
            g::BevelModifier m;
            m.width = args.real("width");
            m.segments = args.integer("segments");
            m.affect = g::parse_bevel_affect(args.text("affect"));
            if (m.segments > _limits.max_resolution)
                Args::fail(fmt::format("argument 'segments' of '{}' must be at most {}", name,
                                       _limits.max_resolution));
            result = g::apply_modifier(target, m, nullptr, &warnings);
        }
        else if (name == "Modifiers.array")
        {
            g::ArrayModifier m;
            m.count = args.integer("count");
            m.relative_offset = args.vec("relative_offset");
            if (m.count > _limits.max_array_count)
                Args::fail(fmt::format("count of {} exceeds the limit of {}", m.count, _limits.max_array_count));
            if (static_cast<double>(target.triangles.size()) * m.count > static_cast<double>(_limits.max_triangles))
                Args::fail(fmt::format("scene exceeds the triangle budget of {}", _limits.max_triangles));
            result = g::apply_modifier(target, m, nullptr, &warnings);
        }
        else if (name == "Modifiers.mirror")
        {
            g::MirrorModifier m;
            m.axis = args.bools("axis");
            m.use_clip = args.flag("use_clip");
            result = g::apply_modifier(target, m, nullptr, &warnings);
        }
        else if (name == "Modifiers.curve")
        {
            const std::string curve = args.object("curve_obj");
            g::CurveModifier m;
            m.deform_axis = g::parse_deform_axis(args.text("deform_axis"));
            result = g::apply_modifier(target, m, &_scene.find(curve)->mesh, &warnings);
        }
        else if (name == "Modifiers.solidify")
        {
            g::SolidifyModifier m;
            m.thickness = args.real("thickness");
            result = g::apply_modifier(target, m, nullptr, &warnings);
        }
        else
            result = target;  // to_mesh: objects are already meshes

        SceneObject* obj = _scene.find(key);
        obj->mesh = std::move(result);
        if (st.target && *st.target != key)
        {
            const std::string renamed = *st.target;
            _scene.erase(renamed);
            _scene.find(key)->key = renamed;
        }
    }

    const ExecutionLimits& _limits;
    std::vector<Diagnostic>& _diagnostics;
    Scene _scene;
    int _created = 0;
};

} // namespace

const SceneObject* SceneObjects::find(std::string_view key) const
{
    for (const auto& o: objects)
        if (o.key == key)
            return &o;
    return nullptr;
}

ExecResult execute(const ShapeProgram& program, const ExecutionLimits& limits)
{
    ExecResult out;
    Interpreter interp(limits, out.diagnostics);
    if (interp.run(program))
        out.scene = interp.finish();
    return out;
}

ExecResult run_source(std::string_view source, const ExecutionLimits& limits)
{
    auto parsed = parse(source);
    if (!parsed.program)
        return {std::nullopt, std::move(parsed.diagnostics)};
    ExecResult out = execute(*parsed.program, limits);
    out.diagnostics.insert(out.diagnostics.begin(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    return out;
}

} // namespace shapecraft::program
