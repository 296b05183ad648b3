#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riemap/registry.hpp"

namespace riemap {

/// Curve prescription: one seeded curve family at the scenario's first point.
struct CurveSpec {
    double kappa = 1.0;
    double tau = 0.0;
    double s_max = 6.283185307179586;
    double step = 1e-3;
    std::uint64_t frame_seed = 1;
    int trials = 10;
};

struct Tolerances {
    double isometry = 1e-8;
    double isotropy = 1e-6;
    double spread = 1e-4;
    double condition = 1e-3;
};

/// A parsed and validated scenario: the map under test, the points to probe,
/// the curve prescription and the tolerances.
struct Scenario {
    std::string name;
    bool informational = false;
    std::string source_desc;
    std::string target_desc;
    std::string map_desc;
    SmoothMap map;
    std::vector<Vec> points;
    CurveSpec curve;
    Tolerances tol;
    int samples = 100;
    std::uint64_t seed = 1;
};

namespace detail {

struct ScenarioLine {
    int number = 0;
    std::string section;
    std::string key;
    std::string value;
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_number(const ScenarioLine& line) {
    const std::string& v = line.value;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(line.section + "." + line.key + ": expected a number, got '" + v + "'",
                         static_cast<std::size_t>(line.number));
    return out;
}

inline std::uint64_t parse_seed(const ScenarioLine& line) {
    const std::string& v = line.value;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(line.section + "." + line.key + ": expected an unsigned integer",
                         static_cast<std::size_t>(line.number));
    return out;
}

inline std::vector<double> parse_number_list(const ScenarioLine& line) {
    std::vector<double> vals;
    std::string_view rest = line.value;
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string part = trim(rest.substr(0, comma));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw ParseError(line.section + "." + line.key + ": bad number '" + part + "'",
                             static_cast<std::size_t>(line.number));
        vals.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return vals;
}

/// Raw key/value lines grouped by section, in file order.
struct ScenarioText {
    std::vector<ScenarioLine> lines;

    const ScenarioLine* find(const std::string& section, const std::string& key) const {
        for (const auto& l : lines)
            if (l.section == section && l.key == key) return &l;
        return nullptr;
    }

    std::vector<const ScenarioLine*> find_all(const std::string& section,
                                              const std::string& key) const {
        std::vector<const ScenarioLine*> out;
        for (const auto& l : lines)
            if (l.section == section && l.key == key) out.push_back(&l);
        return out;
    }
};

inline ScenarioText tokenize_scenario(std::string_view text) {
    ScenarioText out;
    std::string section;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++number;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("malformed section header '" + line + "'",
                                 static_cast<std::size_t>(number));
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value', got '" + line + "'",
                             static_cast<std::size_t>(number));
        ScenarioLine sl;
        sl.number = number;
        sl.section = section;
        sl.key = trim(std::string_view(line).substr(0, eq));
        sl.value = trim(std::string_view(line).substr(eq + 1));
        if (sl.key.empty() || sl.value.empty())
            throw ParseError("expected 'key = value', got '" + line + "'",
                             static_cast<std::size_t>(number));
        out.lines.push_back(std::move(sl));
    }
    return out;
}

inline ChartManifold manifold_from_section(const ScenarioText& text, const std::string& section) {
    const ScenarioLine* kind = text.find(section, "manifold");
    if (!kind) throw ParseError(section + ".manifold: missing", 0);
    if (kind->value != "custom") return manifold_from_name(kind->value);

    const ScenarioLine* dim_line = text.find(section, "dim");
    if (!dim_line) throw ParseError(section + ".dim: required for custom manifolds", 0);
    const int dim = static_cast<int>(parse_number(*dim_line));
    if (dim < 1 || dim > 9)
        throw ParseError(section + ".dim: must be in 1..9",
                         static_cast<std::size_t>(dim_line->number));

    std::vector<Interval> domain(static_cast<std::size_t>(dim), Interval{-1e8, 1e8});
    if (const ScenarioLine* dom = text.find(section, "domain")) {
        std::string_view rest = dom->value;
        std::vector<Interval> boxes;
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            const std::string part = trim(rest.substr(0, comma));
            const std::size_t colon = part.find(':');
            if (colon == std::string::npos)
                throw ParseError(section + ".domain: expected 'lo:hi' pairs",
                                 static_cast<std::size_t>(dom->number));
            Interval box;
            box.lo = std::stod(part.substr(0, colon));
            box.hi = std::stod(part.substr(colon + 1));
            boxes.push_back(box);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (static_cast<int>(boxes.size()) != dim)
            throw ParseError(section + ".domain: need one lo:hi pair per dimension",
                             static_cast<std::size_t>(dom->number));
        domain = std::move(boxes);
    }

    // metric entries g{i}{j}, 1-based upper triangle; identity by default
    std::vector<Expr> metric(static_cast<std::size_t>(dim * dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            metric[static_cast<std::size_t>(i * dim + j)] =
                Expr::constant(i == j ? 1.0 : 0.0, dim);
    for (int i = 1; i <= dim; ++i)
        for (int j = i; j <= dim; ++j) {
            const std::string key = "g" + std::to_string(i) + std::to_string(j);
            if (const ScenarioLine* entry = text.find(section, key)) {
                Expr e;
                try {
                    e = Expr::parse(entry->value, dim);
                } catch (const ParseError& pe) {
                    throw ParseError(section + "." + key + ": " + pe.what(),
                                     static_cast<std::size_t>(entry->number));
                }
                metric[static_cast<std::size_t>((i - 1) * dim + (j - 1))] = e;
                metric[static_cast<std::size_t>((j - 1) * dim + (i - 1))] = e;
            }
        }
    return ChartManifold("custom", std::move(domain), std::move(metric));
}

}  // namespace detail

/// Parse and validate a scenario from its text form. Diagnostics carry the
/// field path and line number.
inline Scenario parse_scenario(std::string_view text) {
    using detail::ScenarioLine;
    const detail::ScenarioText lines = detail::tokenize_scenario(text);

    Scenario sc;
    if (const ScenarioLine* name = lines.find("", "name")) sc.name = name->value;
    if (sc.name.empty()) throw ParseError("name: missing", 0);
    if (const ScenarioLine* info = lines.find("", "informational"))
        sc.informational = (info->value == "true" || info->value == "1");

    const ScenarioLine* map_line = lines.find("map", "map");
    if (!map_line) throw ParseError("map.map: missing", 0);
    sc.map_desc = map_line->value;

    if (map_line->value == "custom") {
        ChartManifold source = detail::manifold_from_section(lines, "source");
        ChartManifold target = detail::manifold_from_section(lines, "target");
        std::vector<Expr> comps;
        for (int a = 1; a <= target.dim(); ++a) {
            const ScenarioLine* c = lines.find("map", "c" + std::to_string(a));
            if (!c)
                throw ParseError("map.c" + std::to_string(a) + ": missing component", 0);
            try {
                comps.push_back(Expr::parse(c->value, source.dim()));
            } catch (const ParseError& pe) {
                throw ParseError("map.c" + std::to_string(a) + ": " + pe.what(),
                                 static_cast<std::size_t>(c->number));
            }
        }
        sc.source_desc = lines.find("source", "manifold")->value;
        sc.target_desc = lines.find("target", "manifold")->value;
        try {
            sc.map = SmoothMap("custom", std::move(source), std::move(target), std::move(comps));
        } catch (const GeometryError& ge) {
            throw ParseError(std::string("map: ") + ge.what(),
                             static_cast<std::size_t>(map_line->number));
        }
    } else {
        try {
            sc.map = map_from_name(map_line->value);
        } catch (const Error& e) {
            throw ParseError(std::string("map.map: ") + e.what(),
                             static_cast<std::size_t>(map_line->number));
        }
        sc.source_desc = sc.map.source().name();
        sc.target_desc = sc.map.target().name();
        // optional source/target sections must agree dimensionally
        for (const auto& [section, dim] :
             {std::pair<std::string, int>{"source", sc.map.source().dim()},
              std::pair<std::string, int>{"target", sc.map.target().dim()}}) {
            if (const ScenarioLine* decl = lines.find(section, "manifold")) {
                if (decl->value == "custom") continue;
                const ChartManifold declared = manifold_from_name(decl->value);
                if (declared.dim() != dim)
                    throw ParseError(section + ".manifold: dimension mismatch with map",
                                     static_cast<std::size_t>(decl->number));
            }
        }
    }

    for (const ScenarioLine* pt : lines.find_all("points", "point")) {
        const std::vector<double> vals = detail::parse_number_list(*pt);
        if (static_cast<int>(vals.size()) != sc.map.source().dim())
            throw ParseError("points.point: expected " + std::to_string(sc.map.source().dim()) +
                                 " coordinates, got " + std::to_string(vals.size()),
                             static_cast<std::size_t>(pt->number));
        Vec p(static_cast<long>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i) p[static_cast<long>(i)] = vals[i];
        if (!sc.map.source().in_domain(p))
            throw ParseError("points.point: outside the source chart domain",
                             static_cast<std::size_t>(pt->number));
        sc.points.push_back(std::move(p));
    }
    if (sc.points.empty()) throw ParseError("points: at least one point required", 0);

    if (const ScenarioLine* l = lines.find("curve", "kappa")) sc.curve.kappa = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("curve", "tau")) sc.curve.tau = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("curve", "s_max")) sc.curve.s_max = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("curve", "step")) {
        sc.curve.step = detail::parse_number(*l);
        if (!(sc.curve.step > 0.0))
            throw ParseError("curve.step: must be > 0", static_cast<std::size_t>(l->number));
    }
    if (const ScenarioLine* l = lines.find("curve", "frame_seed"))
        sc.curve.frame_seed = detail::parse_seed(*l);
    if (const ScenarioLine* l = lines.find("curve", "trials")) {
        sc.curve.trials = static_cast<int>(detail::parse_number(*l));
        if (sc.curve.trials < 1)
            throw ParseError("curve.trials: must be >= 1", static_cast<std::size_t>(l->number));
    }
    if (!(sc.curve.s_max >= 10.0 * sc.curve.step)) {
        const ScenarioLine* l = lines.find("curve", "s_max");
        throw ParseError("curve.s_max: must be at least 10 steps",
                         static_cast<std::size_t>(l ? l->number : 0));
    }

    if (const ScenarioLine* l = lines.find("tolerances", "isometry")) sc.tol.isometry = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("tolerances", "isotropy")) sc.tol.isotropy = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("tolerances", "spread")) sc.tol.spread = detail::parse_number(*l);
    if (const ScenarioLine* l = lines.find("tolerances", "condition")) sc.tol.condition = detail::parse_number(*l);

    if (const ScenarioLine* l = lines.find("run", "samples")) {
        sc.samples = static_cast<int>(detail::parse_number(*l));
        if (sc.samples < 10)
            throw ParseError("run.samples: must be >= 10", static_cast<std::size_t>(l->number));
    }
    if (const ScenarioLine* l = lines.find("run", "seed")) sc.seed = detail::parse_seed(*l);

    return sc;
}

/// Built-in scenarios shipped with the tool; also mirrored as files under
/// scenarios/ in the repository.
inline const std::vector<std::pair<std::string, std::string>>& builtin_scenarios() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"sphere_isotropy", R"(# Unit sphere immersed in 3-space: isotropic with lambda = 1,
# horizontal circles map to curves of constant curvature sqrt(kappa^2 + 1).
name = sphere_isotropy

[source]
manifold = sphere{1}

[target]
manifold = euclidean{3}

[map]
map = sphere_immersion{1}

[points]
point = 1.5707963267948966, 3.0
point = 1.2, 0.7
point = 1.9, 4.0

[curve]
kappa = 2
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 7
trials = 10

[run]
samples = 100
seed = 20240901
)"},
        {"scaling_negative", R"(# x -> 2x fails the horizontal-isometry test with residual 3
# (|g(2h, 2h) - 1| = 3); the run must fail.
name = scaling_negative

[source]
manifold = euclidean{2}

[target]
manifold = euclidean{2}

[map]
map = scaling{2}

[points]
point = 0.3, 0.4

[curve]
kappa = 1
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 3
trials = 5

[run]
samples = 100
seed = 20240901
)"},
        {"paper_example", R"(# The worked R^4 -> R^3 example: constant lambda = 1/2 over horizontal
# directions, but the differential scales lengths by 2 on the horizontal
# space, so the isometry residual is 3. Reported without gating.
name = paper_example
informational = true

[source]
manifold = euclidean{4}

[target]
manifold = euclidean{3}

[map]
map = paper_example

[points]
point = 1.4142135623730951, 0, 0, 0
point = 0.9, -0.3, 0.5, 0.2

[curve]
kappa = 1
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 11
trials = 5

[run]
samples = 100
seed = 20240901
)"},
        {"quadric_aniso", R"(# Graph of x3 = x1^2 with the pullback metric: an isometric immersion
# whose normal curvature depends on direction. Image curvature of circles
# spreads widely and the isotropy verdict is negative; the transport
# biconditional still holds, so the run passes.
name = quadric_aniso

[source]
manifold = custom
dim = 2
domain = -3:3, -3:3
g11 = 1 + 4*x1^2
g12 = 0
g22 = 1

[target]
manifold = euclidean{3}

[map]
map = custom
c1 = x1
c2 = x2
c3 = x1^2

[points]
point = 0.1, 0.0
point = 0.0, 0.0

[curve]
kappa = 1
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 13
trials = 10

[run]
samples = 100
seed = 20240901
)"},
        {"identity_circle", R"(# Identity on R^3: totally geodesic, lambda = 0, circles map to themselves.
name = identity_circle

[source]
manifold = euclidean{3}

[target]
manifold = euclidean{3}

[map]
map = identity{3}

[points]
point = 0, 0, 0

[curve]
kappa = 2
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 5
trials = 5

[run]
samples = 100
seed = 20240901
)"},
        {"projection_circle", R"(# Canonical submersion R^3 -> R^2: horizontal circles project isometrically.
name = projection_circle

[source]
manifold = euclidean{3}

[target]
manifold = euclidean{2}

[map]
map = projection{3,2}

[points]
point = 0.1, 0.2, 0.3

[curve]
kappa = 1
tau = 0
s_max = 6.283185307179586
step = 0.001
frame_seed = 9
trials = 5

[run]
samples = 100
seed = 20240901
)"},
        {"identity_helix", R"(# Helix through the identity: the transport condition holds vacuously
# (no normal directions) and the image is the same helix.
name = identity_helix

[source]
manifold = euclidean{3}

[target]
manifold = euclidean{3}

[map]
map = identity{3}

[points]
point = 0, 0, 0

[curve]
kappa = 1
tau = 1
s_max = 6.283185307179586
step = 0.001
frame_seed = 5
trials = 5

[run]
samples = 100
seed = 20240901
)"},
        {"sphere3_helix", R"(# Negative control on the round 3-sphere: umbilical with parallel mean
# curvature, so the normal-connection condition misses by tau^2 = 0.25,
# and the image (a W-curve in R^4) fails the helix equation. Both sides
# of the transport biconditional are false together.
name = sphere3_helix

[source]
manifold = sphere3{1}

[target]
manifold = euclidean{4}

[map]
map = sphere3_immersion{1}

[points]
point = 1.5707963267948966, 1.5707963267948966, 3.141592653589793

[curve]
kappa = 1
tau = 0.5
s_max = 6.283185307179586
step = 0.001
frame_seed = 42
trials = 5

[run]
samples = 100
seed = 20240901
)"},
    };
    return table;
}

inline std::optional<std::string> builtin_scenario_text(std::string_view name) {
    for (const auto& [n, text] : builtin_scenarios())
        if (n == name) return text;
    return std::nullopt;
}

}  // namespace riemap
