#pragma once

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "riemap/scenario.hpp"
#include "riemap/transport.hpp"
#include "riemap/version.hpp"

namespace riemap {

struct PointReport {
    int index = 0;
    Vec coords;
    IsometryCheck riemannian;
    NormalValuedCheck normal_valued;
    IsotropyReport isotropy;
    bool has_umbilicity = false;
    UmbilicityReport umbilicity;
    std::string error;
};

struct CurveReport {
    bool ran = false;
    CircleTransportReport circle;
    bool has_helix = false;
    TransportReport helix;
    std::string error;
};

/// Everything one scenario run produces. Deterministic for a fixed scenario
/// (all randomness flows from the scenario seeds).
struct RunReport {
    std::string tool_version = kVersion;
    Scenario scenario;
    std::vector<PointReport> points;
    CurveReport curve;
    bool pass = false;
    std::string verdict;  // "pass", "fail", or "informational"
    std::vector<std::string> failures;
};

namespace detail {

/// Seeded horizontal orthonormal frame at a jet; the third leg comes from the
/// horizontal space when the rank allows, otherwise from the full tangent
/// space (its kernel component then shows up as measured drift).
inline Frame scenario_frame(const MapJet& jt, std::uint64_t seed, bool want_third) {
    Rng rng(seed);
    std::vector<Vec> legs;
    const int draws = want_third ? 3 : 2;
    for (int i = 0; i < draws; ++i) {
        Vec v = Vec::Zero(jt.source_dim());
        const Vec c = rng.normal_vector(jt.rank);
        for (int k = 0; k < jt.rank; ++k) v += c[k] * jt.horiz[static_cast<std::size_t>(k)];
        legs.push_back(v);
    }
    std::vector<Vec> basis = orthonormalize(legs, jt.g1);
    if (static_cast<int>(basis.size()) < draws) {
        // horizontal space too small: complete in the full tangent space
        basis = orthonormalize(basis, jt.g1);
        for (const Vec& extra : orthonormal_complement(basis, jt.g1)) {
            basis.push_back(extra);
            if (static_cast<int>(basis.size()) == draws) break;
        }
    }
    Frame f;
    f.V1 = basis.at(0);
    f.V2 = basis.at(1);
    if (want_third) f.V3 = basis.at(2);
    return f;
}

}  // namespace detail

/// Execute a scenario: per-point isometry/isotropy/umbilicity, then the
/// circle-transport check at the first point, then (for nonzero torsion) the
/// helix-transport check. Hard errors are recorded, not thrown.
inline RunReport run(const Scenario& sc) {
    RunReport report;
    report.scenario = sc;

    for (std::size_t i = 0; i < sc.points.size(); ++i) {
        PointReport pr;
        pr.index = static_cast<int>(i);
        pr.coords = sc.points[i];
        try {
            const MapJet jt = jet(sc.map, sc.points[i]);
            pr.riemannian = is_riemannian_at(jt, sc.tol.isometry);
            pr.normal_valued = check_normal_valued(sc.map, sc.points[i], 20, sc.seed);
            pr.isotropy = isotropy_test(sc.map, sc.points[i], sc.samples, sc.seed, sc.tol.isotropy);
            if (jt.rank >= 2) {
                pr.umbilicity = umbilicity_test(sc.map, sc.points[i]);
                pr.has_umbilicity = true;
            }
        } catch (const Error& e) {
            pr.error = e.what();
        }
        report.points.push_back(std::move(pr));
    }

    try {
        const Vec& p0 = sc.points.front();
        report.curve.circle = theorem31_check(sc.map, p0, sc.curve.kappa, sc.curve.trials,
                                              sc.curve.frame_seed, sc.curve.s_max, sc.curve.step,
                                              sc.tol.spread, sc.samples, sc.tol.isotropy);
        report.curve.ran = true;
        if (sc.curve.tau != 0.0) {
            const MapJet jt = jet(sc.map, p0);
            const Frame frame = detail::scenario_frame(jt, sc.curve.frame_seed, true);
            const FrenetCurve helix = generate_frenet_curve(
                sc.map.source(), p0, frame, sc.curve.kappa, sc.curve.tau, sc.curve.s_max,
                sc.curve.step);
            report.curve.helix =
                helix_condition_check(sc.map, helix, sc.tol.condition, sc.tol.spread);
            report.curve.has_helix = true;
        }
    } catch (const Error& e) {
        report.curve.error = e.what();
    }

    // Verdict: every point must be a Riemannian map point and the transport
    // biconditionals must hold; hard errors fail the run.
    auto fail = [&](const std::string& why) { report.failures.push_back(why); };
    for (const PointReport& pr : report.points) {
        if (!pr.error.empty())
            fail("point " + std::to_string(pr.index) + ": " + pr.error);
        else if (!pr.riemannian.ok)
            fail("point " + std::to_string(pr.index) + ": isometry residual " +
                 std::to_string(pr.riemannian.residual) + " exceeds tolerance");
    }
    if (!report.curve.error.empty())
        fail("curve: " + report.curve.error);
    if (report.curve.ran && !report.curve.circle.biconditional_upheld)
        fail("circle transport: constant-curvature/isotropy biconditional violated");
    if (report.curve.has_helix && !report.curve.helix.biconditional_upheld)
        fail("helix transport: condition/helix biconditional violated");

    report.pass = report.failures.empty();
    report.verdict = sc.informational ? "informational" : (report.pass ? "pass" : "fail");
    return report;
}

namespace detail {

using json = nlohmann::ordered_json;

inline json to_json(const Vec& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline json to_json(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

inline json to_json(const IsotropyReport& rep) {
    return json{{"lambda_mean", rep.lambda_mean},
                {"lambda_min", rep.lambda_min},
                {"lambda_max", rep.lambda_max},
                {"lambda_spread", rep.lambda_spread()},
                {"pair_residual", rep.lemma_residual},
                {"samples", rep.sample_count},
                {"verdict", to_string(rep.verdict)}};
}

inline json scenario_to_json(const Scenario& sc) {
    json points = json::array();
    for (const Vec& p : sc.points) points.push_back(to_json(p));
    return json{{"name", sc.name},
                {"informational", sc.informational},
                {"source", sc.source_desc},
                {"target", sc.target_desc},
                {"map", sc.map_desc},
                {"points", points},
                {"curve",
                 {{"kappa", sc.curve.kappa},
                  {"tau", sc.curve.tau},
                  {"s_max", sc.curve.s_max},
                  {"step", sc.curve.step},
                  {"frame_seed", sc.curve.frame_seed},
                  {"trials", sc.curve.trials}}},
                {"tolerances",
                 {{"isometry", sc.tol.isometry},
                  {"isotropy", sc.tol.isotropy},
                  {"spread", sc.tol.spread},
                  {"condition", sc.tol.condition}}},
                {"samples", sc.samples},
                {"seed", sc.seed}};
}

}  // namespace detail

/// Machine-readable report. Deterministic byte-for-byte for a fixed scenario
/// and seed (wall-clock time is deliberately not included).
inline std::string report_to_json(const RunReport& report) {
    using detail::json;
    json root;
    root["tool"] = {{"name", "riemap"}, {"version", report.tool_version}};
    root["scenario"] = detail::scenario_to_json(report.scenario);

    json points = json::array();
    for (const PointReport& pr : report.points) {
        json jp;
        jp["index"] = pr.index;
        jp["coords"] = detail::to_json(pr.coords);
        if (!pr.error.empty()) {
            jp["error"] = pr.error;
        } else {
            jp["riemannian"] = {{"residual", pr.riemannian.residual}, {"ok", pr.riemannian.ok}};
            jp["normal_valued"] = {{"residual", pr.normal_valued.residual},
                                   {"riemannian", pr.normal_valued.riemannian}};
            jp["isotropy"] = detail::to_json(pr.isotropy);
            if (pr.has_umbilicity)
                jp["umbilicity"] = {{"residual", pr.umbilicity.residual},
                                    {"offdiag", pr.umbilicity.offdiag},
                                    {"H2", detail::to_json(pr.umbilicity.H2)}};
        }
        points.push_back(std::move(jp));
    }
    root["points"] = points;

    json jc;
    if (!report.curve.error.empty()) jc["error"] = report.curve.error;
    if (report.curve.ran) {
        const CircleTransportReport& c = report.curve.circle;
        json trials = json::array();
        for (const CircleTrial& t : c.trials)
            trials.push_back({{"kappa_spread", t.kappa_spread},
                              {"drift", t.drift},
                              {"eq31_residual", t.eq31_residual},
                              {"skipped", t.skipped}});
        jc["circle"] = {{"kappa", c.kappa},
                        {"trials", trials},
                        {"skipped", c.skipped},
                        {"max_kappa_spread", c.max_kappa_spread},
                        {"max_drift", c.max_drift},
                        {"max_eq31_residual", c.max_eq31_residual},
                        {"isotropy_verdict", to_string(c.isotropy.verdict)},
                        {"image_curvature_constant", c.image_curvature_constant},
                        {"biconditional_upheld", c.biconditional_upheld}};
    }
    if (report.curve.has_helix) {
        const TransportReport& h = report.curve.helix;
        jc["helix"] = {{"source_kappa", h.source_kappa},
                       {"source_tau", h.source_tau},
                       {"horizontality_drift", h.horizontality_drift},
                       {"kappa_spread", h.kappa_spread},
                       {"tau_spread", h.tau_spread},
                       {"eq31_residual", h.eq31_residual},
                       {"umbilic_residual", h.umbilic_residual},
                       {"h2_normal_residual", h.h2_normal_residual},
                       {"helix_condition_residual", h.helix_condition_residual},
                       {"eq41_residual", h.eq41_residual},
                       {"reparametrized", h.reparametrized},
                       {"condition_holds", h.condition_holds},
                       {"image_is_helix", h.image_is_helix},
                       {"biconditional_upheld", h.biconditional_upheld},
                       {"image_kappa", detail::to_json(h.image_kappa)},
                       {"image_tau", detail::to_json(h.image_tau)}};
    }
    root["transport"] = jc;
    root["overall"] = {{"pass", report.pass},
                       {"verdict", report.verdict},
                       {"failures", report.failures}};
    return root.dump(2) + "\n";
}

/// Per-sample table of the scenario curve: arc length, source coordinates,
/// image curvature/torsion and per-sample horizontality drift. Floats carry
/// 17 significant digits so golden files round-trip losslessly.
inline std::string curve_table_csv(const Scenario& sc) {
    const Vec& p0 = sc.points.front();
    const MapJet jt0 = jet(sc.map, p0);
    const Frame frame = detail::scenario_frame(jt0, sc.curve.frame_seed, sc.curve.tau != 0.0);
    const FrenetCurve curve = generate_frenet_curve(sc.map.source(), p0, frame, sc.curve.kappa,
                                                    sc.curve.tau, sc.curve.s_max, sc.curve.step);
    const PushedCurve pushed = pushforward_curve(sc.map, curve);
    const ImageCurvature ic = image_curvature(pushed, curve);

    std::vector<double> tau_tilde(curve.u.size(), std::numeric_limits<double>::quiet_NaN());
    if (sc.map.target().dim() >= 3) {
        try {
            const FrenetApparatus ap = frenet_apparatus(sc.map.target(), pushed.path.images,
                                                        curve.step);
            tau_tilde = ap.tau;
        } catch (const Error&) {
            // non-unit-speed image (non-Riemannian map): torsion left undefined
        }
    }

    std::ostringstream out;
    const int m = sc.map.source().dim();
    out << "s";
    for (int i = 1; i <= m; ++i) out << ",u" << i;
    out << ",kappa_tilde,tau_tilde,horiz_drift\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (int i = 0; i < curve.size(); ++i) {
        emit(curve.s[static_cast<std::size_t>(i)]);
        for (int k = 0; k < m; ++k) {
            out << ',';
            emit(curve.u[static_cast<std::size_t>(i)][k]);
        }
        out << ',';
        emit(ic.kappa_tilde[static_cast<std::size_t>(i)]);
        out << ',';
        emit(tau_tilde[static_cast<std::size_t>(i)]);
        out << ',';
        const MapJet& jt = pushed.path.jets[static_cast<std::size_t>(i)];
        const Vec kc = jt.project_kernel(curve.V1[static_cast<std::size_t>(i)]);
        emit(std::sqrt(inner(jt.g1, kc, kc)));
        out << '\n';
    }
    return out.str();
}

/// Human-readable one-screen summary.
inline std::string report_summary(const RunReport& report) {
    std::ostringstream out;
    out << "scenario " << report.scenario.name << " (" << report.scenario.map_desc << ": "
        << report.scenario.source_desc << " -> " << report.scenario.target_desc << ")\n";
    for (const PointReport& pr : report.points) {
        out << "  point " << pr.index << ":";
        if (!pr.error.empty()) {
            out << " error: " << pr.error << "\n";
            continue;
        }
        out << " isometry_residual=" << pr.riemannian.residual
            << (pr.riemannian.ok ? " (riemannian)" : " (NOT riemannian)")
            << " lambda=" << pr.isotropy.lambda_mean
            << " spread=" << pr.isotropy.lambda_spread()
            << " verdict=" << to_string(pr.isotropy.verdict);
        if (pr.has_umbilicity) out << " umbilic_residual=" << pr.umbilicity.residual;
        out << "\n";
    }
    if (!report.curve.error.empty()) out << "  curve: error: " << report.curve.error << "\n";
    if (report.curve.ran) {
        const CircleTransportReport& c = report.curve.circle;
        out << "  circles(kappa=" << c.kappa << "): max_kappa_spread=" << c.max_kappa_spread
            << " skipped=" << c.skipped << " isotropy=" << to_string(c.isotropy.verdict)
            << " biconditional=" << (c.biconditional_upheld ? "upheld" : "VIOLATED") << "\n";
    }
    if (report.curve.has_helix) {
        const TransportReport& h = report.curve.helix;
        out << "  helix(kappa=" << h.source_kappa << ", tau=" << h.source_tau
            << "): umbilic=" << h.umbilic_residual
            << " condition_residual=" << h.helix_condition_residual
            << " kappa_spread=" << h.kappa_spread << " tau_spread=" << h.tau_spread
            << " eq41=" << h.eq41_residual
            << " biconditional=" << (h.biconditional_upheld ? "upheld" : "VIOLATED") << "\n";
    }
    out << "  overall: " << report.verdict;
    if (!report.failures.empty()) {
        out << "\n";
        for (const std::string& f : report.failures) out << "    - " << f << "\n";
    } else {
        out << "\n";
    }
    return out.str();
}

}  // namespace riemap
