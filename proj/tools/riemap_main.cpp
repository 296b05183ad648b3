// riemap: scenario-driven checks for Riemannian-map geometry.
//
// Exit status: 0 = pass (or informational scenario), 1 = checks failed or a
// computation error, 2 = usage or I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "riemap/riemap.hpp"

namespace {

using namespace riemap;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Resolve a scenario argument: a readable file path wins, otherwise a
/// built-in scenario name.
std::string load_scenario_text(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read scenario file '" + arg + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    if (auto text = builtin_scenario_text(arg)) return *text;
    throw std::runtime_error("no scenario file or built-in named '" + arg + "'");
}

struct Overrides {
    std::optional<double> tol_isometry, tol_isotropy, tol_spread, tol_condition;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;

    void apply(Scenario& sc) const {
        if (tol_isometry) sc.tol.isometry = *tol_isometry;
        if (tol_isotropy) sc.tol.isotropy = *tol_isotropy;
        if (tol_spread) sc.tol.spread = *tol_spread;
        if (tol_condition) sc.tol.condition = *tol_condition;
        if (seed) sc.seed = *seed;
        if (step) sc.curve.step = *step;
    }
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--tol-isometry", ov.tol_isometry, "Override the isometry tolerance");
    cmd->add_option("--tol-isotropy", ov.tol_isotropy, "Override the isotropy tolerance");
    cmd->add_option("--tol-spread", ov.tol_spread, "Override the spread tolerance");
    cmd->add_option("--tol-condition", ov.tol_condition, "Override the condition tolerance");
    cmd->add_option("--seed", ov.seed, "Override the run seed");
    cmd->add_option("--step", ov.step, "Override the curve step");
}

int cmd_check(const std::string& scenario_arg, const Overrides& ov,
              const std::string& report_path, bool quiet) {
    Scenario sc = parse_scenario(load_scenario_text(scenario_arg));
    ov.apply(sc);
    const RunReport report = run(sc);
    if (!quiet) std::cout << report_summary(report);
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write report to '" << report_path << "'\n";
            return kExitUsage;
        }
        out << report_to_json(report);
    }
    if (report.scenario.informational) return kExitPass;
    return report.pass ? kExitPass : kExitFail;
}

int cmd_inspect(const std::string& scenario_arg, const Overrides& ov, int point_index,
                bool quiet) {
    Scenario sc = parse_scenario(load_scenario_text(scenario_arg));
    ov.apply(sc);
    if (point_index < 0 || point_index >= static_cast<int>(sc.points.size())) {
        std::cerr << "point index " << point_index << " out of range (scenario has "
                  << sc.points.size() << " points)\n";
        return kExitUsage;
    }
    const Vec& p = sc.points[static_cast<std::size_t>(point_index)];
    const MapJet jt = jet(sc.map, p);
    std::ostringstream out;
    out << "map " << sc.map_desc << " at point " << point_index << " [" << p.transpose() << "]\n";
    out << "  image: [" << jt.q.transpose() << "]\n";
    out << "  rank: " << jt.rank << (jt.degenerate ? " (degenerate)" : "") << "\n";
    out << "  differential (rows = target components):\n";
    for (int a = 0; a < jt.J.rows(); ++a) out << "    [" << jt.J.row(a) << "]\n";
    auto print_basis = [&](const char* label, const std::vector<Vec>& basis) {
        out << "  " << label << " (" << basis.size() << "):\n";
        for (const Vec& v : basis) out << "    [" << v.transpose() << "]\n";
    };
    print_basis("kernel basis", jt.ker);
    print_basis("horizontal basis", jt.horiz);
    print_basis("range basis", jt.range);
    print_basis("normal basis", jt.normal);
    const IsometryCheck iso = is_riemannian_at(jt, sc.tol.isometry);
    out << "  isometry residual: " << iso.residual << (iso.ok ? " (riemannian)" : " (NOT riemannian)")
        << "\n";
    if (!quiet) std::cout << out.str();
    return kExitPass;
}

int cmd_curve(const std::string& scenario_arg, const Overrides& ov, const std::string& emit_dir,
              bool quiet) {
    Scenario sc = parse_scenario(load_scenario_text(scenario_arg));
    ov.apply(sc);
    const std::string table = curve_table_csv(sc);
    std::filesystem::create_directories(emit_dir);
    const std::filesystem::path path =
        std::filesystem::path(emit_dir) / (sc.name + "_curve.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write '" << path.string() << "'\n";
        return kExitUsage;
    }
    out << table;
    if (!quiet) std::cout << "wrote " << path.string() << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for Riemannian maps: isotropy, umbilicity and curve transport"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress human-readable output");

    Overrides ov;
    std::string scenario_arg, report_path, emit_dir;
    int point_index = 0;

    CLI::App* check = app.add_subcommand("check", "Run every check in a scenario");
    check->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    check->add_option("--report", report_path, "Write the machine-readable JSON report here");
    add_override_flags(check, ov);

    CLI::App* inspect = app.add_subcommand("inspect", "Dump the jet and splits at one point");
    inspect->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    inspect->add_option("--point", point_index, "Point index within the scenario");
    add_override_flags(inspect, ov);

    CLI::App* curve = app.add_subcommand("curve", "Emit the per-sample curve table");
    curve->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
    curve->add_option("--emit", emit_dir, "Directory for the CSV table")->required();
    add_override_flags(curve, ov);

    CLI::App* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*check) return cmd_check(scenario_arg, ov, report_path, quiet);
        if (*inspect) return cmd_inspect(scenario_arg, ov, point_index, quiet);
        if (*curve) return cmd_curve(scenario_arg, ov, emit_dir, quiet);
        if (*scenarios) {
            for (const auto& [name, text] : builtin_scenarios()) std::cout << name << "\n";
            return kExitPass;
        }
    } catch (const riemap::ParseError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const riemap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
