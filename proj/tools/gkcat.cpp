// Command-line front end: solve / scan / table / verify / mesh / period.
//
// Exit codes: 0 success, 1 invalid input or internal error, 2 no root found.
// Thread count comes from the GKCAT_THREADS environment variable.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gkcat/gkcat.hpp"

namespace {

using namespace gkcat;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoRoot = 2;

struct TolProfile {
    double rel_tol;
    double abs_tol;
    double root_tol;
};

TolProfile profile_from_name(const std::string& name) {
    if (name == "fast") return {1e-9, 1e-11, 1e-8};
    if (name == "paranoid") return {1e-14, 1e-16, 1e-12};
    return {1e-12, 1e-14, 1e-10};
}

SolverOptions solver_options(const std::string& profile) {
    const TolProfile t = profile_from_name(profile);
    SolverOptions opt;
    opt.transport.rel_tol = t.rel_tol;
    opt.transport.abs_tol = t.abs_tol;
    opt.root_tol = t.root_tol;
    return opt;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << text;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Target parse_target(const std::string& name) {
    if (name == "h3") return Target::H3;
    if (name == "ds-elliptic") return Target::DSElliptic;
    if (name == "ds-hyperbolic") return Target::DSHyperbolic;
    throw CLI::ValidationError("target must be h3, ds-elliptic or ds-hyperbolic");
}

std::string solve_result_json(const SolveResult& r) {
    JsonWriter w;
    w.begin_object();
    w.field("k", r.k);
    w.field("lambda", r.lambda);
    w.field("c_star", r.c_star);
    w.field("h", r.h);
    w.field("ambient", to_string(r.ambient));
    w.field("discriminant", r.discriminant);
    w.field("alpha", r.alpha);
    w.field("beta", r.beta);
    w.field("gap_residual", r.gap_residual);
    w.field("membership_residual", r.membership_residual);
    w.key("bracket");
    w.begin_array();
    w.value(r.bracket.first);
    w.value(r.bracket.second);
    w.end_array();
    w.end_object();
    return w.str();
}

// ---------------------------------------------------------------------------

int cmd_solve(int k, double lambda, const std::string& target_name,
              const std::vector<double>& bracket, const std::string& profile,
              const std::string& out_path) {
    const Target target = parse_target(target_name);
    const SolverOptions opt = solver_options(profile);
    std::optional<std::pair<double, double>> br;
    if (!bracket.empty()) br = {bracket[0], bracket[1]};
    std::optional<SolveResult> result;
    try {
        result = solve_target(k, lambda, target, br, opt);
    } catch (const SolverError& e) {
        std::cerr << "no root: " << e.what() << "\n";
        return kExitNoRoot;
    }
    if (!result) {
        std::cerr << "no root matching target " << target_name << "\n";
        return kExitNoRoot;
    }
    emit(solve_result_json(*result), out_path);
    return kExitOk;
}

int cmd_scan(int k, double lambda, double c_min, double c_max, int steps,
             const std::string& format, const std::string& profile,
             const std::string& out_path) {
    const SolverOptions opt = solver_options(profile);
    const auto samples = scan(k, lambda, c_min, c_max, steps, opt);
    std::string text;
    if (format == "json") {
        JsonWriter w;
        w.begin_object();
        w.field("k", k);
        w.field("lambda", lambda);
        w.key("samples");
        w.begin_array();
        for (const auto& s : samples) {
            w.begin_object();
            w.field("c", s.c);
            w.field("status", to_string(s.status));
            if (s.status == SampleStatus::Ok) {
                w.field("h1", s.h1);
                w.field("h2", s.h2);
                w.field("gap", s.gap);
            }
            w.end_object();
        }
        w.end_array();
        w.key("brackets");
        w.begin_array();
        for (const auto& br : sign_change_brackets(samples)) {
            w.begin_array();
            w.value(br.first);
            w.value(br.second);
            w.end_array();
        }
        w.end_array();
        w.end_object();
        text = w.str();
    } else {
        text = "c,h1,h2,gap,status\n";
        for (const auto& s : samples) {
            text += csv_number(s.c);
            if (s.status == SampleStatus::Ok) {
                text += "," + csv_number(s.h1) + "," + csv_number(s.h2) + "," +
                        csv_number(s.gap);
            } else {
                text += ",,,";
            }
            text += std::string(",") + to_string(s.status) + "\n";
        }
    }
    emit(text, out_path);
    return kExitOk;
}

int cmd_table(int k_max, double lambda, const std::string& profile,
              const std::string& out_path) {
    const SolverOptions opt = solver_options(profile);
    const auto rows = solve_table(k_max, lambda, opt);
    std::string text = "k,c_h3,h_h3,c_ell,h_ell,c_hyp,h_hyp,diagnostics\n";
    for (const auto& row : rows) {
        text += std::to_string(row.k);
        for (const auto* r : {&row.h3, &row.elliptic, &row.hyperbolic}) {
            if (*r)
                text += "," + csv_number((*r)->c_star) + "," + csv_number((*r)->h);
            else
                text += ",,";
        }
        text += "," + row.diagnostics + "\n";
    }
    emit(text, out_path);
    return kExitOk;
}

int cmd_verify(int k, double lambda, double c, const std::string& profile,
               const std::string& out_path) {
    const SolverOptions opt = solver_options(profile);
    const CurveParams params = make_params(k, lambda, c);

    struct Check {
        const char* name;
        double value;
        double tolerance;
        bool checked = true;
        bool pass() const { return !checked || value <= tolerance; }
    };
    std::vector<Check> checks;

    const auto t1 = transport(params, make_path_c1(params), params.w0,
                              Mat2::identity(), opt.transport);
    const auto t2 = transport(params, make_path_c2(params), params.w0,
                              Mat2::identity(), opt.transport);
    checks.push_back({"det_drift", std::max(t1.det_drift, t2.det_drift), 1e-9});

    checks.push_back(
        {"homotopy",
         homotopy_difference(params, make_path_c1(params, 0.1),
                             make_path_c1(params, 0.3), params.w0, opt.transport),
         1e-8});

    const SymmetryReport sym = symmetry_residuals(params, opt.transport);
    checks.push_back({"mirror_symmetry", sym.mirror, 1e-8});
    checks.push_back({"inversion_symmetry", sym.inversion, 1e-8});
    checks.push_back({"rotation_symmetry", sym.rotation, 1e-8});

    double h = 0.0;
    std::string ambient_name = "unknown";
    bool closing_ok = false;
    try {
        const ClosingData cd =
            extract_closing(first_loop_monodromy(t1.frame, params.Lambda),
                            second_loop_monodromy(t2.frame), opt.form_tol);
        checks.push_back({"closing_form", cd.form_residual, opt.form_tol});
        const double gap = std::abs(cd.h1 - cd.h2);
        checks.push_back({"closing_gap", gap, 1e-6});
        if (gap <= 1e-6) {
            closing_ok = true;
            h = 0.5 * (cd.h1 + cd.h2);
            const Ambient ambient = classify(h, c, k, lambda);
            ambient_name = to_string(ambient);
            const auto [alpha, beta] = initial_frame(h, ambient);
            const Mat2 g1 = conjugated_monodromy(cd.m1, alpha, beta, ambient);
            const Mat2 g2 = conjugated_monodromy(cd.m2, alpha, beta, ambient);
            const double memb =
                ambient == Ambient::H3
                    ? std::max(su2_residual(g1), su2_residual(g2))
                    : std::max(su11_residual(g1), su11_residual(g2));
            checks.push_back({"membership", memb, 1e-6});
        } else {
            checks.push_back({"membership", 0.0, 1e-6, false});
        }
    } catch (const ClosingError& e) {
        checks.push_back({"closing_form", 1.0, opt.form_tol});
        std::cerr << "closing extraction failed: " << e.what() << "\n";
    }

    bool all_pass = closing_ok;
    for (const auto& ch : checks) all_pass = all_pass && ch.pass();

    JsonWriter w;
    w.begin_object();
    w.field("k", k);
    w.field("lambda", lambda);
    w.field("c", c);
    w.key("checks");
    w.begin_object();
    for (const auto& ch : checks) {
        w.key(ch.name);
        w.begin_object();
        if (ch.checked) {
            w.field("value", ch.value);
            w.field("tolerance", ch.tolerance);
        } else {
            w.field("checked", false);
        }
        w.field("pass", ch.pass());
        w.end_object();
    }
    w.end_object();
    if (closing_ok) {
        w.field("h", h);
        w.field("ambient", ambient_name);
    }
    w.field("pass", all_pass);
    w.end_object();
    emit(w.str(), out_path);
    return all_pass ? kExitOk : kExitError;
}

int cmd_mesh(int k, double lambda, double c, const std::string& space_name,
             int radial, int angular, const std::string& out_path, bool force,
             const std::string& profile) {
    const Target space = parse_target(space_name);
    const SolverOptions opt = solver_options(profile);

    const bool obj = out_path.ends_with(".obj");
    const bool ply = out_path.ends_with(".ply");
    if (!obj && !ply)
        throw CLI::ValidationError("output file must end in .obj or .ply");

    const CurveParams params = make_params(k, lambda, c);
    const ClosingData cd = closing_pair(params, opt.transport, opt.form_tol);
    const double gap = std::abs(cd.h1 - cd.h2);
    const double h = 0.5 * (cd.h1 + cd.h2);
    const Ambient ambient = classify(h, c, k, lambda);
    // the gate accepts roots quoted to table precision (six significant
    // digits leave a gap of order 1e-5); anything genuinely non-closing
    // sits orders of magnitude above it
    const bool is_root = gap <= 1e-4 && matches(space, ambient);
    if (!is_root && !force) {
        std::cerr << "(k, lambda, c) is not a verified " << space_name
                  << " root: gap=" << gap << ", classified as "
                  << to_string(ambient) << "; use --force to mesh anyway\n";
        return kExitNoRoot;
    }
    if (!is_root)
        std::cerr << "warning: meshing a non-closing surface (gap=" << gap
                  << ", classified as " << to_string(ambient) << ")\n";

    SolveResult root;
    root.k = k;
    root.lambda = lambda;
    root.c_star = c;
    root.h = h;
    root.ambient = ambient;  // mesh the surface the parameters actually give
    root.discriminant = end_discriminant(c, k, lambda);
    const auto [alpha, beta] = initial_frame(h, root.ambient);
    root.alpha = alpha;
    root.beta = beta;

    const MeshData mesh =
        build_mesh(params, root, {radial, angular}, opt.transport);
    if (obj)
        write_obj(mesh, out_path);
    else
        write_ply(mesh, out_path);
    write_mesh_json(mesh, out_path + ".json");
    std::cout << mesh_metadata_json(mesh);
    return kExitOk;
}

int cmd_period(int k, double lambda, double c, const std::string& loop_name,
               const std::string& variant_name, const std::string& profile,
               const std::string& out_path) {
    const LoopClass loop =
        loop_name == "gamma1" ? LoopClass::Gamma1 : LoopClass::Gamma2;
    const PeriodVariant variant = variant_name == "minimal"
                                      ? PeriodVariant::Minimal
                                      : PeriodVariant::Maximal;
    const SolverOptions opt = solver_options(profile);
    const auto v =
        euclidean_period(make_params(k, lambda, c), loop, variant, opt.transport);
    JsonWriter w;
    w.begin_object();
    w.field("k", k);
    w.field("lambda", lambda);
    w.field("c", c);
    w.field("loop", loop_name);
    w.field("variant", variant_name);
    w.key("period");
    w.begin_array();
    w.value(v[0]);
    w.value(v[1]);
    w.value(v[2]);
    w.end_array();
    w.field("norm", std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
    w.end_object();
    emit(w.str(), out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-ended higher-genus constant-mean-curvature-1 surfaces: "
                 "closing-condition solver and mesh exporter"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string profile = "default";
    app.add_option("--tol-profile", profile,
                   "tolerance profile: fast, default or paranoid")
        ->check(CLI::IsMember({"fast", "default", "paranoid"}));

    int k = 1;
    double lambda = 2.0, c = 0.0;
    std::string out_path, target, format = "csv", space, loop_name, variant_name;
    std::vector<double> bracket;
    double c_min = 0.0, c_max = 0.0;
    int steps = 400, k_max = 8, radial = 48, angular = 64;
    bool force = false;

    auto* solve = app.add_subcommand("solve", "find one closing root");
    solve->add_option("--k", k, "genus")->required()->check(CLI::Range(1, 64));
    solve->add_option("--lambda", lambda, "curve parameter > 1")
        ->check(CLI::Range(1.0 + 1e-9, 1e6));
    solve->add_option("--target", target, "h3, ds-elliptic or ds-hyperbolic")
        ->required();
    solve->add_option("--bracket", bracket, "explicit c bracket (lo hi)")
        ->expected(2);
    solve->add_option("--out", out_path, "write JSON here instead of stdout");

    auto* scan_cmd = app.add_subcommand("scan", "tabulate h1, h2 over a c grid");
    scan_cmd->add_option("--k", k, "genus")->required()->check(CLI::Range(1, 64));
    scan_cmd->add_option("--lambda", lambda)->check(CLI::Range(1.0 + 1e-9, 1e6));
    scan_cmd->add_option("--min", c_min, "lower end of the c range")->required();
    scan_cmd->add_option("--max", c_max, "upper end of the c range")->required();
    scan_cmd->add_option("--steps", steps)->check(CLI::Range(2, 1000000));
    scan_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    scan_cmd->add_option("--out", out_path);

    auto* table = app.add_subcommand("table", "solve all three families for k = 1..k_max");
    table->add_option("--k-max", k_max, "largest genus")->required()
        ->check(CLI::Range(1, 64));
    table->add_option("--lambda", lambda)->check(CLI::Range(1.0 + 1e-9, 1e6));
    table->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify", "residual report at given parameters");
    verify->add_option("--k", k, "genus")->required()->check(CLI::Range(1, 64));
    verify->add_option("--lambda", lambda)->check(CLI::Range(1.0 + 1e-9, 1e6));
    verify->add_option("--c", c, "Weierstrass scale")->required();
    verify->add_option("--out", out_path);

    auto* mesh = app.add_subcommand("mesh", "export a surface mesh (.obj or .ply)");
    mesh->add_option("--k", k, "genus")->required()->check(CLI::Range(1, 64));
    mesh->add_option("--lambda", lambda)->check(CLI::Range(1.0 + 1e-9, 1e6));
    mesh->add_option("--c", c, "Weierstrass scale")->required();
    mesh->add_option("--space", space, "h3, ds-elliptic or ds-hyperbolic")
        ->required();
    mesh->add_option("--radial", radial)->check(CLI::Range(2, 4096));
    mesh->add_option("--angular", angular)->check(CLI::Range(8, 4096));
    mesh->add_option("--out", out_path, "output file, .obj or .ply")->required();
    mesh->add_flag("--force", force, "mesh even if (k, lambda, c) is not a root");

    auto* period = app.add_subcommand("period", "Euclidean counterpart period");
    period->add_option("--k", k, "genus")->required()->check(CLI::Range(1, 64));
    period->add_option("--lambda", lambda)->check(CLI::Range(1.0 + 1e-9, 1e6));
    period->add_option("--c", c, "Weierstrass scale")->required();
    period->add_option("--loop", loop_name, "gamma1 or gamma2")->required()
        ->check(CLI::IsMember({"gamma1", "gamma2"}));
    period->add_option("--variant", variant_name, "minimal or maximal")
        ->required()
        ->check(CLI::IsMember({"minimal", "maximal"}));
    period->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every parse/validation failure is a
        // plain usage error
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (solve->parsed())
            return cmd_solve(k, lambda, target, bracket, profile, out_path);
        if (scan_cmd->parsed())
            return cmd_scan(k, lambda, c_min, c_max, steps, format, profile, out_path);
        if (table->parsed()) return cmd_table(k_max, lambda, profile, out_path);
        if (verify->parsed()) return cmd_verify(k, lambda, c, profile, out_path);
        if (mesh->parsed())
            return cmd_mesh(k, lambda, c, space, radial, angular, out_path, force,
                            profile);
        if (period->parsed())
            return cmd_period(k, lambda, c, loop_name, variant_name, profile,
                              out_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
