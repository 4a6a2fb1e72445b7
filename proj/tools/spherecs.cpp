// spherecs: coupling design, nonclassicality sweeps and damping/relaxation
// runs for sphere-coherent motional states. Writes CSV or JSON tables whose
// metadata header records every parameter.
//
// Exit codes: 0 ok, 2 usage / invalid parameters, 3 infeasible design,
// 4 convergence or truncation failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <spherecs/spherecs.hpp>

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace spherecs;
using io::Meta;
using io::Table;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitConvergence = 4;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::string format = "csv";
    std::string output;
    bool reproducible = false;
};

std::string fmt(double v) { return io::format_number(v); }

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

/// "a:b:step" (inclusive of b up to rounding) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    try {
        if (text.find(':') != std::string::npos) {
            const auto parts = io::split(text, ':');
            if (parts.size() != 3) throw UsageError("grid must be a:b:step");
            const double a = io::parse_number(parts[0]), b = io::parse_number(parts[1]);
            const double h = io::parse_number(parts[2]);
            if (!(h > 0.0) || !(b >= a)) throw UsageError("grid needs step > 0 and b >= a");
            const long n = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
            if (n > 1'000'000) throw UsageError("grid has too many points");
            for (long i = 0; i < n; ++i) out.push_back(a + i * h);
        } else {
            for (const auto& s : io::split(text, ',')) out.push_back(io::parse_number(s));
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad grid '") + text + "': " + e.what());
    }
    if (out.empty()) throw UsageError("empty grid");
    return out;
}

Meta base_meta(const std::string& command, const OutputOptions& out) {
    Meta m{{"tool", "spherecs"}, {"version", kVersion}, {"command", command}};
    if (!out.reproducible) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m.emplace_back("generated_at", buf);
    }
    return m;
}

void finish_meta(Meta& m) { m.emplace_back("convention", kConventionTag); }

std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("SPHERECS_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    return p;
}

void emit_text(const std::string& text, const OutputOptions& out) {
    if (out.output.empty() || out.output == "-") {
        std::cout << text;
        return;
    }
    const auto path = resolve_output(out.output);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    io::write_file(path.string(), text);
}

void emit(const Table& t, const OutputOptions& out) {
    emit_text(out.format == "json" ? io::to_json(t) : io::to_csv(t), out);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
    int n = 0;
    std::optional<double> lambda;
    std::string lambda_grid;
    std::optional<double> mu;
    std::vector<double> alphas;
    int root_index = 0;
};

int run_design(const DesignArgs& a, const OutputOptions& out) {
    require(a.n >= 1, "--n must be >= 1");
    require(a.mu.has_value(), "--mu is required");
    require(a.lambda.has_value() != !a.lambda_grid.empty(), "give exactly one of --lambda and --lambda-grid");
    const std::vector<double> alphas = a.alphas.empty() ? default_alphas(a.n) : a.alphas;
    require(static_cast<int>(alphas.size()) == a.n, "--alphas needs exactly N entries");
    const std::vector<double> lambdas = a.lambda ? std::vector<double>{*a.lambda} : parse_grid(a.lambda_grid);

    std::vector<CouplingDesign> rows;
    for (double l : lambdas) rows.push_back(try_solve_couplings(a.n, l, *a.mu, alphas, a.root_index));

    Table t;
    t.meta = base_meta("design", out);
    t.meta.insert(t.meta.end(), {{"N", std::to_string(a.n)},
                                 {"mu", fmt(*a.mu)},
                                 {"alphas", join(alphas)},
                                 {"root_index", std::to_string(a.root_index)},
                                 {"alpha0", fmt(rows.front().alpha0)}});
    finish_meta(t.meta);
    t.columns = {"lambda"};
    for (int j = 1; j <= a.n; ++j) t.columns.push_back("ratio_" + std::to_string(j));
    t.columns.insert(t.columns.end(), {"ls_residual", "ds_residual", "condition", "feasible"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& d : rows) {
        std::vector<double> r{d.lambda};
        for (int j = 0; j < a.n; ++j) r.push_back(d.feasible ? d.ratios[j] : nan);
        r.insert(r.end(), {d.ls_residual, d.ds_residual, d.condition, d.feasible ? 1.0 : 0.0});
        t.add_row(std::move(r));
    }
    emit(t, out);
    if (rows.size() == 1 && !rows.front().feasible) {
        std::cerr << "spherecs: infeasible design: " << rows.front().diagnostics << '\n';
        return kExitInfeasible;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// state / wigner

struct StateArgs {
    int n = 2;
    double lambda = 1.0;
    double mu = 0.4;
    double spacing = kDefaultGridSpacing;
    double extent = 0.0;  // 0: automatic
};

int run_state(const StateArgs& a, const OutputOptions& out) {
    const FockVector psi = sphere_coherent_state({a.n, a.lambda, a.mu});
    Table t;
    t.meta = base_meta("state", out);
    t.meta.insert(t.meta.end(), {{"N", std::to_string(a.n)}, {"lambda", fmt(a.lambda)}, {"mu", fmt(a.mu)}});
    finish_meta(t.meta);
    t.columns = {"n", "re", "im", "probability"};
    for (int n = 0; n < psi.dim(); ++n) {
        t.add_row({static_cast<double>(n), psi[n].real(), psi[n].imag(), std::norm(psi[n])});
    }
    emit(t, out);
    return 0;
}

int run_wigner(const StateArgs& a, const OutputOptions& out) {
    require(a.spacing > 0.0, "--spacing must be > 0");
    require(a.extent >= 0.0, "--extent must be >= 0");
    const DensityOp rho = DensityOp::pure(sphere_coherent_state({a.n, a.lambda, a.mu}));
    const GridSpec spec = a.extent > 0.0 ? GridSpec::square(a.extent, a.spacing) : auto_grid(rho, a.spacing);
    const WignerGrid w = wigner(rho, spec);
    const NegativityEstimate neg = negativity(rho, w.grid);

    Meta m = base_meta("wigner", out);
    m.insert(m.end(), {{"N", std::to_string(a.n)},
                       {"lambda", fmt(a.lambda)},
                       {"mu", fmt(a.mu)},
                       {"spacing", fmt(a.spacing)},
                       {"delta", fmt(neg.delta)},
                       {"delta_grid", fmt(neg.delta_coarse)},
                       {"delta_converged", neg.converged ? "true" : "false"},
                       {"extrema", std::to_string(count_extrema(w))}});
    if (out.format == "json") {
        finish_meta(m);
        emit_text(io::wigner_to_json(w, m), out);
    } else {
        emit(io::wigner_table(w, m), out);  // grid metadata carries the convention tag
    }
    if (!neg.converged) {
        std::cerr << "spherecs: negativity not converged under grid refinement (difference "
                  << neg.difference() << ")\n";
        return kExitConvergence;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepArgs {
    std::vector<int> ns{2, 3, 4};
    std::string lambda_grid = "0:3:0.25";
    double mu = 0.4;
    double spacing = kDefaultGridSpacing;
    std::vector<double> thetas;
};

int run_sweep_negativity(const SweepArgs& a, const OutputOptions& out) {
    require(!a.ns.empty(), "--n needs at least one value");
    require(a.spacing > 0.0, "--spacing must be > 0");
    const auto lambdas = parse_grid(a.lambda_grid);
    Table t;
    t.meta = base_meta("sweep-negativity", out);
    t.meta.insert(t.meta.end(), {{"N", join(a.ns)},
                                 {"lambda_grid", a.lambda_grid},
                                 {"mu", fmt(a.mu)},
                                 {"spacing", fmt(a.spacing)},
                                 {"convergence_tolerance", fmt(kNegativityConvergence)}});
    finish_meta(t.meta);
    t.columns = {"lambda"};
    for (int n : a.ns) {
        t.columns.push_back("delta_N" + std::to_string(n));
        t.columns.push_back("converged_N" + std::to_string(n));
    }
    bool all_converged = true;
    for (double l : lambdas) {
        std::vector<double> r{l};
        for (int n : a.ns) {
            const DensityOp rho = DensityOp::pure(sphere_coherent_state({n, l, a.mu}));
            const NegativityEstimate e = negativity(rho, auto_grid(rho, a.spacing));
            all_converged = all_converged && e.converged;
            r.push_back(e.delta);
            r.push_back(e.converged ? 1.0 : 0.0);
        }
        t.add_row(std::move(r));
    }
    emit(t, out);
    return all_converged ? 0 : kExitConvergence;
}

int run_sweep_squeezing(const SweepArgs& a, const OutputOptions& out) {
    require(!a.ns.empty(), "--n needs at least one value");
    const auto lambdas = parse_grid(a.lambda_grid);
    const std::vector<double> thetas = a.thetas.empty() ? std::vector<double>{0.0, std::numbers::pi / 2} : a.thetas;
    Table t;
    t.meta = base_meta("sweep-squeezing", out);
    t.meta.insert(t.meta.end(), {{"N", join(a.ns)},
                                 {"lambda_grid", a.lambda_grid},
                                 {"mu", fmt(a.mu)},
                                 {"theta", join(thetas)}});
    finish_meta(t.meta);
    t.columns = {"lambda"};
    for (int n : a.ns)
        for (std::size_t k = 0; k < thetas.size(); ++k)
            t.columns.push_back("s_N" + std::to_string(n) + "_theta" + std::to_string(k));
    for (double l : lambdas) {
        std::vector<double> r{l};
        for (int n : a.ns) {
            const FockVector psi = sphere_coherent_state({n, l, a.mu});
            for (double th : thetas) r.push_back(squeezing(psi, th).s);
        }
        t.add_row(std::move(r));
    }
    emit(t, out);
    return 0;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveArgs {
    std::string preset = "n4";
    std::optional<int> n;
    double lambda = 1.0;
    double mu = 0.4;
    double nbar = 0.5;
    double gamma = 1.0;
    std::string gamma_t = "0,0.25,0.5,1,2";
    std::string engine = "both";
    double spacing = kDefaultGridSpacing;
    std::string snapshots;  // directory for per-time Wigner grids
};

int run_evolve(const EvolveArgs& a, const OutputOptions& out) {
    int n = 0;
    if (a.preset == "n4") {
        n = 4;
    } else if (a.preset == "n3") {
        n = 3;
    } else {
        throw UsageError("--preset must be n4 or n3");
    }
    if (a.n) n = *a.n;
    require(a.engine == "fp" || a.engine == "lindblad" || a.engine == "both",
            "--engine must be fp, lindblad or both");
    const DampedOscillatorModel model{a.gamma, a.nbar};
    model.validate();
    const auto gts = parse_grid(a.gamma_t);
    for (std::size_t i = 0; i < gts.size(); ++i) {
        require(gts[i] >= 0.0 && (i == 0 || gts[i] >= gts[i - 1]), "--gamma-t must be non-decreasing and >= 0");
    }

    const DensityOp rho0 = DensityOp::pure(sphere_coherent_state({n, a.lambda, a.mu}));
    const WignerGrid w0 = wigner(rho0, auto_grid(rho0, a.spacing));
    const bool use_fp = a.engine != "lindblad", use_lb = a.engine != "fp";

    std::vector<double> times;
    for (double gt : gts) times.push_back(gt / a.gamma);
    std::vector<LindbladResult> lb;
    if (use_lb) lb = lindblad_evolve(rho0, model, times, damping_policy(rho0.dim(), a.nbar));

    Table t;
    t.meta = base_meta("evolve", out);
    t.meta.insert(t.meta.end(), {{"preset", a.preset},
                                 {"N", std::to_string(n)},
                                 {"lambda", fmt(a.lambda)},
                                 {"mu", fmt(a.mu)},
                                 {"nbar", fmt(a.nbar)},
                                 {"gamma", fmt(a.gamma)},
                                 {"engine", a.engine},
                                 {"spacing", fmt(a.spacing)}});
    finish_meta(t.meta);
    t.columns = {"gamma_t"};
    if (use_fp) t.columns.insert(t.columns.end(), {"delta_fp", "w_min_fp"});
    if (use_lb) t.columns.insert(t.columns.end(), {"delta_lindblad", "w_min_lindblad", "trace_defect"});
    if (use_fp && use_lb) t.columns.push_back("sup_diff");

    for (std::size_t i = 0; i < gts.size(); ++i) {
        std::vector<double> r{gts[i]};
        std::optional<WignerGrid> wf, wl;
        if (use_fp) {
            wf = fp_propagate(w0, model, times[i]);
            r.insert(r.end(), {negativity_volume(*wf), wf->min()});
        }
        if (use_lb) {
            const GridSpec g = wf ? wf->grid : auto_grid(lb[i].rho, a.spacing);
            wl = wigner(lb[i].rho, g);
            r.insert(r.end(), {negativity_volume(*wl), wl->min(), lb[i].max_trace_defect});
        }
        if (wf && wl) {
            r.push_back(wf->grid.nx == wl->grid.nx && wf->grid.np == wl->grid.np
                            ? (wf->values - wl->values).cwiseAbs().maxCoeff()
                            : std::numeric_limits<double>::quiet_NaN());
        }
        if (!a.snapshots.empty()) {
            const auto dir = resolve_output(a.snapshots);
            std::filesystem::create_directories(dir);
            Meta m = t.meta;
            const WignerGrid& w = wf ? *wf : *wl;
            const std::string stem = "wigner_gt" + std::to_string(i);
            if (out.format == "json") {
                m.emplace_back("gamma_t", fmt(gts[i]));
                io::write_file((dir / (stem + ".json")).string(), io::wigner_to_json(w, m));
            } else {
                m.pop_back();  // wigner_table appends the convention with the grid metadata
                m.emplace_back("gamma_t", fmt(gts[i]));
                io::write_file((dir / (stem + ".csv")).string(), io::to_csv(io::wigner_table(w, m)));
            }
        }
        t.add_row(std::move(r));
    }
    emit(t, out);
    return 0;
}

// ---------------------------------------------------------------------------
// relax

struct RelaxArgs {
    int n = 3;
    double lambda = 1.0;
    double mu = 0.4;
    double omega0 = 1.0;
    std::vector<double> gamma_a{0.5, 1.0, 2.0};
    double t_max = 100.0;
    int samples = 101;
    int mirror_dim = 0;  // 0: 2(N+1)
    std::vector<double> alphas;
};

int run_relax(const RelaxArgs& a, const OutputOptions& out) {
    require(a.samples >= 2, "--samples must be >= 2");
    require(a.t_max > 0.0, "--t-max must be > 0");
    require(!a.gamma_a.empty(), "--gamma-a needs at least one value");
    const std::vector<double> alphas = a.alphas.empty() ? default_alphas(a.n) : a.alphas;
    const CouplingDesign d = solve_couplings(a.n, a.lambda, a.mu, alphas);
    const int mdim = a.mirror_dim > 0 ? a.mirror_dim : default_relaxation_mirror_dim(a.n);
    std::vector<double> times;
    for (int i = 0; i < a.samples; ++i) times.push_back(a.t_max * i / (a.samples - 1));
    const DensityOp rho0 = ground_product(FockVector::basis(1, 0), mdim);

    std::vector<RelaxationTrajectory> runs;
    double stationarity = 0.0;
    for (double ga : a.gamma_a) {
        const DarkStateModel model{a.omega0, ga, d};
        stationarity = std::max(stationarity, stationarity_residual(model, mdim));
        runs.push_back(dark_state_relaxation(model, rho0, mdim, times));
    }

    Table t;
    t.meta = base_meta("relax", out);
    t.meta.insert(t.meta.end(), {{"N", std::to_string(a.n)},
                                 {"lambda", fmt(a.lambda)},
                                 {"mu", fmt(a.mu)},
                                 {"omega0", fmt(a.omega0)},
                                 {"alphas", join(alphas)},
                                 {"ratios", join(d.ratios)},
                                 {"gamma_a", join(a.gamma_a)},
                                 {"mirror_dim", std::to_string(mdim)},
                                 {"stationarity_residual", fmt(stationarity)}});
    for (std::size_t k = 0; k < runs.size(); ++k) {
        t.meta.emplace_back("final_fidelity_" + std::to_string(k), fmt(runs[k].fidelity.back()));
        t.meta.emplace_back("mirror_dim_used_" + std::to_string(k), std::to_string(runs[k].mirror_dim));
    }
    finish_meta(t.meta);
    t.columns = {"t"};
    for (std::size_t k = 0; k < runs.size(); ++k) {
        t.columns.push_back("fidelity_" + std::to_string(k));
        t.columns.push_back("trace_defect_" + std::to_string(k));
        t.columns.push_back("top_population_" + std::to_string(k));
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> r{times[i]};
        for (const auto& run : runs) r.insert(r.end(), {run.fidelity[i], run.trace_defect[i], run.top_population[i]});
        t.add_row(std::move(r));
    }
    emit(t, out);
    return 0;
}

// ---------------------------------------------------------------------------
// config files

/// Flat key=value lines ('#' comments) or a JSON object. Arrays become
/// comma-separated values, booleans become bare flags.
std::map<std::string, std::optional<std::string>> read_config(const std::string& path) {
    const std::string text = io::read_file(path);
    std::map<std::string, std::optional<std::string>> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto j = nlohmann::json::parse(text);
        for (const auto& [k, v] : j.items()) {
            if (v.is_boolean()) {
                if (v.get<bool>()) out[k] = std::nullopt;
            } else if (v.is_array()) {
                std::string s;
                for (std::size_t i = 0; i < v.size(); ++i)
                    s += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
                out[k] = s;
            } else {
                out[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
        }
        return out;
    }
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
        auto trim = [](std::string s) {
            const auto l = s.find_first_not_of(" \t\r");
            const auto r = s.find_last_not_of(" \t\r");
            return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

/// Appends config entries as long options unless the command line already
/// sets them. Keys unknown to the chosen subcommand are rejected.
std::vector<std::string> merge_config(std::vector<std::string> args, CLI::App& app) {
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    CLI::App* sub = nullptr;
    for (const auto& a : args)
        if (auto* s = app.get_subcommand_no_throw(a)) {
            sub = s;
            break;
        }
    for (const auto& [key, value] : read_config(config_path)) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (given || key == "config") continue;
        const CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
        if (!opt) opt = app.get_option_no_throw(flag);
        if (!opt) throw UsageError("config key '" + key + "' is not an option of this command");
        if (opt->get_expected_max() == 0) {
            // Flags take true/false in key=value files.
            if (value && *value != "true" && *value != "1") {
                if (*value == "false" || *value == "0") continue;
                throw UsageError("config flag '" + key + "' needs true or false");
            }
            args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        if (value) args.push_back(*value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sphere-coherent motional states: design, nonclassicality, damping, relaxation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    OutputOptions out;
    std::string config_path;
    app.add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-o,--output", out.output, "Output file (default stdout); relative paths use $SPHERECS_OUTPUT_DIR");
    app.add_flag("--reproducible", out.reproducible, "Omit the generation timestamp from metadata");
    app.add_option("--config", config_path, "key=value or JSON file of defaults; flags override it");

    DesignArgs da;
    auto* design = app.add_subcommand("design", "Solve for the Rabi-frequency ratios Omega_j/Omega_0");
    design->add_option("--n", da.n, "Top Fock level N")->required();
    design->add_option("--lambda", da.lambda, "Curvature (single design)");
    design->add_option("--lambda-grid", da.lambda_grid, "Curvature sweep a:b:step or list");
    design->add_option("--mu", da.mu, "Coherent amplitude mu (real, nonzero)");
    design->add_option("--alphas", da.alphas, "Optomechanical couplings alpha_1..alpha_N (default j/10)")
        ->delimiter(',');
    design->add_option("--root-index", da.root_index, "Which root of L_N fixes alpha_0 (0: smallest)");

    StateArgs sa;
    auto* state = app.add_subcommand("state", "Fock amplitudes of the sphere-coherent state");
    StateArgs wa;
    auto* wig = app.add_subcommand("wigner", "Wigner function grid of the sphere-coherent state");
    for (auto [cmd, args] : {std::pair{state, &sa}, std::pair{wig, &wa}}) {
        cmd->add_option("--n", args->n, "Top Fock level N");
        cmd->add_option("--lambda", args->lambda, "Curvature");
        cmd->add_option("--mu", args->mu, "Coherent amplitude mu");
    }
    wig->add_option("--spacing", wa.spacing, "Grid spacing");
    wig->add_option("--extent", wa.extent, "Half-width of the square grid (default: automatic)");

    SweepArgs na;
    auto* sneg = app.add_subcommand("sweep-negativity", "Negativity volume versus curvature");
    SweepArgs qa;
    qa.ns = {4};
    qa.lambda_grid = "0:2:0.05";
    auto* ssq = app.add_subcommand("sweep-squeezing", "Squeezing parameter versus curvature");
    for (auto [cmd, args] : {std::pair{sneg, &na}, std::pair{ssq, &qa}}) {
        cmd->add_option("--n", args->ns, "Top Fock levels")->delimiter(',');
        cmd->add_option("--lambda-grid", args->lambda_grid, "Curvature grid a:b:step or list");
        cmd->add_option("--mu", args->mu, "Coherent amplitude mu");
    }
    sneg->add_option("--spacing", na.spacing, "Grid spacing");
    ssq->add_option("--theta", qa.thetas, "Quadrature angles (default 0, pi/2)")->delimiter(',');

    EvolveArgs ea;
    auto* evolve = app.add_subcommand("evolve", "Damped evolution of the Wigner function");
    evolve->add_option("--preset", ea.preset, "n4 (N=4, default) or n3 (N=3)");
    evolve->add_option("--n", ea.n, "Top Fock level N (overrides the preset)");
    evolve->add_option("--lambda", ea.lambda, "Curvature");
    evolve->add_option("--mu", ea.mu, "Coherent amplitude mu");
    evolve->add_option("--nbar", ea.nbar, "Thermal occupation");
    evolve->add_option("--gamma", ea.gamma, "Damping rate");
    evolve->add_option("--gamma-t", ea.gamma_t, "Scaled times gamma*t (list or a:b:step)");
    evolve->add_option("--engine", ea.engine, "fp, lindblad or both");
    evolve->add_option("--spacing", ea.spacing, "Grid spacing");
    evolve->add_option("--snapshots", ea.snapshots, "Directory for per-time Wigner grids");

    RelaxArgs ra;
    auto* relax = app.add_subcommand("relax", "Dissipative preparation from |g,0>");
    relax->add_option("--n", ra.n, "Top Fock level N");
    relax->add_option("--lambda", ra.lambda, "Curvature");
    relax->add_option("--mu", ra.mu, "Coherent amplitude mu");
    relax->add_option("--omega0", ra.omega0, "Carrier Rabi frequency");
    relax->add_option("--gamma-a", ra.gamma_a, "Atomic decay rates")->delimiter(',');
    relax->add_option("--t-max", ra.t_max, "Final time");
    relax->add_option("--samples", ra.samples, "Number of sample times");
    relax->add_option("--mirror-dim", ra.mirror_dim, "Mirror truncation (default 2(N+1))");
    relax->add_option("--alphas", ra.alphas, "Optomechanical couplings (default j/10)")->delimiter(',');

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = merge_config(std::move(args), app);
        std::vector<char*> cargs;
        for (auto& s : args) cargs.push_back(s.data());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "spherecs: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*design) return run_design(da, out);
        if (*state) return run_state(sa, out);
        if (*wig) return run_wigner(wa, out);
        if (*sneg) return run_sweep_negativity(na, out);
        if (*ssq) return run_sweep_squeezing(qa, out);
        if (*evolve) return run_evolve(ea, out);
        if (*relax) return run_relax(ra, out);
    } catch (const UsageError& e) {
        std::cerr << "spherecs: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "spherecs: invalid parameters: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InfeasibleDesign& e) {
        std::cerr << "spherecs: infeasible design: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const TruncationError& e) {
        std::cerr << "spherecs: " << e.what() << " (try dimension " << e.suggested_dim() << ")\n";
        return kExitConvergence;
    } catch (const ResolutionError& e) {
        std::cerr << "spherecs: " << e.what() << " (try nx=" << e.suggested_nx() << ", np=" << e.suggested_np()
                  << ")\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "spherecs: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
