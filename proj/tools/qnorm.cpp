// Command-line front end: parses key=value config files and flags (flags win),
// runs the requested command, and persists manifest + CSV/JSON artifacts.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qnorm/io.hpp"

namespace fs = std::filesystem;
using namespace qnorm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitStalled = 4;

struct Options {
    std::string config_file;
    int N = 0;
    double q = 0.0;
    std::string nonlinearity;  // log_power | pure_power
    double alpha = 1.0;
    double mu = 0.0;
    double p = 4.0;
    bool no_q_term = false;
    double c = 0.0;
    std::string c_list;
    double r_max = 16.0;
    int n_nodes = 2048;
    std::string eps_schedule;
    double tol = 1e-8;
    int max_iter = 20000;
    double step0 = 1.0;
    double delta_s = -1.0;
    std::string init = "gaussian";
    double init_width = -1.0;
    int workers = 1;
    unsigned seed = 1;
    std::string output_dir;
    std::string rmax_list = "50,100,200,400";
    double nodes_per_unit = 64.0;
    int trials = 64;
    std::string gn_variant = "grad2";
    std::string report_dir;
};

struct KeyBinding {
    std::string key;
    CLI::Option* opt;
    std::function<void(const std::string&)> set;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

// key=value lines, '#' comments, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SpecError("config file not found: " + path + " (check the --config path)");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("config line " + std::to_string(lineno) +
                            " is not key=value (add '=' or comment it out)");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw SpecError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

void bind_common(CLI::App* cmd, Options& o, std::vector<KeyBinding>& binds) {
    auto bind = [&](const std::string& key, CLI::Option* opt, auto* target) {
        binds.push_back({key, opt, [target](const std::string& v) {
                             std::stringstream ss(v);
                             ss >> *target;
                             if (ss.fail()) throw SpecError("bad value for key: " + v);
                         }});
    };
    bind("N", cmd->add_option("--N", o.N, "space dimension (>= 2)"), &o.N);
    bind("q", cmd->add_option("--q", o.q, "q-Laplacian exponent"), &o.q);
    binds.push_back({"nonlinearity",
                     cmd->add_option("--nonlinearity", o.nonlinearity, "log_power | pure_power"),
                     [&o](const std::string& v) { o.nonlinearity = v; }});
    bind("alpha", cmd->add_option("--alpha", o.alpha, "log coefficient"), &o.alpha);
    bind("mu", cmd->add_option("--mu", o.mu, "power coefficient"), &o.mu);
    bind("p", cmd->add_option("--p", o.p, "power exponent"), &o.p);
    binds.push_back({"no_q_term", cmd->add_flag("--no-q-term", o.no_q_term,
                                                "disable the q-Laplacian term"),
                     [&o](const std::string& v) { o.no_q_term = (v == "1" || v == "true"); }});
    bind("r_max", cmd->add_option("--r-max", o.r_max, "domain truncation radius"), &o.r_max);
    bind("n_nodes", cmd->add_option("--n-nodes", o.n_nodes, "grid nodes"), &o.n_nodes);
    binds.push_back({"eps_schedule",
                     cmd->add_option("--eps-schedule", o.eps_schedule,
                                     "comma list, strictly decreasing in (0,1)"),
                     [&o](const std::string& v) { o.eps_schedule = v; }});
    bind("tol", cmd->add_option("--tol", o.tol, "projected-gradient tolerance"), &o.tol);
    bind("max_iter", cmd->add_option("--max-iter", o.max_iter, "iteration cap"), &o.max_iter);
    bind("step0", cmd->add_option("--step0", o.step0, "initial step size"), &o.step0);
    bind("delta_s", cmd->add_option("--delta-s", o.delta_s, "q-kinetic smoothing (<0: auto)"),
         &o.delta_s);
    binds.push_back({"init", cmd->add_option("--init", o.init, "gaussian | plateau"),
                     [&o](const std::string& v) { o.init = v; }});
    bind("init_width", cmd->add_option("--init-width", o.init_width, "initial profile width"),
         &o.init_width);
    bind("seed", cmd->add_option("--seed", o.seed, "RNG seed"), &o.seed);
    binds.push_back({"output_dir", cmd->add_option("--output-dir", o.output_dir, "output root"),
                     [&o](const std::string& v) { o.output_dir = v; }});
}

void merge_file(const Options& o, std::vector<KeyBinding>& binds) {
    if (o.config_file.empty()) return;
    auto kv = read_config_file(o.config_file);
    for (const auto& [key, val] : kv) {
        // The same key can be bound once per subcommand; a flag on any of them
        // wins over the file value.
        KeyBinding* first = nullptr;
        bool given_on_cli = false;
        for (auto& b : binds) {
            if (b.key != key) continue;
            if (!first) first = &b;
            given_on_cli |= b.opt->count() > 0;
        }
        if (!first)
            throw SpecError("unknown config key '" + key +
                            "' (remove it or check spelling against --help)");
        if (!given_on_cli) first->set(val);
    }
}

Nonlinearity build_nonlinearity(const Options& o) {
    if (o.N == 0) throw SpecError("N is required (pass --N or set N= in the config file)");
    if (o.q == 0.0) throw SpecError("q is required (pass --q or set q= in the config file)");
    if (o.nonlinearity.empty())
        throw SpecError("nonlinearity is required: log_power or pure_power");
    Nonlinearity spec;
    if (o.nonlinearity == "log_power")
        spec = Nonlinearity::log_power(o.alpha, o.mu, o.p, o.N, o.q);
    else if (o.nonlinearity == "pure_power")
        spec = Nonlinearity::pure_power(o.mu, o.p, o.N, o.q);
    else
        throw SpecError("unknown nonlinearity '" + o.nonlinearity +
                        "' (use log_power or pure_power)");
    spec.q_term = !o.no_q_term;
    return spec;
}

SolverConfig build_solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.tol_pgrad = o.tol;
    cfg.max_iter = o.max_iter;
    cfg.step0 = o.step0;
    cfg.delta_s = o.delta_s;
    cfg.init_width = o.init_width;
    cfg.seed = o.seed;
    if (o.init == "plateau")
        cfg.init = SolverConfig::Init::plateau;
    else if (o.init != "gaussian")
        throw SpecError("unknown init '" + o.init + "' (use gaussian or plateau)");
    if (!o.eps_schedule.empty()) cfg.eps_schedule = parse_list(o.eps_schedule);
    return cfg;
}

fs::path prepare_output_dir(const Options& o, const std::string& command) {
    fs::path root;
    if (!o.output_dir.empty())
        root = o.output_dir;
    else if (const char* env = std::getenv("QNORM_OUTPUT_DIR"))
        root = env;
    else
        root = "qnorm_out";
    fs::path dir = root / command;
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> echo_config(const Options& o, const std::string& command) {
    std::map<std::string, std::string> m;
    m["command"] = command;
    m["N"] = std::to_string(o.N);
    m["q"] = io::format_sig(o.q);
    m["nonlinearity"] = o.nonlinearity;
    m["alpha"] = io::format_sig(o.alpha);
    m["mu"] = io::format_sig(o.mu);
    m["p"] = io::format_sig(o.p);
    m["no_q_term"] = o.no_q_term ? "1" : "0";
    m["c"] = io::format_sig(o.c);
    m["c_list"] = o.c_list;
    m["r_max"] = io::format_sig(o.r_max);
    m["n_nodes"] = std::to_string(o.n_nodes);
    m["eps_schedule"] = o.eps_schedule;
    m["tol"] = io::format_sig(o.tol);
    m["max_iter"] = std::to_string(o.max_iter);
    m["step0"] = io::format_sig(o.step0);
    m["delta_s"] = io::format_sig(o.delta_s);
    m["init"] = o.init;
    m["init_width"] = io::format_sig(o.init_width);
    m["workers"] = std::to_string(o.workers);
    m["rmax_list"] = o.rmax_list;
    m["nodes_per_unit"] = io::format_sig(o.nodes_per_unit);
    m["trials"] = std::to_string(o.trials);
    m["gn_variant"] = o.gn_variant;
    return m;
}

struct RunContext {
    fs::path dir;
    std::uint64_t hash;
};

RunContext begin_run(const Options& o, const std::string& command) {
    fs::path dir = prepare_output_dir(o, command);
    auto echo = echo_config(o, command);
    auto manifest = io::make_manifest(echo, o.seed);
    io::write_json(dir / "manifest.json", manifest);
    return {dir, io::config_hash(echo, o.seed)};
}

int run_solve(const Options& o) {
    if (!(o.c > 0.0)) throw SpecError("c is required and must be positive for solve");
    auto spec = build_nonlinearity(o);
    auto cfg = build_solver_config(o);
    auto grid = RadialGrid::make(o.N, o.r_max, o.n_nodes);
    auto ctx = begin_run(o, "solve");
    auto reports = continuation_solve(grid, o.c, spec, cfg);
    const auto& last = reports.back();
    io::write_field_csv(ctx.dir / "field.csv", last.field, ctx.hash);
    io::write_trace_csv(ctx.dir / "trace.csv", last.trace, ctx.hash);
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& r : reports) stages.push_back(io::report_json(r));
    io::write_json(ctx.dir / "report.json", {{"stages", stages}, {"final", io::report_json(last)}});
    std::ostringstream sum;
    sum << "solve: c=" << o.c << " lambda=" << io::format_sig(last.lambda)
        << " energy=" << io::format_sig(last.energy.total) << " status=" << to_string(last.status)
        << " eps=" << last.eps << "\n";
    io::write_text(ctx.dir / "summary.txt", sum.str());
    std::cout << sum.str();
    if (last.status == SolveStatus::stalled) {
        io::write_text(ctx.dir / "FAILED", "stalled at eps=" + io::format_sig(last.eps) + "\n");
        return kExitStalled;
    }
    return 0;
}

int run_sweep(const Options& o) {
    if (o.c_list.empty()) throw SpecError("c-list is required for sweep (comma-separated)");
    auto cs = parse_list(o.c_list);
    auto spec = build_nonlinearity(o);
    auto cfg = build_solver_config(o);
    auto grid = RadialGrid::make(o.N, o.r_max, o.n_nodes);
    auto ctx = begin_run(o, "sweep");
    auto curve = sweep_mass(cs, spec, cfg, grid, o.workers);
    io::write_curve_csv(ctx.dir / "curve.csv", curve, ctx.hash);
    io::write_json(ctx.dir / "curve.json", io::curve_json(curve));
    std::ostringstream sum;
    for (const auto& pt : curve.points)
        sum << "c=" << pt.c << " m=" << io::format_sig(pt.m) << " status=" << pt.status << "\n";
    io::write_text(ctx.dir / "summary.txt", sum.str());
    std::cout << sum.str();
    bool any_stall = false;
    for (const auto& pt : curve.points) any_stall |= pt.status == "stalled";
    if (any_stall) {
        io::write_text(ctx.dir / "FAILED", "one or more sweep points stalled\n");
        return kExitStalled;
    }
    return 0;
}

int run_threshold(const Options& o) {
    if (!(o.p > 2.0)) throw SpecError("threshold requires p > 2 (pass --p)");
    auto ctx = begin_run(o, "threshold");
    auto t = existence_threshold(o.alpha, o.p);
    io::write_json(ctx.dir / "threshold.json", io::threshold_json(t));
    std::cout << "mu_star = " << io::format_sig(t.mu_star_closed)
              << " (bisect " << io::format_sig(t.mu_star_bisect) << ")\n";
    return 0;
}

int run_check_assumptions(const Options& o) {
    auto spec = build_nonlinearity(o);
    auto ctx = begin_run(o, "check-assumptions");
    auto rep = check_assumptions(spec);
    io::write_json(ctx.dir / "assumptions.json", io::assumptions_json(rep));
    for (const auto& c : rep.checks)
        std::cout << c.name << ": " << to_string(c.verdict) << "\n";
    return 0;
}

int run_appendix(const Options& o) {
    if (o.N == 0 || o.q == 0.0) throw SpecError("appendix-demo requires --N and --q");
    auto ctx = begin_run(o, "appendix-demo");
    auto rows = appendix_divergence(o.N, o.q, parse_list(o.rmax_list), o.nodes_per_unit);
    io::write_appendix_csv(ctx.dir / "appendix.csv", rows, ctx.hash);
    for (const auto& r : rows)
        std::cout << "r_max=" << r.r_max << " I=" << io::format_sig(r.I) << "\n";
    return 0;
}

int run_gn(const Options& o) {
    if (o.N == 0 || o.q == 0.0) throw SpecError("gn-estimate requires --N and --q");
    if (!(o.p > 2.0)) throw SpecError("gn-estimate requires p > 2 (pass --p)");
    auto expo = critical_exponents(o.N, o.q);
    auto grid = RadialGrid::make(o.N, o.r_max, o.n_nodes);
    auto ctx = begin_run(o, "gn-estimate");
    GnVariant variant = GnVariant::grad2;
    if (o.gn_variant == "gradq")
        variant = GnVariant::gradq;
    else if (o.gn_variant != "grad2")
        throw SpecError("unknown gn variant '" + o.gn_variant + "' (grad2 or gradq)");
    auto est = estimate_gn_constant(o.p, expo, grid, o.trials, o.seed, variant);
    io::write_json(ctx.dir / "gn.json", io::gn_json(est));
    io::write_field_csv(ctx.dir / "gn_maximizer.csv", est.maximizer, ctx.hash);
    std::cout << "gn constant >= " << io::format_sig(est.constant) << "\n";
    return 0;
}

int run_report(const Options& o) {
    fs::path dir = o.report_dir.empty() ? prepare_output_dir(o, "") : fs::path(o.report_dir);
    if (!fs::exists(dir)) throw SpecError("report directory not found: " + dir.string());
    bool found = false;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == "manifest.json") {
            found = true;
            std::ifstream f(entry.path());
            nlohmann::json j = nlohmann::json::parse(f);
            std::cout << entry.path().parent_path().filename().string() << ": hash "
                      << j.value("hash", std::string("?")) << ", seed " << j.value("seed", 0u)
                      << "\n";
            fs::path sum = entry.path().parent_path() / "summary.txt";
            if (fs::exists(sum)) {
                std::ifstream s(sum);
                std::cout << s.rdbuf();
            }
            if (fs::exists(entry.path().parent_path() / "FAILED"))
                std::cout << "  (FAILED marker present)\n";
        }
    }
    if (!found) std::cout << "no runs found under " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained radial minimizer for (2,q)-Laplacian equations"};
    app.require_subcommand(1);
    Options o;
    std::vector<KeyBinding> binds;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_file, "key=value config file");
        bind_common(cmd, o, binds);
        return cmd;
    };
    auto* solve = add_common(app.add_subcommand("solve", "minimize at one mass"));
    binds.push_back({"c", solve->add_option("--c", o.c, "mass parameter (||u||_2 = c)"),
                     [&o](const std::string& v) { o.c = std::stod(v); }});
    auto* sweep = add_common(app.add_subcommand("sweep", "energy map over a mass list"));
    binds.push_back({"c_list", sweep->add_option("--c-list", o.c_list, "comma-separated masses"),
                     [&o](const std::string& v) { o.c_list = v; }});
    binds.push_back({"workers", sweep->add_option("--workers", o.workers, "thread count"),
                     [&o](const std::string& v) { o.workers = std::stoi(v); }});
    auto* thresh = app.add_subcommand("threshold", "existence threshold mu*");
    thresh->add_option("--config", o.config_file, "key=value config file");
    binds.push_back({"alpha", thresh->add_option("--alpha", o.alpha, "log coefficient"),
                     [&o](const std::string& v) { o.alpha = std::stod(v); }});
    binds.push_back({"p", thresh->add_option("--p", o.p, "power exponent"),
                     [&o](const std::string& v) { o.p = std::stod(v); }});
    thresh->add_option("--output-dir", o.output_dir, "output root");
    auto* check = add_common(app.add_subcommand("check-assumptions", "audit (g0)-(g4)"));
    (void)check;
    auto* appdx = add_common(app.add_subcommand("appendix-demo", "truncated log-integral divergence"));
    binds.push_back({"rmax_list", appdx->add_option("--rmax-list", o.rmax_list, "radii list"),
                     [&o](const std::string& v) { o.rmax_list = v; }});
    binds.push_back(
        {"nodes_per_unit", appdx->add_option("--nodes-per-unit", o.nodes_per_unit, "grid density"),
         [&o](const std::string& v) { o.nodes_per_unit = std::stod(v); }});
    auto* gn = add_common(app.add_subcommand("gn-estimate", "interpolation-constant lower bound"));
    binds.push_back({"trials", gn->add_option("--trials", o.trials, "battery size"),
                     [&o](const std::string& v) { o.trials = std::stoi(v); }});
    binds.push_back({"gn_variant", gn->add_option("--gn-variant", o.gn_variant, "grad2 | gradq"),
                     [&o](const std::string& v) { o.gn_variant = v; }});
    auto* report = app.add_subcommand("report", "summarize runs in an output directory");
    report->add_option("--dir", o.report_dir, "run directory (default: output root)");

    CLI11_PARSE(app, argc, argv);

    try {
        merge_file(o, binds);
        if (solve->parsed()) return run_solve(o);
        if (sweep->parsed()) return run_sweep(o);
        if (thresh->parsed()) return run_threshold(o);
        if (check->parsed()) return run_check_assumptions(o);
        if (appdx->parsed()) return run_appendix(o);
        if (gn->parsed()) return run_gn(o);
        if (report->parsed()) return run_report(o);
    } catch (const SpecError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
