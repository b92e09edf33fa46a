// singheat: pipeline front-end
//
// Subcommands: eta | soliton | evolve | verify | report
// Exit codes: 0 ok, 1 verification failure, 2 usage/config error, 3 numerical failure.
//
// Artifacts are plain CSV/JSON in the output directory; every emitted file is
// content-hashed (FNV-1a) into cache.txt, which drives stage caching and the
// verify-stage integrity check. All floats are printed with "%.17g" so a rerun
// with the same config reproduces every CSV/JSON byte for byte (manifest.json
// additionally records wall-clock times and is exempt from that guarantee).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "singheat/errors.hpp"
#include "singheat/eta.hpp"
#include "singheat/heat.hpp"
#include "singheat/io.hpp"
#include "singheat/shooting.hpp"

namespace fs = std::filesystem;
using namespace singheat;

namespace {

constexpr const char* kVersion = "singheat 1.0.0";

struct Options {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    bool force = false;
    bool skip_picard = false;
    std::optional<std::string> only;
    std::optional<double> m_override;
    std::optional<double> t_max;
};

[[noreturn]] void usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n"
              << "usage: singheat <eta|soliton|evolve|verify|report> [--config PATH]\n"
              << "       [--out DIR] [--force] [--only NAME] [--m-override REAL]\n"
              << "       [--skip-picard] [--t-max REAL]\n";
    std::exit(2);
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        usage_error(what + ": not a number: '" + s + "'");
    }
}

Options parse_args(int argc, char** argv) {
    Options o;
    if (argc < 2) usage_error("missing subcommand");
    o.subcommand = argv[1];
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        auto next = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) usage_error(std::string(flag) + " needs a value");
            return argv[++i];
        };
        if (a == "--config") o.config_path = next("--config");
        else if (a == "--out") o.out_dir = next("--out");
        else if (a == "--force") o.force = true;
        else if (a == "--skip-picard") o.skip_picard = true;
        else if (a == "--only") o.only = next("--only");
        else if (a == "--m-override") o.m_override = parse_real(next("--m-override"), "--m-override");
        else if (a == "--t-max") o.t_max = parse_real(next("--t-max"), "--t-max");
        else usage_error("unknown flag: " + a);
    }
    return o;
}

// --- configuration -------------------------------------------------------

struct RunConfig {
    EtaConfig eta;
    double bracket_tol = 1e-6;
    OdeOptions ode;
    AssembleOptions assemble;
    double t_max = 0.0; // 0 = derive from the epsilon scale
    int duhamel_nodes = 96;
    double picard_tol = 1e-10;
    int picard_max_iter = 20;
    int conv_quad_order = 10;
    std::map<std::string, std::string> echo; // effective key=value document
};

RunConfig load_config(const Options& o) {
    std::map<std::string, std::string> kv;
    if (!o.config_path.empty()) kv = parse_kv(read_text_file(o.config_path));
    RunConfig c;
    auto take_d = [&](const char* key, double& slot) {
        if (auto it = kv.find(key); it != kv.end()) {
            slot = parse_real(it->second, key);
            kv.erase(it);
        }
    };
    auto take_i = [&](const char* key, int& slot) {
        if (auto it = kv.find(key); it != kv.end()) {
            slot = static_cast<int>(parse_real(it->second, key));
            kv.erase(it);
        }
    };
    take_d("eta.lambda", c.eta.lambda);
    take_d("eta.rho_max", c.eta.rho_max);
    take_d("eta.grid_max", c.eta.grid_max);
    take_i("eta.grid_nodes", c.eta.grid_nodes);
    take_i("eta.quad_order", c.eta.quad_order);
    take_d("eta.fp_tol", c.eta.fp_tol);
    take_i("eta.max_iter", c.eta.max_iter);
    take_d("shoot.bracket_tol", c.bracket_tol);
    take_d("shoot.ode_tol", c.ode.tol);
    take_d("shoot.r_max", c.ode.r_max);
    take_i("shoot.grid_nodes", c.assemble.grid_nodes);
    take_d("shoot.u_cut", c.assemble.u_cut);
    take_d("heat.t_max", c.t_max);
    take_i("heat.duhamel_nodes", c.duhamel_nodes);
    take_d("heat.picard_tol", c.picard_tol);
    take_i("heat.picard_max_iter", c.picard_max_iter);
    take_i("heat.conv_quad_order", c.conv_quad_order);
    if (!kv.empty()) throw config_error("unknown config key: '" + kv.begin()->first + "'");
    if (o.t_max) c.t_max = *o.t_max;

    c.echo["eta.lambda"] = g17(c.eta.lambda);
    c.echo["eta.rho_max"] = g17(c.eta.rho_max);
    c.echo["eta.grid_max"] = g17(c.eta.grid_max);
    c.echo["eta.grid_nodes"] = std::to_string(c.eta.grid_nodes);
    c.echo["eta.quad_order"] = std::to_string(c.eta.quad_order);
    c.echo["eta.fp_tol"] = g17(c.eta.fp_tol);
    c.echo["eta.max_iter"] = std::to_string(c.eta.max_iter);
    c.echo["shoot.bracket_tol"] = g17(c.bracket_tol);
    c.echo["shoot.ode_tol"] = g17(c.ode.tol);
    c.echo["shoot.r_max"] = g17(c.ode.r_max);
    c.echo["shoot.grid_nodes"] = std::to_string(c.assemble.grid_nodes);
    c.echo["shoot.u_cut"] = g17(c.assemble.u_cut);
    c.echo["heat.t_max"] = g17(c.t_max);
    c.echo["heat.duhamel_nodes"] = std::to_string(c.duhamel_nodes);
    c.echo["heat.picard_tol"] = g17(c.picard_tol);
    c.echo["heat.picard_max_iter"] = std::to_string(c.picard_max_iter);
    c.echo["heat.conv_quad_order"] = std::to_string(c.conv_quad_order);
    if (o.m_override) c.echo["flag.m_override"] = g17(*o.m_override);
    if (o.skip_picard) c.echo["flag.skip_picard"] = "1";
    return c;
}

// --- output directory, lockfile, cache ------------------------------------

struct Workspace {
    fs::path dir;
    std::map<std::string, std::string> cache; // stage keys and artifact hashes
    std::map<std::string, double> wall_clock; // seconds per executed stage

    explicit Workspace(const std::string& out) : dir(out) {
        fs::create_directories(dir);
        lock_path_ = dir / ".lock";
        std::FILE* f = std::fopen(lock_path_.c_str(), "wx");
        if (!f)
            throw config_error("output directory is locked by another run: " +
                               lock_path_.string());
        std::fclose(f);
        if (file_exists((dir / "cache.txt").string()))
            cache = parse_kv(read_text_file((dir / "cache.txt").string()));
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove(lock_path_, ec);
    }

    void emit(const std::string& stage, const std::string& name, const std::string& content) {
        const fs::path p = dir / name;
        fs::create_directories(p.parent_path());
        write_text_file(p.string(), content);
        cache[stage + ".file." + name] = fnv1a_hex(content);
    }

    // a stage is current when its input key matches and every recorded
    // artifact still hashes to the recorded value
    bool stage_current(const std::string& stage, const std::string& key) const {
        auto it = cache.find(stage + ".key");
        if (it == cache.end() || it->second != key) return false;
        const std::string prefix = stage + ".file.";
        for (const auto& [k, h] : cache) {
            if (k.rfind(prefix, 0) != 0) continue;
            const fs::path p = dir / k.substr(prefix.size());
            if (!file_exists(p.string())) return false;
            if (fnv1a_hex(read_text_file(p.string())) != h) return false;
        }
        return true;
    }

    void finish_stage(const std::string& stage, const std::string& key, double seconds) {
        cache[stage + ".key"] = key;
        wall_clock[stage] = seconds;
        write_text_file((dir / "cache.txt").string(), dump_kv(cache));
    }

  private:
    fs::path lock_path_;
};

// cache key of one stage: its own config section, any flags that alter it,
// and the upstream stage key
std::string section_key(const RunConfig& c, const std::string& prefix,
                        const std::vector<std::string>& flags = {},
                        const std::string& upstream = {}) {
    std::string text = upstream;
    for (const auto& [k, v] : c.echo) {
        const bool flagged =
            std::find(flags.begin(), flags.end(), k) != flags.end();
        if (k.rfind(prefix, 0) == 0 || flagged) text += k + "=" + v + "\n";
    }
    return fnv1a_hex(text);
}

// --- pipeline state (recomputed in memory as stages need it) ---------------

struct Pipeline {
    const Options& opt;
    RunConfig cfg;
    Workspace ws;
    std::optional<EtaSolution> eta;
    std::optional<MstarResult> mstar;
    std::optional<SolitonProfile> prof;

    Pipeline(const Options& o, RunConfig c) : opt(o), cfg(std::move(c)), ws(o.out_dir) {}

    const EtaSolution& eta_solution() {
        if (!eta) eta = solve_eta(cfg.eta);
        return *eta;
    }
    const SolitonProfile& soliton() {
        if (!prof) {
            mstar = find_mstar(eta_solution(), cfg.bracket_tol, cfg.ode);
            prof = assemble_phistar(eta_solution(), *mstar, cfg.ode, cfg.assemble);
        }
        return *prof;
    }
};

class StageTimer {
  public:
    StageTimer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

// --- stages ----------------------------------------------------------------

std::string run_eta(Pipeline& p) {
    const std::string key = section_key(p.cfg, "eta.");
    if (!p.opt.force && p.ws.stage_current("eta", key)) {
        std::cout << "eta: up to date\n";
        return key;
    }
    StageTimer timer;
    const EtaSolution& sol = p.eta_solution();

    // residual column: weighted defect of the fixed point under one more
    // operator application
    const std::vector<double> titer = apply_T(p.cfg.eta, sol.rho,
                                              [&sol](double r) { return sol.eta_at(r); });
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < sol.rho.size(); ++i)
        rows.push_back({sol.rho[i], sol.eta[i], sol.deta[i],
                        eta_weight(sol.rho[i]) * std::fabs(titer[i] - sol.eta[i])});
    p.ws.emit("eta", "eta.csv", csv_table({"rho", "eta", "deta", "weighted_residual"}, rows));

    Json diag = Json::obj();
    diag.set("lambda", Json::num(p.cfg.eta.lambda))
        .set("weighted_norm", Json::num(sol.weighted_norm))
        .set("cstar", Json::num(sol.cstar))
        .set("contraction_factor", Json::num(sol.contraction_factor))
        .set("contraction_bound", Json::num(sol.contraction_bound))
        .set("tail_budget", Json::num(sol.tail_budget))
        .set("iterations", Json::integer(sol.iterations));
    p.ws.emit("eta", "eta-diagnostics.json", diag.dump(2));
    p.ws.finish_stage("eta", key, timer.seconds());
    std::cout << "eta: contraction_factor=" << g17(sol.contraction_factor)
              << " weighted_norm=" << g17(sol.weighted_norm) << "\n";
    return key;
}

std::string run_soliton(Pipeline& p) {
    const std::string up = run_eta(p);
    const std::string key = section_key(p.cfg, "shoot.", {"flag.m_override"}, up);
    if (!p.opt.force && !p.opt.m_override && p.ws.stage_current("soliton", key)) {
        std::cout << "soliton: up to date\n";
        return key;
    }
    StageTimer timer;

    if (p.opt.m_override) {
        // classification-only run at a fixed cutoff mass
        const double m = *p.opt.m_override;
        const RRinfResult start = find_R_and_Rinf(p.eta_solution(), p.cfg.ode);
        const ShootOutcome out = classify(m, start, p.cfg.ode);
        const char* kind = out.kind == ShootKind::HasZero ? "HasZero"
                           : out.kind == ShootKind::StaysPositive ? "StaysPositive"
                                                                  : "Inconclusive";
        Json j = Json::obj();
        j.set("m", Json::num(m))
            .set("kind", Json::str(kind))
            .set("where", Json::num(out.where))
            .set("certificate", Json::str(out.certificate))
            .set("R", Json::num(start.R))
            .set("R_inf", Json::num(start.R_inf));
        p.ws.emit("soliton", "classification.json", j.dump(2));
        p.ws.finish_stage("soliton", key, timer.seconds());
        std::cout << "soliton: m=" << g17(m) << " classification=" << kind << "\n";
        return key;
    }

    const SolitonProfile& prof = p.soliton();
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < prof.r.size(); ++i)
        rows.push_back({prof.r[i], prof.u[i], prof.du[i], prof.E[i]});
    p.ws.emit("soliton", "phistar.csv", csv_table({"r", "u", "du", "E"}, rows));

    Json norms = Json::obj();
    for (double q : {1.0, 2.0, 4.0, 8.0, 16.0})
        norms.set("L" + std::to_string(static_cast<int>(q)), Json::num(lp_norm(prof, q)));
    Json j = Json::obj();
    j.set("m_star", Json::num(prof.m))
        .set("bracket_lo", Json::num(p.mstar->m_lo))
        .set("bracket_hi", Json::num(p.mstar->m_hi))
        .set("bracket_width", Json::num(p.mstar->m_hi - p.mstar->m_lo))
        .set("R", Json::num(prof.R))
        .set("R_inf", Json::num(prof.R_inf))
        .set("decay_constant", Json::num(prof.decay_rate))
        .set("tail_amp", Json::num(prof.tail_amp))
        .set("r_start", Json::num(prof.r_start))
        .set("r_tail", Json::num(prof.r_tail))
        .set("lp_norms", std::move(norms));
    p.ws.emit("soliton", "soliton-summary.json", j.dump(2));
    p.ws.finish_stage("soliton", key, timer.seconds());
    std::cout << "soliton: m_star=" << g17(prof.m) << " R=" << g17(prof.R)
              << " R_inf=" << g17(prof.R_inf) << "\n";
    return key;
}

Json picard_json(const Evolution::PicardResult& pr) {
    Json j = Json::obj();
    j.set("converged", Json::boolean(pr.converged))
        .set("iterations", Json::integer(pr.iterations))
        .set("shrinks", Json::integer(pr.shrinks))
        .set("T_used", Json::num(pr.T_used))
        .set("first_norm", Json::num(pr.first_norm))
        .set("x_half", Json::num(pr.x_half))
        .set("x_three_half", Json::num(pr.x_three_half))
        .set("defects", Json::num_arr(pr.defects))
        .set("ratios", Json::num_arr(pr.ratios));
    return j;
}

std::string run_evolve(Pipeline& p) {
    const std::string up = run_soliton(p);
    const std::string key = section_key(p.cfg, "heat.", {"flag.skip_picard"}, up);
    if (!p.opt.force && p.ws.stage_current("evolve", key)) {
        std::cout << "evolve: up to date\n";
        return key;
    }
    StageTimer timer;
    const SolitonProfile& prof = p.soliton();
    HeatConfig hc = default_heat_config(prof);
    if (p.cfg.t_max > 0.0) hc.T = p.cfg.t_max;
    hc.duhamel_nodes = p.cfg.duhamel_nodes;
    hc.picard_tol = p.cfg.picard_tol;
    hc.picard_max_iter = p.cfg.picard_max_iter;
    hc.conv_quad_order = p.cfg.conv_quad_order;
    if (p.cfg.t_max > 0.0) {
        // rebuild the time ladder for the overridden horizon; validate() then
        // rejects horizons at or beyond the epsilon scale
        HeatConfig base = default_heat_config(prof);
        hc.time_nodes.clear();
        for (double t : base.time_nodes)
            if (t < hc.T * (1.0 - 1e-12)) hc.time_nodes.push_back(t);
        hc.time_nodes.push_back(0.25 * hc.T);
        hc.time_nodes.push_back(0.5 * hc.T);
        hc.time_nodes.push_back(hc.T);
        std::sort(hc.time_nodes.begin(), hc.time_nodes.end());
    }
    Evolution ev(hc, prof); // throws config_error (exit 2) on a bad horizon

    Json manifest = Json::obj();
    Json echo = Json::obj();
    for (const auto& [k, v] : p.cfg.echo) echo.set(k, Json::str(v));
    manifest.set("tool_version", Json::str(kVersion)).set("config", std::move(echo));
    manifest.set("m_star", Json::num(prof.m))
        .set("R", Json::num(prof.R))
        .set("R_inf", Json::num(prof.R_inf))
        .set("decay_constant", Json::num(prof.decay_rate))
        .set("epsilon", Json::num(hc.epsilon))
        .set("T", Json::num(hc.T));
    Json norms = Json::obj();
    for (double q : {1.0, 2.0, 4.0, 8.0, 16.0})
        norms.set("L" + std::to_string(static_cast<int>(q)), Json::num(lp_norm(prof, q)));
    manifest.set("lp_norms", std::move(norms));
    const EtaSolution& sol = p.eta_solution();
    Json ed = Json::obj();
    ed.set("weighted_norm", Json::num(sol.weighted_norm))
        .set("contraction_factor", Json::num(sol.contraction_factor));
    manifest.set("eta_diagnostics", std::move(ed));

    auto slice_csv = [&](double t, const std::vector<double>* v_slice, double v_origin,
                         bool with_v) {
        const std::vector<double>& u0 = ev.u0_values(t);
        std::vector<std::vector<double>> rows;
        if (with_v)
            rows.push_back({t, 0.0, u0[0], v_origin, u0[0] + v_origin});
        else
            rows.push_back({t, 0.0, u0[0]});
        for (size_t j = 0; j < hc.radial_grid.size(); ++j) {
            const double r = hc.radial_grid[j];
            if (with_v) {
                const double v = (*v_slice)[j];
                rows.push_back({t, r, u0[j + 1], v, u0[j + 1] + v});
            } else {
                rows.push_back({t, r, u0[j + 1]});
            }
        }
        return csv_table(with_v ? std::vector<std::string>{"t", "r", "u0", "v", "uR"}
                                : std::vector<std::string>{"t", "r", "u0"},
                         rows);
    };
    const std::vector<std::pair<const char*, double>> slice_times = {
        {"slices/t-quarter.csv", 0.25 * hc.T},
        {"slices/t-half.csv", 0.5 * hc.T},
        {"slices/t-final.csv", hc.T}};

    if (p.opt.skip_picard) {
        for (const auto& [name, t] : slice_times)
            p.ws.emit("evolve", name, slice_csv(t, nullptr, 0.0, false));
        manifest.set("picard", Json::str("absent"));
        Json hashes = Json::obj();
        for (const auto& [k, h] : p.ws.cache)
            if (k.find(".file.") != std::string::npos)
                hashes.set(k.substr(k.find(".file.") + 6), Json::str(h));
        manifest.set("artifact_hashes", std::move(hashes));
        Json wall = Json::obj();
        for (const auto& [k, s] : p.ws.wall_clock) wall.set(k, Json::num(s));
        wall.set("evolve", Json::num(timer.seconds()));
        manifest.set("wall_clock_seconds", std::move(wall));
        p.ws.emit("evolve", "manifest.json", manifest.dump(2));
        p.ws.finish_stage("evolve", key, timer.seconds());
        std::cout << "evolve: u0 slices only (picard skipped)\n";
        return key;
    }

    const Evolution::PicardResult pr = ev.picard_solve();
    const NonuniquenessReport rep = nonuniqueness_report(ev, pr);
    for (const auto& [name, t] : slice_times) {
        const std::vector<double> vs = pr.v.slice(t);
        p.ws.emit("evolve", name, slice_csv(t, &vs, pr.v.origin(t), true));
    }

    const double tol2 = 1e-6 * (1.0 + lp_norm(prof, 2.0));
    const double tol4 = 1e-6 * (1.0 + lp_norm(prof, 4.0));
    const double rtol = 10.0 * hc.picard_tol;
    Json residuals = Json::obj();
    residuals.set("stationary_L2_half", Json::num(rep.resS_L2))
        .set("stationary_L4_half", Json::num(rep.resS_L4))
        .set("stationary_L2_quarter", Json::num(rep.resS_L2_q))
        .set("stationary_L4_quarter", Json::num(rep.resS_L4_q))
        .set("stationary_tol_L2", Json::num(tol2))
        .set("stationary_tol_L4", Json::num(tol4))
        .set("regular_L2_half", Json::num(rep.resR_L2))
        .set("regular_L4_half", Json::num(rep.resR_L4))
        .set("regular_L2_quarter", Json::num(rep.resR_L2_q))
        .set("regular_L4_quarter", Json::num(rep.resR_L4_q))
        .set("regular_tol", Json::num(rtol))
        .set("pass", Json::boolean(rep.resS_L2 < tol2 && rep.resS_L4 < tol4 &&
                                   rep.resS_L2_q < tol2 && rep.resS_L4_q < tol4 &&
                                   rep.resR_L2 < rtol && rep.resR_L4 < rtol &&
                                   rep.resR_L2_q < rtol && rep.resR_L4_q < rtol));
    p.ws.emit("evolve", "residuals.json", residuals.dump(2));

    Json nu = Json::obj();
    nu.set("T", Json::num(rep.T))
        .set("epsilon", Json::num(rep.epsilon))
        .set("m", Json::num(rep.m))
        .set("separation_L2", Json::num(rep.sep_L2))
        .set("separation_L4", Json::num(rep.sep_L4))
        .set("separation_required", Json::num(1e3 * tol2))
        .set("times", Json::num_arr(rep.times))
        .set("uR_sup", Json::num_arr(rep.uR_sup))
        .set("uR_over_phistar", Json::num_arr(rep.uR_over_phistar))
        .set("rmin_decades", Json::num_arr(rep.rmin_decades))
        .set("uS_sup_ratio", Json::num_arr(rep.uS_sup_ratio));
    p.ws.emit("evolve", "nonuniqueness.json", nu.dump(2));

    manifest.set("picard", picard_json(pr));
    {
        Json residual_echo = Json::obj();
        residual_echo.set("stationary_L2_half", Json::num(rep.resS_L2))
            .set("regular_L2_half", Json::num(rep.resR_L2))
            .set("separation_L2", Json::num(rep.sep_L2));
        manifest.set("residuals", std::move(residual_echo));
    }
    Json hashes = Json::obj();
    for (const auto& [k, h] : p.ws.cache)
        if (k.find(".file.") != std::string::npos)
            hashes.set(k.substr(k.find(".file.") + 6), Json::str(h));
    manifest.set("artifact_hashes", std::move(hashes));
    Json wall = Json::obj();
    for (const auto& [k, s] : p.ws.wall_clock) wall.set(k, Json::num(s));
    wall.set("evolve", Json::num(timer.seconds()));
    manifest.set("wall_clock_seconds", std::move(wall));
    p.ws.emit("evolve", "manifest.json", manifest.dump(2));
    p.ws.finish_stage("evolve", key, timer.seconds());
    std::cout << "evolve: picard_iters=" << pr.iterations
              << " separation_L2=" << g17(rep.sep_L2) << "\n";
    return key;
}

// --- verify -----------------------------------------------------------------

struct OracleResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

int run_verify(Pipeline& p) {
    std::vector<std::string> names = {"hash",         "lem-sin",          "estimate-f",
                                      "envelope",     "monotonicity",     "integral-formula",
                                      "energy-dissipation"};
    if (p.opt.only) {
        bool known = false;
        for (const auto& n : names) known = known || n == *p.opt.only;
        if (!known) throw config_error("unknown oracle for --only: " + *p.opt.only);
        names = {*p.opt.only};
    }
    std::vector<OracleResult> results;
    for (const std::string& name : names) {
        OracleResult res;
        res.name = name;
        if (name == "hash") {
            res.pass = true;
            int checked = 0;
            for (const auto& [k, h] : p.ws.cache) {
                const size_t pos = k.find(".file.");
                if (pos == std::string::npos) continue;
                const std::string rel = k.substr(pos + 6);
                const std::string path = (p.ws.dir / rel).string();
                ++checked;
                if (!file_exists(path) || fnv1a_hex(read_text_file(path)) != h) {
                    res.pass = false;
                    res.detail = "hash mismatch: " + rel;
                    break;
                }
            }
            if (res.pass) res.detail = std::to_string(checked) + " artifacts match";
            if (checked == 0) {
                res.pass = false;
                res.detail = "no recorded artifacts to check";
            }
        } else if (name == "lem-sin") {
            res.pass = true;
            for (double sigma : {1.5, 2.0, 2.5}) {
                const LemSinResult r = oracle_lem_sin(sigma, 1e4, false);
                const double ratio = r.numeric / r.leading;
                if (std::fabs(ratio - 1.0) > 0.05) res.pass = false;
                res.detail += "sigma=" + g17(sigma) + " ratio=" + g17(ratio) + " ";
            }
        } else if (name == "estimate-f") {
            const double rho = 1e6;
            const double coeff = (std::pow(phi_leading(rho), -3.0) - std::pow(rho, -1.5)) *
                                 std::pow(rho, 2.5) / std::log(rho);
            res.pass = std::fabs(coeff / 3.0 - 1.0) < 0.10;
            res.detail = "coefficient=" + g17(coeff);
        } else if (name == "envelope") {
            const SolitonProfile& prof = p.soliton();
            HeatConfig hc = default_heat_config(prof);
            Evolution ev(hc, prof);
            const EnvelopeOracle env{hc.epsilon};
            double cF = 0.0;
            for (double t : {1e-12, 1e-8, 1e-4}) {
                const std::vector<double>& u0 = ev.u0_values(t);
                cF = std::max(cF, u0[0] * std::expm1(u0[0] * u0[0]) / env.F0(t, 0.0));
                for (size_t j = 0; j < hc.radial_grid.size(); ++j)
                    cF = std::max(cF, u0[j + 1] * std::expm1(u0[j + 1] * u0[j + 1]) /
                                          env.F0(t, hc.radial_grid[j]));
            }
            res.pass = cF < 2.0;
            res.detail = "constant=" + g17(cF);
        } else if (name == "monotonicity") {
            HeatProfile phi = phistar_heat_profile(p.soliton());
            std::vector<double> radii;
            for (double q = 1e-8; q < 20.0; q *= 2.4) radii.push_back(q);
            const MonotonicityReport rep = monotonicity_check(phi, {1e-10, 1e-7, 1e-4}, radii);
            res.pass = rep.ok;
            res.detail = "worst_gap=" + g17(rep.worst_gap);
        } else if (name == "integral-formula") {
            const double eps = epsilon_scale(p.soliton());
            res.pass = true;
            for (double alpha : {1.0, 1.5}) {
                double smin = 1e300, smax = 0.0;
                for (double t : {1e-8, 1e-6, 1e-4}) {
                    const IntegralFormulaResult r = oracle_integral_formula(eps, alpha, t);
                    smin = std::min(smin, r.cstar_sharp);
                    smax = std::max(smax, r.cstar_sharp);
                }
                if (smax / smin > 1.2) res.pass = false;
                res.detail += "alpha=" + g17(alpha) + " spread=" + g17(smax / smin) + " ";
            }
        } else if (name == "energy-dissipation") {
            const SolitonProfile& prof = p.soliton();
            res.pass = true;
            double worst = 0.0;
            for (size_t i = 0; i + 1 < prof.E.size(); ++i) {
                const double slack = 1e-8 * std::max(std::fabs(prof.E[i]), 1.0);
                worst = std::max(worst, prof.E[i + 1] - prof.E[i]);
                if (prof.E[i + 1] > prof.E[i] + slack) res.pass = false;
            }
            res.detail = "worst_increase=" + g17(worst);
        }
        results.push_back(std::move(res));
    }

    Json report = Json::obj();
    bool all_pass = true;
    for (const auto& r : results) {
        Json o = Json::obj();
        o.set("pass", Json::boolean(r.pass)).set("detail", Json::str(r.detail));
        report.set(r.name, std::move(o));
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    }
    write_text_file((p.ws.dir / "verify-report.json").string(), report.dump(2));
    return all_pass ? 0 : 1;
}

int run_report(Pipeline& p) {
    const std::string path = (p.ws.dir / "manifest.json").string();
    if (!file_exists(path)) {
        std::cerr << "error: no manifest.json in " << p.ws.dir.string()
                  << " (run `singheat evolve` first)\n";
        return 2;
    }
    std::cout << read_text_file(path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    const Options opt = parse_args(argc, argv);
    try {
        RunConfig cfg = load_config(opt);
        if (opt.subcommand != "eta" && opt.subcommand != "soliton" &&
            opt.subcommand != "evolve" && opt.subcommand != "verify" &&
            opt.subcommand != "report")
            usage_error("unknown subcommand: " + opt.subcommand);
        Pipeline p(opt, std::move(cfg));
        if (opt.subcommand == "eta") run_eta(p);
        else if (opt.subcommand == "soliton") run_soliton(p);
        else if (opt.subcommand == "evolve") run_evolve(p);
        else if (opt.subcommand == "verify") return run_verify(p);
        else return run_report(p);
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
