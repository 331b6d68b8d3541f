#ifndef WQNET_CLI_HPP
#define WQNET_CLI_HPP

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "wqnet/config.hpp"
#include "wqnet/scenario.hpp"
#include "wqnet/stepping.hpp"

namespace wqnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPlanning = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitSolver = 5;

// One lock per output directory; concurrent scenario runs must target
// different directories.
class OutputDirLock {
public:
    explicit OutputDirLock(const std::string& dir)
    {
        std::filesystem::create_directories(dir);
        path_ = dir + "/.lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0 && ::flock(fd_, LOCK_EX) != 0)
            warn("could not lock output directory " + dir);
    }
    ~OutputDirLock()
    {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    OutputDirLock(const OutputDirLock&) = delete;
    OutputDirLock& operator=(const OutputDirLock&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

enum class GoldenMode { Off, Record, Compare };

namespace detail {

struct Scenario {
    NetworkTopology topo;
    HydraulicTrace trace;
    SpeciesInitialState init;
};

inline Scenario load_scenario(const ScenarioConfig& cfg, bool need_initial)
{
    Scenario s;
    s.topo = load_network(cfg.network);
    s.trace = load_hydraulics(cfg.hydraulics, s.topo);
    if (need_initial) {
        if (cfg.initial.empty()) throw ValidationError("config is missing the initial-state path");
        s.init = load_initial_state(cfg.initial, s.topo);
        auto rep = validate_scenario(s.topo, s.trace, s.init);
        // drop advisory findings that do not block a run
        for (const auto& f : rep.findings)
            if (f.code != "velocity-flow" && f.code != "reservoir-fixed")
                throw ValidationError(f.code + ": " + f.message);
    }
    return s;
}

inline bool numeric_token(const std::string& t, double& v)
{
    char* end = nullptr;
    v = std::strtod(t.c_str(), &end);
    return end != t.c_str() && *end == '\0';
}

// Column-tolerant comparison of two structured-text outputs.
inline bool golden_equal(const std::string& got_path, const std::string& want_path, double tol,
                         std::string& why)
{
    std::ifstream got(got_path), want(want_path);
    if (!got || !want) {
        why = "missing file " + (got ? want_path : got_path);
        return false;
    }
    std::string lg, lw;
    int line = 0;
    while (true) {
        bool g_ok = static_cast<bool>(std::getline(got, lg));
        bool w_ok = static_cast<bool>(std::getline(want, lw));
        ++line;
        if (g_ok != w_ok) {
            why = "line count differs at line " + std::to_string(line);
            return false;
        }
        if (!g_ok) return true;
        auto tg = text::split_ws(lg), tw = text::split_ws(lw);
        if (tg.size() != tw.size()) {
            why = "column count differs at line " + std::to_string(line);
            return false;
        }
        for (size_t c = 0; c < tg.size(); ++c) {
            double a, b;
            if (numeric_token(tg[c], a) && numeric_token(tw[c], b)) {
                if (std::abs(a - b) > tol * std::max({1.0, std::abs(a), std::abs(b)})) {
                    why = "value differs at line " + std::to_string(line) + " column " +
                          std::to_string(c + 1) + " (" + tg[c] + " vs " + tw[c] + ")";
                    return false;
                }
            } else if (tg[c] != tw[c]) {
                why = "token differs at line " + std::to_string(line) + " column " +
                      std::to_string(c + 1);
                return false;
            }
        }
    }
}

inline int handle_golden(const ScenarioConfig& cfg, GoldenMode golden,
                         const std::vector<std::string>& files)
{
    if (golden == GoldenMode::Off) return kExitOk;
    std::string gdir = cfg.outdir + "/golden";
    if (golden == GoldenMode::Record) {
        std::filesystem::create_directories(gdir);
        for (const auto& f : files)
            std::filesystem::copy_file(cfg.outdir + "/" + f, gdir + "/" + f,
                                       std::filesystem::copy_options::overwrite_existing);
        std::printf("golden: recorded %zu files\n", files.size());
        return kExitOk;
    }
    for (const auto& f : files) {
        std::string why;
        if (!golden_equal(cfg.outdir + "/" + f, gdir + "/" + f, cfg.golden_tol, why)) {
            std::fprintf(stderr, "golden mismatch in %s: %s\n", f.c_str(), why.c_str());
            return kExitValidation;
        }
    }
    std::printf("golden: %zu files match\n", files.size());
    return kExitOk;
}

template <typename Fn>
int guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const PlanningError& e) {
        std::fprintf(stderr, "planning error: %s\n", e.what());
        return kExitPlanning;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
}

inline Eigen::MatrixXd load_disturbances(const ScenarioConfig& cfg, const NetworkTopology& topo,
                                         int total_steps)
{
    if (cfg.disturbances.empty()) return {};
    TextFile f(cfg.disturbances);
    std::vector<int> cols;
    size_t i = 0;
    auto toks = text::split_ws(f.line(0));
    if (toks[0] != "columns") throw ParseError("disturbance file must start with a columns header");
    for (size_t c = 1; c < toks.size(); ++c) {
        auto b = topo.find_booster(toks[c]);
        if (!b) throw ValidationError("disturbance column names unknown booster '" + toks[c] + "'");
        if (topo.boosters[*b].species == Species::Chlorine)
            throw ValidationError("disturbance columns must be non-chlorine boosters");
        cols.push_back(*b);
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total_steps, static_cast<int>(topo.boosters.size()));
    for (i = 1; i < f.size(); ++i) {
        auto row = text::split_ws(f.line(i));
        int k = static_cast<int>(text::parse_int(row.at(0), f.where(i)));
        if (k < 0 || k >= total_steps) continue;  // rows beyond the run are ignored
        for (size_t c = 0; c < cols.size(); ++c)
            d(k, cols[c]) = text::parse_double(row.at(c + 1), f.where(i));
    }
    return d;
}

}  // namespace detail

/// plan: fix the WQ step and per-pipe grids; write the plan report.
inline int cmd_plan(const ScenarioConfig& cfg, GoldenMode golden = GoldenMode::Off)
{
    return detail::guarded([&] {
        auto sc = detail::load_scenario(cfg, false);
        auto plan = plan_grid(sc.topo, sc.trace, cfg.family, cfg.pe_threshold, cfg.plan);
        OutputDirLock lock(cfg.outdir);
        TransportConfig tcfg = cfg.plan.transport;
        write_file(cfg.outdir + "/plan.txt", plan_report(sc.topo, sc.trace, plan, tcfg));
        std::printf("plan: dt %s s, %d substeps, %d segments\n", text::format_g(plan.dt).c_str(),
                    plan.substeps, plan.total_segments());
        return detail::handle_golden(cfg, golden, {"plan.txt"});
    });
}

/// simulate: advance the scenario over the whole trace; write trajectory
/// and scheme-tag files.
inline int cmd_simulate(const ScenarioConfig& cfg, GoldenMode golden = GoldenMode::Off)
{
    return detail::guarded([&] {
        auto sc = detail::load_scenario(cfg, true);
        auto plan = plan_grid(sc.topo, sc.trace, cfg.family, cfg.pe_threshold, cfg.plan);
        SimOptions opt;
        opt.mode = cfg.mode;
        opt.engine = cfg.engine_options();
        opt.op_refresh_substeps = cfg.op_refresh;
        Eigen::MatrixXd dist =
            detail::load_disturbances(cfg, sc.topo, sc.trace.steps * plan.substeps);
        auto traj = simulate(sc.topo, sc.trace, plan, cfg.reaction, sc.init, dist, opt);
        OutputDirLock lock(cfg.outdir);
        write_file(cfg.outdir + "/trajectory.tsv", serialize_trajectory(sc.topo, traj));
        write_file(cfg.outdir + "/scheme_tags.tsv", serialize_scheme_tags(sc.topo, traj));
        std::printf("simulate: %d WQ steps, %ld clamped negatives\n", traj.steps,
                    traj.clamped_negative);
        return detail::handle_golden(cfg, golden, {"trajectory.tsv", "scheme_tags.tsv"});
    });
}

/// analyze: controllability metrics per booster/step/target plus the MPC
/// weight schedule files.
inline int cmd_analyze(const ScenarioConfig& cfg, GoldenMode golden = GoldenMode::Off)
{
    return detail::guarded([&] {
        auto sc = detail::load_scenario(cfg, true);
        if (cfg.targets.empty()) throw ValidationError("config is missing the targets path");
        auto plan = plan_grid(sc.topo, sc.trace, cfg.family, cfg.pe_threshold, cfg.plan);
        StateLayout ly(sc.topo, plan);
        auto targets = load_targets(cfg.targets, sc.topo, ly);
        Eigen::VectorXd x0 = expand_initial_state(sc.topo, ly, sc.init);
        OperatingPoint op;
        op.cl = x0.segment(0, ly.n_locations);
        op.fr = x0.segment(ly.n_locations, ly.n_locations);
        auto ws = booster_weights(sc.topo, sc.trace, targets, plan, cfg.reaction, op,
                                  cfg.engine_options(), cfg.weight);
        OutputDirLock lock(cfg.outdir);
        write_file(cfg.outdir + "/controllability.tsv", serialize_controllability_report(ws));
        write_file(cfg.outdir + "/weights.tsv", serialize_weights(ws));
        std::printf("analyze: %d boosters, %d steps, %zu target sets\n", ws.n_inputs,
                    static_cast<int>(ws.r_diag.rows()), targets.size());
        return detail::handle_golden(cfg, golden, {"controllability.tsv", "weights.tsv"});
    });
}

/// control: receding-horizon chlorine injection; writes inputs, realized
/// states and the summary report.
inline int cmd_control(const ScenarioConfig& cfg, GoldenMode golden = GoldenMode::Off)
{
    return detail::guarded([&] {
        auto sc = detail::load_scenario(cfg, true);
        auto plan = plan_grid(sc.topo, sc.trace, cfg.family, cfg.pe_threshold, cfg.plan);
        StateLayout ly(sc.topo, plan);
        Eigen::VectorXd x0 = expand_initial_state(sc.topo, ly, sc.init);

        WeightSchedule ws;
        if (!cfg.weights_file.empty()) {
            ws = load_weights(cfg.weights_file);
            for (size_t b = 0; b < sc.topo.boosters.size(); ++b)
                if (sc.topo.boosters[b].species == Species::Chlorine)
                    ws.booster_index.push_back(static_cast<int>(b));
            if (static_cast<int>(ws.booster_index.size()) != ws.n_inputs)
                throw ValidationError("weights file does not match the network's chlorine boosters");
        } else if (cfg.uniform_weights || cfg.targets.empty()) {
            for (size_t b = 0; b < sc.topo.boosters.size(); ++b)
                if (sc.topo.boosters[b].species == Species::Chlorine)
                    ws.booster_index.push_back(static_cast<int>(b));
            ws.n_inputs = static_cast<int>(ws.booster_index.size());
            ws.w_raw.setZero(sc.trace.steps, ws.n_inputs);
            ws.r_diag.setConstant(sc.trace.steps, ws.n_inputs, 1.0 / std::max(1, ws.n_inputs));
            ws.q_diag.setZero(sc.trace.steps, ly.dimension());
            for (int k = 0; k < sc.trace.steps; ++k)
                for (int loc = 0; loc < ly.n_locations; ++loc)
                    ws.q_diag(k, ly.state(Species::Chlorine, loc)) =
                        cfg.weight.q_base * cfg.weight.q_scale;
        } else {
            auto targets = load_targets(cfg.targets, sc.topo, ly);
            OperatingPoint op;
            op.cl = x0.segment(0, ly.n_locations);
            op.fr = x0.segment(ly.n_locations, ly.n_locations);
            ws = booster_weights(sc.topo, sc.trace, targets, plan, cfg.reaction, op,
                                 cfg.engine_options(), cfg.weight);
        }

        MpcOptions mopt;
        mopt.engine = cfg.engine_options();
        mopt.qp_tol = cfg.qp_tol;
        mopt.qp_max_iter = cfg.qp_max_iter;
        mopt.disturbances =
            detail::load_disturbances(cfg, sc.topo, sc.trace.steps * plan.substeps);
        auto sol = run_mpc(sc.topo, sc.trace, plan, cfg.reaction, ws, cfg.control, x0, mopt);

        OutputDirLock lock(cfg.outdir);
        write_file(cfg.outdir + "/inputs.tsv", serialize_control_inputs(sc.topo, sol, plan.dt));
        write_file(cfg.outdir + "/realized.tsv", serialize_trajectory(sc.topo, sol.realized));
        write_file(cfg.outdir + "/control_summary.txt",
                   serialize_control_summary(sc.topo, sol, cfg.control));
        if (sol.max_slack() > 1e-9)
            warn("soft state constraints used slack up to " + text::format_g(sol.max_slack()));
        std::printf("control: cost %s, max slack %s\n", text::format_g(sol.cost.total()).c_str(),
                    text::format_g(sol.max_slack()).c_str());
        return detail::handle_golden(cfg, golden,
                                     {"inputs.tsv", "realized.tsv", "control_summary.txt"});
    });
}

}  // namespace wqnet::cli

#endif
