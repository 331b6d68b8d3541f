#ifndef WQNET_MPC_HPP
#define WQNET_MPC_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wqnet/controllability.hpp"
#include "wqnet/qp.hpp"
#include "wqnet/stepping.hpp"

namespace wqnet {

// Receding-horizon problem data. Chlorine bounds and the THMs cap follow
// the regulatory levels; state bounds are softened by L1 slacks so the
// controller always returns an action.
struct ControlProblemSpec {
    double cl_min = 0.2;   // mg/L
    double cl_max = 4.0;   // mg/L
    double thm_cap = 0.08; // mg/L
    std::optional<double> fr_cap;
    double eps_cost = 1.0;      // $/mg of injected chlorine
    int horizon = 0;            // N_p in WQ steps; 0 -> one hydraulic step
    int control_horizon = 0;    // N_c <= N_p; 0 -> N_p
    int move_block = 0;         // b WQ steps per input block; 0 -> substeps/4, min 1
    double slack_penalty = 1e6; // rho_s
    double x_ref_cl = 2.1;      // tracking setpoint on weighted chlorine states
    double q_scale = 1.0;       // overall tracking weight multiplier
    double r_scale = 1.0;       // overall smoothness weight multiplier
    int constraint_stride = 1;  // apply state constraints every k-th WQ step
    int cadence = 0;            // WQ steps between solves; 0 -> one per hydraulic step

    void validate() const
    {
        if (!(cl_min >= 0 && cl_min < cl_max)) throw ValidationError("need 0 <= cl_min < cl_max");
        if (!(thm_cap > 0)) throw ValidationError("THMs cap must be positive");
        if (fr_cap && !(*fr_cap > 0)) throw ValidationError("reactant cap must be positive");
        if (control_horizon < 0 || horizon < 0) throw ValidationError("horizons must be nonnegative");
        if (!(slack_penalty > 0)) throw ValidationError("slack penalty must be positive");
    }
};

struct HorizonStep {
    SystemMatrices* mats = nullptr;
    int substep = 0;   // tank substep within the hydraulic step
    int hyd_step = 0;  // row into the weight schedule
};

// Condensed QP over the horizon: states eliminated through the LDE
// prediction, decision variables are the blocked chlorine injections
// plus one slack per soft-constraint class.
struct QpInstance {
    QpProblem qp;
    int n_steps = 0;   // N_p
    int n_dec = 0;     // chlorine boosters
    int n_blocks = 0;
    std::vector<int> block_of_step;
    std::vector<int> dec_boosters;        // indices into topo.boosters
    std::vector<Eigen::MatrixXd> pred_s;  // sensitivity dx_k/dz, k = 0..N_p
    Eigen::MatrixXd pred_c;               // (N_p+1) x dim constant part
    std::map<std::string, int> slack_index;
    Eigen::MatrixXd mass_coeff;           // N_p x n_dec, mg injected per (mg/L) of input

    Eigen::VectorXd input_at(const Eigen::VectorXd& z, int k) const
    {
        return z.segment(block_of_step[k] * n_dec, n_dec);
    }
    Eigen::VectorXd state_at(const Eigen::VectorXd& z, int k) const
    {
        return pred_c.row(k).transpose() + pred_s[k] * z;
    }
    double slack_value(const Eigen::VectorXd& z, const std::string& cls) const
    {
        auto it = slack_index.find(cls);
        return it == slack_index.end() ? 0.0 : z[it->second];
    }
};

inline QpInstance build_qp(const std::vector<HorizonStep>& horizon, const WeightSchedule& ws,
                           const ControlProblemSpec& spec, const NetworkTopology& topo,
                           const HydraulicTrace& trace, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& u_prev, const Eigen::MatrixXd& disturbances)
{
    spec.validate();
    if (horizon.empty()) throw NumericalError("build_qp: empty horizon");
    const SystemMatrices& m0 = *horizon[0].mats;
    const StateLayout& ly = m0.layout;
    const int dim = ly.dimension();
    const int np = static_cast<int>(horizon.size());
    if (x0.size() != dim) throw NumericalError("build_qp: x0 does not match layout");
    if (!x0.allFinite()) throw NumericalError("build_qp: x0 is not finite");

    QpInstance inst;
    inst.n_steps = np;
    inst.dec_boosters = ws.booster_index;
    inst.n_dec = static_cast<int>(inst.dec_boosters.size());
    if (inst.n_dec == 0) throw ValidationError("build_qp: no chlorine boosters");
    if (u_prev.size() != inst.n_dec) throw NumericalError("build_qp: u_prev size mismatch");

    const double dt = m0.dt;
    int block = spec.move_block > 0 ? spec.move_block : std::max(1, m0.substeps / 4);
    int nc = spec.control_horizon > 0 ? std::min(spec.control_horizon, np) : np;
    inst.n_blocks = std::max(1, (nc + block - 1) / block);
    inst.block_of_step.resize(np);
    for (int k = 0; k < np; ++k)
        inst.block_of_step[k] = std::min(k / block, inst.n_blocks - 1);

    // slack classes
    std::vector<std::string> classes = {"cl_lo", "cl_hi", "thm"};
    if (spec.fr_cap) classes.push_back("fr");
    const int n_u = inst.n_blocks * inst.n_dec;
    const int n_z = n_u + static_cast<int>(classes.size());
    for (size_t c = 0; c < classes.size(); ++c)
        inst.slack_index[classes[c]] = n_u + static_cast<int>(c);

    // per-step injected-mass coefficients (mg per mg/L of input)
    inst.mass_coeff.setZero(np, inst.n_dec);
    for (int k = 0; k < np; ++k) {
        int hk = horizon[k].hyd_step;
        for (int j = 0; j < inst.n_dec; ++j) {
            int b = inst.dec_boosters[j];
            double water = topo.node_kind(topo.boosters[b].node) == NodeKind::Tank
                               ? trace.booster_flow(hk, b) / m0.substeps  // m^3 per WQ step
                               : trace.booster_flow(hk, b) * dt;          // m^3/s * s
            inst.mass_coeff(k, j) = 1000.0 * water;  // L * mg/L = mg
        }
    }

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_z, n_z);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_z);

    // prediction streaming
    inst.pred_s.assign(np + 1, Eigen::MatrixXd::Zero(dim, n_z));
    inst.pred_c.setZero(np + 1, dim);
    inst.pred_c.row(0) = x0.transpose();

    Eigen::VectorXd xref = Eigen::VectorXd::Zero(dim);
    for (int loc = 0; loc < ly.n_locations; ++loc)
        xref[ly.state(Species::Chlorine, loc)] = spec.x_ref_cl;

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, n_z);
    Eigen::VectorXd c = x0;
    for (int k = 0; k < np; ++k) {
        SystemMatrices& mk = *horizon[k].mats;
        mk.set_tank_substep(horizon[k].substep);
        const int nb = static_cast<int>(topo.boosters.size());
        Eigen::VectorXd dist = Eigen::VectorXd::Zero(nb);
        if (disturbances.size() > 0 && k < disturbances.rows())
            dist = disturbances.row(k).transpose();

        Eigen::MatrixXd s_rhs = mk.A * s;
        for (int j = 0; j < inst.n_dec; ++j)
            s_rhs.col(inst.block_of_step[k] * inst.n_dec + j) +=
                Eigen::VectorXd(mk.B.col(inst.dec_boosters[j]));
        Eigen::VectorXd c_rhs = mk.A * c + mk.B * dist + mk.phi;
        s = mk.solve_e(s_rhs);
        c = mk.solve_e(c_rhs);
        inst.pred_s[k + 1] = s;
        inst.pred_c.row(k + 1) = c.transpose();

        // tracking term (x_{k+1} - xref)' Q (x_{k+1} - xref)
        int hk = horizon[k].hyd_step;
        for (int i = 0; i < dim; ++i) {
            double q = spec.q_scale * ws.q_diag(hk, i);
            if (q <= 0) continue;
            p.noalias() += 2.0 * q * (s.row(i).transpose() * s.row(i));
            g.noalias() += 2.0 * q * (c[i] - xref[i]) * s.row(i).transpose();
        }
        // injection cost
        for (int j = 0; j < inst.n_dec; ++j)
            g[inst.block_of_step[k] * inst.n_dec + j] += spec.eps_cost * inst.mass_coeff(k, j);
    }

    // smoothness term du' R du at block boundaries
    for (int k = 0; k < np; ++k) {
        bool boundary = k == 0 || inst.block_of_step[k] != inst.block_of_step[k - 1];
        if (!boundary) continue;
        int hk = horizon[k].hyd_step;
        int b = inst.block_of_step[k];
        for (int j = 0; j < inst.n_dec; ++j) {
            double r = spec.r_scale * ws.r_diag(hk, j);
            if (r <= 0) continue;
            int cur = b * inst.n_dec + j;
            if (k == 0) {
                p(cur, cur) += 2.0 * r;
                g[cur] -= 2.0 * r * u_prev[j];
            } else {
                int prev = (b - 1) * inst.n_dec + j;
                p(cur, cur) += 2.0 * r;
                p(prev, prev) += 2.0 * r;
                p(cur, prev) -= 2.0 * r;
                p(prev, cur) -= 2.0 * r;
            }
        }
    }

    // slack penalties (L1; slacks are nonnegative)
    for (const auto& [cls, idx] : inst.slack_index) {
        (void)cls;
        g[idx] += spec.slack_penalty;
    }

    // constraints
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> lows, highs;
    auto add_row = [&](const Eigen::VectorXd& r, double lo, double hi) {
        rows.push_back(r);
        lows.push_back(lo);
        highs.push_back(hi);
    };
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_u; ++j) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n_z);
        r[j] = 1;
        add_row(r, 0.0, topo.boosters[inst.dec_boosters[j % inst.n_dec]].umax);
    }
    for (const auto& [cls, idx] : inst.slack_index) {
        (void)cls;
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n_z);
        r[idx] = 1;
        add_row(r, 0.0, inf);
    }
    int stride = std::max(1, spec.constraint_stride);
    for (int k = stride - 1; k < np; k += stride) {
        for (int loc : m0.monitored_locations) {
            int cl = ly.state(Species::Chlorine, loc);
            int th = ly.state(Species::Thm, loc);
            Eigen::VectorXd r_lo = Eigen::VectorXd::Zero(n_z);
            r_lo.head(n_u) = inst.pred_s[k + 1].row(cl).head(n_u).transpose();
            r_lo[inst.slack_index["cl_lo"]] = 1.0;
            add_row(r_lo, spec.cl_min - inst.pred_c(k + 1, cl), inf);
            Eigen::VectorXd r_hi = Eigen::VectorXd::Zero(n_z);
            r_hi.head(n_u) = inst.pred_s[k + 1].row(cl).head(n_u).transpose();
            r_hi[inst.slack_index["cl_hi"]] = -1.0;
            add_row(r_hi, -inf, spec.cl_max - inst.pred_c(k + 1, cl));
            Eigen::VectorXd r_th = Eigen::VectorXd::Zero(n_z);
            r_th.head(n_u) = inst.pred_s[k + 1].row(th).head(n_u).transpose();
            r_th[inst.slack_index["thm"]] = -1.0;
            add_row(r_th, -inf, spec.thm_cap - inst.pred_c(k + 1, th));
            if (spec.fr_cap) {
                int fr = ly.state(Species::Reactant, loc);
                Eigen::VectorXd r_fr = Eigen::VectorXd::Zero(n_z);
                r_fr.head(n_u) = inst.pred_s[k + 1].row(fr).head(n_u).transpose();
                r_fr[inst.slack_index["fr"]] = -1.0;
                add_row(r_fr, -inf, *spec.fr_cap - inst.pred_c(k + 1, fr));
            }
        }
    }

    inst.qp.p = 0.5 * (p + p.transpose());
    inst.qp.g = g;
    inst.qp.a.resize(static_cast<int>(rows.size()), n_z);
    inst.qp.lo.resize(static_cast<int>(rows.size()));
    inst.qp.hi.resize(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        inst.qp.a.row(static_cast<int>(i)) = rows[i].transpose();
        inst.qp.lo[static_cast<int>(i)] = lows[i];
        inst.qp.hi[static_cast<int>(i)] = highs[i];
    }
    return inst;
}

struct QpStepLog {
    int instant = 0;
    int wq_step = 0;
    QpStatus status = QpStatus::Failed;
    int iterations = 0;
    double slack_cl_lo = 0, slack_cl_hi = 0, slack_thm = 0, slack_fr = 0;
    double mismatch = 0;  // max |realized - predicted| over the applied window
};

struct CostBreakdown {
    double injection = 0;
    double tracking = 0;
    double smoothness = 0;
    double slack = 0;
    double total() const { return injection + tracking + smoothness + slack; }
};

struct ControlSolution {
    Trajectory realized;               // driven by the nonlinear model
    Eigen::MatrixXd applied;           // N_s x n_dec, mg/L
    Eigen::MatrixXd predicted;         // (N_s+1) x dim from the per-instant QP predictions
    std::vector<int> dec_boosters;
    std::vector<QpStepLog> log;
    CostBreakdown cost;
    Eigen::VectorXd injected_mass;     // mg per decision booster
    double max_slack() const
    {
        double s = 0;
        for (const auto& l : log)
            s = std::max({s, l.slack_cl_lo, l.slack_cl_hi, l.slack_thm, l.slack_fr});
        return s;
    }
};

struct MpcOptions {
    EngineOptions engine;
    double qp_tol = 1e-7;
    int qp_max_iter = 50000;
    bool linear_plant = false;          // test hook: drive the plant with step_linear
    Eigen::MatrixXd disturbances;       // N_s x n_boosters, reactant injections (known)
    int op_refresh_substeps = 0;        // 0: refresh the linearization every control instant
};

// Receding horizon: at each control instant linearize about the current
// state, build and solve the condensed QP, apply the planned inputs up to
// the next instant to the nonlinear model, advance, repeat.
inline ControlSolution run_mpc(const NetworkTopology& topo, const HydraulicTrace& trace,
                               const DiscretizationPlan& plan, const ReactionParams& params,
                               const WeightSchedule& ws, const ControlProblemSpec& spec,
                               const Eigen::VectorXd& x0, const MpcOptions& opt = {})
{
    spec.validate();
    StateLayout ly(topo, plan);
    const int dim = ly.dimension();
    const int total = trace.steps * plan.substeps;
    const int n_all = static_cast<int>(topo.boosters.size());
    const int n_dec = ws.n_inputs;
    if (x0.size() != dim) throw NumericalError("run_mpc: x0 does not match layout");
    if (ws.w_raw.rows() < trace.steps)
        throw ValidationError("weight schedule does not cover every hydraulic step");

    const int cadence = spec.cadence > 0 ? spec.cadence : plan.substeps;
    const int horizon = spec.horizon > 0 ? spec.horizon : plan.substeps;

    ControlSolution sol;
    sol.dec_boosters = ws.booster_index;
    sol.applied.setZero(total, n_dec);
    sol.predicted.setZero(total + 1, dim);
    sol.predicted.row(0) = x0.transpose();
    sol.injected_mass = Eigen::VectorXd::Zero(n_dec);

    sol.realized.dt = plan.dt;
    sol.realized.steps = total;
    sol.realized.layout = ly;
    sol.realized.states.resize(total + 1, dim);
    sol.realized.states.row(0) = x0.transpose();
    sol.realized.inputs.setZero(total, n_all);

    Eigen::VectorXd x = x0;
    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(n_dec);

    // plant-side matrices, reassembled per hydraulic step
    int plant_hyd = -1;
    SystemMatrices plant;
    OperatingPoint plant_op;  // for the linear-plant test hook
    plant_op.cl = x.segment(0, ly.n_locations);
    plant_op.fr = x.segment(ly.n_locations, ly.n_locations);

    // QP-side linearized matrices, cached per (instant, hydraulic step)
    for (int t0 = 0; t0 < total; t0 += cadence) {
        int instant = t0 / cadence;
        int np = std::min(horizon, total - t0);
        if (np < horizon && t0 + horizon > total)
            warn("prediction horizon truncated to " + std::to_string(np) + " steps at WQ step " +
                 std::to_string(t0));

        OperatingPoint op;
        op.cl = x.segment(0, ly.n_locations);
        op.fr = x.segment(ly.n_locations, ly.n_locations);
        op.time = t0 * plan.dt;

        // assemble the linearized models covering the horizon
        std::map<int, std::unique_ptr<SystemMatrices>> lin;
        std::vector<HorizonStep> steps(np);
        for (int k = 0; k < np; ++k) {
            int wq = t0 + k;
            int hyd = wq / plan.substeps;
            if (!lin.count(hyd))
                lin[hyd] = std::make_unique<SystemMatrices>(
                    assemble_system(topo, trace, plan, params, hyd, ModelMode::Linearized, op, opt.engine));
            steps[k] = {lin[hyd].get(), wq % plan.substeps, hyd};
        }

        Eigen::MatrixXd dist;
        if (opt.disturbances.size() > 0) {
            dist.setZero(np, n_all);
            for (int k = 0; k < np && t0 + k < opt.disturbances.rows(); ++k)
                dist.row(k) = opt.disturbances.row(t0 + k);
        }

        QpInstance inst = build_qp(steps, ws, spec, topo, trace, x, u_prev, dist);
        QpResult qr = solve_qp(inst.qp, opt.qp_tol, opt.qp_max_iter);
        if (qr.status == QpStatus::Failed)
            throw SolverError("QP failed at WQ step " + std::to_string(t0));

        QpStepLog log;
        log.instant = instant;
        log.wq_step = t0;
        log.status = qr.status;
        log.iterations = qr.iterations;
        log.slack_cl_lo = inst.slack_value(qr.z, "cl_lo");
        log.slack_cl_hi = inst.slack_value(qr.z, "cl_hi");
        log.slack_thm = inst.slack_value(qr.z, "thm");
        log.slack_fr = inst.slack_value(qr.z, "fr");

        // apply the plan until the next control instant
        int apply = std::min(cadence, total - t0);
        double mismatch = 0;
        for (int k = 0; k < apply; ++k) {
            int wq = t0 + k;
            int hyd = wq / plan.substeps;
            Eigen::VectorXd u_dec = inst.input_at(qr.z, std::min(k, np - 1));
            for (int j = 0; j < n_dec; ++j)  // hard input bounds, exact
                u_dec[j] = std::min(std::max(u_dec[j], 0.0),
                                    topo.boosters[sol.dec_boosters[j]].umax);
            Eigen::VectorXd u_full = Eigen::VectorXd::Zero(n_all);
            for (int j = 0; j < n_dec; ++j) u_full[sol.dec_boosters[j]] = u_dec[j];
            if (opt.disturbances.size() > 0 && wq < opt.disturbances.rows())
                for (int b = 0; b < n_all; ++b)
                    if (topo.boosters[b].species != Species::Chlorine)
                        u_full[b] += opt.disturbances(wq, b);

            if (hyd != plant_hyd) {
                plant_hyd = hyd;
                if (opt.linear_plant)
                    plant = assemble_system(topo, trace, plan, params, hyd, ModelMode::Linearized,
                                            plant_op, opt.engine);
                else
                    plant = assemble_system(topo, trace, plan, params, hyd, opt.engine);
            }
            plant.set_tank_substep(wq % plan.substeps);
            Eigen::VectorXd xn = opt.linear_plant ? step_linear(x, u_full, plant)
                                                  : step_nonlinear(x, u_full, plant);
            if (!opt.linear_plant)
                for (int i = 0; i < xn.size(); ++i)
                    if (xn[i] < 0) {
                        if (xn[i] < -1e-9) ++sol.realized.deep_negative;
                        xn[i] = 0;
                        ++sol.realized.clamped_negative;
                    }
            x = xn;
            sol.realized.states.row(wq + 1) = x.transpose();
            sol.realized.inputs.row(wq) = u_full.transpose();
            sol.applied.row(wq) = u_dec.transpose();
            sol.predicted.row(wq + 1) = inst.state_at(qr.z, std::min(k + 1, np)).transpose();
            mismatch = std::max(mismatch,
                                (sol.predicted.row(wq + 1) - sol.realized.states.row(wq + 1))
                                    .lpNorm<Eigen::Infinity>());
            for (int j = 0; j < n_dec; ++j) {
                double mass = inst.mass_coeff(std::min(k, np - 1), j) * u_dec[j];
                sol.injected_mass[j] += mass;
                sol.cost.injection += spec.eps_cost * mass;
            }
            u_prev = u_dec;
        }
        log.mismatch = mismatch;
        sol.cost.slack += spec.slack_penalty *
                          (log.slack_cl_lo + log.slack_cl_hi + log.slack_thm + log.slack_fr);
        sol.log.push_back(log);
    }

    // tracking and smoothness of the realized trajectory, for the report
    Eigen::VectorXd u_last = Eigen::VectorXd::Zero(n_dec);
    for (int wq = 0; wq < total; ++wq) {
        int hyd = wq / plan.substeps;
        for (int i = 0; i < dim; ++i) {
            double q = spec.q_scale * ws.q_diag(hyd, i);
            if (q <= 0) continue;
            double dev = sol.realized.states(wq + 1, i) -
                         (i / ly.n_locations == 0 ? spec.x_ref_cl : 0.0);
            sol.cost.tracking += q * dev * dev;
        }
        Eigen::VectorXd du = sol.applied.row(wq).transpose() - u_last;
        for (int j = 0; j < n_dec; ++j)
            sol.cost.smoothness += spec.r_scale * ws.r_diag(hyd, j) * du[j] * du[j];
        u_last = sol.applied.row(wq).transpose();
    }
    return sol;
}

inline std::string serialize_control_inputs(const NetworkTopology& topo, const ControlSolution& sol,
                                            double dt)
{
    std::string out = "time";
    for (int b : sol.dec_boosters) out += " " + topo.boosters[b].id;
    out += "\n";
    for (int k = 0; k < sol.applied.rows(); ++k) {
        out += text::format_g(k * dt);
        for (int j = 0; j < sol.applied.cols(); ++j) out += " " + text::format_g(sol.applied(k, j));
        out += "\n";
    }
    return out;
}

inline std::string serialize_control_summary(const NetworkTopology& topo, const ControlSolution& sol,
                                             const ControlProblemSpec& spec)
{
    const Trajectory& tr = sol.realized;
    const StateLayout& ly = tr.layout;
    long viol_lo = 0, viol_hi = 0, viol_thm = 0;
    // count realized violations at the monitored nodes
    std::vector<int> mon;
    for (int j = 0; j < topo.n_junctions(); ++j) mon.push_back(ly.node_location(j));
    for (int t = 0; t < topo.n_tanks(); ++t) mon.push_back(ly.node_location(topo.node_of_tank(t)));
    for (int k = 1; k <= tr.steps; ++k)
        for (int loc : mon) {
            double cl = tr.states(k, ly.state(Species::Chlorine, loc));
            double th = tr.states(k, ly.state(Species::Thm, loc));
            if (cl < spec.cl_min - 1e-9) ++viol_lo;
            if (cl > spec.cl_max + 1e-9) ++viol_hi;
            if (th > spec.thm_cap + 1e-9) ++viol_thm;
        }
    std::string out;
    out += "injection_cost " + text::format_g(sol.cost.injection) + "\n";
    out += "tracking_cost " + text::format_g(sol.cost.tracking) + "\n";
    out += "smoothness_cost " + text::format_g(sol.cost.smoothness) + "\n";
    out += "slack_cost " + text::format_g(sol.cost.slack) + "\n";
    out += "total_cost " + text::format_g(sol.cost.total()) + "\n";
    out += "max_slack " + text::format_g(sol.max_slack()) + "\n";
    out += "violations_cl_low " + std::to_string(viol_lo) + "\n";
    out += "violations_cl_high " + std::to_string(viol_hi) + "\n";
    out += "violations_thm " + std::to_string(viol_thm) + "\n";
    for (int j = 0; j < sol.injected_mass.size(); ++j)
        out += "injected_mass " + topo.boosters[sol.dec_boosters[j]].id + " " +
               text::format_g(sol.injected_mass[j]) + "\n";
    int solved = 0, maxiter = 0;
    for (const auto& l : sol.log) (l.status == QpStatus::Optimal ? solved : maxiter)++;
    out += "qp_optimal " + std::to_string(solved) + "\n";
    out += "qp_maxiter " + std::to_string(maxiter) + "\n";
    return out;
}

}  // namespace wqnet

#endif
