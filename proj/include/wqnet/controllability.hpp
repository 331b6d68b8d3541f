#ifndef WQNET_CONTROLLABILITY_HPP
#define WQNET_CONTROLLABILITY_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <string>
#include <vector>

#include "wqnet/assembly.hpp"
#include "wqnet/stepping.hpp"

namespace wqnet {

enum class TargetCategory { DeadEnd, LowInitialChlorine, HighContaminant, ElevatedThms };

inline const char* target_category_name(TargetCategory c)
{
    switch (c) {
        case TargetCategory::DeadEnd: return "dead-end";
        case TargetCategory::LowInitialChlorine: return "low-initial-chlorine";
        case TargetCategory::HighContaminant: return "high-contaminant";
        case TargetCategory::ElevatedThms: return "elevated-THMs";
    }
    return "?";
}

// Critical set of target states with a priority index. Members are state
// indices into the layout (chlorine states of the named nodes when built
// from a targets file).
struct TargetSet {
    std::string id;
    std::vector<int> members;
    double eta = 1.0;
    TargetCategory category = TargetCategory::DeadEnd;
    std::vector<std::string> member_ids;  // as named in the file, for reports
};

inline void validate_targets(const std::vector<TargetSet>& targets)
{
    double min_eta = std::numeric_limits<double>::infinity();
    for (const auto& t : targets) {
        if (t.members.empty()) throw ValidationError("target set '" + t.id + "' is empty");
        if (!(t.eta > 0)) throw ValidationError("target set '" + t.id + "' needs eta > 0");
        min_eta = std::min(min_eta, t.eta);
    }
    for (const auto& t : targets)
        if (t.category == TargetCategory::ElevatedThms && t.eta > min_eta + 1e-15)
            throw ValidationError("elevated-THMs target set '" + t.id +
                                  "' must carry the lowest priority index");
}

/// [B, AB, A^2 B, ..., A^(Np-1) B].
inline Eigen::MatrixXd controllability_matrix(const SpMat& a, const Eigen::MatrixXd& b, int np)
{
    if (np < 1) throw NumericalError("controllability_matrix: horizon must be >= 1");
    const int n = static_cast<int>(b.rows());
    const int m = static_cast<int>(b.cols());
    Eigen::MatrixXd c(n, np * m);
    Eigen::MatrixXd block = b;
    for (int t = 0; t < np; ++t) {
        c.middleCols(t * m, m) = block;
        if (t + 1 < np) block = a * block;
    }
    return c;
}

/// W_c = sum over tau of A^tau B B^T (A^T)^tau; symmetric PSD.
inline Eigen::MatrixXd gramian(const SpMat& a, const Eigen::MatrixXd& b, int np)
{
    if (np < 1) throw NumericalError("gramian: horizon must be >= 1");
    const int n = static_cast<int>(b.rows());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd block = b;
    for (int t = 0; t < np; ++t) {
        w.noalias() += block * block.transpose();
        if (t + 1 < np) block = a * block;
    }
    return 0.5 * (w + w.transpose());  // exact symmetry against drift
}

/// W_T = C_T W_c C_T^T for a unit-selector target matrix.
inline Eigen::MatrixXd target_gramian(const Eigen::MatrixXd& wc, const std::vector<int>& members)
{
    const int nt = static_cast<int>(members.size());
    Eigen::MatrixXd wt(nt, nt);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nt; ++j) wt(i, j) = wc(members[i], members[j]);
    return wt;
}

/// Rank of a symmetric PSD matrix: eigenvalues above 1e-10 of the largest.
inline int psd_rank(const Eigen::MatrixXd& w, double rel_tol = 1e-10)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
    if (max_ev <= 0) return 0;
    int r = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > rel_tol * max_ev) ++r;
    return r;
}

struct Decomposition {
    Eigen::MatrixXd t;  // orthogonal: T A T^-1 block upper triangular, T B = [B1; 0]
    int k = 0;          // controllable dimension
};

// Controllable/uncontrollable split via an orthonormal basis of the
// reachability span: iterate the image of B under A, re-orthonormalizing
// each power, until the span stops growing. T rows are [basis;
// complement]^T so T^-1 = T^T.
inline Decomposition controllable_decomposition(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                double rel_tol = 1e-10)
{
    const int n = static_cast<int>(a.rows());
    double scale = std::max(b.norm(), 1e-300);
    Eigen::MatrixXd basis(n, 0);
    Eigen::MatrixXd frontier = b;
    for (int power = 0; power < n && basis.cols() < n; ++power) {
        // orthogonalize frontier against the basis, keep new directions
        Eigen::MatrixXd residual = frontier;
        if (basis.cols() > 0) residual -= basis * (basis.transpose() * frontier);
        if (basis.cols() > 0) residual -= basis * (basis.transpose() * residual);  // re-orthogonalize
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeThinU);
        if (svd.singularValues().size() > 0) scale = std::max(scale, svd.singularValues()[0]);
        int added = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > rel_tol * scale) ++added;
        if (added == 0) break;  // span is A-invariant now
        Eigen::MatrixXd nb(n, basis.cols() + added);
        nb << basis, svd.matrixU().leftCols(added);
        basis = nb;
        frontier = a * svd.matrixU().leftCols(added);
    }
    Decomposition d;
    d.k = static_cast<int>(basis.cols());
    // complement via full QR of [basis | I]
    Eigen::MatrixXd t(n, n);
    if (d.k == 0) {
        t.setIdentity();
    } else {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        Eigen::MatrixXd q = qr.householderQ();
        t.leftCols(d.k) = basis;
        t.rightCols(n - d.k) = q.rightCols(n - d.k);
    }
    d.t = t.transpose();
    return d;
}

struct GramianResult {
    std::string booster;
    int step = 0;
    std::string target;
    int rank = 0;
    int target_size = 0;
    bool full_rank = false;
    double trace = 0;       // of W_T, or of the controllable part when deficient
    double trace_norm = 0;  // trace / ||B_j||^2 (input-scaling independent)
};

// Per hydraulic step MPC weights from the prior controllability analysis.
struct WeightSchedule {
    int n_inputs = 0;          // chlorine boosters
    std::vector<int> booster_index;  // into topo.boosters
    Eigen::MatrixXd w_raw;     // steps x n_inputs
    Eigen::MatrixXd r_diag;    // steps x n_inputs, normalized
    Eigen::MatrixXd q_diag;    // steps x dimension
    std::vector<GramianResult> results;
};

enum class WeightMapping { Literal, Inverse };

struct WeightOptions {
    WeightMapping mapping = WeightMapping::Literal;
    double inverse_epsilon = 1e-6;
    double q_target = 10.0;
    double q_base = 1.0;
    double q_scale = 1.0;  // overall Q:R ratio knob
    int horizon = 0;       // N_p in WQ steps; 0 = one hydraulic step
    double rank_tol = 1e-10;
};

// Procedure: per hydraulic step and per booster in isolation, score the
// target sets through the (target) Gramian rank and trace; normalize the
// scores into the R diagonal and build the Q diagonal from the target
// priorities. Tank target states are weighted zero while their tank is
// draining (an emptying tank is uncontrollable).
inline WeightSchedule booster_weights(const NetworkTopology& topo, const HydraulicTrace& trace,
                                      const std::vector<TargetSet>& targets,
                                      const DiscretizationPlan& plan, const ReactionParams& params,
                                      const OperatingPoint& op, const EngineOptions& eopt = {},
                                      const WeightOptions& wopt = {})
{
    validate_targets(targets);
    StateLayout ly(topo, plan);
    WeightSchedule ws;
    for (size_t b = 0; b < topo.boosters.size(); ++b)
        if (topo.boosters[b].species == Species::Chlorine)
            ws.booster_index.push_back(static_cast<int>(b));
    ws.n_inputs = static_cast<int>(ws.booster_index.size());
    if (ws.n_inputs == 0) throw ValidationError("no chlorine boosters to weight");

    const int np = wopt.horizon > 0 ? wopt.horizon : plan.substeps;
    ws.w_raw.setZero(trace.steps, ws.n_inputs);
    ws.r_diag.setZero(trace.steps, ws.n_inputs);
    ws.q_diag.setZero(trace.steps, ly.dimension());

    for (int k = 0; k < trace.steps; ++k) {
        SystemMatrices mats = assemble_system(topo, trace, plan, params, k, ModelMode::Linearized, op, eopt);

        // tank states are uncontrollable targets while draining
        std::vector<char> draining(ly.n_locations, 0);
        for (int t = 0; t < topo.n_tanks(); ++t) {
            double v0 = trace.tank_volume(k, t);
            if (trace.tank_volume_end(topo, k, t) < v0 - 1e-12)
                draining[ly.node_location(topo.node_of_tank(t))] = 1;
        }

        for (int j = 0; j < ws.n_inputs; ++j) {
            Eigen::MatrixXd bj = Eigen::MatrixXd(mats.B).col(ws.booster_index[j]);
            double bnorm2 = bj.squaredNorm();
            Eigen::MatrixXd cmat = controllability_matrix(mats.A, bj, np);
            Eigen::MatrixXd wc = gramian(mats.A, bj, np);
            double w_accum = 0;
            for (const auto& tset : targets) {
                std::vector<int> members;
                for (size_t i = 0; i < tset.members.size(); ++i) {
                    int st = tset.members[i];
                    if (!draining[st % ly.n_locations]) members.push_back(st);
                }
                GramianResult gr;
                gr.booster = topo.boosters[ws.booster_index[j]].id;
                gr.step = k;
                gr.target = tset.id;
                gr.target_size = static_cast<int>(members.size());
                if (members.empty()) {  // whole set draining this step
                    ws.results.push_back(gr);
                    continue;
                }
                Eigen::MatrixXd wt = target_gramian(wc, members);
                int r = psd_rank(wt, wopt.rank_tol);
                gr.rank = r;
                gr.full_rank = r == static_cast<int>(members.size());
                double tr;
                if (gr.full_rank) {
                    tr = wt.trace();
                    w_accum += tset.eta * static_cast<double>(members.size()) * tr;
                } else if (r > 0) {
                    // project the target selector onto the controllable part
                    // spanned by the reachability matrix of (A, B_j)
                    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cmat, Eigen::ComputeThinU);
                    int kc = 0;
                    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
                    for (int i = 0; i < svd.singularValues().size(); ++i)
                        if (svd.singularValues()[i] > wopt.rank_tol * smax) ++kc;
                    Eigen::MatrixXd v = svd.matrixU().leftCols(std::max(kc, 1));
                    Eigen::MatrixXd ct = Eigen::MatrixXd::Zero(members.size(), v.rows());
                    for (size_t i = 0; i < members.size(); ++i) ct(static_cast<int>(i), members[i]) = 1.0;
                    Eigen::MatrixXd ct_proj = ct * v;                       // n_t x k
                    Eigen::MatrixXd w11 = v.transpose() * wc * v;           // controllable-part Gramian
                    Eigen::MatrixXd wt_proj = ct_proj * w11 * ct_proj.transpose();
                    tr = wt_proj.trace();
                    w_accum += tset.eta * static_cast<double>(r) * tr;
                } else {
                    tr = 0;
                }
                gr.trace = tr;
                gr.trace_norm = bnorm2 > 0 ? tr / bnorm2 : 0.0;
                ws.results.push_back(gr);
            }
            ws.w_raw(k, j) = w_accum;
        }

        double total = ws.w_raw.row(k).sum();
        if (total > 0) {
            if (wopt.mapping == WeightMapping::Literal) {
                ws.r_diag.row(k) = ws.w_raw.row(k) / total;
            } else {
                Eigen::VectorXd inv(ws.n_inputs);
                for (int j = 0; j < ws.n_inputs; ++j)
                    inv[j] = 1.0 / (ws.w_raw(k, j) + wopt.inverse_epsilon);
                ws.r_diag.row(k) = inv.transpose() / inv.sum();
            }
        } else {
            ws.r_diag.row(k).setConstant(1.0 / ws.n_inputs);
        }

        // Q diagonal: prioritized chlorine states q_target * eta, all other
        // chlorine states q_base, non-chlorine states zero.
        for (int loc = 0; loc < ly.n_locations; ++loc)
            ws.q_diag(k, ly.state(Species::Chlorine, loc)) = wopt.q_base * wopt.q_scale;
        for (const auto& tset : targets)
            for (int st : tset.members) {
                int loc = st % ly.n_locations;
                double v = draining[loc] ? 0.0 : wopt.q_target * tset.eta * wopt.q_scale;
                ws.q_diag(k, ly.state(Species::Chlorine, loc)) =
                    std::max(ws.q_diag(k, ly.state(Species::Chlorine, loc)), v);
                if (draining[loc]) ws.q_diag(k, ly.state(Species::Chlorine, loc)) = 0.0;
            }
    }
    return ws;
}

// Targets file: [target] blocks with id/eta/category/members lines.
// Members name junctions or tanks; they select chlorine states.
inline std::vector<TargetSet> load_targets(const std::string& path, const NetworkTopology& topo,
                                           const StateLayout& ly)
{
    TextFile f(path);
    std::vector<TargetSet> out;
    TargetSet cur;
    bool open = false;
    auto flush = [&]() {
        if (open) out.push_back(cur);
        cur = TargetSet{};
    };
    for (size_t i = 0; i < f.size(); ++i) {
        const std::string& line = f.line(i);
        if (line == "[target]") {
            flush();
            open = true;
            continue;
        }
        auto toks = text::split_ws(line);
        if (!open || toks.size() < 2) throw ParseError("unexpected line at " + f.where(i));
        if (toks[0] == "id")
            cur.id = toks[1];
        else if (toks[0] == "eta")
            cur.eta = text::parse_double(toks[1], f.where(i));
        else if (toks[0] == "category") {
            if (toks[1] == "dead-end")
                cur.category = TargetCategory::DeadEnd;
            else if (toks[1] == "low-initial-chlorine")
                cur.category = TargetCategory::LowInitialChlorine;
            else if (toks[1] == "high-contaminant")
                cur.category = TargetCategory::HighContaminant;
            else if (toks[1] == "elevated-THMs")
                cur.category = TargetCategory::ElevatedThms;
            else
                throw ParseError("unknown target category '" + toks[1] + "' at " + f.where(i));
        } else if (toks[0] == "members") {
            std::string joined;
            for (size_t t = 1; t < toks.size(); ++t) joined += toks[t];
            for (const auto& id : text::split(joined, ',')) {
                auto n = topo.find_node(id);
                if (!n || topo.node_kind(*n) == NodeKind::Reservoir)
                    throw ValidationError("target member '" + id + "' must be a junction or tank");
                cur.members.push_back(ly.state(Species::Chlorine, ly.node_location(*n)));
                cur.member_ids.push_back(id);
            }
        } else
            throw ParseError("unknown target field '" + toks[0] + "' at " + f.where(i));
    }
    flush();
    validate_targets(out);
    return out;
}

inline std::string serialize_controllability_report(const WeightSchedule& ws)
{
    std::string out = "# booster step target rank target_size full_rank trace trace_norm\n";
    for (const auto& r : ws.results)
        out += r.booster + " " + std::to_string(r.step) + " " + r.target + " " +
               std::to_string(r.rank) + " " + std::to_string(r.target_size) + " " +
               (r.full_rank ? "1" : "0") + " " + text::format_g(r.trace) + " " +
               text::format_g(r.trace_norm) + "\n";
    return out;
}

inline std::string serialize_weights(const WeightSchedule& ws)
{
    std::string out = "n_inputs " + std::to_string(ws.n_inputs) + "\nsteps " +
                      std::to_string(ws.w_raw.rows()) + "\ndimension " +
                      std::to_string(ws.q_diag.cols()) + "\n";
    for (int k = 0; k < ws.w_raw.rows(); ++k) {
        out += "w " + std::to_string(k);
        for (int j = 0; j < ws.n_inputs; ++j) out += " " + text::format_g(ws.w_raw(k, j));
        out += "\nr " + std::to_string(k);
        for (int j = 0; j < ws.n_inputs; ++j) out += " " + text::format_g(ws.r_diag(k, j));
        out += "\nq " + std::to_string(k);
        for (int i = 0; i < ws.q_diag.cols(); ++i) out += " " + text::format_g(ws.q_diag(k, i));
        out += "\n";
    }
    return out;
}

inline WeightSchedule load_weights(const std::string& path)
{
    TextFile f(path);
    WeightSchedule ws;
    int steps = 0, dim = 0;
    size_t i = 0;
    for (; i < f.size(); ++i) {
        auto toks = text::split_ws(f.line(i));
        if (toks[0] == "n_inputs")
            ws.n_inputs = static_cast<int>(text::parse_int(toks.at(1), f.where(i)));
        else if (toks[0] == "steps")
            steps = static_cast<int>(text::parse_int(toks.at(1), f.where(i)));
        else if (toks[0] == "dimension") {
            dim = static_cast<int>(text::parse_int(toks.at(1), f.where(i)));
            ++i;
            break;
        } else
            throw ParseError("unexpected weights header at " + f.where(i));
    }
    ws.w_raw.setZero(steps, ws.n_inputs);
    ws.r_diag.setZero(steps, ws.n_inputs);
    ws.q_diag.setZero(steps, dim);
    for (; i < f.size(); ++i) {
        auto toks = text::split_ws(f.line(i));
        int k = static_cast<int>(text::parse_int(toks.at(1), f.where(i)));
        Eigen::MatrixXd* dst = toks[0] == "w" ? &ws.w_raw : toks[0] == "r" ? &ws.r_diag : &ws.q_diag;
        if (static_cast<int>(toks.size()) - 2 != dst->cols())
            throw ParseError("weights row width mismatch at " + f.where(i));
        for (int c = 0; c < dst->cols(); ++c)
            (*dst)(k, c) = text::parse_double(toks[c + 2], f.where(i));
    }
    return ws;
}

}  // namespace wqnet

#endif
