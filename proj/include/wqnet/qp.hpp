#ifndef WQNET_QP_HPP
#define WQNET_QP_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>
#include <limits>
#include <string>
#include <vector>

#include "wqnet/common.hpp"

namespace wqnet {

// Convex QP in the two-sided form
//   minimize 0.5 z' P z + g' z   subject to  lo <= A z <= hi,
// with P symmetric PSD. Simple bounds enter as identity rows of A.
struct QpProblem {
    Eigen::MatrixXd p;
    Eigen::VectorXd g;
    Eigen::MatrixXd a;
    Eigen::VectorXd lo, hi;

    int vars() const { return static_cast<int>(p.rows()); }
    int cons() const { return static_cast<int>(a.rows()); }
};

enum class QpStatus { Optimal, MaxIter, Failed };

struct QpResult {
    Eigen::VectorXd z;   // primal solution
    Eigen::VectorXd y;   // constraint multipliers (positive pushes on hi, negative on lo)
    QpStatus status = QpStatus::Failed;
    int iterations = 0;
    double r_stationarity = 0;
    double r_primal = 0;
    double r_complementarity = 0;
    bool polished = false;
};

namespace qp_detail {

struct Residuals {
    double stat, prim, comp;
};

inline Residuals kkt_residuals(const QpProblem& qp, const Eigen::VectorXd& z, const Eigen::VectorXd& y)
{
    Eigen::VectorXd az = qp.a * z;
    Eigen::VectorXd stat = qp.p * z + qp.g + qp.a.transpose() * y;
    double sden = std::max({1.0, (qp.p * z).lpNorm<Eigen::Infinity>(), qp.g.lpNorm<Eigen::Infinity>(),
                            (qp.a.transpose() * y).lpNorm<Eigen::Infinity>()});
    double prim = 0, comp = 0;
    for (int i = 0; i < az.size(); ++i) {
        prim = std::max(prim, std::max(qp.lo[i] - az[i], az[i] - qp.hi[i]));
        double slack_hi = std::isfinite(qp.hi[i]) ? qp.hi[i] - az[i] : std::numeric_limits<double>::infinity();
        double slack_lo = std::isfinite(qp.lo[i]) ? az[i] - qp.lo[i] : std::numeric_limits<double>::infinity();
        if (y[i] > 0 && std::isfinite(slack_hi)) comp = std::max(comp, y[i] * std::abs(slack_hi));
        if (y[i] < 0 && std::isfinite(slack_lo)) comp = std::max(comp, -y[i] * std::abs(slack_lo));
    }
    double pden = std::max(1.0, az.lpNorm<Eigen::Infinity>());
    return {stat.lpNorm<Eigen::Infinity>() / sden, std::max(prim, 0.0) / pden, comp / pden};
}

// Equality solve on the predicted active set; exact KKT point when the
// guess is right.
inline bool polish(const QpProblem& qp, const Eigen::VectorXd& z_admm, const Eigen::VectorXd& y_admm,
                   double tol, QpResult& out)
{
    const int n = qp.vars(), m = qp.cons();
    Eigen::VectorXd az = qp.a * z_admm;
    std::vector<int> act;
    std::vector<double> rhs_act;
    std::vector<int> side;  // -1 low, +1 high
    for (int i = 0; i < m; ++i) {
        double gap_lo = std::isfinite(qp.lo[i]) ? az[i] - qp.lo[i] : 1e300;
        double gap_hi = std::isfinite(qp.hi[i]) ? qp.hi[i] - az[i] : 1e300;
        double scale = std::max({1.0, std::abs(qp.lo[i]) < 1e300 ? std::abs(qp.lo[i]) : 0.0,
                                 std::abs(qp.hi[i]) < 1e300 ? std::abs(qp.hi[i]) : 0.0});
        if (y_admm[i] < -tol || gap_lo < 1e-6 * scale) {
            if (std::isfinite(qp.lo[i]) && (y_admm[i] <= 0 || gap_lo <= gap_hi)) {
                act.push_back(i);
                rhs_act.push_back(qp.lo[i]);
                side.push_back(-1);
                continue;
            }
        }
        if (y_admm[i] > tol || gap_hi < 1e-6 * scale) {
            if (std::isfinite(qp.hi[i])) {
                act.push_back(i);
                rhs_act.push_back(qp.hi[i]);
                side.push_back(+1);
            }
        }
    }
    const int k = static_cast<int>(act.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = qp.p + 1e-12 * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < k; ++i) {
        kkt.block(n + i, 0, 1, n) = qp.a.row(act[i]);
        kkt.block(0, n + i, n, 1) = qp.a.row(act[i]).transpose();
        kkt(n + i, n + i) = -1e-12;
    }
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -qp.g;
    for (int i = 0; i < k; ++i) rhs[n + i] = rhs_act[i];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
    Eigen::VectorXd sol = lu.solve(rhs);
    // one round of iterative refinement
    Eigen::VectorXd resid = rhs - kkt * sol;
    sol += lu.solve(resid);

    Eigen::VectorXd z = sol.head(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    bool sign_ok = true;
    for (int i = 0; i < k; ++i) {
        double lam = sol[n + i];
        if (side[i] < 0 && lam > tol) sign_ok = false;
        if (side[i] > 0 && lam < -tol) sign_ok = false;
        y[act[i]] = lam;
    }
    if (!sign_ok) return false;
    auto r = kkt_residuals(qp, z, y);
    if (r.stat <= tol && r.prim <= tol && r.comp <= tol) {
        out.z = z;
        out.y = y;
        out.r_stationarity = r.stat;
        out.r_primal = r.prim;
        out.r_complementarity = r.comp;
        out.polished = true;
        return true;
    }
    return false;
}

}  // namespace qp_detail

// Operator-splitting solver with a direct equality polish. Deterministic:
// fixed parameter schedule, no randomization. Returns the best iterate
// with status MaxIter when the tolerance is not reached.
inline QpResult solve_qp(const QpProblem& qp, double tol = 1e-7, int max_iter = 20000)
{
    const int n = qp.vars(), m = qp.cons();
    if (qp.g.size() != n || qp.a.cols() != n || qp.lo.size() != m || qp.hi.size() != m)
        throw SolverError("solve_qp: inconsistent dimensions");
    for (int i = 0; i < m; ++i)
        if (qp.lo[i] > qp.hi[i]) throw SolverError("solve_qp: crossed bounds at row " + std::to_string(i));

    QpResult res;
    if (n == 0) {
        res.status = QpStatus::Optimal;
        return res;
    }

    const double sigma = 1e-6;
    const double alpha = 1.6;
    double rho = 0.1;

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i)
        zeta[i] = std::min(std::max(0.0, qp.lo[i]), qp.hi[i]);

    auto factor = [&](double r) {
        Eigen::MatrixXd mmat = qp.p + sigma * Eigen::MatrixXd::Identity(n, n) +
                               r * qp.a.transpose() * qp.a;
        return Eigen::LLT<Eigen::MatrixXd>(mmat);
    };
    Eigen::LLT<Eigen::MatrixXd> llt = factor(rho);
    if (llt.info() != Eigen::Success) throw SolverError("solve_qp: Hessian factorization failed");

    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd rhs = sigma * z - qp.g + qp.a.transpose() * (rho * zeta - y);
        Eigen::VectorXd zt = llt.solve(rhs);
        Eigen::VectorXd azt = qp.a * zt;
        Eigen::VectorXd zeta_prev = zeta;
        z = alpha * zt + (1 - alpha) * z;
        Eigen::VectorXd v = alpha * azt + (1 - alpha) * zeta_prev + y / rho;
        zeta = v.cwiseMax(qp.lo).cwiseMin(qp.hi);
        y += rho * (alpha * azt + (1 - alpha) * zeta_prev - zeta);

        if ((it + 1) % 25 == 0 || it + 1 == max_iter) {
            auto r = qp_detail::kkt_residuals(qp, z, y);
            if (r.stat <= 10 * tol && r.prim <= 10 * tol) {
                if (qp_detail::polish(qp, z, y, tol, res)) {
                    res.status = QpStatus::Optimal;
                    res.iterations = it + 1;
                    return res;
                }
            }
            if (r.stat <= tol && r.prim <= tol && r.comp <= tol) {
                res.z = z;
                res.y = y;
                res.status = QpStatus::Optimal;
                res.iterations = it + 1;
                res.r_stationarity = r.stat;
                res.r_primal = r.prim;
                res.r_complementarity = r.comp;
                return res;
            }
            // deterministic rho schedule
            if ((it + 1) % 1000 == 0 && r.prim > 10 * r.stat) {
                rho = std::min(rho * 5, 1e4);
                llt = factor(rho);
            } else if ((it + 1) % 1000 == 0 && r.stat > 10 * r.prim) {
                rho = std::max(rho / 5, 1e-6);
                llt = factor(rho);
            }
        }
    }
    auto r = qp_detail::kkt_residuals(qp, z, y);
    res.z = z;
    res.y = y;
    res.status = QpStatus::MaxIter;
    res.iterations = it;
    res.r_stationarity = r.stat;
    res.r_primal = r.prim;
    res.r_complementarity = r.comp;
    return res;
}

/// Smallest eigenvalue, for the PSD checks on QP Hessians.
inline double min_eigenvalue(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

}  // namespace wqnet

#endif
