#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "hdlss/numerics.hpp"
#include "hdlss/socp.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// Distance weighted discrimination:
///
///     minimize    sum_i 1/r_i + C * sum_i xi_i
///     subject to  r_i = y_i (w.x_i + b) + xi_i,  r_i > 0,  xi_i >= 0,
///                 ||w|| <= 1.
///
/// Solved as a second-order cone program: 1/r_i <= eta_i is equivalent to
/// ||(eta_i - r_i, 2)|| <= eta_i + r_i, and the objective becomes
/// sum_i eta_i + C sum_i xi_i. The dual reduces to
///
///     maximize  2 sum_i sqrt(alpha_i) - ||sum_i alpha_i y_i x_i||
///     subject to 0 <= alpha_i <= C,  sum_i y_i alpha_i = 0,
///
/// whose value certifies the duality gap.
struct DwdSolution {
    Eigen::VectorXd w;       // ||w|| <= 1
    double b = 0.0;
    Eigen::VectorXd xi;      // slacks, >= 0 up to solver tolerance
    Eigen::VectorXd r;       // residuals y_i (w.x_i + b) + xi_i, all > 0
    Eigen::VectorXd alpha;   // dual coefficients in [0, C]
    double objective = 0.0;  // primal value sum 1/r_i + C sum xi_i
    double dual_objective = 0.0;
    double rel_gap = 0.0;
    double C = 0.0;
    int iterations = 0;
};

struct DwdSettings {
    enum class Reduce { Auto, Always, Never };
    Reduce reduce = Reduce::Auto;  // Auto reduces when d > n
    SocpSettings socp;             // interior-point tolerances and cap
    double gap_tol = 1e-6;         // acceptance thresholds for the solution
    double feas_tol = 1e-8;
};

namespace dwd_detail {

struct ConicForm {
    Eigen::MatrixXd G;
    Eigen::VectorXd h, c;
    ConeDims dims;
};

inline ConicForm build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C) {
    const Eigen::Index p = X.rows();
    const Eigen::Index n = X.cols();
    const Eigen::Index m = p + 1 + 2 * n;  // variables: w, b, xi, eta
    const Eigen::Index rows = n + 3 * n + (p + 1);

    ConicForm f;
    f.dims.nonneg = n;
    f.dims.soc.assign(static_cast<size_t>(n), 3);
    f.dims.soc.push_back(p + 1);

    f.G = Eigen::MatrixXd::Zero(rows, m);
    f.h = Eigen::VectorXd::Zero(rows);
    f.c = Eigen::VectorXd::Zero(m);

    const Eigen::Index xi0 = p + 1;
    const Eigen::Index eta0 = p + 1 + n;
    f.c.segment(xi0, n).setConstant(C);
    f.c.segment(eta0, n).setOnes();

    // xi_i >= 0
    for (Eigen::Index i = 0; i < n; ++i) f.G(i, xi0 + i) = -1.0;

    // per-sample cones (eta_i + r_i, eta_i - r_i, 2)
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index row = n + 3 * i;
        f.G.block(row, 0, 1, p) = -y[i] * X.col(i).transpose();
        f.G(row, p) = -y[i];
        f.G(row, xi0 + i) = -1.0;
        f.G(row, eta0 + i) = -1.0;

        f.G.block(row + 1, 0, 1, p) = y[i] * X.col(i).transpose();
        f.G(row + 1, p) = y[i];
        f.G(row + 1, xi0 + i) = 1.0;
        f.G(row + 1, eta0 + i) = -1.0;

        f.h[row + 2] = 2.0;
    }

    // ||w|| <= 1
    Eigen::Index row = n + 3 * n;
    f.h[row] = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) f.G(row + 1 + j, j) = -1.0;

    return f;
}

inline double dual_value(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& alpha) {
    return 2.0 * alpha.array().sqrt().sum() - (X * alpha.cwiseProduct(y)).norm();
}

}  // namespace dwd_detail

/// Solves DWD for the dataset; applies the span reduction first when d > n
/// (or always/never per settings). Throws SolverError when the interior
/// point method cannot reach the certified tolerances within its cap.
inline DwdSolution solve_dwd(const LabeledDataset& ds, double C, const DwdSettings& settings = {}) {
    if (C <= 0.0) throw Error(ErrorKind::Data, "solve_dwd: C must be positive");
    ds.require_two_classes();

    bool use_reduction = settings.reduce == DwdSettings::Reduce::Always ||
                         (settings.reduce == DwdSettings::Reduce::Auto && ds.dim() > ds.n());

    ReducedProblem rp;
    const LabeledDataset* work = &ds;
    if (use_reduction) {
        rp = reduce(ds);
        work = &rp.reduced;
    }

    const Eigen::Index p = work->dim();
    const Eigen::Index n = work->n();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(work->label(i));

    dwd_detail::ConicForm f = dwd_detail::build(work->data(), y, C);
    SocpResult sr = solve_socp(f.G, f.h, f.c, f.dims, settings.socp);

    DwdSolution sol;
    sol.C = C;
    sol.iterations = sr.iterations;
    Eigen::VectorXd w_work = sr.x.head(p);
    sol.b = sr.x[p];
    sol.xi = sr.x.segment(p + 1, n);
    sol.r = (work->data().transpose() * w_work + Eigen::VectorXd::Constant(n, sol.b))
                .cwiseProduct(y) +
            sol.xi;
    sol.w = use_reduction ? rp.lift(w_work) : w_work;

    sol.alpha.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index row = n + 3 * i;
        sol.alpha[i] = std::clamp(sr.z[row] - sr.z[row + 1], 0.0, C);
    }

    if ((sol.r.array() <= 0.0).any())
        throw SolverError("solve_dwd: interior point returned a non-positive residual",
                          sr.relgap, sr.pres, sr.dres, sr.iterations);

    sol.objective = sol.r.cwiseInverse().sum() + C * sol.xi.sum();
    sol.dual_objective = dwd_detail::dual_value(work->data(), y, sol.alpha);
    sol.rel_gap = (sol.objective - sol.dual_objective) / std::max(1.0, std::abs(sol.objective));

    double feas_violation = std::max({0.0, sol.w.norm() - 1.0, -sol.xi.minCoeff()});
    if (std::abs(sol.rel_gap) > settings.gap_tol || feas_violation > settings.feas_tol)
        throw SolverError(
            "solve_dwd: tolerances not reached after " + std::to_string(sr.iterations) +
                " iterations (rel gap " + std::to_string(sol.rel_gap) + ", feasibility " +
                std::to_string(feas_violation) + ")",
            sol.rel_gap, sr.pres, sr.dres, sr.iterations);
    return sol;
}

}  // namespace hdlss
