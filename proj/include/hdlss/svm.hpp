#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hdlss/dataset.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// Solution of the soft-margin SVM dual
///     maximize  sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j <x_i, x_j>
///     s.t.      0 <= alpha_i <= C,  sum_i alpha_i y_i = 0.
struct SvmDualSolution {
    Eigen::VectorXd alpha;
    Eigen::VectorXd w;       // sum_i alpha_i y_i x_i
    double b = 0.0;
    double objective = 0.0;  // dual objective value
    double kkt_residual = 0.0;
    long updates = 0;        // pair updates spent
    double C = 0.0;
};

struct SvmSettings {
    double tolerance = 1e-9;     // stop when the max KKT violation drops below this
    long max_updates = 1000000;  // pair-update cap
};

/// Sequential minimal optimization with maximal-violating-pair selection.
/// Gradient caching makes each pair update O(n); only the Gram matrix is
/// touched, so the cost is independent of the ambient dimension.
inline SvmDualSolution solve_svm_dual(const LabeledDataset& ds, double C,
                                      const SvmSettings& settings = {}) {
    if (C <= 0.0) throw Error(ErrorKind::Data, "solve_svm_dual: C must be positive");
    ds.require_two_classes();

    const Eigen::Index n = ds.n();
    const Eigen::MatrixXd K = ds.data().transpose() * ds.data();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(ds.label(i));

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    // grad_i = d/dalpha_i of the negated objective = (Q alpha)_i - 1
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

    auto in_up = [&](Eigen::Index i) {
        return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0);
    };
    auto in_low = [&](Eigen::Index i) {
        return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C);
    };

    long updates = 0;
    double violation = std::numeric_limits<double>::infinity();
    while (true) {
        // maximal violating pair
        Eigen::Index i = -1, j = -1;
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
            double v = -y[k] * grad[k];
            if (in_up(k) && v > up_max) {
                up_max = v;
                i = k;
            }
            if (in_low(k) && v < low_min) {
                low_min = v;
                j = k;
            }
        }
        violation = up_max - low_min;
        if (i < 0 || j < 0 || violation <= settings.tolerance) break;
        if (updates >= settings.max_updates)
            throw SolverError("solve_svm_dual: update cap reached before KKT tolerance "
                              "(violation " + std::to_string(violation) + ")",
                              violation, 0.0, violation, updates);

        // two-variable subproblem on (i, j), preserving alpha'y = 0
        double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
        quad = std::max(quad, 1e-12);
        double delta = (-y[i] * grad[i] + y[j] * grad[j]) / quad;

        // clip so both variables stay inside [0, C]
        double ai_old = alpha[i], aj_old = alpha[j];
        double di = y[i] * delta, dj = -y[j] * delta;
        double scale = 1.0;
        auto limit = [&](double a, double d) {
            if (d > 0) return (C - a) / d;
            if (d < 0) return -a / d;
            return std::numeric_limits<double>::infinity();
        };
        scale = std::min({1.0, limit(ai_old, di), limit(aj_old, dj)});
        alpha[i] = ai_old + scale * di;
        alpha[j] = aj_old + scale * dj;
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        double dai = alpha[i] - ai_old, daj = alpha[j] - aj_old;
        grad += (dai * y[i]) * (y.cwiseProduct(K.col(i))) + (daj * y[j]) * (y.cwiseProduct(K.col(j)));
        ++updates;
    }

    SvmDualSolution sol;
    sol.alpha = alpha;
    sol.C = C;
    sol.w = ds.data() * alpha.cwiseProduct(y);
    sol.updates = updates;
    sol.objective = alpha.sum() - 0.5 * alpha.cwiseProduct(y).dot(K * alpha.cwiseProduct(y));
    sol.kkt_residual = std::max(violation, 0.0);

    // Intercept: average over free support vectors; with none, midpoint of
    // the interval the bound constraints leave feasible.
    Eigen::VectorXd fx = ds.data().transpose() * sol.w;
    double bound_margin = 1e-8 * C;
    double sum = 0.0;
    Eigen::Index free_count = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (alpha[k] > bound_margin && alpha[k] < C - bound_margin) {
            sum += y[k] - fx[k];
            ++free_count;
        }
    }
    if (free_count > 0) {
        sol.b = sum / static_cast<double>(free_count);
    } else {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
            bool at_zero = alpha[k] <= bound_margin;
            double edge = y[k] - fx[k];
            // y=+1 at 0 or y=-1 at C give lower bounds on b; the mirrored
            // cases give upper bounds.
            bool lower = (y[k] > 0) == at_zero;
            if (lower)
                lo = std::max(lo, edge);
            else
                hi = std::min(hi, edge);
        }
        if (std::isfinite(lo) && std::isfinite(hi))
            sol.b = 0.5 * (lo + hi);
        else if (std::isfinite(lo))
            sol.b = lo;
        else if (std::isfinite(hi))
            sol.b = hi;
    }
    return sol;
}

}  // namespace hdlss
