// Brute-force reference solvers used by the tests. They share no code with
// the implementations they check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "hdlss/dataset.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// SVM dual by KKT enumeration: every point is assigned Free / at-0 / at-C,
// the equality-constrained system is solved on the free set, and the KKT
// sign conditions are verified. The best feasible stationary objective is
// the optimum (the dual is concave). Exponential in n; use for n <= 6.
// ---------------------------------------------------------------------------
inline std::optional<double> svm_dual_objective_enumerated(const hdlss::LabeledDataset& ds,
                                                           double C) {
    const Eigen::Index n = ds.n();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(ds.label(i));
    Eigen::MatrixXd K = ds.data().transpose() * ds.data();
    Eigen::MatrixXd Q = K.cwiseProduct(y * y.transpose());

    const double tol = 1e-7;
    double best = -std::numeric_limits<double>::infinity();

    long patterns = 1;
    for (Eigen::Index i = 0; i < n; ++i) patterns *= 3;

    for (long code = 0; code < patterns; ++code) {
        std::vector<int> state(n);  // 0 free, 1 at zero, 2 at C
        long c = code;
        for (Eigen::Index i = 0; i < n; ++i) {
            state[i] = static_cast<int>(c % 3);
            c /= 3;
        }

        std::vector<Eigen::Index> free;
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] == 0) free.push_back(i);
            if (state[i] == 2) alpha[i] = C;
        }

        double mu = 0.0;
        if (!free.empty()) {
            Eigen::Index f = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd kkt(f + 1, f + 1);
            Eigen::VectorXd rhs(f + 1);
            for (Eigen::Index a = 0; a < f; ++a) {
                for (Eigen::Index b = 0; b < f; ++b) kkt(a, b) = Q(free[a], free[b]);
                kkt(a, f) = y[free[a]];
                kkt(f, a) = y[free[a]];
                double capped = 0.0;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (state[i] == 2) capped += Q(free[a], i) * C;
                rhs[a] = 1.0 - capped;
            }
            kkt(f, f) = 0.0;
            double cap_y = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (state[i] == 2) cap_y += y[i] * C;
            rhs[f] = -cap_y;

            Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
            if ((kkt * sol - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) continue;
            for (Eigen::Index a = 0; a < f; ++a) alpha[free[a]] = sol[a];
            mu = sol[f];
        } else {
            if (std::abs(alpha.dot(y)) > tol) continue;
            // need a multiplier making every sign condition hold; scan the
            // feasible interval for mu implied by the bound states
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            Eigen::VectorXd g = Eigen::VectorXd::Ones(n) - Q * alpha;
            for (Eigen::Index i = 0; i < n; ++i) {
                // at zero: g_i - mu*y_i <= 0 ; at C: >= 0
                if (state[i] == 1) {
                    if (y[i] > 0) lo = std::max(lo, g[i]);
                    else hi = std::min(hi, -g[i]);
                } else {
                    if (y[i] > 0) hi = std::min(hi, g[i]);
                    else lo = std::max(lo, -g[i]);
                }
            }
            if (lo > hi) continue;
            mu = std::clamp(0.0, lo, hi);
        }

        // box feasibility
        bool ok = true;
        for (Eigen::Index i = 0; i < n; ++i)
            if (alpha[i] < -tol || alpha[i] > C + tol) ok = false;
        if (!ok) continue;
        if (std::abs(alpha.dot(y)) > tol * std::max(1.0, C)) continue;

        // sign conditions at the bounds
        Eigen::VectorXd g = Eigen::VectorXd::Ones(n) - Q * alpha;
        for (Eigen::Index i = 0; i < n; ++i) {
            double red = g[i] - mu * y[i];
            if (state[i] == 1 && red > tol) ok = false;
            if (state[i] == 2 && red < -tol) ok = false;
        }
        if (!ok) continue;

        double obj = alpha.sum() - 0.5 * alpha.dot(Q * alpha);
        best = std::max(best, obj);
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

// ---------------------------------------------------------------------------
// DWD in 2-D by grid search over the direction angle and the intercept,
// with the per-point slack eliminated in closed form: the first-order
// condition 1/r^2 = C puts the slacked residual at 1/sqrt(C), so a point
// with margin m contributes 1/m if m >= 1/sqrt(C) and 2*sqrt(C) - C*m
// otherwise. Coarse scan plus local refinement.
// ---------------------------------------------------------------------------
struct DwdGridSolution {
    double theta = 0.0;
    double b = 0.0;
    double objective = 0.0;
};

inline double dwd_point_cost(double margin, double C) {
    double knee = 1.0 / std::sqrt(C);
    return margin >= knee ? 1.0 / margin : 2.0 * std::sqrt(C) - C * margin;
}

inline DwdGridSolution dwd_grid_oracle_2d(const hdlss::LabeledDataset& ds, double C) {
    const Eigen::Index n = ds.n();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(ds.label(i));

    auto objective = [&](double theta, double b) {
        Eigen::Vector2d w(std::cos(theta), std::sin(theta));
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            total += dwd_point_cost(y[i] * (w.dot(ds.data().col(i)) + b), C);
        return total;
    };

    double b_span = ds.data().colwise().norm().maxCoeff() + 1.0;

    DwdGridSolution best;
    best.objective = std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * std::numbers::pi;

    for (int it = 0; it < 1200; ++it) {
        double theta = two_pi * it / 1200.0;
        for (int ib = 0; ib <= 240; ++ib) {
            double b = -b_span + 2.0 * b_span * ib / 240.0;
            double obj = objective(theta, b);
            if (obj < best.objective) best = {theta, b, obj};
        }
    }

    double dt = two_pi / 1200.0, db = 2.0 * b_span / 240.0;
    for (int round = 0; round < 4; ++round) {
        DwdGridSolution center = best;
        for (int it = -20; it <= 20; ++it) {
            for (int ib = -20; ib <= 20; ++ib) {
                double theta = center.theta + dt * it / 10.0;
                double b = center.b + db * ib / 10.0;
                double obj = objective(theta, b);
                if (obj < best.objective) best = {theta, b, obj};
            }
        }
        dt /= 10.0;
        db /= 10.0;
    }
    return best;
}

inline double angle_difference(double a, double b) {
    double two_pi = 2.0 * std::numbers::pi;
    double diff = std::fmod(std::abs(a - b), two_pi);
    return std::min(diff, two_pi - diff);
}

// ---------------------------------------------------------------------------
// Fisher ratio of a direction: squared mean gap over pooled within-class
// variance of the projections. Used to check FLD against random sampling.
// ---------------------------------------------------------------------------
inline double fisher_ratio(const hdlss::LabeledDataset& ds, const Eigen::VectorXd& w) {
    Eigen::VectorXd s = ds.data().transpose() * w;
    double m1 = 0, m2 = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) (ds.label(i) == 1 ? m1 : m2) += s[i];
    m1 /= static_cast<double>(ds.n1());
    m2 /= static_cast<double>(ds.n2());
    double ss = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        double c = s[i] - (ds.label(i) == 1 ? m1 : m2);
        ss += c * c;
    }
    ss /= static_cast<double>(ds.n() - 2);
    return (m1 - m2) * (m1 - m2) / ss;
}

}  // namespace oracles
