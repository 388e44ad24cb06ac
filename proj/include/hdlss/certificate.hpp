#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hdlss/dwd.hpp"
#include "hdlss/svm.hpp"

namespace hdlss {

struct CertificateCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

struct CertificateReport {
    std::vector<CertificateCheck> checks;
    bool certified = true;

    void add(const std::string& name, double value, double tolerance) {
        bool ok = value <= tolerance;
        checks.push_back({name, value, tolerance, ok});
        certified = certified && ok;
    }

    std::string summary() const {
        std::ostringstream os;
        os << (certified ? "certified" : "NOT certified");
        for (const auto& c : checks)
            os << "\n  " << (c.ok ? "ok  " : "FAIL") << " " << c.name << " = " << c.value
               << " (tol " << c.tolerance << ")";
        return os.str();
    }
};

/// Recomputes every SVM optimality residual from alpha and the data alone.
/// Certified means: alpha inside the box, the equality constraint holds to
/// 1e-8*C*n, and each sample's KKT condition holds to 1e-6 in functional
/// margin units.
inline CertificateReport certify(const SvmDualSolution& sol, const LabeledDataset& ds) {
    const Eigen::Index n = ds.n();
    const double C = sol.C;
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(ds.label(i));

    CertificateReport rep;
    if (sol.alpha.size() != n) {
        rep.add("alpha length matches n", 1.0, 0.0);
        return rep;
    }

    Eigen::VectorXd w = ds.data() * sol.alpha.cwiseProduct(y);
    Eigen::VectorXd f = ds.data().transpose() * w + Eigen::VectorXd::Constant(n, sol.b);

    double box = std::max(0.0, std::max(-sol.alpha.minCoeff(), sol.alpha.maxCoeff() - C));
    rep.add("dual box violation", box, 1e-8 * std::max(1.0, C));
    rep.add("dual equality |sum(alpha*y)|", std::abs(sol.alpha.dot(y)),
            1e-8 * C * static_cast<double>(n));

    double comp = 0.0;
    double edge = 1e-8 * C;
    for (Eigen::Index i = 0; i < n; ++i) {
        double margin = y[i] * f[i];
        if (sol.alpha[i] <= edge)
            comp = std::max(comp, 1.0 - margin);
        else if (sol.alpha[i] >= C - edge)
            comp = std::max(comp, margin - 1.0);
        else
            comp = std::max(comp, std::abs(margin - 1.0));
    }
    rep.add("KKT complementarity", std::max(comp, 0.0), 1e-6);

    // informational: primal-dual gap (hinge primal vs dual objective)
    double primal = 0.5 * w.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) primal += C * std::max(0.0, 1.0 - y[i] * f[i]);
    double dual = sol.alpha.sum() - 0.5 * w.squaredNorm();
    rep.add("duality gap (informational)", std::max(0.0, primal - dual),
            std::numeric_limits<double>::infinity());
    return rep;
}

/// Recomputes the DWD residuals: primal cone feasibility, dual box and
/// equality, stationarity of the inverse-residual terms, and the duality
/// gap against 2*sum(sqrt(alpha)) - ||sum alpha_i y_i x_i||.
inline CertificateReport certify(const DwdSolution& sol, const LabeledDataset& ds) {
    const Eigen::Index n = ds.n();
    const double C = sol.C;
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(ds.label(i));

    CertificateReport rep;
    Eigen::VectorXd scores = ds.data().transpose() * sol.w + Eigen::VectorXd::Constant(n, sol.b);
    Eigen::VectorXd r = scores.cwiseProduct(y) + sol.xi;

    rep.add("norm violation ||w||-1", std::max(0.0, sol.w.norm() - 1.0), 1e-8);
    rep.add("slack violation -min(xi)", std::max(0.0, -sol.xi.minCoeff()), 1e-10);
    rep.add("residual positivity -min(r)", -r.minCoeff(),
            0.0);  // all r strictly positive
    rep.add("dual box violation",
            std::max(0.0, std::max(-sol.alpha.minCoeff(), sol.alpha.maxCoeff() - C)),
            1e-8 * std::max(1.0, C));
    rep.add("dual equality |sum(alpha*y)|", std::abs(sol.alpha.dot(y)),
            1e-8 * std::max(1.0, C * static_cast<double>(n)));

    double stat = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sol.alpha[i] < C * (1.0 - 1e-6))
            stat = std::max(stat, std::abs(sol.alpha[i] * r[i] * r[i] - 1.0));
    rep.add("stationarity |alpha*r^2-1| (free)", stat, 1e-3);

    double primal = r.cwiseInverse().sum() + C * sol.xi.sum();
    double dual = 2.0 * sol.alpha.array().sqrt().sum() - (ds.data() * sol.alpha.cwiseProduct(y)).norm();
    rep.add("relative duality gap", std::abs(primal - dual) / std::max(1.0, std::abs(primal)),
            1e-6);
    return rep;
}

}  // namespace hdlss
