#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "hdlss/certificate.hpp"
#include "hdlss/dwd.hpp"
#include "hdlss/numerics.hpp"
#include "hdlss/svm.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

struct MaskRect {
    int row_min = 0, row_max = 0, col_min = 0, col_max = 0;
};

/// Linear classification rule: unit direction w plus intercept b.
/// predict(x) = sign(w.x + b) with sign(0) = +1. Every fit orients the rule
/// so the mean training score of class +1 is >= that of class -1, which
/// puts "male" on the right in all projection plots.
struct LinearRule {
    Eigen::VectorXd w;  // ||w|| = 1
    double b = 0.0;
    Method method = Method::MeanDiff;

    // training metadata
    double C = 0.0;  // 0 when the method has no penalty parameter
    Eigen::Index n = 0, n1 = 0, n2 = 0;
    std::optional<MaskRect> mask;

    double score(const Eigen::VectorXd& x) const {
        if (x.size() != w.size())
            throw Error(ErrorKind::Dimension, "score: sample dimension mismatch");
        return w.dot(x) + b;
    }

    Eigen::VectorXd scores(const Eigen::MatrixXd& samples) const {
        if (samples.rows() != w.size())
            throw Error(ErrorKind::Dimension, "scores: sample dimension mismatch");
        return (samples.transpose() * w).array() + b;
    }

    int predict_one(const Eigen::VectorXd& x) const { return score(x) >= 0.0 ? 1 : -1; }

    Eigen::VectorXi predict(const Eigen::MatrixXd& samples) const {
        Eigen::VectorXd s = scores(samples);
        Eigen::VectorXi out(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.0 ? 1 : -1;
        return out;
    }
};

namespace classify_detail {

inline void fill_meta(LinearRule& rule, const LabeledDataset& ds) {
    rule.n = ds.n();
    rule.n1 = ds.n1();
    rule.n2 = ds.n2();
}

/// Normalizes to a unit direction (rescaling b by the same factor so the
/// score ordering is untouched) and applies the orientation convention.
inline LinearRule finish(Eigen::VectorXd w, double b, Method method, const LabeledDataset& ds) {
    double norm = w.norm();
    if (!(norm > 0.0) || !w.allFinite())
        throw Error(ErrorKind::Degenerate,
                    method_name(method) + ": fit produced a zero or non-finite direction");
    LinearRule rule;
    rule.w = w / norm;
    rule.b = b / norm;
    rule.method = method;
    fill_meta(rule, ds);

    Eigen::VectorXd s = rule.scores(ds.data());
    double mean1 = 0.0, mean2 = 0.0;
    for (Eigen::Index k = 0; k < ds.n(); ++k)
        (ds.label(k) == 1 ? mean1 : mean2) += s[k];
    mean1 /= static_cast<double>(ds.n1());
    mean2 /= static_cast<double>(ds.n2());
    if (mean1 < mean2) {
        rule.w = -rule.w;
        rule.b = -rule.b;
    }
    return rule;
}

/// Direction S^+ (mean1 - mean2) computed through the thin SVD of the
/// centered-column factor A with S = A A^T / divisor, so HDLSS fits never
/// materialize a d x d matrix. The scalar divisor cancels in the direction.
inline Eigen::VectorXd pinv_scatter_times(const Eigen::MatrixXd& centered,
                                          const Eigen::VectorXd& delta) {
    SvdFactors f = svd(centered);
    if (f.rank == 0) return Eigen::VectorXd::Zero(delta.size());
    Eigen::VectorXd coeff = f.U.transpose() * delta;
    coeff.array() /= f.sigma.array().square();
    return f.U * coeff;
}

}  // namespace classify_detail

/// Fisher's linear discriminant with the Moore-Penrose pseudo-inverse of
/// the pooled within-class scatter: w ~ W^+ (mean1 - mean2),
/// b = -w.(mean1 + mean2)/2.
inline LinearRule fit_fld(const LabeledDataset& ds) {
    ds.require_two_classes();
    Eigen::VectorXd m1 = ds.class_mean(1), m2 = ds.class_mean(-1);

    Eigen::MatrixXd centered(ds.dim(), ds.n());
    for (Eigen::Index k = 0; k < ds.n(); ++k)
        centered.col(k) = ds.data().col(k) - (ds.label(k) == 1 ? m1 : m2);

    Eigen::VectorXd w = classify_detail::pinv_scatter_times(centered, m1 - m2);
    if (w.norm() <= 1e-14 * std::max(1.0, (m1 - m2).norm()))
        throw Error(ErrorKind::Degenerate,
                    "fld: pseudo-inverse scatter maps the mean difference to zero");
    double b = -w.dot((m1 + m2) / 2.0);
    return classify_detail::finish(std::move(w), b, Method::Fld, ds);
}

/// Maximal data piling direction: same construction as FLD with the overall
/// covariance in place of the within-class scatter. In HDLSS settings each
/// class projects onto (numerically) a single point.
inline LinearRule fit_mdp(const LabeledDataset& ds) {
    ds.require_two_classes();
    Eigen::VectorXd m1 = ds.class_mean(1), m2 = ds.class_mean(-1);
    Eigen::VectorXd mean = ds.overall_mean();

    Eigen::MatrixXd centered = ds.data().colwise() - mean;
    Eigen::VectorXd w = classify_detail::pinv_scatter_times(centered, m1 - m2);
    if (w.norm() <= 1e-14 * std::max(1.0, (m1 - m2).norm()))
        throw Error(ErrorKind::Degenerate,
                    "mdp: pseudo-inverse covariance maps the mean difference to zero");
    double b = -w.dot((m1 + m2) / 2.0);
    return classify_detail::finish(std::move(w), b, Method::Mdp, ds);
}

/// First principal component of the column-centered data, oriented by the
/// class convention (PCA alone is sign-ambiguous). b places the decision
/// point at the overall mean.
inline LinearRule fit_pca_direction(const LabeledDataset& ds) {
    if (ds.n() < 2) throw Error(ErrorKind::Data, "pca: needs at least 2 samples");
    ds.require_two_classes();
    Eigen::VectorXd mean = ds.overall_mean();
    Eigen::MatrixXd centered = ds.data().colwise() - mean;
    SvdFactors f = svd(centered);
    if (f.rank == 0) throw Error(ErrorKind::Degenerate, "pca: zero-variance data");
    Eigen::VectorXd w = f.U.col(0);
    double b = -w.dot(mean);
    return classify_detail::finish(std::move(w), b, Method::Pca, ds);
}

/// Baseline mean-difference rule (not one of the compared methods; used as
/// plumbing by tests).
inline LinearRule fit_mean_diff(const LabeledDataset& ds) {
    ds.require_two_classes();
    Eigen::VectorXd m1 = ds.class_mean(1), m2 = ds.class_mean(-1);
    Eigen::VectorXd w = m1 - m2;
    if (w.norm() == 0.0)
        throw Error(ErrorKind::Degenerate, "mean-diff: identical class means");
    double b = -w.dot((m1 + m2) / 2.0);
    return classify_detail::finish(std::move(w), b, Method::MeanDiff, ds);
}

/// Soft-margin SVM rule. The dual solve works on the Gram matrix, so no
/// explicit span reduction is needed; the certificate must pass.
inline LinearRule fit_svm(const LabeledDataset& ds, double C = 1000.0,
                          const SvmSettings& settings = {}) {
    SvmDualSolution sol = solve_svm_dual(ds, C, settings);
    CertificateReport rep = certify(sol, ds);
    if (!rep.certified)
        throw SolverError("svm: certificate failed\n" + rep.summary(), 0.0, 0.0,
                          sol.kkt_residual, sol.updates);
    LinearRule rule = classify_detail::finish(sol.w, sol.b, Method::Svm, ds);
    rule.C = C;
    return rule;
}

/// DWD rule at penalty C (the paper's default is 100); the certificate must
/// pass.
inline LinearRule fit_dwd(const LabeledDataset& ds, double C = 100.0,
                          const DwdSettings& settings = {}) {
    DwdSolution sol = solve_dwd(ds, C, settings);
    CertificateReport rep = certify(sol, ds);
    if (!rep.certified)
        throw SolverError("dwd: certificate failed\n" + rep.summary(), sol.rel_gap, 0.0, 0.0,
                          sol.iterations);
    LinearRule rule = classify_detail::finish(sol.w, sol.b, Method::Dwd, ds);
    rule.C = C;
    return rule;
}

inline LinearRule fit(const LabeledDataset& ds, Method method, double C = -1.0) {
    switch (method) {
        case Method::Dwd: return fit_dwd(ds, C > 0 ? C : 100.0);
        case Method::Svm: return fit_svm(ds, C > 0 ? C : 1000.0);
        case Method::Fld: return fit_fld(ds);
        case Method::Mdp: return fit_mdp(ds);
        case Method::Pca: return fit_pca_direction(ds);
        case Method::MeanDiff: return fit_mean_diff(ds);
    }
    throw Error(ErrorKind::Config, "fit: unknown method");
}

/// Fits on the mask-restricted rows and embeds the direction back into R^d
/// with zeros off-mask, so scoring a full image vector equals scoring its
/// restriction. Rules from disjoint masks are exactly orthogonal.
inline LinearRule fit_region(const LabeledDataset& ds, const RegionMask& mask, Method method,
                             double C = -1.0) {
    if (mask.size() < 1) throw Error(ErrorKind::Data, "fit_region: empty mask");
    LabeledDataset sub = restrict(ds, mask);
    LinearRule inner = fit(sub, method, C);

    LinearRule rule = inner;
    rule.w = Eigen::VectorXd::Zero(ds.dim());
    for (size_t k = 0; k < mask.size(); ++k)
        rule.w[mask.indices()[k]] = inner.w[static_cast<Eigen::Index>(k)];
    rule.mask = MaskRect{mask.row_min(), mask.row_max(), mask.col_min(), mask.col_max()};
    return rule;
}

}  // namespace hdlss
