#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <limits>
#include <utility>

#include "hdlss/dataset.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// Rank-truncated thin SVD: M = U * diag(sigma) * V^T with sigma sorted
/// non-increasing and every retained value above the rank tolerance.
struct SvdFactors {
    Eigen::MatrixXd U;      // d x r
    Eigen::VectorXd sigma;  // r, positive, non-increasing
    Eigen::MatrixXd V;      // n x r
    Eigen::Index rank = 0;
};

/// Standard numerical-rank rule: sigma_i is kept iff
/// sigma_i > max(rows, cols) * eps * sigma_1.
inline double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

inline SvdFactors svd(const Eigen::MatrixXd& m, double rtol = -1.0) {
    if (!m.allFinite()) throw Error(ErrorKind::Data, "svd: non-finite input");

    // BDCSVD falls back to Jacobi internally for small problems.
    Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = dec.singularValues();
    double tol = rtol >= 0.0 ? rtol * (sv.size() ? sv[0] : 0.0)
                             : default_rank_tolerance(m.rows(), m.cols(), sv.size() ? sv[0] : 0.0);

    Eigen::Index r = 0;
    while (r < sv.size() && sv[r] > tol) ++r;

    SvdFactors f;
    f.U = dec.matrixU().leftCols(r);
    f.sigma = sv.head(r);
    f.V = dec.matrixV().leftCols(r);
    f.rank = r;
    return f;
}

/// Moore-Penrose pseudo-inverse via SVD truncation. rtol is relative to the
/// largest singular value; negative means the default rank rule.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rtol = -1.0) {
    SvdFactors f = svd(m, rtol);
    if (f.rank == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
    return f.V * f.sigma.cwiseInverse().asDiagonal() * f.U.transpose();
}

/// Pooled within-class scatter, overall covariance, and the three means.
/// W uses divisor (n-2) and Sigma uses (n-1); a zero divisor yields the
/// zero matrix with the matching degenerate flag set, so the downstream
/// pseudo-inverses treat the case uniformly.
struct ScatterStats {
    Eigen::MatrixXd within;       // W, d x d
    Eigen::MatrixXd covariance;   // Sigma, d x d
    Eigen::VectorXd mean1;        // class +1
    Eigen::VectorXd mean2;        // class -1
    Eigen::VectorXd mean;         // overall
    bool within_degenerate = false;
    bool covariance_degenerate = false;
};

inline ScatterStats scatter_matrices(const LabeledDataset& ds) {
    ds.require_two_classes();
    const Eigen::Index d = ds.dim();
    const Eigen::Index n = ds.n();

    ScatterStats s;
    s.mean1 = ds.class_mean(1);
    s.mean2 = ds.class_mean(-1);
    s.mean = ds.overall_mean();

    Eigen::MatrixXd w_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd c_sum = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXd cw = ds.data().col(k) - (ds.label(k) == 1 ? s.mean1 : s.mean2);
        Eigen::VectorXd cc = ds.data().col(k) - s.mean;
        w_sum.noalias() += cw * cw.transpose();
        c_sum.noalias() += cc * cc.transpose();
    }

    if (n > 2) {
        s.within = w_sum / static_cast<double>(n - 2);
    } else {
        s.within = Eigen::MatrixXd::Zero(d, d);
        s.within_degenerate = true;
    }
    if (n > 1) {
        s.covariance = c_sum / static_cast<double>(n - 1);
    } else {
        s.covariance = Eigen::MatrixXd::Zero(d, d);
        s.covariance_degenerate = true;
    }
    return s;
}

/// Lossless span reduction for HDLSS solves: Q is an orthonormal basis of
/// the training column span, reduced data is Q^T X, and any direction found
/// in the reduced space maps back as w = Q * w_reduced. Margin-based fits
/// (SVM, DWD) lose nothing because scores and the norm constraint only see
/// the component of w inside the span.
struct ReducedProblem {
    Eigen::MatrixXd basis;    // Q, d x r
    LabeledDataset reduced;   // r x n with the original labels
    Eigen::Index rank = 0;

    Eigen::VectorXd lift(const Eigen::VectorXd& w_reduced) const { return basis * w_reduced; }
};

inline ReducedProblem reduce(const LabeledDataset& ds) {
    SvdFactors f = svd(ds.data());
    ReducedProblem rp;
    rp.rank = f.rank;
    rp.basis = std::move(f.U);
    rp.reduced = LabeledDataset(rp.basis.transpose() * ds.data(), ds.labels());
    return rp;
}

}  // namespace hdlss
