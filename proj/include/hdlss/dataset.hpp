#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "hdlss/core.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// d x n sample matrix (column k is sample k) with labels in {+1, -1}.
/// Label +1 stands for "male", -1 for "female", the convention used
/// throughout and documented in the CLI.
class LabeledDataset {
  public:
    LabeledDataset() = default;

    LabeledDataset(Eigen::MatrixXd data, Eigen::VectorXi labels)
        : data_(std::move(data)), labels_(std::move(labels)) {
        if (data_.cols() != labels_.size())
            throw Error(ErrorKind::Dimension, "dataset: label count != sample count");
        if (!data_.allFinite())
            throw Error(ErrorKind::Data, "dataset: non-finite entries");
        for (Eigen::Index k = 0; k < labels_.size(); ++k) {
            if (labels_[k] == 1)
                ++n1_;
            else if (labels_[k] == -1)
                ++n2_;
            else
                throw Error(ErrorKind::Data, "dataset: labels must be +1 or -1");
        }
    }

    Eigen::Index dim() const { return data_.rows(); }
    Eigen::Index n() const { return data_.cols(); }
    Eigen::Index n1() const { return n1_; }
    Eigen::Index n2() const { return n2_; }

    const Eigen::MatrixXd& data() const { return data_; }
    const Eigen::VectorXi& labels() const { return labels_; }
    Eigen::VectorXd sample(Eigen::Index k) const { return data_.col(k); }
    int label(Eigen::Index k) const { return labels_[k]; }

    /// Mean of the samples carrying the given label.
    Eigen::VectorXd class_mean(int label) const {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dim());
        Eigen::Index count = 0;
        for (Eigen::Index k = 0; k < n(); ++k)
            if (labels_[k] == label) {
                m += data_.col(k);
                ++count;
            }
        if (count == 0) throw Error(ErrorKind::Degenerate, "class_mean: empty class");
        return m / static_cast<double>(count);
    }

    Eigen::VectorXd overall_mean() const {
        if (n() == 0) throw Error(ErrorKind::Degenerate, "overall_mean: empty dataset");
        return data_.rowwise().mean();
    }

    void require_two_classes() const {
        if (n1_ == 0 || n2_ == 0)
            throw Error(ErrorKind::Degenerate, "operation requires samples from both classes");
    }

  private:
    Eigen::MatrixXd data_;
    Eigen::VectorXi labels_;
    Eigen::Index n1_ = 0;
    Eigen::Index n2_ = 0;
};

/// Keeps only the rows selected by the mask, in mask order. Labels are
/// untouched; a full-image mask returns an identical dataset.
inline LabeledDataset restrict(const LabeledDataset& ds, const RegionMask& mask) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(mask.size()), ds.n());
    for (size_t r = 0; r < mask.size(); ++r) {
        Eigen::Index src = mask.indices()[r];
        if (src < 0 || src >= ds.dim())
            throw Error(ErrorKind::Dimension, "restrict: mask index out of range");
        out.row(static_cast<Eigen::Index>(r)) = ds.data().row(src);
    }
    return LabeledDataset(std::move(out), ds.labels());
}

enum class SyntheticDirection { Ones, Random };

namespace detail {

/// Deterministic standard-normal stream: Box-Muller over mt19937_64
/// uniforms. Not tied to std::normal_distribution so the sequence is
/// stable across standard libraries.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    double uniform01() {
        // in (0, 1]; never 0 so log() is safe
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

/// Two-class Gaussian generator for tests and benchmarks: unit covariance,
/// class means at +/- (mu/2) * e where e is either the normalized all-ones
/// vector or a seeded random unit vector. The first n_per_class columns are
/// class +1. Identical (d, n_per_class, mu, mode, seed) give identical data.
inline LabeledDataset make_synthetic(Eigen::Index d, Eigen::Index n_per_class, double mu,
                                     SyntheticDirection mode, std::uint64_t seed) {
    if (d < 1 || n_per_class < 1)
        throw Error(ErrorKind::Data, "make_synthetic: d and n_per_class must be >= 1");
    if (mu < 0.0) throw Error(ErrorKind::Data, "make_synthetic: mu must be >= 0");

    detail::NormalStream normal(seed);

    Eigen::VectorXd e(d);
    if (mode == SyntheticDirection::Ones) {
        e.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
    } else {
        for (Eigen::Index i = 0; i < d; ++i) e[i] = normal.next();
        double norm = e.norm();
        if (norm == 0.0) e.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
        else e /= norm;
    }

    Eigen::MatrixXd data(d, 2 * n_per_class);
    Eigen::VectorXi labels(2 * n_per_class);
    for (Eigen::Index k = 0; k < 2 * n_per_class; ++k) {
        int y = k < n_per_class ? 1 : -1;
        labels[k] = y;
        for (Eigen::Index i = 0; i < d; ++i) data(i, k) = normal.next();
        data.col(k) += (y * mu / 2.0) * e;
    }
    return LabeledDataset(std::move(data), std::move(labels));
}

}  // namespace hdlss
