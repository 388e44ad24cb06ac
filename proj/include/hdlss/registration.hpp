#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "hdlss/core.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// Ordered 2-D landmarks for one image, (x = col, y = row), 1-based pixel
/// coordinates, real-valued.
using LandmarkSet = std::vector<Eigen::Vector2d>;

/// Rotation by theta (radians, counterclockwise about the coordinate
/// origin) followed by a translation.
struct RigidTransform {
    double theta = 0.0;
    Eigen::Vector2d t = Eigen::Vector2d::Zero();

    Eigen::Matrix2d rotation() const {
        Eigen::Matrix2d r;
        r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        return r;
    }

    Eigen::Vector2d apply(const Eigen::Vector2d& p) const { return rotation() * p + t; }

    LandmarkSet apply(const LandmarkSet& pts) const {
        LandmarkSet out;
        out.reserve(pts.size());
        Eigen::Matrix2d r = rotation();
        for (const auto& p : pts) out.push_back(r * p + t);
        return out;
    }

    RigidTransform inverse() const {
        RigidTransform inv;
        inv.theta = -theta;
        inv.t = -(inv.rotation() * t);
        return inv;
    }
};

namespace registration_detail {

inline Eigen::Vector2d centroid(const LandmarkSet& pts) {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

inline bool coincident(const LandmarkSet& pts) {
    Eigen::Vector2d c = centroid(pts);
    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p - c).norm());
    return spread == 0.0;
}

}  // namespace registration_detail

/// Least-squares rigid alignment of source onto target (2-D orthogonal
/// Procrustes): center both, take the closest proper rotation of the 2x2
/// cross-covariance via its SVD with determinant correction, then recover
/// the translation. If the source points are all coincident the rotation is
/// undefined and theta = 0 by convention.
inline RigidTransform rigid_align(const LandmarkSet& source, const LandmarkSet& target) {
    if (source.size() != target.size() || source.size() < 2)
        throw Error(ErrorKind::Dimension, "rigid_align: landmark sets must match, size >= 2");
    if (registration_detail::coincident(target))
        throw Error(ErrorKind::Degenerate, "rigid_align: target landmarks are all coincident");

    Eigen::Vector2d sc = registration_detail::centroid(source);
    Eigen::Vector2d tc = registration_detail::centroid(target);

    Eigen::Matrix2d cross = Eigen::Matrix2d::Zero();
    for (size_t k = 0; k < source.size(); ++k)
        cross += (target[k] - tc) * (source[k] - sc).transpose();

    RigidTransform out;
    if (cross.norm() > 0.0 && !registration_detail::coincident(source)) {
        Eigen::JacobiSVD<Eigen::Matrix2d> dec(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix2d u = dec.matrixU(), v = dec.matrixV();
        double det = (u * v.transpose()).determinant();
        Eigen::Matrix2d r = u * Eigen::Vector2d(1.0, det).asDiagonal() * v.transpose();
        out.theta = std::atan2(r(1, 0), r(0, 0));
    }
    out.t = tc - out.rotation() * sc;
    return out;
}

inline double alignment_rss(const LandmarkSet& moved, const LandmarkSet& target) {
    double rss = 0.0;
    for (size_t k = 0; k < moved.size(); ++k) rss += (moved[k] - target[k]).squaredNorm();
    return rss;
}

struct GpaResult {
    LandmarkSet mean_shape;
    std::vector<RigidTransform> transforms;  // raw landmarks -> consensus frame
    std::vector<double> residuals;           // per shape, sqrt(RSS / k)
    int iterations = 0;
};

/// Generalized Procrustes analysis over translations and rotations only (no
/// scaling step): center all shapes, seed the consensus with the first one,
/// and alternate aligning every shape to the consensus with recomputing the
/// consensus as their mean, until the mean moves less than 1e-10.
inline GpaResult gpa(const std::vector<LandmarkSet>& shapes, int max_iterations = 100) {
    if (shapes.size() < 2) throw Error(ErrorKind::Data, "gpa: needs at least 2 shapes");
    const size_t k = shapes[0].size();
    for (const auto& s : shapes) {
        if (s.size() != k || k < 2)
            throw Error(ErrorKind::Dimension, "gpa: landmark counts differ across shapes");
        if (registration_detail::coincident(s))
            throw Error(ErrorKind::Degenerate, "gpa: a shape has all landmarks coincident");
        for (const auto& p : s)
            if (!p.allFinite()) throw Error(ErrorKind::Data, "gpa: non-finite landmark");
    }

    std::vector<LandmarkSet> centered(shapes.size());
    for (size_t i = 0; i < shapes.size(); ++i) {
        Eigen::Vector2d c = registration_detail::centroid(shapes[i]);
        centered[i] = shapes[i];
        for (auto& p : centered[i]) p -= c;
    }

    GpaResult res;
    res.mean_shape = centered[0];
    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter + 1;
        LandmarkSet next(k, Eigen::Vector2d::Zero());
        for (const auto& shape : centered) {
            RigidTransform t = rigid_align(shape, res.mean_shape);
            LandmarkSet moved = t.apply(shape);
            for (size_t p = 0; p < k; ++p) next[p] += moved[p];
        }
        for (auto& p : next) p /= static_cast<double>(shapes.size());

        double displacement = 0.0;
        for (size_t p = 0; p < k; ++p)
            displacement += (next[p] - res.mean_shape[p]).squaredNorm();
        displacement = std::sqrt(displacement / static_cast<double>(k));
        res.mean_shape = next;
        if (displacement < 1e-10) break;
    }

    res.transforms.reserve(shapes.size());
    res.residuals.reserve(shapes.size());
    for (const auto& shape : shapes) {
        RigidTransform t = rigid_align(shape, res.mean_shape);
        res.transforms.push_back(t);
        res.residuals.push_back(
            std::sqrt(alignment_rss(t.apply(shape), res.mean_shape) / static_cast<double>(k)));
    }
    return res;
}

/// Warps an image by the rigid transform using inverse mapping: each output
/// pixel samples the input at T^{-1}(output coordinate) with bilinear
/// interpolation; samples outside the input take the fill value.
inline GrayImage warp_image(const GrayImage& img, const RigidTransform& transform,
                            double fill = 0.0) {
    const int rows = img.rows(), cols = img.cols();
    GrayImage out(rows, cols, fill);
    RigidTransform inv = transform.inverse();
    Eigen::Matrix2d r = inv.rotation();

    for (int i = 1; i <= rows; ++i) {
        for (int j = 1; j <= cols; ++j) {
            Eigen::Vector2d q = r * Eigen::Vector2d(j, i) + inv.t;  // (x, y)
            double x = q[0], y = q[1];
            double xf = std::floor(x), yf = std::floor(y);
            double wx = x - xf, wy = y - yf;
            int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);

            auto sample = [&](int yy, int xx) {
                if (yy < 1 || yy > rows || xx < 1 || xx > cols) return fill;
                return img.at(yy, xx);
            };
            double v = (1.0 - wy) * ((1.0 - wx) * sample(y0, x0) + wx * sample(y0, x0 + 1)) +
                       wy * ((1.0 - wx) * sample(y0 + 1, x0) + wx * sample(y0 + 1, x0 + 1));
            out.at(i, j) = v;
        }
    }
    return out;
}

}  // namespace hdlss
