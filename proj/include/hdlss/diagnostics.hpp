#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "hdlss/classify.hpp"
#include "hdlss/core.hpp"
#include "hdlss/dataset.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

/// Gaussian kernel density estimate evaluated on the grid. Each score
/// contributes mass weight_i, so group-size adjusted subdensities use
/// weight 1/n per sample and sum exactly to the pooled curve when the
/// bandwidth is shared.
inline Eigen::VectorXd kde(const Eigen::VectorXd& scores, const Eigen::VectorXd& weights,
                           double bandwidth, const Eigen::VectorXd& grid) {
    if (scores.size() < 1) throw Error(ErrorKind::Data, "kde: needs at least one score");
    if (scores.size() != weights.size())
        throw Error(ErrorKind::Dimension, "kde: weights length mismatch");
    if (!(bandwidth > 0.0)) throw Error(ErrorKind::Data, "kde: bandwidth must be positive");

    const double inv_norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
    Eigen::VectorXd curve = Eigen::VectorXd::Zero(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            double u = (grid[g] - scores[i]) / bandwidth;
            acc += weights[i] * std::exp(-0.5 * u * u);
        }
        curve[g] = acc * inv_norm;
    }
    return curve;
}

/// Silverman's rule on the pooled scores:
/// 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back to range/100 (and
/// finally 1) when ties drive it to zero.
inline double silverman_bandwidth(const Eigen::VectorXd& scores) {
    const Eigen::Index n = scores.size();
    if (n < 1) throw Error(ErrorKind::Data, "bandwidth: empty scores");
    if (n == 1) return 1.0;

    double mean = scores.mean();
    double sd = std::sqrt((scores.array() - mean).square().sum() / static_cast<double>(n - 1));

    std::vector<double> sorted(scores.data(), scores.data() + n);
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) {
        double pos = p * static_cast<double>(n - 1);
        Eigen::Index lo = static_cast<Eigen::Index>(std::floor(pos));
        Eigen::Index hi = std::min(lo + 1, n - 1);
        double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    double iqr = quantile(0.75) - quantile(0.25);

    double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(n), -0.2);
    if (h > 0.0) return h;
    double range = sorted.back() - sorted.front();
    return range > 0.0 ? range / 100.0 : 1.0;
}

struct GapReport {
    // Separation interval: (max score of the lower class, min score of the
    // upper class), present only when its width is positive.
    bool separated = false;
    double interval_lo = 0.0;
    double interval_hi = 0.0;

    // Locations of the two subdensity modes (leftmost grid point on ties),
    // lower-mean class first, and their difference.
    double mode_lo = 0.0;
    double mode_hi = 0.0;
    double mode_gap = 0.0;

    double interval_width() const { return separated ? interval_hi - interval_lo : 0.0; }
};

/// Projection of a dataset onto one rule: scores, the 125%-of-range plot
/// span, shared-bandwidth density curves, display heights, piling fractions
/// and the gap report.
struct ProjectionSummary {
    Eigen::VectorXd scores;
    Eigen::VectorXi labels;
    double span_lo = 0.0, span_hi = 0.0;
    Eigen::VectorXd grid;
    double bandwidth = 0.0;
    Eigen::VectorXd density;       // pooled
    Eigen::VectorXd density_pos;   // class +1, mass n1/n
    Eigen::VectorXd density_neg;   // class -1, mass n2/n
    Eigen::VectorXd heights;       // (position in dataset) / n, for symbol plotting
    double piling_pos = 0.0;
    double piling_neg = 0.0;
    std::optional<GapReport> gap;  // present when both classes are
};

/// Largest fraction of the class's scores that fit inside one tol-wide
/// window; 1.0 means complete piling. Default tol is 1e-3 of the pooled
/// score range.
inline double piling_fraction(const Eigen::VectorXd& scores, double tol) {
    if (scores.size() == 0) return 0.0;
    if (!(tol > 0.0)) return 1.0;  // zero range: everything piles
    std::vector<double> s(scores.data(), scores.data() + scores.size());
    std::sort(s.begin(), s.end());
    size_t best = 1, lo = 0;
    for (size_t hi = 0; hi < s.size(); ++hi) {
        while (s[hi] - s[lo] > tol) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return static_cast<double>(best) / static_cast<double>(s.size());
}

namespace diag_detail {

inline Eigen::VectorXd class_scores(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels,
                                    int label) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (labels[i] == label) v.push_back(scores[i]);
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::Index argmax_leftmost(const Eigen::VectorXd& curve) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < curve.size(); ++i)
        if (curve[i] > curve[best]) best = i;
    return best;
}

}  // namespace diag_detail

inline GapReport gap_report(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels,
                            const Eigen::VectorXd& grid, const Eigen::VectorXd& density_pos,
                            const Eigen::VectorXd& density_neg) {
    Eigen::VectorXd pos = diag_detail::class_scores(scores, labels, 1);
    Eigen::VectorXd neg = diag_detail::class_scores(scores, labels, -1);
    if (pos.size() == 0 || neg.size() == 0)
        throw Error(ErrorKind::Degenerate, "gap_report: both classes must be present");

    bool pos_is_upper = pos.mean() >= neg.mean();
    const Eigen::VectorXd& lower = pos_is_upper ? neg : pos;
    const Eigen::VectorXd& upper = pos_is_upper ? pos : neg;
    const Eigen::VectorXd& lower_density = pos_is_upper ? density_neg : density_pos;
    const Eigen::VectorXd& upper_density = pos_is_upper ? density_pos : density_neg;

    GapReport g;
    double lo = lower.maxCoeff();
    double hi = upper.minCoeff();
    if (hi > lo) {
        g.separated = true;
        g.interval_lo = lo;
        g.interval_hi = hi;
    }
    g.mode_lo = grid[diag_detail::argmax_leftmost(lower_density)];
    g.mode_hi = grid[diag_detail::argmax_leftmost(upper_density)];
    g.mode_gap = g.mode_hi - g.mode_lo;
    return g;
}

/// Span rule used by the projection plots: width is 125% of the score
/// range, centered on the midrange.
inline std::pair<double, double> projection_span(const Eigen::VectorXd& scores) {
    double lo = scores.minCoeff(), hi = scores.maxCoeff();
    double mid = 0.5 * (lo + hi);
    double half = 0.625 * (hi - lo);  // 1.25 * range / 2
    return {mid - half, mid + half};
}

inline ProjectionSummary project(const LinearRule& rule, const LabeledDataset& ds,
                                 Eigen::Index grid_points = 401, double piling_tol = -1.0) {
    if (ds.n() == 0) throw Error(ErrorKind::Data, "project: empty dataset");
    ProjectionSummary s;
    s.scores = rule.scores(ds.data());
    s.labels = ds.labels();

    auto [lo, hi] = projection_span(s.scores);
    s.span_lo = lo;
    s.span_hi = hi;
    s.grid.resize(grid_points);
    for (Eigen::Index g = 0; g < grid_points; ++g)
        s.grid[g] = grid_points == 1
                        ? 0.5 * (lo + hi)
                        : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);

    s.bandwidth = silverman_bandwidth(s.scores);
    const double n = static_cast<double>(ds.n());
    Eigen::VectorXd unit_weights = Eigen::VectorXd::Constant(ds.n(), 1.0 / n);
    s.density = kde(s.scores, unit_weights, s.bandwidth, s.grid);

    Eigen::VectorXd pos = diag_detail::class_scores(s.scores, s.labels, 1);
    Eigen::VectorXd neg = diag_detail::class_scores(s.scores, s.labels, -1);
    if (pos.size() > 0)
        s.density_pos =
            kde(pos, Eigen::VectorXd::Constant(pos.size(), 1.0 / n), s.bandwidth, s.grid);
    else
        s.density_pos = Eigen::VectorXd::Zero(grid_points);
    if (neg.size() > 0)
        s.density_neg =
            kde(neg, Eigen::VectorXd::Constant(neg.size(), 1.0 / n), s.bandwidth, s.grid);
    else
        s.density_neg = Eigen::VectorXd::Zero(grid_points);

    s.heights.resize(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        s.heights[i] = static_cast<double>(i + 1) / n;

    double range = s.scores.maxCoeff() - s.scores.minCoeff();
    double tol = piling_tol > 0.0 ? piling_tol : 1e-3 * range;
    s.piling_pos = piling_fraction(pos, tol);
    s.piling_neg = piling_fraction(neg, tol);

    if (pos.size() > 0 && neg.size() > 0)
        s.gap = gap_report(s.scores, s.labels, s.grid, s.density_pos, s.density_neg);
    return s;
}

/// Images along the discriminant line: frame t reconstructs the point
/// mean + (s_t - score(mean)) * w whose score equals s_t, with the frame
/// scores marching uniformly over the 125% span.
inline std::vector<GrayImage> reconstruction_frames(const LinearRule& rule,
                                                    const LabeledDataset& ds, int image_rows,
                                                    int image_cols, int n_frames = 101) {
    if (rule.w.size() != static_cast<Eigen::Index>(image_rows) * image_cols)
        throw Error(ErrorKind::Dimension, "reconstruction_frames: rule is not image-shaped");
    if (n_frames < 2) throw Error(ErrorKind::Data, "reconstruction_frames: need >= 2 frames");

    Eigen::VectorXd scores = rule.scores(ds.data());
    auto [lo, hi] = projection_span(scores);
    Eigen::VectorXd mean = ds.overall_mean();
    double base = rule.score(mean);

    std::vector<GrayImage> frames;
    frames.reserve(static_cast<size_t>(n_frames));
    for (int t = 0; t < n_frames; ++t) {
        double st = lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(n_frames - 1);
        frames.push_back(unrasterize(mean + (st - base) * rule.w, image_rows, image_cols));
    }
    return frames;
}

/// Diverging red/white/blue map of a direction vector: white is 0, blue
/// ramps with positive entries, red with negative, linearly in magnitude
/// and saturated at max |w_i|.
inline RgbImage loadings_heatmap(const LinearRule& rule, int image_rows, int image_cols) {
    if (rule.w.size() != static_cast<Eigen::Index>(image_rows) * image_cols)
        throw Error(ErrorKind::Dimension, "loadings_heatmap: rule is not image-shaped");
    double vmax = rule.w.cwiseAbs().maxCoeff();
    if (vmax == 0.0) throw Error(ErrorKind::Degenerate, "loadings_heatmap: all-zero direction");

    RgbImage img(image_rows, image_cols);
    for (int j = 1; j <= image_cols; ++j) {
        for (int i = 1; i <= image_rows; ++i) {
            double v = rule.w[static_cast<Eigen::Index>(j - 1) * image_rows + (i - 1)];
            auto ramp = static_cast<unsigned char>(std::lround(255.0 * (1.0 - std::abs(v) / vmax)));
            unsigned char* px = img.px(i, j);
            if (v >= 0.0) {
                px[0] = ramp;
                px[1] = ramp;
                px[2] = 255;
            } else {
                px[0] = 255;
                px[1] = ramp;
                px[2] = ramp;
            }
        }
    }
    return img;
}

/// Pairwise angles between rule directions in degrees:
/// arccos(|w_i . w_j|), 0 on the diagonal, exactly 90 for orthogonal
/// (e.g. disjoint-mask) directions.
inline Eigen::MatrixXd pairwise_angles(const std::vector<LinearRule>& rules) {
    if (rules.size() < 2) throw Error(ErrorKind::Data, "pairwise_angles: needs >= 2 rules");
    const Eigen::Index d = rules[0].w.size();
    for (const auto& r : rules)
        if (r.w.size() != d)
            throw Error(ErrorKind::Dimension, "pairwise_angles: rule dimensions differ");

    const Eigen::Index m = static_cast<Eigen::Index>(rules.size());
    Eigen::MatrixXd angles = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double a = std::abs(rules[i].w.dot(rules[j].w));
            double deg;
            if (a == 0.0)
                deg = 90.0;
            else if (a >= 1.0)
                deg = 0.0;
            else
                deg = std::acos(a) * (180.0 / std::numbers::pi);
            angles(i, j) = angles(j, i) = deg;
        }
    }
    return angles;
}

/// Table-1 style counts. Class +1 is "men", -1 is "women".
struct ConfusionMatrix {
    long men_as_men = 0;
    long women_as_women = 0;
    long men_as_women = 0;
    long women_as_men = 0;

    long total() const { return men_as_men + women_as_women + men_as_women + women_as_men; }
    double error_rate() const {
        return total() == 0
                   ? 0.0
                   : static_cast<double>(men_as_women + women_as_men) / static_cast<double>(total());
    }
};

inline ConfusionMatrix confusion(const Eigen::VectorXi& predicted, const Eigen::VectorXi& actual) {
    if (predicted.size() != actual.size())
        throw Error(ErrorKind::Dimension, "confusion: length mismatch");
    ConfusionMatrix m;
    for (Eigen::Index i = 0; i < predicted.size(); ++i) {
        if (actual[i] == 1)
            (predicted[i] == 1 ? m.men_as_men : m.men_as_women) += 1;
        else
            (predicted[i] == -1 ? m.women_as_women : m.women_as_men) += 1;
    }
    return m;
}

}  // namespace hdlss
