#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <utility>
#include <vector>

#include "hdlss/types.hpp"

namespace hdlss {

/// Grayscale image with I rows and J cols. Pixel values live in [0, 255];
/// they are stored as reals because warping produces interpolated levels.
/// Pixel coordinates are 1-based (row, col) with origin at the top-left,
/// matching the matrix convention used by the file formats.
class GrayImage {
  public:
    GrayImage() = default;

    GrayImage(int rows, int cols, double value = 0.0) : pix_(rows, cols) {
        if (rows < 1 || cols < 1)
            throw Error(ErrorKind::Data, "GrayImage requires at least 1x1 pixels");
        pix_.setConstant(value);
    }

    explicit GrayImage(Eigen::MatrixXd pixels) : pix_(std::move(pixels)) {
        if (pix_.rows() < 1 || pix_.cols() < 1)
            throw Error(ErrorKind::Data, "GrayImage requires at least 1x1 pixels");
    }

    int rows() const { return static_cast<int>(pix_.rows()); }
    int cols() const { return static_cast<int>(pix_.cols()); }

    // 1-based accessors.
    double at(int i, int j) const { return pix_(i - 1, j - 1); }
    double& at(int i, int j) { return pix_(i - 1, j - 1); }

    const Eigen::MatrixXd& pixels() const { return pix_; }
    Eigen::MatrixXd& pixels() { return pix_; }

  private:
    Eigen::MatrixXd pix_;
};

/// 8-bit RGB raster used for the loadings heatmap.
struct RgbImage {
    int rows = 0;
    int cols = 0;
    std::vector<unsigned char> data;  // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c * 3, 0) {}

    unsigned char* px(int i, int j) {  // 1-based
        return data.data() + (static_cast<size_t>(i - 1) * cols + (j - 1)) * 3;
    }
    const unsigned char* px(int i, int j) const {
        return data.data() + (static_cast<size_t>(i - 1) * cols + (j - 1)) * 3;
    }
};

/// Flattens an image into a length I*J vector by column concatenation:
/// entry (j-1)*I + i (1-based) is pixel (row i, col j).
inline Eigen::VectorXd rasterize(const GrayImage& img) {
    // Eigen matrices are column-major, so the raw buffer already is the
    // column concatenation.
    return Eigen::Map<const Eigen::VectorXd>(img.pixels().data(), img.pixels().size());
}

/// Inverse of rasterize; values are clamped to [0, 255].
inline GrayImage unrasterize(const Eigen::VectorXd& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw Error(ErrorKind::Dimension, "unrasterize: vector length " + std::to_string(v.size()) +
                                              " does not equal rows*cols = " +
                                              std::to_string(static_cast<long>(rows) * cols));
    Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
    m = m.cwiseMax(0.0).cwiseMin(255.0);
    return GrayImage(std::move(m));
}

/// Rectangular pixel region, 1-based inclusive bounds, together with the
/// rasterized vector indices it covers (0-based, in column-concatenation
/// order so a full-image mask enumerates 0..d-1 in order).
class RegionMask {
  public:
    RegionMask(int row_min, int row_max, int col_min, int col_max, int image_rows, int image_cols)
        : row_min_(row_min), row_max_(row_max), col_min_(col_min), col_max_(col_max),
          image_rows_(image_rows), image_cols_(image_cols) {
        if (!(1 <= row_min && row_min <= row_max && row_max <= image_rows &&
              1 <= col_min && col_min <= col_max && col_max <= image_cols))
            throw Error(ErrorKind::Data, "RegionMask: rectangle out of bounds");
        indices_.reserve(static_cast<size_t>(row_max - row_min + 1) * (col_max - col_min + 1));
        for (int j = col_min; j <= col_max; ++j)
            for (int i = row_min; i <= row_max; ++i)
                indices_.push_back(static_cast<Eigen::Index>(j - 1) * image_rows + (i - 1));
    }

    static RegionMask full(int image_rows, int image_cols) {
        return RegionMask(1, image_rows, 1, image_cols, image_rows, image_cols);
    }

    int row_min() const { return row_min_; }
    int row_max() const { return row_max_; }
    int col_min() const { return col_min_; }
    int col_max() const { return col_max_; }
    int image_rows() const { return image_rows_; }
    int image_cols() const { return image_cols_; }
    const std::vector<Eigen::Index>& indices() const { return indices_; }
    size_t size() const { return indices_.size(); }

  private:
    int row_min_, row_max_, col_min_, col_max_;
    int image_rows_, image_cols_;
    std::vector<Eigen::Index> indices_;
};

}  // namespace hdlss
