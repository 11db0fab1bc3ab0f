#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lfaa/errors.hpp"

namespace lfaa {

// 2D luminance grid: rows are angular samples (s), columns spatial samples (u).
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw ValidationError("Grid2D: negative dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }

    double& operator()(int s, int u) { return v_[static_cast<size_t>(s) * cols_ + u]; }
    double operator()(int s, int u) const { return v_[static_cast<size_t>(s) * cols_ + u]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(int s) { return v_.data() + static_cast<size_t>(s) * cols_; }
    const double* row(int s) const { return v_.data() + static_cast<size_t>(s) * cols_; }

    bool finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    bool operator==(const Grid2D& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

// 3D tensor (s, u, c) with channels innermost.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int rows, int cols, int channels, double fill = 0.0)
        : rows_(rows), cols_(cols), ch_(channels),
          v_(static_cast<size_t>(rows) * cols * channels, fill) {
        if (rows < 0 || cols < 0 || channels < 0)
            throw ValidationError("Tensor3: negative dimensions");
    }

    static Tensor3 from_grid(const Grid2D& g) {
        Tensor3 t(g.rows(), g.cols(), 1);
        for (int s = 0; s < g.rows(); ++s)
            for (int u = 0; u < g.cols(); ++u) t(s, u, 0) = g(s, u);
        return t;
    }

    Grid2D channel(int c) const {
        Grid2D g(rows_, cols_);
        for (int s = 0; s < rows_; ++s)
            for (int u = 0; u < cols_; ++u) g(s, u) = (*this)(s, u, c);
        return g;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int channels() const { return ch_; }
    size_t size() const { return v_.size(); }

    double& operator()(int s, int u, int c) {
        return v_[(static_cast<size_t>(s) * cols_ + u) * ch_ + c];
    }
    double operator()(int s, int u, int c) const {
        return v_[(static_cast<size_t>(s) * cols_ + u) * ch_ + c];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    bool finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    int rows_ = 0, cols_ = 0, ch_ = 0;
    std::vector<double> v_;
};

} // namespace lfaa
