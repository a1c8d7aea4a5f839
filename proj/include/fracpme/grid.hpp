#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracpme {

// Thrown on bad user input (configs, parameters). CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a simulation goes bad at runtime (support escape, NaN, lost
// monotonicity). CLI maps this to exit code 3.
struct solver_abort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform cell-centered mesh on [-L, L].
// Cells i = 0..n-1, centers x_i = -L + (i+1/2) dx, faces x_{i+1/2} = -L + (i+1) dx.
class Grid1D {
  public:
    Grid1D(double half_width, int n_cells)
        : half_width_(half_width), n_(n_cells) {
        if (!(half_width > 0.0))
            throw validation_error("Grid1D: half_width must be > 0");
        if (n_cells < 8)
            throw validation_error("Grid1D: need at least 8 cells");
        dx_ = 2.0 * half_width_ / n_;
    }

    double half_width() const { return half_width_; }
    int n_cells() const { return n_; }
    double dx() const { return dx_; }
    double center(int i) const { return -half_width_ + (i + 0.5) * dx_; }
    double face(int j) const { return -half_width_ + j * dx_; }

    bool same_as(const Grid1D& o) const {
        return n_ == o.n_ && half_width_ == o.half_width_;
    }

  private:
    double half_width_;
    int n_;
    double dx_;
};

// Cell-averaged density on a Grid1D. Values are densities (mass/length);
// mass is Sum values_i * dx. Operators accept signed fields (e.g. rho - rho_M),
// physical states are nonnegative.
class Field {
  public:
    explicit Field(const Grid1D& grid) : grid_(grid), values_(grid.n_cells(), 0.0) {}
    Field(const Grid1D& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.n_cells())
            throw validation_error("Field: value count does not match grid");
    }

    const Grid1D& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    double& operator[](int i) { return values_[i]; }
    double operator[](int i) const { return values_[i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double mass() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s * grid_.dx();
    }

    double l1() const {
        double s = 0.0;
        for (double v : values_) s += std::abs(v);
        return s * grid_.dx();
    }

    double l2() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return std::sqrt(s * grid_.dx());
    }

    double linf() const {
        double s = 0.0;
        for (double v : values_) s = std::max(s, std::abs(v));
        return s;
    }

    double min_value() const {
        double s = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) s = std::min(s, v);
        return s;
    }

  private:
    Grid1D grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!a.grid().same_as(b.grid()))
        throw validation_error(std::string(where) + ": fields live on different grids");
}

// Largest |x| with a non-negligible cell, as a crude support radius.
inline double support_radius(const Field& f, double rel_threshold = 1e-12) {
    const double thr = rel_threshold * std::max(f.linf(), 1e-300);
    double r = 0.0;
    for (int i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > thr)
            r = std::max(r, std::abs(f.grid().center(i)) + 0.5 * f.grid().dx());
    return r;
}

}  // namespace fracpme
