#pragma once

// Closed-form Barenblatt steady states of the similarity-transformed flow,
//   rho_M(x) = k (R^2 - x^2)_+^{1-s},
// with the radius<->mass relation and Euler-Lagrange residual diagnostics.
//
// The normalization k is derived from the mass constraint
//   M = k R^{3-2s} * B(s),  B(s) = sqrt(pi) Gamma(2-s) / Gamma(5/2 - s),
// equivalent to the radius-mass relation below. A prefactor variant that
// circulates with Gamma(1-s+N/s) in place of Gamma(1-s+N/2) is kept only
// behind printed_prefactor() for diagnostics; it is not mass-consistent.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fracpme/frac_ops.hpp"
#include "fracpme/grid.hpp"

namespace fracpme {

// M = c(s) R^{3-2s} with c(s) = 2^{2s} pi / (2 (3-2s) Gamma(3/2-s)^2).
inline double barenblatt_mass_coefficient(double s) {
    require_s_range(s);
    const double g = std::tgamma(1.5 - s);
    return std::pow(2.0, 2.0 * s) * kPi / (2.0 * (3.0 - 2.0 * s) * g * g);
}

inline double mass_from_radius(double radius, double s) {
    if (!(radius > 0.0)) throw validation_error("mass_from_radius: radius must be > 0");
    return barenblatt_mass_coefficient(s) * std::pow(radius, 3.0 - 2.0 * s);
}

inline double radius_from_mass(double mass, double s) {
    if (!(mass > 0.0)) throw validation_error("radius_from_mass: mass must be > 0");
    return std::pow(mass / barenblatt_mass_coefficient(s), 1.0 / (3.0 - 2.0 * s));
}

// The circulating prefactor variant (N=1), Gamma(1-s+1/s) included.
// Diagnostic only; the library normalizes by mass instead.
inline double printed_prefactor(double s) {
    return std::pow(2.0, 2.0 * s - 1.0) * std::tgamma(1.5) /
           (std::tgamma(2.0 - s) * std::tgamma(1.0 - s + 1.0 / s));
}

namespace detail {

// 8-point Gauss-Legendre on [-1, 1]
inline constexpr double kG8x[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
inline constexpr double kG8w[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};

}  // namespace detail

class BarenblattProfile {
  public:
    BarenblattProfile(double mass, double s)
        : mass_(mass), s_(s), radius_(radius_from_mass(mass, s)) {
        init_normalization();
    }

    static BarenblattProfile from_radius(double radius, double s) {
        return BarenblattProfile(mass_from_radius(radius, s), s);
    }

    double mass() const { return mass_; }
    double radius() const { return radius_; }
    double s() const { return s_; }
    double normalization() const { return k_; }
    double lambda() const { return 3.0 - 2.0 * s_; }

    double evaluate(double x) const {
        const double d = radius_ * radius_ - x * x;
        return d > 0.0 ? k_ * std::pow(d, 1.0 - s_) : 0.0;
    }

    // (1 + lambda tau)^{-1/lambda} rho_M(y (1 + lambda tau)^{-1/lambda})
    double rescaled(double tau, double y) const {
        if (!(tau >= 0.0)) throw validation_error("rescaled profile: tau must be >= 0");
        const double scale = std::pow(1.0 + lambda() * tau, -1.0 / lambda());
        return scale * evaluate(y * scale);
    }

    // Integral of the profile over [a, b]. Each half of the support is handled
    // in the graded variable w = (R -+ x)^{2-s}, which removes the derivative
    // singularity at the boundary; the remaining kink at w = 0 is absorbed by
    // geometrically graded 8-point panels.
    double integrate(double a, double b) const {
        const double R = radius_;
        const double lo = std::max(a, -R), hi = std::min(b, R);
        if (hi <= lo) return 0.0;
        if (hi <= 0.0) return graded_left(lo, hi);
        if (lo >= 0.0) return graded_right(lo, hi);
        return graded_left(lo, 0.0) + graded_right(0.0, hi);
    }

    // Cell-averaged sampling onto a grid; Field mass tracks M to quadrature
    // accuracy. Requires the support to fit inside the domain.
    Field sample_on_grid(const Grid1D& grid) const {
        if (radius_ >= grid.half_width())
            throw validation_error("sample_on_grid: profile support exceeds the domain");
        Field f(grid);
        const double inv_dx = 1.0 / grid.dx();
        for (int i = 0; i < grid.n_cells(); ++i) {
            const double a = grid.face(i), b = grid.face(i + 1);
            if (b < -radius_ || a > radius_) continue;
            f[i] = integrate(a, b) * inv_dx;
        }
        return f;
    }

  private:
    void init_normalization() {
        const double B =
            std::sqrt(kPi) * std::tgamma(2.0 - s_) / std::tgamma(2.5 - s_);
        k_ = mass_ / (std::pow(radius_, 3.0 - 2.0 * s_) * B);
    }

    // In the graded variable w = (R -+ x)^{2-s} the integrand is bounded but
    // keeps a w^{1/(2-s)} kink at w = 0, so the 8-point rule is applied on
    // panels graded geometrically toward 0.
    double graded_panels(double w_lo, double w_hi,
                         const std::function<double(double)>& f) const {
        double acc = 0.0;
        double hi = w_hi;
        for (int panel = 0; panel < 12 && hi > w_lo; ++panel) {
            const double lo = panel == 11 ? w_lo : std::max(w_lo, hi / 3.0);
            const double wm = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
            for (int q = 0; q < 8; ++q)
                acc += detail::kG8w[q] * f(wm + h * detail::kG8x[q]) * h;
            hi = lo;
        }
        return acc;
    }

    // integral over [lo, hi] with hi near +R: w = (R - x)^{2-s}
    double graded_right(double lo, double hi) const {
        const double R = radius_, p = 2.0 - s_;
        const double wa = std::pow(std::max(R - hi, 0.0), p);
        const double wb = std::pow(R - lo, p);
        return k_ / p * graded_panels(wa, wb, [&](double w) {
            const double x = R - std::pow(w, 1.0 / p);
            return std::pow(R + x, 1.0 - s_);
        });
    }

    // integral over [lo, hi] with lo near -R: w = (R + x)^{2-s}
    double graded_left(double lo, double hi) const {
        const double R = radius_, p = 2.0 - s_;
        const double wa = std::pow(std::max(R + lo, 0.0), p);
        const double wb = std::pow(R + hi, p);
        return k_ / p * graded_panels(wa, wb, [&](double w) {
            const double x = -R + std::pow(w, 1.0 / p);
            return std::pow(R - x, 1.0 - s_);
        });
    }

    double mass_;
    double s_;
    double radius_;
    double k_ = 0.0;
};

// The profile satisfies (-Delta)^{-s} rho_M + x^2/2 = R^2 / (2(1-2s)) on the
// support and >= that constant outside (N = 1).
inline double euler_lagrange_constant(const BarenblattProfile& p) {
    return p.radius() * p.radius() / (2.0 * (1.0 - 2.0 * p.s()));
}

struct EulerLagrangeResidual {
    double interior_sup = 0.0;    // sup over |x| <= 0.9 R of |lhs - const|
    double exterior_margin = 0.0; // min over |x| > R of (lhs - const); should be >= -tol
    double constant = 0.0;
};

inline EulerLagrangeResidual euler_lagrange_residual(const BarenblattProfile& profile,
                                                     const Grid1D& grid) {
    if (profile.radius() > 0.5 * grid.half_width())
        throw validation_error("euler_lagrange_residual: require R <= L/2");
    const Field rho = profile.sample_on_grid(grid);
    const Field pot = riesz_potential(rho, profile.s());
    EulerLagrangeResidual res;
    res.constant = euler_lagrange_constant(profile);
    const double R = profile.radius();
    double ext = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n_cells(); ++i) {
        const double x = grid.center(i);
        const double lhs = pot[i] + 0.5 * x * x;
        if (std::abs(x) <= 0.9 * R)
            res.interior_sup = std::max(res.interior_sup, std::abs(lhs - res.constant));
        else if (std::abs(x) > R)
            ext = std::min(ext, lhs - res.constant);
    }
    res.exterior_margin = ext;
    return res;
}

}  // namespace fracpme
