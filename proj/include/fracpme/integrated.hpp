#pragma once

// Independent cross-check for the 1D convection case (b = 1) through the
// integrated variable v(x, tau) = int_{-inf}^x u, which solves
//   v_tau + |v_x| (-Delta)^{1-s} v + |v_x|^q = 0,
//   v(-inf) = 0, v(+inf) = M0,
// as a viscosity solution. The scheme is monotone: |v_x| is upwinded by the
// sign of the coefficient in front of it, and the nonlocal term uses the
// second-difference singular-integral quadrature
//   (-Delta)^beta v(x) = c_beta int_0^inf (2 v(x) - v(x+z) - v(x-z)) z^{-1-2beta} dz
// with exact per-cell weights (all positive) and closed-form tails for the
// constant extension by 0 / M0. Positive weights give a comparison-respecting
// stencil, which the Fourier multiplier would not.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fracpme/fft.hpp"
#include "fracpme/grid.hpp"

namespace fracpme {

// 1D fractional Laplacian constant c_{1,beta} = 4^beta Gamma(1/2+beta) /
// (sqrt(pi) |Gamma(-beta)|), beta in (0,1).
inline double frac_laplacian_constant(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw validation_error("frac_laplacian_constant: beta must lie in (0,1)");
    const double abs_gamma_neg = std::tgamma(1.0 - beta) / beta;  // |Gamma(-beta)|
    return std::pow(4.0, beta) * std::tgamma(0.5 + beta) /
           (std::sqrt(kPi) * abs_gamma_neg);
}

// Cumulative values at the n+1 cell faces of the grid.
struct IntegratedState {
    Grid1D grid;
    std::vector<double> v;
    double total_mass = 0.0;
    double t = 0.0;  // physical time tau
    long step_count = 0;

    IntegratedState(const Grid1D& g, std::vector<double> values, double m0)
        : grid(g), v(std::move(values)), total_mass(m0) {}
};

inline IntegratedState integrate_density(const Field& u) {
    if (u.min_value() < -1e-12 * std::max(1.0, u.linf()))
        throw validation_error("integrate_density: density must be nonnegative");
    const int n = u.size();
    std::vector<double> v(n + 1, 0.0);
    for (int i = 0; i < n; ++i) v[i + 1] = v[i] + std::max(u[i], 0.0) * u.grid().dx();
    const double m0 = v.back();
    return IntegratedState(u.grid(), std::move(v), m0);
}

// Face differences of v back onto cells, clamped at 0.
inline Field differentiate_cdf(const IntegratedState& state) {
    Field u(state.grid);
    const double inv_dx = 1.0 / state.grid.dx();
    for (int i = 0; i < state.grid.n_cells(); ++i)
        u[i] = std::max((state.v[i + 1] - state.v[i]) * inv_dx, 0.0);
    return u;
}

// Quadrature weights and the FFT workspace for (-Delta)^{1-s} on the node set,
// immutable after construction.
class IntegratedOperator {
  public:
    IntegratedOperator(const Grid1D& grid, double s)
        : grid_(grid), beta_(1.0 - s), n_nodes_(grid.n_cells() + 1) {
        require_s_range(s);
        const double c = frac_laplacian_constant(beta_);
        const double dx = grid.dx();
        const int K = n_nodes_;
        weights_.resize(K);
        for (int k = 1; k <= K; ++k) {
            const double lo = (k - 0.5) * dx, hi = (k + 0.5) * dx;
            weights_[k - 1] = c / (2.0 * beta_) *
                              (std::pow(lo, -2.0 * beta_) - std::pow(hi, -2.0 * beta_));
        }
        // inner half-cell [0, dx/2]: second-difference surrogate; keeps the
        // added weight positive, so monotonicity is untouched
        weights_[0] += c * std::pow(0.5 * dx, 2.0 - 2.0 * beta_) /
                       (dx * dx * (2.0 - 2.0 * beta_));
        tail_ = c / (2.0 * beta_) * std::pow((K + 0.5) * dx, -2.0 * beta_);
        weight_sum_ = tail_;
        for (double w : weights_) weight_sum_ += w;

        std::vector<double> kernel(2 * K + 1, 0.0);
        for (int k = 1; k <= K; ++k) {
            kernel[K + k] = weights_[k - 1];
            kernel[K - k] = weights_[k - 1];
        }
        plan_ = std::make_unique<ConvolutionPlan>(std::move(kernel), n_nodes_ + 2 * K);
        K_ = K;
    }

    double beta() const { return beta_; }
    // total weight, bounds the diagonal coefficient in the CFL estimate
    double weight_sum() const { return weight_sum_; }

    // (-Delta)^{1-s} v at all nodes, v extended by 0 on the left and M0 on the
    // right; the part of the extension beyond the kernel range is the exact
    // tail integral.
    std::vector<double> apply(const std::vector<double>& v, double m0) const {
        const int K = K_;
        std::vector<double> ext(n_nodes_ + 2 * K);
        for (int i = 0; i < K; ++i) ext[i] = 0.0;
        for (int i = 0; i < n_nodes_; ++i) ext[K + i] = v[i];
        for (int i = 0; i < K; ++i) ext[K + n_nodes_ + i] = m0;
        std::vector<double> conv;
        plan_->apply(ext, conv);
        std::vector<double> out(n_nodes_);
        double wsum = weight_sum_ - tail_;
        for (int j = 0; j < n_nodes_; ++j)
            out[j] = 2.0 * wsum * v[j] - conv[K + j] + tail_ * (2.0 * v[j] - m0);
        return out;
    }

  private:
    Grid1D grid_;
    double beta_;
    int n_nodes_;
    int K_ = 0;
    std::vector<double> weights_;
    double tail_ = 0.0;
    double weight_sum_ = 0.0;
    std::unique_ptr<ConvolutionPlan> plan_;
};

namespace detail {

inline void check_monotone(const std::vector<double>& v, double m0, double t) {
    const double tol = 1e-10 * std::max(m0, 1e-300);
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] < v[j - 1] - tol)
            throw solver_abort("integrated scheme lost monotonicity at t = " +
                               std::to_string(t));
}

}  // namespace detail

inline double integrated_cfl_dt(const IntegratedState& state, const IntegratedOperator& op,
                                double q, double cfl,
                                const std::vector<double>* nonlocal = nullptr) {
    const double dx = state.grid.dx();
    std::vector<double> a;
    if (!nonlocal) a = op.apply(state.v, state.total_mass);
    const std::vector<double>& A = nonlocal ? *nonlocal : a;
    double amax = 0.0;
    for (double x : A) amax = std::max(amax, std::abs(x));
    double pmax = 0.0;
    for (std::size_t j = 1; j < state.v.size(); ++j)
        pmax = std::max(pmax, (state.v[j] - state.v[j - 1]) / dx);
    const double denom = amax / dx + q * std::pow(std::max(pmax, 1e-300), q - 1.0) / dx +
                         2.0 * pmax * op.weight_sum();
    if (!(denom > 0.0)) return cfl * dx;
    return cfl / denom;
}

// One monotone explicit step; boundary nodes are pinned, the update is clamped
// to [0, M0] and to monotonicity (no-ops under the CFL bound).
inline double step_integrated(IntegratedState& state, const IntegratedOperator& op, double q,
                              double cfl, double dt_cap =
                                  std::numeric_limits<double>::infinity()) {
    const int n1 = static_cast<int>(state.v.size());
    const double dx = state.grid.dx();
    const std::vector<double> A = op.apply(state.v, state.total_mass);
    double dt = integrated_cfl_dt(state, op, q, cfl, &A);
    dt = std::min(dt, dt_cap);
    if (!(dt > 0.0)) throw solver_abort("integrated scheme: time step collapsed");

    std::vector<double> next(n1);
    next[0] = state.v[0];
    next[n1 - 1] = state.v[n1 - 1];
    for (int j = 1; j + 1 < n1; ++j) {
        const double pm = std::max((state.v[j] - state.v[j - 1]) / dx, 0.0);
        const double pp = std::max((state.v[j + 1] - state.v[j]) / dx, 0.0);
        // |v_x| A: upwind by the sign of A; |v_x|^q: rightward wave, upwind left
        const double ham = std::max(A[j], 0.0) * pm + std::min(A[j], 0.0) * pp +
                           std::pow(pm, q);
        next[j] = state.v[j] - dt * ham;
        if (!std::isfinite(next[j]))
            throw solver_abort("integrated scheme produced a non-finite value");
    }
    for (int j = 0; j < n1; ++j)
        next[j] = std::min(std::max(next[j], 0.0), state.total_mass);
    for (int j = 1; j < n1; ++j) next[j] = std::max(next[j], next[j - 1]);
    detail::check_monotone(next, state.total_mass, state.t);

    state.v.swap(next);
    state.t += dt;
    ++state.step_count;
    return dt;
}

}  // namespace fracpme
