#pragma once

// Explicit finite-volume time integration of
//   rho_t = d/dx [ rho ( d/dx (-Delta)^{-s} rho + x ) ]          (pure, similarity)
//           - P(t)^{-delta} rho^r                                (absorption)
//           - P(t)^{-theta} b d/dx rho^q                         (convection)
//           + eps rho_xx                                         (regularization)
// with P(t) = e^{lambda t}, lambda = 3-2s, delta = (r-1)/lambda - 1,
// theta = q/lambda - 1, and of the corresponding original-variable equations
// (physical frame: no confining x term, no P factors, clock is tau).
//
// Scheme: forward Euler, upwind face fluxes for the self-generated transport,
// separate upwinding (by sign of b) for the convection flux, second differences
// for the eps term, and an exact local ODE solve for the absorption term, so
// positivity never relies on the CFL of the source.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracpme/barenblatt.hpp"
#include "fracpme/entropy.hpp"
#include "fracpme/frac_ops.hpp"
#include "fracpme/grid.hpp"

namespace fracpme {

enum class Equation { pure, absorption, convection, convection_integrated };

inline std::string to_string(Equation e) {
    switch (e) {
        case Equation::pure: return "pure";
        case Equation::absorption: return "absorption";
        case Equation::convection: return "convection";
        case Equation::convection_integrated: return "convection_integrated";
    }
    return "?";
}

inline std::string to_string(Frame f) {
    return f == Frame::similarity ? "similarity" : "physical";
}

struct InitialCondition {
    enum class Type { box, gaussian, perturbed_barenblatt };
    Type type = Type::box;
    double mass = 1.0;
    double half_width = 1.0;  // box
    double sigma = 0.5;       // gaussian
    double center = 0.0;
    double amplitude = 0.0;   // perturbed_barenblatt: rho_M * (1 + a * bump)
    double bump_width = 0.5;
};

struct SolverConfig {
    Equation equation = Equation::pure;
    Frame frame = Frame::similarity;
    double s = 0.25;
    double r = 4.0;
    double q = 3.0;
    double b = 1.0;
    double epsilon = 0.0;
    double L = 4.0;
    int n = 1024;
    double cfl = 0.4;
    double t_end = 5.0;
    double output_every = 0.1;
    InitialCondition initial;
    unsigned long seed = 0;

    double lambda() const { return 3.0 - 2.0 * s; }
    double delta() const { return (r - 1.0) / lambda() - 1.0; }
    double theta() const { return q / lambda() - 1.0; }
    Grid1D grid() const { return Grid1D(L, n); }

    void validate() const {
        require_s_range(s);
        if (!(L > 0.0)) throw validation_error("config: L must be > 0");
        if (n < 8) throw validation_error("config: n must be >= 8");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw validation_error("config: cfl must lie in (0, 1]");
        if (!(t_end > 0.0)) throw validation_error("config: t_end must be > 0");
        if (!(output_every > 0.0)) throw validation_error("config: output_every must be > 0");
        if (!(epsilon >= 0.0)) throw validation_error("config: epsilon must be >= 0");
        if (!(initial.mass > 0.0)) throw validation_error("config: initial mass must be > 0");
        if (equation == Equation::absorption && !(delta() > 0.0))
            throw validation_error(
                "config: absorption requires the diffusion-dominated regime "
                "delta = (r-1)/lambda - 1 > 0, i.e. r > 4-2s");
        if ((equation == Equation::convection ||
             equation == Equation::convection_integrated) &&
            !(theta() > 0.0))
            throw validation_error(
                "config: convection requires the diffusion-dominated regime "
                "theta = q/lambda - 1 > 0, i.e. q > 3-2s");
        if (equation == Equation::convection_integrated) {
            if (frame != Frame::physical)
                throw validation_error("config: the integrated form runs in the physical frame");
            if (b != 1.0)
                throw validation_error("config: the integrated form is derived for b = 1");
        }
    }
};

// t here is the run's native clock: similarity time in the similarity frame,
// physical time tau in the physical frame.
struct SimState {
    Field rho;
    double t = 0.0;
    long step_count = 0;
    double absorbed_mass = 0.0;
    double initial_mass = 0.0;

    explicit SimState(Field f) : rho(std::move(f)), initial_mass(rho.mass()) {}
};

inline Field make_initial_condition(const InitialCondition& ic, const Grid1D& grid,
                                    double s) {
    Field f(grid);
    switch (ic.type) {
        case InitialCondition::Type::box: {
            const double h = ic.mass / (2.0 * ic.half_width);
            const double a = ic.center - ic.half_width, b = ic.center + ic.half_width;
            if (a < -grid.half_width() || b > grid.half_width())
                throw validation_error("initial box does not fit the domain");
            for (int i = 0; i < grid.n_cells(); ++i) {
                const double lo = std::max(grid.face(i), a);
                const double hi = std::min(grid.face(i + 1), b);
                if (hi > lo) f[i] = h * (hi - lo) / grid.dx();
            }
            break;
        }
        case InitialCondition::Type::gaussian: {
            // truncated at 4 sigma so the state is compactly supported
            for (int i = 0; i < grid.n_cells(); ++i) {
                const double z = (grid.center(i) - ic.center) / ic.sigma;
                if (std::abs(z) <= 4.0) f[i] = std::exp(-0.5 * z * z);
            }
            break;
        }
        case InitialCondition::Type::perturbed_barenblatt: {
            const BarenblattProfile prof(ic.mass, s);
            f = prof.sample_on_grid(grid);
            for (int i = 0; i < grid.n_cells(); ++i) {
                const double z = (grid.center(i) - ic.center) / ic.bump_width;
                f[i] *= 1.0 + ic.amplitude * std::exp(-0.5 * z * z);
            }
            break;
        }
    }
    const double m = f.mass();
    if (!(m > 0.0)) throw validation_error("initial condition has no mass");
    const double scale = ic.mass / m;
    for (int i = 0; i < f.size(); ++i) f[i] *= scale;
    return f;
}

namespace detail {

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// P(t)^{-e} factor for the similarity frame, 1 in the physical frame.
inline double p_factor(const SolverConfig& cfg, double t, double exponent) {
    if (cfg.frame == Frame::physical) return 1.0;
    return std::exp(-cfg.lambda() * t * exponent);
}

inline double cfl_dt_from_velocity(const SimState& state, const SolverConfig& cfg,
                                   const std::vector<double>& v) {
    const double dx = state.rho.grid().dx();
    const double rho_max = state.rho.linf();
    if (rho_max == 0.0) return cfg.cfl * dx;  // free fall under the drift only
    double dt = std::numeric_limits<double>::infinity();
    const double vmax = max_abs(v);
    if (vmax > 0.0) dt = std::min(dt, dx / vmax);
    if (cfg.epsilon > 0.0) dt = std::min(dt, dx * dx / (2.0 * cfg.epsilon));
    if (cfg.equation == Equation::convection) {
        const double speed = cfg.q * std::pow(rho_max, cfg.q - 1.0) *
                             p_factor(cfg, state.t, cfg.theta()) * std::abs(cfg.b);
        if (speed > 0.0) dt = std::min(dt, dx / speed);
    }
    if (!std::isfinite(dt)) dt = dx;
    return cfg.cfl * dt;
}

// One forward-Euler update with a given velocity and dt. Transport,
// convection and eps-diffusion are flux-form from the pre-step state;
// absorption is the exact local solve applied afterwards.
inline void advance(SimState& state, const SolverConfig& cfg,
                    const std::vector<double>& v, double dt) {
    Field& rho = state.rho;
    const Grid1D& g = rho.grid();
    const int n = g.n_cells();
    const double dx = g.dx();
    const double coef = dt / dx;

    std::vector<double> next(n);
    {
        // upwind transport fluxes at faces, zero ghost cells
        std::vector<double> flux(n + 1, 0.0);
        for (int j = 0; j <= n; ++j) {
            const double left = j > 0 ? rho[j - 1] : 0.0;
            const double right = j < n ? rho[j] : 0.0;
            flux[j] = std::max(v[j], 0.0) * left + std::min(v[j], 0.0) * right;
        }
        for (int i = 0; i < n; ++i) next[i] = rho[i] - coef * (flux[i + 1] - flux[i]);
    }

    if (cfg.equation == Equation::convection) {
        const double fac = p_factor(cfg, state.t, cfg.theta()) * cfg.b;
        std::vector<double> flux(n + 1, 0.0);
        if (cfg.b > 0.0) {
            for (int j = 1; j <= n; ++j) flux[j] = fac * std::pow(rho[j - 1], cfg.q);
        } else {
            for (int j = 0; j < n; ++j) flux[j] = fac * std::pow(rho[j], cfg.q);
        }
        for (int i = 0; i < n; ++i) next[i] -= coef * (flux[i + 1] - flux[i]);
    }

    if (cfg.epsilon > 0.0) {
        const double nu = cfg.epsilon * dt / (dx * dx);
        for (int i = 0; i < n; ++i) {
            const double lo = i > 0 ? rho[i - 1] : 0.0;
            const double hi = i + 1 < n ? rho[i + 1] : 0.0;
            next[i] += nu * (lo - 2.0 * rho[i] + hi);
        }
    }

    if (cfg.equation == Equation::absorption) {
        // d rho / dt = -P^{-delta} rho^r solved exactly with P frozen:
        // rho_new = rho (1 + (r-1) P^{-delta} dt rho^{r-1})^{-1/(r-1)}
        const double fac = p_factor(cfg, state.t, cfg.delta()) * dt * (cfg.r - 1.0);
        double removed = 0.0;
        for (int i = 0; i < n; ++i) {
            if (next[i] <= 0.0) continue;
            const double before = next[i];
            next[i] = before * std::pow(1.0 + fac * std::pow(before, cfg.r - 1.0),
                                        -1.0 / (cfg.r - 1.0));
            removed += before - next[i];
        }
        state.absorbed_mass += removed * dx;
    }

    // rounding clamp; anything worse is a CFL/positivity failure
    const double tol = 1e-12 * std::max(rho.linf(), 1e-300);
    for (int i = 0; i < n; ++i) {
        if (next[i] < 0.0) {
            if (next[i] < -tol)
                throw solver_abort("positivity lost (CFL violation) at t = " +
                                   std::to_string(state.t));
            next[i] = 0.0;
        }
        if (!std::isfinite(next[i]))
            throw solver_abort("non-finite density at t = " + std::to_string(state.t));
    }

    rho.values().swap(next);
    state.t += dt;
    ++state.step_count;

    // support monitor: mass outside |x| > 0.8 L must stay negligible
    double outside = 0.0;
    for (int i = 0; i < n; ++i)
        if (std::abs(g.center(i)) > 0.8 * g.half_width()) outside += rho[i];
    outside *= dx;
    if (outside > 1e-10 * state.initial_mass)
        throw solver_abort("support reached the domain boundary (domain too small) at t = " +
                           std::to_string(state.t));
}

}  // namespace detail

inline double cfl_dt(const SimState& state, const SolverConfig& cfg) {
    if (state.rho.linf() == 0.0) return cfg.cfl * state.rho.grid().dx();
    const std::vector<double> v =
        velocity_field(state.rho, cfg.s, cfg.frame);
    return detail::cfl_dt_from_velocity(state, cfg, v);
}

// One CFL-limited step (velocity computed once, shared by dt and fluxes).
inline void step(SimState& state, const SolverConfig& cfg, double dt_cap =
                     std::numeric_limits<double>::infinity()) {
    const std::vector<double> v = velocity_field(state.rho, cfg.s, cfg.frame);
    double dt = detail::cfl_dt_from_velocity(state, cfg, v);
    dt = std::min(dt, dt_cap);
    if (!(dt > 0.0)) throw solver_abort("time step collapsed to zero");
    detail::advance(state, cfg, v, dt);
}

// Similarity variables (N=1): x = y (1+lambda tau)^{-1/lambda},
// t = log(1+lambda tau)/lambda, rho = (1+lambda tau)^{1/lambda} u.
struct FrameMap {
    Field field;
    double time;  // similarity t (to_similarity) or physical tau (to_physical)
};

inline double similarity_time(double tau, double lambda) {
    return std::log1p(lambda * tau) / lambda;
}

inline double physical_time(double t, double lambda) {
    return std::expm1(lambda * t) / lambda;
}

inline FrameMap to_similarity(const Field& u, double tau, double s) {
    if (!(tau >= 0.0)) throw validation_error("to_similarity: tau must be >= 0");
    const double lambda = 3.0 - 2.0 * s;
    const double a = std::pow(1.0 + lambda * tau, 1.0 / lambda);
    Grid1D gx(u.grid().half_width() / a, u.grid().n_cells());
    Field rho(gx);
    for (int i = 0; i < u.size(); ++i) rho[i] = a * u[i];
    return {std::move(rho), similarity_time(tau, lambda)};
}

inline FrameMap to_physical(const Field& rho, double t, double s) {
    if (!(t >= 0.0)) throw validation_error("to_physical: t must be >= 0");
    const double lambda = 3.0 - 2.0 * s;
    const double tau = physical_time(t, lambda);
    const double a = std::pow(1.0 + lambda * tau, 1.0 / lambda);
    Grid1D gy(rho.grid().half_width() * a, rho.grid().n_cells());
    Field u(gy);
    for (int i = 0; i < rho.size(); ++i) u[i] = rho[i] / a;
    return {std::move(u), tau};
}

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    InequalityViolations violations;
    double initial_mass = 0.0;
    double absorbed_mass = 0.0;
    double m_infty_estimate = 0.0;
    long steps = 0;
    int moment_monitor_violations = 0;
    std::optional<Field> final_state;  // in the run's native frame
};

// Second-moment boundedness monitor: m2 must stay below 10x its running
// maximum over the first time unit.
inline int count_moment_violations(const std::vector<DiagnosticsRecord>& records) {
    if (records.empty()) return 0;
    double ref = 0.0;
    for (const auto& r : records)
        if (r.t <= 1.0 || &r == &records.front()) ref = std::max(ref, r.m2);
    int bad = 0;
    for (const auto& r : records)
        if (r.m2 > 10.0 * ref) ++bad;
    return bad;
}

namespace detail {

inline DiagnosticsRecord emit_record(const SimState& state, const SolverConfig& cfg) {
    if (cfg.frame == Frame::similarity) {
        const double tau = physical_time(state.t, cfg.lambda());
        return make_record(state.rho, cfg.s, state.t, tau);
    }
    // physical frame: native norms from u, entropy diagnostics from the
    // similarity image (the theorems live there)
    const double tau = state.t;
    const FrameMap sim = to_similarity(state.rho, tau, cfg.s);
    DiagnosticsRecord rec = make_record(sim.field, cfg.s, sim.time, tau);
    rec.mass = state.rho.mass();
    rec.l1 = state.rho.l1();
    rec.l2 = state.rho.l2();
    rec.linf = state.rho.linf();
    rec.min_density = state.rho.min_value();
    rec.support_radius = support_radius(state.rho);
    return rec;
}

}  // namespace detail

// Integrate to t_end (native clock), emitting a record every output_every
// units; output times are hit exactly.
inline RunResult run(const SolverConfig& cfg) {
    cfg.validate();
    const Grid1D grid = cfg.grid();
    SimState state(make_initial_condition(cfg.initial, grid, cfg.s));
    RunResult out;
    out.initial_mass = state.initial_mass;

    const double eps_t = 1e-12 * std::max(1.0, cfg.t_end);
    auto emit = [&]() {
        DiagnosticsRecord rec = detail::emit_record(state, cfg);
        count_violations(rec, out.violations);
        out.records.push_back(rec);
    };

    emit();
    long k = 1;
    while (cfg.t_end - state.t > eps_t) {
        const double target = std::min(k * cfg.output_every, cfg.t_end);
        while (target - state.t > eps_t) step(state, cfg, target - state.t);
        emit();
        ++k;
    }
    out.absorbed_mass = state.absorbed_mass;
    out.m_infty_estimate = out.initial_mass - state.absorbed_mass;
    out.steps = state.step_count;
    out.moment_monitor_violations = count_moment_violations(out.records);
    out.final_state = state.rho;
    return out;
}

struct LpDecayFit {
    double slope = 0.0;
    double expected = 0.0;  // diffusion-dominated -(p-1)/(p lambda), N=1
    int points = 0;
};

// Least-squares slope of log ||u||_p against log tau over the last decade of
// tau. p is 1, 2 or infinity (pass p <= 0 for infinity).
inline LpDecayFit lp_decay_check(const std::vector<DiagnosticsRecord>& records, double p,
                                 double s) {
    const double lambda = 3.0 - 2.0 * s;
    LpDecayFit fit;
    fit.expected = p <= 0.0 ? -1.0 / lambda : -(p - 1.0) / (p * lambda);
    double tau_max = 0.0;
    for (const auto& r : records) tau_max = std::max(tau_max, r.tau);
    const double tau_min = tau_max / 10.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : records) {
        if (r.tau < tau_min || r.tau <= 0.0) continue;
        double norm = 0.0;
        if (p <= 0.0) norm = r.linf;
        else if (p == 1.0) norm = r.l1;
        else if (p == 2.0) norm = r.l2;
        else throw validation_error("lp_decay_check: p must be 1, 2 or infinity");
        if (!(norm > 0.0)) continue;
        const double x = std::log(r.tau), y = std::log(norm);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 5) throw validation_error("lp_decay_check: fewer than 5 samples in the window");
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.points = m;
    return fit;
}

}  // namespace fracpme
