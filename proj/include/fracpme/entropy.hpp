#pragma once

// Entropy diagnostics for the transformed flow:
//   H[rho]   = 1/2 int rho (-Delta)^{-s} rho + 1/2 int x^2 rho
//   I[rho]   = int rho | d/dx (-Delta)^{-s} rho + x |^2
//   H[rho|rho_M] = H[rho] - H[rho_M]
// plus the eps-regularized variants, the quantile-coupled Wasserstein-2
// distance, even moments, and the inequality checks the theory provides:
//   H[rho|rho_M] <= I[rho]/2,             (entropy-entropy dissipation, N=1)
//   ||(-Delta)^{-s/2}(rho-rho_M)||_2^2 <= 2 H[rho|rho_M],
//   W_2(rho, rho_M)^2 <= 2 H[rho|rho_M].  (Talagrand)

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "fracpme/barenblatt.hpp"
#include "fracpme/frac_ops.hpp"
#include "fracpme/grid.hpp"

namespace fracpme {

inline double entropy(const Field& rho, double s, const Field* potential = nullptr) {
    if (rho.min_value() < -1e-12 * std::max(1.0, rho.linf()))
        throw validation_error("entropy: density must be nonnegative");
    const Field pot = potential ? *potential : riesz_potential(rho, s);
    double inter = 0.0, conf = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        inter += rho[i] * pot[i];
        const double x = rho.grid().center(i);
        conf += x * x * rho[i];
    }
    return 0.5 * (inter + conf) * rho.grid().dx();
}

// I[rho] with the face velocity averaged back to centers.
inline double dissipation(const Field& rho, double s) {
    const std::vector<double> v = velocity_field(rho, s, Frame::similarity);
    double acc = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        const double vc = 0.5 * (v[i] + v[i + 1]);
        acc += rho[i] * vc * vc;
    }
    return acc * rho.grid().dx();
}

inline double relative_entropy(const Field& rho, const BarenblattProfile& profile) {
    const double m = rho.mass();
    if (std::abs(m - profile.mass()) > 1e-8 * std::max(m, profile.mass()))
        throw validation_error("relative_entropy: field mass does not match the profile");
    const Field ref = profile.sample_on_grid(rho.grid());
    return entropy(rho, profile.s()) - entropy(ref, profile.s());
}

// Density floor used wherever log rho appears: cells below it contribute 0,
// matching the x log x -> 0 limit.
inline double log_floor(const Field& rho) {
    return 1e-14 * rho.mass() / (2.0 * rho.grid().half_width());
}

inline double log_weight_integral(const Field& rho) {
    const double floor = log_floor(rho);
    double acc = 0.0;
    for (int i = 0; i < rho.size(); ++i)
        if (rho[i] > floor) acc += rho[i] * std::log(rho[i]);
    return acc * rho.grid().dx();
}

// H_eps[rho] = H[rho] + eps int rho log rho
inline double regularized_entropy(const Field& rho, double s, double epsilon) {
    double h = entropy(rho, s);
    if (epsilon != 0.0) h += epsilon * log_weight_integral(rho);
    return h;
}

// I_eps[rho] = int rho | d/dx (-Delta)^{-s} rho + x + eps d/dx log rho |^2
// floor_override < 0 means the default log_floor(rho).
inline double regularized_dissipation(const Field& rho, double s, double epsilon,
                                      double floor_override = -1.0) {
    const std::vector<double> v = velocity_field(rho, s, Frame::similarity);
    const double floor = floor_override >= 0.0 ? floor_override : log_floor(rho);
    const double dx = rho.grid().dx();
    double acc = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        double w = -0.5 * (v[i] + v[i + 1]);  // = d/dx pot + x at center
        if (epsilon != 0.0) {
            const double rm = i > 0 ? rho[i - 1] : 0.0;
            const double rp = i + 1 < rho.size() ? rho[i + 1] : 0.0;
            w += epsilon * (rp - rm) / (2.0 * dx * std::max(rho[i], floor));
        }
        acc += rho[i] * w * w;
    }
    return acc * dx;
}

namespace detail {

// Piecewise-linear CDF of a cell-averaged density: exact on faces, linear in
// between (density constant per cell).
struct Cdf {
    const Field* f;
    std::vector<double> cum;  // cumulative mass at faces, size n+1

    explicit Cdf(const Field& field) : f(&field), cum(field.size() + 1, 0.0) {
        const double dx = field.grid().dx();
        for (int i = 0; i < field.size(); ++i)
            cum[i + 1] = cum[i] + std::max(field[i], 0.0) * dx;
    }

    double total() const { return cum.back(); }

    // Quantile, linear within cells. Where the CDF is flat the quantile jumps;
    // from_above picks the right-hand limit (needed when m is the left
    // endpoint of an integration interval), the default the left-hand one.
    double quantile(double m, bool from_above = false) const {
        const auto it = from_above ? std::upper_bound(cum.begin(), cum.end(), m)
                                   : std::lower_bound(cum.begin(), cum.end(), m);
        int j = static_cast<int>(it - cum.begin());
        j = std::min(std::max(j, 1), static_cast<int>(cum.size()) - 1);
        const double lo = cum[j - 1], hi = cum[j];
        const double t = hi > lo ? std::min(std::max((m - lo) / (hi - lo), 0.0), 1.0)
                                 : (from_above ? 0.0 : 1.0);
        return f->grid().face(j - 1) + t * f->grid().dx();
    }
};

}  // namespace detail

// W_2 by exact quantile coupling: W_2^2 = int_0^M (F1^{-1}(m) - F2^{-1}(m))^2 dm.
// Both quantiles are piecewise linear in m between the merged face-mass
// breakpoints, so Simpson on each sub-interval integrates the quadratic
// integrand exactly. Deterministic, no optimization.
inline double wasserstein2(const Field& rho1, const Field& rho2) {
    if (rho1.min_value() < -1e-12 || rho2.min_value() < -1e-12)
        throw validation_error("wasserstein2: densities must be nonnegative");
    const detail::Cdf c1(rho1), c2(rho2);
    const double m1 = c1.total(), m2 = c2.total();
    if (std::abs(m1 - m2) > 1e-8 * std::max({m1, m2, 1e-300}))
        throw validation_error("wasserstein2: masses differ beyond tolerance");
    const double M = std::min(m1, m2);
    std::vector<double> breaks;
    breaks.reserve(c1.cum.size() + c2.cum.size());
    for (double m : c1.cum)
        if (m > 0.0 && m < M) breaks.push_back(m);
    for (double m : c2.cum)
        if (m > 0.0 && m < M) breaks.push_back(m);
    breaks.push_back(0.0);
    breaks.push_back(M);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double acc = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double a = breaks[b], c = breaks[b + 1];
        if (c <= a) continue;
        const double mid = 0.5 * (a + c);
        const double ga = c1.quantile(a, true) - c2.quantile(a, true);
        const double gm = c1.quantile(mid) - c2.quantile(mid);
        const double gc = c1.quantile(c) - c2.quantile(c);
        acc += (c - a) / 6.0 * (ga * ga + 4.0 * gm * gm + gc * gc);
    }
    return std::sqrt(std::max(acc, 0.0));
}

// Margin of the entropy-entropy dissipation inequality: I/2 - H[rho|rho_M].
// Nonnegative in the continuum for N=1, s<1/2.
inline double check_entropy_dissipation(const Field& rho, const BarenblattProfile& profile,
                                        double s) {
    return 0.5 * dissipation(rho, s) - relative_entropy(rho, profile);
}

inline double moment(const Field& rho, int order) {
    if (order <= 0 || order % 2 != 0)
        throw validation_error("moment: only positive even orders are tracked");
    double acc = 0.0;
    for (int i = 0; i < rho.size(); ++i)
        acc += std::pow(rho.grid().center(i), order) * rho[i];
    return acc * rho.grid().dx();
}

// One diagnostics output row. CSV column order is frozen:
// t,tau,mass,l1,l2,linf,H,I,H_rel,hneg_s_sq,w2,m2,m2n,min_density,support_radius
struct DiagnosticsRecord {
    double t = 0.0;
    double tau = 0.0;
    double mass = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double H = 0.0;
    double I = 0.0;
    double H_rel = 0.0;
    double hneg_s_sq = 0.0;
    double w2 = 0.0;
    double m2 = 0.0;
    double m2n = 0.0;
    double min_density = 0.0;
    double support_radius = 0.0;

    static const char* csv_header() {
        return "t,tau,mass,l1,l2,linf,H,I,H_rel,hneg_s_sq,w2,m2,m2n,min_density,"
               "support_radius";
    }

    // Entropy scale used by the inequality tolerances (tol = 1e-3 * scale).
    double inequality_scale() const {
        return std::max({std::abs(H), std::abs(H - H_rel), 1e-300});
    }
};

struct InequalityViolations {
    int entropy_dissipation = 0;  // H_rel <= I/2 + tol
    int hneg_bound = 0;           // hneg_s_sq <= 2 H_rel + tol
    int talagrand = 0;            // w2^2 <= 2 H_rel + tol
    int total() const { return entropy_dissipation + hneg_bound + talagrand; }
};

inline void count_violations(const DiagnosticsRecord& r, InequalityViolations& v,
                             double rel_tol = 1e-3) {
    const double tol = rel_tol * r.inequality_scale();
    if (r.H_rel > 0.5 * r.I + tol) ++v.entropy_dissipation;
    if (r.hneg_s_sq > 2.0 * r.H_rel + tol) ++v.hneg_bound;
    if (r.w2 * r.w2 > 2.0 * r.H_rel + tol) ++v.talagrand;
}

// Full diagnostics of a state against the Barenblatt profile re-fit to the
// instantaneous mass. moment_order controls the m2n column.
inline DiagnosticsRecord make_record(const Field& rho, double s, double t, double tau,
                                     int moment_order = 4) {
    DiagnosticsRecord r;
    r.t = t;
    r.tau = tau;
    r.mass = rho.mass();
    r.l1 = rho.l1();
    r.l2 = rho.l2();
    r.linf = rho.linf();
    const Field pot = riesz_potential(rho, s);
    r.H = entropy(rho, s, &pot);
    r.I = dissipation(rho, s);
    const BarenblattProfile prof(r.mass, s);
    const Field ref = prof.sample_on_grid(rho.grid());
    r.H_rel = r.H - entropy(ref, s);
    Field diff(rho.grid());
    for (int i = 0; i < rho.size(); ++i) diff[i] = rho[i] - ref[i];
    r.hneg_s_sq = neg_sobolev_seminorm_sq(diff, s);
    r.w2 = wasserstein2(rho, ref);
    r.m2 = moment(rho, 2);
    r.m2n = moment(rho, moment_order);
    r.min_density = rho.min_value();
    r.support_radius = support_radius(rho);
    return r;
}

}  // namespace fracpme
