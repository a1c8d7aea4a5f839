#pragma once

// Decay-rate fitting against the theory:
//   pure        H_rel <~ e^{-2t}
//   absorption  H_rel <= C (1+t)^2 e^{-2 min(1, lambda delta) t}
//   convection  H_rel <= C (1+t)^2 e^{-2 min(1, lambda theta) t}
// The (1+t)^2 prefactor is removed before fitting when prefactor_mode is
// log_square. These are upper bounds, so acceptance checks are one-sided:
// fitted decay at least 0.8x the theoretical rate passes.

#include <cmath>
#include <string>
#include <vector>

#include "fracpme/entropy.hpp"
#include "fracpme/solver.hpp"

namespace fracpme {

enum class PrefactorMode { none, log_square };

enum class FitQuantity { H_rel, hneg_s_sq, w2 };

inline std::string to_string(PrefactorMode m) {
    return m == PrefactorMode::none ? "none" : "log_square";
}

inline std::string to_string(FitQuantity q) {
    switch (q) {
        case FitQuantity::H_rel: return "H_rel";
        case FitQuantity::hneg_s_sq: return "hneg_s_sq";
        case FitQuantity::w2: return "w2";
    }
    return "?";
}

struct RateFit {
    double fitted_exponent = 0.0;
    double intercept = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    double residual_rms = 0.0;
    double theoretical_exponent = 0.0;
    PrefactorMode prefactor_mode = PrefactorMode::none;
    int points = 0;
};

// Decay rate the theorems give for H_rel under the config's parameters.
inline double theoretical_rate(const SolverConfig& cfg) {
    switch (cfg.equation) {
        case Equation::pure:
            return 2.0;
        case Equation::absorption: {
            const double d = cfg.delta();
            if (!(d > 0.0))
                throw validation_error(
                    "theoretical_rate: absorption outside the diffusion-dominated "
                    "regime (need delta = (r-1)/lambda - 1 > 0)");
            return 2.0 * std::min(1.0, cfg.lambda() * d);
        }
        case Equation::convection:
        case Equation::convection_integrated: {
            const double th = cfg.theta();
            if (!(th > 0.0))
                throw validation_error(
                    "theoretical_rate: convection outside the diffusion-dominated "
                    "regime (need theta = q/lambda - 1 > 0)");
            return 2.0 * std::min(1.0, cfg.lambda() * th);
        }
    }
    throw validation_error("theoretical_rate: unknown equation");
}

// H^{-s} gap decays at the H_rel rate; W2 at half of it.
inline double theoretical_exponent_for(FitQuantity q, double h_rel_rate) {
    return q == FitQuantity::w2 ? -0.5 * h_rel_rate : -h_rel_rate;
}

inline double record_quantity(const DiagnosticsRecord& r, FitQuantity q) {
    switch (q) {
        case FitQuantity::H_rel: return r.H_rel;
        case FitQuantity::hneg_s_sq: return r.hneg_s_sq;
        case FitQuantity::w2: return r.w2;
    }
    return 0.0;
}

// OLS of log(quantity) - prefactor correction against t over [t0, t1].
// The first nonpositive (or below-floor) value inside the window terminates it.
inline RateFit fit_decay_rate(const std::vector<DiagnosticsRecord>& records,
                              FitQuantity quantity, PrefactorMode prefactor_mode,
                              double t0, double t1,
                              double theoretical_h_rel_rate = 0.0,
                              double floor = 0.0) {
    if (!(t1 > t0)) throw validation_error("fit_decay_rate: empty window");
    std::vector<double> ts, ys;
    for (const auto& r : records) {
        if (r.t < t0 || r.t > t1) continue;
        const double v = record_quantity(r, quantity);
        if (!(v > floor)) break;  // below-floor terminates the usable window
        double y = std::log(v);
        if (prefactor_mode == PrefactorMode::log_square) y -= 2.0 * std::log1p(r.t);
        ts.push_back(r.t);
        ys.push_back(y);
    }
    if (ts.size() < 5)
        throw validation_error("fit_decay_rate: fewer than 5 usable points in the window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(ts.size());
    for (int i = 0; i < m; ++i) {
        sx += ts[i]; sy += ys[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * ys[i];
    }
    RateFit fit;
    fit.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.fitted_exponent * sx) / m;
    fit.window_start = t0;
    fit.window_end = t1;
    fit.prefactor_mode = prefactor_mode;
    fit.points = m;
    fit.theoretical_exponent = theoretical_exponent_for(quantity, theoretical_h_rel_rate);
    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
        const double e = ys[i] - (fit.intercept + fit.fitted_exponent * ts[i]);
        ss += e * e;
    }
    fit.residual_rms = std::sqrt(ss / m);
    return fit;
}

}  // namespace fracpme
