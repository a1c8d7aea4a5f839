#include <catch2/catch_amalgamated.hpp>

#include "fracpme/ratefit.hpp"

using namespace fracpme;
using Catch::Approx;

namespace {
std::vector<DiagnosticsRecord> synthetic(double rate, bool log_square_prefactor,
                                         double t_end = 5.0, double dt = 0.1) {
    std::vector<DiagnosticsRecord> recs;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
        DiagnosticsRecord r;
        r.t = t;
        double v = std::exp(rate * t);
        if (log_square_prefactor) v *= (1.0 + t) * (1.0 + t);
        r.H_rel = v;
        r.hneg_s_sq = v;
        r.w2 = std::sqrt(v);
        recs.push_back(r);
    }
    return recs;
}
}  // namespace

TEST_CASE("exact exponentials are fitted to machine precision") {
    const auto recs = synthetic(-2.0, false);
    const RateFit fit =
        fit_decay_rate(recs, FitQuantity::H_rel, PrefactorMode::none, 1.0, 4.0, 2.0);
    REQUIRE(fit.fitted_exponent == Approx(-2.0).margin(1e-10));
    REQUIRE(fit.residual_rms < 1e-10);
    REQUIRE(fit.theoretical_exponent == -2.0);
}

TEST_CASE("the (1+t)^2 prefactor is removed exactly in log_square mode") {
    const auto recs = synthetic(-1.0, true);
    const RateFit fit =
        fit_decay_rate(recs, FitQuantity::H_rel, PrefactorMode::log_square, 1.0, 4.0, 1.0);
    REQUIRE(fit.fitted_exponent == Approx(-1.0).margin(1e-10));
    REQUIRE(fit.residual_rms < 1e-10);

    // without the correction the fit is visibly shallower
    const RateFit raw =
        fit_decay_rate(recs, FitQuantity::H_rel, PrefactorMode::none, 1.0, 4.0, 1.0);
    REQUIRE(raw.fitted_exponent > -0.9);
}

TEST_CASE("w2 carries half the theoretical H_rel exponent") {
    const auto recs = synthetic(-2.0, false);
    const RateFit fit =
        fit_decay_rate(recs, FitQuantity::w2, PrefactorMode::none, 1.0, 4.0, 2.0);
    REQUIRE(fit.fitted_exponent == Approx(-1.0).margin(1e-10));
    REQUIRE(fit.theoretical_exponent == -1.0);
}

TEST_CASE("theoretical rates from the theorems") {
    SolverConfig cfg;
    cfg.s = 0.25;
    cfg.equation = Equation::pure;
    REQUIRE(theoretical_rate(cfg) == 2.0);

    cfg.equation = Equation::absorption;
    cfg.r = 4.0;  // lambda = 2.5, delta = 0.2, rate = 2 min(1, 0.5) = 1
    REQUIRE(theoretical_rate(cfg) == Approx(1.0).epsilon(1e-14));
    cfg.r = 9.0;  // delta = 2.2, lambda delta > 1, rate saturates at 2
    REQUIRE(theoretical_rate(cfg) == Approx(2.0).epsilon(1e-14));
    cfg.r = 2.0;  // outside the regime
    REQUIRE_THROWS_WITH(theoretical_rate(cfg),
                        Catch::Matchers::ContainsSubstring("regime"));

    cfg.equation = Equation::convection;
    cfg.q = 3.0;  // theta = 0.2, rate = 1
    REQUIRE(theoretical_rate(cfg) == Approx(1.0).epsilon(1e-14));
    cfg.q = 2.0;
    REQUIRE_THROWS_AS(theoretical_rate(cfg), validation_error);
}

TEST_CASE("windows with too few or nonpositive points are rejected") {
    auto recs = synthetic(-2.0, false, 0.3);
    REQUIRE_THROWS_AS(
        fit_decay_rate(recs, FitQuantity::H_rel, PrefactorMode::none, 0.0, 0.3, 2.0),
        validation_error);

    auto dead = synthetic(-2.0, false);
    for (auto& r : dead)
        if (r.t > 2.0) r.H_rel = 0.0;  // below-floor terminates the window
    const RateFit fit =
        fit_decay_rate(dead, FitQuantity::H_rel, PrefactorMode::none, 1.0, 4.0, 2.0);
    REQUIRE(fit.fitted_exponent == Approx(-2.0).margin(1e-10));
    for (auto& r : dead) r.H_rel = 0.0;
    REQUIRE_THROWS_AS(
        fit_decay_rate(dead, FitQuantity::H_rel, PrefactorMode::none, 1.0, 4.0, 2.0),
        validation_error);
}
