#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fracpme/entropy.hpp"
#include "fracpme/solver.hpp"
#include "oracles.hpp"

using namespace fracpme;
using Catch::Approx;

TEST_CASE("entropy: zero field, direct-sum oracle, negative density rejected") {
    const Grid1D g(4.0, 256);
    REQUIRE(entropy(Field(g), 0.25) == 0.0);

    std::mt19937_64 rng(5);
    const Field f = oracles::random_bumps(g, rng);
    const double direct = 0.5 * oracles::bilinear_direct(f, f, 0.25) +
                          0.5 * [&] {
                              double acc = 0.0;
                              for (int i = 0; i < f.size(); ++i)
                                  acc += g.center(i) * g.center(i) * f[i];
                              return acc * g.dx();
                          }();
    REQUIRE(entropy(f, 0.25) == Approx(direct).epsilon(1e-8));

    Field bad(g);
    bad[10] = -1.0;
    REQUIRE_THROWS_AS(entropy(bad, 0.25), validation_error);
}

TEST_CASE("the Barenblatt profile minimizes the entropy at fixed mass") {
    const double s = 0.25;
    const Grid1D g(4.0, 512);
    const BarenblattProfile prof(1.0, s);
    const Field ref = prof.sample_on_grid(g);
    const double h_min = entropy(ref, s);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> amp(-0.4, 0.8);
    std::uniform_real_distribution<double> cc(-1.0, 1.0);
    std::uniform_real_distribution<double> ww(0.15, 0.6);
    for (int k = 0; k < 20; ++k) {
        Field pert(g);
        const double a = amp(rng), c = cc(rng), w = ww(rng);
        for (int i = 0; i < g.n_cells(); ++i) {
            const double z = (g.center(i) - c) / w;
            pert[i] = ref[i] * (1.0 + a * std::exp(-0.5 * z * z));
        }
        const double scale = 1.0 / pert.mass();
        for (int i = 0; i < pert.size(); ++i) pert[i] *= scale;
        REQUIRE(entropy(pert, s) >= h_min - 1e-10);
    }

    // mass-preserving dilations rho_a(x) = rho_M(x/a)/a
    for (double a : {0.8, 0.9, 1.1, 1.25}) {
        Field dil(g);
        for (int i = 0; i < g.n_cells(); ++i) dil[i] = prof.evaluate(g.center(i) / a) / a;
        const double scale = 1.0 / dil.mass();
        for (int i = 0; i < dil.size(); ++i) dil[i] *= scale;
        REQUIRE(entropy(dil, s) > h_min);
    }
}

TEST_CASE("dissipation: zero field, vanishing at the profile under refinement") {
    REQUIRE(dissipation(Field(Grid1D(4.0, 128)), 0.25) == 0.0);
    const double s = 0.25;
    const BarenblattProfile prof(1.0, s);
    double prev = -1.0;
    for (int n : {256, 512, 1024}) {
        const double I = dissipation(prof.sample_on_grid(Grid1D(4.0, n)), s);
        REQUIRE(I >= 0.0);
        if (prev >= 0.0) REQUIRE(I < prev);
        prev = I;
    }
    REQUIRE(prev < 1e-3);
}

TEST_CASE("dH/dt = -I along the pure flow") {
    SolverConfig cfg;
    cfg.equation = Equation::pure;
    cfg.s = 0.25;
    cfg.n = 512;
    cfg.t_end = 1.2;
    cfg.output_every = 0.05;
    cfg.initial.type = InitialCondition::Type::box;
    cfg.initial.half_width = 1.2;
    cfg.initial.center = 0.4;
    const RunResult out = run(cfg);
    // centered difference of H vs the logged I, after the initial transient
    int checked = 0;
    for (std::size_t i = 2; i + 2 < out.records.size(); ++i) {
        const auto& a = out.records[i - 1];
        const auto& b = out.records[i + 1];
        const double dh = (b.H - a.H) / (b.t - a.t);
        const double I = out.records[i].I;
        if (out.records[i].t < 0.3 || I < 1e-4) continue;
        REQUIRE(-dh == Approx(I).epsilon(0.05));
        ++checked;
    }
    REQUIRE(checked >= 5);
}

TEST_CASE("relative entropy: zero at the profile, positive for perturbations") {
    const double s = 0.25;
    const Grid1D g(4.0, 512);
    const BarenblattProfile prof(1.0, s);
    const Field ref = prof.sample_on_grid(g);
    REQUIRE(std::abs(relative_entropy(ref, prof)) < 1e-10);

    Field pert(g);
    for (int i = 0; i < g.n_cells(); ++i) {
        const double z = (g.center(i) - 0.4) / 0.3;
        pert[i] = ref[i] * (1.0 + 0.5 * std::exp(-0.5 * z * z));
    }
    const double scale = prof.mass() / pert.mass();
    for (int i = 0; i < pert.size(); ++i) pert[i] *= scale;
    const double hrel = relative_entropy(pert, prof);
    REQUIRE(hrel > 0.0);

    Field wrong_mass = ref;
    for (int i = 0; i < wrong_mass.size(); ++i) wrong_mass[i] *= 1.5;
    REQUIRE_THROWS_AS(relative_entropy(wrong_mass, prof), validation_error);
}

TEST_CASE("regularized entropy: eps=0 identity, quadrature oracle, linear in eps") {
    const Grid1D g(4.0, 512);
    const Field f = oracles::gaussian_bump(g, 0.0, 0.5, 1.0);
    const double s = 0.25;
    REQUIRE(regularized_entropy(f, s, 0.0) == entropy(f, s));

    // Gaussian mass M, width sigma: int rho log rho = M (log(M/(sigma sqrt(2pi))) - 1/2),
    // up to the 4-sigma truncation of the sampled bump
    const double logint = log_weight_integral(f);
    const double exact = std::log(1.0 / (0.5 * std::sqrt(2.0 * kPi))) - 0.5;
    REQUIRE(logint == Approx(exact).epsilon(2e-3));

    const double h0 = entropy(f, s);
    const double h1 = regularized_entropy(f, s, 0.1);
    const double h2 = regularized_entropy(f, s, 0.2);
    REQUIRE(h1 - h0 == Approx(0.1 * logint).epsilon(1e-12));
    REQUIRE(h2 - h0 == Approx(2.0 * (h1 - h0)).epsilon(1e-12));
}

TEST_CASE("regularized dissipation: eps=0 identity, nonnegative, floor-insensitive") {
    const Grid1D g(4.0, 512);
    const Field f = oracles::gaussian_bump(g, 0.3, 0.5, 1.0);
    const double s = 0.25;
    REQUIRE(regularized_dissipation(f, s, 0.0) == Approx(dissipation(f, s)));
    const double i_eps = regularized_dissipation(f, s, 1e-2);
    REQUIRE(i_eps >= 0.0);

    const double base = log_floor(f);
    const double a = regularized_dissipation(f, s, 1e-2, base);
    const double b = regularized_dissipation(f, s, 1e-2, 0.5 * base);
    REQUIRE(std::abs(a - b) <= 1e-2 * std::max(a, 1e-300));
}

TEST_CASE("wasserstein2: identity, exact translation, metric axioms, mass check") {
    const Grid1D g(4.0, 512);
    const Field f = oracles::gaussian_bump(g, -0.5, 0.4, 1.0);
    REQUIRE(wasserstein2(f, f) == 0.0);

    // translation by a whole number of cells is exact for the PL quantiles
    const int shift = 64;
    Field t(g);
    for (int i = shift; i < g.n_cells(); ++i) t[i] = f[i - shift];
    const double h = shift * g.dx();
    REQUIRE(wasserstein2(f, t) == Approx(h * std::sqrt(f.mass())).epsilon(1e-12));

    std::mt19937_64 rng(23);
    Field a = oracles::random_bumps(g, rng);
    Field b = oracles::random_bumps(g, rng);
    Field c = oracles::random_bumps(g, rng);
    for (Field* p : {&a, &b, &c}) {
        const double scale = 1.0 / p->mass();
        for (int i = 0; i < p->size(); ++i) (*p)[i] *= scale;
    }
    const double ab = wasserstein2(a, b), ba = wasserstein2(b, a);
    const double bc = wasserstein2(b, c), ac = wasserstein2(a, c);
    REQUIRE(ab == Approx(ba).margin(1e-10));
    REQUIRE(ac <= ab + bc + 1e-10);

    Field heavier = a;
    for (int i = 0; i < heavier.size(); ++i) heavier[i] *= 2.0;
    REQUIRE_THROWS_AS(wasserstein2(a, heavier), validation_error);
}

TEST_CASE("entropy-entropy dissipation margin is nonnegative") {
    const double s = 0.25;
    const Grid1D g(4.0, 512);
    const BarenblattProfile prof(1.0, s);
    const Field ref = prof.sample_on_grid(g);
    REQUIRE(std::abs(check_entropy_dissipation(ref, prof, s)) < 1e-3);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> amp(-0.5, 1.0);
    std::uniform_real_distribution<double> cc(-1.2, 1.2);
    std::uniform_real_distribution<double> ww(0.15, 0.7);
    for (int k = 0; k < 50; ++k) {
        Field pert(g);
        const double a = amp(rng), c = cc(rng), w = ww(rng);
        for (int i = 0; i < g.n_cells(); ++i) {
            const double z = (g.center(i) - c) / w;
            pert[i] = ref[i] * (1.0 + a * std::exp(-0.5 * z * z));
        }
        const double scale = prof.mass() / pert.mass();
        for (int i = 0; i < pert.size(); ++i) pert[i] *= scale;
        const double margin = check_entropy_dissipation(pert, prof, s);
        const double scale_h = std::max(std::abs(entropy(pert, s)), 1.0);
        REQUIRE(margin >= -1e-3 * scale_h);
    }

    // a strongly displaced bump dissipates much faster than its entropy gap
    const Field far = oracles::gaussian_bump(g, 1.5, 0.3, 1.0);
    REQUIRE(check_entropy_dissipation(far, prof, s) > 0.1);
}

TEST_CASE("moments: zero field, quadrature oracle, odd orders rejected") {
    const Grid1D g(4.0, 512);
    REQUIRE(moment(Field(g), 2) == 0.0);
    const double s = 0.25;
    const BarenblattProfile prof(1.0, s);
    const Field f = prof.sample_on_grid(g);
    const double m2_exact = oracles::integrate(
        [&](double x) { return x * x * prof.evaluate(x); }, -prof.radius(), prof.radius(),
        1e-13);
    REQUIRE(moment(f, 2) == Approx(m2_exact).epsilon(5e-4));  // midpoint rule, O(dx^2)
    REQUIRE_THROWS_AS(moment(f, 3), validation_error);
    REQUIRE_THROWS_AS(moment(f, 0), validation_error);
}

TEST_CASE("records satisfy the functional inequalities on arbitrary same-mass states") {
    const double s = 0.25;
    const Grid1D g(4.0, 512);
    std::mt19937_64 rng(31);
    for (int k = 0; k < 5; ++k) {
        Field f = oracles::random_bumps(g, rng);
        const double scale = 1.0 / f.mass();
        for (int i = 0; i < f.size(); ++i) f[i] *= scale;
        const DiagnosticsRecord r = make_record(f, s, 0.0, 0.0);
        const double tol = 1e-3 * r.inequality_scale();
        REQUIRE(r.hneg_s_sq <= 2.0 * r.H_rel + tol);
        REQUIRE(r.w2 * r.w2 <= 2.0 * r.H_rel + tol);
        REQUIRE(r.H_rel <= 0.5 * r.I + tol);
        REQUIRE(r.H_rel >= -tol);
    }
}
