#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <random>
#include <thread>

#include "fracpme/barenblatt.hpp"
#include "fracpme/frac_ops.hpp"
#include "oracles.hpp"

using namespace fracpme;
using Catch::Approx;

namespace {
double rel_l2(const Field& a, const Field& b) {
    double num = 0, den = 0;
    for (int i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}
}  // namespace

TEST_CASE("kernel table is even, positive, and exactly cell-integrated") {
    const Grid1D g(4.0, 64);
    const KernelTable t(g, 0.3);
    for (int k = 1; k < 64; ++k) {
        REQUIRE(t.weight(k) == t.weight(-k));
        REQUIRE(t.weight(k) > 0.0);
    }
    REQUIRE(t.weight(0) > 0.0);
    // w_k against adaptive quadrature of C |x|^{2s-1} over the offset cell
    const double C = riesz_constant(0.3);
    for (int k : {1, 5, 33}) {
        const double lo = (k - 0.5) * g.dx(), hi = (k + 0.5) * g.dx();
        const double ref = oracles::integrate(
            [&](double x) { return C * std::pow(std::abs(x), 2.0 * 0.3 - 1.0); }, lo, hi);
        REQUIRE(t.weight(k) == Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("riesz potential of zero is zero") {
    const Grid1D g(4.0, 128);
    const Field f(g);
    const Field p = riesz_potential(f, 0.25);
    for (int i = 0; i < p.size(); ++i) REQUIRE(p[i] == 0.0);
}

TEST_CASE("riesz potential of a discrete delta is the kernel column") {
    const Grid1D g(2.0, 64);
    const double s = 0.2;
    Field f(g);
    f[30] = 1.0 / g.dx();  // unit mass in one cell
    const Field p = riesz_potential_direct(f, s);
    const KernelTable t(g, s);
    for (int i = 0; i < 64; ++i)
        REQUIRE(p[i] == Approx(t.weight(i - 30) / g.dx()).margin(1e-15));
}

TEST_CASE("riesz potential is linear") {
    const Grid1D g(4.0, 128);
    const Field a = oracles::gaussian_bump(g, -0.8, 0.3, 1.0);
    const Field b = oracles::gaussian_bump(g, 0.9, 0.4, 0.7);
    Field sum(g);
    for (int i = 0; i < 128; ++i) sum[i] = a[i] + b[i];
    const Field pa = riesz_potential(a, 0.25);
    const Field pb = riesz_potential(b, 0.25);
    const Field ps = riesz_potential(sum, 0.25);
    for (int i = 0; i < 128; ++i) REQUIRE(ps[i] == Approx(pa[i] + pb[i]).margin(1e-13));
}

TEST_CASE("fast convolution matches the direct-sum oracle on random fields") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> sdist(0.05, 0.45);
    const Grid1D g(4.0, 256);
    for (int k = 0; k < 20; ++k) {
        const double s = sdist(rng);
        const Field f = oracles::random_bumps(g, rng);
        REQUIRE(rel_l2(riesz_potential(f, s), riesz_potential_direct(f, s)) <= 1e-10);
    }
}

TEST_CASE("riesz potential of an even field is even, of a nonnegative field positive") {
    const Grid1D g(4.0, 128);
    const Field f = oracles::gaussian_bump(g, 0.0, 0.5, 1.0);
    const Field p = riesz_potential(f, 0.3);
    for (int i = 0; i < 128; ++i) {
        REQUIRE(p[i] == Approx(p[127 - i]).margin(1e-14));
        REQUIRE(p[i] > 0.0);
    }
}

TEST_CASE("bilinear form of the inverse operator is symmetric") {
    std::mt19937_64 rng(7);
    const Grid1D g(4.0, 128);
    const Field f = oracles::random_bumps(g, rng);
    const Field h = oracles::random_bumps(g, rng);
    const double fg = oracles::bilinear_direct(f, h, 0.25);
    const double gf = oracles::bilinear_direct(h, f, 0.25);
    REQUIRE(fg == Approx(gf).epsilon(1e-10));
    // and the fast path agrees with the quadrature form
    const Field ph = riesz_potential(h, 0.25);
    double quad = 0.0;
    for (int i = 0; i < 128; ++i) quad += f[i] * ph[i];
    quad *= g.dx();
    REQUIRE(quad == Approx(fg).epsilon(1e-10));
}

TEST_CASE("potential of the Barenblatt profile satisfies the obstacle relation") {
    const double s = 0.25;
    const BarenblattProfile prof = BarenblattProfile::from_radius(1.0, s);
    double prev = 0.0;
    for (int n : {512, 1024}) {
        const Grid1D g(4.0, n);
        const Field rho = prof.sample_on_grid(g);
        const Field pot = riesz_potential(rho, s);
        const double constant = 1.0;  // R^2 / (2(1-2s)) with R = 1, s = 1/4
        double sup = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = g.center(i);
            if (std::abs(x) <= 0.9)
                sup = std::max(sup, std::abs(pot[i] + 0.5 * x * x - constant));
        }
        REQUIRE(sup < 1e-4);
        if (prev > 0.0) REQUIRE(sup < 0.6 * prev);
        prev = sup;
    }
}

TEST_CASE("s outside (0,1/2) and mismatched grids are rejected") {
    const Grid1D g(4.0, 64);
    const Field f(g);
    REQUIRE_THROWS_AS(riesz_potential(f, 0.5), validation_error);
    REQUIRE_THROWS_AS(riesz_potential(f, 0.0), validation_error);
    REQUIRE_THROWS_AS(riesz_potential(f, -0.1), validation_error);
    const Field h(Grid1D(4.0, 128));
    REQUIRE_THROWS_AS(require_same_grid(f, h, "test"), validation_error);
}

TEST_CASE("neg_sobolev_seminorm_sq: zero field, dilation pair, direct oracle") {
    const Grid1D g(4.0, 256);
    REQUIRE(neg_sobolev_seminorm_sq(Field(g), 0.25) == 0.0);

    const double s = 0.25;
    const BarenblattProfile p1(1.0, s);
    const Field f1 = p1.sample_on_grid(g);
    Field f2 = oracles::gaussian_bump(g, 0.0, 0.6, 1.0);  // same mass, different shape
    Field diff(g);
    for (int i = 0; i < 256; ++i) diff[i] = f1[i] - f2[i];
    const double val = neg_sobolev_seminorm_sq(diff, s);
    REQUIRE(val > 0.0);
    REQUIRE(val == Approx(oracles::bilinear_direct(diff, diff, s)).epsilon(1e-8));
}

TEST_CASE("frac_laplacian handles the zero field and rejects bad alpha") {
    const Grid1D g(4.0, 64);
    const Field z(g);
    const Field out = frac_laplacian(z, 0.5);
    for (int i = 0; i < 64; ++i) REQUIRE(out[i] == 0.0);
    REQUIRE_THROWS_AS(frac_laplacian(z, 0.0), validation_error);
    REQUIRE_THROWS_AS(frac_laplacian(z, 2.5), validation_error);
}

TEST_CASE("frac_laplacian at alpha=2 matches the second-difference Laplacian") {
    const Grid1D g(4.0, 1024);
    Field f(g);
    for (int i = 0; i < f.size(); ++i) {
        const double x = g.center(i);
        f[i] = std::abs(x) < 2.0 ? std::cos(kPi * x / 4.0) * std::exp(-x * x) : 0.0;
    }
    const Field lap = frac_laplacian(f, 2.0, 4);
    double worst = 0.0;
    for (int i = 1; i + 1 < f.size(); ++i) {
        const double fd = -(f[i + 1] - 2.0 * f[i] + f[i - 1]) / (g.dx() * g.dx());
        if (std::abs(g.center(i)) < 1.5) worst = std::max(worst, std::abs(lap[i] - fd));
    }
    REQUIRE(worst < 5e-3);  // O(dx^2) of the second difference
}

TEST_CASE("multiplier inverts the Riesz potential only with the standard constant") {
    const Grid1D g(3.0, 1024);
    const double s = 0.25;
    Field f(g);
    // He_6(x/sigma) exp(-x^2/2sigma^2): six vanishing moments
    const double sigma = 0.4;
    for (int i = 0; i < f.size(); ++i) {
        const double z = g.center(i) / sigma;
        double h0 = 1.0, h1 = z;
        for (int k = 1; k < 6; ++k) {
            const double h2 = z * h1 - k * h0;
            h0 = h1; h1 = h2;
        }
        f[i] = h1 * std::exp(-0.5 * z * z);
    }
    const Field back = frac_laplacian(riesz_potential(f, s), 2.0 * s, 8);
    REQUIRE(rel_l2(back, f) <= 1e-4);

    const Field back_paper =
        frac_laplacian(riesz_potential(f, s, /*paper_constant=*/true), 2.0 * s, 8);
    REQUIRE(rel_l2(back_paper, f) > 0.05);
}

TEST_CASE("homogeneous Sobolev norm: zero, homogeneity, Parseval, gradient oracle") {
    const Grid1D g(4.0, 512);
    REQUIRE(homog_sobolev_norm(Field(g), 1.0) == 0.0);

    std::mt19937_64 rng(3);
    const Field f = oracles::random_bumps(g, rng);
    Field cf(g);
    for (int i = 0; i < f.size(); ++i) cf[i] = -2.5 * f[i];
    REQUIRE(homog_sobolev_norm(cf, 1.0) ==
            Approx(2.5 * homog_sobolev_norm(f, 1.0)).epsilon(1e-12));

    // Parseval consistency: ||f||^2 = int f (-Delta)^{alpha/2} f, same padding
    for (double alpha : {0.75, 1.0, 1.5}) {
        const Field lap = frac_laplacian(f, alpha, 4);
        double quad = 0.0;
        for (int i = 0; i < f.size(); ++i) quad += f[i] * lap[i];
        quad *= g.dx();
        const double nrm = homog_sobolev_norm(f, alpha, 4);
        REQUIRE(nrm * nrm == Approx(quad).epsilon(1e-10));
    }

    // alpha = 2: Hdot^1 norm equals ||f'||_2
    const Field sm = oracles::gaussian_bump(g, 0.0, 0.5, 1.0);
    double grad = 0.0;
    for (int i = 1; i + 1 < sm.size(); ++i) {
        const double d = (sm[i + 1] - sm[i - 1]) / (2.0 * g.dx());
        grad += d * d;
    }
    grad = std::sqrt(grad * g.dx());
    REQUIRE(homog_sobolev_norm(sm, 2.0) == Approx(grad).epsilon(1e-3));
}

TEST_CASE("velocity field: zero density, stationarity of the profile, antisymmetry") {
    const Grid1D g(4.0, 256);
    const Field z(g);
    const auto v_sim = velocity_field(z, 0.25, Frame::similarity);
    const auto v_phys = velocity_field(z, 0.25, Frame::physical);
    for (int j = 0; j <= 256; ++j) {
        REQUIRE(v_sim[j] == Approx(-g.face(j)).margin(1e-15));
        REQUIRE(v_phys[j] == 0.0);
    }

    const double s = 0.25;
    const BarenblattProfile prof = BarenblattProfile::from_radius(1.0, s);
    double prev = 0.0;
    for (int n : {512, 1024}) {
        const Grid1D gn(4.0, n);
        const Field rho = prof.sample_on_grid(gn);
        const auto v = velocity_field(rho, s, Frame::similarity);
        double sup = 0.0;
        for (int j = 0; j <= n; ++j)
            if (std::abs(gn.face(j)) < 0.9) sup = std::max(sup, std::abs(v[j]));
        REQUIRE(sup < 2e-2);
        if (prev > 0.0) REQUIRE(sup < prev);
        prev = sup;
    }

    // symmetric bump: physical velocity antisymmetric about the center
    const Field bump = oracles::gaussian_bump(g, 0.0, 0.5, 1.0);
    const auto v = velocity_field(bump, s, Frame::physical);
    for (int j = 1; j < 256; ++j)
        REQUIRE(v[j] == Approx(-v[256 - j]).margin(1e-12));
}

TEST_CASE("riesz workspaces are independent across threads") {
    const Grid1D g(4.0, 256);
    const Field f = oracles::gaussian_bump(g, 0.0, 0.5, 1.0);
    const Field want = riesz_potential(f, 0.25);
    std::vector<std::thread> pool;
    std::atomic<int> bad{0};
    for (int w = 0; w < 4; ++w)
        pool.emplace_back([&]() {
            for (int k = 0; k < 20; ++k) {
                const Field got = riesz_potential(f, 0.25);
                for (int i = 0; i < got.size(); ++i)
                    if (got[i] != want[i]) ++bad;
            }
        });
    for (auto& th : pool) th.join();
    REQUIRE(bad == 0);
}

TEST_CASE("Stroock-Varopoulos inequality holds numerically") {
    std::mt19937_64 rng(11);
    const Grid1D g(4.0, 256);
    const double s = 0.25;
    for (int trial = 0; trial < 10; ++trial) {
        const Field w = oracles::random_bumps(g, rng);
        for (int p : {2, 3}) {
            for (double alpha : {1.0 - s, 2.0 - 2.0 * s}) {
                const Field lap = frac_laplacian(w, alpha, 4);
                double lhs = 0.0;
                for (int i = 0; i < w.size(); ++i) lhs += std::pow(w[i], p) * lap[i];
                lhs *= g.dx();
                Field wp(g);
                for (int i = 0; i < w.size(); ++i) wp[i] = std::pow(w[i], 0.5 * (p + 1));
                const double h = homog_sobolev_norm(wp, alpha, 4);
                const double rhs = 4.0 * p / ((p + 1.0) * (p + 1.0)) * h * h;
                REQUIRE(lhs >= rhs - 1e-6 * std::max({lhs, rhs, 1.0}));
            }
        }
    }
}
