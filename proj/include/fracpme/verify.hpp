#pragma once

// Acceptance suite: every criterion the toolkit promises, runnable from the
// CLI (`fracpme verify`) and asserted by the acceptance tests. Each criterion
// reports one pass/fail line with the measured numbers; thresholds are pinned
// here, not configurable (the suite file may select criteria and coarsen the
// Barenblatt grid as a negative control).

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fracpme/barenblatt.hpp"
#include "fracpme/entropy.hpp"
#include "fracpme/experiment.hpp"
#include "fracpme/frac_ops.hpp"
#include "fracpme/integrated.hpp"
#include "fracpme/ratefit.hpp"
#include "fracpme/solver.hpp"

namespace fracpme {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifySuite {
    std::vector<int> criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    int barenblatt_n = 4096;  // coarsening this to ~16 makes criterion 3 fail
    unsigned long seed = 20240811;
    bool empty = false;
};

inline VerifySuite parse_verify_suite(const nlohmann::json& j) {
    VerifySuite suite;
    if (j.is_null() || (j.is_object() && j.empty())) {
        suite.empty = true;
        suite.criteria.clear();
        return suite;
    }
    if (!j.is_object()) throw validation_error("verify suite: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "criteria") suite.criteria = it.value().get<std::vector<int>>();
        else if (key == "barenblatt_n") suite.barenblatt_n = it.value().get<int>();
        else if (key == "seed") suite.seed = it.value().get<unsigned long>();
        else throw validation_error("verify suite: unknown key '" + key + "'");
    }
    if (suite.criteria.empty()) suite.empty = true;
    return suite;
}

inline VerifySuite load_verify_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("verify suite: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("verify suite: malformed JSON: ") + e.what());
    }
    return parse_verify_suite(j);
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// Random sum-of-bumps field, strictly nonnegative, supported inside |x| < L/2.
inline Field random_bump_field(const Grid1D& grid, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nb(1, 3);
    std::uniform_real_distribution<double> cdist(-0.35 * grid.half_width(),
                                                 0.35 * grid.half_width());
    std::uniform_real_distribution<double> sdist(0.05 * grid.half_width(),
                                                 0.15 * grid.half_width());
    std::uniform_real_distribution<double> adist(0.2, 1.0);
    Field f(grid);
    const int bumps = nb(rng);
    for (int b = 0; b < bumps; ++b) {
        const double c = cdist(rng), sg = sdist(rng), a = adist(rng);
        for (int i = 0; i < grid.n_cells(); ++i) {
            const double z = (grid.center(i) - c) / sg;
            if (std::abs(z) <= 4.0) f[i] += a * std::exp(-0.5 * z * z);
        }
    }
    return f;
}

// Gaussian-damped probabilists' Hermite polynomial He_m(x/sigma) e^{-x^2/2sigma^2}:
// mean-zero with m vanishing moments and a Gaussian-decaying spectrum.
inline Field hermite_field(const Grid1D& grid, double sigma, int m) {
    Field f(grid);
    for (int i = 0; i < grid.n_cells(); ++i) {
        const double z = grid.center(i) / sigma;
        double h0 = 1.0, h1 = z;
        for (int k = 1; k < m; ++k) {
            const double h2 = z * h1 - k * h0;
            h0 = h1;
            h1 = h2;
        }
        const double he = m == 0 ? h0 : h1;
        f[i] = he * std::exp(-0.5 * z * z);
    }
    return f;
}

inline double rel_l2_error(const Field& got, const Field& want) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

inline SolverConfig acceptance_box_config(Equation eq, int n) {
    SolverConfig cfg;
    cfg.equation = eq;
    cfg.frame = Frame::similarity;
    cfg.s = 0.25;
    cfg.r = 4.0;
    cfg.q = 3.0;
    cfg.b = 1.0;
    cfg.L = 4.0;
    cfg.n = n;
    cfg.cfl = 0.4;
    cfg.t_end = 4.5;
    cfg.output_every = 0.1;
    cfg.initial.type = InitialCondition::Type::box;
    cfg.initial.mass = 1.0;
    cfg.initial.half_width = 1.2;
    cfg.initial.center = 0.6;
    return cfg;
}

}  // namespace detail

class AcceptanceSuite {
  public:
    explicit AcceptanceSuite(const VerifySuite& suite) : suite_(suite) {}

    // --- criterion 1: fast vs direct Riesz on random fields -----------------
    CriterionResult c1_operator_oracle() const {
        CriterionResult res{1, "operator oracle equivalence", false, ""};
        std::mt19937_64 rng(suite_.seed);
        const Grid1D grid(4.0, 1024);
        std::uniform_real_distribution<double> sdist(0.05, 0.45);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double s = sdist(rng);
            const Field f = detail::random_bump_field(grid, rng);
            const Field fast = riesz_potential(f, s);
            const Field direct = riesz_potential_direct(f, s);
            worst = std::max(worst, detail::rel_l2_error(fast, direct));
        }
        res.pass = worst <= 1e-10;
        res.detail = "max rel L2 error " + detail::fmt(worst) + " (need <= 1e-10)";
        return res;
    }

    // --- criterion 2: multiplier consistency fixes the kernel constant ------
    CriterionResult c2_multiplier_consistency() const {
        CriterionResult res{2, "multiplier consistency", false, ""};
        const Grid1D grid(3.0, 1024);
        const double s = 0.25;
        double worst = 0.0;
        const struct { double sigma; int m; } fields[] = {{0.4, 6}, {0.35, 6}, {0.4, 8}};
        for (const auto& fc : fields) {
            const Field f = detail::hermite_field(grid, fc.sigma, fc.m);
            const Field back = frac_laplacian(riesz_potential(f, s), 2.0 * s, 8);
            worst = std::max(worst, detail::rel_l2_error(back, f));
        }
        res.pass = worst <= 1e-4;
        res.detail = "max rel L2 error " + detail::fmt(worst) + " (need <= 1e-4)";
        return res;
    }

    // --- criterion 3: Barenblatt Euler-Lagrange validity ---------------------
    CriterionResult c3_barenblatt_validity() const {
        CriterionResult res{3, "Barenblatt validity", false, ""};
        const double s = 0.25;
        const BarenblattProfile prof = BarenblattProfile::from_radius(1.0, s);
        const int n_fine = suite_.barenblatt_n;
        const int n_coarse = std::max(n_fine / 2, 8);
        const auto coarse = euler_lagrange_residual(prof, Grid1D(4.0, n_coarse));
        const auto fine = euler_lagrange_residual(prof, Grid1D(4.0, n_fine));
        const double round_trip =
            std::abs(mass_from_radius(radius_from_mass(prof.mass(), s), s) - prof.mass()) /
            prof.mass();
        const bool interior_ok = fine.interior_sup <= 1e-2;
        const bool halves = fine.interior_sup <= 0.5 * coarse.interior_sup;
        const bool exterior_ok = fine.exterior_margin >= -1e-3;
        const bool mass_ok = round_trip <= 1e-8;
        res.pass = interior_ok && halves && exterior_ok && mass_ok;
        res.detail = "interior " + detail::fmt(fine.interior_sup) + " (<= 1e-2, halves from " +
                     detail::fmt(coarse.interior_sup) + "), exterior margin " +
                     detail::fmt(fine.exterior_margin) + " (>= -1e-3), mass round-trip " +
                     detail::fmt(round_trip);
        return res;
    }

    // --- criterion 4: stationarity of the exact profile ---------------------
    CriterionResult c4_stationarity() {
        CriterionResult res{4, "stationarity of the Barenblatt profile", false, ""};
        SolverConfig cfg;
        cfg.equation = Equation::pure;
        cfg.s = 0.25;
        cfg.L = 4.0;
        cfg.n = 2048;
        cfg.t_end = 5.0;
        cfg.output_every = 0.25;
        cfg.initial.type = InitialCondition::Type::perturbed_barenblatt;
        cfg.initial.mass = 1.0;
        cfg.initial.amplitude = 0.0;
        const Field ref = BarenblattProfile(1.0, cfg.s).sample_on_grid(cfg.grid());

        std::vector<double> errs;
        SimState state(make_initial_condition(cfg.initial, cfg.grid(), cfg.s));
        RunResult run_out;
        run_out.initial_mass = state.initial_mass;
        const double eps_t = 1e-12 * cfg.t_end;
        auto emit = [&]() {
            DiagnosticsRecord rec = detail::emit_record(state, cfg);
            count_violations(rec, run_out.violations);
            run_out.records.push_back(rec);
            double l1 = 0.0;
            for (int i = 0; i < state.rho.size(); ++i)
                l1 += std::abs(state.rho[i] - ref[i]);
            errs.push_back(l1 * state.rho.grid().dx() / run_out.initial_mass);
        };
        emit();
        long k = 1;
        while (cfg.t_end - state.t > eps_t) {
            const double target = std::min(k * cfg.output_every, cfg.t_end);
            while (target - state.t > eps_t) step(state, cfg, target - state.t);
            emit();
            ++k;
        }
        stored_runs_[4] = run_out;

        double emax = 0.0, emax_first_half = 0.0;
        for (std::size_t i = 0; i < errs.size(); ++i) {
            emax = std::max(emax, errs[i]);
            if (i <= errs.size() / 2) emax_first_half = std::max(emax_first_half, errs[i]);
        }
        const bool bounded = emax <= 2e-2;
        const bool non_growing = errs.back() <= 1.1 * emax_first_half + 1e-6;
        res.pass = bounded && non_growing;
        res.detail = "max |rho - rho_M|_1 / M = " + detail::fmt(emax) +
                     " (<= 2e-2), final " + detail::fmt(errs.back()) +
                     (non_growing ? ", non-growing" : ", GROWING");
        return res;
    }

    // --- criterion 5: pure-diffusion rate ------------------------------------
    CriterionResult c5_pure_rate() {
        CriterionResult res{5, "pure diffusion H_rel rate", false, ""};
        SolverConfig cfg = detail::acceptance_box_config(Equation::pure, 2048);
        const RunResult out = run(cfg);
        stored_runs_[5] = out;
        const RateFit fit = fit_decay_rate(out.records, FitQuantity::H_rel,
                                           PrefactorMode::none, 1.0, 4.0, 2.0);
        res.pass = fit.fitted_exponent <= -1.8;
        res.detail = "fitted exponent " + detail::fmt(fit.fitted_exponent) +
                     " on [1,4] (need <= -1.8, theory -2)";
        return res;
    }

    // --- criterion 6: absorption rate ----------------------------------------
    CriterionResult c6_absorption_rate() {
        CriterionResult res{6, "absorption H_rel rate", false, ""};
        SolverConfig cfg = detail::acceptance_box_config(Equation::absorption, 1024);
        const RunResult out = run(cfg);
        stored_runs_[6] = out;
        const double rate = theoretical_rate(cfg);  // 1.0 for s=1/4, r=4
        const RateFit fit = fit_decay_rate(out.records, FitQuantity::H_rel,
                                           PrefactorMode::log_square, 1.0, 4.0, rate);
        bool mass_monotone = true;
        for (std::size_t i = 1; i < out.records.size(); ++i)
            if (out.records[i].mass >
                out.records[i - 1].mass + 1e-12 * out.initial_mass)
                mass_monotone = false;
        const bool rate_ok = fit.fitted_exponent <= -0.8 * rate;
        const bool minfty_ok = out.m_infty_estimate > 0.0;
        res.pass = rate_ok && mass_monotone && minfty_ok;
        res.detail = "fitted exponent " + detail::fmt(fit.fitted_exponent) +
                     " (need <= -0.8), M(t) " +
                     (mass_monotone ? "non-increasing" : "NOT monotone") +
                     ", M_infty estimate " + detail::fmt(out.m_infty_estimate) + " (> 0)";
        return res;
    }

    // --- criterion 7: convection rate ----------------------------------------
    CriterionResult c7_convection_rate() {
        CriterionResult res{7, "convection H_rel rate", false, ""};
        SolverConfig cfg = detail::acceptance_box_config(Equation::convection, 1024);
        const RunResult out = run(cfg);
        stored_runs_[7] = out;
        const double rate = theoretical_rate(cfg);  // 1.0 for s=1/4, q=3
        const RateFit fit = fit_decay_rate(out.records, FitQuantity::H_rel,
                                           PrefactorMode::log_square, 1.0, 4.0, rate);
        double mass_err = 0.0;
        for (const auto& r : out.records)
            mass_err = std::max(mass_err, std::abs(r.mass - out.initial_mass));
        const bool rate_ok = fit.fitted_exponent <= -0.8 * rate;
        const bool mass_ok = mass_err <= 1e-10 * out.initial_mass;
        res.pass = rate_ok && mass_ok;
        res.detail = "fitted exponent " + detail::fmt(fit.fitted_exponent) +
                     " (need <= -0.8), mass drift " + detail::fmt(mass_err / out.initial_mass) +
                     " (<= 1e-10)";
        return res;
    }

    // --- criterion 8: inequality suite over runs 4-7 --------------------------
    CriterionResult c8_inequality_suite() const {
        CriterionResult res{8, "entropy inequality suite (runs 4-7)", false, ""};
        int total = 0, steps = 0;
        bool have_all = true;
        for (int id : {4, 5, 6, 7}) {
            const auto it = stored_runs_.find(id);
            if (it == stored_runs_.end()) {
                have_all = false;
                continue;
            }
            total += it->second.violations.total();
            steps += static_cast<int>(it->second.records.size());
        }
        res.pass = have_all && total == 0;
        res.detail = std::to_string(total) + " violations over " + std::to_string(steps) +
                     " logged steps" + (have_all ? "" : " (missing prerequisite runs)");
        return res;
    }

    // --- criterion 9: physical-frame Lp decay ---------------------------------
    CriterionResult c9_lp_decay() const {
        CriterionResult res{9, "L^inf decay in physical time", false, ""};
        SolverConfig cfg;
        cfg.equation = Equation::absorption;
        cfg.frame = Frame::physical;
        cfg.s = 0.25;
        cfg.r = 4.0;
        cfg.L = 40.0;
        cfg.n = 2048;
        cfg.t_end = 100.0;
        cfg.output_every = 2.0;
        cfg.initial.type = InitialCondition::Type::gaussian;
        cfg.initial.sigma = 1.0;
        cfg.initial.mass = 1.0;
        const RunResult out = run(cfg);
        const LpDecayFit fit = lp_decay_check(out.records, -1.0, cfg.s);
        res.pass = fit.slope <= -0.3;
        res.detail = "fitted L^inf slope " + detail::fmt(fit.slope) +
                     " over the last decade of tau (need <= -0.3, theory " +
                     detail::fmt(fit.expected) + ")";
        return res;
    }

    // --- criterion 10: integrated-form cross-check ----------------------------
    CriterionResult c10_integrated_crosscheck() const {
        CriterionResult res{10, "integrated-form cross-check", false, ""};
        SolverConfig cfg;
        cfg.equation = Equation::convection;
        cfg.frame = Frame::physical;
        cfg.s = 0.25;
        cfg.q = 3.0;
        cfg.b = 1.0;
        cfg.L = 4.0;
        cfg.n = 2048;
        cfg.t_end = 1.0;
        cfg.output_every = 0.5;
        cfg.initial.type = InitialCondition::Type::gaussian;
        cfg.initial.sigma = 0.5;
        cfg.initial.mass = 1.0;
        const RunResult fv = run(cfg);

        SolverConfig icfg = cfg;
        icfg.equation = Equation::convection_integrated;
        const RunResult integ = run_integrated(icfg);

        double l1 = -1.0;
        if (fv.final_state && integ.final_state) {
            const Field& a = *fv.final_state;
            const Field& b = *integ.final_state;
            double acc = 0.0;
            for (int i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
            l1 = acc * a.grid().dx();
        }
        const bool l1_ok = l1 >= 0.0 && l1 <= 0.03 * fv.initial_mass;

        // discrete comparison principle on ordered initial pairs, shared dt
        std::mt19937_64 rng(suite_.seed + 10);
        const Grid1D grid(4.0, 256);
        const IntegratedOperator op(grid, cfg.s);
        int violations = 0;
        std::uniform_real_distribution<double> a1(0.3, 1.0), a2(0.1, 0.5);
        for (int trial = 0; trial < 10; ++trial) {
            Field r1(grid), r2(grid);
            const double w1 = a1(rng), w2 = a2(rng);
            for (int i = 0; i < grid.n_cells(); ++i) {
                const double x = grid.center(i);
                r1[i] = w1 * std::exp(-x * x / (2.0 * 0.3 * 0.3));
                r2[i] = r1[i] + w2 * std::exp(-(x - 0.5) * (x - 0.5) / (2.0 * 0.4 * 0.4));
            }
            IntegratedState sa = integrate_density(r1);
            IntegratedState sb = integrate_density(r2);
            const double tol = 1e-10 * sb.total_mass;
            for (int it = 0; it < 200; ++it) {
                const double dta = integrated_cfl_dt(sa, op, cfg.q, cfg.cfl);
                const double dtb = integrated_cfl_dt(sb, op, cfg.q, cfg.cfl);
                const double dt = std::min(dta, dtb);
                step_integrated(sa, op, cfg.q, cfg.cfl, dt);
                step_integrated(sb, op, cfg.q, cfg.cfl, dt);
                for (std::size_t j = 0; j < sa.v.size(); ++j)
                    if (sa.v[j] > sb.v[j] + tol) {
                        ++violations;
                        break;
                    }
                if (violations > 0) break;
            }
        }
        res.pass = l1_ok && violations == 0;
        res.detail = "L1 gap at tau=1: " + detail::fmt(100.0 * l1 / fv.initial_mass) +
                     "% of M0 (need <= 3%), comparison violations " +
                     std::to_string(violations) + "/10";
        return res;
    }

    // --- criterion 11: Stroock-Varopoulos property test ------------------------
    CriterionResult c11_stroock_varopoulos() const {
        CriterionResult res{11, "Stroock-Varopoulos inequality", false, ""};
        std::mt19937_64 rng(suite_.seed + 11);
        const Grid1D grid(4.0, 512);
        const double s = 0.25;
        int violations = 0;
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Field w = detail::random_bump_field(grid, rng);
            for (int p : {2, 3}) {
                for (double alpha : {1.0 - s, 2.0 - 2.0 * s}) {
                    const Field lap = frac_laplacian(w, alpha, 4);
                    double lhs = 0.0;
                    for (int i = 0; i < w.size(); ++i)
                        lhs += std::pow(w[i], p) * lap[i];
                    lhs *= grid.dx();
                    Field wp(grid);
                    for (int i = 0; i < w.size(); ++i)
                        wp[i] = std::pow(w[i], 0.5 * (p + 1));
                    const double h = homog_sobolev_norm(wp, alpha, 4);
                    const double rhs = 4.0 * p / ((p + 1.0) * (p + 1.0)) * h * h;
                    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
                    const double margin = (lhs - rhs) / scale;
                    worst = std::min(worst, margin);
                    if (margin < -1e-6) ++violations;
                }
            }
        }
        res.pass = violations == 0;
        res.detail = std::to_string(violations) + " violations / 200 checks, worst margin " +
                     detail::fmt(worst);
        return res;
    }

    // --- criterion 12: eps-regularization consistency --------------------------
    CriterionResult c12_regularization_consistency() const {
        CriterionResult res{12, "regularization consistency (eps -> 0)", false, ""};
        std::map<double, std::vector<double>> hrel;
        for (double eps : {1e-2, 1e-3, 0.0}) {
            SolverConfig cfg = detail::acceptance_box_config(Equation::absorption, 1024);
            cfg.epsilon = eps;
            cfg.t_end = 3.0;
            cfg.output_every = 0.25;
            const RunResult out = run(cfg);
            std::vector<double> h;
            for (const auto& r : out.records) h.push_back(r.H_rel);
            hrel[eps] = h;
        }
        const auto& h0 = hrel[0.0];
        const auto& h3 = hrel[1e-3];
        const auto& h2 = hrel[1e-2];
        const double scale = std::max(h0.front(), 1e-300);
        double gap30 = 0.0;
        bool monotone = true;
        for (std::size_t i = 0; i < h0.size(); ++i) {
            gap30 = std::max(gap30, std::abs(h3[i] - h0[i]));
            if (std::abs(h2[i] - h0[i]) + 1e-3 * scale < std::abs(h3[i] - h0[i]))
                monotone = false;
        }
        const bool gap_ok = gap30 <= 5e-2 * scale;
        res.pass = gap_ok && monotone;
        res.detail = "max |H_rel(1e-3) - H_rel(0)| = " + detail::fmt(gap30 / scale) +
                     " x scale (need <= 5e-2), eps-gap " +
                     (monotone ? "monotone" : "NOT monotone");
        return res;
    }

    // stated wall-clock budgets, seconds; 0 = no budget
    static double runtime_budget(int id) {
        switch (id) {
            case 1: return 5.0;
            case 3: return 30.0;
            case 5: return 300.0;
            case 6: return 600.0;
            case 7: return 600.0;
            default: return 0.0;
        }
    }

    CriterionResult run_criterion(int id) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        switch (id) {
            case 1: res = c1_operator_oracle(); break;
            case 2: res = c2_multiplier_consistency(); break;
            case 3: res = c3_barenblatt_validity(); break;
            case 4: res = c4_stationarity(); break;
            case 5: res = c5_pure_rate(); break;
            case 6: res = c6_absorption_rate(); break;
            case 7: res = c7_convection_rate(); break;
            case 8: res = c8_inequality_suite(); break;
            case 9: res = c9_lp_decay(); break;
            case 10: res = c10_integrated_crosscheck(); break;
            case 11: res = c11_stroock_varopoulos(); break;
            case 12: res = c12_regularization_consistency(); break;
            default:
                throw validation_error("verify: unknown criterion " + std::to_string(id));
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double budget = runtime_budget(id);
        if (budget > 0.0 && res.seconds > budget) {
            res.pass = false;
            res.detail += ", OVER the " + detail::fmt(budget) + "s budget";
        }
        return res;
    }

  private:
    VerifySuite suite_;
    std::map<int, RunResult> stored_runs_;

    friend std::vector<CriterionResult> run_acceptance_suite(const VerifySuite&, int);
};

inline int verify_thread_cap() {
    const char* env = std::getenv("FRACPME_THREADS");
    if (!env) return static_cast<int>(std::thread::hardware_concurrency());
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
}

// Run the selected criteria; the ones that feed criterion 8 (4-7) run first,
// independent criteria run concurrently up to the thread cap.
inline std::vector<CriterionResult> run_acceptance_suite(const VerifySuite& suite,
                                                         int threads = 0) {
    AcceptanceSuite engine(suite);
    if (threads <= 0) threads = std::max(1, verify_thread_cap());

    std::vector<int> phase1, phase2;
    for (int id : suite.criteria) {
        if (id == 8) phase2.push_back(id);
        else phase1.push_back(id);
    }
    // criteria 4-7 mutate shared state (stored runs), keep them on one lane
    std::vector<int> serial, parallel;
    for (int id : phase1)
        (id >= 4 && id <= 7 ? serial : parallel).push_back(id);

    std::vector<CriterionResult> results(suite.criteria.size());
    auto slot_of = [&](int id) {
        for (std::size_t i = 0; i < suite.criteria.size(); ++i)
            if (suite.criteria[i] == id) return i;
        return suite.criteria.size();
    };

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= parallel.size()) break;
            results[slot_of(parallel[i])] = engine.run_criterion(parallel[i]);
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(threads, std::max<std::size_t>(parallel.size(), 1));
    pool.reserve(nw);
    for (int w = 0; w < nw - 1; ++w) pool.emplace_back(worker);
    for (int id : serial) results[slot_of(id)] = engine.run_criterion(id);
    worker();
    for (auto& th : pool) th.join();
    for (int id : phase2) results[slot_of(id)] = engine.run_criterion(id);
    return results;
}

inline nlohmann::json results_to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results)
        arr.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"detail", r.detail},
                       {"seconds", r.seconds}});
    return arr;
}

}  // namespace fracpme
