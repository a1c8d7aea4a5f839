// fracpme command line: simulate the nonlocal porous medium equation with
// fractional pressure, dump Barenblatt profiles, fit decay rates, and run the
// acceptance suite.
//
// Exit codes: 0 success, 1 acceptance/fit failure, 2 validation error,
// 3 runtime abort (support escape / NaN / lost monotonicity).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracpme/barenblatt.hpp"
#include "fracpme/csv.hpp"
#include "fracpme/experiment.hpp"
#include "fracpme/ratefit.hpp"
#include "fracpme/verify.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 double w0, double w1) {
    const fracpme::ExperimentArtifacts art =
        fracpme::run_experiment(config_path, out_path, w0, w1);
    std::cout << "wrote " << art.csv_path << " (" << art.result.records.size()
              << " records, " << art.result.steps << " steps)\n"
              << "wrote " << art.report_path << "\n"
              << "wrote " << art.plot_path << "\n";
    return 0;
}

int cmd_profile(double s, double mass, int n, double L, const std::string& out_path) {
    const fracpme::Grid1D grid(L, n);
    const fracpme::BarenblattProfile prof(mass, s);
    if (prof.radius() >= L)
        throw fracpme::validation_error("profile support exceeds the domain; increase --L");
    const fracpme::Field rho = prof.sample_on_grid(grid);
    const fracpme::Field pot = fracpme::riesz_potential(rho, s);
    const double c = fracpme::euler_lagrange_constant(prof);
    std::ofstream out(out_path);
    if (!out) throw fracpme::validation_error("cannot open '" + out_path + "' for writing");
    out << "x,rho,potential,el_residual\n";
    out.precision(17);
    for (int i = 0; i < n; ++i) {
        const double x = grid.center(i);
        out << x << ',' << rho[i] << ',' << pot[i] << ','
            << (pot[i] + 0.5 * x * x - c) << '\n';
    }
    std::cout << "wrote " << out_path << "  (R = " << prof.radius()
              << ", k = " << prof.normalization() << ", EL constant = " << c << ")\n";
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& out_path) {
    fracpme::VerifySuite suite;
    if (!config_path.empty()) suite = fracpme::load_verify_suite(config_path);
    if (suite.empty) {
        std::cout << "warning: empty suite file, nothing to verify (trivial pass)\n";
        return 0;
    }
    const auto results = fracpme::run_acceptance_suite(suite);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("[%s] %2d %-40s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        all_pass = all_pass && r.pass;
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw fracpme::validation_error("cannot open '" + out_path + "' for writing");
        out << fracpme::results_to_json(results).dump(2) << '\n';
        std::cout << "wrote " << out_path << "\n";
    }
    std::cout << (all_pass ? "all criteria passed\n" : "some criteria FAILED\n");
    return all_pass ? 0 : 1;
}

int cmd_fit_rate(const std::string& csv_path, const std::string& quantity,
                 const std::string& prefactor, double w0, double w1,
                 const std::string& out_path) {
    const auto records = fracpme::read_records_csv(csv_path);
    fracpme::FitQuantity q;
    if (quantity == "H_rel") q = fracpme::FitQuantity::H_rel;
    else if (quantity == "hneg_s_sq") q = fracpme::FitQuantity::hneg_s_sq;
    else if (quantity == "w2") q = fracpme::FitQuantity::w2;
    else throw fracpme::validation_error("unknown quantity '" + quantity + "'");
    fracpme::PrefactorMode mode;
    if (prefactor == "none") mode = fracpme::PrefactorMode::none;
    else if (prefactor == "log_square") mode = fracpme::PrefactorMode::log_square;
    else throw fracpme::validation_error("unknown prefactor mode '" + prefactor + "'");
    const fracpme::RateFit fit = fracpme::fit_decay_rate(records, q, mode, w0, w1);
    nlohmann::json j{{"quantity", quantity},
                     {"fitted_exponent", fit.fitted_exponent},
                     {"intercept", fit.intercept},
                     {"residual_rms", fit.residual_rms},
                     {"window", {fit.window_start, fit.window_end}},
                     {"prefactor_mode", prefactor},
                     {"points", fit.points}};
    std::cout << j.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw fracpme::validation_error("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracpme: 1D nonlocal porous medium equation with fractional pressure"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path;
    std::string quantity = "H_rel", prefactor = "none";
    std::vector<double> window = {1.0, 4.0};
    double s = 0.25, mass = 1.0, L = 4.0;
    int n = 1024;

    auto* sim = app.add_subcommand("simulate", "integrate a configured run, write CSV + report");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_path, "output CSV path")->required();
    sim->add_option("--window", window, "fit window [t0 t1]")->expected(2);

    auto* prof = app.add_subcommand("profile", "dump a Barenblatt profile with EL residuals");
    prof->add_option("--s", s, "fractional order in (0, 1/2)")->required();
    prof->add_option("--mass", mass, "profile mass")->required();
    prof->add_option("--n", n, "number of cells")->required();
    prof->add_option("--L", L, "domain half-width")->required();
    prof->add_option("--out", out_path, "output CSV path")->required();

    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--config", config_path, "suite JSON (criteria selection)");
    ver->add_option("--out", out_path, "machine-readable report path");

    auto* fit = app.add_subcommand("fit-rate", "fit a decay exponent from a records CSV");
    fit->add_option("--csv", csv_path, "records CSV from simulate")->required();
    fit->add_option("--quantity", quantity, "H_rel | hneg_s_sq | w2");
    fit->add_option("--prefactor", prefactor, "none | log_square");
    fit->add_option("--window", window, "fit window [t0 t1]")->expected(2);
    fit->add_option("--out", out_path, "also write the fit JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_path, window[0], window[1]);
        if (prof->parsed()) return cmd_profile(s, mass, n, L, out_path);
        if (ver->parsed()) return cmd_verify(config_path, out_path);
        if (fit->parsed())
            return cmd_fit_rate(csv_path, quantity, prefactor, window[0], window[1], out_path);
    } catch (const fracpme::validation_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const fracpme::solver_abort& e) {
        std::cerr << "runtime abort: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
