#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omtnet/oracle.hpp"

using namespace omtnet;

namespace {

// strong-coupling resonant geometry, lambda = gamma_op/5 for affordable runs
FullSystemConfig fast_config(double lambda_over_gop = 0.2, int n_trunc = 3) {
    const double kap = 0.05, g = 1.5 * kap;
    OMNodeParams p;
    p.omega_r = 1.0;
    p.kappa_f = kap;
    p.delta_c = bare_detuning_for(p, g, p.omega_r);
    FullSystemConfig cfg;
    cfg.node = linearize(p, g);
    cfg.qubit = QubitParams{.omega_q = p.omega_r - g, .lambda = lambda_over_gop * kap / 2.0};
    cfg.n_trunc = n_trunc;
    return cfg;
}

}  // namespace

TEST_CASE("full_me_simulate: lambda = 0 freezes the qubit") {
    FullSystemConfig cfg = fast_config();
    cfg.qubit.lambda = 0.0;
    auto run = full_me_simulate(cfg, 2000.0, 4000, true);
    for (double p : run.p_excited) REQUIRE(std::abs(p - 1.0) < 1e-9);
}

TEST_CASE("full_me_simulate: mechanical-damping-limited decay at G = 0") {
    OMNodeParams p;
    p.omega_r = 1.0;
    p.kappa_f = 0.05;
    p.delta_c = 1.0;
    p.gamma_m = 0.02;
    FullSystemConfig cfg;
    cfg.node = linearize(p, 0.0);
    cfg.qubit = QubitParams{.omega_q = 1.0, .lambda = 1e-3};
    cfg.n_trunc = 3;

    // effective theory with G = 0: Gamma = lambda^2/gamma_m
    const double gamma_pred = effective_coefficients(cfg.node, cfg.qubit).Gamma;
    REQUIRE(std::abs(gamma_pred - cfg.qubit.lambda * cfg.qubit.lambda / p.gamma_m) <
            1e-3 * gamma_pred);

    const double t_end = 1.5 / gamma_pred;
    auto run = full_me_simulate(cfg, t_end, static_cast<int>(t_end / 0.5), true);
    const double fit = exponential_fit_rate(run, 0.05 / gamma_pred, t_end, 0.0);
    REQUIRE(std::abs(fit - gamma_pred) < 0.05 * gamma_pred);
}

TEST_CASE("compare_effective: strong-coupling decay rate within 5%") {
    FullSystemConfig cfg = fast_config(0.2, 3);
    auto cmp = compare_effective(cfg, 2.0, 0.5, 0.25);
    REQUIRE(cmp.gamma_rel_err < 0.05);
    REQUIRE(cmp.top_fock_max < 1e-3);
}

TEST_CASE("compare_effective: thermal heating approaches the N0 prediction") {
    FullSystemConfig cfg = fast_config(0.2, 4);
    // visible effective occupation: N0 ~ 0.72 gm Nm / kappa = 0.036
    cfg.node.base.gamma_m = 1e-5;
    cfg.node.base.n_m = 0.05 * cfg.node.base.kappa() / 1e-5;
    auto cmp = compare_effective(cfg, 2.5, 0.5, 0.25);
    REQUIRE(cmp.gamma_rel_err < 0.05);
    REQUIRE(std::abs(cmp.p_steady_sim - cmp.p_steady_pred) < 0.1);
    // the heating signal itself is resolved well below the coarse band
    REQUIRE(std::abs(cmp.p_steady_sim - cmp.p_steady_pred) < 0.3 * cmp.p_steady_pred);
}

TEST_CASE("compare_effective: validity-regime guard") {
    FullSystemConfig cfg = fast_config(0.8, 3);
    REQUIRE_THROWS_AS(compare_effective(cfg), RegimeError);
}

TEST_CASE("full_me_simulate: truncation leak detected") {
    FullSystemConfig cfg = fast_config(0.2, 2);
    // drive the mechanics hard thermally so n_trunc = 2 cannot hold it
    cfg.node.base.gamma_m = 1e-3;
    cfg.node.base.n_m = 2e2;
    REQUIRE_THROWS_AS(full_me_simulate(cfg, 4000.0, 8000, false), NumericalError);
}

TEST_CASE("truncation convergence: thermal case stable under n_trunc + 2") {
    FullSystemConfig cfg = fast_config(0.2, 3);
    cfg.node.base.gamma_m = 1e-5;
    cfg.node.base.n_m = 0.02 * cfg.node.base.kappa() / 1e-5;
    const double gamma_eff = effective_coefficients(cfg.node, cfg.qubit).Gamma;
    const double t_end = 1.0 / gamma_eff;
    const int steps = static_cast<int>(t_end / 0.5);
    auto lo = full_me_simulate(cfg, t_end, steps, true);
    cfg.n_trunc = 5;
    auto hi = full_me_simulate(cfg, t_end, steps, true);
    REQUIRE(std::abs(lo.p_excited.back() - hi.p_excited.back()) <
            0.01 * hi.p_excited.back());
}
