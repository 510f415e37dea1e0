#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "omtnet/interface.hpp"
#include "omtnet/numerics.hpp"

using namespace omtnet;

namespace {

OMNodeParams resonant_node(double kappa, double g_ref, double zeta = 0.0) {
    OMNodeParams p;
    p.omega_r = 1.0;
    p.kappa_f = kappa;
    p.zeta = zeta;
    p.delta_c = bare_detuning_for(p, g_ref, p.omega_r);
    return p;
}

}  // namespace

TEST_CASE("effective_coefficients: strong coupling on resonance gives lambda^2/2kappa") {
    const double kap = 0.05, g = 1.5 * kap;
    OMNodeParams p = resonant_node(kap, g);
    QubitParams q{.omega_q = p.omega_r - g, .lambda = 1e-3};
    auto c = effective_coefficients(linearize(p, g), q);
    const double gmax = q.lambda * q.lambda / (2.0 * kap);
    REQUIRE(std::abs(c.Gamma - gmax) < 0.02 * gmax);
    REQUIRE(c.eta == 1.0);
}

TEST_CASE("effective_coefficients: weak coupling on resonance gives lambda^2 kappa/2G^2") {
    const double kap = 0.05;
    OMNodeParams p;
    p.omega_r = 1.0;
    p.kappa_f = kap;
    QubitParams q{.omega_q = 1.0, .lambda = 1e-4};
    for (double g : {kap / 20.0, kap / 10.0}) {
        OMNodeParams ps = p;
        ps.delta_c = bare_detuning_for(p, g, p.omega_r);
        auto c = effective_coefficients(linearize(ps, g), q);
        const double expected = q.lambda * q.lambda * kap / (2.0 * g * g);
        REQUIRE(std::abs(c.Gamma - expected) < 0.05 * expected);
    }
}

TEST_CASE("effective_coefficients: lambda = 0 turns everything off") {
    OMNodeParams p = resonant_node(0.05, 0.075);
    QubitParams q{.omega_q = 0.9, .lambda = 0.0};
    auto c = effective_coefficients(linearize(p, 0.075), q);
    REQUIRE(c.Gamma == 0.0);
    REQUIRE(c.Delta0 == 0.0);
}

TEST_CASE("closed_form_rate: resonance value and matrix-route agreement") {
    const double kap = 0.037, g = 1.5 * kap;
    OMNodeParams p = resonant_node(kap, g);
    QubitParams q{.omega_q = p.omega_r - g, .lambda = 2e-3};
    auto node = linearize(p, g);
    const double rate = closed_form_rate(node, q);
    REQUIRE(std::abs(rate - q.lambda * q.lambda / (2.0 * kap)) <
            1e-12 * q.lambda * q.lambda / (2.0 * kap));

    REQUIRE(closed_form_rate(linearize(p, 0.0), q) == 0.0);

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        OMNodeParams pr;
        pr.omega_r = 1.0;
        pr.kappa_f = 0.01 + 0.1 * u(rng);
        pr.kappa_0 = 0.05 * u(rng);
        pr.delta_c = 0.8 + 0.6 * u(rng);
        const double g2 = 0.2 * u(rng);
        QubitParams qr{.omega_q = 0.6 + 0.8 * u(rng), .lambda = 1e-3};
        auto n = linearize(pr, g2);
        const double a = closed_form_rate(n, qr);
        const double b = effective_coefficients(n, qr).Gamma;
        REQUIRE(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-300));
    }
}

TEST_CASE("Gamma >= 0 over random stable draws") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int accepted = 0;
    while (accepted < 200) {
        OMNodeParams p;
        p.omega_r = 1.0;
        p.kappa_f = 0.005 + 0.15 * u(rng);
        p.kappa_0 = 0.05 * u(rng);
        p.gamma_m = 0.01 * u(rng);
        p.n_m = 5.0 * u(rng);
        p.zeta = (u(rng) < 0.5) ? 0.0 : 1.0;
        p.delta_c = 0.5 + u(rng);
        auto node = linearize(p, Complex(0.25 * u(rng), 0.1 * u(rng)));
        if (stability_check(node) != StabilityClass::stable) continue;
        try {
            require_stable(node, "draw");
        } catch (const RegimeError&) {
            continue;
        }
        QubitParams q{.omega_q = 0.5 + u(rng), .lambda = 1e-3};
        auto c = effective_coefficients(node, q);
        REQUIRE(c.Gamma >= 0.0);
        REQUIRE(c.N0 >= -1e-12);
        ++accepted;
    }
}

TEST_CASE("bath_occupation: zero-temperature resolved-sideband limit") {
    const double kap = 1e-3;
    OMNodeParams p = resonant_node(kap, 1.5 * kap, 1.0);
    QubitParams q{.omega_q = 1.0, .lambda = 1e-5};
    auto n = linearize(p, 1.5 * kap);
    REQUIRE(bath_occupation_numeric(n, q) < 1e-4);
}

TEST_CASE("bath_occupation: numeric vs closed form in the resolved-sideband regime") {
    OMNodeParams p;
    p.omega_r = 1.0;
    p.kappa_f = 0.03;
    p.gamma_m = 1e-6;
    p.n_m = 2e3;  // gamma_m*N_m = 2e-3
    p.zeta = 1.0;
    const double g = 0.05;
    p.delta_c = bare_detuning_for(p, g, p.omega_r);
    auto n = linearize(p, g);
    QubitParams q{.omega_q = 1.0, .lambda = 1e-4};
    const double numeric = bath_occupation_numeric(n, q);
    const double closed = bath_occupation_closed(n, q);
    REQUIRE(std::abs(numeric - closed) < 0.10 * closed);
}

TEST_CASE("excess_photons: vanishes without a noise source") {
    OMNodeParams p = resonant_node(0.05, 0.075, 0.0);
    auto n = linearize(p, 0.075);
    REQUIRE(excess_photons(n, 100.0) < 1e-14);
}

TEST_CASE("excess_photons: thermal-only spectrum matches the Lyapunov route") {
    OMNodeParams p = resonant_node(0.05, 0.075, 0.0);
    p.gamma_m = 1e-5;
    p.n_m = 1e3;
    auto n = linearize(p, 0.075);

    // quadrature of gm*Nm*|A21|^2 over frequency
    const CMatrix m = drift_matrix(n);
    auto nm = normal_modes(m);
    auto f = [&](double w) {
        const CMatrix a = response_matrix(m, w);
        return Complex(p.gamma_m * p.n_m * std::norm(a(1, 0)) +
                           p.gamma_m * (p.n_m + 1.0) * std::norm(a(1, 2)),
                       0.0);
    };
    const double cutoff = 10.0 * (p.omega_r + std::abs(n.delta_c_eff) + 0.075 + p.kappa());
    const Complex occ_quad = quad_spectrum(f, cutoff,
                                           {-nm.omega_plus, -nm.omega_minus, nm.omega_minus,
                                            nm.omega_plus}) /
                             (2.0 * kPi);
    const double occ_lyap = cavity_occupation_free(n);
    REQUIRE(std::abs(occ_quad.real() - occ_lyap) < 1e-6 * occ_lyap);

    const double window = 37.0;
    REQUIRE(std::abs(excess_photons(n, window) -
                     2.0 * p.kappa_f * window * occ_quad.real()) <
            1e-6 * excess_photons(n, window));
}

TEST_CASE("excess_photons: reproduces the T = 1/Gamma estimate within 20%") {
    const double kap = 0.05, g = 1.5 * kap;
    OMNodeParams p = resonant_node(kap, g, 1.0);
    p.gamma_m = 1e-6;
    p.n_m = 2e3;
    auto n = linearize(p, g);
    QubitParams q{.omega_q = p.omega_r - g, .lambda = 1e-3};
    const double rate = effective_coefficients(n, q).Gamma;
    const double nex = excess_photons(n, 1.0 / rate);
    const double estimate = p.thermal_rate() / rate + (kap / rate) * g * g / (p.omega_r * p.omega_r);
    REQUIRE(std::abs(nex - estimate) < 0.20 * estimate);

    // scaling form with the gamma_op^2/lambda^2 prefactor is order-correct
    auto modes = normal_modes(drift_matrix(n));
    const double gop = modes.gamma_op;
    const double scaling = (gop * gop / (q.lambda * q.lambda)) *
                           (p.thermal_rate() / gop + (kap / gop) * g * g / (p.omega_r * p.omega_r));
    REQUIRE(nex / scaling > 0.5);
    REQUIRE(nex / scaling < 5.0);
}

TEST_CASE("tuning_path: vary_G endpoints and monotonicity") {
    const double kap = 0.05, g_ref = 1.5 * kap;
    OMNodeParams p = resonant_node(kap, g_ref);
    p.gamma_m = 1e-6;
    QubitParams q{.omega_q = p.omega_r - g_ref, .lambda = 1e-3};

    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(g_ref * (k + 0.0001) / 60.0);
    auto path = tuning_path(p, q, TuningControl::vary_G, grid, g_ref);

    const double gmax = q.lambda * q.lambda / (2.0 * kap);
    REQUIRE(std::abs(path.back().second - gmax) < 0.02 * gmax);

    // G -> 0 endpoint: residual decay from mechanical damping
    const double delta = std::abs(q.omega_q - p.omega_r);
    const double residual = q.lambda * q.lambda * p.gamma_m / (4.0 * delta * delta);
    REQUIRE(std::abs(path.front().second - residual) < 0.05 * residual);

    // nondecreasing up to the resonance point (the full path here)
    for (size_t k = 0; k + 1 < path.size(); ++k)
        REQUIRE(path[k + 1].second >= path[k].second * (1.0 - 1e-12));
}

TEST_CASE("tuning_path: vary_Dc reference point matches vary_G maximum") {
    const double kap = 0.05, g_ref = 1.5 * kap;
    OMNodeParams p = resonant_node(kap, g_ref);
    QubitParams q{.omega_q = p.omega_r - g_ref, .lambda = 1e-3};
    const double dc_ref = bare_detuning_for(p, g_ref, p.omega_r);
    std::vector<double> grid;
    for (int k = 0; k <= 30; ++k) grid.push_back(dc_ref + 0.3 * k / 30.0);
    auto path = tuning_path(p, q, TuningControl::vary_Dc, grid, g_ref);
    const double gmax = q.lambda * q.lambda / (2.0 * kap);
    REQUIRE(std::abs(path.front().second - gmax) < 0.02 * gmax);
    // effective decay turns off as the cavity is detuned away
    REQUIRE(path.back().second < 0.05 * gmax);
}
