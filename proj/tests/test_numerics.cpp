#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "omtnet/numerics.hpp"
#include "support/oracles.hpp"

using namespace omtnet;

TEST_CASE("inverse: identity and diagonal") {
    CMatrix id = CMatrix::Identity(4, 4);
    REQUIRE((inverse(id) - id).norm() < 1e-14);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = Complex(0.0, 4.0);
    CMatrix dinv = inverse(d);
    REQUIRE(std::abs(dinv(0, 0) - Complex(0.5, 0.0)) < 1e-14);
    REQUIRE(std::abs(dinv(1, 1) - Complex(0.0, -0.25)) < 1e-14);
}

TEST_CASE("inverse: residual bound on random well-conditioned matrices") {
    std::mt19937 rng(12345);
    for (int n : {3, 6, 9, 12}) {
        for (int rep = 0; rep < 20; ++rep) {
            CMatrix m = oracles::random_well_conditioned(n, rng);
            CMatrix x = inverse(m);
            REQUIRE((m * x - CMatrix::Identity(n, n)).norm() < 1e-10);
        }
    }
}

TEST_CASE("inverse: singular matrix rejected") {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    REQUIRE_THROWS_AS(inverse(m), NumericalError);
}

TEST_CASE("eig: diagonal case and ordering") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = Complex(0.0, 2.0);
    m(1, 1) = Complex(0.0, 1.0);
    auto ed = eig(m);
    REQUIRE(std::abs(ed.eigenvalues(0) - Complex(0.0, 1.0)) < 1e-14);
    REQUIRE(std::abs(ed.eigenvalues(1) - Complex(0.0, 2.0)) < 1e-14);
}

TEST_CASE("eig: residual and reconstruction on random matrices") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + rep % 7;
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
        auto ed = eig(m);
        for (int k = 0; k < n; ++k) {
            const CVector v = ed.vectors.col(k);
            REQUIRE((m * v - ed.eigenvalues(k) * v).norm() <= 1e-9 * m.norm() * v.norm());
        }
        CMatrix lam = ed.eigenvalues.asDiagonal();
        CMatrix rec = ed.vectors * lam * inverse(ed.vectors);
        REQUIRE((m - rec).norm() <= 1e-8 * m.norm());
    }
}

TEST_CASE("eig: matches characteristic-polynomial roots") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = Complex(u(rng), u(rng));
    auto ed = eig(m);
    auto roots = oracles::eig_by_char_poly(m);
    for (int k = 0; k < 4; ++k) {
        double best = 1e300;
        for (const auto& r : roots) best = std::min(best, std::abs(r - ed.eigenvalues(k)));
        REQUIRE(best < 1e-9);
    }
}

TEST_CASE("lyapunov_solve: closed-form cases") {
    CMatrix id = CMatrix::Identity(3, 3);
    CMatrix c = lyapunov_solve(id, id);
    REQUIRE((c - 0.5 * id).norm() < 1e-12);

    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 8.0;
    CMatrix c2 = lyapunov_solve(m, d);
    REQUIRE(std::abs(c2(0, 0) - 1.0) < 1e-12);
    REQUIRE(std::abs(c2(1, 1) - 2.0) < 1e-12);
}

TEST_CASE("lyapunov_solve: residual on random stable systems") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + rep % 5;
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
        m += (1.5 * n) * CMatrix::Identity(n, n);  // push spectrum into Re > 0
        CMatrix w(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w(i, j) = Complex(u(rng), u(rng));
        CMatrix d = w * w.adjoint();  // Hermitian PSD
        CMatrix c = lyapunov_solve(m, d);
        REQUIRE((m * c + c * m.adjoint() - d).norm() < 1e-10 * d.norm());
    }
}

TEST_CASE("lyapunov_solve: unstable drift rejected") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = -0.1;
    m(1, 1) = 1.0;
    REQUIRE_THROWS_AS(lyapunov_solve(m, CMatrix::Identity(2, 2)), RegimeError);
}

TEST_CASE("quad_spectrum: unit Lorentzian") {
    const double gamma = 1e-3;
    auto f = [&](double w) { return Complex(gamma / M_PI / (w * w + gamma * gamma), 0.0); };
    Complex val = quad_spectrum(f, 50.0, {-gamma, 0.0, gamma});
    REQUIRE(std::abs(val - 1.0) < 1e-8);
}

TEST_CASE("quad_spectrum: zero function") {
    auto f = [](double) { return Complex(0.0, 0.0); };
    REQUIRE(std::abs(quad_spectrum(f, 10.0)) == 0.0);
}

TEST_CASE("quad_spectrum: slow decay rejected") {
    auto f = [](double w) { return Complex(1.0 / std::sqrt(1.0 + std::abs(w)), 0.0); };
    REQUIRE_THROWS_AS(quad_spectrum(f, 10.0), NumericalError);
}

TEST_CASE("ode_rk4: exponential decay and order-4 convergence") {
    auto rhs = [](double, double y) { return -y; };
    auto make_grid = [](int n) {
        std::vector<double> t(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) t[static_cast<size_t>(k)] = k / double(n);
        return t;
    };
    auto traj = ode_rk4(rhs, 1.0, make_grid(1000));
    REQUIRE(std::abs(traj.back() - std::exp(-1.0)) < 1e-8);

    // halving dt cuts the error by at least 12x (fourth order: ideally 16x)
    const double exact = std::exp(-1.0);
    const double e1 = std::abs(ode_rk4(rhs, 1.0, make_grid(40)).back() - exact);
    const double e2 = std::abs(ode_rk4(rhs, 1.0, make_grid(80)).back() - exact);
    REQUIRE(e1 / e2 >= 12.0);
}

TEST_CASE("ode_rk4: order check on an oscillatory problem") {
    auto rhs = [](double t, Complex y) { return Complex(0.0, 1.0) * y + std::cos(t); };
    auto make_grid = [](int n) {
        std::vector<double> t(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) t[static_cast<size_t>(k)] = 2.0 * k / double(n);
        return t;
    };
    const Complex ref = ode_rk4(rhs, Complex(1.0, 0.0), make_grid(4096)).back();
    const double e1 = std::abs(ode_rk4(rhs, Complex(1.0, 0.0), make_grid(64)).back() - ref);
    const double e2 = std::abs(ode_rk4(rhs, Complex(1.0, 0.0), make_grid(128)).back() - ref);
    REQUIRE(e1 / e2 >= 12.0);
}

TEST_CASE("root_bisect: sqrt(2) and bracket error") {
    auto g = [](double x) { return x * x - 2.0; };
    REQUIRE(std::abs(root_bisect(g, 1.0, 2.0, 1e-12) - std::sqrt(2.0)) < 1e-10);
    REQUIRE_THROWS_AS(root_bisect(g, 2.0, 3.0, 1e-12), NumericalError);
}

TEST_CASE("cubic roots: known factorizations") {
    // (x-1)(x-2)(x-3)
    auto r = positive_real_cubic_roots(1.0, -6.0, 11.0, -6.0);
    REQUIRE(r.size() == 3);
    REQUIRE(std::abs(r[0] - 1.0) < 1e-9);
    REQUIRE(std::abs(r[2] - 3.0) < 1e-9);

    // (x-2)(x^2+1): single positive real root
    auto r2 = positive_real_cubic_roots(1.0, -2.0, 1.0, -2.0);
    REQUIRE(r2.size() == 1);
    REQUIRE(std::abs(r2[0] - 2.0) < 1e-9);
}
