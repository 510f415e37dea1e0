#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "omtnet/numerics.hpp"
#include "omtnet/types.hpp"

namespace omtnet {

/// Physical parameters of one optomechanical transducer node. All
/// frequencies are angular, in units where the first node's mechanical
/// frequency is 1; the config layer converts from value/2pi in Hz.
struct OMNodeParams {
    double omega_r = 1.0;  ///< mechanical frequency
    double delta_c = 1.0;  ///< bare cavity detuning from the drive laser
    double g0 = 0.0;       ///< single-photon optomechanical coupling
    double kappa_f = 0.0;  ///< fiber-coupled cavity decay
    double kappa_0 = 0.0;  ///< intrinsic cavity decay
    double gamma_m = 0.0;  ///< mechanical energy decay
    double n_m = 0.0;      ///< thermal occupation of the mechanical bath
    double zeta = 0.0;     ///< 0 = RWA coupling, 1 = full linearized coupling

    double kappa() const { return kappa_f + kappa_0; }
    double thermal_rate() const { return gamma_m * n_m; }

    void validate() const {
        if (!(omega_r > 0.0)) throw ConfigError("OMNodeParams: omega_r must be positive");
        if (kappa_f < 0.0 || kappa_0 < 0.0 || gamma_m < 0.0 || n_m < 0.0)
            throw ConfigError("OMNodeParams: rates and occupations must be nonnegative");
        if (zeta != 0.0 && zeta != 1.0) throw ConfigError("OMNodeParams: zeta must be 0 or 1");
    }
};

struct ClassicalSteadyState {
    Complex alpha;       ///< cavity amplitude
    Complex beta;        ///< mechanical amplitude
    double delta_c_eff;  ///< renormalized detuning delta_c - 2|G|^2/omega_r
};

/// Node after linearization around the classical working point. The drift
/// matrix uses the renormalized detuning.
struct LinearizedNode {
    OMNodeParams base;
    Complex G;           ///< laser-enhanced coupling g0 * alpha
    double delta_c_eff;  ///< renormalized detuning entering the drift matrix
};

inline LinearizedNode linearize(const OMNodeParams& p, Complex g_enhanced) {
    p.validate();
    return LinearizedNode{p, g_enhanced,
                          p.delta_c - 2.0 * std::norm(g_enhanced) / p.omega_r};
}

/// Bare detuning that renormalizes to `delta_eff` once the drive reaches
/// coupling `g_ref` (fixes the operating geometry of a control path).
inline double bare_detuning_for(const OMNodeParams& p, double g_ref, double delta_eff) {
    return delta_eff + 2.0 * g_ref * g_ref / p.omega_r;
}

/// Steady state of the classical drive equations for constant drive. The
/// intensity |alpha|^2 solves a real cubic; outside the monostable regime
/// this refuses rather than picking a branch.
inline ClassicalSteadyState classical_steady_state(const OMNodeParams& p, Complex drive) {
    p.validate();
    const double e2 = std::norm(drive);
    const double kap = p.kappa();
    double y = 0.0;  // |alpha|^2
    if (e2 == 0.0) {
        y = 0.0;
    } else if (p.g0 == 0.0) {
        y = e2 / (p.delta_c * p.delta_c + kap * kap);
    } else {
        const double a3 = 4.0 * std::pow(p.g0, 4) / (p.omega_r * p.omega_r);
        const double a2 = -4.0 * p.g0 * p.g0 * p.delta_c / p.omega_r;
        const double a1 = p.delta_c * p.delta_c + kap * kap;
        auto roots = positive_real_cubic_roots(a3, a2, a1, -e2);
        if (roots.empty())
            throw NumericalError("classical_steady_state: no positive intensity root");
        if (roots.size() > 1)
            throw RegimeError(
                "classical_steady_state: multistable regime (multiple steady intensities)");
        y = roots.front();
    }
    const double delta_eff = p.delta_c - 2.0 * p.g0 * p.g0 * y / p.omega_r;
    const Complex alpha = (e2 == 0.0) ? Complex(0.0) : drive / Complex(kap, delta_eff);
    const Complex beta =
        -kI * p.g0 * std::norm(alpha) / Complex(0.5 * p.gamma_m, p.omega_r);
    if (p.g0 > 0.0 && std::norm(alpha) <= 10.0)
        warn("classical_steady_state: |alpha|^2 <= 10, linearization marginal");
    return ClassicalSteadyState{alpha, beta, delta_eff};
}

/// Integrates the classical response equations for a drive sampled on a
/// uniform grid (linear interpolation between samples).
inline std::vector<Eigen::Vector2cd> classical_transient(const OMNodeParams& p,
                                                         const std::vector<double>& t,
                                                         const std::vector<Complex>& drive,
                                                         Complex alpha0 = 0.0,
                                                         Complex beta0 = 0.0) {
    p.validate();
    if (t.size() != drive.size()) throw ConfigError("classical_transient: grid size mismatch");
    auto drive_at = [&](double time) {
        if (time <= t.front()) return drive.front();
        if (time >= t.back()) return drive.back();
        const double step = t[1] - t[0];
        const size_t k = std::min(t.size() - 2, static_cast<size_t>((time - t.front()) / step));
        const double w = (time - t[k]) / (t[k + 1] - t[k]);
        return (1.0 - w) * drive[k] + w * drive[k + 1];
    };
    const double kap = p.kappa();
    auto rhs = [&](double time, const Eigen::Vector2cd& s) {
        const Complex a = s(0), b = s(1);
        Eigen::Vector2cd d;
        d(0) = -(kI * p.delta_c + kap) * a - kI * p.g0 * (b + std::conj(b)) * a + drive_at(time);
        d(1) = -(kI * p.omega_r + 0.5 * p.gamma_m) * b - kI * p.g0 * std::norm(a);
        return d;
    };
    Eigen::Vector2cd y0;
    y0 << alpha0, beta0;
    return ode_rk4(rhs, y0, t);
}

/// Drift matrix of the linearized quantum Langevin equations in the basis
/// v = (b, c, b^dag, c^dag); dv/dt = -M v - ... . zeta multiplies the
/// counter-rotating entries.
inline CMatrix drift_matrix(const LinearizedNode& n) {
    const double wr = n.base.omega_r;
    const double gm2 = 0.5 * n.base.gamma_m;
    const double kap = n.base.kappa();
    const double dc = n.delta_c_eff;
    const Complex g = n.G;
    const double z = n.base.zeta;
    CMatrix m(4, 4);
    m << Complex(wr, -gm2), std::conj(g), 0.0, z * g,
         g, Complex(dc, -kap), z * g, 0.0,
         0.0, -z * std::conj(g), Complex(-wr, -gm2), -g,
         -z * std::conj(g), 0.0, -std::conj(g), Complex(-dc, -kap);
    return kI * m;
}

inline CMatrix response_matrix(const CMatrix& m, double omega) {
    const auto n = m.rows();
    return inverse(CMatrix(m - kI * omega * CMatrix::Identity(n, n)));
}

struct NormalModeData {
    double omega_plus = 0.0, omega_minus = 0.0;  ///< frequencies, > 0
    double gamma_plus = 0.0, gamma_minus = 0.0;  ///< decay rates
    double gamma_op = 0.0;                       ///< min of the two decay rates
};

/// Positive-frequency normal modes of a 4x4 drift matrix. Eigenvalues are
/// i*omega + gamma; the remaining two are complex conjugates. With (near-)
/// degenerate frequencies the "-" label goes to the slower-decaying mode.
inline NormalModeData normal_modes(const CMatrix& m) {
    const EigenDecomposition ed = eig(m);
    for (Eigen::Index k = 0; k < ed.eigenvalues.size(); ++k)
        if (ed.eigenvalues(k).real() <= 0.0)
            throw RegimeError("normal_modes: drift matrix is not stable");
    std::vector<Complex> pos;
    for (Eigen::Index k = 0; k < ed.eigenvalues.size(); ++k)
        if (ed.eigenvalues(k).imag() > 0.0) pos.push_back(ed.eigenvalues(k));
    if (pos.size() != 2)
        throw NumericalError("normal_modes: expected two positive-frequency modes");
    // eig() already orders by (Im, Re) ascending
    NormalModeData out;
    out.omega_minus = pos[0].imag();
    out.gamma_minus = pos[0].real();
    out.omega_plus = pos[1].imag();
    out.gamma_plus = pos[1].real();
    out.gamma_op = std::min(out.gamma_minus, out.gamma_plus);
    return out;
}

enum class StabilityClass { stable, bistable, self_oscillating };

inline const char* to_string(StabilityClass s) {
    switch (s) {
        case StabilityClass::stable: return "stable";
        case StabilityClass::bistable: return "bistable";
        case StabilityClass::self_oscillating: return "self_oscillating";
    }
    return "?";
}

/// Static stability classification, cross-checked against the spectrum of
/// the drift matrix.
inline StabilityClass stability_check(const LinearizedNode& n) {
    const double dc = n.delta_c_eff;
    const double kap = n.base.kappa();
    const double g2 = std::norm(n.G);
    StabilityClass cls = StabilityClass::stable;
    if (dc < 0.0) {
        cls = StabilityClass::self_oscillating;
    } else if (dc > 0.0 && g2 > (kap * kap + dc * dc) * n.base.omega_r / (4.0 * dc)) {
        cls = StabilityClass::bistable;
    }
    if (cls == StabilityClass::stable) {
        const EigenDecomposition ed = eig(drift_matrix(n));
        for (Eigen::Index k = 0; k < 4; ++k)
            if (ed.eigenvalues(k).real() <= 0.0) return StabilityClass::self_oscillating;
    }
    return cls;
}

inline void require_stable(const LinearizedNode& n, const char* who) {
    const EigenDecomposition ed = eig(drift_matrix(n));
    for (Eigen::Index k = 0; k < 4; ++k)
        if (ed.eigenvalues(k).real() <= 0.0)
            throw RegimeError(std::string(who) + ": node drift matrix is not stable");
}

}  // namespace omtnet
