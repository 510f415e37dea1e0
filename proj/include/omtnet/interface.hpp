#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "omtnet/om_node.hpp"

namespace omtnet {

struct QubitParams {
    double omega_q = 1.0;  ///< qubit splitting
    double lambda = 0.0;   ///< qubit-resonator coupling
    double T2 = std::numeric_limits<double>::infinity();  ///< intrinsic coherence time

    void validate() const {
        if (lambda < 0.0) throw ConfigError("QubitParams: lambda must be nonnegative");
        if (!(T2 > 0.0)) throw ConfigError("QubitParams: T2 must be positive");
    }
};

/// Local noise correlation matrix r = diag[gm Nm, 0, gm (Nm+1), 2 kappa_0]
/// in the (b, c, b^dag, c^dag) basis.
inline CMatrix node_noise_matrix(const OMNodeParams& p) {
    CMatrix r = CMatrix::Zero(4, 4);
    r(0, 0) = p.gamma_m * p.n_m;
    r(2, 2) = p.gamma_m * (p.n_m + 1.0);
    r(3, 3) = 2.0 * p.kappa_0;
    return r;
}

/// Vacuum fiber-input correlation matrix I0 = diag[0, 0, 0, 1].
inline CMatrix fiber_input_matrix() {
    CMatrix i0 = CMatrix::Zero(4, 4);
    i0(3, 3) = 1.0;
    return i0;
}

/// Local plus fiber-input noise seen by an isolated node.
inline CMatrix total_input_noise(const OMNodeParams& p) {
    return node_noise_matrix(p) + 2.0 * p.kappa_f * fiber_input_matrix();
}

/// Steady covariance C_kl = <v_k^dag v_l> of an isolated node, from the
/// Lyapunov equation conj(M) C + C M^T = n.
inline CMatrix steady_covariance(const LinearizedNode& n) {
    require_stable(n, "steady_covariance");
    const CMatrix m = drift_matrix(n);
    return lyapunov_solve(m.conjugate(), total_input_noise(n.base));
}

/// Single-node spectrum matrix C(omega) with C_kl(omega) the Fourier density
/// of <v_k^dag(t) v_l(0)>; its frequency integral /2pi gives the covariance.
inline CMatrix single_node_spectrum(const LinearizedNode& n, double omega) {
    const CMatrix a = response_matrix(drift_matrix(n), omega);
    return a.conjugate() * total_input_noise(n.base) * a.transpose();
}

/// Effective qubit-light coefficients of one transducer.
struct InterfaceCoefficients {
    double Gamma = 0.0;   ///< effective decay rate
    double Delta0 = 0.0;  ///< frequency shift
    double eta = 0.0;     ///< branching ratio kappa_f / kappa
    double phi = 0.0;     ///< output phase arg{i A21(omega_q)}
    double N0 = 0.0;      ///< effective bath occupation
    double adiabaticity = 0.0;  ///< lambda / max(gamma_op, min|omega_pm - omega_q|)
};

/// Effective bath occupation, numerical route: single-frequency evaluation
/// of the noise spectrum over the decay spectrum (lambda drops out).
inline double bath_occupation_numeric(const LinearizedNode& n, const QubitParams& q) {
    const CMatrix a = response_matrix(drift_matrix(n), q.omega_q);
    const CMatrix nn = total_input_noise(n.base);
    Complex y = 0.0;
    for (int k = 0; k < 4; ++k) y += std::conj(a(0, k)) * nn(k, k) * a(0, k);
    const double re_a11 = a(0, 0).real();
    if (re_a11 <= 0.0) throw RegimeError("bath_occupation: nonpositive decay spectrum");
    return y.real() / (2.0 * re_a11);
}

/// Closed form for gamma_m -> 0: thermal part in RWA plus Stokes scattering.
inline double bath_occupation_closed(const LinearizedNode& n, const QubitParams& q) {
    const double kap = n.base.kappa();
    const double det = n.delta_c_eff - q.omega_q;
    const double num = kap * kap + det * det;
    const double g2 = std::norm(n.G);
    double val = n.base.thermal_rate() / (2.0 * kap) * num / g2;
    val += num / (4.0 * n.delta_c_eff * q.omega_q);
    return val;
}

inline InterfaceCoefficients effective_coefficients(const LinearizedNode& n,
                                                    const QubitParams& q) {
    q.validate();
    require_stable(n, "effective_coefficients");
    const CMatrix m = drift_matrix(n);
    const CMatrix a = response_matrix(m, q.omega_q);
    InterfaceCoefficients out;
    const double l2 = q.lambda * q.lambda;
    out.Gamma = 0.5 * l2 * a(0, 0).real();
    out.Delta0 = 0.25 * l2 * a(0, 0).imag();
    out.eta = n.base.kappa() > 0.0 ? n.base.kappa_f / n.base.kappa() : 0.0;
    out.phi = std::arg(kI * a(1, 0));
    out.N0 = q.lambda > 0.0 ? bath_occupation_numeric(n, q) : 0.0;
    const NormalModeData nm = normal_modes(m);
    const double det = std::min(std::abs(nm.omega_plus - q.omega_q),
                                std::abs(nm.omega_minus - q.omega_q));
    out.adiabaticity = q.lambda / std::max(nm.gamma_op, det);
    if (out.adiabaticity >= 1.0)
        warn("effective_coefficients: adiabatic elimination marginal (lambda not small)");
    return out;
}

/// Closed-form decay rate, valid for zeta = 0 and gamma_m -> 0.
inline double closed_form_rate(const LinearizedNode& n, const QubitParams& q) {
    if (n.base.zeta != 0.0)
        throw ConfigError("closed_form_rate: requires the RWA coupling (zeta = 0)");
    if (n.base.gamma_m != 0.0)
        throw ConfigError("closed_form_rate: requires gamma_m = 0");
    const double g2 = std::norm(n.G);
    const double kap = n.base.kappa();
    const double dq = (n.delta_c_eff - q.omega_q) * (q.omega_q - n.base.omega_r);
    const double dr = q.omega_q - n.base.omega_r;
    const double denom = (g2 + dq) * (g2 + dq) + kap * kap * dr * dr;
    return 0.5 * q.lambda * q.lambda * g2 * kap / denom;
}

/// Free-field steady cavity occupation <c^dag c> of an isolated node.
inline double cavity_occupation_free(const LinearizedNode& n) {
    return steady_covariance(n)(1, 1).real();
}

/// Photons emitted into the fiber over a window T independent of the qubit.
inline double excess_photons(const LinearizedNode& n, double window) {
    return 2.0 * n.base.kappa_f * window * cavity_occupation_free(n);
}

enum class TuningControl { vary_G, vary_Dc };

/// Classical working point at fixed scaled drive strength |E_G| = |g0 E|:
/// returns the enhanced coupling G (complex) and the renormalized detuning
/// for a given bare detuning. When several intensity branches coexist, a
/// nonnegative `hint_y` selects the one continuing the branch at that
/// intensity (control paths are swept adiabatically); without a hint the
/// ambiguity is refused.
inline std::pair<Complex, double> steady_coupling_at(const OMNodeParams& p,
                                                     double delta_c_bare, Complex drive_g,
                                                     double hint_y = -1.0) {
    const double e2 = std::norm(drive_g);
    const double kap = p.kappa();
    const double a3 = 4.0 / (p.omega_r * p.omega_r);
    const double a2 = -4.0 * delta_c_bare / p.omega_r;
    const double a1 = delta_c_bare * delta_c_bare + kap * kap;
    auto roots = positive_real_cubic_roots(a3, a2, a1, -e2);
    if (roots.empty()) throw NumericalError("steady_coupling_at: no intensity root");
    double y = roots.front();
    if (roots.size() > 1) {
        if (hint_y < 0.0)
            throw RegimeError("steady_coupling_at: multistable regime on the tuning path");
        for (double r : roots)
            if (std::abs(r - hint_y) < std::abs(y - hint_y)) y = r;
    }
    const double delta_eff = delta_c_bare - 2.0 * y / p.omega_r;
    const Complex g = drive_g / Complex(kap, delta_eff);
    return {g, delta_eff};
}

/// Decay rate along the control paths of the two tuning schemes. vary_G
/// sweeps the enhanced coupling at a bare detuning chosen so the
/// renormalized one hits omega_r at g_ref; vary_Dc sweeps the bare detuning
/// at constant laser power, with G following the classical steady state.
inline std::vector<std::pair<double, double>> tuning_path(const OMNodeParams& p,
                                                          const QubitParams& q,
                                                          TuningControl control,
                                                          const std::vector<double>& grid,
                                                          double g_ref) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    const double delta_bare = bare_detuning_for(p, g_ref, p.omega_r);
    if (control == TuningControl::vary_G) {
        OMNodeParams ps = p;
        ps.delta_c = delta_bare;
        for (double g : grid) {
            const auto node = linearize(ps, g);
            out.emplace_back(g, effective_coefficients(node, q).Gamma);
        }
    } else {
        // constant drive fixed by the reference point (delta_eff = omega_r)
        const Complex drive_g = g_ref * Complex(p.kappa(), p.omega_r);
        double hint = g_ref * g_ref;
        for (double dc : grid) {
            auto [g, delta_eff] = steady_coupling_at(p, dc, drive_g, hint);
            hint = std::norm(g);
            OMNodeParams ps = p;
            ps.delta_c = dc;
            LinearizedNode node{ps, g, delta_eff};
            out.emplace_back(dc, effective_coefficients(node, q).Gamma);
        }
    }
    return out;
}

}  // namespace omtnet
