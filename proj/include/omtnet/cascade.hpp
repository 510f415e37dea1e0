#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "omtnet/interface.hpp"

namespace omtnet {

/// Ordered chain of transducer nodes along one fiber; the output of node j
/// drives every node i > j. Retardation phases are absorbed into the
/// operators, so no explicit delays appear. The qubits must share a common
/// splitting and coupling (the elimination is carried out at one frequency);
/// coherence times may differ.
struct NodeChain {
    std::vector<LinearizedNode> nodes;
    std::vector<QubitParams> qubits;

    int size() const { return static_cast<int>(nodes.size()); }

    void validate() const {
        if (nodes.empty() || nodes.size() != qubits.size())
            throw ConfigError("NodeChain: need one qubit per node");
        for (const auto& q : qubits) {
            q.validate();
            if (q.omega_q != qubits.front().omega_q || q.lambda != qubits.front().lambda)
                throw ConfigError("NodeChain: qubits must share omega_q and lambda");
        }
    }

    double omega_q() const { return qubits.front().omega_q; }
    double lambda() const { return qubits.front().lambda; }
};

inline CMatrix projector_P() {
    CMatrix p = CMatrix::Zero(4, 4);
    p(1, 1) = 1.0;
    p(3, 3) = 1.0;
    return p;
}

/// Single-node transfer matrix C(omega) = P - 2 kappa_f P A(omega) P,
/// describing how the fiber field is filtered when bypassing the node.
inline CMatrix single_node_transfer(const LinearizedNode& n, double omega) {
    const CMatrix p = projector_P();
    const CMatrix a = response_matrix(drift_matrix(n), omega);
    return p - 2.0 * n.base.kappa_f * p * a * p;
}

/// Fiber transmission amplitude t = C22(omega) of one node.
inline Complex transmission_amplitude(const LinearizedNode& n, double omega) {
    return single_node_transfer(n, omega)(1, 1);
}

/// Response and transfer matrices of every node at one frequency.
struct ChainResponse {
    std::vector<CMatrix> a;  ///< A^i(omega)
    std::vector<CMatrix> c;  ///< C^i(omega)
};

inline ChainResponse chain_response(const NodeChain& chain, double omega) {
    ChainResponse out;
    const CMatrix p = projector_P();
    out.a.reserve(chain.nodes.size());
    out.c.reserve(chain.nodes.size());
    for (const auto& n : chain.nodes) {
        out.a.push_back(response_matrix(drift_matrix(n), omega));
        out.c.push_back(CMatrix(p - 2.0 * n.base.kappa_f * p * out.a.back() * p));
    }
    return out;
}

namespace detail {

// T^{ij}(omega) from precomputed per-node responses; 1-based node indices,
// j = 0 denotes the common fiber input.
inline CMatrix multinode_response_from(const NodeChain& chain, const ChainResponse& r, int i,
                                       int j) {
    const int n = chain.size();
    if (i < 1 || i > n || j < 0 || j > n || i < j)
        throw ConfigError("multinode_response: need 1 <= j <= i <= N (or j = 0)");
    if (i == j) return r.a[i - 1];
    const CMatrix p = projector_P();
    CMatrix prod = r.a[i - 1];
    for (int k = i - 1; k > j; --k) prod = prod * r.c[k - 1];
    if (j == 0) return -std::sqrt(2.0 * chain.nodes[i - 1].base.kappa_f) * prod;
    const double pref =
        -2.0 * std::sqrt(chain.nodes[i - 1].base.kappa_f * chain.nodes[j - 1].base.kappa_f);
    return pref * prod * p * r.a[j - 1];
}

}  // namespace detail

/// Multinode response matrix T^{ij}(omega): propagation of a signal from
/// node j to node i through the intermediate transfer matrices. j = 0 gives
/// the response to the common fiber input.
inline CMatrix multinode_response(const NodeChain& chain, int i, int j, double omega) {
    chain.validate();
    return detail::multinode_response_from(chain, chain_response(chain, omega), i, j);
}

/// Steady-state spectrum matrix C^{ij}(omega) of the chain: the Fourier
/// density of <v_k^{i dag}(t) v_l^j(0)>, assembled from the transfer
/// matrices and the per-node noise statistics.
inline CMatrix cascaded_spectrum(const NodeChain& chain, const ChainResponse& r, int i, int j,
                                 double omega) {
    (void)omega;
    const CMatrix ti0 = detail::multinode_response_from(chain, r, i, 0);
    const CMatrix tj0 = detail::multinode_response_from(chain, r, j, 0);
    CMatrix out = ti0.conjugate() * fiber_input_matrix() * tj0.transpose();
    for (int n = 1; n <= std::min(i, j); ++n) {
        const CMatrix tin = detail::multinode_response_from(chain, r, i, n);
        const CMatrix tjn = detail::multinode_response_from(chain, r, j, n);
        out += tin.conjugate() * node_noise_matrix(chain.nodes[n - 1].base) * tjn.transpose();
    }
    return out;
}

inline CMatrix cascaded_spectrum(const NodeChain& chain, int i, int j, double omega) {
    chain.validate();
    return cascaded_spectrum(chain, chain_response(chain, omega), i, j, omega);
}

/// Joint 4N x 4N drift matrix of the chain (block lower triangular: the
/// cascaded coupling feeds cavity quadratures forward).
inline CMatrix joint_drift(const NodeChain& chain) {
    const int n = chain.size();
    CMatrix m = CMatrix::Zero(4 * n, 4 * n);
    const CMatrix p = projector_P();
    for (int i = 0; i < n; ++i) {
        m.block(4 * i, 4 * i, 4, 4) = drift_matrix(chain.nodes[i]);
        for (int j = 0; j < i; ++j)
            m.block(4 * i, 4 * j, 4, 4) =
                2.0 * std::sqrt(chain.nodes[i].base.kappa_f * chain.nodes[j].base.kappa_f) * p;
    }
    return m;
}

/// Joint noise correlation matrix: independent local noises plus the shared
/// fiber vacuum input.
inline CMatrix joint_noise(const NodeChain& chain) {
    const int n = chain.size();
    CMatrix nn = CMatrix::Zero(4 * n, 4 * n);
    const CMatrix i0 = fiber_input_matrix();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CMatrix blk =
                2.0 * std::sqrt(chain.nodes[i].base.kappa_f * chain.nodes[j].base.kappa_f) * i0;
            if (i == j) blk += node_noise_matrix(chain.nodes[i].base);
            nn.block(4 * i, 4 * j, 4, 4) = blk;
        }
    }
    return nn;
}

/// Joint steady covariance <v_k^{i dag} v_l^j> from the Lyapunov equation.
inline CMatrix joint_steady_covariance(const NodeChain& chain) {
    const CMatrix m = joint_drift(chain);
    return lyapunov_solve(m.conjugate(), joint_noise(chain));
}

/// Full coefficient set of the effective N-qubit master equation.
struct CascadedMECoefficients {
    RVector Gamma;      ///< decay rates
    RVector Delta0;     ///< elimination-induced shifts
    RVector DeltaTh;    ///< thermal shifts
    RVector Nocc;       ///< effective bath occupations
    CMatrix J;          ///< cascaded couplings, lower triangular (i > j)
    CMatrix D;          ///< correlated diffusion rates (i != j)
    RVector theta;      ///< absorbed output phases
    bool theta_rwa_convention = true;  ///< false: nearest-neighbour arg J fallback

    RVector Delta() const { return Delta0 + DeltaTh; }
    int size() const { return static_cast<int>(Gamma.size()); }
};

/// Assembles the cascaded master-equation coefficients at the common qubit
/// frequency. Thermal shifts need the joint steady covariance and can be
/// skipped for speed.
inline CascadedMECoefficients me_coefficients(const NodeChain& chain,
                                              bool thermal_shift = true) {
    chain.validate();
    const int n = chain.size();
    for (const auto& node : chain.nodes) require_stable(node, "me_coefficients");
    const double wq = chain.omega_q();
    const double l2 = chain.lambda() * chain.lambda();
    const ChainResponse r = chain_response(chain, wq);

    CascadedMECoefficients out;
    out.Gamma.resize(n);
    out.Delta0.resize(n);
    out.DeltaTh = RVector::Zero(n);
    out.Nocc.resize(n);
    out.J = CMatrix::Zero(n, n);
    out.D = CMatrix::Zero(n, n);
    out.theta.resize(n);

    for (int i = 1; i <= n; ++i) {
        const Complex xii = r.a[i - 1](0, 0);
        out.Gamma(i - 1) = 0.5 * l2 * xii.real();
        out.Delta0(i - 1) = 0.25 * l2 * xii.imag();
        for (int j = 1; j < i; ++j)
            out.J(i - 1, j - 1) =
                0.25 * l2 * detail::multinode_response_from(chain, r, i, j)(0, 0);
    }
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const Complex yij = cascaded_spectrum(chain, r, i, j, wq)(0, 0);
            if (i == j) {
                double nocc = 0.0;
                if (out.Gamma(i - 1) > 0.0) nocc = 0.25 * l2 * yij.real() / out.Gamma(i - 1);
                out.Nocc(i - 1) = std::max(nocc, 0.0);
            } else {
                out.D(i - 1, j - 1) = 0.25 * l2 * yij;
            }
        }
    }

    if (thermal_shift) {
        const CMatrix cov = joint_steady_covariance(chain);
        const CMatrix aj = response_matrix(joint_drift(chain), wq);
        for (int i = 0; i < n; ++i) {
            Complex t_one_sided = 0.0;
            for (int col = 0; col < 4 * n; ++col)
                t_one_sided += std::conj(aj(4 * i, col)) * cov(col, 4 * i);
            out.DeltaTh(i) = -0.5 * l2 * t_one_sided.imag();
        }
    }

    // absorbed phases: the footnote construction is exact in RWA for real G
    bool rwa_real = true;
    for (const auto& node : chain.nodes)
        if (node.base.zeta != 0.0 || std::abs(node.G.imag()) > 1e-14 * std::abs(node.G))
            rwa_real = false;
    if (rwa_real) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double phi_i = std::arg(kI * r.a[i](1, 0));
            out.theta(i) = phi_i + acc;
            acc += 2.0 * phi_i;
        }
        out.theta_rwa_convention = true;
    } else {
        out.theta(0) = std::arg(kI * r.a[0](1, 0));
        for (int i = 1; i < n; ++i)
            out.theta(i) = out.theta(i - 1) + std::arg(out.J(i, i - 1));
        out.theta_rwa_convention = false;
    }
    return out;
}

/// Noise partition of qubit i's effective occupation: the local part and the
/// cascaded part fed forward by the preceding nodes (1-based index).
inline std::pair<double, double> cascaded_occupation(const NodeChain& chain, int i) {
    chain.validate();
    if (i < 1 || i > chain.size()) throw ConfigError("cascaded_occupation: bad node index");
    const double n0 = bath_occupation_numeric(chain.nodes[i - 1], chain.qubits[i - 1]);
    if (i == 1) return {n0, 0.0};
    const double wq = chain.omega_q();
    const ChainResponse r = chain_response(chain, wq);
    double nc = 0.0;
    for (int j = 1; j < i; ++j) {
        for (int k = 1; k < i; ++k) {
            const double pref = 2.0 * std::sqrt(chain.nodes[j - 1].base.kappa_f *
                                                chain.nodes[k - 1].base.kappa_f);
            nc += (pref * cascaded_spectrum(chain, r, j, k, wq)(1, 1)).real();
        }
    }
    return {n0, nc};
}

/// Coefficient vectors of the thermal jump operators: source node n feeds
/// qubits i >= n with weight (lambda/2) conj(T11^{in}). Exact rewrite of the
/// noise lines of the master equation in the regime zeta = 0, kappa_0 = 0.
inline std::vector<CVector> thermal_jump_operators(const NodeChain& chain) {
    chain.validate();
    for (const auto& node : chain.nodes)
        if (node.base.zeta != 0.0 || node.base.kappa_0 != 0.0)
            throw RegimeError("thermal_jump_operators: requires zeta = 0 and kappa_0 = 0");
    const int n = chain.size();
    const double wq = chain.omega_q();
    const double half_lambda = 0.5 * chain.lambda();
    const ChainResponse r = chain_response(chain, wq);
    std::vector<CVector> out;
    out.reserve(n);
    for (int src = 1; src <= n; ++src) {
        CVector coeff = CVector::Zero(n);
        for (int i = src; i <= n; ++i)
            coeff(i - 1) = half_lambda *
                           std::conj(detail::multinode_response_from(chain, r, i, src)(0, 0));
        out.push_back(coeff);
    }
    return out;
}

/// Local drives realizing prescribed classical amplitudes despite the drive
/// accumulation along the fiber: E_i = alpha_i (i delta_eff + kappa)
/// + 2 sum_{j<i} sqrt(kf_i kf_j) alpha_j.
inline std::vector<Complex> local_drives_for_targets(const std::vector<OMNodeParams>& params,
                                                     const std::vector<Complex>& alphas) {
    if (params.size() != alphas.size())
        throw ConfigError("local_drives_for_targets: size mismatch");
    std::vector<Complex> out(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        const double delta_eff =
            p.delta_c - 2.0 * p.g0 * p.g0 * std::norm(alphas[i]) / p.omega_r;
        Complex e = alphas[i] * Complex(p.kappa(), delta_eff);
        for (size_t j = 0; j < i; ++j)
            e += 2.0 * std::sqrt(p.kappa_f * params[j].kappa_f) * alphas[j];
        out[i] = e;
    }
    return out;
}

}  // namespace omtnet
