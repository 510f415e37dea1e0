#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "omtnet/qubit_dynamics.hpp"

namespace omtnet {

/// Bus-cavity network of identical transducer nodes. Detunings here are the
/// already-renormalized ones entering the block drift matrices; the nodes
/// carry no fiber coupling (kappa_f = 0), only intrinsic decay.
struct OnChipParams {
    OMNodeParams node;     ///< per-node parameters (kappa_f must be 0)
    double g = 0.0;        ///< enhanced OM coupling, real and positive
    double h = 0.0;        ///< node-bus coupling
    double delta_c0 = 1.0; ///< bus detuning from the drive laser
    double kappa_0f = 0.0; ///< bus cavity decay
    int n_nodes = 2;
    double fsr = 0.0;      ///< bus free spectral range, 0 = unspecified

    double k_bus() const { return std::sqrt(static_cast<double>(n_nodes)) * h; }
    double delta_split() const { return std::hypot(g, k_bus()); }

    void validate() const {
        node.validate();
        if (node.kappa_f != 0.0)
            throw ConfigError("OnChipParams: nodes couple to the bus, not a fiber");
        if (!(g > 0.0) || h < 0.0 || kappa_0f < 0.0)
            throw ConfigError("OnChipParams: need g > 0 and nonnegative rates");
        if (n_nodes < 2 || n_nodes > kMaxQubits)
            throw ConfigError("OnChipParams: 2..4 nodes supported");
        const double rates = std::max({node.kappa_0, kappa_0f, node.gamma_m});
        if (rates > 0.2 * std::min(g, k_bus()))
            warn("OnChipParams: normal modes are not well resolved");
        if (fsr > 0.0 && fsr < 10.0 * (g + k_bus() + node.kappa_0 + kappa_0f))
            warn("OnChipParams: bus free spectral range close to the dynamics; the "
                 "single-mode treatment is marginal");
    }

    /// Identical nodes are a structural assumption; reject anything else.
    static OnChipParams from_nodes(const std::vector<OMNodeParams>& nodes,
                                   const std::vector<double>& couplings, double h,
                                   double delta_c0, double kappa_0f) {
        if (nodes.empty() || nodes.size() != couplings.size())
            throw ConfigError("OnChipParams: need one coupling per node");
        for (size_t k = 1; k < nodes.size(); ++k) {
            const auto& a = nodes[0];
            const auto& b = nodes[k];
            if (a.omega_r != b.omega_r || a.delta_c != b.delta_c || a.kappa_0 != b.kappa_0 ||
                a.gamma_m != b.gamma_m || a.n_m != b.n_m || a.zeta != b.zeta ||
                couplings[k] != couplings[0])
                throw ConfigError("OnChipParams: heterogeneous nodes are not supported by "
                                  "the block decomposition");
        }
        OnChipParams p;
        p.node = nodes[0];
        p.g = couplings[0];
        p.h = h;
        p.delta_c0 = delta_c0;
        p.kappa_0f = kappa_0f;
        p.n_nodes = static_cast<int>(nodes.size());
        p.validate();
        return p;
    }
};

/// Block drift and noise matrices of the normal-mode decomposition: the
/// center-of-mass set couples to the bus (6x6), all other sets are plain
/// transducer blocks with kappa -> kappa_0 (4x4).
struct OnChipBlocks {
    CMatrix m1;  ///< 6x6 drift of the bus-coupled set
    CMatrix m2;  ///< 4x4 drift of the remaining sets
    CMatrix r1;  ///< 6x6 noise correlations
    CMatrix r2;  ///< 4x4 noise correlations
};

inline OnChipBlocks block_matrices(const OnChipParams& p) {
    p.validate();
    const double wr = p.node.omega_r;
    const double dc = p.node.delta_c;
    const double dc0 = p.delta_c0;
    const double k0 = p.node.kappa_0;
    const double gm2 = 0.5 * p.node.gamma_m;
    const double z = p.node.zeta;
    const Complex g = p.g;
    const double kb = p.k_bus();

    OnChipBlocks out;
    CMatrix m(6, 6);
    m << Complex(wr), std::conj(g), 0.0, 0.0, z * g, 0.0,
         g, Complex(dc), kb, z * g, 0.0, 0.0,
         0.0, kb, Complex(dc0), 0.0, 0.0, 0.0,
         0.0, -z * std::conj(g), 0.0, Complex(-wr), -g, 0.0,
         -z * std::conj(g), 0.0, 0.0, -std::conj(g), Complex(-dc), -kb,
         0.0, 0.0, 0.0, 0.0, -kb, Complex(-dc0);
    CMatrix diss = CMatrix::Zero(6, 6);
    diss.diagonal() << gm2, k0, p.kappa_0f, gm2, k0, p.kappa_0f;
    out.m1 = kI * m + diss;

    OMNodeParams local = p.node;
    const LinearizedNode detached{local, p.g, local.delta_c};
    out.m2 = drift_matrix(detached);

    out.r1 = CMatrix::Zero(6, 6);
    out.r1.diagonal() << p.node.thermal_rate(), 0.0, 0.0,
        p.node.gamma_m * (p.node.n_m + 1.0), 2.0 * k0, 2.0 * p.kappa_0f;
    out.r2 = node_noise_matrix(p.node);
    out.r2(3, 3) = 2.0 * k0;
    return out;
}

struct NormalModeRecord {
    char symmetry = 's';       ///< 's' (bus-coupled set) or 'a'
    int index = 0;             ///< -1, 0, +1
    double omega = 0.0;
    double gamma = 0.0;
    double lambda_tilde = 0.0; ///< effective qubit coupling
    double n_th = 0.0;         ///< thermal occupation
    double n_nonrwa = 0.0;     ///< Stokes occupation
};

struct NormalModeComparison {
    NormalModeRecord closed;
    NormalModeRecord numeric;
    double freq_rel_dev = 0.0;
    double width_rel_dev = 0.0;
};

namespace detail {

// modes with positive frequency from a block drift matrix, ordered by
// ascending frequency, with rows of U^-1 giving their noise couplings
struct BlockModes {
    std::vector<Complex> poles;            // i omega + gamma
    std::vector<CVector> noise_rows;       // matching rows of U^-1
};

inline BlockModes positive_modes(const CMatrix& m) {
    const EigenDecomposition ed = eig(m);
    const CMatrix uinv = inverse(ed.vectors);
    BlockModes out;
    for (Eigen::Index k = 0; k < ed.eigenvalues.size(); ++k) {
        if (ed.eigenvalues(k).imag() <= 0.0) continue;
        out.poles.push_back(ed.eigenvalues(k));
        out.noise_rows.push_back(uinv.row(k).transpose());
    }
    return out;
}

}  // namespace detail

/// Table of the five on-chip normal modes: closed forms next to the
/// numerical eigen-data of the block matrices (the displayed frequencies,
/// widths, couplings and thermal occupations are RWA quantities, so the
/// numerical route uses the RWA blocks; Stokes occupations come from
/// nonrwa_occupations).
inline std::vector<NormalModeComparison> normal_mode_table(const OnChipParams& p,
                                                           double lambda) {
    p.validate();
    const double wr = p.node.omega_r;
    const double gm = p.node.gamma_m;
    const double k0 = p.node.kappa_0;
    const double k0f = p.kappa_0f;
    const double rate_th = p.node.thermal_rate();
    const double g = p.g, kb = p.k_bus();
    const double d = p.delta_split();
    const double d2 = d * d;
    const double gg = g / kb;

    std::vector<NormalModeComparison> table(5);
    auto& am = table[0].closed;  // (a,-)
    auto& ap = table[1].closed;  // (a,+)
    auto& sm = table[2].closed;  // (s,-)
    auto& s0 = table[3].closed;  // (s,0)
    auto& sp = table[4].closed;  // (s,+)

    const double gamma_a = 0.25 * gm + 0.5 * k0;
    am = {'a', -1, wr - g, gamma_a, lambda / std::sqrt(2.0), rate_th / (4.0 * gamma_a),
          g * g / (4.0 * std::pow(g - wr, 2))};
    ap = {'a', +1, wr + g, gamma_a, lambda / std::sqrt(2.0), rate_th / (4.0 * gamma_a),
          g * g / (4.0 * std::pow(g + wr, 2))};

    const double gamma_s0 = 0.5 * kb * kb * gm / d2 + g * g * k0f / d2;
    s0 = {'s', 0, wr, gamma_s0, kb / d * lambda,
          (kb * kb / d2) * rate_th / (2.0 * gamma_s0),
          k0 * kb * kb / (4.0 * k0f * wr * wr)};

    const double gamma_spm = 0.25 * g * g * gm / d2 + 0.5 * k0 + 0.5 * kb * kb * k0f / d2;
    const double n_th_spm = (0.5 * g * g / d2) * rate_th / (2.0 * gamma_spm);
    const double n_nonrwa_spm = std::pow(gg, 4) * k0 /
                                (4.0 * (k0f + k0 + gg * gg * k0)) * kb * kb / (wr * wr);
    sm = {'s', -1, wr - d, gamma_spm, g / (std::sqrt(2.0) * d) * lambda, n_th_spm,
          n_nonrwa_spm};
    sp = {'s', +1, wr + d, gamma_spm, g / (std::sqrt(2.0) * d) * lambda, n_th_spm,
          n_nonrwa_spm};

    // numerical eigen-data from the RWA blocks
    OnChipParams rwa = p;
    rwa.node.zeta = 0.0;
    const OnChipBlocks blocks = block_matrices(rwa);
    const auto modes_a = detail::positive_modes(blocks.m2);
    const auto modes_s = detail::positive_modes(blocks.m1);
    if (modes_a.poles.size() != 2 || modes_s.poles.size() != 3)
        throw NumericalError("normal_mode_table: unexpected mode count");

    // dissipation-free RWA couplings: weights of the mechanical operator in
    // the Hermitian single-particle blocks
    Eigen::MatrixXd ha(2, 2), hs(3, 3);
    ha << wr, g, g, p.node.delta_c;
    hs << wr, g, 0.0, g, p.node.delta_c, kb, 0.0, kb, p.delta_c0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esa(ha), ess(hs);

    auto fill_numeric = [&](NormalModeComparison& row, const detail::BlockModes& bm,
                            int mode_idx, double weight, double rate_th_in) {
        row.numeric.symmetry = row.closed.symmetry;
        row.numeric.index = row.closed.index;
        row.numeric.omega = bm.poles[mode_idx].imag();
        row.numeric.gamma = bm.poles[mode_idx].real();
        row.numeric.lambda_tilde = lambda * weight;
        row.numeric.n_th = std::norm(bm.noise_rows[mode_idx](0)) * rate_th_in /
                           (2.0 * row.numeric.gamma);
        row.freq_rel_dev = std::abs(row.numeric.omega - row.closed.omega) /
                           std::abs(row.closed.omega);
        row.width_rel_dev = std::abs(row.numeric.gamma - row.closed.gamma) /
                            std::abs(row.closed.gamma);
    };
    // eigenvalues sorted ascending in frequency on both routes
    fill_numeric(table[0], modes_a, 0, std::abs(esa.eigenvectors()(0, 0)), rate_th);
    fill_numeric(table[1], modes_a, 1, std::abs(esa.eigenvectors()(0, 1)), rate_th);
    fill_numeric(table[2], modes_s, 0, std::abs(ess.eigenvectors()(0, 0)), rate_th);
    fill_numeric(table[3], modes_s, 1, std::abs(ess.eigenvectors()(0, 1)), rate_th);
    fill_numeric(table[4], modes_s, 2, std::abs(ess.eigenvectors()(0, 2)), rate_th);
    return table;
}

/// First-order Stokes occupations of the five modes: counter-rotating
/// admixture of the eigenvectors feeds vacuum photon noise into each mode.
/// Rows ordered as in normal_mode_table.
inline std::vector<double> nonrwa_occupations(const OnChipParams& p) {
    OnChipParams full = p;
    full.node.zeta = 1.0;
    const OnChipBlocks blocks = block_matrices(full);
    std::vector<double> out;

    auto occupations = [&](const CMatrix& m, const std::vector<int>& photon_channels,
                           const std::vector<double>& strengths) {
        const auto modes = detail::positive_modes(m);
        std::vector<double> occ;
        for (size_t j = 0; j < modes.poles.size(); ++j) {
            double acc = 0.0;
            for (size_t c = 0; c < photon_channels.size(); ++c)
                acc += std::norm(modes.noise_rows[j](photon_channels[c])) * strengths[c];
            occ.push_back(acc / (2.0 * modes.poles[j].real()));
        }
        return occ;
    };
    // daggered photonic noise positions: c^dag (and d0^dag for the bus set)
    const auto occ_a = occupations(blocks.m2, {3}, {2.0 * p.node.kappa_0});
    const auto occ_s = occupations(blocks.m1, {4, 5},
                                   {2.0 * p.node.kappa_0, 2.0 * p.kappa_0f});
    out.push_back(occ_a[0]);
    out.push_back(occ_a[1]);
    out.push_back(occ_s[0]);
    out.push_back(occ_s[1]);
    out.push_back(occ_s[2]);
    return out;
}

struct ModeContribution {
    char symmetry;
    int index;
    double detuning;    ///< omega_q - omega_mode
    double j_part;      ///< contribution to the exchange coupling
    double gamma_part;  ///< induced decay through this mode
    double n_occ;       ///< effective occupation (thermal + Stokes)
};

struct GateCoefficients {
    double J = 0.0;      ///< exchange coupling (J_N for N nodes)
    double Delta = 0.0;  ///< common qubit shift
    double DeltaPrime = 0.0;  ///< Delta + J (two-node convention)
    double gamma_s = 0.0, gamma_a = 0.0;  ///< per-symmetry decays (two-node)
    double n_s = 0.0, n_a = 0.0;          ///< per-symmetry occupations
    double gamma_coll = 0.0, gamma_loc = 0.0;  ///< N-node decomposition
    double n_coll = 0.0, n_loc = 0.0;
    std::vector<ModeContribution> modes;  ///< independent-mode breakdown
};

/// Independent-mode (Lorentzian) gate coefficients from the closed-form mode
/// table; symmetric and antisymmetric contributions to J carry opposite
/// signs. Refuses operating points within 3 lambda_tilde of any mode.
inline GateCoefficients gate_coefficients_lorentzian(const OnChipParams& p,
                                                     const QubitParams& q) {
    const auto table = normal_mode_table(p, q.lambda);
    const auto stokes = nonrwa_occupations(p);
    GateCoefficients out;
    for (size_t k = 0; k < table.size(); ++k) {
        const NormalModeRecord& mode = table[k].closed;
        const double det = q.omega_q - mode.omega;
        if (std::abs(det) < 3.0 * mode.lambda_tilde)
            throw RegimeError("gate_coefficients_lorentzian: operating point too close to "
                              "a normal mode");
        const double l2 = mode.lambda_tilde * mode.lambda_tilde;
        const double denom = mode.gamma * mode.gamma + det * det;
        const double sign = (mode.symmetry == 'a') ? -1.0 : 1.0;
        ModeContribution mc;
        mc.symmetry = mode.symmetry;
        mc.index = mode.index;
        mc.detuning = det;
        mc.j_part = 0.125 * l2 * det * sign / denom;
        mc.gamma_part = 0.5 * l2 * mode.gamma / denom;
        mc.n_occ = mode.n_th + (p.node.zeta != 0.0 ? stokes[k] : 0.0);
        out.modes.push_back(mc);
        out.J += mc.j_part;
        if (mode.symmetry == 's') {
            out.gamma_s += mc.gamma_part;
            out.n_s += mc.gamma_part * mc.n_occ;
        } else {
            out.gamma_a += mc.gamma_part;
            out.n_a += mc.gamma_part * mc.n_occ;
        }
    }
    if (out.gamma_s > 0.0) out.n_s /= out.gamma_s;
    if (out.gamma_a > 0.0) out.n_a /= out.gamma_a;
    out.DeltaPrime = out.Delta + out.J;
    return out;
}

/// Full-elimination gate coefficients from the block response matrices.
inline GateCoefficients gate_coefficients_full(const OnChipParams& p,
                                               const QubitParams& q) {
    p.validate();
    const OnChipBlocks blocks = block_matrices(p);
    for (const CMatrix* m : {&blocks.m1, &blocks.m2}) {
        const EigenDecomposition ed = eig(*m);
        const double scale = ed.eigenvalues.cwiseAbs().maxCoeff();
        for (Eigen::Index k = 0; k < ed.eigenvalues.size(); ++k)
            if (ed.eigenvalues(k).real() < -1e-12 * scale)
                throw RegimeError("gate_coefficients_full: unstable block");
    }
    const CMatrix a1 = response_matrix(blocks.m1, q.omega_q);
    const CMatrix a2 = response_matrix(blocks.m2, q.omega_q);
    const Complex x1 = a1(0, 0);
    const Complex x2 = a2(0, 0);
    const Complex y1 = (a1.conjugate() * blocks.r1 * a1.transpose())(0, 0);
    const Complex y2 = (a2.conjugate() * blocks.r2 * a2.transpose())(0, 0);

    const double l2 = q.lambda * q.lambda;
    const double n = p.n_nodes;
    GateCoefficients out;
    out.J = 0.25 * l2 / n * (x1 - x2).imag();
    out.Delta = 0.25 * l2 * x2.imag();
    out.DeltaPrime = out.Delta + out.J;
    out.gamma_coll = 0.5 * l2 / n * (x1 - x2).real();
    out.gamma_loc = 0.5 * l2 * x2.real();
    const double gcnc = 0.25 * l2 / n * (y1 - y2).real();
    const double glnl = 0.25 * l2 * y2.real();
    out.n_coll = out.gamma_coll != 0.0 ? gcnc / out.gamma_coll : 0.0;
    out.n_loc = out.gamma_loc != 0.0 ? glnl / out.gamma_loc : 0.0;
    // two-node specialization: symmetric set = bus-coupled, antisymmetric = rest
    out.gamma_s = 0.5 * l2 * x1.real();
    out.gamma_a = 0.5 * l2 * x2.real();
    out.n_s = out.gamma_s > 0.0 ? 0.25 * l2 * y1.real() / out.gamma_s : 0.0;
    out.n_a = out.gamma_a > 0.0 ? 0.25 * l2 * y2.real() / out.gamma_a : 0.0;
    return out;
}

/// First-order-in-Lindblad fidelity for the sqrt(SWAP) Bell-state
/// preparation, per-symmetry form.
inline double first_order_fidelity_symmetry(const GateCoefficients& c, double t2) {
    if (c.J == 0.0) throw RegimeError("first_order_fidelity: vanishing exchange coupling");
    const double absj = std::abs(c.J);
    double f = 1.0 - kPi / 8.0 *
                         (c.gamma_s * (1.0 + 2.0 * c.n_s) + c.gamma_a * (1.0 + 2.0 * c.n_a)) /
                         absj;
    if (!std::isinf(t2)) f -= kPi / (8.0 * absj * t2);
    return f;
}

/// Same, summed over the independent-mode contributions (Lorentzian route).
inline double first_order_fidelity_modes(const GateCoefficients& c, double t2) {
    if (c.J == 0.0) throw RegimeError("first_order_fidelity: vanishing exchange coupling");
    const double absj = std::abs(c.J);
    double f = 1.0;
    for (const auto& m : c.modes)
        f -= kPi / 8.0 * m.gamma_part * (1.0 + 2.0 * m.n_occ) / absj;
    if (!std::isinf(t2)) f -= kPi / (8.0 * absj * t2);
    return f;
}

enum class SwapMethod { first_order, full_me };

/// Two-node Lindblad generator from the per-symmetry channels.
inline CMatrix onchip_liouvillian(const GateCoefficients& c, double t2) {
    LindbladSpec spec;
    spec.n_qubits = 2;
    spec.h = c.J * (pauli::on(pauli::sp(), 1, 2) * pauli::on(pauli::sm(), 2, 2) +
                    pauli::on(pauli::sp(), 2, 2) * pauli::on(pauli::sm(), 1, 2));
    spec.eps = RVector::Constant(2, c.DeltaPrime);
    spec.a_down = CMatrix::Zero(2, 2);
    spec.a_up = CMatrix::Zero(2, 2);
    Eigen::Vector2cd cs, ca;
    cs << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    ca << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    spec.a_down += c.gamma_s * (c.n_s + 1.0) * (cs * cs.adjoint());
    spec.a_down += c.gamma_a * (c.n_a + 1.0) * (ca * ca.adjoint());
    spec.a_up += c.gamma_s * c.n_s * (cs * cs.adjoint());
    spec.a_up += c.gamma_a * c.n_a * (ca * ca.adjoint());
    spec.deph = RVector::Constant(2, std::isinf(t2) ? 0.0 : 1.0 / t2);
    return assemble_liouvillian(spec);
}

/// sqrt(SWAP) Bell-state fidelity at a given operating point, either to
/// first order in the Lindblad terms or by integrating the two-node master
/// equation for t_g = pi/4|J| from |01>.
inline double sqrt_swap_fidelity(const OnChipParams& p, const QubitParams& q, double t2,
                                 SwapMethod method) {
    const GateCoefficients c = gate_coefficients_full(p, q);
    if (c.J == 0.0) throw RegimeError("sqrt_swap_fidelity: vanishing exchange coupling");
    if (method == SwapMethod::first_order) return first_order_fidelity_symmetry(c, t2);
    const double tg = kPi / (4.0 * std::abs(c.J));
    const CMatrix lv = onchip_liouvillian(c, t2);
    const CMatrix prop = (tg * lv).exp();
    CMatrix mu0 = CMatrix::Zero(4, 4);
    mu0(1, 1) = 1.0;
    CVector v(16);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) v(4 * j + i) = mu0(i, j);
    v = prop * v;
    CMatrix mu(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) mu(i, j) = v(4 * j + i);
    return bell_fidelity(mu, c.J > 0.0 ? 1 : -1);
}

enum class OperatingRegime { decay_dominated, dephasing_dominated };

struct OperatingPoint {
    double omega_q = 0.0;
    double fidelity = 0.0;
};

/// Optimal qubit frequency for the entangling gate. Decay-dominated: scan
/// between the central modes (s,0) and (a,+). Dephasing-dominated: detune
/// from the best mode by [lambda_t^2 gamma (1+2N) T2/2]^(1/2).
inline OperatingPoint optimal_operating_point(const OnChipParams& p, const QubitParams& q,
                                              double t2, OperatingRegime regime) {
    const auto table = normal_mode_table(p, q.lambda);
    if (regime == OperatingRegime::decay_dominated) {
        const double lo = table[3].closed.omega;  // (s,0)
        const double hi = table[1].closed.omega;  // (a,+)
        OperatingPoint best;
        best.fidelity = -1e300;
        const int npts = 400;
        for (int k = 1; k < npts; ++k) {
            QubitParams qq = q;
            qq.omega_q = lo + (hi - lo) * k / npts;
            bool excluded = false;
            for (const auto& row : table)
                if (std::abs(qq.omega_q - row.closed.omega) < 3.0 * row.closed.lambda_tilde)
                    excluded = true;
            if (excluded) continue;
            try {
                const double f = sqrt_swap_fidelity(p, qq, t2, SwapMethod::first_order);
                if (f > best.fidelity) best = {qq.omega_q, f};
            } catch (const RegimeError&) {
            }
        }
        if (best.fidelity == -1e300)
            throw RegimeError("optimal_operating_point: no admissible point in the scan");
        return best;
    }

    if (std::isinf(t2))
        throw ConfigError("optimal_operating_point: dephasing-dominated regime needs T2");
    const auto stokes = nonrwa_occupations(p);
    OperatingPoint best;
    best.fidelity = -1e300;
    double best_guard_ratio = 0.0;
    for (size_t k = 0; k < table.size(); ++k) {
        const auto& mode = table[k].closed;
        const double n_occ = mode.n_th + (p.node.zeta != 0.0 ? stokes[k] : 0.0);
        const double l2 = mode.lambda_tilde * mode.lambda_tilde;
        const double det_opt =
            std::sqrt(l2 * mode.gamma * (1.0 + 2.0 * n_occ) * t2 / 2.0);
        const double f = 1.0 - kPi * std::sqrt(2.0 * mode.gamma * (1.0 + 2.0 * n_occ) /
                                               (l2 * t2));
        if (f > best.fidelity) {
            // detune away from the packed center of the spectrum
            const double side = mode.omega >= p.node.omega_r ? 1.0 : -1.0;
            best = {mode.omega + side * det_opt, f};
            best_guard_ratio = det_opt / (3.0 * mode.lambda_tilde);
        }
    }
    if (best_guard_ratio < 1.0)
        throw RegimeError("optimal_operating_point: optimal detuning violates the "
                          "elimination guard |detuning| >> lambda");
    return best;
}

}  // namespace omtnet
