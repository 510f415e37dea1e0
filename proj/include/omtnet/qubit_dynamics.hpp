#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "omtnet/cascade.hpp"

namespace omtnet {

inline constexpr int kMaxQubits = 4;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

namespace pauli {

inline CMatrix id2() { return CMatrix::Identity(2, 2); }

inline CMatrix sm() {  // sigma^- : |1> -> |0>
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

inline CMatrix sp() { return sm().adjoint(); }

inline CMatrix sz() {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return s;
}

/// Single-qubit operator embedded on qubit i (1-based) of an N-qubit register,
/// qubit 1 being the leftmost tensor factor.
inline CMatrix on(const CMatrix& op, int i, int n) {
    CMatrix out = (i == 1) ? op : id2();
    for (int k = 2; k <= n; ++k) out = kron(out, (k == i) ? op : id2());
    return out;
}

}  // namespace pauli

/// N-qubit density matrix with its defining invariants.
struct DensityMatrix {
    int n_qubits = 1;
    CMatrix rho;

    static DensityMatrix pure(int n_qubits, const CVector& psi) {
        DensityMatrix d;
        d.n_qubits = n_qubits;
        d.rho = psi * psi.adjoint() / psi.squaredNorm();
        return d;
    }

    void validate() const {
        if (n_qubits < 1 || n_qubits > kMaxQubits)
            throw ConfigError("DensityMatrix: supports 1..4 qubits");
        const auto dim = Eigen::Index(1) << n_qubits;
        if (rho.rows() != dim || rho.cols() != dim)
            throw ConfigError("DensityMatrix: dimension mismatch");
        if ((rho - rho.adjoint()).norm() > 1e-10)
            throw NumericalError("DensityMatrix: not Hermitian");
        if (std::abs(rho.trace() - Complex(1.0)) > 1e-10)
            throw NumericalError("DensityMatrix: trace != 1");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
        if (es.eigenvalues().minCoeff() < -1e-8)
            throw NumericalError("DensityMatrix: negative eigenvalue");
    }
};

/// Generic qubit Lindblad generator: exchange Hamiltonian plus sigma_z
/// shifts, Hermitian Kossakowski matrices over the lowering and raising
/// channels, and per-qubit pure dephasing.
struct LindbladSpec {
    int n_qubits = 1;
    CMatrix h;        ///< Hermitian 2^N x 2^N Hamiltonian (without sigma_z shifts)
    RVector eps;      ///< sigma_z coefficients: H += sum_i eps_i sigma_z^i / 2
    CMatrix a_down;   ///< coefficients of sigma_b^- rho sigma_a^+ (Hermitian)
    CMatrix a_up;     ///< coefficients of sigma_b^+ rho sigma_a^- (Hermitian)
    RVector deph;     ///< pure dephasing rates 1/T2 per qubit
};

/// Vectorized Liouvillian (column-major vec convention), 4^N x 4^N.
inline CMatrix assemble_liouvillian(const LindbladSpec& spec) {
    const int n = spec.n_qubits;
    if (n < 1 || n > kMaxQubits) throw ConfigError("assemble_liouvillian: 1..4 qubits");
    const Eigen::Index dim = Eigen::Index(1) << n;
    const CMatrix id = CMatrix::Identity(dim, dim);

    CMatrix h = spec.h.size() ? spec.h : CMatrix::Zero(dim, dim);
    for (int i = 1; i <= n; ++i)
        if (spec.eps.size()) h += 0.5 * spec.eps(i - 1) * pauli::on(pauli::sz(), i, n);

    CMatrix lv = -kI * (kron(id, h) - kron(h.transpose(), id));

    std::vector<CMatrix> sm(n), sp(n);
    for (int i = 1; i <= n; ++i) {
        sm[i - 1] = pauli::on(pauli::sm(), i, n);
        sp[i - 1] = pauli::on(pauli::sp(), i, n);
    }

    auto add_channel = [&](const CMatrix& weights, const std::vector<CMatrix>& jump,
                           const std::vector<CMatrix>& jump_dag) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const Complex w = weights(a, b);
                if (w == Complex(0.0)) continue;
                const CMatrix ab = jump_dag[a] * jump[b];
                lv += w * kron(jump_dag[a].transpose(), jump[b]);
                lv -= 0.5 * w * (kron(id, ab) + kron(ab.transpose(), id));
            }
        }
    };
    if (spec.a_down.size()) add_channel(spec.a_down, sm, sp);
    if (spec.a_up.size()) add_channel(spec.a_up, sp, sm);

    if (spec.deph.size()) {
        for (int i = 1; i <= n; ++i) {
            const double rate = spec.deph(i - 1);
            if (rate == 0.0) continue;
            const CMatrix z = pauli::on(pauli::sz(), i, n);
            lv += 0.25 * rate * (2.0 * kron(z.transpose(), z) - 2.0 * kron(id, id));
        }
    }
    return lv;
}

/// Adapter from the cascaded master-equation coefficients. `eps` overrides
/// the sigma_z coefficients (defaults to the total shifts Delta_i); T2s may
/// be empty for no dephasing.
inline LindbladSpec lindblad_spec_from_cascade(const CascadedMECoefficients& c,
                                               const std::vector<double>& t2s = {},
                                               const RVector* eps_override = nullptr) {
    const int n = c.size();
    LindbladSpec spec;
    spec.n_qubits = n;
    const Eigen::Index dim = Eigen::Index(1) << n;
    spec.h = CMatrix::Zero(dim, dim);
    spec.eps = eps_override ? *eps_override : RVector(c.Delta());
    spec.a_down = CMatrix::Zero(n, n);
    spec.a_up = CMatrix::Zero(n, n);
    spec.deph = RVector::Zero(n);
    if (!t2s.empty()) {
        if (static_cast<int>(t2s.size()) != n)
            throw ConfigError("lindblad_spec_from_cascade: T2 list size mismatch");
        for (int i = 0; i < n; ++i)
            spec.deph(i) = std::isinf(t2s[i]) ? 0.0 : 1.0 / t2s[i];
    }
    for (int i = 0; i < n; ++i) {
        spec.a_down(i, i) = c.Gamma(i) * (c.Nocc(i) + 1.0);
        spec.a_up(i, i) = c.Gamma(i) * c.Nocc(i);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const Complex jij = c.J(i, j);
            spec.a_down(i, j) += jij;
            spec.a_down(j, i) += std::conj(jij);
            spec.h += -0.5 * kI * jij * pauli::on(pauli::sp(), i + 1, n) *
                          pauli::on(pauli::sm(), j + 1, n) +
                      0.5 * kI * std::conj(jij) * pauli::on(pauli::sp(), j + 1, n) *
                          pauli::on(pauli::sm(), i + 1, n);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const Complex dij = c.D(i, j);
            spec.a_up(i, j) += dij;
            spec.a_down(j, i) += dij;
        }
    }
    return spec;
}

inline CMatrix build_generator(const CascadedMECoefficients& c,
                               const std::vector<double>& t2s = {}) {
    return assemble_liouvillian(lindblad_spec_from_cascade(c, t2s));
}

/// Liouvillians sampled on a uniform time grid; linear interpolation between
/// samples is exact in the coefficients since the generator is linear in
/// every rate.
struct GeneratorSchedule {
    std::vector<double> t;
    std::vector<CMatrix> liouvillians;
    double max_rate = 0.0;  ///< fastest coefficient rate, for the grid guard

    void validate() const {
        if (t.size() < 2 || t.size() != liouvillians.size())
            throw ConfigError("GeneratorSchedule: need matching grids");
        const double dt = t[1] - t[0];
        if (max_rate > 0.0 && dt > 1.0 / (50.0 * max_rate))
            throw NumericalError(
                "GeneratorSchedule: grid too coarse for the fastest rate (need dt <= "
                "1/(50 max_rate))");
    }
};

/// RK4 evolution of the vectorized density matrix along a schedule, one step
/// per grid interval, re-Hermitizing each step. The recorder sees every
/// post-step state.
inline CMatrix evolve(
    const CMatrix& mu0, const GeneratorSchedule& schedule,
    const std::function<void(size_t, double, const CMatrix&)>& record = nullptr) {
    schedule.validate();
    const Eigen::Index dim = mu0.rows();
    CVector v(dim * dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) v(j * dim + i) = mu0(i, j);

    auto unvec = [&](const CVector& x) {
        CMatrix m(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = x(j * dim + i);
        return m;
    };

    CMatrix mu = mu0;
    if (record) record(0, schedule.t.front(), mu);
    double max_trace_drift = 0.0;
    for (size_t k = 0; k + 1 < schedule.t.size(); ++k) {
        const double dt = schedule.t[k + 1] - schedule.t[k];
        const CMatrix& l0 = schedule.liouvillians[k];
        const CMatrix& l1 = schedule.liouvillians[k + 1];
        const CMatrix lm = 0.5 * (l0 + l1);
        const CVector k1 = l0 * v;
        const CVector k2 = lm * (v + 0.5 * dt * k1);
        const CVector k3 = lm * (v + 0.5 * dt * k2);
        const CVector k4 = l1 * (v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        mu = unvec(v);
        mu = 0.5 * (mu + mu.adjoint().eval());
        max_trace_drift = std::max(max_trace_drift, std::abs(mu.trace().real() - 1.0));
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = 0; i < dim; ++i) v(j * dim + i) = mu(i, j);
        if (record) record(k + 1, schedule.t[k + 1], mu);
    }
    if (max_trace_drift > 1e-8)
        throw NumericalError("evolve: trace drift exceeded 1e-8");
    return mu;
}

/// Trace over the first qubit of a two-qubit state.
inline CMatrix partial_trace_first(const CMatrix& mu) {
    CMatrix out = CMatrix::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) out(a, b) += mu(2 * c + a, 2 * c + b);
    return out;
}

/// The six cardinal Bloch states as (alpha, beta) amplitude pairs.
inline std::vector<std::pair<Complex, Complex>> cardinal_states() {
    const double s = 1.0 / std::sqrt(2.0);
    return {{1.0, 0.0}, {0.0, 1.0}, {s, s}, {s, -s}, {s, s * kI}, {s, -s * kI}};
}

/// Average state-transfer fidelity over the six cardinal states. `channel`
/// maps the initial two-qubit density matrix (state on qubit 1, qubit 2 in
/// the ground state) to the final one; the target on qubit 2 carries the
/// accumulated phases.
inline double average_transfer_fidelity(
    const std::function<CMatrix(const CMatrix&)>& channel, double phi_plus_tf,
    double phi_minus_tf, double phi_tf) {
    double acc = 0.0;
    const auto states = cardinal_states();
    for (const auto& [alpha, beta] : states) {
        CVector psi0 = CVector::Zero(4);
        psi0(0) = alpha;  // |00>
        psi0(2) = beta;   // |10>: excitation on qubit 1
        const CMatrix mu0 = psi0 * psi0.adjoint();
        const CMatrix mu_f = channel(mu0);
        CVector target = CVector::Zero(2);
        target(0) = alpha * std::exp(kI * phi_plus_tf);
        target(1) = -beta * std::exp(kI * (phi_minus_tf + phi_tf));
        const CMatrix reduced = partial_trace_first(mu_f);
        acc += (target.adjoint() * reduced * target)(0, 0).real();
    }
    return acc / static_cast<double>(states.size());
}

/// Overlap with the maximally entangled state (|01> - i sign |10>)/sqrt(2).
inline double bell_fidelity(const CMatrix& mu, int sign = 1) {
    CVector psi = CVector::Zero(4);
    psi(1) = 1.0 / std::sqrt(2.0);                    // |01>
    psi(2) = -kI * static_cast<double>(sign) / std::sqrt(2.0);  // |10>
    return (psi.adjoint() * mu * psi)(0, 0).real();
}

}  // namespace omtnet
