#pragma once

#include <cmath>
#include <vector>

#include <Eigen/SparseCore>

#include "omtnet/interface.hpp"
#include "omtnet/qubit_dynamics.hpp"

namespace omtnet {

using SparseC = Eigen::SparseMatrix<Complex>;

/// Brute-force configuration: one transducer with its qubit, each bosonic
/// mode truncated at n_trunc Fock levels.
struct FullSystemConfig {
    LinearizedNode node;
    QubitParams qubit;
    int n_trunc = 5;

    int dim() const { return 2 * n_trunc * n_trunc; }

    void validate() const {
        node.base.validate();
        qubit.validate();
        if (n_trunc < 2 || dim() > 200)
            throw ConfigError("FullSystemConfig: need 2 <= n_trunc with 2 n^2 <= 200");
    }
};

namespace detail {

// dense single-mode ladder operator, then embedded as qubit x b x c
inline CMatrix ladder(int n) {
    CMatrix b = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
    return b;
}

inline CMatrix embed(const CMatrix& q, const CMatrix& b, const CMatrix& c) {
    return kron(q, kron(b, c));
}

inline SparseC sparse_of(const CMatrix& m) {
    SparseC s = m.sparseView(1.0, 1e-15);
    s.makeCompressed();
    return s;
}

}  // namespace detail

/// Sparse operator set of the linearized node + qubit in the frame rotating
/// at the qubit frequency. The counter-rotating part of the coupling keeps
/// an explicit e^{+-2 i omega_q t} time dependence.
struct OracleOperators {
    int dim = 0;
    double omega_q = 0.0;
    bool time_dependent = false;
    SparseC h0;         ///< static Hamiltonian part
    SparseC h_cr;       ///< counter-rotating part (pairs with its adjoint)
    SparseC h_cr_dag;
    std::vector<SparseC> jumps;
    std::vector<SparseC> jump_dags;
    SparseC k_half;     ///< (1/2) sum L^dag L
    CMatrix p_excited;  ///< qubit excited-state projector
    CMatrix p_topfock;  ///< projector on the top Fock level of either mode
};

inline OracleOperators oracle_operators(const FullSystemConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_trunc;
    const CMatrix id_n = CMatrix::Identity(n, n);
    const CMatrix id_q = CMatrix::Identity(2, 2);
    const CMatrix lad = detail::ladder(n);

    const CMatrix b = detail::embed(id_q, lad, id_n);
    const CMatrix c = detail::embed(id_q, id_n, lad);
    const CMatrix sm = detail::embed(pauli::sm(), id_n, id_n);

    const auto& p = cfg.node.base;
    const double wq = cfg.qubit.omega_q;
    const Complex g = cfg.node.G;

    CMatrix h0 = (p.omega_r - wq) * (b.adjoint() * b) +
                 (cfg.node.delta_c_eff - wq) * (c.adjoint() * c) +
                 0.5 * cfg.qubit.lambda * (sm * b.adjoint() + sm.adjoint() * b);
    h0 += g * (c.adjoint() * b);
    h0 += std::conj(g) * (c * b.adjoint());

    OracleOperators ops;
    ops.dim = cfg.dim();
    ops.omega_q = wq;
    ops.h0 = detail::sparse_of(h0);
    if (p.zeta != 0.0) {
        ops.time_dependent = true;
        const CMatrix a = p.zeta * g * (c.adjoint() * b.adjoint());
        ops.h_cr = detail::sparse_of(a);
        ops.h_cr_dag = detail::sparse_of(a.adjoint());
    }

    auto add_jump = [&](const CMatrix& l) {
        ops.jumps.push_back(detail::sparse_of(l));
        ops.jump_dags.push_back(detail::sparse_of(l.adjoint()));
    };
    add_jump(std::sqrt(2.0 * p.kappa()) * c);
    if (p.gamma_m > 0.0) {
        add_jump(std::sqrt(p.gamma_m * (p.n_m + 1.0)) * b);
        if (p.n_m > 0.0) add_jump(std::sqrt(p.gamma_m * p.n_m) * b.adjoint());
    }
    CMatrix k_half = CMatrix::Zero(ops.dim, ops.dim);
    for (size_t j = 0; j < ops.jumps.size(); ++j)
        k_half += 0.5 * CMatrix(ops.jump_dags[j]) * CMatrix(ops.jumps[j]);
    ops.k_half = detail::sparse_of(k_half);

    CMatrix pe = CMatrix::Zero(2, 2);
    pe(1, 1) = 1.0;
    ops.p_excited = detail::embed(pe, id_n, id_n);

    CMatrix top = CMatrix::Zero(n, n);
    top(n - 1, n - 1) = 1.0;
    ops.p_topfock = detail::embed(id_q, top, id_n) + detail::embed(id_q, id_n, top) -
                    detail::embed(id_q, top, top);
    return ops;
}

struct OracleRun {
    std::vector<double> t;
    std::vector<double> p_excited;
    double top_fock_max = 0.0;
};

/// RK4 integration of the full master equation from a product state (qubit
/// excited or ground, both modes in vacuum). The top-Fock monitor guards the
/// truncation; more than 1e-3 of population there invalidates the run.
inline OracleRun full_me_simulate(const FullSystemConfig& cfg, double t_end, int steps,
                                  bool start_excited = true, int record_stride = 16) {
    const OracleOperators ops = oracle_operators(cfg);
    const int d = ops.dim;
    CMatrix mu = CMatrix::Zero(d, d);
    const int vac = start_excited ? cfg.n_trunc * cfg.n_trunc : 0;
    mu(vac, vac) = 1.0;

    auto rhs = [&](double time, const CMatrix& m) {
        CMatrix hm = ops.h0 * m;
        if (ops.time_dependent) {
            const Complex phase = std::exp(2.0 * kI * ops.omega_q * time);
            hm += phase * (ops.h_cr * m) + std::conj(phase) * (ops.h_cr_dag * m);
        }
        CMatrix out = -kI * (hm - hm.adjoint());
        const CMatrix km = ops.k_half * m;
        out -= km + km.adjoint();
        for (size_t j = 0; j < ops.jumps.size(); ++j) {
            const CMatrix lm = ops.jumps[j] * m;
            out += lm * ops.jump_dags[j];
        }
        return out;
    };

    OracleRun run;
    const double dt = t_end / steps;
    for (int k = 0; k <= steps; ++k) {
        const double time = k * dt;
        if (k % record_stride == 0 || k == steps) {
            run.t.push_back(time);
            run.p_excited.push_back((ops.p_excited * mu).trace().real());
            run.top_fock_max =
                std::max(run.top_fock_max, (ops.p_topfock * mu).trace().real());
        }
        if (k == steps) break;
        const CMatrix k1 = rhs(time, mu);
        const CMatrix k2 = rhs(time + 0.5 * dt, CMatrix(mu + 0.5 * dt * k1));
        const CMatrix k3 = rhs(time + 0.5 * dt, CMatrix(mu + 0.5 * dt * k2));
        const CMatrix k4 = rhs(time + dt, CMatrix(mu + dt * k3));
        mu += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        mu = 0.5 * (mu + mu.adjoint().eval());
    }
    if (run.top_fock_max > 1e-3)
        throw NumericalError("full_me_simulate: truncation leak, raise n_trunc");
    return run;
}

/// Log-linear least-squares decay rate of (p(t) - offset) over a window.
inline double exponential_fit_rate(const OracleRun& run, double t_lo, double t_hi,
                                   double offset) {
    std::vector<double> xs, ys;
    for (size_t k = 0; k < run.t.size(); ++k) {
        if (run.t[k] < t_lo || run.t[k] > t_hi) continue;
        const double y = run.p_excited[k] - offset;
        if (y <= 0.0) continue;
        xs.push_back(run.t[k]);
        ys.push_back(std::log(y));
    }
    if (xs.size() < 4) throw NumericalError("exponential_fit_rate: window too sparse");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct OracleComparison {
    double gamma_eff = 0.0;    ///< adiabatic-elimination decay rate
    double gamma_relax = 0.0;  ///< predicted relaxation rate Gamma (1 + 2 N0)
    double gamma_fit = 0.0;    ///< rate fitted to the brute-force decay
    double gamma_rel_err = 0.0;
    double n0 = 0.0;              ///< predicted effective occupation
    double p_steady_pred = 0.0;   ///< N0/(2 N0 + 1)
    double p_steady_sim = 0.0;    ///< heating-run estimate
    double top_fock_max = 0.0;
};

/// Full simulation against the effective single-node theory: decay rate from
/// an excited-qubit run, steady heating from a ground-state run.
inline OracleComparison compare_effective(const FullSystemConfig& cfg,
                                          double fit_end_over_gamma = 3.0,
                                          double dt = 0.5, double max_ratio = 0.1) {
    cfg.validate();
    const auto eff = effective_coefficients(cfg.node, cfg.qubit);
    if (eff.adiabaticity > max_ratio * (1.0 + 1e-9))
        throw RegimeError("compare_effective: outside the validity regime "
                          "lambda/gamma_op <= " + std::to_string(max_ratio));

    OracleComparison out;
    out.gamma_eff = eff.Gamma;
    out.n0 = eff.N0;
    out.gamma_relax = eff.Gamma * (1.0 + 2.0 * eff.N0);
    out.p_steady_pred = eff.N0 / (2.0 * eff.N0 + 1.0);

    const double t_end = fit_end_over_gamma / eff.Gamma;
    const int steps = static_cast<int>(std::ceil(t_end / dt));
    auto decay = full_me_simulate(cfg, t_end, steps, true);
    out.gamma_fit = exponential_fit_rate(decay, 0.1 / eff.Gamma, t_end, out.p_steady_pred);
    out.gamma_rel_err = std::abs(out.gamma_fit - out.gamma_relax) / out.gamma_relax;
    out.top_fock_max = decay.top_fock_max;

    if (cfg.node.base.thermal_rate() > 0.0) {
        auto heat = full_me_simulate(cfg, t_end, steps, false);
        out.p_steady_sim =
            heat.p_excited.back() / (1.0 - std::exp(-out.gamma_relax * t_end));
        out.top_fock_max = std::max(out.top_fock_max, heat.top_fock_max);
    }
    return out;
}

}  // namespace omtnet
