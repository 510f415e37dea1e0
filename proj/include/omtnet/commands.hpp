#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "omtnet/config.hpp"
#include "omtnet/csv.hpp"
#include "omtnet/onchip.hpp"
#include "omtnet/oracle.hpp"
#include "omtnet/protocols.hpp"
#include "omtnet/sweep.hpp"

namespace omtnet {

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "units.frequency_reference",
        "node.omega_r", "node.kappa", "node.kappa_0", "node.thermal_rate", "node.n_m",
        "node.gamma_m", "node.zeta",
        "qubit.lambda", "qubit.T2", "qubit.omega_q_offset",
        "protocol.family", "protocol.mode", "protocol.tp_factor", "protocol.g_ref_factor",
        "protocol.samples", "protocol.attribution",
        "fig2.g_points", "fig2.wq_points", "fig2.dc_points",
        "onchip.g", "onchip.k", "onchip.kappa_0", "onchip.kappa_0f", "onchip.thermal_rate",
        "onchip.n_m", "onchip.zeta", "onchip.n_nodes", "onchip.scan_points",
        "oracle.n_trunc", "oracle.fit_end_over_gamma", "oracle.dt",
    };
    return keys;
}

inline TransferConfig transfer_config_from(const ExperimentConfig& cfg) {
    cfg.validate_schema(known_config_keys());
    TransferConfig t;
    t.omega_r = cfg.frequency_or("node.omega_r", 1.0);
    t.kappa = cfg.frequency("node.kappa");
    t.kappa_0 = cfg.frequency_or("node.kappa_0", 0.0);
    t.thermal_rate = cfg.frequency_or("node.thermal_rate", 0.0);
    t.n_m = cfg.number_or("node.n_m", 1e6);
    t.zeta = cfg.number_or("node.zeta", 0.0);
    t.lambda = cfg.frequency("qubit.lambda");
    t.T2 = cfg.time_or("qubit.T2", std::numeric_limits<double>::infinity());
    const std::string family = cfg.str_or("protocol.family", "gauss");
    if (family == "gauss") {
        t.family = PulseFamily::gauss;
    } else if (family == "exp_symmetric") {
        t.family = PulseFamily::exp_symmetric;
    } else {
        throw ConfigError("config: protocol.family must be gauss or exp_symmetric");
    }
    const std::string mode = cfg.str_or("protocol.mode", "vary_G");
    if (mode == "vary_G") {
        t.mode = ControlMode::vary_G;
    } else if (mode == "vary_Dc") {
        t.mode = ControlMode::vary_Dc;
    } else {
        throw ConfigError("config: protocol.mode must be vary_G or vary_Dc");
    }
    t.tp_factor = cfg.number_or("protocol.tp_factor",
                                t.family == PulseFamily::gauss ? 12.0 : 8.0);
    t.g_ref_factor = cfg.number_or("protocol.g_ref_factor", 1.5);
    t.samples = cfg.integer_or("protocol.samples", 2001);
    if (t.kappa <= 0.0 || t.kappa_0 < 0.0 || t.thermal_rate < 0.0 || t.lambda < 0.0)
        throw ConfigError("config: rates must be nonnegative and kappa positive");
    return t;
}

inline OnChipParams onchip_params_from(const ExperimentConfig& cfg) {
    cfg.validate_schema(known_config_keys());
    OnChipParams p;
    p.node.omega_r = cfg.frequency_or("node.omega_r", 1.0);
    p.node.delta_c = p.node.omega_r;
    p.node.kappa_0 = cfg.frequency_or("onchip.kappa_0", 0.0);
    const double thermal = cfg.frequency_or("onchip.thermal_rate", 0.0);
    p.node.gamma_m = thermal > 0.0 ? thermal / cfg.number_or("onchip.n_m", 1e6) : 0.0;
    p.node.n_m = thermal > 0.0 ? cfg.number_or("onchip.n_m", 1e6) : 0.0;
    p.node.zeta = cfg.number_or("onchip.zeta", 0.0);
    p.g = cfg.frequency("onchip.g");
    p.n_nodes = cfg.integer_or("onchip.n_nodes", 2);
    p.h = cfg.frequency("onchip.k") / std::sqrt(static_cast<double>(p.n_nodes));
    p.delta_c0 = p.node.omega_r;
    p.kappa_0f = cfg.frequency_or("onchip.kappa_0f", 0.0);
    p.validate();
    return p;
}

struct CommandResult {
    std::vector<std::string> files;
    std::map<std::string, double> summary;
    std::map<std::string, std::string> metadata;
};

inline void write_summary(const std::string& path, const CommandResult& result,
                          std::uint64_t config_hash) {
    std::ofstream out(path);
    if (!out) throw ConfigError("summary: cannot open " + path);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
    out << "config_hash=" << buf << "\n";
    for (const auto& [k, v] : result.summary) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out << k << "=" << buf << "\n";
    }
    for (const auto& [k, v] : result.metadata) out << k << "=" << v << "\n";
}

/// Effective decay over the two control planes of the single-node interface:
/// Gamma(G, omega_q) and Gamma(Delta_c, omega_q), one CSV per plane.
inline CommandResult cmd_fig2(const ExperimentConfig& cfg, const std::string& outdir,
                              int workers = 0) {
    cfg.validate_schema(known_config_keys());
    OMNodeParams node;
    node.omega_r = cfg.frequency_or("node.omega_r", 1.0);
    node.kappa_f = cfg.frequency("node.kappa") - cfg.frequency_or("node.kappa_0", 0.0);
    node.kappa_0 = cfg.frequency_or("node.kappa_0", 0.0);
    node.gamma_m = cfg.frequency_or("node.gamma_m", 0.0);
    node.zeta = cfg.number_or("node.zeta", 0.0);
    const double lambda = cfg.frequency("qubit.lambda");
    const double kap = node.kappa();
    const double g_ref = 1.5 * kap;
    node.delta_c = bare_detuning_for(node, g_ref, node.omega_r);

    const int ng = cfg.integer_or("fig2.g_points", 81);
    const int nw = cfg.integer_or("fig2.wq_points", 160);
    const int nd = cfg.integer_or("fig2.dc_points", 81);

    // the qubit-frequency grid is staggered so the undamped mechanical line
    // at G = 0, omega_q = omega_r is never sampled exactly
    std::vector<double> wq(nw);
    for (int k = 0; k < nw; ++k)
        wq[k] = node.omega_r + kap * (-3.0 + (k + 0.52) * 4.0 / nw);

    CommandResult result;

    {
        std::vector<double> gs(ng);
        for (int k = 0; k < ng; ++k) gs[k] = g_ref * k / (ng - 1);
        auto rows = parallel_map<std::vector<double>>(
            ng,
            [&](int i) {
                std::vector<double> vals;
                vals.reserve(nw);
                const LinearizedNode n = linearize(node, gs[i]);
                const CMatrix m = drift_matrix(n);
                for (int j = 0; j < nw; ++j) {
                    const CMatrix a = response_matrix(m, wq[j]);
                    vals.push_back(lambda > 0.0 ? 0.5 * a(0, 0).real() : 0.0);
                }
                return vals;
            },
            workers);
        const std::string path = outdir + "/fig2_vary_g.csv";
        CsvWriter csv(path, cfg.hash(), cfg.reference_hz(),
                      {"control1", "control2", "Gamma_over_lambda2"});
        for (int i = 0; i < ng; ++i)
            for (int j = 0; j < nw; ++j) csv.row({gs[i], wq[j], rows[i][j]});
        result.files.push_back(path);
    }

    {
        std::vector<double> dcs(nd);
        for (int k = 0; k < nd; ++k) dcs[k] = node.delta_c + 4.0 * kap * k / (nd - 1);
        const Complex drive_g = g_ref * Complex(kap, node.omega_r);
        const std::string path = outdir + "/fig2_vary_dc.csv";
        CsvWriter csv(path, cfg.hash(), cfg.reference_hz(),
                      {"control1", "control2", "Gamma_over_lambda2"});
        double hint = g_ref * g_ref;
        for (int i = 0; i < nd; ++i) {
            auto [g, delta_eff] = steady_coupling_at(node, dcs[i], drive_g, hint);
            hint = std::norm(g);
            OMNodeParams nd_params = node;
            nd_params.delta_c = dcs[i];
            const LinearizedNode n{nd_params, g, delta_eff};
            const CMatrix m = drift_matrix(n);
            for (int j = 0; j < nw; ++j) {
                const CMatrix a = response_matrix(m, wq[j]);
                csv.row({dcs[i], wq[j], lambda > 0.0 ? 0.5 * a(0, 0).real() : 0.0});
            }
        }
        result.files.push_back(path);
    }
    return result;
}

/// One full state transfer: schedule CSV, amplitude trajectory, summary with
/// the averaged fidelity and the per-imperfection infidelity attribution.
inline CommandResult cmd_transfer(const ExperimentConfig& cfg, const std::string& outdir,
                                  int workers = 0) {
    (void)workers;
    const TransferConfig t = transfer_config_from(cfg);
    const bool attribution = cfg.integer_or("protocol.attribution", 1) != 0;
    const TransferResult r = run_state_transfer(t, attribution);

    const auto amps =
        dark_state_amplitudes(r.schedule.t, r.schedule.gamma1, r.schedule.gamma2);
    const std::string path = outdir + "/transfer_schedule.csv";
    CsvWriter csv(path, cfg.hash(), cfg.reference_hz(),
                  {"t", "Gamma1", "Gamma2", "absG1", "absG2", "delta_c1", "delta_c2",
                   "domega_q1", "domega_q2", "phi", "v1_sq", "v2_sq"});
    for (size_t k = 0; k < r.schedule.t.size(); ++k) {
        csv.row({r.schedule.t[k], r.schedule.gamma1[k], r.schedule.gamma2[k],
                 std::abs(r.schedule.g1[k]), std::abs(r.schedule.g2[k]),
                 r.schedule.delta_c1[k], r.schedule.delta_c2[k], r.schedule.domega_q1[k],
                 r.schedule.domega_q2[k], r.schedule.phi[k], std::norm(amps.v1[k]),
                 std::norm(amps.v2[k])});
    }

    CommandResult result;
    result.files.push_back(path);
    result.summary["fbar"] = r.fbar;
    result.summary["dark_residual_over_gamma_max"] = r.dark_residual;
    result.summary["boundary_v1_sq"] = r.boundary_v1_sq;
    result.summary["gamma_max"] = r.schedule.gamma_max;
    result.summary["gamma_op_ref"] = r.schedule.gamma_op_ref;
    for (const auto& [k, v] : r.infidelity_attribution)
        result.summary["infidelity_" + k] = v;
    result.metadata["phase_convention"] =
        "theta_i = phi_i + 2 sum_{n<i} phi_n (RWA, real G); nearest-neighbour arg J "
        "otherwise";
    result.metadata["Gamma_m_interpretation"] =
        "thermal_rate is the mechanical decoherence rate gamma_m*N_m";
    const std::string spath = outdir + "/transfer_summary.txt";
    write_summary(spath, result, cfg.hash());
    result.files.push_back(spath);
    return result;
}

/// Infidelity sweeps over the four imperfections and the fitted linear
/// coefficients.
inline CommandResult cmd_sweep_transfer(const ExperimentConfig& cfg,
                                        const std::string& outdir, int workers = 0) {
    const TransferConfig base = transfer_config_from(cfg);
    const InfidelityFit fit = fit_infidelity_coefficients(base, workers);

    const std::string path = outdir + "/transfer_sweeps.csv";
    CsvWriter csv(path, cfg.hash(), cfg.reference_hz(), {"sweep_id", "x", "infidelity"});
    const std::map<std::string, int> ids = {
        {"kappa0", 0}, {"thermal", 1}, {"stokes", 2}, {"dephasing", 3}};
    for (const auto& pt : fit.points)
        csv.row({static_cast<double>(ids.at(pt.sweep)), pt.x, pt.infidelity});

    CommandResult result;
    result.files.push_back(path);
    result.summary["slope_kappa0"] = fit.slope_kappa0;
    result.summary["C1"] = fit.c1;
    result.summary["C2"] = fit.c2;
    result.summary["C3"] = fit.c3;
    result.metadata["sweep_ids"] = "0=kappa0/kappa 1=thermal_rate/kappa 2=kappa^2/omega_r^2 "
                                   "3=kappa/(lambda^2 T2)";
    result.metadata["Gamma_m_interpretation"] =
        "thermal sweep varies the decoherence rate gamma_m*N_m";
    const std::string spath = outdir + "/sweep_summary.txt";
    write_summary(spath, result, cfg.hash());
    result.files.push_back(spath);
    return result;
}

/// Normal-mode table: numerical eigen-data next to the closed forms.
inline CommandResult cmd_onchip_modes(const ExperimentConfig& cfg, const std::string& outdir,
                                      int workers = 0) {
    (void)workers;
    const OnChipParams p = onchip_params_from(cfg);
    const double lambda = cfg.frequency("qubit.lambda");
    const auto table = normal_mode_table(p, lambda);
    const auto stokes = nonrwa_occupations(p);

    const std::string path = outdir + "/onchip_modes.csv";
    CsvWriter csv(path, cfg.hash(), cfg.reference_hz(),
                  {"symmetry", "index", "omega_closed", "omega_numeric", "gamma_closed",
                   "gamma_numeric", "lambda_closed", "lambda_numeric", "nth_closed",
                   "nth_numeric", "nonrwa_closed", "nonrwa_numeric", "freq_rel_dev",
                   "width_rel_dev"});
    CommandResult result;
    double weight_check = 0.0;
    for (size_t k = 0; k < table.size(); ++k) {
        const auto& row = table[k];
        csv.row({row.closed.symmetry == 's' ? 0.0 : 1.0,
                 static_cast<double>(row.closed.index), row.closed.omega, row.numeric.omega,
                 row.closed.gamma, row.numeric.gamma, row.closed.lambda_tilde,
                 row.numeric.lambda_tilde, row.closed.n_th, row.numeric.n_th,
                 row.closed.n_nonrwa, stokes[k], row.freq_rel_dev, row.width_rel_dev});
        weight_check += row.numeric.lambda_tilde * row.numeric.lambda_tilde;
    }
    result.files.push_back(path);
    result.summary["weight_sum_over_lambda2"] = weight_check / (2.0 * lambda * lambda);
    const std::string spath = outdir + "/onchip_modes_summary.txt";
    write_summary(spath, result, cfg.hash());
    result.files.push_back(spath);
    return result;
}

/// Bell-state fidelity scan over the qubit frequency: full elimination
/// (first-order and integrated master equation) next to the independent-mode
/// approximation, with the proximity-excluded bands marked.
inline CommandResult cmd_onchip_fidelity(const ExperimentConfig& cfg,
                                         const std::string& outdir, int workers = 0) {
    const OnChipParams p = onchip_params_from(cfg);
    const double lambda = cfg.frequency("qubit.lambda");
    const double t2 = cfg.time_or("qubit.T2", std::numeric_limits<double>::infinity());
    const int npts = cfg.integer_or("onchip.scan_points", 400);
    const auto table = normal_mode_table(p, lambda);

    const double wr = p.node.omega_r;
    const double span = 1.2 * p.delta_split();
    struct Point {
        double wq = 0.0;
        bool excluded = true;
        bool full_ok = false, lor_ok = false;
        double f_full = 0.0, f_first = 0.0, f_lor = 0.0;
    };
    auto rows = parallel_map<Point>(
        npts,
        [&](int k) {
            Point pt;
            pt.wq = wr - span + 2.0 * span * k / (npts - 1);
            pt.excluded = false;
            for (const auto& row : table)
                if (std::abs(pt.wq - row.closed.omega) < 3.0 * row.closed.lambda_tilde)
                    pt.excluded = true;
            QubitParams q{.omega_q = pt.wq, .lambda = lambda};
            try {
                pt.f_full = sqrt_swap_fidelity(p, q, t2, SwapMethod::full_me);
                pt.f_first = sqrt_swap_fidelity(p, q, t2, SwapMethod::first_order);
                pt.full_ok = true;
            } catch (const RegimeError&) {
            }
            if (!pt.excluded) {
                try {
                    pt.f_lor = first_order_fidelity_modes(gate_coefficients_lorentzian(p, q), t2);
                    pt.lor_ok = true;
                } catch (const RegimeError&) {
                }
            }
            return pt;
        },
        workers);

    const std::string path = outdir + "/onchip_fidelity.csv";
    CsvWriter csv(path, cfg.hash(), cfg.reference_hz(),
                  {"omega_q", "excluded", "F_full_me", "F_first_order", "F_lorentzian"});
    CommandResult result;
    double best_f = -1.0, best_wq = 0.0;
    for (const auto& pt : rows) {
        csv.row_optional({{true, pt.wq},
                          {true, pt.excluded ? 1.0 : 0.0},
                          {pt.full_ok, pt.f_full},
                          {pt.full_ok, pt.f_first},
                          {pt.lor_ok, pt.f_lor}});
        if (pt.full_ok && pt.f_full > best_f) {
            best_f = pt.f_full;
            best_wq = pt.wq;
        }
    }
    result.files.push_back(path);
    result.summary["max_fidelity"] = best_f;
    result.summary["argmax_omega_q"] = best_wq;
    const std::string spath = outdir + "/onchip_fidelity_summary.txt";
    write_summary(spath, result, cfg.hash());
    result.files.push_back(spath);
    return result;
}

/// Brute-force validation of the adiabatic elimination on the configured
/// single node.
inline CommandResult cmd_oracle_check(const ExperimentConfig& cfg, const std::string& outdir,
                                      int workers = 0) {
    (void)workers;
    const TransferConfig t = transfer_config_from(cfg);
    FullSystemConfig fcfg;
    const OMNodeParams node = t.node();
    fcfg.node = linearize(node, t.g_ref());
    fcfg.qubit = t.qubit();
    fcfg.n_trunc = cfg.integer_or("oracle.n_trunc", 5);
    const double fit_end = cfg.number_or("oracle.fit_end_over_gamma", 3.0);
    const double dt = cfg.number_or("oracle.dt", 0.5);
    const auto cmp = compare_effective(fcfg, fit_end, dt);

    CommandResult result;
    result.summary["gamma_eff"] = cmp.gamma_eff;
    result.summary["gamma_relax_pred"] = cmp.gamma_relax;
    result.summary["gamma_fit"] = cmp.gamma_fit;
    result.summary["gamma_rel_err"] = cmp.gamma_rel_err;
    result.summary["N0"] = cmp.n0;
    result.summary["p_steady_pred"] = cmp.p_steady_pred;
    result.summary["p_steady_sim"] = cmp.p_steady_sim;
    result.summary["top_fock_max"] = cmp.top_fock_max;
    const std::string spath = outdir + "/oracle_report.txt";
    write_summary(spath, result, cfg.hash());
    result.files.push_back(spath);
    return result;
}

}  // namespace omtnet
