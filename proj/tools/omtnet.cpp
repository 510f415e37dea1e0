#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "omtnet/commands.hpp"

using namespace omtnet;

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& outdir,
        int workers) {
    std::filesystem::create_directories(outdir);
    const ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    CommandResult result;
    if (command == "fig2") {
        result = cmd_fig2(cfg, outdir, workers);
    } else if (command == "transfer") {
        result = cmd_transfer(cfg, outdir, workers);
    } else if (command == "sweep-transfer") {
        result = cmd_sweep_transfer(cfg, outdir, workers);
    } else if (command == "onchip-modes") {
        result = cmd_onchip_modes(cfg, outdir, workers);
    } else if (command == "onchip-fidelity") {
        result = cmd_onchip_fidelity(cfg, outdir, workers);
    } else if (command == "oracle-check") {
        result = cmd_oracle_check(cfg, outdir, workers);
    } else {
        throw ConfigError("unknown command: " + command);
    }
    for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    for (const auto& [k, v] : result.summary) std::cout << k << "=" << v << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"omtnet: optomechanical-transducer quantum network simulator"};
    app.require_subcommand(1);

    std::string config_path, outdir = ".";
    int workers = 0;

    const char* names[] = {"fig2",          "transfer",        "sweep-transfer",
                           "onchip-modes",  "onchip-fidelity", "oracle-check"};
    const char* descs[] = {
        "effective decay over the two single-node control planes (CSV grids)",
        "one two-node state transfer: schedule, amplitudes, fidelity summary",
        "imperfection sweeps and fitted infidelity coefficients",
        "on-chip normal-mode table, closed forms vs numerics",
        "on-chip Bell-state fidelity scan over the qubit frequency",
        "brute-force Fock-space check of the effective single-node theory"};
    for (int k = 0; k < 6; ++k) {
        auto* sub = app.add_subcommand(names[k], descs[k]);
        sub->add_option("--config", config_path, "experiment configuration file")
            ->required();
        sub->add_option("--out", outdir, "output directory (default: .)");
        sub->add_option("--workers", workers, "worker threads (default: all cores)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, outdir, workers);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << "physics-regime error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
