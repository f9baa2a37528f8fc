#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qcorr/experiments.hpp"

namespace {

qcorr::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qcorr::ConfigError("cannot open config file: " + path);
    try {
        return qcorr::json::parse(in);
    } catch (const std::exception& e) {
        throw qcorr::ConfigError(std::string("config parse error: ") + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-qubit open-system correlation-flow simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::int64_t shots = 8192;
    std::string figure_name;

    auto add_common = [&](CLI::App* sub, bool wants_config) {
        if (wants_config)
            sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "RNG seed (default 1)");
        sub->add_option("--shots", shots, "default shots per tomography setting (default 8192)");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "trajectory of correlation quantifiers over p");
    add_common(sweep, true);
    CLI::App* ledger = app.add_subcommand("ledger", "correlation-flow decomposition table");
    add_common(ledger, true);
    CLI::App* optimize = app.add_subcommand("optimize", "best local encoding for an objective");
    add_common(optimize, true);
    CLI::App* crossing = app.add_subcommand("crossing", "locate trajectory crossings of two states");
    add_common(crossing, true);
    CLI::App* tomo = app.add_subcommand("tomo", "simulated circuit tomography experiment");
    add_common(tomo, true);
    CLI::App* figure = app.add_subcommand("figure", "preset trajectory bundles (fig2..fig5)");
    figure->add_option("name", figure_name, "preset name: fig2, fig3, fig4, fig5")->required();
    figure->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        qcorr::RunContext ctx{out_dir, seed, shots};
        if (sweep->parsed()) {
            const qcorr::json j = load_config(config_path);
            qcorr::cmd_sweep(qcorr::parse_sweep_config(j), j, ctx);
        } else if (ledger->parsed()) {
            const qcorr::json j = load_config(config_path);
            qcorr::cmd_ledger(qcorr::parse_ledger_config(j), j, ctx);
        } else if (optimize->parsed()) {
            const qcorr::json j = load_config(config_path);
            qcorr::cmd_optimize(qcorr::parse_optimize_config(j), j, ctx);
        } else if (crossing->parsed()) {
            const qcorr::json j = load_config(config_path);
            qcorr::cmd_crossing(qcorr::parse_crossing_config(j), j, ctx);
        } else if (tomo->parsed()) {
            const qcorr::json j = load_config(config_path);
            qcorr::cmd_tomo(qcorr::parse_tomo_config(j), j, ctx);
        } else if (figure->parsed()) {
            qcorr::cmd_figure(figure_name, out_dir);
        }
        return 0;
    } catch (const qcorr::ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
