#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qcorr/circuits.hpp"
#include "qcorr/config.hpp"
#include "qcorr/dynamics.hpp"
#include "qcorr/encoder.hpp"
#include "qcorr/io.hpp"
#include "qcorr/tomography.hpp"

namespace qcorr {

struct RunContext {
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    std::int64_t shots = 8192;
};

namespace detail {

inline void write_metadata(const RunContext& ctx, const std::string& command,
                           const json& config_echo) {
    const json meta{{"command", command},
                    {"config", config_echo},
                    {"seed", ctx.seed},
                    {"shots", ctx.shots},
                    {"version", kVersion},
                    {"conventions", conventions_json()}};
    write_json_file(ctx.out_dir / "metadata.json", meta);
}

inline std::string index_suffix(int i) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%03d", i);
    return std::string(buffer);
}

} // namespace detail

inline void cmd_sweep(const SweepConfig& cfg, const json& config_echo, const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const auto points = sweep(cfg.initial, cfg.encoding, cfg.model, cfg.p_grid);
    write_text_file(ctx.out_dir / "trajectory.csv", trajectory_csv(points));
    detail::write_metadata(ctx, "sweep", config_echo);
}

/// Writes the decomposition table, then flags any residual beyond the 1e-9
/// contract as a violation (exit code 3) so bad runs are loud but the data
/// stays inspectable.
inline void cmd_ledger(const LedgerConfig& cfg, const json& config_echo, const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const auto entries = ledger(cfg.initial, cfg.encoding, cfg.model, cfg.p_grid);
    std::string csv = "p,delta_T_S,delta_T_E,I_SE,I_local,residual\n";
    double worst = 0.0;
    for (const LedgerEntry& e : entries) {
        csv += csv_line({format_g12(e.p), format_g12(e.d_t_s), format_g12(e.d_t_e),
                         format_g12(e.i_se), format_g12(e.i_local), format_g12(e.residual)});
        worst = std::max(worst, std::abs(e.residual));
    }
    write_text_file(ctx.out_dir / "ledger.csv", csv);
    detail::write_metadata(ctx, "ledger", config_echo);
    if (worst > 1e-9)
        throw ContractViolation("ledger residual " + format_g12(worst) + " exceeds 1e-9");
}

inline void cmd_optimize(const OptimizeConfig& cfg, const json& config_echo,
                         const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const OptimizeResult result = optimize(cfg.initial, cfg.model, cfg.objective);
    json out{{"angles", encoding_to_json(result.encoding)},
             {"objective", objective_to_json(cfg.objective)},
             {"value", result.value},
             {"channel", cfg.model.name()},
             {"p", cfg.objective.kind == Objective::Kind::MeasureAtP ? json(cfg.objective.p)
                                                                     : json(nullptr)}};
    write_json_file(ctx.out_dir / "optimize.json", out);
    detail::write_metadata(ctx, "optimize", config_echo);
}

inline void cmd_crossing(const CrossingConfig& cfg, const json& config_echo,
                         const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const CrossingResult result =
        find_crossing(cfg.state_a, cfg.state_b, cfg.model, cfg.measure, cfg.p_grid);
    json out{{"measure", cfg.measure},
             {"channel", cfg.model.name()},
             {"first", result.first ? json(*result.first) : json(nullptr)},
             {"all", result.all}};
    write_json_file(ctx.out_dir / "crossing.json", out);
    detail::write_metadata(ctx, "crossing", config_echo);
}

/// Simulated tomography experiment: per repetition a full Pauli-basis
/// sampling pass, reconstruction, and measure row; measures are averaged
/// across repetitions in the final CSV row.
inline void cmd_tomo(const TomoConfig& cfg, const json& config_echo, const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const std::int64_t shots = cfg.shots ? *cfg.shots : ctx.shots;
    const std::uint64_t seed = cfg.seed ? *cfg.seed : ctx.seed;
    const double theta = damping_theta(cfg.p);
    const Circuit circuit = build_ad_circuit(cfg.initial, theta);
    const DensityMatrix ideal = reduced_density(simulate(circuit), {0, 1});

    const ReadoutModel truth = ReadoutModel::uniform_flip(circuit.n_qubits, cfg.readout_flip);
    std::optional<ReadoutModel> mitigation;
    if (cfg.mitigate) {
        constexpr std::uint64_t kCalibrationStream = 1000003;
        mitigation = calibrate(truth, shots, derive_stream_seed(seed, kCalibrationStream)).prefix(2);
    }

    const std::vector<std::string> measure_cols = {"fidelity", "concurrence", "negativity",
                                                   "doubled_negativity", "singlet_fraction",
                                                   "telep_fidelity"};
    std::string csv = "rep";
    for (const auto& c : measure_cols) csv += "," + c;
    csv.push_back('\n');
    std::vector<double> sums(measure_cols.size(), 0.0);

    for (int r = 0; r < cfg.repetitions; ++r) {
        const TomographyRecord record = run_tomography(
            circuit, 2, shots, truth, derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        const DensityMatrix rho = reconstruct(record, mitigation);
        const std::string suffix = detail::index_suffix(r);
        write_json_file(ctx.out_dir / ("record_rep_" + suffix + ".json"), record_to_json(record));
        write_json_file(ctx.out_dir / ("state_rep_" + suffix + ".json"), density_to_json(rho));

        const SingletFractionResult sf = singlet_fraction(rho);
        const double neg = negativity(rho);
        const std::vector<double> row = {fidelity(rho, ideal), concurrence(rho), neg,
                                         2.0 * neg,           sf.fraction,      sf.teleportation_fidelity};
        std::vector<std::string> cells = {std::to_string(r)};
        for (std::size_t i = 0; i < row.size(); ++i) {
            sums[i] += row[i];
            cells.push_back(format_g12(row[i]));
        }
        csv += csv_line(cells);
    }

    std::vector<std::string> mean_cells = {"mean"};
    for (double s : sums) mean_cells.push_back(format_g12(s / cfg.repetitions));
    csv += csv_line(mean_cells);
    write_text_file(ctx.out_dir / "measures.csv", csv);
    write_json_file(ctx.out_dir / "ideal_state.json", density_to_json(ideal));

    json meta{{"command", "tomo"},
              {"config", config_echo},
              {"seed", seed},
              {"shots", shots},
              {"theta", theta},
              {"p", cfg.p},
              {"initial", circuit_initial_name(cfg.initial)},
              {"mitigated", cfg.mitigate},
              {"readout_flip", cfg.readout_flip},
              {"version", kVersion},
              {"conventions", conventions_json()}};
    write_json_file(ctx.out_dir / "metadata.json", meta);
}

/// Preset trajectory bundles. Each preset fixes the channel and the pair of
/// initial states and emits one trajectory CSV per state plus a manifest;
/// the crossing preset also records the located crossing strength.
inline void cmd_figure(const std::string& name, const std::filesystem::path& out_dir) {
    struct Entry {
        std::string file;
        std::string description;
        PureState state;
    };
    ChannelModel model = amplitude_damping_model();
    std::vector<Entry> entries;
    json extra = json::object();

    if (name == "fig2") {
        entries.push_back({"psi_plus.csv", "(|01> + |10>)/sqrt(2)", bell_psi_plus()});
        entries.push_back({"phi_plus.csv", "(|00> + |11>)/sqrt(2)", bell_phi_plus()});
    } else if (name == "fig3") {
        model = dephasing_model();
        entries.push_back({"psi_plus.csv", "(|01> + |10>)/sqrt(2)", bell_psi_plus()});
        entries.push_back({"graph.csv", "(|00> + |01> + |10> - |11>)/2", graph_state_2q()});
    } else if (name == "fig4") {
        entries.push_back({"phi_gamma_0.csv", "(|00> + |11>)/sqrt(2)", make_phi_gamma(0.0)});
        entries.push_back({"phi_gamma_pi2.csv", "(|01> + |10>)/sqrt(2) up to phase",
                           make_phi_gamma(std::numbers::pi / 2.0)});
    } else if (name == "fig5") {
        const double theta = 0.7 * std::numbers::pi / 4.0;
        entries.push_back({"phi_gamma_0.csv", "(|00> + |11>)/sqrt(2)", make_phi_gamma(0.0)});
        entries.push_back({"theta_state.csv", "cos(0.7 pi/4)|00> + sin(0.7 pi/4)|11>",
                           make_phi_theta(theta)});
        const CrossingResult crossing = find_crossing(
            entries[0].state, entries[1].state, model, "negativity", default_p_grid());
        extra["crossing"] = json{{"measure", "negativity"},
                                 {"p", crossing.first ? json(*crossing.first) : json(nullptr)},
                                 {"all", crossing.all}};
    } else {
        throw ConfigError("figure: unknown preset '" + name + "' (use fig2..fig5)");
    }

    std::filesystem::create_directories(out_dir);
    const EncodingUnitaries enc = identity_encoding(2);
    json files = json::object();
    for (const Entry& e : entries) {
        const auto points = sweep(e.state, enc, model, default_p_grid());
        write_text_file(out_dir / e.file, trajectory_csv(points));
        files[e.file] = e.description;
    }
    json manifest{{"figure", name},
                  {"channel", model.name()},
                  {"files", std::move(files)},
                  {"p_points", 101},
                  {"version", kVersion},
                  {"conventions", conventions_json()}};
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    write_json_file(out_dir / "manifest.json", manifest);
}

} // namespace qcorr
