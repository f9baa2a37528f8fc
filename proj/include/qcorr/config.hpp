#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/channels.hpp"
#include "qcorr/circuits.hpp"
#include "qcorr/dynamics.hpp"
#include "qcorr/encoder.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Bad user input: malformed config, out-of-range values. Exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical guarantee the run was required to meet did not hold. Exit 3.
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

namespace cfg {

inline void require_object(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

inline void reject_unknown_fields(const nlohmann::json& j, const std::set<std::string>& allowed,
                                  const std::string& where) {
    require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

inline double get_number(const nlohmann::json& j, const std::string& key,
                         const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double get_probability(const nlohmann::json& j, const std::string& key,
                              const std::string& where) {
    const double p = get_number(j, key, where);
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(where + ": field '" + key + "' must lie in [0, 1]");
    return p;
}

inline std::string get_string(const nlohmann::json& j, const std::string& key,
                              const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!j.at(key).is_string()) throw ConfigError(where + ": field '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

} // namespace cfg

/// Initial-state spec: a named family plus parameter, or raw amplitudes.
inline PureState parse_state_spec(const nlohmann::json& j) {
    cfg::require_object(j, "state");
    if (j.contains("amplitudes")) {
        cfg::reject_unknown_fields(j, {"amplitudes"}, "state");
        const auto& amps = j.at("amplitudes");
        if (!amps.is_array() || amps.empty())
            throw ConfigError("state: amplitudes must be a non-empty array");
        Vec v(static_cast<Eigen::Index>(amps.size()));
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const auto& pair = amps[i];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number())
                throw ConfigError("state: amplitudes are [re, im] number pairs");
            v(static_cast<Eigen::Index>(i)) = cplx(pair[0].get<double>(), pair[1].get<double>());
        }
        if ((amps.size() & (amps.size() - 1)) != 0 || amps.size() < 2)
            throw ConfigError("state: amplitude count must be a power of two, at least 2");
        if (std::abs(v.norm() - 1.0) > 1e-6)
            throw ConfigError("state: amplitudes must be normalized within 1e-6");
        int n = 0;
        while ((std::size_t{1} << n) < amps.size()) ++n;
        try {
            return PureState::normalized(n, v);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("state: ") + e.what());
        }
    }
    const std::string family = cfg::get_string(j, "family", "state");
    try {
        if (family == "phi_gamma") {
            cfg::reject_unknown_fields(j, {"family", "parameter"}, "state");
            return make_phi_gamma(cfg::get_number(j, "parameter", "state"));
        }
        if (family == "psi_theta") {
            cfg::reject_unknown_fields(j, {"family", "parameter"}, "state");
            return make_psi_theta(cfg::get_number(j, "parameter", "state"));
        }
        if (family == "phi_theta") {
            cfg::reject_unknown_fields(j, {"family", "parameter"}, "state");
            return make_phi_theta(cfg::get_number(j, "parameter", "state"));
        }
        if (family == "bell") {
            cfg::reject_unknown_fields(j, {"family"}, "state");
            return bell_phi_plus();
        }
        if (family == "triplet") {
            cfg::reject_unknown_fields(j, {"family"}, "state");
            return bell_psi_plus();
        }
        if (family == "graph") {
            cfg::reject_unknown_fields(j, {"family"}, "state");
            return graph_state_2q();
        }
        if (family == "ghz") {
            cfg::reject_unknown_fields(j, {"family", "n_qubits"}, "state");
            const double n = cfg::get_number(j, "n_qubits", "state");
            if (n != 2.0 && n != 3.0)
                throw ConfigError("state: ghz n_qubits must be 2 or 3");
            return ghz_state(static_cast<int>(n));
        }
        if (family == "basis") {
            cfg::reject_unknown_fields(j, {"family", "n_qubits", "index"}, "state");
            const double n = cfg::get_number(j, "n_qubits", "state");
            const double index = cfg::get_number(j, "index", "state");
            if (n < 1.0 || n > 6.0 || n != static_cast<int>(n))
                throw ConfigError("state: basis n_qubits must be an integer in [1, 6]");
            if (index < 0.0 || index != static_cast<int>(index) ||
                static_cast<long long>(index) >= (1LL << static_cast<int>(n)))
                throw ConfigError("state: basis index out of range");
            return basis_state(static_cast<int>(n), static_cast<Eigen::Index>(index));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("state: ") + e.what());
    }
    throw ConfigError("state: unknown family '" + family + "'");
}

/// Channel model for sweep-style commands: the strength comes from the p
/// grid, so only the kind(s) appear here. "concat" is the two-stage model
/// with dephasing acting first, then amplitude damping, both at the common
/// sweep strength.
inline ChannelModel parse_channel_model(const nlohmann::json& j) {
    cfg::reject_unknown_fields(j, {"kind"}, "channel");
    const std::string kind = cfg::get_string(j, "kind", "channel");
    if (kind == "dephasing") return dephasing_model();
    if (kind == "amplitude_damping") return amplitude_damping_model();
    if (kind == "concat")
        return ChannelModel{{ChannelKind::Dephasing, ChannelKind::AmplitudeDamping}};
    throw ConfigError("channel: unknown kind '" + kind + "'");
}

/// Fixed-strength channel instance: {"kind": ..., "p": number | [numbers]}.
/// Single-kind channels take one number; "concat" takes one number per
/// stage, dephasing first.
inline KrausChannel parse_kraus_channel(const nlohmann::json& j) {
    cfg::reject_unknown_fields(j, {"kind", "p"}, "channel");
    const std::string kind = cfg::get_string(j, "kind", "channel");
    if (!j.contains("p")) throw ConfigError("channel: missing field 'p'");
    const auto& p = j.at("p");
    auto one = [&](const nlohmann::json& v, const char* stage) -> double {
        if (!v.is_number()) throw ConfigError(std::string("channel: ") + stage + " p must be a number");
        const double x = v.get<double>();
        if (!(x >= 0.0 && x <= 1.0))
            throw ConfigError(std::string("channel: ") + stage + " p must lie in [0, 1]");
        return x;
    };
    try {
        if (kind == "dephasing") return dephasing(one(p, "dephasing"));
        if (kind == "amplitude_damping") return amplitude_damping(one(p, "amplitude_damping"));
        if (kind == "concat") {
            if (!p.is_array() || p.size() != 2)
                throw ConfigError("channel: concat needs p as [p_dephasing, p_amplitude_damping]");
            return concatenate(dephasing(one(p[0], "dephasing")),
                               amplitude_damping(one(p[1], "amplitude_damping")));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("channel: ") + e.what());
    }
    throw ConfigError("channel: unknown kind '" + kind + "'");
}

inline EncodingUnitaries parse_encoding(const nlohmann::json& j, int n_qubits) {
    if (!j.is_array()) throw ConfigError("encoding: expected an array of [alpha, beta, delta]");
    EncodingUnitaries enc;
    for (const auto& triple : j) {
        if (!triple.is_array() || triple.size() != 3)
            throw ConfigError("encoding: entries are [alpha, beta, delta] triples");
        for (const auto& v : triple)
            if (!v.is_number()) throw ConfigError("encoding: angles must be numbers");
        enc.push_back(EulerAngles{triple[0].get<double>(), triple[1].get<double>(),
                                  triple[2].get<double>()});
    }
    if (static_cast<int>(enc.size()) != n_qubits)
        throw ConfigError("encoding: need one angle triple per qubit");
    return enc;
}

/// Strength grid: "p_points" (uniform count) or an explicit "p_grid" array;
/// at most one of the two; default is the 101-point uniform grid.
inline std::vector<double> parse_p_grid(const nlohmann::json& j, const std::string& where) {
    const bool has_points = j.contains("p_points");
    const bool has_grid = j.contains("p_grid");
    if (has_points && has_grid)
        throw ConfigError(where + ": give either p_points or p_grid, not both");
    if (has_points) {
        const double n = cfg::get_number(j, "p_points", where);
        if (n < 2.0 || n > 100001.0 || n != static_cast<int>(n))
            throw ConfigError(where + ": p_points must be an integer in [2, 100001]");
        return default_p_grid(static_cast<int>(n));
    }
    if (has_grid) {
        const auto& g = j.at("p_grid");
        if (!g.is_array() || g.size() < 2)
            throw ConfigError(where + ": p_grid needs at least two points");
        std::vector<double> grid;
        double prev = -1.0;
        for (const auto& v : g) {
            if (!v.is_number()) throw ConfigError(where + ": p_grid entries must be numbers");
            const double p = v.get<double>();
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where + ": p_grid values must lie in [0, 1]");
            if (p <= prev) throw ConfigError(where + ": p_grid must be strictly ascending");
            grid.push_back(p);
            prev = p;
        }
        return grid;
    }
    return default_p_grid();
}

inline Objective parse_objective(const nlohmann::json& j) {
    cfg::require_object(j, "objective");
    const std::string kind = cfg::get_string(j, "kind", "objective");
    static const std::set<std::string> tags = {
        "T_S", "T_E", "I_SE", "I_local", "E_SE", "concurrence", "negativity",
        "doubled_negativity", "entanglement_of_formation", "singlet_fraction",
        "telep_fidelity"};
    Objective obj;
    if (kind == "measure_at_p") {
        cfg::reject_unknown_fields(j, {"kind", "measure", "p"}, "objective");
        obj = Objective::measure_at_p(cfg::get_string(j, "measure", "objective"),
                                      cfg::get_probability(j, "p", "objective"));
    } else if (kind == "area_under_curve") {
        cfg::reject_unknown_fields(j, {"kind", "measure", "p_grid"}, "objective");
        if (!j.contains("p_grid")) throw ConfigError("objective: missing field 'p_grid'");
        obj = Objective::area_under_curve(cfg::get_string(j, "measure", "objective"),
                                          parse_p_grid(j, "objective"));
    } else if (kind == "threshold_p") {
        cfg::reject_unknown_fields(j, {"kind", "measure", "level"}, "objective");
        const double level = cfg::get_number(j, "level", "objective");
        if (!(level > 0.0)) throw ConfigError("objective: level must be positive");
        obj = Objective::threshold_p(cfg::get_string(j, "measure", "objective"), level);
    } else {
        throw ConfigError("objective: unknown kind '" + kind + "'");
    }
    if (!tags.count(obj.measure))
        throw ConfigError("objective: unknown measure '" + obj.measure + "'");
    return obj;
}

struct SweepConfig {
    PureState initial;
    EncodingUnitaries encoding;
    ChannelModel model;
    std::vector<double> p_grid;
};

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
    cfg::reject_unknown_fields(j, {"command", "initial", "encoding", "channel", "p_points", "p_grid"},
                               "sweep config");
    if (j.contains("command") && j.at("command") != "sweep")
        throw ConfigError("sweep config: command field does not match");
    if (!j.contains("initial")) throw ConfigError("sweep config: missing field 'initial'");
    if (!j.contains("channel")) throw ConfigError("sweep config: missing field 'channel'");
    SweepConfig c{parse_state_spec(j.at("initial")), {}, parse_channel_model(j.at("channel")), {}};
    c.encoding = j.contains("encoding") ? parse_encoding(j.at("encoding"), c.initial.n_qubits())
                                        : identity_encoding(c.initial.n_qubits());
    c.p_grid = parse_p_grid(j, "sweep config");
    return c;
}

using LedgerConfig = SweepConfig;

inline LedgerConfig parse_ledger_config(const nlohmann::json& j) {
    cfg::reject_unknown_fields(j, {"command", "initial", "encoding", "channel", "p_points", "p_grid"},
                               "ledger config");
    if (j.contains("command") && j.at("command") != "ledger")
        throw ConfigError("ledger config: command field does not match");
    if (!j.contains("initial")) throw ConfigError("ledger config: missing field 'initial'");
    if (!j.contains("channel")) throw ConfigError("ledger config: missing field 'channel'");
    LedgerConfig c{parse_state_spec(j.at("initial")), {}, parse_channel_model(j.at("channel")), {}};
    if (!c.model.single_stage())
        throw ConfigError("ledger config: environment bookkeeping needs a single-stage channel");
    c.encoding = j.contains("encoding") ? parse_encoding(j.at("encoding"), c.initial.n_qubits())
                                        : identity_encoding(c.initial.n_qubits());
    c.p_grid = parse_p_grid(j, "ledger config");
    return c;
}

struct OptimizeConfig {
    PureState initial;
    ChannelModel model;
    Objective objective;
};

inline OptimizeConfig parse_optimize_config(const nlohmann::json& j) {
    cfg::reject_unknown_fields(j, {"command", "initial", "channel", "objective"}, "optimize config");
    if (j.contains("command") && j.at("command") != "optimize")
        throw ConfigError("optimize config: command field does not match");
    if (!j.contains("initial")) throw ConfigError("optimize config: missing field 'initial'");
    if (!j.contains("channel")) throw ConfigError("optimize config: missing field 'channel'");
    if (!j.contains("objective")) throw ConfigError("optimize config: missing field 'objective'");
    OptimizeConfig c{parse_state_spec(j.at("initial")), parse_channel_model(j.at("channel")),
                     parse_objective(j.at("objective"))};
    if (c.initial.n_qubits() != 2)
        throw ConfigError("optimize config: initial state must have two qubits");
    return c;
}

struct CrossingConfig {
    PureState state_a;
    PureState state_b;
    ChannelModel model;
    std::string measure;
    std::vector<double> p_grid;
};

inline CrossingConfig parse_crossing_config(const nlohmann::json& j) {
    cfg::reject_unknown_fields(
        j, {"command", "state_a", "state_b", "channel", "measure", "p_points", "p_grid"},
        "crossing config");
    if (j.contains("command") && j.at("command") != "crossing")
        throw ConfigError("crossing config: command field does not match");
    for (const char* key : {"state_a", "state_b", "channel", "measure"})
        if (!j.contains(key))
            throw ConfigError(std::string("crossing config: missing field '") + key + "'");
    CrossingConfig c{parse_state_spec(j.at("state_a")), parse_state_spec(j.at("state_b")),
                     parse_channel_model(j.at("channel")),
                     cfg::get_string(j, "measure", "crossing config"), {}};
    if (c.state_a.n_qubits() != 2 || c.state_b.n_qubits() != 2)
        throw ConfigError("crossing config: states must have two qubits");
    c.p_grid = parse_p_grid(j, "crossing config");
    return c;
}

struct TomoConfig {
    CircuitInitial initial = CircuitInitial::Phi0;
    double p = 0.5;
    std::optional<std::int64_t> shots; // falls back to the --shots flag
    int repetitions = 1;
    double readout_flip = 0.0;
    bool mitigate = false;
    std::optional<std::uint64_t> seed; // falls back to the --seed flag
};

inline TomoConfig parse_tomo_config(const nlohmann::json& j) {
    cfg::reject_unknown_fields(
        j, {"command", "initial", "p", "shots", "repetitions", "readout_flip", "mitigate", "seed"},
        "tomo config");
    if (j.contains("command") && j.at("command") != "tomo")
        throw ConfigError("tomo config: command field does not match");
    TomoConfig c;
    const std::string initial = cfg::get_string(j, "initial", "tomo config");
    try {
        c.initial = parse_circuit_initial(initial);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("tomo config: ") + e.what());
    }
    c.p = cfg::get_probability(j, "p", "tomo config");
    if (j.contains("shots")) {
        const double s = cfg::get_number(j, "shots", "tomo config");
        if (s < 1.0 || s > 1e9 || s != static_cast<double>(static_cast<std::int64_t>(s)))
            throw ConfigError("tomo config: shots must be an integer in [1, 1e9]");
        c.shots = static_cast<std::int64_t>(s);
    }
    if (j.contains("repetitions")) {
        const double r = cfg::get_number(j, "repetitions", "tomo config");
        if (r < 1.0 || r > 10000.0 || r != static_cast<int>(r))
            throw ConfigError("tomo config: repetitions must be an integer in [1, 10000]");
        c.repetitions = static_cast<int>(r);
    }
    if (j.contains("readout_flip")) {
        const double f = cfg::get_number(j, "readout_flip", "tomo config");
        if (!(f >= 0.0 && f <= 0.5))
            throw ConfigError("tomo config: readout_flip must lie in [0, 0.5]");
        c.readout_flip = f;
    }
    if (j.contains("mitigate")) {
        if (!j.at("mitigate").is_boolean())
            throw ConfigError("tomo config: mitigate must be a boolean");
        c.mitigate = j.at("mitigate").get<bool>();
    }
    if (j.contains("seed")) {
        const auto& s = j.at("seed");
        const bool ok = s.is_number_unsigned() ||
                        (s.is_number_integer() && s.get<std::int64_t>() >= 0);
        if (!ok) throw ConfigError("tomo config: seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    return c;
}

} // namespace qcorr
