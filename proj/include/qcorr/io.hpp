#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/channels.hpp"
#include "qcorr/dynamics.hpp"
#include "qcorr/encoder.hpp"
#include "qcorr/states.hpp"
#include "qcorr/tomography.hpp"
#include "qcorr/version.hpp"

namespace qcorr {

using nlohmann::json;

/// Fixed 12-significant-digit rendering, locale independent. All CSV output
/// funnels through here so regression files stay byte-stable.
inline std::string format_g12(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return std::string(buffer);
}

inline std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line.push_back(',');
        line += cells[i];
    }
    line.push_back('\n');
    return line;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write_text_file: write failed for " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

/// Trajectory table in the pinned column order. Quantifiers a run does not
/// define (environment columns for multi-stage channels, two-qubit-only
/// measures for larger registers) are left as empty cells.
inline std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
    std::string out = "p";
    for (const std::string& c : trajectory_columns()) out += "," + c;
    out.push_back('\n');
    for (const TrajectoryPoint& pt : points) {
        std::vector<std::string> cells;
        cells.push_back(format_g12(pt.p));
        for (const std::string& c : trajectory_columns()) {
            auto it = pt.measures.find(c);
            cells.push_back(it == pt.measures.end() ? std::string{} : format_g12(it->second));
        }
        out += csv_line(cells);
    }
    return out;
}

inline json conventions_json() {
    return json{
        {"log_base", 2},
        {"negativity", "(trace_norm(partial_transpose(rho)) - 1) / 2"},
        {"doubled_negativity", "trace_norm(partial_transpose(rho)) - 1"},
        {"qubit_order", "qubit 0 is the most significant basis-index bit"},
        {"euler_unitary", "Rz(alpha) * Ry(beta) * Rz(delta)"},
        {"csv_number_format", "%.12g"},
    };
}

inline json pure_state_to_json(const PureState& state) {
    const Vec& a = state.amplitudes();
    json amps = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i)
        amps.push_back(json::array({a(i).real(), a(i).imag()}));
    return json{{"n_qubits", state.n_qubits()}, {"amplitudes", std::move(amps)}};
}

inline PureState pure_state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n_qubits") || !j.contains("amplitudes"))
        throw std::invalid_argument("pure_state_from_json: need n_qubits and amplitudes");
    const int n = j.at("n_qubits").get<int>();
    const auto& amps = j.at("amplitudes");
    if (!amps.is_array() || amps.size() != (std::size_t{1} << n))
        throw std::invalid_argument("pure_state_from_json: amplitude count mismatch");
    Vec v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const auto& pair = amps[i];
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("pure_state_from_json: amplitudes are [re, im] pairs");
        v(static_cast<Eigen::Index>(i)) = cplx(pair[0].get<double>(), pair[1].get<double>());
    }
    return PureState(n, v);
}

inline json density_to_json(const DensityMatrix& rho) {
    const Mat& m = rho.matrix();
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return json{{"n_qubits", rho.n_qubits()}, {"matrix", std::move(rows)}};
}

inline DensityMatrix density_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n_qubits") || !j.contains("matrix"))
        throw std::invalid_argument("density_from_json: need n_qubits and matrix");
    const int n = j.at("n_qubits").get<int>();
    const auto& rows = j.at("matrix");
    const std::size_t dim = std::size_t{1} << n;
    if (!rows.is_array() || rows.size() != dim)
        throw std::invalid_argument("density_from_json: row count mismatch");
    Mat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || row.size() != dim)
            throw std::invalid_argument("density_from_json: column count mismatch");
        for (std::size_t c = 0; c < dim; ++c) {
            const auto& pair = row[c];
            if (!pair.is_array() || pair.size() != 2)
                throw std::invalid_argument("density_from_json: entries are [re, im] pairs");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                cplx(pair[0].get<double>(), pair[1].get<double>());
        }
    }
    DensityMatrix rho(m);
    if (rho.n_qubits() != n)
        throw std::invalid_argument("density_from_json: n_qubits does not match matrix size");
    return rho;
}

inline json encoding_to_json(const EncodingUnitaries& enc) {
    json angles = json::array();
    for (const EulerAngles& a : enc)
        angles.push_back(json::array({a.alpha, a.beta, a.delta}));
    return angles;
}

inline EncodingUnitaries encoding_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("encoding_from_json: expected an array");
    EncodingUnitaries enc;
    for (const auto& triple : j) {
        if (!triple.is_array() || triple.size() != 3)
            throw std::invalid_argument("encoding_from_json: entries are [alpha, beta, delta]");
        for (const auto& v : triple)
            if (!v.is_number())
                throw std::invalid_argument("encoding_from_json: angles must be numbers");
        enc.push_back(EulerAngles{triple[0].get<double>(), triple[1].get<double>(),
                                  triple[2].get<double>()});
    }
    return enc;
}

/// Record layout: {settings, shots, counts: {setting: {bitstring: n}},
/// readout_seed}.
inline json record_to_json(const TomographyRecord& record) {
    json counts = json::object();
    for (std::size_t k = 0; k < record.settings.size(); ++k) {
        json per = json::object();
        for (const auto& [bits, c] : record.counts[k]) per[bits] = c;
        counts[record.settings[k]] = std::move(per);
    }
    return json{{"n_qubits", record.n_qubits},
                {"settings", record.settings},
                {"shots", record.shots},
                {"counts", std::move(counts)},
                {"readout_seed", record.seed}};
}

inline TomographyRecord record_from_json(const json& j) {
    TomographyRecord record;
    record.n_qubits = j.at("n_qubits").get<int>();
    record.shots = j.at("shots").get<std::int64_t>();
    record.seed = j.at("readout_seed").get<std::uint64_t>();
    record.settings = j.at("settings").get<std::vector<std::string>>();
    const auto& counts = j.at("counts");
    for (const std::string& s : record.settings) {
        std::map<std::string, std::int64_t> per;
        for (const auto& [bits, c] : counts.at(s).items())
            per[bits] = c.get<std::int64_t>();
        record.counts.push_back(std::move(per));
    }
    return record;
}

inline json objective_to_json(const Objective& obj) {
    switch (obj.kind) {
        case Objective::Kind::MeasureAtP:
            return json{{"kind", "measure_at_p"}, {"measure", obj.measure}, {"p", obj.p}};
        case Objective::Kind::AreaUnderCurve:
            return json{{"kind", "area_under_curve"},
                        {"measure", obj.measure},
                        {"p_grid", obj.p_grid}};
        case Objective::Kind::ThresholdP:
            return json{{"kind", "threshold_p"}, {"measure", obj.measure}, {"level", obj.level}};
    }
    throw std::logic_error("objective_to_json: unreachable");
}

} // namespace qcorr
