#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/dynamics.hpp"
#include "qcorr/nelder_mead.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Scalar robustness objectives over an encoded, noise-evolved state.
struct Objective {
    enum class Kind { MeasureAtP, AreaUnderCurve, ThresholdP };

    Kind kind = Kind::MeasureAtP;
    std::string measure = "concurrence";
    double p = 0.5;                  // MeasureAtP
    std::vector<double> p_grid;      // AreaUnderCurve
    double level = 0.5;              // ThresholdP

    static Objective measure_at_p(std::string tag, double p) {
        Objective o;
        o.kind = Kind::MeasureAtP;
        o.measure = std::move(tag);
        o.p = p;
        return o;
    }
    static Objective area_under_curve(std::string tag, std::vector<double> grid) {
        Objective o;
        o.kind = Kind::AreaUnderCurve;
        o.measure = std::move(tag);
        o.p_grid = std::move(grid);
        return o;
    }
    static Objective threshold_p(std::string tag, double level) {
        Objective o;
        o.kind = Kind::ThresholdP;
        o.measure = std::move(tag);
        o.level = level;
        return o;
    }
};

inline void validate_objective(const Objective& obj) {
    switch (obj.kind) {
        case Objective::Kind::MeasureAtP:
            check_probability(obj.p, "Objective");
            break;
        case Objective::Kind::AreaUnderCurve: {
            if (obj.p_grid.size() < 2)
                throw std::invalid_argument("Objective: area grid needs at least two points");
            double prev = -1.0;
            for (double p : obj.p_grid) {
                check_probability(p, "Objective");
                if (p <= prev) throw std::invalid_argument("Objective: area grid must be ascending");
                prev = p;
            }
            break;
        }
        case Objective::Kind::ThresholdP:
            if (!(obj.level > 0.0))
                throw std::invalid_argument("Objective: threshold level must be positive");
            break;
    }
}

/// Value of the objective for a fixed encoding.
inline double evaluate(const PureState& initial, const EncodingUnitaries& enc,
                       const ChannelModel& model, const Objective& obj) {
    validate_objective(obj);
    switch (obj.kind) {
        case Objective::Kind::MeasureAtP:
            return measure_at(initial, enc, model, obj.p, obj.measure);
        case Objective::Kind::AreaUnderCurve: {
            double area = 0.0;
            double prev_p = obj.p_grid[0];
            double prev_v = measure_at(initial, enc, model, prev_p, obj.measure);
            for (std::size_t i = 1; i < obj.p_grid.size(); ++i) {
                const double p = obj.p_grid[i];
                const double v = measure_at(initial, enc, model, p, obj.measure);
                area += 0.5 * (v + prev_v) * (p - prev_p);
                prev_p = p;
                prev_v = v;
            }
            return area;
        }
        case Objective::Kind::ThresholdP: {
            auto m = [&](double p) { return measure_at(initial, enc, model, p, obj.measure); };
            if (m(0.0) < obj.level) return 0.0;
            if (m(1.0) >= obj.level) return 1.0;
            double lo = 0.0, hi = 1.0;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                (m(mid) >= obj.level ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw std::logic_error("evaluate: unreachable");
}

struct OptimizeResult {
    EncodingUnitaries encoding;
    double value = 0.0;
};

namespace detail {

inline EncodingUnitaries angles_to_encoding(const std::vector<double>& x) {
    EncodingUnitaries enc;
    for (std::size_t q = 0; q * 3 < x.size(); ++q)
        enc.push_back(EulerAngles{x[q * 3], x[q * 3 + 1], x[q * 3 + 2]});
    return enc;
}

inline std::vector<double> normalize_angle_vector(std::vector<double> x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (double& a : x) {
        a = std::fmod(a, two_pi);
        if (a < 0.0) a += two_pi;
        if (a > two_pi - 1e-12) a = 0.0;
    }
    return x;
}

} // namespace detail

/// Best local encoding of a two-qubit state for the given objective. Scans
/// an 8-point grid per Euler angle per qubit, refines the leading starts by
/// simplex, and breaks value ties toward the lexicographically smallest
/// angle tuple. Deterministic for fixed inputs.
inline OptimizeResult optimize(const PureState& initial, const ChannelModel& model,
                               const Objective& obj) {
    if (initial.n_qubits() != 2)
        throw std::invalid_argument("optimize: encoder search is defined for two-qubit states");
    validate_objective(obj);

    auto value_of = [&](const std::vector<double>& x) {
        return evaluate(initial, detail::angles_to_encoding(x), model, obj);
    };

    constexpr int kGrid = 8;
    constexpr double step = 2.0 * std::numbers::pi / kGrid;
    struct Candidate {
        std::vector<double> x;
        double value;
    };
    constexpr std::size_t kKeep = 16;
    std::vector<Candidate> top;

    std::vector<double> x(6, 0.0);
    std::array<int, 6> idx{};
    for (idx[0] = 0; idx[0] < kGrid; ++idx[0])
        for (idx[1] = 0; idx[1] < kGrid; ++idx[1])
            for (idx[2] = 0; idx[2] < kGrid; ++idx[2])
                for (idx[3] = 0; idx[3] < kGrid; ++idx[3])
                    for (idx[4] = 0; idx[4] < kGrid; ++idx[4])
                        for (idx[5] = 0; idx[5] < kGrid; ++idx[5]) {
                            for (int k = 0; k < 6; ++k) x[k] = step * idx[k];
                            const double v = value_of(x);
                            if (top.size() < kKeep) {
                                top.push_back({x, v});
                                std::stable_sort(top.begin(), top.end(),
                                                 [](const Candidate& a, const Candidate& b) {
                                                     return a.value > b.value;
                                                 });
                            } else if (v > top.back().value) {
                                top.back() = {x, v};
                                std::stable_sort(top.begin(), top.end(),
                                                 [](const Candidate& a, const Candidate& b) {
                                                     return a.value > b.value;
                                                 });
                            }
                        }

    auto neg = [&](const std::vector<double>& y) { return -value_of(y); };
    std::vector<Candidate> candidates = top;
    for (const Candidate& c : top) {
        SimplexResult r = nelder_mead_minimize(neg, c.x);
        r = nelder_mead_minimize(neg, r.x);
        std::vector<double> nx = detail::normalize_angle_vector(r.x);
        candidates.push_back({nx, value_of(nx)});
    }

    double best = -std::numeric_limits<double>::infinity();
    for (const Candidate& c : candidates) best = std::max(best, c.value);
    const Candidate* pick = nullptr;
    for (const Candidate& c : candidates) {
        if (c.value < best - 1e-9) continue;
        if (!pick || c.x < pick->x) pick = &c;
    }

    OptimizeResult out;
    out.encoding = detail::angles_to_encoding(pick->x);
    out.value = pick->value;
    return out;
}

} // namespace qcorr
