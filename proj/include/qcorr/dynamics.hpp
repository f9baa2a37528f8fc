#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/channels.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Noise model applied per qubit during a sweep: one or more stages, every
/// stage driven by the same strength p. Joint system+environment evolution
/// is available for single-stage models only.
struct ChannelModel {
    std::vector<ChannelKind> stages;

    bool single_stage() const { return stages.size() == 1; }

    KrausChannel channel_at(double p) const {
        if (stages.empty()) throw std::invalid_argument("ChannelModel: no stages");
        KrausChannel c = make_channel(stages[0], p);
        for (std::size_t s = 1; s < stages.size(); ++s)
            c = concatenate(c, make_channel(stages[s], p));
        return c;
    }

    std::string name() const {
        std::string out;
        for (std::size_t s = 0; s < stages.size(); ++s) {
            if (s) out += "+";
            out += channel_kind_name(stages[s]);
        }
        return out;
    }
};

inline ChannelModel dephasing_model() { return ChannelModel{{ChannelKind::Dephasing}}; }
inline ChannelModel amplitude_damping_model() { return ChannelModel{{ChannelKind::AmplitudeDamping}}; }

/// 101 uniform points covering [0, 1].
inline std::vector<double> default_p_grid(int count = 101) {
    if (count < 2) throw std::invalid_argument("default_p_grid: need at least two points");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) g[i] = static_cast<double>(i) / (count - 1);
    return g;
}

struct TrajectoryPoint {
    double p = 0.0;
    std::map<std::string, double> measures;
};

/// Column order for trajectory tables.
inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols = {
        "T_S", "T_E", "I_SE", "I_local", "concurrence", "negativity",
        "doubled_negativity", "E_SE", "singlet_fraction", "telep_fidelity"};
    return cols;
}

namespace detail {

inline std::set<int> range_set(int lo, int hi) {
    std::set<int> s;
    for (int q = lo; q < hi; ++q) s.insert(q);
    return s;
}

struct JointQuantities {
    double t_e = 0.0;
    double i_se = 0.0;
    double i_local = 0.0;
    double e_se = 0.0;
};

inline JointQuantities joint_quantities(const PureState& joint, int n_system) {
    JointQuantities out;
    const std::set<int> sys = range_set(0, n_system);
    const std::set<int> env = range_set(n_system, 2 * n_system);
    const DensityMatrix rho_joint = density(joint);
    const DensityMatrix rho_s = reduced_density(rho_joint, sys);
    const DensityMatrix rho_e = reduced_density(rho_joint, env);
    out.t_e = total_correlations(rho_e);
    out.e_se = entropy(rho_s);
    out.i_se = std::max(entropy(rho_s) + entropy(rho_e) - entropy(rho_joint), 0.0);
    for (int q = 0; q < n_system; ++q) {
        const DensityMatrix pair = reduced_density(rho_joint, {q, n_system + q});
        out.i_local += mutual_information(pair, {0});
    }
    return out;
}

} // namespace detail

/// Evolves an encoded initial state across a strength grid and records every
/// applicable correlation quantifier. Environment-side quantities need a
/// single-stage model; multi-stage models yield system-side columns only.
inline std::vector<TrajectoryPoint> sweep(const PureState& initial, const EncodingUnitaries& enc,
                                          const ChannelModel& model,
                                          const std::vector<double>& p_grid) {
    const int n = initial.n_qubits();
    const PureState encoded = apply_encoding(initial, enc);
    std::vector<TrajectoryPoint> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        check_probability(p, "sweep");
        TrajectoryPoint pt;
        pt.p = p;
        const auto channels = replicate(model.channel_at(p), n);
        const DensityMatrix rho_s = apply_product_channel(density(encoded), channels);
        pt.measures["T_S"] = total_correlations(rho_s);
        if (n == 2) {
            pt.measures["concurrence"] = concurrence(rho_s);
            const double neg = negativity(rho_s);
            pt.measures["negativity"] = neg;
            pt.measures["doubled_negativity"] = 2.0 * neg;
            const SingletFractionResult sf = singlet_fraction(rho_s);
            pt.measures["singlet_fraction"] = sf.fraction;
            pt.measures["telep_fidelity"] = sf.teleportation_fidelity;
        }
        if (model.single_stage()) {
            const PureState joint = evolve_joint(encoded, channels);
            const detail::JointQuantities jq = detail::joint_quantities(joint, n);
            pt.measures["T_E"] = jq.t_e;
            pt.measures["I_SE"] = jq.i_se;
            pt.measures["I_local"] = jq.i_local;
            pt.measures["E_SE"] = jq.e_se;
        }
        out.push_back(std::move(pt));
    }
    return out;
}

struct LedgerEntry {
    double p = 0.0;
    double d_t_s = 0.0;
    double d_t_e = 0.0;
    double i_se = 0.0;
    double i_local = 0.0;
    double residual = 0.0;
};

/// Correlation-flow ledger along a strength grid. The decomposition
///   dT_S + I_SE - I_local + dT_E = 0
/// holds exactly for product initial system+environment states; `residual`
/// records the numerical defect.
inline std::vector<LedgerEntry> ledger(const PureState& initial, const EncodingUnitaries& enc,
                                       const ChannelModel& model,
                                       const std::vector<double>& p_grid) {
    if (!model.single_stage())
        throw std::invalid_argument("ledger: joint evolution needs a single-stage model");
    const int n = initial.n_qubits();
    const PureState encoded = apply_encoding(initial, enc);
    const double t_s0 = total_correlations(density(encoded));
    std::vector<LedgerEntry> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        check_probability(p, "ledger");
        const auto channels = replicate(model.channel_at(p), n);
        const PureState joint = evolve_joint(encoded, channels);
        const detail::JointQuantities jq = detail::joint_quantities(joint, n);
        const std::set<int> sys = detail::range_set(0, n);
        const double t_s = total_correlations(reduced_density(joint, sys));
        LedgerEntry e;
        e.p = p;
        e.d_t_s = t_s - t_s0;
        e.d_t_e = jq.t_e;
        e.i_se = jq.i_se;
        e.i_local = jq.i_local;
        e.residual = e.d_t_s + e.i_se - e.i_local + e.d_t_e;
        out.push_back(e);
    }
    return out;
}

/// For initial states whose single-qubit marginals are all maximally mixed,
/// dT_S + I_SE + dT_E does not depend on the local encoding. Returns the
/// absolute difference of that sum between two encodings.
inline double conservation_check(const PureState& initial, const EncodingUnitaries& enc_a,
                                 const EncodingUnitaries& enc_b, const ChannelModel& model,
                                 double p) {
    const int n = initial.n_qubits();
    for (int q = 0; q < n; ++q) {
        const Mat marg = reduced_density(initial, {q}).matrix();
        if ((marg - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("conservation_check: marginals not maximally mixed");
    }
    auto triple = [&](const EncodingUnitaries& enc) {
        const PureState encoded = apply_encoding(initial, enc);
        const double t_s0 = total_correlations(density(encoded));
        const auto channels = replicate(model.channel_at(p), n);
        const PureState joint = evolve_joint(encoded, channels);
        const detail::JointQuantities jq = detail::joint_quantities(joint, n);
        const double t_s = total_correlations(reduced_density(joint, detail::range_set(0, n)));
        return (t_s - t_s0) + jq.i_se + jq.t_e;
    };
    return std::abs(triple(enc_a) - triple(enc_b));
}

/// One quantifier of the evolved state at a single strength.
inline double measure_at(const PureState& initial, const EncodingUnitaries& enc,
                         const ChannelModel& model, double p, const std::string& tag) {
    const int n = initial.n_qubits();
    check_probability(p, "measure_at");
    const PureState encoded = apply_encoding(initial, enc);
    const auto channels = replicate(model.channel_at(p), n);

    if (tag == "T_E" || tag == "I_SE" || tag == "I_local" || tag == "E_SE") {
        if (!model.single_stage())
            throw std::invalid_argument("measure_at: environment quantities need a single-stage model");
        const PureState joint = evolve_joint(encoded, channels);
        const detail::JointQuantities jq = detail::joint_quantities(joint, n);
        if (tag == "T_E") return jq.t_e;
        if (tag == "I_SE") return jq.i_se;
        if (tag == "I_local") return jq.i_local;
        return jq.e_se;
    }

    const DensityMatrix rho_s = apply_product_channel(density(encoded), channels);
    if (tag == "T_S") return total_correlations(rho_s);
    if (tag == "concurrence") return concurrence(rho_s);
    if (tag == "negativity") return negativity(rho_s);
    if (tag == "doubled_negativity") return doubled_negativity(rho_s);
    if (tag == "entanglement_of_formation") return entanglement_of_formation(rho_s);
    if (tag == "singlet_fraction") return singlet_fraction(rho_s).fraction;
    if (tag == "telep_fidelity") return singlet_fraction(rho_s).teleportation_fidelity;
    throw std::invalid_argument("measure_at: unknown measure tag '" + tag + "'");
}

struct OrderingReport {
    std::vector<std::string> violations;
    bool passed = false;
};

/// Checks the robustness orderings of the maximally entangled family across
/// a gamma x p grid. Strengths are sampled strictly inside (0, 1).
inline OrderingReport verify_orderings(const ChannelModel& model, int gamma_points = 51,
                                       int p_points = 21) {
    if (gamma_points < 3 || p_points < 3)
        throw std::invalid_argument("verify_orderings: grids too small");
    const double half_pi = std::numbers::pi / 2.0;
    std::vector<double> gammas(static_cast<std::size_t>(gamma_points));
    for (int i = 0; i < gamma_points; ++i)
        gammas[i] = half_pi * static_cast<double>(i) / (gamma_points - 1);
    const int mid = (gamma_points - 1) / 2;  // pi/4 for odd counts

    OrderingReport report;
    auto violation = [&report](const std::string& msg) { report.violations.push_back(msg); };

    const bool is_ad = model.single_stage() && model.stages[0] == ChannelKind::AmplitudeDamping;
    const EncodingUnitaries id_enc = identity_encoding(2);

    for (int ip = 1; ip + 1 < p_points; ++ip) {
        const double p = static_cast<double>(ip) / (p_points - 1);
        std::vector<double> cvals, nvals;
        cvals.reserve(gammas.size());
        nvals.reserve(gammas.size());
        for (double g : gammas) {
            const PureState st = make_phi_gamma(g);
            cvals.push_back(measure_at(st, id_enc, model, p, "concurrence"));
            nvals.push_back(measure_at(st, id_enc, model, p, "doubled_negativity"));
        }
        constexpr double tol = 1e-10;
        if (is_ad) {
            for (std::size_t i = 0; i < gammas.size(); ++i) {
                if (cvals.back() < cvals[i] - tol)
                    violation("AD concurrence not maximal at gamma=pi/2 (p=" + std::to_string(p) + ")");
                if (cvals.front() > cvals[i] + tol)
                    violation("AD concurrence not minimal at gamma=0 (p=" + std::to_string(p) + ")");
                if (nvals.front() < nvals[i] - tol)
                    violation("AD negativity not maximal at gamma=0 (p=" + std::to_string(p) + ")");
                if (nvals.back() > nvals[i] + tol)
                    violation("AD negativity not minimal at gamma=pi/2 (p=" + std::to_string(p) + ")");
            }
            const double ese0 = measure_at(make_phi_gamma(0.0), id_enc, model, p, "E_SE");
            const double ese1 = measure_at(make_phi_gamma(half_pi), id_enc, model, p, "E_SE");
            if (ese0 < ese1 - tol)
                violation("AD E_SE ordering violated at p=" + std::to_string(p));
        } else {
            if (std::abs(cvals.front() - cvals.back()) > 1e-9)
                violation("D concurrence endpoints differ at p=" + std::to_string(p));
            if (std::abs(nvals.front() - nvals.back()) > 1e-9)
                violation("D negativity endpoints differ at p=" + std::to_string(p));
            for (std::size_t i = 0; i < gammas.size(); ++i) {
                if (cvals.front() < cvals[i] - tol || cvals.back() < cvals[i] - tol)
                    violation("D concurrence not maximal at endpoints (p=" + std::to_string(p) + ")");
                if (cvals[static_cast<std::size_t>(mid)] > cvals[i] + tol)
                    violation("D concurrence not minimal at gamma=pi/4 (p=" + std::to_string(p) + ")");
                if (nvals.front() < nvals[i] - tol || nvals.back() < nvals[i] - tol)
                    violation("D negativity not maximal at endpoints (p=" + std::to_string(p) + ")");
                if (nvals[static_cast<std::size_t>(mid)] > nvals[i] + tol)
                    violation("D negativity not minimal at gamma=pi/4 (p=" + std::to_string(p) + ")");
            }
        }
    }
    report.passed = report.violations.empty();
    return report;
}

struct CrossingResult {
    std::optional<double> first;
    std::vector<double> all;
};

/// Locates strengths where two states' trajectories of one quantifier meet:
/// coarse sign scan over the grid, then bisection to |dp| < 1e-8.
inline CrossingResult find_crossing(const PureState& state_a, const PureState& state_b,
                                    const ChannelModel& model, const std::string& tag,
                                    const std::vector<double>& p_grid) {
    if (p_grid.size() < 2) throw std::invalid_argument("find_crossing: grid too small");
    const EncodingUnitaries enc_a = identity_encoding(state_a.n_qubits());
    const EncodingUnitaries enc_b = identity_encoding(state_b.n_qubits());
    auto delta = [&](double p) {
        return measure_at(state_a, enc_a, model, p, tag) -
               measure_at(state_b, enc_b, model, p, tag);
    };
    std::vector<double> d(p_grid.size());
    for (std::size_t i = 0; i < p_grid.size(); ++i) d[i] = delta(p_grid[i]);

    // Differences below the numerical noise floor count as ties, so equal
    // trajectories yield no crossing and endpoint ties are not roots.
    constexpr double noise = 1e-12;
    auto sgn = [](double v) { return v > noise ? 1 : (v < -noise ? -1 : 0); };

    CrossingResult out;
    std::size_t i = 0;
    while (i + 1 < p_grid.size()) {
        const int si = sgn(d[i]);
        if (si == 0) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < p_grid.size() && sgn(d[j]) == 0) ++j;
        if (j == p_grid.size()) break;
        const int sj = sgn(d[j]);
        if (si * sj < 0) {
            if (j == i + 1) {
                double lo = p_grid[i], hi = p_grid[j];
                double flo = d[i];
                while (hi - lo > 1e-8) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = delta(mid);
                    if (fm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                out.all.push_back(0.5 * (lo + hi));
            } else {
                out.all.push_back(p_grid[i + 1]); // sign flip across a tie plateau
            }
        }
        i = j;
    }
    if (!out.all.empty()) out.first = out.all.front();
    return out;
}

inline CrossingResult find_crossing(const PureState& state_a, const PureState& state_b,
                                    const ChannelModel& model, const std::string& tag) {
    return find_crossing(state_a, state_b, model, tag, default_p_grid());
}

} // namespace qcorr
