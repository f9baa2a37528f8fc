#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/qmath.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

enum class ChannelKind { Dephasing, AmplitudeDamping };

inline const char* channel_kind_name(ChannelKind k) {
    return k == ChannelKind::Dephasing ? "dephasing" : "amplitude_damping";
}

/// Single-qubit channel in Kraus form. A concatenation keeps one strength
/// per stage; stage order is application order.
struct KrausChannel {
    std::vector<Mat> ops;
    std::vector<ChannelKind> stage_kinds;
    std::vector<double> stage_p;

    bool single_stage() const { return stage_kinds.size() == 1; }
};

inline void check_probability(double p, const char* who) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(who) + ": p must lie in [0, 1]");
}

/// Phase noise of strength p. Off-diagonal elements scale by (1 - p); p = 1
/// removes all coherence.
inline KrausChannel dephasing(double p) {
    check_probability(p, "dephasing");
    KrausChannel c;
    Mat k0 = std::sqrt(1.0 - p / 2.0) * Mat::Identity(2, 2);
    Mat k1 = std::sqrt(p / 2.0) * pauli_z();
    c.ops = {k0, k1};
    c.stage_kinds = {ChannelKind::Dephasing};
    c.stage_p = {p};
    return c;
}

/// Energy loss of strength p: |1> decays toward |0>.
inline KrausChannel amplitude_damping(double p) {
    check_probability(p, "amplitude_damping");
    KrausChannel c;
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
    k0(0, 0) = cplx(1.0, 0.0);
    k0(1, 1) = cplx(std::sqrt(1.0 - p), 0.0);
    k1(0, 1) = cplx(std::sqrt(p), 0.0);
    c.ops = {k0, k1};
    c.stage_kinds = {ChannelKind::AmplitudeDamping};
    c.stage_p = {p};
    return c;
}

inline KrausChannel make_channel(ChannelKind kind, double p) {
    return kind == ChannelKind::Dephasing ? dephasing(p) : amplitude_damping(p);
}

/// Composition with `a` acting first. Kraus ops multiply pairwise; op count
/// is the product of the factable counts.
inline KrausChannel concatenate(const KrausChannel& a, const KrausChannel& b) {
    KrausChannel c;
    for (const Mat& kb : b.ops)
        for (const Mat& ka : a.ops) c.ops.push_back(kb * ka);
    c.stage_kinds = a.stage_kinds;
    c.stage_kinds.insert(c.stage_kinds.end(), b.stage_kinds.begin(), b.stage_kinds.end());
    c.stage_p = a.stage_p;
    c.stage_p.insert(c.stage_p.end(), b.stage_p.begin(), b.stage_p.end());
    return c;
}

/// Sum of K^dagger K over all Kraus operators; identity for a trace
/// preserving channel.
inline Mat kraus_completeness(const KrausChannel& c) {
    Mat acc = Mat::Zero(2, 2);
    for (const Mat& k : c.ops) acc += k.adjoint() * k;
    return acc;
}

/// Applies the channel to one qubit of an n-qubit density operator.
inline Mat apply_channel_raw(const Mat& rho, const KrausChannel& c, int qubit, int n_qubits) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const Mat& k : c.ops) {
        const Mat e = embed_single_qubit(k, qubit, n_qubits);
        out += e * rho * e.adjoint();
    }
    return out;
}

/// Independent local noise: channels[i] acts on qubit i.
inline DensityMatrix apply_product_channel(const DensityMatrix& rho,
                                           const std::vector<KrausChannel>& channels) {
    if (static_cast<int>(channels.size()) != rho.n_qubits())
        throw std::invalid_argument("apply_product_channel: channel count does not match qubit count");
    Mat m = rho.matrix();
    for (int q = 0; q < rho.n_qubits(); ++q)
        m = apply_channel_raw(m, channels[q], q, rho.n_qubits());
    return DensityMatrix::trusted(std::move(m));
}

inline std::vector<KrausChannel> replicate(const KrausChannel& c, int n_qubits) {
    return std::vector<KrausChannel>(static_cast<std::size_t>(n_qubits), c);
}

/// Unitary on a system+environment qubit pair realizing a two-operator
/// channel with the environment starting in |0>. Pair basis index is
/// (system bit)*2 + environment bit.
struct DilationUnitary {
    Mat u;  // 4x4
};

/// Builds the dilation column-by-column: columns for environment |0> come
/// from the Kraus operators, the remaining columns are completed by
/// Gram-Schmidt over the standard basis in index order.
inline DilationUnitary dilation(const KrausChannel& c) {
    if (c.ops.size() > 2)
        throw std::invalid_argument("dilation: channel has more than two Kraus operators");
    Mat v = Mat::Zero(4, 4);
    std::vector<bool> filled(4, false);
    for (int s = 0; s < 2; ++s) {
        const int col = s * 2;
        for (std::size_t j = 0; j < c.ops.size(); ++j)
            for (int sp = 0; sp < 2; ++sp) v(sp * 2 + static_cast<int>(j), col) = c.ops[j](sp, s);
        filled[col] = true;
    }
    for (int col = 0; col < 4; ++col) {
        if (filled[col]) continue;
        for (int cand = 0; cand < 4; ++cand) {
            Vec r = Vec::Zero(4);
            r(cand) = cplx(1.0, 0.0);
            for (int other = 0; other < 4; ++other) {
                if (!filled[other]) continue;
                r -= (v.col(other).adjoint() * r)(0, 0) * v.col(other);
            }
            const double nrm = r.norm();
            if (nrm > 1e-7) {
                v.col(col) = r / nrm;
                filled[col] = true;
                break;
            }
        }
        if (!filled[col]) throw std::runtime_error("dilation: unitary completion failed");
    }
    const double defect = (v.adjoint() * v - Mat::Identity(4, 4)).cwiseAbs().maxCoeff();
    if (defect > 1e-12) throw std::runtime_error("dilation: completed matrix is not unitary");
    return DilationUnitary{std::move(v)};
}

/// Attaches one |0> environment qubit per system qubit and applies each
/// channel's dilation to its pair. Register order: S_0..S_{N-1} then
/// E_0..E_{N-1}, with E_i coupled to S_i.
inline PureState evolve_joint(const PureState& initial, const std::vector<KrausChannel>& channels) {
    const int n = initial.n_qubits();
    if (static_cast<int>(channels.size()) != n)
        throw std::invalid_argument("evolve_joint: channel count does not match qubit count");
    std::vector<DilationUnitary> vs;
    vs.reserve(channels.size());
    for (const KrausChannel& c : channels) vs.push_back(dilation(c));

    const int total = 2 * n;
    Vec amp = Vec::Zero(Eigen::Index(1) << total);
    const Eigen::Index env_dim = Eigen::Index(1) << n;
    for (Eigen::Index s = 0; s < initial.dim(); ++s) amp(s * env_dim) = initial.amplitudes()(s);

    for (int q = 0; q < n; ++q) apply_two_qubit_gate(amp, total, q, n + q, vs[q].u);
    return PureState(total, std::move(amp));
}

} // namespace qcorr
