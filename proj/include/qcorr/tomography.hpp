#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/circuits.hpp"
#include "qcorr/qmath.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Per-qubit classical readout confusion. Column t holds the distribution of
/// the recorded bit given true bit t, so every column sums to one.
struct ReadoutModel {
    std::vector<Eigen::Matrix2d> confusion;

    int n_qubits() const { return static_cast<int>(confusion.size()); }

    static ReadoutModel ideal(int n) {
        ReadoutModel m;
        m.confusion.assign(n, Eigen::Matrix2d::Identity());
        return m;
    }

    static ReadoutModel uniform_flip(int n, double flip) {
        if (flip < 0.0 || flip > 0.5)
            throw std::invalid_argument("ReadoutModel: flip rate must lie in [0, 0.5]");
        Eigen::Matrix2d c;
        c << 1.0 - flip, flip, flip, 1.0 - flip;
        ReadoutModel m;
        m.confusion.assign(n, c);
        return m;
    }

    ReadoutModel prefix(int n) const {
        if (n < 0 || n > n_qubits())
            throw std::invalid_argument("ReadoutModel: prefix size out of range");
        ReadoutModel m;
        m.confusion.assign(confusion.begin(), confusion.begin() + n);
        return m;
    }

    void validate() const {
        for (const auto& c : confusion) {
            for (int t = 0; t < 2; ++t) {
                if (c(0, t) < -1e-12 || c(1, t) < -1e-12 ||
                    std::abs(c(0, t) + c(1, t) - 1.0) > 1e-9)
                    throw std::invalid_argument("ReadoutModel: columns must be stochastic");
            }
        }
    }
};

/// All length-n measurement settings over {X, Y, Z}, lexicographic, qubit 0
/// as the most significant digit. Index 0 is "XX...X".
inline std::vector<std::string> pauli_settings(int n) {
    if (n < 1 || n > 8) throw std::invalid_argument("pauli_settings: qubit count out of range");
    static const char axes[3] = {'X', 'Y', 'Z'};
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    std::vector<std::string> out;
    out.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        std::string s(n, 'X');
        std::size_t rem = k;
        for (int q = n - 1; q >= 0; --q) {
            s[q] = axes[rem % 3];
            rem /= 3;
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace detail {

/// Gates mapping the given Pauli eigenbasis onto the computational basis.
inline void append_basis_change(std::vector<Gate>& gates, char axis, int qubit) {
    switch (axis) {
        case 'X':
            gates.push_back(Gate::h(qubit));
            return;
        case 'Y':
            gates.push_back(Gate::sdg(qubit));
            gates.push_back(Gate::h(qubit));
            return;
        case 'Z':
            return;
        default:
            throw std::invalid_argument("append_basis_change: unknown axis");
    }
}

inline std::string index_to_bitstring(std::size_t index, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if ((index >> (n - 1 - q)) & 1) s[q] = '1';
    return s;
}

} // namespace detail

/// Measures `shots` samples of the state in the basis given by `setting`
/// (applied to the leading qubits; trailing qubits are read in Z), passing
/// each true bit through the readout confusion. Keys are bitstrings with
/// qubit 0 first.
inline std::map<std::string, std::int64_t> sample_counts(const PureState& state,
                                                         const std::string& setting,
                                                         std::int64_t shots,
                                                         const ReadoutModel& readout,
                                                         std::uint64_t seed) {
    const int n = state.n_qubits();
    if (static_cast<int>(setting.size()) > n)
        throw std::invalid_argument("sample_counts: setting longer than register");
    if (readout.n_qubits() != n)
        throw std::invalid_argument("sample_counts: readout size must match register");
    if (shots < 1) throw std::invalid_argument("sample_counts: shots must be positive");
    readout.validate();

    Vec amp = state.amplitudes();
    std::vector<Gate> changes;
    for (std::size_t q = 0; q < setting.size(); ++q)
        detail::append_basis_change(changes, setting[q], static_cast<int>(q));
    for (const Gate& g : changes)
        apply_single_qubit_gate(amp, n, g.target, detail::single_qubit_matrix(g));

    const std::size_t dim = static_cast<std::size_t>(amp.size());
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        acc += std::norm(amp(static_cast<Eigen::Index>(i)));
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    SplitMix64 rng(seed);
    std::map<std::string, std::int64_t> counts;
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.next_double();
        const std::size_t outcome = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        std::size_t recorded = 0;
        for (int q = 0; q < n; ++q) {
            const int t = static_cast<int>((outcome >> (n - 1 - q)) & 1);
            const double flip = rng.next_double();
            const int m = (flip < readout.confusion[static_cast<std::size_t>(q)](1 - t, t))
                              ? (1 - t)
                              : t;
            recorded = (recorded << 1) | static_cast<std::size_t>(m);
        }
        ++counts[detail::index_to_bitstring(recorded, n)];
    }
    return counts;
}

/// Sums counts over the discarded qubits, keeping the listed ones in order.
inline std::map<std::string, std::int64_t> marginalize_counts(
    const std::map<std::string, std::int64_t>& counts, int n_total,
    const std::vector<int>& keep) {
    for (int q : keep) check_qubit_index(q, n_total, "marginalize_counts");
    std::map<std::string, std::int64_t> out;
    for (const auto& [bits, c] : counts) {
        if (static_cast<int>(bits.size()) != n_total)
            throw std::invalid_argument("marginalize_counts: key length mismatch");
        std::string key;
        key.reserve(keep.size());
        for (int q : keep) key.push_back(bits[static_cast<std::size_t>(q)]);
        out[key] += c;
    }
    return out;
}

/// Estimates per-qubit confusion matrices by preparing every computational
/// basis state and recording the per-qubit flip statistics.
inline ReadoutModel calibrate(const ReadoutModel& truth, std::int64_t shots,
                              std::uint64_t seed) {
    const int n = truth.n_qubits();
    if (n < 1 || n > 8) throw std::invalid_argument("calibrate: qubit count out of range");
    std::vector<Eigen::Matrix2d> tallies(static_cast<std::size_t>(n),
                                         Eigen::Matrix2d::Zero());
    const std::size_t preps = std::size_t{1} << n;
    for (std::size_t b = 0; b < preps; ++b) {
        const PureState prep = basis_state(n, static_cast<Eigen::Index>(b));
        const auto counts =
            sample_counts(prep, std::string(static_cast<std::size_t>(n), 'Z'), shots, truth,
                          derive_stream_seed(seed, b));
        for (const auto& [bits, c] : counts) {
            for (int q = 0; q < n; ++q) {
                const int t = static_cast<int>((b >> (n - 1 - q)) & 1);
                const int m = bits[static_cast<std::size_t>(q)] == '1' ? 1 : 0;
                tallies[static_cast<std::size_t>(q)](m, t) += static_cast<double>(c);
            }
        }
    }
    ReadoutModel estimated;
    estimated.confusion.reserve(static_cast<std::size_t>(n));
    for (const auto& tally : tallies) {
        Eigen::Matrix2d c;
        for (int t = 0; t < 2; ++t) {
            const double total = tally(0, t) + tally(1, t);
            if (total <= 0.0) throw std::runtime_error("calibrate: empty column tally");
            c(0, t) = tally(0, t) / total;
            c(1, t) = tally(1, t) / total;
        }
        estimated.confusion.push_back(c);
    }
    return estimated;
}

/// Raw data of one tomography pass: per-setting counts over the system
/// qubits (environment already summed out). `seed` is the stream the
/// readout sampling was derived from.
struct TomographyRecord {
    int n_qubits = 0;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> settings;
    std::vector<std::map<std::string, std::int64_t>> counts;
};

/// Runs every Pauli setting on the circuit's final state. Basis changes act
/// on the first `n_system` qubits; the rest of the register is read in Z and
/// summed out. Setting k draws from the stream derived as (seed, k).
inline TomographyRecord run_tomography(const Circuit& circuit, int n_system,
                                       std::int64_t shots, const ReadoutModel& readout,
                                       std::uint64_t seed) {
    if (n_system < 1 || n_system > circuit.n_qubits)
        throw std::invalid_argument("run_tomography: system size out of range");
    const PureState final_state = simulate(circuit);
    TomographyRecord record;
    record.n_qubits = n_system;
    record.shots = shots;
    record.seed = seed;
    record.settings = pauli_settings(n_system);
    std::vector<int> keep(static_cast<std::size_t>(n_system));
    for (int q = 0; q < n_system; ++q) keep[static_cast<std::size_t>(q)] = q;
    for (std::size_t k = 0; k < record.settings.size(); ++k) {
        const auto full = sample_counts(final_state, record.settings[k], shots, readout,
                                        derive_stream_seed(seed, k));
        record.counts.push_back(marginalize_counts(full, circuit.n_qubits, keep));
    }
    return record;
}

namespace detail {

inline std::vector<double> counts_to_frequencies(
    const std::map<std::string, std::int64_t>& counts, int n) {
    std::vector<double> freq(std::size_t{1} << n, 0.0);
    std::int64_t total = 0;
    for (const auto& [bits, c] : counts) {
        if (static_cast<int>(bits.size()) != n)
            throw std::invalid_argument("counts_to_frequencies: key length mismatch");
        std::size_t index = 0;
        for (char b : bits) index = (index << 1) | (b == '1' ? 1u : 0u);
        freq[index] += static_cast<double>(c);
        total += c;
    }
    if (total <= 0) throw std::invalid_argument("counts_to_frequencies: empty counts");
    for (double& f : freq) f /= static_cast<double>(total);
    return freq;
}

} // namespace detail

/// Applies the inverse of the tensored confusion matrices to an outcome
/// frequency vector, then clips negatives and renormalizes.
inline std::vector<double> mitigate_frequencies(const std::vector<double>& freq,
                                                const ReadoutModel& model) {
    const int n = model.n_qubits();
    if (freq.size() != (std::size_t{1} << n))
        throw std::invalid_argument("mitigate_frequencies: size mismatch");
    model.validate();
    Eigen::MatrixXd inverse = Eigen::MatrixXd::Ones(1, 1);
    for (const auto& c : model.confusion) {
        const Eigen::Matrix2d ci = c.inverse();
        Eigen::MatrixXd next(inverse.rows() * 2, inverse.cols() * 2);
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s)
                next.block(r * inverse.rows(), s * inverse.cols(), inverse.rows(),
                           inverse.cols()) = ci(r, s) * inverse;
        inverse = std::move(next);
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(freq.size()));
    for (std::size_t i = 0; i < freq.size(); ++i) v(static_cast<Eigen::Index>(i)) = freq[i];
    Eigen::VectorXd w = inverse * v;
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < 0.0) w(i) = 0.0;
        total += w(i);
    }
    if (total <= 0.0) throw std::runtime_error("mitigate_frequencies: degenerate distribution");
    std::vector<double> out(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i)
        out[i] = w(static_cast<Eigen::Index>(i)) / total;
    return out;
}

namespace detail {

/// Expectation of the Pauli word restricted to `support` under outcome
/// frequencies of one compatible setting.
inline double support_expectation(const std::vector<double>& freq, std::size_t support,
                                  int n) {
    double e = 0.0;
    for (std::size_t outcome = 0; outcome < freq.size(); ++outcome) {
        const int parity = std::popcount(outcome & support) & 1;
        e += (parity ? -1.0 : 1.0) * freq[outcome];
    }
    (void)n;
    return e;
}

} // namespace detail

/// Averaged Pauli expectations from per-setting outcome frequencies. Word
/// index uses two bits per qubit, qubit 0 most significant, digits
/// I=0, X=1, Y=2, Z=3. The identity word is pinned to one.
inline std::vector<double> pauli_expectations(const std::vector<std::string>& settings,
                                              const std::vector<std::vector<double>>& freqs,
                                              int n) {
    if (settings.size() != freqs.size())
        throw std::invalid_argument("pauli_expectations: settings/frequencies mismatch");
    std::size_t words = 1;
    for (int i = 0; i < n; ++i) words *= 4;
    std::vector<double> expectations(words, 0.0);
    expectations[0] = 1.0;
    for (std::size_t w = 1; w < words; ++w) {
        std::string word(static_cast<std::size_t>(n), 'I');
        std::size_t rem = w;
        for (int q = n - 1; q >= 0; --q) {
            word[static_cast<std::size_t>(q)] = "IXYZ"[rem % 4];
            rem /= 4;
        }
        std::size_t support = 0;
        for (int q = 0; q < n; ++q)
            if (word[static_cast<std::size_t>(q)] != 'I')
                support |= std::size_t{1} << (n - 1 - q);
        double sum = 0.0;
        int hits = 0;
        for (std::size_t k = 0; k < settings.size(); ++k) {
            bool compatible = true;
            for (int q = 0; q < n && compatible; ++q) {
                const char c = word[static_cast<std::size_t>(q)];
                if (c != 'I' && settings[k][static_cast<std::size_t>(q)] != c)
                    compatible = false;
            }
            if (!compatible) continue;
            sum += detail::support_expectation(freqs[k], support, n);
            ++hits;
        }
        if (hits == 0) throw std::invalid_argument("pauli_expectations: word has no setting");
        expectations[w] = sum / hits;
    }
    return expectations;
}

/// Linear-inversion estimate (1/2^n) * sum_w E(w) * P_w.
inline Mat linear_inversion(const std::vector<double>& expectations, int n) {
    const std::size_t dim = std::size_t{1} << n;
    std::size_t words = 1;
    for (int i = 0; i < n; ++i) words *= 4;
    if (expectations.size() != words)
        throw std::invalid_argument("linear_inversion: expectation count mismatch");
    const Mat paulis[4] = {Mat::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};
    Mat rho = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t w = 0; w < words; ++w) {
        Mat word = Mat::Identity(1, 1);
        std::size_t digits = w;
        std::vector<int> digit(static_cast<std::size_t>(n), 0);
        for (int q = n - 1; q >= 0; --q) {
            digit[static_cast<std::size_t>(q)] = static_cast<int>(digits % 4);
            digits /= 4;
        }
        for (int q = 0; q < n; ++q)
            word = tensor_product(word, paulis[digit[static_cast<std::size_t>(q)]]);
        rho += expectations[w] * word;
    }
    return rho / static_cast<double>(dim);
}

/// Nearest density matrix in the sense of eigenvalue clipping with uniform
/// redistribution of the clipped (negative) mass.
inline Mat psd_project(const Mat& estimate) {
    Mat h = 0.5 * (estimate + estimate.adjoint());
    const double tr = h.trace().real();
    if (std::abs(tr) < 1e-12) throw std::invalid_argument("psd_project: traceless estimate");
    h /= tr;
    HermitianSpectrum spec = eigh(h); // input was symmetrized above
    const Eigen::Index d = spec.eigenvalues.size();
    std::vector<double> lambda(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i)
        lambda[static_cast<std::size_t>(i)] = spec.eigenvalues(d - 1 - i); // ascending
    double carry = 0.0;
    std::size_t i = 0;
    while (i < lambda.size()) {
        const double share = carry / static_cast<double>(lambda.size() - i);
        if (lambda[i] + share < 0.0) {
            carry += lambda[i];
            lambda[i] = 0.0;
            ++i;
        } else {
            break;
        }
    }
    const double share = i < lambda.size() ? carry / static_cast<double>(lambda.size() - i) : 0.0;
    for (std::size_t j = i; j < lambda.size(); ++j) lambda[j] += share;
    Mat out = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double lam = lambda[static_cast<std::size_t>(d - 1 - k)];
        if (lam <= 0.0) continue;
        out += lam * spec.eigenvectors.col(k) * spec.eigenvectors.col(k).adjoint();
    }
    return 0.5 * (out + out.adjoint());
}

/// Full reconstruction pipeline: frequencies, optional readout mitigation,
/// Pauli expectations, linear inversion, projection onto density matrices.
inline DensityMatrix reconstruct(const TomographyRecord& record,
                                 const std::optional<ReadoutModel>& mitigation = {}) {
    const int n = record.n_qubits;
    if (record.settings.size() != record.counts.size())
        throw std::invalid_argument("reconstruct: settings/counts mismatch");
    if (mitigation && mitigation->n_qubits() != n)
        throw std::invalid_argument("reconstruct: mitigation size mismatch");
    std::vector<std::vector<double>> freqs;
    freqs.reserve(record.counts.size());
    for (const auto& counts : record.counts) {
        auto f = detail::counts_to_frequencies(counts, n);
        if (mitigation) f = mitigate_frequencies(f, *mitigation);
        freqs.push_back(std::move(f));
    }
    const auto expectations = pauli_expectations(record.settings, freqs, n);
    const Mat projected = psd_project(linear_inversion(expectations, n));
    return DensityMatrix::trusted(projected);
}

/// Repeats the full sampling + reconstruction pipeline. Repetition r draws
/// from the stream derived as (seed, r); downstream consumers average the
/// measures computed from each reconstruction, not the matrices themselves.
inline std::vector<DensityMatrix> averaged_tomography(
    const Circuit& circuit, int n_system, int repetitions, std::int64_t shots,
    const ReadoutModel& readout, std::uint64_t seed,
    const std::optional<ReadoutModel>& mitigation = {}) {
    if (repetitions < 1)
        throw std::invalid_argument("averaged_tomography: repetitions must be positive");
    std::vector<DensityMatrix> out;
    out.reserve(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) {
        const TomographyRecord record =
            run_tomography(circuit, n_system, shots, readout,
                           derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        out.push_back(reconstruct(record, mitigation));
    }
    return out;
}

/// Uhlmann fidelity between density matrices.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    const Mat sa = matrix_sqrt_psd(a.matrix());
    const HermitianSpectrum spec = eigh(sa * b.matrix() * sa);
    double root_sum = 0.0;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
        root_sum += std::sqrt(std::max(0.0, spec.eigenvalues(i)));
    return std::min(1.0, root_sum * root_sum);
}

} // namespace qcorr
