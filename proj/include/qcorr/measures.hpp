#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "qcorr/nelder_mead.hpp"
#include "qcorr/qmath.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

inline double log2_clamped(double x) { return std::log2(x); }

/// Binary entropy in bits; h(0) = h(1) = 0.
inline double binary_entropy(double x) {
    if (x < -1e-12 || x > 1.0 + 1e-12)
        throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
    x = std::clamp(x, 0.0, 1.0);
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

inline double entropy_from_eigenvalues(const Eigen::VectorXd& lams) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < lams.size(); ++k) {
        double lam = lams(k);
        if (lam < -kPsdTol)
            throw std::invalid_argument("entropy: spectrum below tolerance, not a density matrix");
        if (lam <= 0.0) continue;
        s -= lam * std::log2(lam);
    }
    return std::max(s, 0.0);
}

/// Von Neumann entropy in bits (log base 2).
inline double entropy(const DensityMatrix& rho) {
    return entropy_from_eigenvalues(eigh(rho.matrix()).eigenvalues);
}

/// I(A:B) = S(A) + S(B) - S(AB) for the bipartition A vs its complement.
inline double mutual_information(const DensityMatrix& rho, const std::set<int>& part_a) {
    const int n = rho.n_qubits();
    if (part_a.empty() || static_cast<int>(part_a.size()) >= n)
        throw std::invalid_argument("mutual_information: bipartition must be non-trivial");
    std::set<int> part_b;
    for (int q = 0; q < n; ++q)
        if (!part_a.count(q)) part_b.insert(q);
    const double sa = entropy(reduced_density(rho, part_a));
    const double sb = entropy(reduced_density(rho, part_b));
    const double sab = entropy(rho);
    return std::max(sa + sb - sab, 0.0);
}

/// Sum of single-qubit marginal entropies minus the global entropy. Equals
/// the mutual information for two qubits.
inline double total_correlations(const DensityMatrix& rho) {
    double acc = -entropy(rho);
    for (int q = 0; q < rho.n_qubits(); ++q) acc += entropy(reduced_density(rho, {q}));
    return std::max(acc, 0.0);
}

/// Spin-flipped overlap spectrum: square roots of the eigenvalues of
/// rho (Y x Y) rho* (Y x Y), descending.
inline std::array<double, 4> concurrence_lambdas(const Mat& rho) {
    static const Mat yy = tensor_product(pauli_y(), pauli_y());
    const Mat r = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Mat> solver(r, false);
    // The square root amplifies eigensolver noise on exact-zero modes from
    // O(eps) to O(sqrt(eps)); zero anything below the noise floor first.
    double top = 0.0;
    for (int k = 0; k < 4; ++k) top = std::max(top, std::abs(solver.eigenvalues()(k)));
    const double noise_floor = 1e-14 * std::max(top, 1.0);
    std::array<double, 4> lam{};
    for (int k = 0; k < 4; ++k) {
        const double ev = solver.eigenvalues()(k).real();
        lam[k] = ev <= noise_floor ? 0.0 : std::sqrt(ev);
    }
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return lam;
}

inline double concurrence_raw(const Mat& rho) {
    const auto lam = concurrence_lambdas(rho);
    return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

/// Two-qubit concurrence.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.n_qubits() != 2) throw std::invalid_argument("concurrence: defined for two qubits");
    return concurrence_raw(rho.matrix());
}

inline double entanglement_of_formation(const DensityMatrix& rho) {
    const double c = concurrence(rho);
    return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(1.0 - c * c, 0.0))));
}

inline double doubled_negativity_raw(const Mat& rho, const std::set<int>& part_a, int n_qubits) {
    const Mat pt = partial_transpose(rho, part_a, n_qubits);
    return std::max(trace_norm(pt) - 1.0, 0.0);
}

/// Negativity (||rho^T_A||_1 - 1)/2; at most 1/2 for two qubits.
inline double negativity(const DensityMatrix& rho, const std::set<int>& part_a) {
    if (part_a.empty() || static_cast<int>(part_a.size()) >= rho.n_qubits())
        throw std::invalid_argument("negativity: bipartition must be non-trivial");
    return 0.5 * doubled_negativity_raw(rho.matrix(), part_a, rho.n_qubits());
}

inline double negativity(const DensityMatrix& rho) { return negativity(rho, {0}); }

/// ||rho^T_A||_1 - 1, twice the halved convention. Both scales are reported
/// side by side in trajectory output.
inline double doubled_negativity(const DensityMatrix& rho, const std::set<int>& part_a) {
    return 2.0 * negativity(rho, part_a);
}

inline double doubled_negativity(const DensityMatrix& rho) { return doubled_negativity(rho, {0}); }

/// Maximally entangled two-qubit state (U x I)|Phi+> for a single-qubit U.
inline Vec maximally_entangled_vector(const Mat& u) {
    Vec amp(4);
    const double r = 1.0 / std::sqrt(2.0);
    amp(0) = u(0, 0) * r;
    amp(1) = u(0, 1) * r;
    amp(2) = u(1, 0) * r;
    amp(3) = u(1, 1) * r;
    return amp;
}

struct SingletFractionResult {
    double fraction = 0.0;
    double teleportation_fidelity = 0.0;
    EulerAngles angles;
};

namespace detail {

inline double entangled_overlap(const Mat& rho, const std::vector<double>& angles) {
    const Vec psi = maximally_entangled_vector(
        euler_unitary(EulerAngles{angles[0], angles[1], angles[2]}));
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

inline std::vector<double> normalize_angles(std::vector<double> a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (double& x : a) {
        x = std::fmod(x, two_pi);
        if (x < 0.0) x += two_pi;
        if (x > two_pi - 1e-12) x = 0.0;
    }
    return a;
}

} // namespace detail

/// Largest overlap with any maximally entangled state, located by a 12^3
/// Euler-angle grid with simplex refinement of the leading starts. Also
/// reports the matching teleportation fidelity (2F + 1)/3.
inline SingletFractionResult singlet_fraction(const DensityMatrix& rho) {
    if (rho.n_qubits() != 2) throw std::invalid_argument("singlet_fraction: defined for two qubits");
    const Mat& m = rho.matrix();

    constexpr int kGrid = 12;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    struct Start {
        std::vector<double> x;
        double value;
    };
    std::vector<Start> starts;
    starts.reserve(kGrid * kGrid * kGrid);
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            for (int k = 0; k < kGrid; ++k) {
                std::vector<double> x = {two_pi * i / kGrid, two_pi * j / kGrid, two_pi * k / kGrid};
                starts.push_back({x, detail::entangled_overlap(m, x)});
            }
    std::stable_sort(starts.begin(), starts.end(),
                     [](const Start& a, const Start& b) { return a.value > b.value; });

    auto neg = [&m](const std::vector<double>& x) { return -detail::entangled_overlap(m, x); };

    constexpr std::size_t kRefine = 24;
    std::vector<Start> candidates;
    for (std::size_t s = 0; s < std::min(kRefine, starts.size()); ++s) {
        SimplexResult r = nelder_mead_minimize(neg, starts[s].x);
        // restart once from the converged point to break simplex collapse
        r = nelder_mead_minimize(neg, r.x);
        candidates.push_back({detail::normalize_angles(r.x), -r.value});
    }
    double best = -1.0;
    for (const Start& c : candidates) best = std::max(best, c.value);
    const Start* pick = nullptr;
    for (const Start& c : candidates) {
        if (c.value < best - 1e-9) continue;
        if (!pick || c.x < pick->x) pick = &c;
    }

    SingletFractionResult out;
    out.fraction = best;
    out.teleportation_fidelity = (2.0 * best + 1.0) / 3.0;
    out.angles = EulerAngles{pick->x[0], pick->x[1], pick->x[2]};
    return out;
}

/// Entropy of the system block of a pure joint state: the entanglement
/// between the system and everything else.
inline double system_env_entanglement(const PureState& joint, const std::set<int>& system) {
    if (std::abs(joint.amplitudes().norm() - 1.0) > 1e-9)
        throw std::invalid_argument("system_env_entanglement: joint state not normalized");
    if (system.empty() || static_cast<int>(system.size()) >= joint.n_qubits())
        throw std::invalid_argument("system_env_entanglement: system must be a proper subset");
    return entropy(reduced_density(joint, system));
}

} // namespace qcorr
