#pragma once

#include <numbers>

#include "qcorr/qmath.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Haar-like random pure state from normalized complex Gaussian amplitudes.
inline PureState random_pure_state(int n_qubits, SplitMix64& rng) {
    Vec amp(Eigen::Index(1) << n_qubits);
    for (Eigen::Index k = 0; k < amp.size(); ++k)
        amp(k) = cplx(rng.next_normal(), rng.next_normal());
    return PureState::normalized(n_qubits, amp);
}

/// Full-rank random density matrix from the Ginibre ensemble.
inline DensityMatrix random_density_matrix(int n_qubits, SplitMix64& rng) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    Mat g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(rng.next_normal(), rng.next_normal());
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::trusted(std::move(rho));
}

inline EulerAngles random_euler_angles(SplitMix64& rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return EulerAngles{two_pi * rng.next_double(), two_pi * rng.next_double(),
                       two_pi * rng.next_double()};
}

inline EncodingUnitaries random_encoding(int n_qubits, SplitMix64& rng) {
    EncodingUnitaries enc;
    for (int q = 0; q < n_qubits; ++q) enc.push_back(random_euler_angles(rng));
    return enc;
}

} // namespace qcorr
