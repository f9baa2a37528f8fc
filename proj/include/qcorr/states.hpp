#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "qcorr/qmath.hpp"

namespace qcorr {

/// Normalized pure state on n qubits. Basis index bit order: qubit 0 is the
/// most significant bit, so |01> of two qubits sits at index 1.
class PureState {
public:
    PureState(int n_qubits, Vec amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
        if (n_ < 1) throw std::invalid_argument("PureState: need at least one qubit");
        if (amp_.size() != (Eigen::Index(1) << n_))
            throw std::invalid_argument("PureState: amplitude count does not match qubit count");
        if (std::abs(amp_.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("PureState: amplitudes not normalized");
    }

    static PureState normalized(int n_qubits, Vec amplitudes) {
        const double nrm = amplitudes.norm();
        if (nrm == 0.0) throw std::invalid_argument("PureState: cannot normalize the zero vector");
        return PureState(n_qubits, amplitudes / nrm);
    }

    int n_qubits() const { return n_; }
    const Vec& amplitudes() const { return amp_; }
    Eigen::Index dim() const { return amp_.size(); }

private:
    int n_;
    Vec amp_;
};

/// Unit-trace positive semidefinite operator. Construction checks
/// Hermiticity (1e-9), trace (1e-10) and spectrum (>= -1e-10).
class DensityMatrix {
public:
    explicit DensityMatrix(Mat m) : m_(std::move(m)) {
        n_ = qubit_count(m_.rows());
        if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityMatrix: matrix not square");
        if (hermiticity_defect(m_) > kHermitianTol)
            throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
        if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
            throw std::invalid_argument("DensityMatrix: trace differs from one");
        Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -kPsdTol)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    }

    /// Wraps a matrix that is already known to satisfy the contract.
    static DensityMatrix trusted(Mat m) { return DensityMatrix(std::move(m), TrustedTag{}); }

    int n_qubits() const { return n_; }
    const Mat& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    struct TrustedTag {};
    DensityMatrix(Mat m, TrustedTag) : m_(std::move(m)) { n_ = qubit_count(m_.rows()); }

    Mat m_;
    int n_ = 0;
};

inline DensityMatrix density(const PureState& s) {
    return DensityMatrix::trusted(s.amplitudes() * s.amplitudes().adjoint());
}

inline DensityMatrix reduced_density(const DensityMatrix& rho, const std::set<int>& keep) {
    return DensityMatrix::trusted(partial_trace(rho.matrix(), keep, rho.n_qubits()));
}

inline DensityMatrix reduced_density(const PureState& s, const std::set<int>& keep) {
    return DensityMatrix::trusted(partial_trace(density(s).matrix(), keep, s.n_qubits()));
}

inline PureState basis_state(int n_qubits, Eigen::Index index) {
    Vec amp = Vec::Zero(Eigen::Index(1) << n_qubits);
    amp(index) = cplx(1.0, 0.0);
    return PureState(n_qubits, amp);
}

/// cos(theta)|01> + sin(theta)|10>.
inline PureState make_psi_theta(double theta) {
    Vec amp = Vec::Zero(4);
    amp(1) = cplx(std::cos(theta), 0.0);
    amp(2) = cplx(std::sin(theta), 0.0);
    return PureState::normalized(2, amp);
}

/// cos(theta)|00> + sin(theta)|11>. Interpolates between a product state and
/// the |00>/|11> Bell pair; both excitations ride the damped levels together.
inline PureState make_phi_theta(double theta) {
    Vec amp = Vec::Zero(4);
    amp(0) = cplx(std::cos(theta), 0.0);
    amp(3) = cplx(std::sin(theta), 0.0);
    return PureState::normalized(2, amp);
}

/// One-parameter family of maximally entangled states
///   (|0>|psi0> + |1>|psi1>)/sqrt(2),
/// psi0 = cos(g)|0> + i sin(g)|1>, psi1 = i sin(g)|0> + cos(g)|1>.
/// Runs from the |00>/|11> Bell pair at g = 0 to the |01>/|10> pair at
/// g = pi/2; g = pi/4 is the two-qubit graph state up to a local phase on
/// each qubit, which commutes with both noise channels.
inline PureState make_phi_gamma(double gamma) {
    const double c = std::cos(gamma);
    const double s = std::sin(gamma);
    Vec amp(4);
    amp(0) = cplx(c, 0.0) / std::sqrt(2.0);
    amp(1) = cplx(0.0, s) / std::sqrt(2.0);
    amp(2) = cplx(0.0, s) / std::sqrt(2.0);
    amp(3) = cplx(c, 0.0) / std::sqrt(2.0);
    return PureState::normalized(2, amp);
}

inline PureState bell_phi_plus() { return make_phi_gamma(0.0); }

/// (|01> + |10>)/sqrt(2).
inline PureState bell_psi_plus() {
    Vec amp = Vec::Zero(4);
    amp(1) = cplx(1.0, 0.0);
    amp(2) = cplx(1.0, 0.0);
    return PureState::normalized(2, amp);
}

/// (|00> + |01> + |10> - |11>)/2.
inline PureState graph_state_2q() {
    Vec amp(4);
    amp << cplx(0.5, 0), cplx(0.5, 0), cplx(0.5, 0), cplx(-0.5, 0);
    return PureState(2, amp);
}

inline PureState ghz_state(int n_qubits) {
    if (n_qubits < 2) throw std::invalid_argument("ghz_state: need at least two qubits");
    Vec amp = Vec::Zero(Eigen::Index(1) << n_qubits);
    const double r = 1.0 / std::sqrt(2.0);
    amp(0) = cplx(r, 0.0);
    amp(amp.size() - 1) = cplx(r, 0.0);
    return PureState(n_qubits, amp);
}

struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
};

/// R_z(alpha) R_y(beta) R_z(delta), global phase dropped.
inline Mat euler_unitary(const EulerAngles& a) {
    const cplx i(0.0, 1.0);
    Mat rz1(2, 2), ry(2, 2), rz2(2, 2);
    rz1 << std::exp(-i * (a.alpha / 2.0)), cplx(0, 0), cplx(0, 0), std::exp(i * (a.alpha / 2.0));
    ry << cplx(std::cos(a.beta / 2.0), 0), cplx(-std::sin(a.beta / 2.0), 0),
          cplx(std::sin(a.beta / 2.0), 0), cplx(std::cos(a.beta / 2.0), 0);
    rz2 << std::exp(-i * (a.delta / 2.0)), cplx(0, 0), cplx(0, 0), std::exp(i * (a.delta / 2.0));
    return rz1 * ry * rz2;
}

/// One local unitary per qubit, stored as Euler angles.
using EncodingUnitaries = std::vector<EulerAngles>;

inline EncodingUnitaries identity_encoding(int n_qubits) {
    return EncodingUnitaries(static_cast<std::size_t>(n_qubits));
}

inline Mat encoding_matrix(const EncodingUnitaries& enc) {
    if (enc.empty()) throw std::invalid_argument("encoding_matrix: no qubits");
    Mat out = euler_unitary(enc[0]);
    for (std::size_t q = 1; q < enc.size(); ++q)
        out = tensor_product(out, euler_unitary(enc[q]));
    return out;
}

inline DensityMatrix apply_encoding(const DensityMatrix& rho, const EncodingUnitaries& enc) {
    if (static_cast<int>(enc.size()) != rho.n_qubits())
        throw std::invalid_argument("apply_encoding: encoding size does not match qubit count");
    const Mat u = encoding_matrix(enc);
    return DensityMatrix::trusted(u * rho.matrix() * u.adjoint());
}

inline PureState apply_encoding(const PureState& s, const EncodingUnitaries& enc) {
    if (static_cast<int>(enc.size()) != s.n_qubits())
        throw std::invalid_argument("apply_encoding: encoding size does not match qubit count");
    return PureState::normalized(s.n_qubits(), encoding_matrix(enc) * s.amplitudes());
}

/// Pure z-phase encoding, one angle per qubit. Commutes with both noise
/// channels, so it never changes any correlation quantifier.
inline EncodingUnitaries phase_encoding(const std::vector<double>& phis) {
    EncodingUnitaries enc;
    for (double phi : phis) enc.push_back(EulerAngles{phi, 0.0, 0.0});
    return enc;
}

} // namespace qcorr
