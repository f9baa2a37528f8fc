#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

namespace qcorr {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Shared numerical contracts. Hermiticity checks use max-abs deviation,
// spectra may dip below zero by at most kPsdTol before being clipped.
inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kReconTol = 1e-9;

/// Number of qubits for a dimension that must be a power of two.
inline int qubit_count(Eigen::Index dim) {
    if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
    int n = 0;
    Eigen::Index d = dim;
    while (d > 1) {
        if (d % 2 != 0) throw std::invalid_argument("dimension is not a power of two");
        d /= 2;
        ++n;
    }
    return n;
}

/// Bit of `index` addressing `qubit`, with qubit 0 as the most significant
/// bit of the basis index.
inline int qubit_bit(Eigen::Index index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1);
}

/// Kronecker product with `a` as the slower-varying factor.
inline Mat tensor_product(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec tensor_product_vec(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline void check_square_for_qubits(const Mat& m, int n_qubits, const char* who) {
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    if (m.rows() != dim || m.cols() != dim)
        throw std::invalid_argument(std::string(who) + ": matrix dimension does not match qubit count");
}

/// Traces out every qubit not listed in `keep`. Kept qubits preserve their
/// relative order. `keep` must be a non-empty strict subset unless it covers
/// all qubits, in which case the input is returned unchanged.
inline Mat partial_trace(const Mat& m, const std::set<int>& keep, int n_qubits) {
    check_square_for_qubits(m, n_qubits, "partial_trace");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    for (int q : keep)
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("partial_trace: qubit index out of range");

    std::vector<int> kept(keep.begin(), keep.end());
    std::vector<int> traced;
    for (int q = 0; q < n_qubits; ++q)
        if (!keep.count(q)) traced.push_back(q);
    if (traced.empty()) return m;

    const int nk = static_cast<int>(kept.size());
    const int nt = static_cast<int>(traced.size());
    const Eigen::Index dk = Eigen::Index(1) << nk;
    const Eigen::Index dt = Eigen::Index(1) << nt;

    auto full_index = [&](Eigen::Index k_bits, Eigen::Index t_bits) {
        Eigen::Index idx = 0;
        for (int a = 0; a < nk; ++a)
            if ((k_bits >> (nk - 1 - a)) & 1) idx |= Eigen::Index(1) << (n_qubits - 1 - kept[a]);
        for (int a = 0; a < nt; ++a)
            if ((t_bits >> (nt - 1 - a)) & 1) idx |= Eigen::Index(1) << (n_qubits - 1 - traced[a]);
        return idx;
    };

    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j) {
            cplx acc(0.0, 0.0);
            for (Eigen::Index t = 0; t < dt; ++t)
                acc += m(full_index(i, t), full_index(j, t));
            out(i, j) = acc;
        }
    return out;
}

/// Transposes the listed qubits in place of the full transpose.
inline Mat partial_transpose(const Mat& m, const std::set<int>& subsystem, int n_qubits) {
    check_square_for_qubits(m, n_qubits, "partial_transpose");
    for (int q : subsystem)
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("partial_transpose: qubit index out of range");

    Eigen::Index mask = 0;
    for (int q : subsystem) mask |= Eigen::Index(1) << (n_qubits - 1 - q);

    const Eigen::Index dim = m.rows();
    Mat out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            const Eigen::Index ri = (i & ~mask) | (j & mask);
            const Eigen::Index rj = (j & ~mask) | (i & mask);
            out(i, j) = m(ri, rj);
        }
    return out;
}

struct HermitianSpectrum {
    Eigen::VectorXd eigenvalues;  // descending
    Mat eigenvectors;             // column k pairs with eigenvalues(k)
};

inline double hermiticity_defect(const Mat& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigendecomposition of a Hermitian matrix. The input may deviate from exact
/// Hermiticity by at most kHermitianTol; it is symmetrized before solving.
inline HermitianSpectrum eigh(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigh: matrix not square");
    if (hermiticity_defect(m) > kHermitianTol)
        throw std::invalid_argument("eigh: matrix non-Hermitian beyond tolerance");
    Mat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigensolver failed to converge");
    const Eigen::Index d = m.rows();
    HermitianSpectrum out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(d - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(d - 1 - k);
    }
    return out;
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// [-kPsdTol, 0) clip to zero; anything lower is rejected.
inline Mat matrix_sqrt_psd(const Mat& m) {
    HermitianSpectrum s = eigh(m);
    const Eigen::Index d = m.rows();
    Eigen::VectorXd roots(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        double lam = s.eigenvalues(k);
        if (lam < -kPsdTol)
            throw std::invalid_argument("matrix_sqrt_psd: eigenvalue below -1e-10");
        if (lam < 0.0) lam = 0.0;
        roots(k) = std::sqrt(lam);
    }
    return s.eigenvectors * roots.asDiagonal() * s.eigenvectors.adjoint();
}

/// Trace norm (sum of singular values).
inline double trace_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

inline Mat pauli_x() {
    Mat m(2, 2);
    m << cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0);
    return m;
}

inline Mat pauli_y() {
    Mat m(2, 2);
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}

inline Mat pauli_z() {
    Mat m(2, 2);
    m << cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0);
    return m;
}

/// In-place single-qubit gate on a statevector.
inline void apply_single_qubit_gate(Vec& amp, int n_qubits, int qubit, const Mat& u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("apply_single_qubit_gate: gate must be 2x2");
    if (qubit < 0 || qubit >= n_qubits)
        throw std::invalid_argument("apply_single_qubit_gate: qubit index out of range");
    const Eigen::Index stride = Eigen::Index(1) << (n_qubits - 1 - qubit);
    const Eigen::Index dim = amp.size();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (base & stride) continue;
        const cplx a0 = amp(base);
        const cplx a1 = amp(base | stride);
        amp(base) = u(0, 0) * a0 + u(0, 1) * a1;
        amp(base | stride) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

/// In-place two-qubit gate. Gate row index is (bit of q_first)*2 + bit of
/// q_second.
inline void apply_two_qubit_gate(Vec& amp, int n_qubits, int q_first, int q_second, const Mat& u) {
    if (u.rows() != 4 || u.cols() != 4)
        throw std::invalid_argument("apply_two_qubit_gate: gate must be 4x4");
    if (q_first == q_second)
        throw std::invalid_argument("apply_two_qubit_gate: qubits must differ");
    if (q_first < 0 || q_first >= n_qubits || q_second < 0 || q_second >= n_qubits)
        throw std::invalid_argument("apply_two_qubit_gate: qubit index out of range");
    const Eigen::Index sa = Eigen::Index(1) << (n_qubits - 1 - q_first);
    const Eigen::Index sb = Eigen::Index(1) << (n_qubits - 1 - q_second);
    const Eigen::Index dim = amp.size();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if ((base & sa) || (base & sb)) continue;
        cplx in[4] = {amp(base), amp(base | sb), amp(base | sa), amp(base | sa | sb)};
        for (int r = 0; r < 4; ++r) {
            cplx acc(0, 0);
            for (int c = 0; c < 4; ++c) acc += u(r, c) * in[c];
            const Eigen::Index idx = base | (r & 2 ? sa : 0) | (r & 1 ? sb : 0);
            amp(idx) = acc;
        }
    }
}

/// In-place controlled single-qubit gate.
inline void apply_controlled_gate(Vec& amp, int n_qubits, int control, int target, const Mat& u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("apply_controlled_gate: gate must be 2x2");
    if (control == target)
        throw std::invalid_argument("apply_controlled_gate: control equals target");
    if (control < 0 || control >= n_qubits || target < 0 || target >= n_qubits)
        throw std::invalid_argument("apply_controlled_gate: qubit index out of range");
    const Eigen::Index sc = Eigen::Index(1) << (n_qubits - 1 - control);
    const Eigen::Index st = Eigen::Index(1) << (n_qubits - 1 - target);
    const Eigen::Index dim = amp.size();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (!(base & sc) || (base & st)) continue;
        const cplx a0 = amp(base);
        const cplx a1 = amp(base | st);
        amp(base) = u(0, 0) * a0 + u(0, 1) * a1;
        amp(base | st) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

/// Embeds a single-qubit operator at position `qubit` of an n-qubit register.
inline Mat embed_single_qubit(const Mat& op, int qubit, int n_qubits) {
    if (op.rows() != 2 || op.cols() != 2)
        throw std::invalid_argument("embed_single_qubit: operator must be 2x2");
    if (qubit < 0 || qubit >= n_qubits)
        throw std::invalid_argument("embed_single_qubit: qubit index out of range");
    Mat out = Mat::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q)
        out = tensor_product(out, q == qubit ? op : Mat(Mat::Identity(2, 2)));
    return out;
}

} // namespace qcorr
