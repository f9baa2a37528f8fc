#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qcorr/qmath.hpp"
#include "qcorr/random.hpp"
#include "qcorr/rng.hpp"

using namespace qcorr;

namespace {

Mat bell_density() {
    Vec v = Vec::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v * v.adjoint();
}

} // namespace

TEST_CASE("qubit_count accepts powers of two only") {
    REQUIRE(qubit_count(2) == 1);
    REQUIRE(qubit_count(8) == 3);
    REQUIRE_THROWS_AS(qubit_count(6), std::invalid_argument);
    REQUIRE_THROWS_AS(qubit_count(0), std::invalid_argument);
}

TEST_CASE("qubit 0 is the most significant basis-index bit") {
    // |01> of two qubits sits at index 1: qubit 0 reads 0, qubit 1 reads 1.
    REQUIRE(qubit_bit(1, 0, 2) == 0);
    REQUIRE(qubit_bit(1, 1, 2) == 1);
    REQUIRE(qubit_bit(2, 0, 2) == 1);
    REQUIRE(qubit_bit(2, 1, 2) == 0);
}

TEST_CASE("tensor product follows the big-endian layout") {
    const Mat zx = tensor_product(pauli_z(), pauli_x());
    REQUIRE(zx(0, 1) == cplx(1.0, 0.0));
    REQUIRE(zx(2, 3) == cplx(-1.0, 0.0));

    SECTION("sigma_y tensor sigma_y is the anti-diagonal (-1, 1, 1, -1)") {
        const Mat yy = tensor_product(pauli_y(), pauli_y());
        REQUIRE(yy(0, 3) == cplx(-1.0, 0.0));
        REQUIRE(yy(1, 2) == cplx(1.0, 0.0));
        REQUIRE(yy(2, 1) == cplx(1.0, 0.0));
        REQUIRE(yy(3, 0) == cplx(-1.0, 0.0));
        REQUIRE(yy.cwiseAbs().sum() == Catch::Approx(4.0));
    }

    SECTION("vector variant agrees with the matrix variant on outer products") {
        Vec a(2), b(2);
        a << cplx(0.6, 0.0), cplx(0.0, 0.8);
        b << cplx(1.0, 0.0), cplx(0.0, 0.0);
        const Vec ab = tensor_product_vec(a, b);
        REQUIRE(ab(0) == a(0));
        REQUIRE(ab(2) == a(1));
        REQUIRE(ab(1) == cplx(0.0, 0.0));
    }
}

TEST_CASE("partial trace matches the digit-loop reference on random states") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 2);
        const Mat rho = random_density_matrix(n, rng).matrix();
        for (int q = 0; q < n; ++q) {
            const Mat lib = partial_trace(rho, {q}, n);
            const Mat ref = oracle::partial_trace_ref(rho, {q}, n);
            REQUIRE((lib - ref).cwiseAbs().maxCoeff() < 1e-13);
        }
        const Mat lib2 = partial_trace(rho, {0, n - 1}, n);
        const Mat ref2 = oracle::partial_trace_ref(rho, {0, n - 1}, n);
        REQUIRE((lib2 - ref2).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("tracing everything but one qubit of a product state recovers the factor") {
        Vec plus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        Vec zero(2);
        zero << 1.0, 0.0;
        const Vec prod = tensor_product_vec(plus, zero);
        const Mat rho = prod * prod.adjoint();
        const Mat left = partial_trace(rho, {0}, 2);
        REQUIRE(left(0, 1).real() == Catch::Approx(0.5).margin(1e-14));
        const Mat right = partial_trace(rho, {1}, 2);
        REQUIRE(right(0, 0).real() == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("partial transpose of the Bell state has eigenvalue -1/2") {
    const Mat pt = partial_transpose(bell_density(), {0}, 2);
    const HermitianSpectrum spec = eigh(pt);
    REQUIRE(spec.eigenvalues.minCoeff() == Catch::Approx(-0.5).margin(1e-12));
    REQUIRE(trace_norm(pt) == Catch::Approx(2.0).margin(1e-12));

    SECTION("transpose on either side gives the same trace norm") {
        const Mat pt1 = partial_transpose(bell_density(), {1}, 2);
        REQUIRE(trace_norm(pt1) == Catch::Approx(2.0).margin(1e-12));
    }

    SECTION("double application is the identity") {
        const Mat twice = partial_transpose(pt, {0}, 2);
        REQUIRE((twice - bell_density()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("eigh requires Hermitian input and sorts descending") {
    Mat m(2, 2);
    m << 1.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 3.0;
    const HermitianSpectrum spec = eigh(m);
    REQUIRE(spec.eigenvalues(0) >= spec.eigenvalues(1));
    REQUIRE(spec.eigenvalues(0) == Catch::Approx(2.0 + std::sqrt(2.0)).margin(1e-12));

    Mat bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    REQUIRE_THROWS_WITH(eigh(bad), "eigh: matrix non-Hermitian beyond tolerance");
}

TEST_CASE("matrix_sqrt_psd squares back to the input") {
    SplitMix64 rng(12);
    const Mat rho = random_density_matrix(2, rng).matrix();
    const Mat root = matrix_sqrt_psd(rho);
    REQUIRE((root * root - rho).cwiseAbs().maxCoeff() < 1e-12);

    SECTION("genuinely negative spectra are rejected") {
        REQUIRE_THROWS_AS(matrix_sqrt_psd(-Mat::Identity(2, 2)), std::invalid_argument);
    }
}

TEST_CASE("statevector kernels agree with dense matrix embedding") {
    SplitMix64 rng(13);
    const int n = 3;
    const PureState state = random_pure_state(n, rng);

    SECTION("single-qubit gate") {
        for (int q = 0; q < n; ++q) {
            Vec fast = state.amplitudes();
            apply_single_qubit_gate(fast, n, q, pauli_y());
            const Vec dense = embed_single_qubit(pauli_y(), q, n) * state.amplitudes();
            REQUIRE((fast - dense).cwiseAbs().maxCoeff() < 1e-14);
        }
    }

    SECTION("two-qubit gate on every ordered pair") {
        Mat u(4, 4);
        u.setZero(); // CZ with a phase twist keeps all four basis labels distinct
        u(0, 0) = 1.0;
        u(1, 1) = cplx(0.0, 1.0);
        u(2, 2) = 1.0;
        u(3, 3) = -1.0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                Vec fast = state.amplitudes();
                apply_two_qubit_gate(fast, n, a, b, u);
                // dense comparison built from basis columns
                const Eigen::Index dim = Eigen::Index(1) << n;
                Mat dense = Mat::Zero(dim, dim);
                for (Eigen::Index col = 0; col < dim; ++col) {
                    Vec e = Vec::Zero(dim);
                    e(col) = 1.0;
                    apply_two_qubit_gate(e, n, a, b, u);
                    dense.col(col) = e;
                }
                REQUIRE((dense * state.amplitudes() - fast).cwiseAbs().maxCoeff() < 1e-14);
                REQUIRE((dense * dense.adjoint() - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() <
                        1e-13);
            }
        }
    }

    SECTION("controlled gate equals the two-qubit block form") {
        Vec via_control = state.amplitudes();
        apply_controlled_gate(via_control, n, 0, 2, pauli_x());
        Mat cnot = Mat::Zero(4, 4);
        cnot(0, 0) = cnot(1, 1) = 1.0; // control 0 block: identity
        cnot(2, 3) = cnot(3, 2) = 1.0; // control 1 block: X
        Vec via_block = state.amplitudes();
        apply_two_qubit_gate(via_block, n, 0, 2, cnot);
        REQUIRE((via_control - via_block).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("split-mix stream is reproducible and uniform-ish") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    SECTION("derived streams differ from the base stream") {
        SplitMix64 base(42);
        SplitMix64 derived(derive_stream_seed(42, 1));
        REQUIRE(base.next_u64() != derived.next_u64());
    }

    SECTION("doubles stay in [0, 1)") {
        SplitMix64 r(7);
        double mean = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const double u = r.next_double();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            mean += u;
        }
        mean /= 20000.0;
        REQUIRE(mean == Catch::Approx(0.5).margin(0.02));
    }
}
