#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcorr/channels.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/random.hpp"
#include "qcorr/tomography.hpp"

using namespace qcorr;

namespace {

Mat axis_rotation(char axis) {
    Mat h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    if (axis == 'X') return h;
    if (axis == 'Y') {
        Mat sdg = Mat::Identity(2, 2);
        sdg(1, 1) = cplx(0.0, -1.0);
        return h * sdg;
    }
    return Mat::Identity(2, 2);
}

// exact outcome distribution for one measurement setting, built densely and
// independently of the sampler's statevector kernels
std::vector<double> exact_frequencies(const PureState& state, const std::string& setting) {
    Mat u = Mat::Identity(1, 1);
    for (char axis : setting) u = tensor_product(u, axis_rotation(axis));
    const Vec rotated = u * state.amplitudes();
    std::vector<double> freq(static_cast<std::size_t>(rotated.size()));
    for (Eigen::Index i = 0; i < rotated.size(); ++i)
        freq[static_cast<std::size_t>(i)] = std::norm(rotated(i));
    return freq;
}

} // namespace

TEST_CASE("measurement settings enumerate in lexicographic axis order") {
    REQUIRE(pauli_settings(1) == std::vector<std::string>{"X", "Y", "Z"});

    const auto s2 = pauli_settings(2);
    REQUIRE(s2.size() == 9);
    REQUIRE(s2.front() == "XX");
    REQUIRE(s2[1] == "XY");
    REQUIRE(s2[2] == "XZ");
    REQUIRE(s2[3] == "YX");
    REQUIRE(s2.back() == "ZZ");

    REQUIRE_THROWS_AS(pauli_settings(0), std::invalid_argument);
    REQUIRE_THROWS_AS(pauli_settings(9), std::invalid_argument);
}

TEST_CASE("readout models") {
    SECTION("uniform flips fill column-stochastic confusion matrices") {
        const ReadoutModel m = ReadoutModel::uniform_flip(2, 0.03);
        REQUIRE(m.n_qubits() == 2);
        for (const auto& c : m.confusion) {
            REQUIRE(c(0, 0) == Catch::Approx(0.97).margin(1e-15));
            REQUIRE(c(1, 0) == Catch::Approx(0.03).margin(1e-15));
            REQUIRE(c(0, 1) == Catch::Approx(0.03).margin(1e-15));
            REQUIRE(c(1, 1) == Catch::Approx(0.97).margin(1e-15));
        }
    }

    SECTION("flip probability beyond one half is rejected") {
        REQUIRE_THROWS_AS(ReadoutModel::uniform_flip(1, 0.6), std::invalid_argument);
        REQUIRE_THROWS_AS(ReadoutModel::uniform_flip(1, -0.1), std::invalid_argument);
    }

    SECTION("prefix keeps the leading qubits") {
        const ReadoutModel m = ReadoutModel::uniform_flip(4, 0.1).prefix(2);
        REQUIRE(m.n_qubits() == 2);
        REQUIRE_THROWS_AS(ReadoutModel::ideal(2).prefix(3), std::invalid_argument);
    }
}

TEST_CASE("sampling counts") {
    const PureState bell = bell_phi_plus();
    const ReadoutModel ideal = ReadoutModel::ideal(2);

    SECTION("the same seed reproduces the same counts") {
        const auto a = sample_counts(bell, "ZZ", 500, ideal, 42);
        const auto b = sample_counts(bell, "ZZ", 500, ideal, 42);
        REQUIRE(a == b);
        const auto c = sample_counts(bell, "ZZ", 500, ideal, 43);
        REQUIRE(a != c);
    }

    SECTION("totals match the requested shots") {
        const auto counts = sample_counts(bell, "XY", 999, ideal, 7);
        std::int64_t total = 0;
        for (const auto& [key, n] : counts) {
            REQUIRE(key.size() == 2);
            total += n;
        }
        REQUIRE(total == 999);
    }

    SECTION("perfectly correlated outcomes stay correlated without noise") {
        for (const char* setting : {"ZZ", "XX"}) {
            const auto counts = sample_counts(bell, setting, 2000, ideal, 11);
            std::int64_t agree = 0;
            for (const auto& [key, n] : counts) {
                if (key == "00" || key == "11") agree += n;
            }
            REQUIRE(agree == 2000);
        }
    }

    SECTION("readout noise breaks the correlation at roughly the flip rate") {
        const auto counts =
            sample_counts(bell, "ZZ", 20000, ReadoutModel::uniform_flip(2, 0.1), 13);
        std::int64_t disagree = 0;
        for (const auto& [key, n] : counts)
            if (key == "01" || key == "10") disagree += n;
        // expected disagreement 2 * 0.1 * 0.9 = 0.18
        REQUIRE(static_cast<double>(disagree) / 20000.0 == Catch::Approx(0.18).margin(0.02));
    }
}

TEST_CASE("count marginalization") {
    const std::map<std::string, std::int64_t> counts = {
        {"010", 3}, {"011", 5}, {"110", 7}};

    const auto front = marginalize_counts(counts, 3, {0, 1});
    REQUIRE(front.size() == 2);
    REQUIRE(front.at("01") == 8);
    REQUIRE(front.at("11") == 7);

    const auto back = marginalize_counts(counts, 3, {2});
    REQUIRE(back.at("0") == 10);
    REQUIRE(back.at("1") == 5);

    REQUIRE_THROWS_AS(marginalize_counts(counts, 3, {3}), std::invalid_argument);
}

TEST_CASE("readout calibration estimates the confusion matrix") {
    const ReadoutModel truth = ReadoutModel::uniform_flip(2, 0.02);
    const ReadoutModel est = calibrate(truth, 8192, 99);
    REQUIRE(est.n_qubits() == 2);
    for (int q = 0; q < 2; ++q) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                REQUIRE(est.confusion[static_cast<std::size_t>(q)](i, j) ==
                        Catch::Approx(truth.confusion[static_cast<std::size_t>(q)](i, j))
                            .margin(0.01));
            }
        }
    }

    SECTION("calibration is deterministic in the seed") {
        const ReadoutModel a = calibrate(truth, 1024, 5);
        const ReadoutModel b = calibrate(truth, 1024, 5);
        for (int q = 0; q < 2; ++q)
            REQUIRE((a.confusion[static_cast<std::size_t>(q)] -
                     b.confusion[static_cast<std::size_t>(q)])
                        .cwiseAbs()
                        .maxCoeff() == 0.0);
    }
}

TEST_CASE("mitigation inverts a known readout model exactly") {
    const ReadoutModel model = ReadoutModel::uniform_flip(2, 0.07);
    // exact noisy distribution for Bell-in-ZZ: p = (1/2, 0, 0, 1/2) pushed
    // through the per-qubit confusion matrices
    std::vector<double> truth = {0.5, 0.0, 0.0, 0.5};
    std::vector<double> noisy(4, 0.0);
    for (int b = 0; b < 4; ++b) {
        for (int t = 0; t < 4; ++t) {
            double w = truth[static_cast<std::size_t>(t)];
            for (int q = 0; q < 2; ++q) {
                const int ob = (b >> (1 - q)) & 1;
                const int tb = (t >> (1 - q)) & 1;
                w *= model.confusion[static_cast<std::size_t>(q)](ob, tb);
            }
            noisy[static_cast<std::size_t>(b)] += w;
        }
    }
    const std::vector<double> recovered = mitigate_frequencies(noisy, model);
    for (int b = 0; b < 4; ++b)
        REQUIRE(recovered[static_cast<std::size_t>(b)] ==
                Catch::Approx(truth[static_cast<std::size_t>(b)]).margin(1e-12));

    SECTION("clipping keeps the result a distribution") {
        // statistically impossible frequencies drive the inversion negative
        const std::vector<double> weird = {0.9, 0.0, 0.0, 0.1};
        const auto out = mitigate_frequencies(weird, ReadoutModel::uniform_flip(2, 0.4));
        double sum = 0.0;
        for (double f : out) {
            REQUIRE(f >= 0.0);
            sum += f;
        }
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("exact expectations invert to the exact state") {
    SplitMix64 rng(71);
    const auto settings = pauli_settings(2);
    for (int t = 0; t < 10; ++t) {
        const PureState psi = random_pure_state(2, rng);
        std::vector<std::vector<double>> freqs;
        for (const auto& s : settings) freqs.push_back(exact_frequencies(psi, s));
        const auto expectations = pauli_expectations(settings, freqs, 2);
        const Mat estimate = linear_inversion(expectations, 2);
        REQUIRE((estimate - density(psi).matrix()).cwiseAbs().maxCoeff() < 1e-10);
        // projection must not move an already-valid state
        REQUIRE((psd_project(estimate) - estimate).cwiseAbs().maxCoeff() < 1e-10);
    }

    SECTION("identity expectation is pinned to one") {
        std::vector<std::vector<double>> freqs;
        for (const auto& s : settings) freqs.push_back(exact_frequencies(bell_phi_plus(), s));
        const auto expectations = pauli_expectations(settings, freqs, 2);
        REQUIRE(expectations[0] == 1.0);
    }

    SECTION("uncovered words are rejected") {
        REQUIRE_THROWS_AS(
            pauli_expectations({"XX"}, {exact_frequencies(bell_phi_plus(), "XX")}, 2),
            std::invalid_argument);
    }
}

TEST_CASE("density-matrix projection") {
    SECTION("clips negative eigenvalues and renormalizes") {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 1.2;
        h(1, 1) = -0.2;
        const Mat out = psd_project(h);
        REQUIRE(out(0, 0).real() == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(out(1, 1).real() == Catch::Approx(0.0).margin(1e-12));
    }

    SECTION("redistributes clipped mass uniformly over the survivors") {
        Mat h = Mat::Zero(3, 3);
        h(0, 0) = 0.8;
        h(1, 1) = 0.5;
        h(2, 2) = -0.3;
        const Mat out = psd_project(h);
        REQUIRE(out(0, 0).real() == Catch::Approx(0.65).margin(1e-12));
        REQUIRE(out(1, 1).real() == Catch::Approx(0.35).margin(1e-12));
        REQUIRE(out(2, 2).real() == Catch::Approx(0.0).margin(1e-12));
    }

    SECTION("output is always a density matrix") {
        SplitMix64 rng(72);
        for (int t = 0; t < 10; ++t) {
            const Mat base = random_density_matrix(2, rng).matrix();
            Mat noise(4, 4);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    noise(r, c) = cplx(rng.next_double() - 0.5, rng.next_double() - 0.5);
            const Mat out = psd_project(base + 0.2 * (noise + noise.adjoint()));
            REQUIRE(out.trace().real() == Catch::Approx(1.0).margin(1e-12));
            Eigen::SelfAdjointEigenSolver<Mat> solver(out, Eigen::EigenvaluesOnly);
            REQUIRE(solver.eigenvalues().minCoeff() > -1e-14);
        }
    }

    SECTION("a traceless estimate is rejected") {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 1.0;
        h(1, 1) = -1.0;
        REQUIRE_THROWS_AS(psd_project(h), std::invalid_argument);
    }
}

TEST_CASE("tomography records") {
    const Circuit bell = build_ad_circuit(CircuitInitial::Phi0, 0.0);
    const TomographyRecord record =
        run_tomography(bell, 2, 256, ReadoutModel::ideal(4), 17);

    REQUIRE(record.n_qubits == 2);
    REQUIRE(record.shots == 256);
    REQUIRE(record.seed == 17);
    REQUIRE(record.settings == pauli_settings(2));
    REQUIRE(record.counts.size() == 9);
    for (const auto& counts : record.counts) {
        std::int64_t total = 0;
        for (const auto& [key, n] : counts) {
            REQUIRE(key.size() == 2);
            total += n;
        }
        REQUIRE(total == 256);
    }

    SECTION("records are deterministic in the seed") {
        const TomographyRecord again =
            run_tomography(bell, 2, 256, ReadoutModel::ideal(4), 17);
        REQUIRE(again.counts == record.counts);
        const TomographyRecord other =
            run_tomography(bell, 2, 256, ReadoutModel::ideal(4), 18);
        REQUIRE(other.counts != record.counts);
    }
}

TEST_CASE("end-to-end reconstruction of the Bell circuit") {
    const Circuit bell = build_ad_circuit(CircuitInitial::Phi0, 0.0);
    const DensityMatrix ideal_state = reduced_density(simulate(bell), {0, 1});

    SECTION("ideal readout reaches high fidelity at 8192 shots") {
        for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
            const TomographyRecord record =
                run_tomography(bell, 2, 8192, ReadoutModel::ideal(4), seed);
            const DensityMatrix recon = reconstruct(record);
            REQUIRE(fidelity(recon, ideal_state) >= 0.99);
        }
    }

    SECTION("mitigating with the true readout model beats ignoring it") {
        const ReadoutModel noisy = ReadoutModel::uniform_flip(4, 0.03);
        int wins = 0;
        for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
            const TomographyRecord record = run_tomography(bell, 2, 8192, noisy, seed);
            const double raw = fidelity(reconstruct(record), ideal_state);
            const double fixed = fidelity(reconstruct(record, noisy.prefix(2)), ideal_state);
            if (fixed > raw) ++wins;
        }
        REQUIRE(wins >= 4);
    }
}

TEST_CASE("averaged tomography repeats independent reconstructions") {
    const Circuit bell = build_ad_circuit(CircuitInitial::Phi0, 0.0);
    const ReadoutModel ideal = ReadoutModel::ideal(4);

    const auto reps = averaged_tomography(bell, 2, 3, 1024, ideal, 31);
    REQUIRE(reps.size() == 3);

    SECTION("repetition r uses the derived stream (seed, r)") {
        const TomographyRecord first =
            run_tomography(bell, 2, 1024, ideal, derive_stream_seed(31, 0));
        const DensityMatrix direct = reconstruct(first);
        REQUIRE((reps[0].matrix() - direct.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    }

    SECTION("distinct repetitions are statistically distinct") {
        REQUIRE((reps[0].matrix() - reps[1].matrix()).cwiseAbs().maxCoeff() > 1e-6);
    }

    SECTION("measures averaged over repetitions land near the truth") {
        const auto many = averaged_tomography(bell, 2, 4, 8192, ideal, 33);
        double mean_neg = 0.0;
        for (const auto& rho : many) mean_neg += negativity(rho);
        mean_neg /= static_cast<double>(many.size());
        REQUIRE(mean_neg == Catch::Approx(0.5).margin(0.02));
    }

    REQUIRE_THROWS_AS(averaged_tomography(bell, 2, 0, 64, ideal, 1), std::invalid_argument);
}

TEST_CASE("state fidelity") {
    SplitMix64 rng(73);
    const DensityMatrix rho = random_density_matrix(2, rng);
    REQUIRE(fidelity(rho, rho) == Catch::Approx(1.0).margin(1e-10));

    SECTION("pure states reduce to the squared overlap") {
        const DensityMatrix a = density(bell_phi_plus());
        const DensityMatrix b = density(make_phi_theta(0.3));
        const double expected = (1.0 + std::sin(0.6)) / 2.0;
        REQUIRE(fidelity(a, b) == Catch::Approx(expected).margin(1e-10));
        REQUIRE(fidelity(b, a) == Catch::Approx(expected).margin(1e-10));
    }

    SECTION("orthogonal supports have zero fidelity") {
        REQUIRE(fidelity(density(bell_phi_plus()), density(bell_psi_plus())) ==
                Catch::Approx(0.0).margin(1e-10));
    }

    SECTION("mixing with noise lowers fidelity predictably") {
        const Mat mixed = 0.8 * density(bell_phi_plus()).matrix() + 0.2 * Mat::Identity(4, 4) / 4.0;
        // <phi| rho |phi> for a pure reference
        REQUIRE(fidelity(density(bell_phi_plus()), DensityMatrix(mixed)) ==
                Catch::Approx(0.85).margin(1e-10));
    }
}
