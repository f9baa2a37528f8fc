#include <catch2/catch_amalgamated.hpp>

#include "qcorr/experiments.hpp"

using namespace qcorr;

TEST_CASE("bell state under amplitude damping matches closed forms end to end") {
    const PureState bell = bell_phi_plus();
    const auto points = sweep(bell, identity_encoding(2), amplitude_damping_model(), {0.0, 0.5});

    SECTION("p = 0 keeps two bits of total correlation and full entanglement") {
        REQUIRE(points[0].measures.at("T_S") == Catch::Approx(2.0).margin(1e-9));
        REQUIRE(points[0].measures.at("concurrence") == Catch::Approx(1.0).margin(1e-9));
        REQUIRE(points[0].measures.at("T_E") == Catch::Approx(0.0).margin(1e-9));
    }

    SECTION("p = 0.5 doubled negativity follows (1-p)^2") {
        REQUIRE(points[1].measures.at("doubled_negativity") ==
                Catch::Approx(0.25).margin(1e-9));
        REQUIRE(points[1].measures.at("singlet_fraction") == Catch::Approx(0.625).margin(1e-6));
    }
}

TEST_CASE("four-qubit damping circuit reduces to the Kraus evolution") {
    const double theta = damping_theta(0.3);
    const Circuit circuit = build_ad_circuit(CircuitInitial::Phi0, theta);
    const DensityMatrix from_circuit = reduced_density(simulate(circuit), {0, 1});
    const DensityMatrix direct = apply_product_channel(
        density(bell_phi_plus()), replicate(amplitude_damping(0.3), 2));
    REQUIRE((from_circuit.matrix() - direct.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}
