#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qcorr/encoder.hpp"
#include "qcorr/random.hpp"

using namespace qcorr;

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("objective evaluation") {
    SECTION("concurrence of the undisturbed Bell pair is one") {
        const double v = evaluate(bell_phi_plus(), identity_encoding(2),
                                  amplitude_damping_model(),
                                  Objective::measure_at_p("concurrence", 0.0));
        REQUIRE(v == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("phase noise at half strength quarters the partially entangled pair") {
        const double v = evaluate(make_psi_theta(kPi / 4.0), identity_encoding(2),
                                  dephasing_model(),
                                  Objective::measure_at_p("concurrence", 0.5));
        // (1-p)^2 sin(2 theta) = 0.25
        REQUIRE(v == Catch::Approx(0.25).margin(1e-8));
    }

    SECTION("threshold strength under damping of the single-excitation pair") {
        // concurrence decays as 1 - p, so it drops below 0.5 at p = 0.5
        const double v = evaluate(bell_psi_plus(), identity_encoding(2),
                                  amplitude_damping_model(),
                                  Objective::threshold_p("concurrence", 0.5));
        REQUIRE(v == Catch::Approx(0.5).margin(1e-6));
    }

    SECTION("threshold endpoints") {
        // already below the level at p = 0
        REQUIRE(evaluate(basis_state(2, 0), identity_encoding(2), amplitude_damping_model(),
                         Objective::threshold_p("concurrence", 0.5)) == 0.0);
        // Bell correlations under phase noise end at one bit, never below 0.5
        REQUIRE(evaluate(bell_phi_plus(), identity_encoding(2), dephasing_model(),
                         Objective::threshold_p("T_S", 0.5)) == 1.0);
    }

    SECTION("area under the curve matches the trapezoid of a known law") {
        // damped single-excitation pair: concurrence = 1 - p, area = 1/2
        const double v = evaluate(bell_psi_plus(), identity_encoding(2),
                                  amplitude_damping_model(),
                                  Objective::area_under_curve("concurrence", default_p_grid(51)));
        REQUIRE(v == Catch::Approx(0.5).margin(1e-7));
    }

    SECTION("validation rejects broken objectives") {
        REQUIRE_THROWS_AS(validate_objective(Objective::measure_at_p("concurrence", 1.5)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(validate_objective(Objective::threshold_p("concurrence", -0.1)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(validate_objective(Objective::threshold_p("concurrence", 0.0)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(
            validate_objective(Objective::area_under_curve("concurrence", {0.5})),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            validate_objective(Objective::area_under_curve("concurrence", {0.8, 0.2})),
            std::invalid_argument);
    }
}

TEST_CASE("encoding search finds the known optima", "[slow]") {
    SECTION("Bell pair under damping, concurrence at half strength") {
        const OptimizeResult r = optimize(bell_phi_plus(), amplitude_damping_model(),
                                          Objective::measure_at_p("concurrence", 0.5));
        // best over the maximally entangled family: (1-p) at the
        // single-excitation pair
        REQUIRE(r.value == Catch::Approx(0.5).margin(1e-6));
        REQUIRE(r.encoding.size() == 2);
    }

    SECTION("Bell pair under phase noise, concurrence at half strength") {
        const OptimizeResult r = optimize(bell_phi_plus(), dephasing_model(),
                                          Objective::measure_at_p("concurrence", 0.5));
        // the whole maximally entangled family decays as (1-p)^2
        REQUIRE(r.value == Catch::Approx(0.25).margin(1e-6));
    }

    SECTION("a product state cannot be encoded into entanglement") {
        const OptimizeResult r = optimize(basis_state(2, 0), amplitude_damping_model(),
                                          Objective::measure_at_p("concurrence", 0.3));
        REQUIRE(r.value == Catch::Approx(0.0).margin(1e-9));
    }

    SECTION("the full search is never beaten by the one-parameter family") {
        for (const ChannelModel& model : {dephasing_model(), amplitude_damping_model()}) {
            const Objective obj = Objective::measure_at_p("negativity", 0.4);
            const OptimizeResult r = optimize(bell_phi_plus(), model, obj);
            double family_best = 0.0;
            for (int k = 0; k <= 180; ++k) {
                const double gamma = kPi / 2.0 * k / 180.0;
                // encode the fixed Bell input so it matches the family member
                const double v = evaluate(make_phi_gamma(gamma), identity_encoding(2), model, obj);
                family_best = std::max(family_best, v);
            }
            CAPTURE(model.name(), r.value, family_best);
            REQUIRE(r.value >= family_best - 1e-6);
        }
    }

    SECTION("pre-composed z-phases do not change the optimum") {
        const Objective obj = Objective::measure_at_p("concurrence", 0.5);
        const OptimizeResult base = optimize(bell_phi_plus(), amplitude_damping_model(), obj);
        const PureState shifted = apply_encoding(bell_phi_plus(), phase_encoding({0.9, 2.3}));
        const OptimizeResult moved = optimize(shifted, amplitude_damping_model(), obj);
        REQUIRE(moved.value == Catch::Approx(base.value).margin(1e-6));
    }

    SECTION("the search is deterministic") {
        const Objective obj = Objective::measure_at_p("concurrence", 0.5);
        const OptimizeResult a = optimize(bell_phi_plus(), amplitude_damping_model(), obj);
        const OptimizeResult b = optimize(bell_phi_plus(), amplitude_damping_model(), obj);
        REQUIRE(a.value == b.value);
        REQUIRE(a.encoding.size() == b.encoding.size());
        for (std::size_t q = 0; q < a.encoding.size(); ++q) {
            REQUIRE(a.encoding[q].alpha == b.encoding[q].alpha);
            REQUIRE(a.encoding[q].beta == b.encoding[q].beta);
            REQUIRE(a.encoding[q].delta == b.encoding[q].delta);
        }
    }
}

TEST_CASE("optimize validates its inputs") {
    REQUIRE_THROWS_AS(optimize(ghz_state(3), dephasing_model(),
                               Objective::measure_at_p("concurrence", 0.5)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(optimize(bell_phi_plus(), dephasing_model(),
                               Objective::measure_at_p("concurrence", 2.0)),
                      std::invalid_argument);
}
