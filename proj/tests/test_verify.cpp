#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nai/verify.hpp"

using namespace nai;

TEST_CASE("catalog closed forms verify") {
    for (auto id : {ActivationId::tanh, ActivationId::gaussian, ActivationId::silu}) {
        VerificationReport r = verify_nai(make_activation(id), {0.5, 1.0}, 1e-6);
        CHECK(r.all_passed());
        CHECK(!r.checks.empty());
    }
    VerificationReport relu =
        verify_nai(make_activation(ActivationId::repu, {{"q", 1.0}}), {0.5, 1.0, 2.0}, 1e-8);
    CHECK(relu.all_passed());
}

TEST_CASE("alternating binomial sums vanish below the difference order") {
    VerificationReport r = check_alternating_sum(12);
    CHECK(r.all_passed());
    CHECK_THROWS_AS(check_alternating_sum(25), std::invalid_argument);
}

TEST_CASE("taylor remainder identity") {
    const std::vector<double> hs = {0.25, 1.0};
    const std::vector<double> xs = {-1.5, 0.0, 0.7};
    CHECK(check_taylor_remainder(make_activation(ActivationId::sigmoid), 1, hs, xs, 1e-8)
              .all_passed());
    CHECK(check_taylor_remainder(make_activation(ActivationId::gelu), 2, hs, xs, 1e-8)
              .all_passed());
}

TEST_CASE("convolution oracle agrees with the alternating-sum density") {
    CHECK(irwin_hall_convolution_oracle(3, 0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(irwin_hall_convolution_oracle(4, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    for (int r = 1; r <= 6; ++r) {
        for (double x : {-1.7, -0.4, 0.1, 0.9, 2.3}) {
            CHECK(irwin_hall_convolution_oracle(r, x) ==
                  doctest::Approx(irwin_hall_density(r, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("power kernels are dilated uniform-sum densities") {
    VerificationReport r = check_irwin_hall(3, 1e-8, 500);
    CHECK(r.all_passed());
    CHECK(r.checks.size() >= 9); // 3 exponents x 3 dilations
}

TEST_CASE("approximate identity conditions hold as the scale shrinks") {
    ComposedB cb = make_composed(make_activation(ActivationId::sigmoid), 1);
    VerificationReport r = check_ai_conditions(cb, {1.0, 0.5, 0.25, 0.125}, 0.5, 1e-4);
    CHECK(r.all_passed());
}

TEST_CASE("hoeffding deviation bound") {
    CHECK(hoeffding_epsilon(10000, 1.0, 0.05) ==
          doctest::Approx(0.013581015).epsilon(1e-6));
    // quadrupling the samples halves the deviation
    CHECK(hoeffding_epsilon(40000, 1.0, 0.05) * 2.0 ==
          doctest::Approx(hoeffding_epsilon(10000, 1.0, 0.05)).epsilon(1e-12));
    // p = 2/e^2 makes the bound exactly range/sqrt(N)
    const double p = 2.0 * std::exp(-2.0);
    CHECK(hoeffding_epsilon(100, 1.0, p) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(hoeffding_epsilon(100, 3.0, p) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("derivative recipes admit single-term kernels") {
    auto sig_prime = [](double x) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 - s);
    };
    ActivationSpec spec = make_custom("sigmoid_derivative", sig_prime, 0, 1.0);
    BFunction1D B = build_bfunction(spec, 1.0);
    CHECK(B.terms.size() == 1);
    // integral of sigma' over the line is 1
    CHECK(signed_integral(B, 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("rate study bookkeeping on a tiny configuration") {
    ComposedB cb = make_composed(make_activation(ActivationId::repu, {{"q", 1.0}}), 1);
    Target hat = make_builtin_target("hat", 1);

    RateStudyResult r = rate_study(hat, cb, {16, 64}, 3, 33, 7);
    REQUIRE(r.N_values.size() == 2);
    REQUIRE(r.errors.size() == 2);
    CHECK(r.errors[0].size() == 3);
    CHECK(r.median_errors.size() == 2);
    CHECK(!r.degenerate);
    CHECK(r.epsilon_at_n[0] == doctest::Approx(2.0 / 4.0).epsilon(1e-12));

    RateStudyResult again = rate_study(hat, cb, {16, 64}, 3, 33, 7);
    CHECK(r.errors == again.errors);
    CHECK(r.slope == again.slope);

    Target zero = make_builtin_target("zero", 1);
    RateStudyResult z = rate_study(zero, cb, {16, 64}, 2, 33, 7);
    CHECK(z.degenerate);

    nlohmann::json j = rate_study_json(r);
    CHECK(j.at("N_values").size() == 2);
    CHECK(j.at("slope").is_number());
}

TEST_CASE("generic finite-difference bounds cover the recipes") {
    CHECK(check_general_framework(make_activation(ActivationId::sigmoid), 1, {0.25, 0.5, 1.0},
                                  1e-6)
              .all_passed());
    CHECK(check_general_framework(make_activation(ActivationId::gelu), 2, {0.25, 0.5, 1.0}, 1e-6)
              .all_passed());
}

TEST_CASE("report json round trip") {
    VerificationReport r;
    r.subject = "demo";
    r.seed = 42;
    r.runtime_seconds = 0.5;
    r.add("a", "x <= y", 1.0, 2.0, true, 1e-6);
    r.add("b", "u == v", 3.0, 2.5, false, 1e-9);
    CHECK(!r.all_passed());

    VerificationReport back = report_from_json(report_json(r));
    CHECK(back.subject == r.subject);
    CHECK(back.seed == r.seed);
    REQUIRE(back.checks.size() == 2);
    CHECK(back.checks[1].name == "b");
    CHECK(back.checks[1].pass == false);
    CHECK(back.checks[0].measured == 1.0);

    const std::string text = report_text(r);
    CHECK(text.find("demo") != std::string::npos);
    CHECK(text.find("FAIL") != std::string::npos);
}
