#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nai/bfunction.hpp"
#include "nai/rng.hpp"

using namespace nai;

TEST_CASE("term lists realize the scaled finite difference") {
    RngStream rng(7);
    for (const auto& spec : list_catalog()) {
        if (spec.fd_order_k == 0) continue;
        auto sigma = [&spec](double x) { return eval_activation(spec, x); };
        for (double h : {0.25, 0.5, 1.0, 2.0}) {
            BFunction1D B = build_bfunction(spec, h);
            REQUIRE(B.terms.size() == static_cast<std::size_t>(B.k + 1));
            for (int i = 0; i < 200; ++i) {
                const double x = rng.uniform_sym(6.0);
                const double direct = eval_bfunction(B, x);
                const double reference =
                    spec.recipe_scale * central_difference(sigma, B.k, B.fd_step, x);
                CHECK(direct == doctest::Approx(reference).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("relu second difference is the unit hat") {
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0);
    CHECK(eval_bfunction(B, 0.0) == doctest::Approx(1.0));
    CHECK(eval_bfunction(B, 1.0) == doctest::Approx(0.0));
    CHECK(eval_bfunction(B, -1.0) == doctest::Approx(0.0));
    CHECK(eval_bfunction(B, 0.5) == doctest::Approx(0.5));
    CHECK(eval_bfunction(B, 1.5) == doctest::Approx(0.0));
    REQUIRE(B.facts.support.has_value());
    CHECK(B.facts.support->first == doctest::Approx(-1.0));
    CHECK(B.facts.support->second == doctest::Approx(1.0));
}

TEST_CASE("step-function difference is the centered indicator") {
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 0.0}}), 1.0);
    CHECK(eval_bfunction(B, 0.25) == doctest::Approx(1.0));
    CHECK(eval_bfunction(B, -0.25) == doctest::Approx(1.0));
    CHECK(eval_bfunction(B, 0.75) == doctest::Approx(0.0));
}

TEST_CASE("two-point recipes store the doubled step") {
    BFunction1D B = build_bfunction(make_activation(ActivationId::sigmoid), 1.0);
    CHECK(B.k == 1);
    CHECK(B.fd_step == 2.0);
    // (1/2)(sigmoid(1) - sigmoid(-1)) = tanh(1/2)/2
    CHECK(eval_bfunction(B, 0.0) == doctest::Approx(0.23105857863000487).epsilon(1e-14));

    BFunction1D A = build_bfunction(make_activation(ActivationId::arctan), 1.0);
    CHECK(eval_bfunction(A, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("central difference reference values") {
    auto square = [](double x) { return x * x; };
    // second difference of x^2 is 2 h^2
    CHECK(central_difference(square, 2, 0.1, 3.0) == doctest::Approx(0.02).epsilon(1e-10));
    auto affine = [](double x) { return 3.0 * x - 2.0; };
    CHECK(central_difference(affine, 2, 0.7, 1.3) == doctest::Approx(0.0));
    auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    CHECK(central_difference(sigmoid, 1, 2.0, 0.0) ==
          doctest::Approx(std::tanh(0.5)).epsilon(1e-14));
}

TEST_CASE("uniform-sum density reference values") {
    CHECK(irwin_hall_density(1, 0.0) == doctest::Approx(1.0));
    CHECK(irwin_hall_density(2, 0.0) == doctest::Approx(1.0));
    CHECK(irwin_hall_density(3, 0.0) == doctest::Approx(0.75));
    CHECK(irwin_hall_density(4, 0.0) == doctest::Approx(2.0 / 3.0));
    CHECK(irwin_hall_density(3, 2.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(irwin_hall_density(0, 0.0), std::invalid_argument);
}

TEST_CASE("signed integrals match the closed forms") {
    const double tol = 1e-8;
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::sigmoid), 1.0), tol) ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::tanh), 2.0), tol) ==
          doctest::Approx(2.0).epsilon(1e-7));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::gelu), 0.5), tol) ==
          doctest::Approx(0.25).epsilon(1e-7));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::elu), 1.0), tol) ==
          doctest::Approx(0.2).epsilon(1e-7));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::gaussian), 1.0), tol) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0),
                          tol) == doctest::Approx(1.0).epsilon(1e-10));
    // sign rides along with negative h
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::sigmoid), -1.0), tol) ==
          doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(signed_integral(build_bfunction(make_activation(ActivationId::gelu), -1.0), tol) ==
          doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("softplus signed integral follows the square envelope for small h") {
    const double v = signed_integral(build_bfunction(make_activation(ActivationId::softplus), 0.5),
                                     1e-8);
    CHECK(v == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(v <= std::min(1.0, 0.25) + 1e-9);
}

TEST_CASE("absolute integrals respect the stated bounds") {
    CHECK(abs_integral(build_bfunction(make_activation(ActivationId::gelu), 1.0), 1e-8) <=
          3.7 + 1e-9);
    CHECK(abs_integral(build_bfunction(make_activation(ActivationId::silu), 1.0), 1e-8) <=
          5.2 + 1e-9);
    CHECK(abs_integral(build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0),
                       1e-10) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tail masses") {
    const auto relu = make_activation(ActivationId::repu, {{"q", 1.0}});
    CHECK(tail_mass(build_bfunction(relu, 1.0), 1.0, 1.5, 1e-9) == 0.0);

    BFunction1D G = build_bfunction(make_activation(ActivationId::gaussian), 1.0);
    CHECK(tail_mass(G, 1.0, 3.0, 1e-12) / std::sqrt(M_PI) ==
          doctest::Approx(std::erfc(3.0)).epsilon(1e-4));

    BFunction1D S = build_bfunction(make_activation(ActivationId::sigmoid), 1.0);
    const double tail = tail_mass(S, 0.1, 1.0, 1e-9);
    const double l1 = abs_integral(S, 1e-9);
    CHECK(tail <= 0.1 * l1); // far below the scale-over-radius envelope
}

TEST_CASE("evenness of the symmetric recipes") {
    for (auto id : {ActivationId::sigmoid, ActivationId::tanh, ActivationId::arctan,
                    ActivationId::softplus, ActivationId::gelu, ActivationId::silu}) {
        BFunction1D B = build_bfunction(make_activation(id), 1.0);
        for (double x : {0.3, 1.1, 2.7}) {
            CHECK(eval_bfunction(B, x) == doctest::Approx(eval_bfunction(B, -x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("forward and backward variants shift but keep the integral") {
    const auto relu = make_activation(ActivationId::repu, {{"q", 1.0}});
    BFunction1D c = build_bfunction(relu, 1.0, FdVariant::central);
    BFunction1D f = build_bfunction(relu, 1.0, FdVariant::forward);
    BFunction1D b = build_bfunction(relu, 1.0, FdVariant::backward);
    CHECK(eval_bfunction(f, -1.0) == doctest::Approx(eval_bfunction(c, 0.0)));
    CHECK(eval_bfunction(b, 1.0) == doctest::Approx(eval_bfunction(c, 0.0)));
    const double tol = 1e-9;
    CHECK(signed_integral(f, tol) == doctest::Approx(signed_integral(c, tol)).epsilon(1e-8));
    CHECK(signed_integral(b, tol) == doctest::Approx(signed_integral(c, tol)).epsilon(1e-8));

    BFunction1D sf = build_bfunction(make_activation(ActivationId::sigmoid), 1.0, FdVariant::forward);
    CHECK(signed_integral(sf, tol) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("zero step is rejected and json carries the term list") {
    CHECK_THROWS_AS(build_bfunction(make_activation(ActivationId::sigmoid), 0.0),
                    std::invalid_argument);
    BFunction1D B = build_bfunction(make_activation(ActivationId::gelu), 1.0);
    const auto j = bfunction_json(B);
    CHECK(j.at("k") == 2);
    CHECK(j.at("terms").size() == 3);
    CHECK(j.at("closed_form_facts").at("signed_integral") == 1.0);
}
