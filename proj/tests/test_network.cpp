#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nai/network.hpp"
#include "nai/riemann.hpp"
#include "nai/rng.hpp"
#include "nai/targets.hpp"

using namespace nai;

namespace {

// direct summation of the defining formula, independent of the flattened
// forward pass
double quadrature_formula(const std::function<double(double)>& f, const BFunction1D& B,
                          double theta, int m, double norm, double x) {
    Partition1D p = uniform_partition(m);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        const double width = p.knots[j + 1] - p.knots[j];
        double kernel = 0.0;
        for (const Term& t : B.terms) {
            kernel += t.alpha * eval_activation(B.spec, (t.w / theta) * (x - p.points[j]) + t.b);
        }
        sum += width * f(p.points[j]) * kernel / (theta * norm);
    }
    return sum;
}

double mc_formula(const std::function<double(const std::vector<double>&)>& f,
                  const ComposedB& cb, const LayeredNetwork& net,
                  const std::vector<double>& x) {
    const double volume = std::ldexp(1.0, cb.n);
    double sum = 0.0;
    std::vector<double> u(cb.n);
    for (const auto& center : net.centers) {
        for (int d = 0; d < cb.n; ++d) u[d] = (x[d] - center[d]) / net.theta;
        sum += f(center) * eval_composed(cb, u);
    }
    return volume * sum /
           (static_cast<double>(net.centers.size()) * std::pow(net.theta, cb.n) * net.normalizer);
}

} // namespace

TEST_CASE("zero target gives the zero network") {
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0);
    LayeredNetwork net = build_quadrature_network_1d([](double) { return 0.0; }, B, 0.1, 16);
    for (double x : {-0.7, 0.0, 0.3}) CHECK(eval_network(net, x) == 0.0);
}

TEST_CASE("quadrature network equals its defining formula") {
    Target hat = make_hat(1);
    auto f1 = [&hat](double x) { return hat.f({x}); };
    for (auto id : {ActivationId::repu, ActivationId::sigmoid, ActivationId::gelu}) {
        ActivationSpec spec = id == ActivationId::repu
                                  ? make_activation(id, {{"q", 1.0}})
                                  : make_activation(id);
        BFunction1D B = build_bfunction(spec, 1.0);
        LayeredNetwork net = build_quadrature_network_1d(f1, B, 0.2, 25);
        CHECK(net.neuron_count == 25 * (B.k + 1));
        RngStream rng(3);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform_sym(1.2);
            const double direct = eval_network(net, x);
            const double formula = quadrature_formula(f1, B, 0.2, 25, net.normalizer, x);
            CHECK(direct == doctest::Approx(formula).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-cell network is the rescaled kernel at the midpoint") {
    Target hat = make_hat(1);
    auto f1 = [&hat](double x) { return hat.f({x}); };
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0);
    LayeredNetwork net = build_quadrature_network_1d(f1, B, 1.0, 1);
    // one cell of width 2 at midpoint 0: output = 2 f(0) B(x) / normalizer
    for (double x : {-0.5, 0.0, 0.4, 0.9}) {
        CHECK(eval_network(net, x) == doctest::Approx(2.0 * eval_bfunction(B, x)).epsilon(1e-12));
    }
}

TEST_CASE("mc network reproduces the sampled-branch formula") {
    Target bump = make_radial_bump(2);
    ComposedB cb = make_composed(make_activation(ActivationId::repu, {{"q", 1.0}}), 2);
    LayeredNetwork net = build_mc_network(bump.f, cb, 0.3, 100, 77);
    CHECK(net.neuron_count == 100 * 2 * 3); // N branches, 2 stages, k+1 = 3 units
    CHECK(static_cast<long>(net.centers.size()) == 100);

    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x = {rng.uniform_sym(), rng.uniform_sym()};
        const double direct = eval_network(net, x);
        const double formula = mc_formula(bump.f, cb, net, x);
        CHECK(direct == doctest::Approx(formula).epsilon(1e-10));
    }
}

TEST_CASE("mc sample draw order is reproducible from the seed") {
    Target hat = make_hat(1);
    ComposedB cb = make_composed(make_activation(ActivationId::repu, {{"q", 1.0}}), 1);
    LayeredNetwork net = build_mc_network(hat.f, cb, 0.5, 1, 123);
    RngStream rng(mix_seed(123, 0));
    const double xi = rng.uniform_sym();
    REQUIRE(net.centers.size() == 1);
    CHECK(net.centers[0][0] == xi);
    // single branch: output = 2 f(xi) B_theta(x - xi)
    const double x = 0.2;
    BFunction1D B = build_bfunction(cb.base, 1.0);
    const double expected = 2.0 * hat.f({xi}) * eval_bfunction(B, (x - xi) / 0.5) / 0.5;
    CHECK(eval_network(net, x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("error budget composition") {
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0);
    auto lip = [](double h) { return h; };

    ErrorBudget eb = error_budget(lip, 0.1, 0.1, B, 0.01, 1.0, 1, 1e-9);
    CHECK(eb.modulus_delta == doctest::Approx(0.1));
    CHECK(eb.modulus_partition == doctest::Approx(0.2));
    CHECK(eb.tail == 0.0); // kernel support 0.01 inside radius 0.1
    CHECK(eb.total == doctest::Approx(0.3));

    auto zero = [](double) { return 0.0; };
    ErrorBudget flat = error_budget(zero, 0.1, 0.1, B, 0.01, 1.0, 1, 1e-9);
    CHECK(flat.modulus_delta == 0.0);
    CHECK(flat.modulus_partition == 0.0);

    // vanishing delta pushes the whole kernel mass into the tail term
    ErrorBudget all_tail = error_budget(lip, 1e-6, 0.1, B, 1.0, 1.0, 1, 1e-9);
    CHECK(all_tail.tail == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("compactified targets agree on the inner box and vanish outside") {
    auto one = [](const std::vector<double>&) { return 1.0; };
    auto ext = compactify_target(one, 0.5, 1);
    CHECK(ext({0.3}) == doctest::Approx(1.0));
    CHECK(ext({1.0}) == 0.0);
    CHECK(ext({0.75}) > 0.0);
    CHECK(ext({0.75}) < 1.0);

    auto ident = [](const std::vector<double>& x) { return x[0]; };
    auto ext2 = compactify_target(ident, 0.5, 1);
    CHECK(ext2({0.25}) == doctest::Approx(0.25));

    CHECK_THROWS_AS(compactify_target(one, 0.8, 1), std::invalid_argument);
    CHECK_THROWS_AS(compactify_target(one, 0.0, 1), std::invalid_argument);
}

TEST_CASE("json round-trip preserves evaluation exactly") {
    Target hat = make_hat(1);
    auto f1 = [&hat](double x) { return hat.f({x}); };
    BFunction1D B = build_bfunction(make_activation(ActivationId::sigmoid), 1.0);
    LayeredNetwork net = build_quadrature_network_1d(f1, B, 0.25, 2);

    nlohmann::json j = export_network(net);
    CHECK(j.at("layers").at(0).at("weights").size() == 4); // m (k+1) = 2 * 2
    CHECK(j.at("metadata").at("neuron_count") == 4);

    LayeredNetwork back = import_network(nlohmann::json::parse(j.dump()));
    RngStream rng(17);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform_sym(1.5);
        CHECK(eval_network(net, x) == eval_network(back, x));
    }

    nlohmann::json broken = j;
    broken.erase("layers");
    CHECK_THROWS_AS(import_network(broken), std::invalid_argument);
}

TEST_CASE("mc network json round-trip") {
    Target bump = make_radial_bump(2);
    ComposedB cb = make_composed(make_activation(ActivationId::sigmoid), 2);
    LayeredNetwork net = build_mc_network(bump.f, cb, 0.4, 20, 9);

    LayeredNetwork back = import_network(nlohmann::json::parse(export_network(net).dump()));
    RngStream rng(19);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {rng.uniform_sym(), rng.uniform_sym()};
        CHECK(eval_network(net, x) == eval_network(back, x));
    }
}

TEST_CASE("deterministic convergence of the 1-D builder") {
    Target hat = make_hat(1);
    auto f1 = [&hat](double x) { return hat.f({x}); };
    BFunction1D B = build_bfunction(make_activation(ActivationId::repu, {{"q", 1.0}}), 1.0);

    // kernel width equal to the mesh keeps the Riemann sum resolved, so
    // refinement genuinely shrinks the error
    auto sup_error = [&](int m) {
        const double pnorm = 2.0 / m;
        LayeredNetwork net = build_quadrature_network_1d(f1, B, pnorm, m);
        double sup = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -1.0 + 2.0 * i / 2000.0;
            sup = std::max(sup, std::abs(eval_network(net, x) - f1(x)));
        }
        return sup;
    };
    CHECK(sup_error(512) < 0.25 * sup_error(32));
}
