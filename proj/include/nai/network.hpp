#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nai/bfunction.hpp"
#include "nai/composed.hpp"

namespace nai {

/// A network with predetermined weights. Two shapes exist:
///  - quadrature1d: one hidden layer realizing the kernel-smoothed Riemann
///    sum of a 1-D target; unit (cell j, term l) has weight w_l/theta, bias
///    b_l - (w_l/theta) xi_j and output coefficient
///    (z_{j+1} - z_j) f(xi_j) alpha_l / (theta * normalizer).
///  - mc_nested: N sample branches, each threading the n coordinates through
///    k+1 units per stage; stage unit l computes
///    sigma((x_i - xi_i)/theta + offset_l * h) with h the combined previous
///    stage value (1 innermost), and branches are averaged with coefficients
///    2^n f(xi^j) / (N theta^n normalizer).
/// Output coefficients fold in 1/normalizer so the kernel has unit mass.
struct LayeredNetwork {
    enum class Kind { quadrature1d, mc_nested };

    Kind kind = Kind::quadrature1d;
    ActivationSpec activation;
    FdVariant variant = FdVariant::central;
    double theta = 1.0;
    int dims = 1;
    double normalizer = 1.0;

    // quadrature1d: flat hidden layer
    std::vector<double> hidden_w;
    std::vector<double> hidden_b;
    std::vector<double> output_coefficients;

    // mc_nested: stage structure shared by all branches plus per-branch data
    std::vector<double> stage_offsets;          // offset_l, length k+1
    std::vector<double> combine;                // scale * (-1)^l * C(k,l)
    std::vector<std::vector<double>> centers;   // N x dims sample centers
    std::vector<double> branch_coefficients;    // length N

    long m_or_samples = 0;
    std::uint64_t seed = 0;
    std::string recipe;
    long neuron_count = 0;
};

/// One-hidden-layer network for a target supported in [-1, 1], built on the
/// midpoint partition with m cells. m*(k+1) hidden units.
LayeredNetwork build_quadrature_network_1d(const std::function<double(double)>& f,
                                           const BFunction1D& B, double theta, int m);

/// Monte-Carlo network averaging N kernel branches at uniform random
/// centers in [-1,1]^n; deterministic given seed. The kernel normalizer
/// comes from make_approximate_identity (exact quadrature for n = 1, seeded
/// Monte Carlo otherwise). N*n*(k+1) stage units.
LayeredNetwork build_mc_network(const std::function<double(const std::vector<double>&)>& f,
                                const ComposedB& cb, double theta, long N,
                                std::uint64_t seed, long normalizer_budget = 200000,
                                int workers = 1);

double eval_network(const LayeredNetwork& net, const std::vector<double>& x);
double eval_network(const LayeredNetwork& net, double x);

/// The three-term error budget: modulus at delta, 2^n times the modulus at
/// the mesh norm, and twice the target sup norm times the normalized kernel
/// tail mass outside delta. total is their sum; the budget is an
/// upper-bound surrogate with these explicit constants.
struct ErrorBudget {
    double modulus_delta = 0.0;
    double modulus_partition = 0.0;
    double tail = 0.0;
    double total = 0.0;
};

ErrorBudget error_budget(const std::function<double(double)>& modulus, double delta,
                         double partition_norm, const BFunction1D& B, double theta,
                         double f_sup, int dims, double tol);

/// Extends a function on [-b,b]^n to [-1,1]^n: the clamped extension times
/// a per-coordinate smoothstep cutoff that is 1 on [-b,b] and 0 outside
/// [-1,1]. Agrees with g on [-b,b]^n exactly. Requires 0 < sqrt(2) b < 1.
std::function<double(const std::vector<double>&)> compactify_target(
    std::function<double(const std::vector<double>&)> g, double b, int dims);

nlohmann::json export_network(const LayeredNetwork& net);
LayeredNetwork import_network(const nlohmann::json& j);

} // namespace nai
