#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nai/bfunction.hpp"

namespace nai {

/// The n-fold nested kernel built from a 1-D recipe: evaluation threads the
/// stage value through as the next finite-difference step, starting from 1.
struct ComposedB {
    ActivationSpec base;
    FdVariant variant = FdVariant::central;
    int n = 1;
};

ComposedB make_composed(const ActivationSpec& base, int n,
                        FdVariant variant = FdVariant::central);

/// B(x, h) for an arbitrary step, straight from the recipe terms; h = 0
/// returns 0 since every finite-difference term cancels.
double eval_base_b(const ComposedB& cb, double x, double h);

double eval_composed(const ComposedB& cb, const std::vector<double>& x);

/// Exact superset box containing the support, when the recipe has compact
/// support (RePU); none otherwise. Coordinate i gets half-width r*c_i/2
/// where c_i is the largest step magnitude stage i can see.
std::optional<std::vector<double>> composed_support_box(const ComposedB& cb);

/// Half-widths of a box outside which |composed B| integrates to less than
/// about box_tol: the exact support for RePU, a 1-D tail-derived radius in
/// every coordinate otherwise.
std::vector<double> truncation_box(const ComposedB& cb, double box_tol);

struct MonteCarloEstimate {
    double value = 0.0;
    double half_width = 0.0; // 99% confidence
};

struct ComposedIntegrals {
    MonteCarloEstimate signed_integral;
    MonteCarloEstimate abs_integral;
};

/// Integrals of the composed kernel and of its absolute value over the
/// truncation box. n = 1 uses adaptive quadrature (half-widths are the
/// quadrature tolerance); n in {2,3,4} uses seeded Monte Carlo with the
/// budget split across workers as independent streams merged in stream
/// order, so results depend only on (seed, budget, workers).
ComposedIntegrals estimate_integrals(const ComposedB& cb, double tol, long budget,
                                     std::uint64_t seed, int workers = 1);

/// The L1 norm estimate with its 99% confidence half-width. Throws when the
/// budget is exhausted before half_width < tol.
MonteCarloEstimate estimate_l1_norm(const ComposedB& cb, double tol, long budget,
                                    std::uint64_t seed, int workers = 1);

/// The composed kernel rescaled to a unit-mass approximate identity:
/// theta^-n * composed(x/theta) / normalizer.
struct ScaledAI {
    ComposedB composed;
    double theta = 1.0;
    double normalizer = 1.0;
    double l1_ratio = 1.0;
};

ScaledAI make_approximate_identity(const ComposedB& cb, double theta, double tol,
                                   long budget = 1000000, std::uint64_t seed = 0,
                                   int workers = 1);

double eval_scaled(const ScaledAI& ai, const std::vector<double>& x);

/// Tail mass of the scaled kernel outside the radius-delta ball, after the
/// unit-mass normalization. n = 1 only (higher n estimates would need
/// shell Monte Carlo and no consumer requires them).
double scaled_tail_mass(const ScaledAI& ai, double delta, double tol);

/// Uniform-lattice samples of the composed kernel as CSV with header
/// "x1,...,xn,value" over the truncation box, res points per axis. For
/// n = 3 a companion "<path>.levels" file lists isosurface levels at the
/// peak value times {1e-1, 1e-2, 1e-3, 1e-4}. Supports n in {1, 2, 3}.
void write_grid_csv(const ComposedB& cb, int res, const std::string& path);

/// Shortest decimal string that round-trips to the exact binary value.
std::string format_double(double v);

} // namespace nai
