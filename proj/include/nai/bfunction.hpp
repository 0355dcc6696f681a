#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nai/activation.hpp"

namespace nai {

enum class FdVariant { central, forward, backward };

std::string to_string(FdVariant v);

/// One neuron of the combination B(x) = sum_i alpha_i * sigma(w_i x + b_i).
struct Term {
    double alpha;
    double w;
    double b;
};

/// Constants known in closed form for a recipe. Unset fields mean the
/// recipe has no exact value or stated bound for that quantity.
struct ClosedFormFacts {
    std::optional<double> signed_integral;
    std::optional<double> abs_integral_bound;
    std::optional<double> sup_bound;
    std::optional<std::pair<double, double>> support;
};

/// A 1-D B-function: the k-order finite difference of an activation, scaled
/// by the recipe prefactor and stored as an explicit term list. The term
/// list is the ground truth for evaluation; closed forms are never used.
struct BFunction1D {
    ActivationSpec spec;
    int k = 1;
    double h = 1.0;
    /// Step actually used in the difference terms. Equals h except for the
    /// two-point recipes (sigmoid family), where sigma(x+h) - sigma(x-h) is
    /// a k=1 central difference with step 2h.
    double fd_step = 1.0;
    FdVariant variant = FdVariant::central;
    std::vector<Term> terms;
    ClosedFormFacts facts;
};

BFunction1D build_bfunction(const ActivationSpec& spec, double h,
                            FdVariant variant = FdVariant::central);

/// The finite sum over terms, exactly as stored.
double eval_bfunction(const BFunction1D& B, double x);

/// k-order central difference sum_i (-1)^i C(k,i) sigma(x + (k/2 - i) h).
double central_difference(const std::function<double(double)>& sigma, int k,
                          double h, double x);

/// Density of the sum of r independent uniforms on [-1/2, 1/2], via the
/// alternating-sum formula. Supported on [-r/2, r/2].
double irwin_hall_density(int r, double x);

/// Numeric integral of B over the real line within tol, using adaptive
/// quadrature over a truncation window grown until the neglected tail is
/// negligible (exact support for RePU).
double signed_integral(const BFunction1D& B, double tol);

/// Numeric integral of |B| over the real line within tol.
double abs_integral(const BFunction1D& B, double tol);

/// Raw tail mass of the rescaled kernel: the integral of
/// |theta^{-1} B(y/theta)| over |y| > delta, equal to the integral of |B(u)|
/// over |u| > delta/theta. Callers divide by |signed integral| when they
/// need the unit-mass normalization.
double tail_mass(const BFunction1D& B, double theta, double delta, double tol);

nlohmann::json bfunction_json(const BFunction1D& B);

/// C(n, k) as an exact double for n <= 60.
double binomial(int n, int k);

} // namespace nai
