#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace nai {

enum class ActivationId {
    repu,
    sigmoid,
    tanh,
    softplus,
    arctan,
    generalized_sigmoid,
    elu,
    gelu,
    silu,
    mish,
    gaussian,
    custom,
};

std::string to_string(ActivationId id);
ActivationId activation_id_from_string(const std::string& name);

/// A catalogued activation: evaluator parameters plus the constants its
/// B-function recipe needs (finite-difference order k and recipe prefactor).
struct ActivationSpec {
    ActivationId id = ActivationId::sigmoid;
    std::map<std::string, double> params;
    int fd_order_k = 1;
    double recipe_scale = 1.0;
    // cached integer exponent for RePU so evaluation skips the param map
    int repu_q = 0;

    // custom activations only: black-box evaluator and a display name
    std::function<double(double)> custom_eval;
    std::string custom_name;

    double param(const std::string& key) const;
    std::string name() const;
};

/// Builds a catalog entry, validating parameters and filling in the
/// recipe constants (k and the prefactor).
ActivationSpec make_activation(ActivationId id,
                               const std::map<std::string, double>& params = {});

/// Wraps a black-box evaluator as a custom activation with a user-declared
/// finite-difference order. No C1/C2 screening happens here; the
/// verification module decides whether the declared order is plausible.
ActivationSpec make_custom(std::string name, std::function<double(double)> eval,
                           int fd_order_k, double recipe_scale = 1.0);

double eval_activation(const ActivationSpec& spec, double x);

/// Analytic derivative where a closed form is tractable; a 4th-order
/// central-difference fallback on the highest analytic derivative otherwise
/// (Mish at order 2). order must be 1 or 2.
double activation_derivative(const ActivationSpec& spec, int order, double x);

/// Every built-in activation, in a fixed deterministic order. RePU defaults
/// to q = 1 (ReLU) and ELU to alpha = 1; generalized_sigmoid is available
/// through make_activation but is not listed since it needs parameters.
std::vector<ActivationSpec> list_catalog();

nlohmann::json activation_json(const ActivationSpec& spec);
nlohmann::json catalog_json();

/// gamma = max{1 + 4|alpha|, 2 + |alpha|}, the ELU recipe denominator.
double elu_gamma(double alpha);

} // namespace nai
