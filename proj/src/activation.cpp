#include "nai/activation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nai {

namespace {

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus_fn(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// RePU(q; x) = x^q for x > 0, 0 for x < 0. At x = 0 the value is the 0^0 = 1
// branch for q = 0 (so the Heaviside step is right-continuous) and 0 for q >= 1.
double repu_fn(int q, double x) {
    if (x < 0.0) return 0.0;
    if (q == 0) return 1.0;
    if (x == 0.0) return 0.0;
    if (q <= 4) {
        double p = x;
        for (int i = 1; i < q; ++i) p *= x;
        return p;
    }
    return std::pow(x, q);
}

double mish_fn(double x) { return x * std::tanh(softplus_fn(x)); }

double mish_d1(double x) {
    const double sp = softplus_fn(x);
    const double t = std::tanh(sp);
    const double s = logistic(x); // softplus'(x)
    return t + x * (1.0 - t * t) * s;
}

int require_int_param(const ActivationSpec& spec, const std::string& key) {
    const double v = spec.param(key);
    const double r = std::round(v);
    if (std::abs(v - r) > 0.0) throw std::invalid_argument("parameter '" + key + "' must be an integer");
    return static_cast<int>(r);
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// 4th-order central difference of g, step per the documented rule
// h = cbrt(machine epsilon) * max(1, |x|).
double central_d1(const std::function<double(double)>& g, double x) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
    return (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h);
}

} // namespace

double elu_gamma(double alpha) {
    return std::max(1.0 + 4.0 * std::abs(alpha), 2.0 + std::abs(alpha));
}

std::string to_string(ActivationId id) {
    switch (id) {
        case ActivationId::repu: return "repu";
        case ActivationId::sigmoid: return "sigmoid";
        case ActivationId::tanh: return "tanh";
        case ActivationId::softplus: return "softplus";
        case ActivationId::arctan: return "arctan";
        case ActivationId::generalized_sigmoid: return "generalized_sigmoid";
        case ActivationId::elu: return "elu";
        case ActivationId::gelu: return "gelu";
        case ActivationId::silu: return "silu";
        case ActivationId::mish: return "mish";
        case ActivationId::gaussian: return "gaussian";
        case ActivationId::custom: return "custom";
    }
    return "unknown";
}

ActivationId activation_id_from_string(const std::string& name) {
    static const std::map<std::string, ActivationId> table = {
        {"repu", ActivationId::repu},
        {"relu", ActivationId::repu},
        {"sigmoid", ActivationId::sigmoid},
        {"tanh", ActivationId::tanh},
        {"softplus", ActivationId::softplus},
        {"arctan", ActivationId::arctan},
        {"generalized_sigmoid", ActivationId::generalized_sigmoid},
        {"elu", ActivationId::elu},
        {"gelu", ActivationId::gelu},
        {"silu", ActivationId::silu},
        {"mish", ActivationId::mish},
        {"gaussian", ActivationId::gaussian},
        {"custom", ActivationId::custom},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown activation: " + name);
    return it->second;
}

double ActivationSpec::param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("missing parameter '" + key + "' for " + name());
    return it->second;
}

std::string ActivationSpec::name() const {
    if (id == ActivationId::custom && !custom_name.empty()) return custom_name;
    return to_string(id);
}

ActivationSpec make_activation(ActivationId id, const std::map<std::string, double>& params) {
    ActivationSpec spec;
    spec.id = id;
    spec.params = params;
    switch (id) {
        case ActivationId::repu: {
            if (!params.count("q")) spec.params["q"] = 1.0;
            const int q = require_int_param(spec, "q");
            if (q < 0) throw std::invalid_argument("repu: q must be a nonnegative integer");
            spec.repu_q = q;
            spec.fd_order_k = q + 1;
            spec.recipe_scale = 1.0 / factorial(q);
            break;
        }
        case ActivationId::sigmoid:
            spec.fd_order_k = 1;
            spec.recipe_scale = 0.5;
            break;
        case ActivationId::tanh:
            spec.fd_order_k = 1;
            spec.recipe_scale = 0.25;
            break;
        case ActivationId::softplus:
            spec.fd_order_k = 2;
            spec.recipe_scale = 1.0;
            break;
        case ActivationId::arctan:
            spec.fd_order_k = 1;
            spec.recipe_scale = 1.0 / (2.0 * M_PI);
            break;
        case ActivationId::generalized_sigmoid: {
            const double L = spec.param("L");
            const double ell = spec.param("ell");
            const double alpha = spec.param("decay_alpha");
            if (!(ell < L)) throw std::invalid_argument("generalized_sigmoid: requires ell < L");
            if (!(alpha > 0.0)) throw std::invalid_argument("generalized_sigmoid: requires decay_alpha > 0");
            spec.fd_order_k = 1;
            spec.recipe_scale = 1.0 / (2.0 * (L - ell));
            break;
        }
        case ActivationId::elu: {
            if (!params.count("alpha")) spec.params["alpha"] = 1.0;
            spec.fd_order_k = 2;
            spec.recipe_scale = 1.0 / elu_gamma(spec.param("alpha"));
            break;
        }
        case ActivationId::gelu:
        case ActivationId::silu:
        case ActivationId::mish:
            spec.fd_order_k = 2;
            spec.recipe_scale = 1.0;
            break;
        case ActivationId::gaussian:
            spec.fd_order_k = 0;
            spec.recipe_scale = 1.0;
            break;
        case ActivationId::custom:
            throw std::invalid_argument("use make_custom for custom activations");
    }
    return spec;
}

ActivationSpec make_custom(std::string name, std::function<double(double)> eval,
                           int fd_order_k, double recipe_scale) {
    if (fd_order_k < 0) throw std::invalid_argument("custom: fd_order_k must be nonnegative");
    ActivationSpec spec;
    spec.id = ActivationId::custom;
    spec.custom_name = std::move(name);
    spec.custom_eval = std::move(eval);
    spec.fd_order_k = fd_order_k;
    spec.recipe_scale = recipe_scale;
    return spec;
}

double eval_activation(const ActivationSpec& spec, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("eval_activation: x must be finite");
    switch (spec.id) {
        case ActivationId::repu:
            return repu_fn(spec.repu_q, x);
        case ActivationId::sigmoid:
            return logistic(x);
        case ActivationId::tanh:
            return std::tanh(x);
        case ActivationId::softplus:
            return softplus_fn(x);
        case ActivationId::arctan:
            return std::atan(x);
        case ActivationId::generalized_sigmoid: {
            const double L = spec.param("L");
            const double ell = spec.param("ell");
            const double base = spec.custom_eval ? spec.custom_eval(x) : logistic(x);
            return ell + (L - ell) * base;
        }
        case ActivationId::elu: {
            const double alpha = spec.param("alpha");
            return x > 0.0 ? x : alpha * std::expm1(x);
        }
        case ActivationId::gelu:
            return x * normal_cdf(x);
        case ActivationId::silu:
            return x * logistic(x);
        case ActivationId::mish:
            return mish_fn(x);
        case ActivationId::gaussian:
            return std::exp(-x * x);
        case ActivationId::custom:
            return spec.custom_eval(x);
    }
    throw std::logic_error("unreachable");
}

double activation_derivative(const ActivationSpec& spec, int order, double x) {
    if (order != 1 && order != 2) throw std::invalid_argument("activation_derivative: order must be 1 or 2");
    if (!std::isfinite(x)) throw std::invalid_argument("activation_derivative: x must be finite");
    switch (spec.id) {
        case ActivationId::repu: {
            const int q = require_int_param(spec, "q");
            if (order > q)
                throw std::invalid_argument("repu: derivative of order " + std::to_string(order) +
                                            " unavailable for q = " + std::to_string(q));
            const double c = order == 1 ? q : static_cast<double>(q) * (q - 1);
            return c * repu_fn(q - order, x);
        }
        case ActivationId::sigmoid: {
            const double s = logistic(x);
            return order == 1 ? s * (1.0 - s) : s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case ActivationId::tanh: {
            const double t = std::tanh(x);
            return order == 1 ? 1.0 - t * t : -2.0 * t * (1.0 - t * t);
        }
        case ActivationId::softplus: {
            const double s = logistic(x);
            return order == 1 ? s : s * (1.0 - s);
        }
        case ActivationId::arctan: {
            const double d = 1.0 + x * x;
            return order == 1 ? 1.0 / d : -2.0 * x / (d * d);
        }
        case ActivationId::generalized_sigmoid: {
            const double L = spec.param("L");
            const double ell = spec.param("ell");
            if (spec.custom_eval) {
                auto g = [&spec, L, ell](double t) { return ell + (L - ell) * spec.custom_eval(t); };
                if (order == 1) return central_d1(g, x);
                return central_d1([&g](double t) { return central_d1(g, t); }, x);
            }
            const double s = logistic(x);
            const double d1 = s * (1.0 - s);
            return (L - ell) * (order == 1 ? d1 : d1 * (1.0 - 2.0 * s));
        }
        case ActivationId::elu: {
            // not classically differentiable at 0 unless alpha = 1; the
            // right-branch value is returned there
            const double alpha = spec.param("alpha");
            if (x >= 0.0) return order == 1 ? 1.0 : 0.0;
            return alpha * std::exp(x);
        }
        case ActivationId::gelu:
            return order == 1 ? normal_cdf(x) + x * normal_pdf(x)
                              : (2.0 - x * x) * normal_pdf(x);
        case ActivationId::silu: {
            const double s = logistic(x);
            if (order == 1) return s + x * s * (1.0 - s);
            return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
        }
        case ActivationId::mish: {
            if (order == 1) return mish_d1(x);
            // no tractable closed form; differentiate the analytic first derivative
            return central_d1(mish_d1, x);
        }
        case ActivationId::gaussian: {
            const double g = std::exp(-x * x);
            return order == 1 ? -2.0 * x * g : (4.0 * x * x - 2.0) * g;
        }
        case ActivationId::custom: {
            auto g = [&spec](double t) { return spec.custom_eval(t); };
            if (order == 1) return central_d1(g, x);
            return central_d1([&g](double t) { return central_d1(g, t); }, x);
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<ActivationSpec> list_catalog() {
    return {
        make_activation(ActivationId::repu, {{"q", 1.0}}),
        make_activation(ActivationId::sigmoid),
        make_activation(ActivationId::tanh),
        make_activation(ActivationId::softplus),
        make_activation(ActivationId::arctan),
        make_activation(ActivationId::elu, {{"alpha", 1.0}}),
        make_activation(ActivationId::gelu),
        make_activation(ActivationId::silu),
        make_activation(ActivationId::mish),
        make_activation(ActivationId::gaussian),
    };
}

nlohmann::json activation_json(const ActivationSpec& spec) {
    nlohmann::json j;
    j["id"] = spec.name();
    j["params"] = spec.params;
    j["fd_order_k"] = spec.fd_order_k;
    j["recipe_scale"] = spec.recipe_scale;
    return j;
}

nlohmann::json catalog_json() {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& spec : list_catalog()) arr.push_back(activation_json(spec));
    return arr;
}

} // namespace nai
