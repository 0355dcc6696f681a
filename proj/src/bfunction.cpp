#include "nai/bfunction.hpp"

#include <cmath>
#include <stdexcept>

#include "nai/integrate.hpp"

namespace nai {

namespace {

bool is_two_point_recipe(ActivationId id) {
    return id == ActivationId::sigmoid || id == ActivationId::tanh ||
           id == ActivationId::arctan || id == ActivationId::generalized_sigmoid;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// (u)_+^p with the step convention (u)_+^0 = 1 for u > 0, 0 otherwise.
double pos_pow(double u, int p) {
    if (u <= 0.0) return 0.0;
    if (p == 0) return 1.0;
    return std::pow(u, p);
}

// Offset multiplier c_i so that the i-th term evaluates sigma(x + c_i * step).
double offset_factor(FdVariant v, int k, int i) {
    switch (v) {
        case FdVariant::central: return 0.5 * k - i;
        case FdVariant::forward: return static_cast<double>(k - i);
        case FdVariant::backward: return static_cast<double>(-i);
    }
    return 0.0;
}

ClosedFormFacts make_facts(const ActivationSpec& spec, double h, FdVariant variant) {
    ClosedFormFacts facts;
    const double ah = std::abs(h);
    switch (spec.id) {
        case ActivationId::repu: {
            const int q = static_cast<int>(std::lround(spec.param("q")));
            const int r = q + 1;
            facts.signed_integral = std::pow(h, q) * ah;
            facts.abs_integral_bound = std::pow(ah, q + 1);
            facts.sup_bound = std::pow(ah, q) * irwin_hall_density(r, 0.0);
            // forward/backward variants are shifts of the central one, so the
            // support box shifts by -+ r*h/2
            double shift = 0.0;
            if (variant == FdVariant::forward) shift = -0.5 * r * h;
            if (variant == FdVariant::backward) shift = 0.5 * r * h;
            facts.support = std::make_pair(-0.5 * r * ah + shift, 0.5 * r * ah + shift);
            break;
        }
        case ActivationId::sigmoid:
        case ActivationId::tanh:
        case ActivationId::arctan:
            facts.signed_integral = h;
            facts.abs_integral_bound = ah;
            break;
        case ActivationId::generalized_sigmoid:
            facts.signed_integral = h;
            // monotone logistic base gives a one-signed B; custom bases may not
            if (!spec.custom_eval) facts.abs_integral_bound = ah;
            break;
        case ActivationId::softplus:
            // only the envelope bound min{1, h^2} is stated for this recipe;
            // no exact value or sup is recorded
            break;
        case ActivationId::elu:
            facts.signed_integral = h * h / elu_gamma(spec.param("alpha"));
            break;
        case ActivationId::gelu:
            facts.signed_integral = h * h;
            facts.abs_integral_bound = 3.7 * h * h;
            facts.sup_bound = h * h / std::sqrt(2.0 * M_PI);
            break;
        case ActivationId::silu:
            facts.signed_integral = h * h;
            facts.abs_integral_bound = 5.2 * h * h;
            facts.sup_bound = 0.5 * h * h;
            break;
        case ActivationId::mish:
            break;
        case ActivationId::gaussian:
            facts.signed_integral = std::sqrt(M_PI);
            facts.abs_integral_bound = std::sqrt(M_PI);
            facts.sup_bound = 1.0;
            break;
        case ActivationId::custom:
            break;
    }
    return facts;
}

} // namespace

std::string to_string(FdVariant v) {
    switch (v) {
        case FdVariant::central: return "central";
        case FdVariant::forward: return "forward";
        case FdVariant::backward: return "backward";
    }
    return "unknown";
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

BFunction1D build_bfunction(const ActivationSpec& spec, double h, FdVariant variant) {
    if (h == 0.0 || !std::isfinite(h)) throw std::invalid_argument("build_bfunction: h must be finite and nonzero");

    BFunction1D B;
    B.spec = spec;
    B.k = spec.fd_order_k;
    B.h = h;
    B.fd_step = is_two_point_recipe(spec.id) ? 2.0 * h : h;
    B.variant = variant;

    const double scale = spec.recipe_scale;
    if (B.k == 0) {
        B.terms.push_back({scale, 1.0, 0.0});
    } else {
        double sign = 1.0;
        for (int i = 0; i <= B.k; ++i) {
            B.terms.push_back({scale * sign * binomial(B.k, i), 1.0,
                               offset_factor(variant, B.k, i) * B.fd_step});
            sign = -sign;
        }
    }
    B.facts = make_facts(spec, h, variant);
    return B;
}

double eval_bfunction(const BFunction1D& B, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("eval_bfunction: x must be finite");
    double sum = 0.0;
    for (const Term& t : B.terms) sum += t.alpha * eval_activation(B.spec, t.w * x + t.b);
    return sum;
}

double central_difference(const std::function<double(double)>& sigma, int k,
                          double h, double x) {
    if (k < 1) throw std::invalid_argument("central_difference: k must be >= 1");
    if (!std::isfinite(h) || !std::isfinite(x))
        throw std::invalid_argument("central_difference: inputs must be finite");
    double sum = 0.0;
    double sign = 1.0;
    for (int i = 0; i <= k; ++i) {
        sum += sign * binomial(k, i) * sigma(x + (0.5 * k - i) * h);
        sign = -sign;
    }
    return sum;
}

double irwin_hall_density(int r, double x) {
    if (r < 1) throw std::invalid_argument("irwin_hall_density: r must be >= 1");
    double sum = 0.0;
    double sign = 1.0;
    for (int i = 0; i <= r; ++i) {
        sum += sign * binomial(r, i) * pos_pow(x + 0.5 * r - i, r - 1);
        sign = -sign;
    }
    return sum / factorial(r - 1);
}

namespace {

// Integral of f over the real line by adaptive quadrature on a growing
// window. Shells [R, 2R] on each side are appended until the absolute shell
// mass drops below stop_thresh; unimodal decay of |B| away from the peak
// region makes that a sound stopping rule once R clears the term offsets.
double integrate_line(const std::function<double(double)>& f,
                      const std::function<double(double)>& f_abs,
                      double r0, double min_stop_radius, double tol,
                      double stop_thresh) {
    double total = integrate(f, -r0, r0, 0.5 * tol);
    double r = r0;
    for (int shell = 0; shell < 200; ++shell) {
        const double r2 = 2.0 * r;
        const double shell_tol = tol / 16.0;
        const double mass = integrate(f_abs, r, r2, shell_tol) +
                            integrate(f_abs, -r2, -r, shell_tol);
        total += integrate(f, r, r2, shell_tol) + integrate(f, -r2, -r, shell_tol);
        r = r2;
        if (mass < stop_thresh && r >= min_stop_radius) return total;
    }
    throw QuadratureBudgetError("integrate_line: tail did not decay within the shell budget",
                                total, stop_thresh);
}

// Shell threshold accounting for how fast the tail decays: polynomial tails
// (custom generalized sigmoids with decay exponent alpha) leave a geometric
// remainder sum of ratio 2^-alpha behind the last shell.
double stopping_threshold(const BFunction1D& B, double tol) {
    double thresh = 0.25 * tol;
    if (B.spec.id == ActivationId::generalized_sigmoid && B.spec.custom_eval) {
        const double alpha = B.spec.param("decay_alpha");
        thresh *= std::max(1.0 - std::pow(2.0, -alpha), 1e-3);
    }
    return thresh;
}

double max_term_offset(const BFunction1D& B) {
    double m = 0.0;
    for (const Term& t : B.terms) m = std::max(m, std::abs(t.b));
    return m;
}

} // namespace

double signed_integral(const BFunction1D& B, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("signed_integral: tol must be positive");
    auto f = [&B](double x) { return eval_bfunction(B, x); };
    if (B.facts.support) {
        return integrate(f, B.facts.support->first, B.facts.support->second, tol);
    }
    auto fa = [&B](double x) { return std::abs(eval_bfunction(B, x)); };
    const double r0 = std::max(10.0, max_term_offset(B) + 5.0);
    return integrate_line(f, fa, r0, r0, tol, stopping_threshold(B, tol));
}

double abs_integral(const BFunction1D& B, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("abs_integral: tol must be positive");
    auto fa = [&B](double x) { return std::abs(eval_bfunction(B, x)); };
    if (B.facts.support) {
        return integrate(fa, B.facts.support->first, B.facts.support->second, tol);
    }
    const double r0 = std::max(10.0, max_term_offset(B) + 5.0);
    return integrate_line(fa, fa, r0, r0, tol, stopping_threshold(B, tol));
}

double tail_mass(const BFunction1D& B, double theta, double delta, double tol) {
    if (!(theta > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("tail_mass: theta and delta must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_mass: tol must be positive");
    const double a = delta / theta;
    if (B.facts.support &&
        B.facts.support->first >= -a && B.facts.support->second <= a) {
        return 0.0;
    }
    auto fa = [&B](double x) { return std::abs(eval_bfunction(B, x)); };
    if (B.facts.support) {
        double total = 0.0;
        const auto [lo, hi] = *B.facts.support;
        if (lo < -a) total += integrate(fa, lo, -a, 0.5 * tol);
        if (hi > a) total += integrate(fa, a, hi, 0.5 * tol);
        return total;
    }
    const double min_stop = std::max(10.0, max_term_offset(B) + 5.0);
    const double thresh = stopping_threshold(B, tol);
    double total = 0.0;
    double r = a;
    for (int shell = 0; shell < 200; ++shell) {
        const double r2 = 2.0 * std::max(r, 1.0);
        const double shell_tol = tol / 16.0;
        const double mass = integrate(fa, r, r2, shell_tol) +
                            integrate(fa, -r2, -r, shell_tol);
        total += mass;
        r = r2;
        if (mass < thresh && r >= min_stop) return total;
    }
    throw QuadratureBudgetError("tail_mass: tail did not decay within the shell budget",
                                total, thresh);
}

nlohmann::json bfunction_json(const BFunction1D& B) {
    nlohmann::json j;
    j["activation"] = activation_json(B.spec);
    j["k"] = B.k;
    j["h"] = B.h;
    j["fd_step"] = B.fd_step;
    j["variant"] = to_string(B.variant);
    j["terms"] = nlohmann::json::array();
    for (const Term& t : B.terms) {
        j["terms"].push_back({{"alpha", t.alpha}, {"w", t.w}, {"b", t.b}});
    }
    nlohmann::json facts;
    if (B.facts.signed_integral) facts["signed_integral"] = *B.facts.signed_integral;
    if (B.facts.abs_integral_bound) facts["abs_integral_bound"] = *B.facts.abs_integral_bound;
    if (B.facts.sup_bound) facts["sup_bound"] = *B.facts.sup_bound;
    if (B.facts.support) facts["support"] = {B.facts.support->first, B.facts.support->second};
    j["closed_form_facts"] = facts;
    return j;
}

} // namespace nai
