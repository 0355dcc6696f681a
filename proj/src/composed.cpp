#include "nai/composed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nai/integrate.hpp"
#include "nai/rng.hpp"

namespace nai {

namespace {

bool is_two_point_recipe(ActivationId id) {
    return id == ActivationId::sigmoid || id == ActivationId::tanh ||
           id == ActivationId::arctan || id == ActivationId::generalized_sigmoid;
}

double offset_factor(FdVariant v, int k, int i) {
    switch (v) {
        case FdVariant::central: return 0.5 * k - i;
        case FdVariant::forward: return static_cast<double>(k - i);
        case FdVariant::backward: return static_cast<double>(-i);
    }
    return 0.0;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ComposedB make_composed(const ActivationSpec& base, int n, FdVariant variant) {
    if (n < 1) throw std::invalid_argument("make_composed: n must be >= 1");
    if (base.fd_order_k == 0 && n > 1)
        throw std::invalid_argument(
            "make_composed: a step-independent recipe (difference order 0) cannot be composed");
    return {base, variant, n};
}

double eval_base_b(const ComposedB& cb, double x, double h) {
    if (h == 0.0) return 0.0;
    const int k = cb.base.fd_order_k;
    const double scale = cb.base.recipe_scale;
    if (k == 0) return scale * eval_activation(cb.base, x);
    const double step = is_two_point_recipe(cb.base.id) ? 2.0 * h : h;
    double sum = 0.0;
    double sign = 1.0;
    for (int i = 0; i <= k; ++i) {
        sum += sign * binomial(k, i) * eval_activation(cb.base, x + offset_factor(cb.variant, k, i) * step);
        sign = -sign;
    }
    return scale * sum;
}

double eval_composed(const ComposedB& cb, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != cb.n)
        throw std::invalid_argument("eval_composed: dimension mismatch");
    double h = 1.0;
    for (int j = 0; j < cb.n; ++j) h = eval_base_b(cb, x[j], h);
    return h;
}

std::optional<std::vector<double>> composed_support_box(const ComposedB& cb) {
    if (cb.base.id != ActivationId::repu) return std::nullopt;
    const int q = static_cast<int>(std::lround(cb.base.param("q")));
    const int r = q + 1;
    const double peak = irwin_hall_density(r, 0.0);
    // c_i bounds the step magnitude stage i can see: sup_x |B(x,h)| = |h|^q * peak
    std::vector<double> box(cb.n);
    double c = 1.0;
    for (int i = 0; i < cb.n; ++i) {
        // non-central variants shift the stage support by up to r*c/2
        box[i] = (cb.variant == FdVariant::central) ? 0.5 * r * c : static_cast<double>(r) * c;
        c = std::pow(c, q) * peak;
    }
    return box;
}

std::vector<double> truncation_box(const ComposedB& cb, double box_tol) {
    if (!(box_tol > 0.0)) throw std::invalid_argument("truncation_box: box_tol must be positive");
    if (auto support = composed_support_box(cb)) return *support;
    // shared radius from the innermost stage (|h| = 1, the largest step any
    // stage sees for the catalog recipes): grow until the boundary value
    // times the radius is negligible
    double radius = 10.0;
    while (radius < 1e7) {
        const double edge = std::max(std::abs(eval_base_b(cb, radius, 1.0)),
                                     std::abs(eval_base_b(cb, -radius, 1.0)));
        if (edge * radius < box_tol) break;
        radius *= 2.0;
    }
    return std::vector<double>(cb.n, radius);
}

ComposedIntegrals estimate_integrals(const ComposedB& cb, double tol, long budget,
                                     std::uint64_t seed, int workers) {
    if (cb.n > 4) throw std::invalid_argument("estimate_integrals: n is capped at 4");
    if (budget < 1 || workers < 1)
        throw std::invalid_argument("estimate_integrals: budget and workers must be positive");

    ComposedIntegrals out;
    if (cb.n == 1) {
        BFunction1D B = build_bfunction(cb.base, 1.0, cb.variant);
        out.signed_integral = {signed_integral(B, tol), tol};
        out.abs_integral = {abs_integral(B, tol), tol};
        return out;
    }

    const std::vector<double> box = truncation_box(cb, 1e-6);
    double volume = 1.0;
    for (double b : box) volume *= 2.0 * b;

    // per-stream accumulators merged in stream order keep the result
    // independent of any execution interleaving
    double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0, sum_abs_sq = 0.0;
    long total = 0;
    std::vector<double> x(cb.n);
    for (int w = 0; w < workers; ++w) {
        const long count = budget / workers + (w < budget % workers ? 1 : 0);
        RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(w)));
        double s = 0.0, s2 = 0.0, sa = 0.0, sa2 = 0.0;
        for (long i = 0; i < count; ++i) {
            for (int d = 0; d < cb.n; ++d) x[d] = rng.uniform_sym(box[d]);
            const double v = eval_composed(cb, x);
            s += v;
            s2 += v * v;
            sa += std::abs(v);
            sa2 += v * v;
        }
        sum += s;
        sum_sq += s2;
        sum_abs += sa;
        sum_abs_sq += sa2;
        total += count;
    }

    auto finish = [&](double s, double s2) {
        MonteCarloEstimate e;
        const double mean = s / total;
        e.value = volume * mean;
        const double var = total > 1 ? std::max(0.0, (s2 - total * mean * mean) / (total - 1)) : 0.0;
        e.half_width = 2.576 * volume * std::sqrt(var / total);
        return e;
    };
    out.signed_integral = finish(sum, sum_sq);
    out.abs_integral = finish(sum_abs, sum_abs_sq);
    return out;
}

MonteCarloEstimate estimate_l1_norm(const ComposedB& cb, double tol, long budget,
                                    std::uint64_t seed, int workers) {
    MonteCarloEstimate e = estimate_integrals(cb, tol, budget, seed, workers).abs_integral;
    if (e.half_width > tol)
        throw QuadratureBudgetError("estimate_l1_norm: budget exhausted before reaching tolerance",
                                    e.value, e.half_width);
    return e;
}

ScaledAI make_approximate_identity(const ComposedB& cb, double theta, double tol,
                                   long budget, std::uint64_t seed, int workers) {
    if (!(theta > 0.0)) throw std::invalid_argument("make_approximate_identity: theta must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("make_approximate_identity: tol must be positive");
    const ComposedIntegrals integrals = estimate_integrals(cb, tol, budget, seed, workers);
    const double normalizer = integrals.signed_integral.value;
    if (std::abs(normalizer) < tol)
        throw std::invalid_argument("make_approximate_identity: kernel integral vanishes, cannot normalize");
    ScaledAI ai;
    ai.composed = cb;
    ai.theta = theta;
    ai.normalizer = normalizer;
    ai.l1_ratio = integrals.abs_integral.value / std::abs(normalizer);
    return ai;
}

double eval_scaled(const ScaledAI& ai, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != ai.composed.n)
        throw std::invalid_argument("eval_scaled: dimension mismatch");
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / ai.theta;
    const double scale = std::pow(ai.theta, -ai.composed.n) / ai.normalizer;
    return scale * eval_composed(ai.composed, u);
}

double scaled_tail_mass(const ScaledAI& ai, double delta, double tol) {
    if (ai.composed.n != 1)
        throw std::invalid_argument("scaled_tail_mass: only n = 1 is supported");
    BFunction1D B = build_bfunction(ai.composed.base, 1.0, ai.composed.variant);
    const double raw = tail_mass(B, ai.theta, delta, tol * std::abs(ai.normalizer));
    return raw / std::abs(ai.normalizer);
}

void write_grid_csv(const ComposedB& cb, int res, const std::string& path) {
    if (cb.n < 1 || cb.n > 3) throw std::invalid_argument("write_grid_csv: n must be 1, 2 or 3");
    if (res < 2) throw std::invalid_argument("write_grid_csv: res must be >= 2");

    const std::vector<double> box = truncation_box(cb, 1e-6);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);

    for (int d = 0; d < cb.n; ++d) out << "x" << (d + 1) << ",";
    out << "value\n";

    std::vector<int> idx(cb.n, 0);
    std::vector<double> x(cb.n);
    for (;;) {
        for (int d = 0; d < cb.n; ++d) {
            x[d] = -box[d] + 2.0 * box[d] * idx[d] / (res - 1);
            out << format_double(x[d]) << ",";
        }
        out << format_double(eval_composed(cb, x)) << "\n";

        int axis = cb.n - 1;
        while (axis >= 0 && ++idx[axis] == res) idx[axis--] = 0;
        if (axis < 0) break;
    }
    out.close();

    if (cb.n == 3) {
        const double peak = eval_composed(cb, std::vector<double>(3, 0.0));
        std::ofstream levels(path + ".levels");
        if (!levels) throw std::runtime_error("write_grid_csv: cannot open " + path + ".levels");
        levels << "level\n";
        double factor = 0.1;
        for (int i = 0; i < 4; ++i) {
            levels << format_double(peak * factor) << "\n";
            factor *= 0.1;
        }
    }
}

} // namespace nai
