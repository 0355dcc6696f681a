#include "nai/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nai/integrate.hpp"
#include "nai/network.hpp"
#include "nai/riemann.hpp"
#include "nai/rng.hpp"

namespace nai {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Integral of f over the real line for integrands that decay away from a
// central window: core plus doubling shells until a shell is negligible.
double line_integral(const std::function<double(double)>& f, double r0, double tol) {
    double total = integrate(f, -r0, r0, 0.5 * tol);
    double r = r0;
    for (int shell = 0; shell < 120; ++shell) {
        const double r2 = 2.0 * r;
        const double mass = integrate(f, r, r2, tol / 16.0) + integrate(f, -r2, -r, tol / 16.0);
        total += mass;
        r = r2;
        if (std::abs(mass) < 0.25 * tol) return total;
    }
    throw QuadratureBudgetError("line_integral: tail did not decay", total, tol);
}

// Grid scan plus local ternary refinement of max |g| over [-radius, radius].
double sup_abs(const std::function<double(double)>& g, double radius, int grid) {
    double best = 0.0;
    double best_x = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double x = -radius + 2.0 * radius * i / grid;
        const double v = std::abs(g(x));
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double lo = best_x - 2.0 * radius / grid;
    double hi = best_x + 2.0 * radius / grid;
    for (int it = 0; it < 200; ++it) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (std::abs(g(a)) < std::abs(g(b))) {
            lo = a;
        } else {
            hi = b;
        }
    }
    return std::max(best, std::abs(g(0.5 * (lo + hi))));
}

struct FrameworkConstants {
    double sup_derivative = 0.0; // sup |sigma^(k)|
    double l1_derivative = 0.0;  // integral of |sigma^(k)|
    double n_const = 0.0;        // (sup/k!) * sum C(k,i) |k/2 - i|^k
    double c_const = 0.0;        // (n_const/sup) * l1
};

FrameworkConstants framework_constants(const ActivationSpec& spec, int k) {
    auto dk = [&spec, k](double x) { return activation_derivative(spec, k, x); };
    FrameworkConstants fc;
    fc.sup_derivative = sup_abs(dk, 40.0, 16000);
    fc.l1_derivative = line_integral([&dk](double x) { return std::abs(dk(x)); }, 40.0, 1e-9);
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += binomial(k, i) * std::pow(std::abs(0.5 * k - i), k);
    fc.n_const = fc.sup_derivative / factorial(k) * s;
    fc.c_const = fc.n_const / fc.sup_derivative * fc.l1_derivative;
    return fc;
}

} // namespace

bool VerificationReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

void VerificationReport::add(std::string name, std::string claim, double measured,
                             double bound, bool pass, double tolerance) {
    checks.push_back({std::move(name), std::move(claim), measured, bound, pass, tolerance});
}

nlohmann::json report_json(const VerificationReport& report) {
    nlohmann::json j;
    j["subject"] = report.subject;
    j["seed"] = report.seed;
    j["runtime_seconds"] = report.runtime_seconds;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"claim", c.claim},
                               {"measured", c.measured},
                               {"bound", c.bound},
                               {"pass", c.pass},
                               {"tolerance", c.tolerance}});
    }
    return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
    VerificationReport r;
    r.subject = j.at("subject").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
    for (const auto& c : j.at("checks")) {
        r.checks.push_back({c.at("name").get<std::string>(), c.at("claim").get<std::string>(),
                            c.at("measured").get<double>(), c.at("bound").get<double>(),
                            c.at("pass").get<bool>(), c.at("tolerance").get<double>()});
    }
    return r;
}

std::string report_text(const VerificationReport& report) {
    std::ostringstream out;
    out << "subject: " << report.subject << " (seed " << report.seed << ", "
        << report.runtime_seconds << " s)\n";
    for (const auto& c : report.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.claim
            << " measured=" << format_double(c.measured) << " bound=" << format_double(c.bound)
            << " tol=" << format_double(c.tolerance) << "\n";
    }
    return out.str();
}

VerificationReport verify_nai(const ActivationSpec& spec,
                              const std::vector<double>& h_grid, double tol) {
    Stopwatch watch;
    VerificationReport report;
    report.subject = "nai/" + spec.name();

    std::optional<FrameworkConstants> mish_constants;
    for (double h : h_grid) {
        const std::string tag = spec.name() + "/h=" + format_double(h);
        try {
            BFunction1D B = build_bfunction(spec, h);
            if (B.facts.signed_integral) {
                const double measured = signed_integral(B, 0.25 * tol);
                const double target = *B.facts.signed_integral;
                report.add("signed_integral/" + tag, "signed integral equals its closed form",
                           measured, target, std::abs(measured - target) <= tol, tol);
            } else {
                const double measured = signed_integral(B, 0.25 * tol);
                report.add("signed_integral/" + tag, "signed integral converges",
                           measured, measured, std::isfinite(measured), tol);
            }
            const double abs_measured = abs_integral(B, 0.25 * tol);
            if (B.facts.abs_integral_bound) {
                const double bound = *B.facts.abs_integral_bound * (1.0 + 1e-9) + tol;
                report.add("abs_integral/" + tag, "absolute integral stays under the stated bound",
                           abs_measured, bound, abs_measured <= bound, tol);
            } else if (spec.id == ActivationId::mish) {
                if (!mish_constants) mish_constants = framework_constants(spec, 2);
                const double bound =
                    mish_constants->l1_derivative * h * h * (1.0 + 1e-9) + tol;
                report.add("abs_integral/" + tag,
                           "absolute integral stays under the second-derivative L1 bound",
                           abs_measured, bound, abs_measured <= bound, tol);
            } else {
                report.add("abs_integral/" + tag, "absolute integral converges",
                           abs_measured, abs_measured, std::isfinite(abs_measured), tol);
            }
        } catch (const QuadratureBudgetError& err) {
            report.add("integration/" + tag, "integration budget exhausted",
                       err.estimate, err.error, false, tol);
        }
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

VerificationReport check_alternating_sum(int k_max) {
    if (k_max < 1 || k_max > 20)
        throw std::invalid_argument("check_alternating_sum: k_max must be in [1, 20]");
    Stopwatch watch;
    VerificationReport report;
    report.subject = "alternating-sum";

    // exact Pascal triangle
    std::vector<std::vector<__int128>> choose(k_max + 1);
    for (int n = 0; n <= k_max; ++n) {
        choose[n].resize(n + 1, 1);
        for (int i = 1; i < n; ++i) choose[n][i] = choose[n - 1][i - 1] + choose[n - 1][i];
    }

    for (int k = 1; k <= k_max; ++k) {
        bool all_zero = true;
        for (int j = 0; j < k; ++j) {
            __int128 sum = 0;
            for (int i = 0; i <= k; ++i) {
                __int128 power = (j == 0) ? 1 : 0;
                if (j > 0) {
                    power = 1;
                    for (int p = 0; p < j; ++p) power *= i;
                }
                sum += (i % 2 == 0 ? choose[k][i] : -choose[k][i]) * power;
            }
            if (sum != 0) all_zero = false;
        }
        report.add("alternating-sum/k=" + std::to_string(k),
                   "alternating binomial sum of i^j vanishes for all j < k",
                   all_zero ? 0.0 : 1.0, 0.0, all_zero, 0.0);
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

VerificationReport check_taylor_remainder(const ActivationSpec& spec, int k,
                                          const std::vector<double>& h_grid,
                                          const std::vector<double>& x_grid, double tol) {
    if (k != 1 && k != 2)
        throw std::invalid_argument("check_taylor_remainder: k must be 1 or 2");
    Stopwatch watch;
    VerificationReport report;
    report.subject = "taylor-remainder/" + spec.name();

    auto sigma = [&spec](double x) { return eval_activation(spec, x); };
    for (double h : h_grid) {
        double worst = 0.0;
        for (double x : x_grid) {
            const double lhs = central_difference(sigma, k, h, x);
            double rhs = 0.0;
            double sign = 1.0;
            for (int i = 0; i <= k; ++i) {
                const double a = (0.5 * k - i) * h;
                if (a != 0.0) {
                    const double remainder = integrate(
                        [&spec, k, x, a](double s) {
                            return activation_derivative(spec, k, x + s * a) *
                                   std::pow(1.0 - s, k - 1);
                        },
                        0.0, 1.0, 1e-12);
                    rhs += sign * binomial(k, i) * std::pow(a, k) / factorial(k - 1) * remainder;
                }
                sign = -sign;
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        report.add("taylor-remainder/" + spec.name() + "/h=" + format_double(h),
                   "central difference equals its Taylor-remainder integral form",
                   worst, tol, worst <= tol, tol);
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

double irwin_hall_convolution_oracle(int r, double x) {
    if (r < 1) throw std::invalid_argument("irwin_hall_convolution_oracle: r must be >= 1");
    if (std::abs(x) >= 0.5 * r) return 0.0;

    // pieces[j] holds the density on [-r/2 + j, -r/2 + j + 1] as polynomial
    // coefficients in the local coordinate u in [0, 1]
    std::vector<std::vector<double>> pieces = {{1.0}};
    for (int cur = 1; cur < r; ++cur) {
        // continuous antiderivative of the current density, piece by piece
        std::vector<std::vector<double>> anti(pieces.size());
        double carry = 0.0;
        for (std::size_t j = 0; j < pieces.size(); ++j) {
            anti[j].assign(pieces[j].size() + 1, 0.0);
            anti[j][0] = carry;
            for (std::size_t p = 0; p < pieces[j].size(); ++p)
                anti[j][p + 1] = pieces[j][p] / static_cast<double>(p + 1);
            double at_one = 0.0;
            for (std::size_t p = anti[j].size(); p-- > 0;) at_one = at_one * 1.0 + anti[j][p];
            carry = at_one;
        }
        const double total = carry;

        // f_{cur+1}(x) = F_cur(x + 1/2) - F_cur(x - 1/2), piecewise
        std::vector<std::vector<double>> next(pieces.size() + 1);
        for (std::size_t j = 0; j < next.size(); ++j) {
            std::vector<double> hi = (j < anti.size()) ? anti[j] : std::vector<double>{total};
            std::vector<double> lo = (j >= 1) ? anti[j - 1] : std::vector<double>{0.0};
            next[j].assign(std::max(hi.size(), lo.size()), 0.0);
            for (std::size_t p = 0; p < hi.size(); ++p) next[j][p] += hi[p];
            for (std::size_t p = 0; p < lo.size(); ++p) next[j][p] -= lo[p];
        }
        pieces = std::move(next);
    }

    int j = static_cast<int>(std::floor(x + 0.5 * r));
    j = std::clamp(j, 0, static_cast<int>(pieces.size()) - 1);
    const double u = x + 0.5 * r - j;
    double v = 0.0;
    for (std::size_t p = pieces[j].size(); p-- > 0;) v = v * u + pieces[j][p];
    return v;
}

VerificationReport check_irwin_hall(int q_max, double tol, int grid_points) {
    if (q_max < 0 || q_max > 6)
        throw std::invalid_argument("check_irwin_hall: q_max must be in [0, 6]");
    if (grid_points < 2) throw std::invalid_argument("check_irwin_hall: grid_points must be >= 2");
    Stopwatch watch;
    VerificationReport report;
    report.subject = "irwin-hall";

    for (int q = 0; q <= q_max; ++q) {
        ActivationSpec spec = make_activation(ActivationId::repu, {{"q", static_cast<double>(q)}});
        const int r = q + 1;
        for (double h : {0.5, 1.0, 2.0}) {
            BFunction1D B = build_bfunction(spec, h);
            const double radius = 0.6 * r * h;
            double worst = 0.0;
            for (int i = 0; i < grid_points; ++i) {
                const double x = -radius + 2.0 * radius * i / (grid_points - 1);
                // skip breakpoints where the density itself is discontinuous
                const double local = (x / h) + 0.5 * r;
                if (q == 0 && std::abs(local - std::round(local)) < 1e-9) continue;
                const double oracle = std::pow(h, q) * irwin_hall_convolution_oracle(r, x / h);
                worst = std::max(worst, std::abs(eval_bfunction(B, x) - oracle));
            }
            report.add("irwin-hall/q=" + std::to_string(q) + "/h=" + format_double(h),
                       "kernel equals the dilated uniform-sum density",
                       worst, tol, worst <= tol, tol);
        }
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

VerificationReport check_ai_conditions(const ComposedB& cb,
                                       const std::vector<double>& theta_list,
                                       double delta, double tol) {
    if (cb.n != 1) throw std::invalid_argument("check_ai_conditions: n = 1 kernels only");
    if (theta_list.empty()) throw std::invalid_argument("check_ai_conditions: empty theta list");
    Stopwatch watch;
    VerificationReport report;
    report.subject = "ai-conditions/" + cb.base.name();

    BFunction1D B = build_bfunction(cb.base, 1.0, cb.variant);
    const double norm = signed_integral(B, 0.1 * tol);

    // direct quadrature on the scaled kernel, not the change of variables
    auto scaled_line = [&](double theta, bool absolute) {
        auto f = [&B, theta, absolute](double y) {
            const double v = eval_bfunction(B, y / theta) / theta;
            return absolute ? std::abs(v) : v;
        };
        if (B.facts.support) {
            return integrate(f, theta * B.facts.support->first, theta * B.facts.support->second,
                             0.1 * tol);
        }
        return line_integral(f, theta * 20.0, 0.1 * tol);
    };

    double first_l1 = 0.0;
    double prev_tail = 0.0;
    for (std::size_t i = 0; i < theta_list.size(); ++i) {
        const double theta = theta_list[i];
        const std::string tag = "theta=" + format_double(theta);

        const double unit = scaled_line(theta, false) / norm;
        report.add("ai-unit-integral/" + tag, "scaled kernel has unit integral",
                   unit, 1.0, std::abs(unit - 1.0) <= tol, tol);

        const double l1 = scaled_line(theta, true) / std::abs(norm);
        if (i == 0) first_l1 = l1;
        report.add("ai-l1-constant/" + tag, "L1 norm is independent of the scale",
                   l1, first_l1, std::abs(l1 - first_l1) <= tol, tol);

        const double tail = tail_mass(B, theta, delta, 0.1 * tol) / std::abs(norm);
        const bool monotone = i == 0 || tail <= prev_tail + tol;
        report.add("ai-tail/" + tag, "tail mass outside delta decreases as the scale shrinks",
                   tail, i == 0 ? tail : prev_tail, monotone, tol);
        prev_tail = tail;
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

double hoeffding_epsilon(long N, double range, double p) {
    if (N < 1) throw std::invalid_argument("hoeffding_epsilon: N must be >= 1");
    if (!(range > 0.0)) throw std::invalid_argument("hoeffding_epsilon: range must be positive");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("hoeffding_epsilon: p must be in (0, 1)");
    return range * std::sqrt(std::log(2.0 / p) / (2.0 * static_cast<double>(N)));
}

RateStudyResult rate_study(const Target& f, const ComposedB& cb,
                           const std::vector<long>& N_list, int trials,
                           int grid_size, std::uint64_t seed) {
    if (N_list.empty()) throw std::invalid_argument("rate_study: empty N list");
    for (std::size_t i = 1; i < N_list.size(); ++i) {
        if (N_list[i] <= N_list[i - 1])
            throw std::invalid_argument("rate_study: N list must be increasing");
    }
    if (trials < 1) throw std::invalid_argument("rate_study: trials must be >= 1");
    if (cb.n != f.dims || (cb.n != 1 && cb.n != 2))
        throw std::invalid_argument("rate_study: dims must match and be 1 or 2");

    RateStudyResult result;
    result.N_values = N_list;
    result.grid_size = grid_size;
    result.seed = seed;

    // fixed evaluation lattice, grid_size points per axis
    std::vector<std::vector<double>> grid;
    if (cb.n == 1) {
        for (int i = 0; i < grid_size; ++i)
            grid.push_back({-1.0 + 2.0 * i / (grid_size - 1)});
    } else {
        for (int i = 0; i < grid_size; ++i) {
            for (int j = 0; j < grid_size; ++j) {
                grid.push_back({-1.0 + 2.0 * i / (grid_size - 1), -1.0 + 2.0 * j / (grid_size - 1)});
            }
        }
    }

    result.errors.resize(N_list.size());
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        const long N = N_list[ni];
        const double delta = result.c / std::sqrt(static_cast<double>(N));
        const double theta = delta * delta;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed =
                mix_seed(seed, (static_cast<std::uint64_t>(ni) << 32) | static_cast<std::uint64_t>(t));
            LayeredNetwork net = build_mc_network(f.f, cb, theta, N, trial_seed);
            double sup = 0.0;
            for (const auto& x : grid)
                sup = std::max(sup, std::abs(eval_network(net, x) - f.f(x)));
            result.errors[ni].push_back(sup);
        }
        std::vector<double> sorted = result.errors[ni];
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        result.median_errors.push_back(sorted.size() % 2 == 1
                                           ? sorted[mid]
                                           : 0.5 * (sorted[mid - 1] + sorted[mid]));
        const double eps = result.c_prime / std::sqrt(static_cast<double>(N));
        result.epsilon_at_n.push_back(eps);
        int failures = 0;
        for (double e : result.errors[ni]) {
            if (e > eps) ++failures;
        }
        result.failure_fraction.push_back(static_cast<double>(failures) / trials);
    }

    for (double m : result.median_errors) {
        if (!(m > 0.0)) result.degenerate = true;
    }
    if (!result.degenerate) {
        auto fit_slope = [&](const std::vector<double>& ys) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
            const std::size_t n = ys.size();
            for (std::size_t i = 0; i < n; ++i) {
                const double lx = std::log(static_cast<double>(N_list[i]));
                const double ly = std::log(ys[i]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            return (n * sxy - sx * sy) / (n * sxx - sx * sx);
        };
        result.slope = fit_slope(result.median_errors);

        std::vector<double> trial_slopes;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> ys;
            bool ok = true;
            for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
                const double e = result.errors[ni][t];
                if (!(e > 0.0)) ok = false;
                ys.push_back(e);
            }
            if (ok) trial_slopes.push_back(fit_slope(ys));
        }
        if (trial_slopes.size() > 1) {
            double mean = 0.0;
            for (double s : trial_slopes) mean += s;
            mean /= trial_slopes.size();
            double var = 0.0;
            for (double s : trial_slopes) var += (s - mean) * (s - mean);
            var /= (trial_slopes.size() - 1);
            result.slope_half_width = 2.576 * std::sqrt(var / trial_slopes.size());
        }
    }
    return result;
}

nlohmann::json rate_study_json(const RateStudyResult& r) {
    nlohmann::json j;
    j["N_values"] = r.N_values;
    j["errors"] = r.errors;
    j["median_errors"] = r.median_errors;
    j["slope"] = r.slope;
    j["slope_half_width"] = r.slope_half_width;
    j["failure_fraction"] = r.failure_fraction;
    j["epsilon_at_n"] = r.epsilon_at_n;
    j["degenerate"] = r.degenerate;
    j["c"] = r.c;
    j["c_prime"] = r.c_prime;
    j["grid_size"] = r.grid_size;
    j["seed"] = r.seed;
    return j;
}

VerificationReport check_general_framework(const ActivationSpec& spec, int k,
                                           const std::vector<double>& h_grid, double tol) {
    if (k != 1 && k != 2)
        throw std::invalid_argument("check_general_framework: k must be 1 or 2");
    Stopwatch watch;
    VerificationReport report;
    report.subject = "general-framework/" + spec.name();

    if (spec.id == ActivationId::custom) {
        // light screening only: the declared-order derivative must at least
        // evaluate to finite values on a spread of points
        for (double x : {-8.0, -2.0, -0.5, 0.0, 0.3, 1.7, 6.0}) {
            if (!std::isfinite(activation_derivative(spec, k, x)))
                throw std::invalid_argument(
                    "check_general_framework: derivative screening failed for custom activation");
        }
    }

    const FrameworkConstants fc = framework_constants(spec, k);
    const bool two_point = spec.id == ActivationId::sigmoid || spec.id == ActivationId::tanh ||
                           spec.id == ActivationId::arctan ||
                           spec.id == ActivationId::generalized_sigmoid;
    // equality holds for some recipes, so the bound gets a relative hair
    // of slack on top of the check tolerance
    const double slack = 1.0 + 1e-9;

    for (double h : h_grid) {
        BFunction1D B = build_bfunction(spec, h);
        const double step = two_point ? 2.0 * std::abs(h) : std::abs(h);
        const double step_pow = std::pow(step, k);
        const std::string tag = spec.name() + "/h=" + format_double(h);

        const double sup_bound = spec.recipe_scale * fc.n_const * step_pow;
        const double measured_sup =
            sup_abs([&B](double x) { return eval_bfunction(B, x); },
                    std::max(40.0, 2.0 * k * step + 10.0), 16000);
        report.add("framework-sup/" + tag, "kernel sup stays under the derivative-based bound",
                   measured_sup, sup_bound, measured_sup <= sup_bound * slack + tol, tol);

        const double int_bound = spec.recipe_scale * fc.c_const * step_pow;
        const double measured_int = abs_integral(B, 0.25 * tol);
        report.add("framework-l1/" + tag, "kernel L1 stays under the derivative-based bound",
                   measured_int, int_bound, measured_int <= int_bound * slack + tol, tol);
    }
    report.runtime_seconds = watch.seconds();
    return report;
}

} // namespace nai
