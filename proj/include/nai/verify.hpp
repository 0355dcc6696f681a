#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nai/composed.hpp"
#include "nai/targets.hpp"

namespace nai {

struct CheckResult {
    std::string name;
    std::string claim;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    double tolerance = 0.0;
};

struct VerificationReport {
    std::string subject;
    std::vector<CheckResult> checks;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;

    bool all_passed() const;
    void add(std::string name, std::string claim, double measured, double bound,
             bool pass, double tolerance);
};

nlohmann::json report_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);
std::string report_text(const VerificationReport& report);

/// Checks each closed-form signed integral and stated absolute-integral
/// bound for the recipe across the h grid; recipes without closed forms are
/// checked for convergence of the truncated absolute integral.
VerificationReport verify_nai(const ActivationSpec& spec,
                              const std::vector<double>& h_grid, double tol);

/// sum over i of (-1)^i C(k,i) i^j vanishes for every j < k, in exact
/// integer arithmetic. k_max <= 20.
VerificationReport check_alternating_sum(int k_max);

/// The k-order central difference equals its Taylor-remainder form: the
/// alternating sum of (offset^k / (k-1)!) times the integral of
/// sigma^(k)(x + s*offset) (1-s)^(k-1) over s in [0,1].
VerificationReport check_taylor_remainder(const ActivationSpec& spec, int k,
                                          const std::vector<double>& h_grid,
                                          const std::vector<double>& x_grid, double tol);

/// Density of a sum of r uniforms on [-1/2,1/2], computed by exact
/// piecewise-polynomial convolution: independent of the alternating-sum
/// formula in irwin_hall_density.
double irwin_hall_convolution_oracle(int r, double x);

/// RePU B-functions are dilated uniform-sum densities:
/// B(x,h) = h^q f_{q+1}(x/h), checked against the convolution oracle on
/// grid_points points per (q, h) with h in {0.5, 1, 2}. q_max <= 6.
VerificationReport check_irwin_hall(int q_max, double tol, int grid_points = 10000);

/// The three approximate-identity conditions for the scaled kernel family:
/// constant L1 norm, unit integral, and tail mass outside delta decreasing
/// toward 0 as theta shrinks. n = 1 kernels.
VerificationReport check_ai_conditions(const ComposedB& cb,
                                       const std::vector<double>& theta_list,
                                       double delta, double tol);

/// range * sqrt(ln(2/p) / (2N)): the deviation epsilon at which N averaged
/// bounded samples exceed it with probability at most p.
double hoeffding_epsilon(long N, double range, double p);

struct RateStudyResult {
    std::vector<long> N_values;
    std::vector<std::vector<double>> errors; // [N index][trial]
    std::vector<double> median_errors;
    double slope = 0.0;
    double slope_half_width = 0.0; // 99% confidence over per-trial slopes
    std::vector<double> failure_fraction;
    std::vector<double> epsilon_at_n;
    bool degenerate = false;
    double c = 1.0;       // delta = c / sqrt(N)
    double c_prime = 2.0; // epsilon(N) = c_prime / sqrt(N)
    int grid_size = 512;
    std::uint64_t seed = 0;
};

/// For each N: delta = c/sqrt(N), theta = delta^2, `trials` independent
/// Monte-Carlo networks, sup error over a fixed uniform grid per axis.
/// Fits the log error vs log N slope and reports the fraction of trials
/// exceeding epsilon(N) = c_prime/sqrt(N). Supports n in {1, 2}.
RateStudyResult rate_study(const Target& f, const ComposedB& cb,
                           const std::vector<long>& N_list, int trials,
                           int grid_size, std::uint64_t seed);

nlohmann::json rate_study_json(const RateStudyResult& r);

/// Derives the generic finite-difference bounds from numeric estimates of
/// sup|sigma^(k)| and its L1 norm, then verifies the recipe's sup|B| and
/// integral of |B| stay under them across the h grid.
VerificationReport check_general_framework(const ActivationSpec& spec, int k,
                                           const std::vector<double>& h_grid, double tol);

} // namespace nai
