#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace nai {

/// Raised when an adaptive integral cannot reach the requested tolerance
/// within its interval budget. Carries the best estimate achieved so that
/// callers can report a partial result instead of crashing.
class QuadratureBudgetError : public std::runtime_error {
public:
    QuadratureBudgetError(const std::string& what, double estimate, double error)
        : std::runtime_error(what), estimate(estimate), error(error) {}
    double estimate;
    double error;
};

/// Adaptive quadrature on [a, b] with a nested Gauss-Kronrod (G7/K15) rule
/// and worst-interval-first bisection. Absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_intervals = 40000);

} // namespace nai
