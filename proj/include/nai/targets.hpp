#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nai {

/// A test target on [-1,1]^dims with the constants the error budget needs.
struct Target {
    std::string name;
    int dims = 1;
    double lipschitz = 0.0;
    double sup_norm = 0.0;
    std::function<double(const std::vector<double>&)> f;

    double operator()(const std::vector<double>& x) const { return f(x); }
};

/// max(0, 1 - |x|_2). Lipschitz constant 1.
Target make_hat(int dims);

/// (1 - |x|_2^2)^2 inside the unit ball, 0 outside.
Target make_radial_bump(int dims);

/// Product of sin(pi (x_i + 1) / 2): vanishes on the boundary, peak 1 at 0.
Target make_sine_bump(int dims);

Target make_constant(int dims, double value);

/// 1-D target from a CSV of "x,value" rows: linear interpolation between
/// sorted sample points, clamped outside their range. The Lipschitz
/// constant is declared by the caller, not inferred.
Target make_sampled(const std::string& csv_path, double declared_lipschitz);

/// Lookup by name for the CLI: hat, radial-bump, sine-bump, constant, zero.
Target make_builtin_target(const std::string& name, int dims);

} // namespace nai
