#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace nai {

/// A partition of [-1, 1] with one evaluation point per cell.
struct Partition1D {
    std::vector<double> knots;
    std::vector<double> points;

    int cells() const { return static_cast<int>(points.size()); }
    /// Mesh norm, the widest cell.
    double norm() const;
};

enum class PointRule { midpoint, left, right };

struct ModulusEstimate {
    double h = 0.0;
    double value = 0.0;
    enum class Method { lipschitz, sampled } method = Method::lipschitz;
};

/// m equal cells of width 2/m.
Partition1D uniform_partition(int m, PointRule rule = PointRule::midpoint);

/// Tensor-product Riemann sum over the box spanned by the grids, with a
/// fixed lexicographic cell order and compensated accumulation so results
/// are bit-for-bit reproducible.
double riemann_sum(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<Partition1D>& grid);

/// Lipschitz mode returns L*h exactly. Sampled mode maximizes
/// |f(x+z) - f(x)| over random pairs with |z|_2 <= h drawn inside
/// [-1,1]^dims; a lower estimate of the true modulus by construction.
ModulusEstimate modulus_lipschitz(double lipschitz_constant, double h);
ModulusEstimate modulus_sampled(const std::function<double(const std::vector<double>&)>& f,
                                int dims, double h, int budget, std::uint64_t seed);

/// 2^n times the modulus at the mesh norm.
double quadrature_error_bound(int n, double modulus_at_partition_norm);

} // namespace nai
