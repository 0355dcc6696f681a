#include "nai/riemann.hpp"

#include <cmath>
#include <stdexcept>

#include "nai/rng.hpp"

namespace nai {

double Partition1D::norm() const {
    double w = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) w = std::max(w, knots[j + 1] - knots[j]);
    return w;
}

Partition1D uniform_partition(int m, PointRule rule) {
    if (m < 1) throw std::invalid_argument("uniform_partition: m must be >= 1");
    Partition1D p;
    p.knots.resize(m + 1);
    p.points.resize(m);
    const double w = 2.0 / m;
    for (int j = 0; j <= m; ++j) p.knots[j] = -1.0 + w * j;
    p.knots[m] = 1.0;
    for (int j = 0; j < m; ++j) {
        switch (rule) {
            case PointRule::midpoint: p.points[j] = -1.0 + w * (j + 0.5); break;
            case PointRule::left: p.points[j] = p.knots[j]; break;
            case PointRule::right: p.points[j] = p.knots[j + 1]; break;
        }
    }
    return p;
}

double riemann_sum(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<Partition1D>& grid) {
    const int n = static_cast<int>(grid.size());
    if (n == 0) throw std::invalid_argument("riemann_sum: empty grid");
    for (const auto& p : grid) {
        if (p.cells() == 0) throw std::invalid_argument("riemann_sum: empty partition");
    }

    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    double sum = 0.0;
    double comp = 0.0; // Kahan compensation
    for (;;) {
        double weight = 1.0;
        for (int i = 0; i < n; ++i) {
            x[i] = grid[i].points[idx[i]];
            weight *= grid[i].knots[idx[i] + 1] - grid[i].knots[idx[i]];
        }
        const double y = f(x) * weight - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        int axis = n - 1;
        while (axis >= 0 && ++idx[axis] == grid[axis].cells()) idx[axis--] = 0;
        if (axis < 0) break;
    }
    return sum;
}

ModulusEstimate modulus_lipschitz(double lipschitz_constant, double h) {
    if (h < 0.0 || lipschitz_constant < 0.0)
        throw std::invalid_argument("modulus_lipschitz: inputs must be nonnegative");
    return {h, lipschitz_constant * h, ModulusEstimate::Method::lipschitz};
}

ModulusEstimate modulus_sampled(const std::function<double(const std::vector<double>&)>& f,
                                int dims, double h, int budget, std::uint64_t seed) {
    if (h < 0.0) throw std::invalid_argument("modulus_sampled: h must be nonnegative");
    if (dims < 1 || budget < 1) throw std::invalid_argument("modulus_sampled: bad dims or budget");
    if (h == 0.0) return {0.0, 0.0, ModulusEstimate::Method::sampled};

    RngStream rng(seed);
    std::vector<double> x(dims), y(dims), z(dims);
    double best = 0.0;
    for (int s = 0; s < budget; ++s) {
        for (int i = 0; i < dims; ++i) x[i] = rng.uniform_sym();
        // direction by rejection from the unit ball, radius uniform in [0, h]
        double norm2;
        do {
            norm2 = 0.0;
            for (int i = 0; i < dims; ++i) {
                z[i] = rng.uniform_sym();
                norm2 += z[i] * z[i];
            }
        } while (norm2 > 1.0 || norm2 == 0.0);
        const double radius = h * rng.uniform01();
        const double rescale = radius / std::sqrt(norm2);
        for (int i = 0; i < dims; ++i) y[i] = x[i] + z[i] * rescale;
        best = std::max(best, std::abs(f(y) - f(x)));
    }
    return {h, best, ModulusEstimate::Method::sampled};
}

double quadrature_error_bound(int n, double modulus_at_partition_norm) {
    if (n < 0 || modulus_at_partition_norm < 0.0)
        throw std::invalid_argument("quadrature_error_bound: inputs must be nonnegative");
    return std::ldexp(modulus_at_partition_norm, n);
}

} // namespace nai
