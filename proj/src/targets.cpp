#include "nai/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nai {

namespace {

double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void check_dims(int dims) {
    if (dims < 1) throw std::invalid_argument("target: dims must be >= 1");
}

} // namespace

Target make_hat(int dims) {
    check_dims(dims);
    Target t;
    t.name = "hat";
    t.dims = dims;
    t.lipschitz = 1.0;
    t.sup_norm = 1.0;
    t.f = [](const std::vector<double>& x) { return std::max(0.0, 1.0 - norm2(x)); };
    return t;
}

Target make_radial_bump(int dims) {
    check_dims(dims);
    Target t;
    t.name = "radial-bump";
    t.dims = dims;
    // max of |d/dr (1-r^2)^2| = 8 / (3 sqrt(3)) at r = 1/sqrt(3)
    t.lipschitz = 8.0 / (3.0 * std::sqrt(3.0));
    t.sup_norm = 1.0;
    t.f = [](const std::vector<double>& x) {
        const double r = norm2(x);
        if (r >= 1.0) return 0.0;
        const double u = 1.0 - r * r;
        return u * u;
    };
    return t;
}

Target make_sine_bump(int dims) {
    check_dims(dims);
    Target t;
    t.name = "sine-bump";
    t.dims = dims;
    t.lipschitz = 0.5 * M_PI * std::sqrt(static_cast<double>(dims));
    t.sup_norm = 1.0;
    t.f = [](const std::vector<double>& x) {
        double p = 1.0;
        for (double v : x) p *= std::sin(0.5 * M_PI * (v + 1.0));
        return p;
    };
    return t;
}

Target make_constant(int dims, double value) {
    check_dims(dims);
    Target t;
    t.name = "constant";
    t.dims = dims;
    t.lipschitz = 0.0;
    t.sup_norm = std::abs(value);
    t.f = [value](const std::vector<double>&) { return value; };
    return t;
}

Target make_sampled(const std::string& csv_path, double declared_lipschitz) {
    if (declared_lipschitz < 0.0)
        throw std::invalid_argument("make_sampled: Lipschitz constant must be nonnegative");
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("make_sampled: cannot open " + csv_path);

    std::vector<std::pair<double, double>> samples;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) { // header row
            first = false;
            continue;
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::runtime_error("make_sampled: malformed row: " + line);
        samples.emplace_back(std::stod(a), std::stod(b));
    }
    if (samples.size() < 2) throw std::runtime_error("make_sampled: need at least 2 samples");
    std::sort(samples.begin(), samples.end());

    Target t;
    t.name = "sampled:" + csv_path;
    t.dims = 1;
    t.lipschitz = declared_lipschitz;
    t.sup_norm = 0.0;
    for (const auto& [x, v] : samples) t.sup_norm = std::max(t.sup_norm, std::abs(v));
    t.f = [samples](const std::vector<double>& x) {
        const double q = x.at(0);
        if (q <= samples.front().first) return samples.front().second;
        if (q >= samples.back().first) return samples.back().second;
        auto hi = std::upper_bound(samples.begin(), samples.end(), std::make_pair(q, 0.0),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        auto lo = hi - 1;
        const double span = hi->first - lo->first;
        if (span == 0.0) return lo->second;
        const double w = (q - lo->first) / span;
        return (1.0 - w) * lo->second + w * hi->second;
    };
    return t;
}

Target make_builtin_target(const std::string& name, int dims) {
    if (name == "hat") return make_hat(dims);
    if (name == "radial-bump") return make_radial_bump(dims);
    if (name == "sine-bump") return make_sine_bump(dims);
    if (name == "constant") return make_constant(dims, 1.0);
    if (name == "zero") return make_constant(dims, 0.0);
    throw std::invalid_argument("unknown target: " + name);
}

} // namespace nai
