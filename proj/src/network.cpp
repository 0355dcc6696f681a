#include "nai/network.hpp"

#include <cmath>
#include <stdexcept>

#include "nai/riemann.hpp"
#include "nai/rng.hpp"

namespace nai {

namespace {

std::string kind_string(LayeredNetwork::Kind k) {
    return k == LayeredNetwork::Kind::quadrature1d ? "quadrature1d" : "mc_nested";
}

LayeredNetwork::Kind kind_from_string(const std::string& s) {
    if (s == "quadrature1d") return LayeredNetwork::Kind::quadrature1d;
    if (s == "mc_nested") return LayeredNetwork::Kind::mc_nested;
    throw std::invalid_argument("unknown network kind: " + s);
}

FdVariant variant_from_string(const std::string& s) {
    if (s == "central") return FdVariant::central;
    if (s == "forward") return FdVariant::forward;
    if (s == "backward") return FdVariant::backward;
    throw std::invalid_argument("unknown variant: " + s);
}

double branch_value(const LayeredNetwork& net, const std::vector<double>& x, long j) {
    const std::vector<double>& center = net.centers[j];
    double h = 1.0;
    for (int i = 0; i < net.dims; ++i) {
        if (h == 0.0) return 0.0;
        const double u = (x[i] - center[i]) / net.theta;
        double next = 0.0;
        for (std::size_t l = 0; l < net.stage_offsets.size(); ++l) {
            next += net.combine[l] * eval_activation(net.activation, u + net.stage_offsets[l] * h);
        }
        h = next;
    }
    return h;
}

} // namespace

LayeredNetwork build_quadrature_network_1d(const std::function<double(double)>& f,
                                           const BFunction1D& B, double theta, int m) {
    if (!(theta > 0.0)) throw std::invalid_argument("build_quadrature_network_1d: theta must be positive");
    if (m < 1) throw std::invalid_argument("build_quadrature_network_1d: m must be >= 1");

    double norm;
    if (B.facts.signed_integral) {
        norm = *B.facts.signed_integral;
    } else {
        norm = signed_integral(B, 1e-10);
    }
    if (norm == 0.0)
        throw std::invalid_argument("build_quadrature_network_1d: kernel integral vanishes");

    LayeredNetwork net;
    net.kind = LayeredNetwork::Kind::quadrature1d;
    net.activation = B.spec;
    net.variant = B.variant;
    net.theta = theta;
    net.dims = 1;
    net.normalizer = norm;
    net.m_or_samples = m;
    net.recipe = "quadrature1d/" + B.spec.name() + "/h=" + format_double(B.h);

    const Partition1D part = uniform_partition(m);
    const std::size_t units = static_cast<std::size_t>(m) * B.terms.size();
    net.hidden_w.reserve(units);
    net.hidden_b.reserve(units);
    net.output_coefficients.reserve(units);
    for (int j = 0; j < m; ++j) {
        const double width = part.knots[j + 1] - part.knots[j];
        const double xi = part.points[j];
        const double fval = f(xi);
        for (const Term& t : B.terms) {
            const double w = t.w / theta;
            net.hidden_w.push_back(w);
            net.hidden_b.push_back(t.b - w * xi);
            net.output_coefficients.push_back(width * fval * t.alpha / (theta * norm));
        }
    }
    net.neuron_count = static_cast<long>(units);
    return net;
}

LayeredNetwork build_mc_network(const std::function<double(const std::vector<double>&)>& f,
                                const ComposedB& cb, double theta, long N,
                                std::uint64_t seed, long normalizer_budget, int workers) {
    if (!(theta > 0.0)) throw std::invalid_argument("build_mc_network: theta must be positive");
    if (N < 1) throw std::invalid_argument("build_mc_network: N must be >= 1");

    const ScaledAI ai = make_approximate_identity(cb, theta, 1e-6, normalizer_budget,
                                                  mix_seed(seed, 0x6e61695f6e6f726dULL), workers);

    LayeredNetwork net;
    net.kind = LayeredNetwork::Kind::mc_nested;
    net.activation = cb.base;
    net.variant = cb.variant;
    net.theta = theta;
    net.dims = cb.n;
    net.normalizer = ai.normalizer;
    net.m_or_samples = N;
    net.seed = seed;
    net.recipe = "mc_nested/" + cb.base.name() + "/n=" + std::to_string(cb.n);

    const int k = cb.base.fd_order_k;
    const bool two_point = cb.base.id == ActivationId::sigmoid || cb.base.id == ActivationId::tanh ||
                           cb.base.id == ActivationId::arctan ||
                           cb.base.id == ActivationId::generalized_sigmoid;
    const double step_factor = two_point ? 2.0 : 1.0;
    double sign = 1.0;
    for (int l = 0; l <= k; ++l) {
        double c = 0.0;
        switch (cb.variant) {
            case FdVariant::central: c = 0.5 * k - l; break;
            case FdVariant::forward: c = static_cast<double>(k - l); break;
            case FdVariant::backward: c = static_cast<double>(-l); break;
        }
        net.stage_offsets.push_back(c * step_factor);
        net.combine.push_back(cb.base.recipe_scale * sign * binomial(k, l));
        sign = -sign;
    }

    // 2^n is the volume of the sampling box: the estimator of the
    // convolution integral is volume * mean of f(xi) * kernel(x - xi)
    const double volume = std::ldexp(1.0, cb.n);
    const double coeff_scale = volume / (static_cast<double>(N) * std::pow(theta, cb.n) * ai.normalizer);
    RngStream rng(mix_seed(seed, 0));
    net.centers.resize(N);
    net.branch_coefficients.resize(N);
    for (long j = 0; j < N; ++j) {
        net.centers[j].resize(cb.n);
        for (int d = 0; d < cb.n; ++d) net.centers[j][d] = rng.uniform_sym();
        net.branch_coefficients[j] = coeff_scale * f(net.centers[j]);
    }
    net.neuron_count = N * cb.n * (k + 1);
    return net;
}

double eval_network(const LayeredNetwork& net, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != net.dims)
        throw std::invalid_argument("eval_network: dimension mismatch");
    if (net.kind == LayeredNetwork::Kind::quadrature1d) {
        double sum = 0.0;
        for (std::size_t u = 0; u < net.hidden_w.size(); ++u) {
            sum += net.output_coefficients[u] *
                   eval_activation(net.activation, net.hidden_w[u] * x[0] + net.hidden_b[u]);
        }
        return sum;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < net.centers.size(); ++j) {
        if (net.branch_coefficients[j] == 0.0) continue;
        sum += net.branch_coefficients[j] * branch_value(net, x, static_cast<long>(j));
    }
    return sum;
}

double eval_network(const LayeredNetwork& net, double x) {
    return eval_network(net, std::vector<double>{x});
}

ErrorBudget error_budget(const std::function<double(double)>& modulus, double delta,
                         double partition_norm, const BFunction1D& B, double theta,
                         double f_sup, int dims, double tol) {
    if (!(delta > 0.0) || !(theta > 0.0) || !(partition_norm > 0.0))
        throw std::invalid_argument("error_budget: delta, theta, partition_norm must be positive");
    ErrorBudget budget;
    budget.modulus_delta = modulus(delta);
    budget.modulus_partition = std::ldexp(modulus(partition_norm), dims);
    double norm;
    if (B.facts.signed_integral) {
        norm = *B.facts.signed_integral;
    } else {
        norm = signed_integral(B, tol);
    }
    budget.tail = 2.0 * f_sup * tail_mass(B, theta, delta, tol * std::abs(norm)) / std::abs(norm);
    budget.total = budget.modulus_delta + budget.modulus_partition + budget.tail;
    return budget;
}

std::function<double(const std::vector<double>&)> compactify_target(
    std::function<double(const std::vector<double>&)> g, double b, int dims) {
    if (!(b > 0.0) || !(b * std::sqrt(2.0) < 1.0))
        throw std::invalid_argument("compactify_target: requires 0 < sqrt(2)*b < 1");
    if (dims < 1) throw std::invalid_argument("compactify_target: dims must be >= 1");
    return [g = std::move(g), b, dims](const std::vector<double>& x) {
        if (static_cast<int>(x.size()) != dims)
            throw std::invalid_argument("compactified target: dimension mismatch");
        std::vector<double> clamped(x.size());
        double cutoff = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = std::abs(x[i]);
            clamped[i] = std::clamp(x[i], -b, b);
            if (a >= 1.0) return 0.0;
            if (a > b) {
                const double s = (1.0 - a) / (1.0 - b);
                cutoff *= s * s * (3.0 - 2.0 * s);
            }
        }
        return g(clamped) * cutoff;
    };
}

nlohmann::json export_network(const LayeredNetwork& net) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = kind_string(net.kind);
    j["activation"] = {{"id", net.activation.name()}, {"params", net.activation.params}};
    j["variant"] = to_string(net.variant);
    j["theta"] = net.theta;
    j["dims"] = net.dims;
    j["normalizer"] = net.normalizer;
    j["output_coefficients"] = net.kind == LayeredNetwork::Kind::quadrature1d
                                   ? net.output_coefficients
                                   : net.branch_coefficients;

    nlohmann::json layers = nlohmann::json::array();
    if (net.kind == LayeredNetwork::Kind::quadrature1d) {
        nlohmann::json layer;
        layer["weights"] = nlohmann::json::array();
        for (double w : net.hidden_w) layer["weights"].push_back(std::vector<double>{w});
        layer["biases"] = net.hidden_b;
        layers.push_back(layer);
    } else {
        // stage structure shared by all branches: row l carries the input
        // weight 1/theta on coordinate i and the previous-stage weight
        // offset_l; branch-specific center shifts live in metadata.centers
        for (int i = 0; i < net.dims; ++i) {
            nlohmann::json layer;
            layer["weights"] = nlohmann::json::array();
            layer["biases"] = nlohmann::json::array();
            for (std::size_t l = 0; l < net.stage_offsets.size(); ++l) {
                std::vector<double> row(net.dims + 1, 0.0);
                row[i] = 1.0 / net.theta;
                row[net.dims] = net.stage_offsets[l];
                layer["weights"].push_back(row);
                layer["biases"].push_back(0.0);
            }
            layer["combine"] = net.combine;
            layers.push_back(layer);
        }
    }
    j["layers"] = layers;

    nlohmann::json meta;
    if (net.kind == LayeredNetwork::Kind::quadrature1d) {
        meta["m"] = net.m_or_samples;
    } else {
        meta["N"] = net.m_or_samples;
        meta["centers"] = net.centers;
    }
    meta["seed"] = net.seed;
    meta["recipe"] = net.recipe;
    meta["neuron_count"] = net.neuron_count;
    j["metadata"] = meta;
    return j;
}

LayeredNetwork import_network(const nlohmann::json& j) {
    for (const char* field : {"version", "kind", "activation", "variant", "theta", "dims",
                              "normalizer", "layers", "output_coefficients", "metadata"}) {
        if (!j.contains(field))
            throw std::invalid_argument(std::string("import_network: missing field '") + field + "'");
    }
    if (j.at("version").get<int>() != 1)
        throw std::invalid_argument("import_network: unsupported version");

    LayeredNetwork net;
    net.kind = kind_from_string(j.at("kind").get<std::string>());
    const auto& act = j.at("activation");
    net.activation = make_activation(activation_id_from_string(act.at("id").get<std::string>()),
                                     act.at("params").get<std::map<std::string, double>>());
    net.variant = variant_from_string(j.at("variant").get<std::string>());
    net.theta = j.at("theta").get<double>();
    net.dims = j.at("dims").get<int>();
    net.normalizer = j.at("normalizer").get<double>();

    const auto& meta = j.at("metadata");
    net.seed = meta.value("seed", std::uint64_t{0});
    net.recipe = meta.value("recipe", std::string{});
    net.neuron_count = meta.value("neuron_count", 0L);

    if (net.kind == LayeredNetwork::Kind::quadrature1d) {
        const auto& layer = j.at("layers").at(0);
        for (const auto& row : layer.at("weights")) net.hidden_w.push_back(row.at(0).get<double>());
        net.hidden_b = layer.at("biases").get<std::vector<double>>();
        net.output_coefficients = j.at("output_coefficients").get<std::vector<double>>();
        if (net.hidden_w.size() != net.hidden_b.size() ||
            net.hidden_w.size() != net.output_coefficients.size())
            throw std::invalid_argument("import_network: inconsistent layer sizes");
        net.m_or_samples = meta.value("m", 0L);
    } else {
        const auto& layer = j.at("layers").at(0);
        for (const auto& row : layer.at("weights"))
            net.stage_offsets.push_back(row.at(net.dims).get<double>());
        net.combine = layer.at("combine").get<std::vector<double>>();
        net.centers = meta.at("centers").get<std::vector<std::vector<double>>>();
        net.branch_coefficients = j.at("output_coefficients").get<std::vector<double>>();
        if (net.centers.size() != net.branch_coefficients.size())
            throw std::invalid_argument("import_network: inconsistent branch sizes");
        net.m_or_samples = meta.value("N", 0L);
    }
    return net;
}

} // namespace nai
