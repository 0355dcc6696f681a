#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nai/composed.hpp"
#include "nai/network.hpp"
#include "nai/riemann.hpp"
#include "nai/targets.hpp"
#include "nai/verify.hpp"

namespace {

using nlohmann::json;

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> params;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--params", "expected key=value, got '" + kv + "'");
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return params;
}

struct Options {
    std::string activation = "repu";
    std::vector<std::string> params;
    int dims = 1;
    double theta = 0.1;
    double delta = 0.0;
    int m = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int grid_res = 512;
    std::string out;
    int workers = 1;
    std::string target = "hat";
    std::string target_file;
    double lipschitz = 1.0;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--activation", opt.activation, "catalog activation id");
    cmd->add_option("--params", opt.params, "activation parameters as key=value");
    cmd->add_option("--dims", opt.dims, "input dimension");
    cmd->add_option("--theta", opt.theta, "kernel scale");
    cmd->add_option("--delta", opt.delta, "error-budget split radius (default sqrt(theta))");
    cmd->add_option("--m", opt.m, "partition cells for the 1-D deterministic builder");
    cmd->add_option("--samples", opt.samples, "Monte-Carlo sample count");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--tol", opt.tol, "numeric tolerance");
    cmd->add_option("--grid-res", opt.grid_res, "evaluation grid resolution per axis");
    cmd->add_option("--out", opt.out, "output path");
    cmd->add_option("--workers", opt.workers, "parallel estimator streams");
}

json resolved_config(const std::string& command, const Options& opt) {
    return json{{"command", command},
                {"activation", opt.activation},
                {"params", parse_params(opt.params)},
                {"dims", opt.dims},
                {"theta", opt.theta},
                {"delta", opt.delta},
                {"m", opt.m},
                {"samples", opt.samples},
                {"seed", opt.seed},
                {"tol", opt.tol},
                {"grid_res", opt.grid_res},
                {"target", opt.target},
                {"workers", opt.workers}};
}

nai::ActivationSpec make_spec(const Options& opt) {
    return nai::make_activation(nai::activation_id_from_string(opt.activation),
                                parse_params(opt.params));
}

nai::Target make_target(const Options& opt) {
    if (!opt.target_file.empty()) return nai::make_sampled(opt.target_file, opt.lipschitz);
    return nai::make_builtin_target(opt.target, opt.dims);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

int cmd_catalog(bool as_json, const std::string& only_id) {
    if (as_json) {
        std::cout << nai::catalog_json().dump(2) << "\n";
        return 0;
    }
    std::printf("%-12s %-10s %-14s %s\n", "id", "fd_order_k", "recipe_scale", "params");
    for (const auto& spec : nai::list_catalog()) {
        if (!only_id.empty() && spec.name() != only_id) continue;
        std::string params;
        for (const auto& [k, v] : spec.params)
            params += k + "=" + nai::format_double(v) + " ";
        std::printf("%-12s %-10d %-14s %s\n", spec.name().c_str(), spec.fd_order_k,
                    nai::format_double(spec.recipe_scale).c_str(), params.c_str());
    }
    return 0;
}

int cmd_bfunc_grid(const Options& opt) {
    if (opt.out.empty()) throw CLI::ValidationError("--out", "output path required");
    if (opt.dims < 1 || opt.dims > 3)
        throw CLI::ValidationError("--dims", "grid emission supports dims 1..3");
    const nai::ComposedB cb = nai::make_composed(make_spec(opt), opt.dims);
    nai::write_grid_csv(cb, opt.grid_res, opt.out);
    write_text(opt.out + ".meta.json", resolved_config("bfunc-grid", opt).dump(2) + "\n");
    std::cout << "wrote " << opt.out << "\n";
    return 0;
}

int cmd_approximate(const Options& opt) {
    if (opt.out.empty()) throw CLI::ValidationError("--out", "output path required");
    if (opt.m > 0 && opt.samples > 0)
        throw CLI::ValidationError("--m/--samples", "choose one builder, not both");
    if (opt.m > 0 && opt.dims != 1)
        throw CLI::ValidationError("--m", "the deterministic builder is 1-D only");
    if (opt.m <= 0 && opt.samples <= 0)
        throw CLI::ValidationError("--m/--samples", "one builder selector is required");

    const nai::ActivationSpec spec = make_spec(opt);
    const nai::Target target = make_target(opt);
    const double delta = opt.delta > 0.0 ? opt.delta : std::sqrt(opt.theta);

    nai::LayeredNetwork net;
    if (opt.m > 0) {
        nai::BFunction1D B = nai::build_bfunction(spec, 1.0);
        net = nai::build_quadrature_network_1d(
            [&target](double x) { return target.f({x}); }, B, opt.theta, opt.m);
    } else {
        const nai::ComposedB cb = nai::make_composed(spec, opt.dims);
        net = nai::build_mc_network(target.f, cb, opt.theta, opt.samples, opt.seed, 200000,
                                    opt.workers);
    }

    // sup error on a uniform lattice (dims 1 and 2 report a measured error)
    double sup_error = -1.0;
    if (opt.dims <= 2) {
        sup_error = 0.0;
        std::vector<double> x(opt.dims);
        const long per_axis = opt.grid_res;
        const long total = opt.dims == 1 ? per_axis : per_axis * per_axis;
        for (long i = 0; i < total; ++i) {
            x[0] = -1.0 + 2.0 * (opt.dims == 1 ? i : i / per_axis) / (per_axis - 1);
            if (opt.dims == 2) x[1] = -1.0 + 2.0 * (i % per_axis) / (per_axis - 1);
            sup_error = std::max(sup_error, std::abs(nai::eval_network(net, x) - target.f(x)));
        }
    }

    json report;
    report["config"] = resolved_config("approximate", opt);
    report["network"] = nai::export_network(net);
    report["neuron_count"] = net.neuron_count;
    if (sup_error >= 0.0) report["sup_grid_error"] = sup_error;
    if (opt.dims == 1) {
        nai::BFunction1D B = nai::build_bfunction(spec, 1.0);
        const double partition_norm = opt.m > 0 ? 2.0 / opt.m : delta;
        const nai::ErrorBudget budget = nai::error_budget(
            [&target](double h) { return target.lipschitz * h; }, delta, partition_norm, B,
            opt.theta, target.sup_norm, 1, opt.tol);
        report["error_budget"] = {{"modulus_delta", budget.modulus_delta},
                                  {"modulus_partition", budget.modulus_partition},
                                  {"tail", budget.tail},
                                  {"total", budget.total}};
    }
    write_text(opt.out, report.dump(2) + "\n");
    std::cout << "wrote " << opt.out << " (neurons: " << net.neuron_count;
    if (sup_error >= 0.0) std::cout << ", sup grid error: " << nai::format_double(sup_error);
    std::cout << ")\n";
    return 0;
}

int cmd_verify(const Options& opt, bool all, const std::string& only_id, bool irwin_hall,
               bool alternating, int kmax) {
    const std::vector<double> h_grid = {0.25, 0.5, 1.0, 2.0};
    std::vector<nai::VerificationReport> reports;

    if (alternating || all) reports.push_back(nai::check_alternating_sum(kmax));
    if (irwin_hall || all) reports.push_back(nai::check_irwin_hall(5, 1e-8, 2000));
    if (!only_id.empty()) {
        nai::ActivationSpec spec = make_spec(opt);
        reports.push_back(nai::verify_nai(spec, h_grid, opt.tol));
    }
    if (all) {
        for (const auto& spec : nai::list_catalog())
            reports.push_back(nai::verify_nai(spec, h_grid, opt.tol));
        reports.push_back(nai::check_taylor_remainder(
            nai::make_activation(nai::ActivationId::sigmoid), 1, {0.25, 0.5, 1.0, 2.0},
            {-1.5, -0.4, 0.0, 0.7, 2.0}, 1e-8));
        reports.push_back(nai::check_taylor_remainder(
            nai::make_activation(nai::ActivationId::gelu), 2, {0.25, 0.5, 1.0, 2.0},
            {-1.5, -0.4, 0.0, 0.7, 2.0}, 1e-8));
        const std::vector<double> thetas = {1.0, 0.5, 0.25, 0.125, 0.0625};
        reports.push_back(nai::check_ai_conditions(
            nai::make_composed(nai::make_activation(nai::ActivationId::sigmoid), 1), thetas, 0.5,
            1e-4));
        reports.push_back(nai::check_ai_conditions(
            nai::make_composed(nai::make_activation(nai::ActivationId::repu, {{"q", 1.0}}), 1),
            thetas, 0.5, 1e-4));
        reports.push_back(nai::check_general_framework(
            nai::make_activation(nai::ActivationId::sigmoid), 1, h_grid, 1e-6));
        reports.push_back(nai::check_general_framework(
            nai::make_activation(nai::ActivationId::gelu), 2, h_grid, 1e-6));
    }
    if (reports.empty())
        throw CLI::ValidationError("verify", "select --all, --id, --irwin-hall or --alternating-sum");

    bool ok = true;
    json out_json = json::array();
    for (const auto& r : reports) {
        std::cout << nai::report_text(r);
        out_json.push_back(nai::report_json(r));
        ok = ok && r.all_passed();
    }
    if (!opt.out.empty()) write_text(opt.out, out_json.dump(2) + "\n");
    std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
    return ok ? 0 : 1;
}

int cmd_rate_study(const Options& opt, std::vector<long> n_list, int trials) {
    if (n_list.empty()) n_list = {64, 256, 1024, 4096, 16384};
    if (trials == 1)
        std::cerr << "warning: failure_fraction is meaningless with a single trial\n";
    const nai::ComposedB cb = nai::make_composed(make_spec(opt), opt.dims);
    const nai::Target target = make_target(opt);
    const nai::RateStudyResult result =
        nai::rate_study(target, cb, n_list, trials, opt.grid_res, opt.seed);

    std::string csv = "N,trial,error\n";
    for (std::size_t ni = 0; ni < result.N_values.size(); ++ni) {
        for (std::size_t t = 0; t < result.errors[ni].size(); ++t) {
            csv += std::to_string(result.N_values[ni]) + "," + std::to_string(t) + "," +
                   nai::format_double(result.errors[ni][t]) + "\n";
        }
    }
    if (!opt.out.empty()) {
        write_text(opt.out, csv);
        json meta = resolved_config("rate-study", opt);
        meta["summary"] = nai::rate_study_json(result);
        write_text(opt.out + ".meta.json", meta.dump(2) + "\n");
    } else {
        std::cout << csv;
    }
    std::cout << "slope: " << nai::format_double(result.slope)
              << " +- " << nai::format_double(result.slope_half_width) << "\n";
    for (std::size_t ni = 0; ni < result.N_values.size(); ++ni) {
        std::cout << "N=" << result.N_values[ni]
                  << " median=" << nai::format_double(result.median_errors[ni])
                  << " failure_fraction=" << nai::format_double(result.failure_fraction[ni])
                  << " at epsilon=" << nai::format_double(result.epsilon_at_n[ni]) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constructive kernel-network toolkit"};
    app.require_subcommand(1);

    Options opt;
    bool catalog_json_flag = false;
    std::string catalog_id;
    bool verify_all = false, verify_irwin = false, verify_alt = false;
    std::string verify_id;
    int kmax = 12;
    std::vector<long> n_list;
    int trials = 16;

    auto* catalog = app.add_subcommand("catalog", "list the activation catalog");
    catalog->add_flag("--json", catalog_json_flag, "machine-readable dump");
    catalog->add_option("--id", catalog_id, "show a single entry");

    auto* grid = app.add_subcommand("bfunc-grid", "emit kernel lattice samples as CSV");
    add_common(grid, opt);

    auto* approx = app.add_subcommand("approximate", "build a network for a target");
    add_common(approx, opt);
    approx->add_option("--target", opt.target, "hat, radial-bump, sine-bump, constant, zero");
    approx->add_option("--target-file", opt.target_file, "CSV of x,value samples (1-D)");
    approx->add_option("--lipschitz", opt.lipschitz, "declared Lipschitz constant for sampled targets");

    auto* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify, opt);
    verify->add_flag("--all", verify_all, "run the full suite");
    verify->add_option("--id", verify_id, "verify one activation");
    verify->add_flag("--irwin-hall", verify_irwin, "uniform-sum density equivalence");
    verify->add_flag("--alternating-sum", verify_alt, "exact binomial identity");
    verify->add_option("--kmax", kmax, "alternating-sum depth");

    auto* rate = app.add_subcommand("rate-study", "Monte-Carlo error decay experiment");
    add_common(rate, opt);
    rate->add_option("--target", opt.target, "built-in target name");
    rate->add_option("--n-list", n_list, "sample counts");
    rate->add_option("--trials", trials, "networks per sample count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (catalog->parsed()) return cmd_catalog(catalog_json_flag, catalog_id);
        if (grid->parsed()) return cmd_bfunc_grid(opt);
        if (approx->parsed()) return cmd_approximate(opt);
        if (verify->parsed()) {
            if (!verify_id.empty()) opt.activation = verify_id;
            return cmd_verify(opt, verify_all, verify_id, verify_irwin, verify_alt, kmax);
        }
        if (rate->parsed()) return cmd_rate_study(opt, n_list, trials);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
