// Command-line front end: run, sweep, instance, exact product-tv, verify.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vcdl/acceptance.hpp"
#include "vcdl/vcdl.hpp"

namespace {

using vcdl::json;

void emit(const vcdl::ExperimentResult& res, const std::string& out) {
    const std::string csv = vcdl::to_csv(res);
    if (out.empty() || out == "-") {
        std::cout << csv;
    } else {
        vcdl::write_text_file(out, csv);
    }
    json summaries = json::array();
    for (const auto& s : res.summaries) summaries.push_back(vcdl::to_json_value(s));
    if (!summaries.empty()) std::cerr << summaries.dump(2) << '\n';
}

int run_config(const std::string& path, const std::string& out, std::optional<std::uint64_t> reps,
               std::optional<std::uint64_t> seed, bool require_sweep) {
    auto cfg = vcdl::load_config(path);
    if (require_sweep && cfg.kind != "sweep") throw vcdl::ConfigError({"kind: sweep expected for the sweep command"});
    if (reps) cfg.reps = *reps;
    if (seed) cfg.base_seed = *seed;
    if (cfg.reps < 1) throw vcdl::ConfigError({"reps: must be >= 1"});
    emit(vcdl::run_experiment(cfg), out.empty() ? cfg.output : out);
    return 0;
}

/// Accepts a pair file {"P":…, "q":…, "valid":…} or a full instance file.
int exact_product_tv(const std::string& path, std::uint64_t n, std::size_t q_index, std::optional<double> margin) {
    const json j = vcdl::read_json_file(path);
    vcdl::PiecewiseDensity P = vcdl::density_from_json(j.at("P"));
    std::optional<vcdl::PiecewiseDensity> q;
    if (j.contains("q")) {
        q = vcdl::density_from_json(j.at("q"));
    } else {
        const auto inst = vcdl::instance_from_json(j);
        q = inst.Q.at(q_index);
    }
    const auto rep = vcdl::product_tv_report(P, *q, n, margin, path);
    std::cout << vcdl::producttv_csv_header() << vcdl::producttv_csv_row(rep);
    return rep.sandwich_holds() && rep.margin_holds() ? 0 : 1;
}

int verify(const std::string& name) {
    int failed = 0, ran = 0;
    for (const auto& suite : vcdl::acceptance::suites()) {
        if (name != "all" && name != suite.name) continue;
        const auto r = suite.run();
        std::printf("%s\n", vcdl::acceptance::format_result(r).c_str());
        std::fflush(stdout);
        ++ran;
        failed += r.passed ? 0 : 1;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown suite \"%s\"; known:", name.c_str());
        for (const auto& s : vcdl::acceptance::suites()) std::fprintf(stderr, " %s", s.name.c_str());
        std::fprintf(stderr, " all\n");
        return 2;
    }
    return failed == 0 ? 0 : 1;
}

int write_instance(const std::string& path, const std::string& out, std::uint64_t rep) {
    const auto cfg = vcdl::load_config(path);
    if (cfg.instance.generator.empty()) throw vcdl::ConfigError({"instance: config has no instance"});
    const std::string text = vcdl::to_json_value(vcdl::build_instance(cfg.instance, rep)).dump(2) + "\n";
    if (out.empty() || out == "-") std::cout << text;
    else vcdl::write_text_file(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Validity-constrained distribution learning simulator"};
    app.require_subcommand(1);
    app.footer("Environment: VCDL_THREADS=<k> overrides the worker thread count.");

    std::string config, out, inst_path, suite;
    std::optional<std::uint64_t> reps, seed;
    std::uint64_t n = 0, rep = 0;
    std::size_t q_index = 0;
    std::optional<double> margin;

    auto* run = app.add_subcommand("run", "Run an experiment config and write its CSV");
    run->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "CSV output path ('-' for stdout); defaults to the config's output");
    run->add_option("--reps", reps, "Override the replication count");
    run->add_option("--seed", seed, "Override the base seed");

    auto* sw = app.add_subcommand("sweep", "Run a sweep config");
    sw->add_option("config", config, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
    sw->add_option("--out", out, "CSV output path ('-' for stdout)");

    auto* inst = app.add_subcommand("instance", "Write the instance a config generates");
    inst->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    inst->add_option("--out", out, "JSON output path ('-' for stdout)");
    inst->add_option("--rep", rep, "Replication index (for resampled instances)");

    auto* exact = app.add_subcommand("exact", "Exact enumeration checks");
    exact->require_subcommand(1);
    auto* ptv = exact->add_subcommand("product-tv", "Exact d_TV(P^n, q^n) with its bounds");
    ptv->add_option("instance", inst_path, "Pair or instance JSON")->required()->check(CLI::ExistingFile);
    ptv->add_option("--n", n, "Product length")->required()->check(CLI::Range(std::uint64_t{0}, std::uint64_t{64}));
    ptv->add_option("--q-index", q_index, "Model index when reading an instance file");
    ptv->add_option("--margin-eps", margin, "Report the 1 - exp(-n eps) margin");

    auto* ver = app.add_subcommand("verify", "Run a named acceptance suite");
    ver->add_option("suite", suite, "Suite name, or 'all'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_config(config, out, reps, seed, false);
        if (*sw) return run_config(config, out, std::nullopt, std::nullopt, true);
        if (*inst) return write_instance(config, out, rep);
        if (*ptv) return exact_product_tv(inst_path, n, q_index, margin);
        if (*ver) return verify(suite);
    } catch (const vcdl::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
