// Experiment runner: builds a cluster-process model from a declarative
// config, dispatches one check or sampler, and writes JSON-lines records and
// CSV data.  Outputs are a pure function of (config, seed).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cpm/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cpm::ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster point process simulation and verification toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t replicas = 0;
    bool replicas_set = false;
    int threads = -1;

    const std::vector<std::string> subcommands = {
        "run",      "sample",    "laplace-check", "varpi-check", "droplet-check",
        "qi-check", "ibp-check", "corr-check",    "dynamics",    "properness"};
    for (const auto& name : subcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seed, "overrides [run] seed")
            ->each([&seed_set](const std::string&) { seed_set = true; });
        sub->add_option("--replicas", replicas, "overrides [run] replicas")
            ->each([&replicas_set](const std::string&) { replicas_set = true; });
        sub->add_option("--threads", threads, "replica-level thread cap (0 = default)");
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        cpm::ExperimentOverrides overrides;
        if (seed_set) overrides.seed = seed;
        if (replicas_set) overrides.replicas = replicas;
        if (threads >= 0) overrides.threads = threads;

        cpm::Experiment ex = cpm::build_experiment(read_file(config_path), overrides);
        const std::string sub = app.get_subcommands().front()->get_name();
        return cpm::run_experiment(ex, sub, out_dir, std::cout);
    } catch (const cpm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
