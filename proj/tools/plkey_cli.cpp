// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

#include "plkey/experiment.hpp"
#include "plkey/topology_io.hpp"

namespace {

plkey::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> seed)
{
    plkey::ExperimentConfig cfg = path.empty() ? plkey::ExperimentConfig{} : plkey::load_config(path);
    if (seed)
        cfg.master_seed = *seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"plkey: power-line channel synthesis and physical-layer key generation"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::size_t count = 100;
    std::size_t realization = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed (overrides config)");
    };

    auto* synth = app.add_subcommand("synth", "write a random topology as JSON");
    common(synth);
    synth->add_option("--out", out_path, "output file (stdout if omitted)");

    auto* keygen = app.add_subcommand("keygen", "one realization: print roles, keys and distances");
    common(keygen);
    keygen->add_option("--realization", realization, "realization index");

    auto* sweep = app.add_subcommand("sweep", "run the full ensemble and write CSV");
    common(sweep);
    sweep->add_option("--out", out_path, "CSV path (config 'output', else stdout)");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "channel invariants on a seed range");
    common(check);
    check->add_option("--count", count, "number of seeds")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        const plkey::ExperimentConfig cfg = load(config_path, seed);

        if (synth->parsed()) {
            const plkey::Topology top = plkey::synthesize(cfg.master_seed, cfg.topology);
            if (out_path.empty())
                std::cout << plkey::topology_to_json(top) << '\n';
            else
                plkey::save_topology(top, out_path);
        } else if (keygen->parsed()) {
            const auto r = plkey::run_realization(plkey::apply_sweep(cfg, cfg.sweep_values.front()), realization);
            std::cout << "method     " << plkey::to_string(cfg.method) << '\n'
                      << "outlets    alice=" << r.roles.alice << " bob=" << r.roles.bob << " eve=" << r.roles.eve
                      << '\n'
                      << "key_alice  " << r.key_alice << '\n'
                      << "key_bob    " << r.key_bob << '\n'
                      << "key_eve    " << r.key_eve << '\n'
                      << "d_ab       " << plkey::format_double(r.d_ab) << '\n'
                      << "d_ae       " << plkey::format_double(r.d_ae) << '\n'
                      << "rho_ab     " << plkey::format_double(r.rho_ab) << '\n'
                      << "rho_ae     " << plkey::format_double(r.rho_ae) << '\n';
            if (cfg.method == plkey::Method::tmt)
                std::cout << "delta_db   " << plkey::format_double(r.delta_median_db) << '\n';
        } else if (sweep->parsed()) {
            const plkey::ResultTable table = plkey::run(cfg, jobs);
            const std::string path = out_path.empty() ? cfg.output : out_path;
            if (path.empty())
                plkey::emit_csv(table, std::cout);
            else
                plkey::emit_csv(table, std::filesystem::path(path));
        } else if (check->parsed()) {
            const std::uint64_t first = seed.value_or(cfg.master_seed);
            const plkey::InvariantReport rep = plkey::check_invariants(cfg, first, count);
            for (const auto& f : rep.failures)
                std::cout << "FAIL " << f << '\n';
            std::cout << rep.topologies << " topologies, " << rep.checks << " checks, " << rep.failures.size()
                      << " failures\n";
            return rep.ok() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "plkey: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
