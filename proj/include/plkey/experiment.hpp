// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Ensemble experiments: Alice, Bob and Eve on distinct outlets of random
// topologies, keys from either technique, and one CSV row per realization.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "plkey/sounding.hpp"
#include "plkey/tdst.hpp"
#include "plkey/tmt.hpp"
#include "plkey/topology.hpp"

namespace plkey {

enum class Method { tdst, tmt };
enum class QuantizerKind { binary_gray, coded };
enum class SweepVariable { none, m, n_blocks, epsilon, pad_factor, gamma, nbits, z_t, z_l, snr_db, n_avg };

struct ExperimentConfig {
    FrequencyGrid grid = FrequencyGrid::span(0.1e6, 80e6, 512);
    TopologyParams topology{};
    NoisySounder sounder{};
    double z_t = 1.0;
    double z_l = 1e4;
    Method method = Method::tdst;
    QuantizerKind quantizer = QuantizerKind::binary_gray;
    unsigned nbits = 8;
    double full_scale = 1.0;
    TdstConfig tdst{};
    SolveOptions tmt{};
    SweepVariable sweep = SweepVariable::none;
    std::vector<double> sweep_values{0.0};
    std::size_t n_realizations = 100;
    std::uint64_t master_seed = 1;
    std::string output;

    void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field, defaults included.
std::string config_to_json(const ExperimentConfig& cfg);

/// Copy of cfg with the sweep variable set to value.
ExperimentConfig apply_sweep(const ExperimentConfig& cfg, double value);

std::string to_string(Method m);
std::string to_string(QuantizerKind q);
std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

struct Roles {
    NodeId alice = 0;
    NodeId bob = 0;
    NodeId eve = 0;
};

/// Seed of realization r; independent of the sweep point so every sweep value
/// sees the same topologies and noise.
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization);

/// Three distinct outlets drawn from the topology.
Roles assign_roles(const Topology& top, std::uint64_t seed);

struct RealizationResult {
    double d_ab = 0.0;
    double d_ae = 0.0;
    double rho_ab = 0.0;
    double rho_ae = 0.0;
    double delta_median_db = 0.0;
    double key_entropy = 0.0;
    double asymmetry = 0.0;
    Roles roles;
    std::string key_alice, key_bob, key_eve;
};

RealizationResult run_realization(const ExperimentConfig& cfg, std::size_t realization);

struct ResultRow {
    double sweep = 0.0;
    std::string realization; // index, or mean / median / ratio for aggregates
    double d_ab = 0.0;
    double d_ae = 0.0;
    double rho_ab = 0.0;
    double rho_ae = 0.0;
    double delta_median_db = 0.0;
    double key_entropy = 0.0;
    double asymmetry = 0.0;
};

struct ResultTable {
    std::vector<std::string> comments; // written as '# ' lines above the header
    std::vector<ResultRow> rows;

    /// Per-realization rows for one sweep value (aggregates excluded).
    std::vector<ResultRow> realizations(double sweep) const;
    const ResultRow* aggregate(double sweep, const std::string& which) const;
};

/// Every sweep value x realization, then mean / median / ratio rows per sweep value.
/// Rows come out in (sweep, realization) order whatever `jobs` is.
ResultTable run(const ExperimentConfig& cfg, std::size_t jobs = 1);

inline constexpr const char* kCsvHeader =
    "sweep,realization,d_ab,d_ae,rho_ab,rho_ae,delta_median_db,key_entropy,asymmetry";

void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_csv(std::istream& in);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

struct InvariantReport {
    std::size_t topologies = 0;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Channel-level invariants on topologies seeded seed_begin .. seed_begin + count - 1.
InvariantReport check_invariants(const ExperimentConfig& cfg, std::uint64_t seed_begin, std::size_t count);

} // namespace plkey
