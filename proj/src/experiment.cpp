// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "json_fwd.hpp"
#include "plkey/metrics.hpp"
#include "plkey/quantize.hpp"
#include "plkey/rng.hpp"

namespace plkey {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Noise streams, one per (party, observable).
enum Stream : std::uint64_t {
    bob_h1 = 1,
    alice_h2 = 2,
    eve_h_ae = 3,
    alice_zin1 = 4,
    bob_zin2 = 5,
    eve_zin = 6,
    roles = 100,
};

json snr_to_json(double snr)
{
    if (std::isinf(snr))
        return "inf";
    return snr;
}

double snr_from_json(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "inf")
            return kInfiniteSnr;
        throw InvalidArgument("SNR must be a number or \"inf\"");
    }
    return j.get<double>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
            throw InvalidArgument(std::string("config: unknown key '") + it.key() + "' in " + where);
    }
}

Method method_from_string(const std::string& s)
{
    if (s == "tdst")
        return Method::tdst;
    if (s == "tmt")
        return Method::tmt;
    throw InvalidArgument("unknown method '" + s + "'");
}

QuantizerKind quantizer_from_string(const std::string& s)
{
    if (s == "binary-gray")
        return QuantizerKind::binary_gray;
    if (s == "coded")
        return QuantizerKind::coded;
    throw InvalidArgument("unknown quantizer '" + s + "'");
}

RootRule root_rule_from_string(const std::string& s)
{
    if (s == "continuity")
        return RootRule::continuity;
    if (s == "smallest_step")
        return RootRule::smallest_step;
    throw InvalidArgument("unknown root rule '" + s + "'");
}

std::string to_string(RootRule r)
{
    return r == RootRule::continuity ? "continuity" : "smallest_step";
}

std::size_t as_count(double v, const char* what)
{
    if (!(v >= 0.0) || v != std::floor(v))
        throw InvalidArgument(std::string("sweep value for ") + what + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

double nan_mean(const std::vector<double>& v)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            sum += x;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : kNaN;
}

double nan_median(std::vector<double> v)
{
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty())
        return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double key_correlation(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b)
{
    if (a.size() != b.size() || a.empty())
        return kNaN;
    Eigen::VectorXd x(static_cast<Eigen::Index>(a.size())), y(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = a[i];
        y[static_cast<Eigen::Index>(i)] = b[i];
    }
    if (x.squaredNorm() == 0.0 || y.squaredNorm() == 0.0)
        return kNaN;
    return det_correlation(x, y).real();
}

std::vector<std::uint32_t> widen(const BinaryKey& k)
{
    return {k.bits.begin(), k.bits.end()};
}

std::string symbols_to_string(const std::vector<std::uint32_t>& s)
{
    std::ostringstream ss;
    for (std::size_t i = 0; i < s.size(); ++i)
        ss << (i ? " " : "") << s[i];
    return ss.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const
{
    topology.validate();
    sounder.validate();
    tdst.validate();
    if (!(z_t >= 0.0) || !(z_l > 0.0))
        throw InvalidArgument("config: terminations must be z_t >= 0, z_l > 0");
    if (nbits < 1 || nbits > 16)
        throw InvalidArgument("config: nbits must lie in [1, 16]");
    if (!(full_scale > 0.0))
        throw InvalidArgument("config: full_scale must be positive");
    if (sweep_values.empty())
        throw InvalidArgument("config: sweep value list is empty");
    if (n_realizations < 1)
        throw InvalidArgument("config: n_realizations must be at least 1");
    for (double v : sweep_values)
        apply_sweep(*this, v).tdst.validate();
}

std::string to_string(Method m)
{
    return m == Method::tdst ? "tdst" : "tmt";
}

std::string to_string(QuantizerKind q)
{
    return q == QuantizerKind::binary_gray ? "binary-gray" : "coded";
}

std::string to_string(SweepVariable v)
{
    switch (v) {
    case SweepVariable::none: return "none";
    case SweepVariable::m: return "m";
    case SweepVariable::n_blocks: return "n_blocks";
    case SweepVariable::epsilon: return "epsilon";
    case SweepVariable::pad_factor: return "pad_factor";
    case SweepVariable::gamma: return "gamma";
    case SweepVariable::nbits: return "nbits";
    case SweepVariable::z_t: return "z_t";
    case SweepVariable::z_l: return "z_l";
    case SweepVariable::snr_db: return "snr_db";
    case SweepVariable::n_avg: return "n_avg";
    }
    return "none";
}

SweepVariable sweep_variable_from_string(const std::string& s)
{
    for (auto v : {SweepVariable::none, SweepVariable::m, SweepVariable::n_blocks, SweepVariable::epsilon,
                   SweepVariable::pad_factor, SweepVariable::gamma, SweepVariable::nbits, SweepVariable::z_t,
                   SweepVariable::z_l, SweepVariable::snr_db, SweepVariable::n_avg})
        if (to_string(v) == s)
            return v;
    throw InvalidArgument("unknown sweep variable '" + s + "'");
}

ExperimentConfig config_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw InvalidArgument("config: top level must be an object");

    ExperimentConfig c;
    try {
        reject_unknown(j,
                       {"grid", "topology", "sounder", "termination", "method", "quantizer", "nbits", "full_scale",
                        "tdst", "tmt", "sweep", "n_realizations", "master_seed", "output"},
                       "top level");
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"f_start", "f_stop", "f_step", "n_bins"}, "grid");
            const std::size_t n = g.value("n_bins", c.grid.n_bins);
            const double start = g.value("f_start", c.grid.f_start);
            if (g.contains("f_stop"))
                c.grid = FrequencyGrid::span(start, g.at("f_stop").get<double>(), n);
            else
                c.grid = FrequencyGrid(start, g.value("f_step", c.grid.f_step), n);
        }
        if (j.contains("topology"))
            c.topology = topology_params_from_json(j.at("topology"), c.topology);
        if (j.contains("sounder")) {
            const auto& s = j.at("sounder");
            reject_unknown(s, {"snr_h_db", "snr_z_db", "n_avg"}, "sounder");
            if (s.contains("snr_h_db"))
                c.sounder.snr_h_db = snr_from_json(s.at("snr_h_db"));
            if (s.contains("snr_z_db"))
                c.sounder.snr_z_db = snr_from_json(s.at("snr_z_db"));
            c.sounder.n_avg = s.value("n_avg", c.sounder.n_avg);
        }
        if (j.contains("termination")) {
            const auto& t = j.at("termination");
            reject_unknown(t, {"z_t", "z_l"}, "termination");
            c.z_t = t.value("z_t", c.z_t);
            c.z_l = t.value("z_l", c.z_l);
        }
        if (j.contains("method"))
            c.method = method_from_string(j.at("method").get<std::string>());
        if (j.contains("quantizer"))
            c.quantizer = quantizer_from_string(j.at("quantizer").get<std::string>());
        c.nbits = j.value("nbits", c.nbits);
        c.full_scale = j.value("full_scale", c.full_scale);
        if (j.contains("tdst")) {
            const auto& t = j.at("tdst");
            reject_unknown(t, {"pad_factor", "gamma", "epsilon", "n_blocks", "m", "window", "rolloff"}, "tdst");
            c.tdst.pad_factor = t.value("pad_factor", c.tdst.pad_factor);
            c.tdst.gamma = t.value("gamma", c.tdst.gamma);
            c.tdst.epsilon_samples = t.value("epsilon", c.tdst.epsilon_samples);
            c.tdst.n_blocks = t.value("n_blocks", c.tdst.n_blocks);
            c.tdst.m = t.value("m", c.tdst.m);
            if (t.contains("window"))
                c.tdst.window.kind = window_kind_from_string(t.at("window").get<std::string>());
            c.tdst.window.rolloff = t.value("rolloff", c.tdst.window.rolloff);
        }
        if (j.contains("tmt")) {
            const auto& t = j.at("tmt");
            reject_unknown(t, {"root_rule", "rank_tol", "residual_tol", "passivity_tol"}, "tmt");
            if (t.contains("root_rule"))
                c.tmt.root_rule = root_rule_from_string(t.at("root_rule").get<std::string>());
            c.tmt.rank_tol = t.value("rank_tol", c.tmt.rank_tol);
            c.tmt.residual_tol = t.value("residual_tol", c.tmt.residual_tol);
            c.tmt.passivity_tol = t.value("passivity_tol", c.tmt.passivity_tol);
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            reject_unknown(s, {"variable", "values"}, "sweep");
            c.sweep = sweep_variable_from_string(s.value("variable", std::string("none")));
            if (s.contains("values"))
                c.sweep_values = s.at("values").get<std::vector<double>>();
        }
        c.n_realizations = j.value("n_realizations", c.n_realizations);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.output = j.value("output", c.output);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& c)
{
    ordered_json j;
    j["grid"] = {{"f_start", c.grid.f_start}, {"f_step", c.grid.f_step}, {"n_bins", c.grid.n_bins}};
    j["topology"] = to_json(c.topology);
    j["sounder"] = {{"snr_h_db", snr_to_json(c.sounder.snr_h_db)},
                    {"snr_z_db", snr_to_json(c.sounder.snr_z_db)},
                    {"n_avg", c.sounder.n_avg}};
    j["termination"] = {{"z_t", c.z_t}, {"z_l", c.z_l}};
    j["method"] = to_string(c.method);
    j["quantizer"] = to_string(c.quantizer);
    j["nbits"] = c.nbits;
    j["full_scale"] = c.full_scale;
    j["tdst"] = {{"pad_factor", c.tdst.pad_factor},
                 {"gamma", c.tdst.gamma},
                 {"epsilon", c.tdst.epsilon_samples},
                 {"n_blocks", c.tdst.n_blocks},
                 {"m", c.tdst.m},
                 {"window", to_string(c.tdst.window.kind)},
                 {"rolloff", c.tdst.window.rolloff}};
    j["tmt"] = {{"root_rule", to_string(c.tmt.root_rule)},
                {"rank_tol", c.tmt.rank_tol},
                {"residual_tol", c.tmt.residual_tol},
                {"passivity_tol", c.tmt.passivity_tol}};
    j["sweep"] = {{"variable", to_string(c.sweep)}, {"values", c.sweep_values}};
    j["n_realizations"] = c.n_realizations;
    j["master_seed"] = c.master_seed;
    j["output"] = c.output;
    return j.dump(2);
}

ExperimentConfig apply_sweep(const ExperimentConfig& cfg, double value)
{
    ExperimentConfig c = cfg;
    switch (cfg.sweep) {
    case SweepVariable::none: break;
    case SweepVariable::m: c.tdst.m = as_count(value, "m"); break;
    case SweepVariable::n_blocks: c.tdst.n_blocks = as_count(value, "n_blocks"); break;
    case SweepVariable::epsilon: c.tdst.epsilon_samples = as_count(value, "epsilon"); break;
    case SweepVariable::pad_factor: c.tdst.pad_factor = as_count(value, "pad_factor"); break;
    case SweepVariable::gamma: c.tdst.gamma = value; break;
    case SweepVariable::nbits: c.nbits = static_cast<unsigned>(as_count(value, "nbits")); break;
    case SweepVariable::z_t: c.z_t = value; break;
    case SweepVariable::z_l: c.z_l = value; break;
    case SweepVariable::snr_db:
        c.sounder.snr_h_db = value;
        c.sounder.snr_z_db = value;
        break;
    case SweepVariable::n_avg: c.sounder.n_avg = as_count(value, "n_avg"); break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// One realization

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization)
{
    return derive_seed(master_seed, {realization});
}

Roles assign_roles(const Topology& top, std::uint64_t seed)
{
    std::vector<NodeId> outlets = top.outlets();
    if (outlets.size() < 3)
        throw InvalidArgument("assign_roles: topology has fewer than 3 outlets");
    Rng rng(seed);
    // partial Fisher-Yates over the first three slots
    for (std::size_t i = 0; i < 3; ++i)
        std::swap(outlets[i], outlets[i + rng.index(outlets.size() - i)]);
    return {outlets[0], outlets[1], outlets[2]};
}

RealizationResult run_realization(const ExperimentConfig& cfg, std::size_t realization)
{
    const std::uint64_t seed = realization_seed(cfg.master_seed, realization);
    const Topology top = synthesize(seed, cfg.topology);
    const Roles roles = assign_roles(top, derive_seed(seed, {Stream::roles}));
    const FrequencyGrid& grid = cfg.grid;
    const Termination term = Termination::constant(grid, cfg.z_t, cfg.z_l);

    const AbcdChannel ch_ab = extract_two_port(top, grid, {roles.alice, roles.bob});
    const AbcdChannel ch_ae = extract_two_port(top, grid, {roles.alice, roles.eve});

    const Spectrum h1 = ctf_forward(ch_ab, term);   // Alice -> Bob
    const Spectrum h2 = ctf_reverse(ch_ab, term);   // Bob -> Alice
    const Spectrum h_ae = ctf_forward(ch_ae, term); // Alice -> Eve

    NoisySounder sounder = cfg.sounder;
    sounder.seed = seed;
    const Spectrum h1_bob = observe(h1, sounder, Observable::transfer_function, Stream::bob_h1);
    const Spectrum h2_alice = observe(h2, sounder, Observable::transfer_function, Stream::alice_h2);
    const Spectrum h_ae_eve = observe(h_ae, sounder, Observable::transfer_function, Stream::eve_h_ae);

    RealizationResult r;
    r.roles = roles;
    r.asymmetry = asymmetry_metric(h1, h2);

    std::vector<std::uint32_t> ka, kb, ke;
    if (cfg.method == Method::tdst) {
        const BinaryKey a = tdst_key(h2_alice, cfg.tdst);
        const BinaryKey b = tdst_key(h1_bob, cfg.tdst);
        const BinaryKey e = tdst_key(h_ae_eve, cfg.tdst);
        r.d_ab = key_distance(a, b);
        r.d_ae = key_distance(a, e);
        r.key_alice = a.str();
        r.key_bob = b.str();
        r.key_eve = e.str();
        ka = widen(a);
        kb = widen(b);
        ke = widen(e);
        r.delta_median_db = kNaN;
    } else {
        const Spectrum zin1 = zin_port1(ch_ab, term.z_l);
        const Spectrum zin2 = zin_port2(ch_ab, term.z_l);
        const Spectrum zin_eve = zin_port2(ch_ae, term.z_l);
        const Spectrum zin1_public = observe(zin1, sounder, Observable::impedance, Stream::alice_zin1);
        const Spectrum zin2_bob = observe(zin2, sounder, Observable::impedance, Stream::bob_zin2);
        const Spectrum zin_eve_obs = observe(zin_eve, sounder, Observable::impedance, Stream::eve_zin);

        const TmtSolution bob = solve_abcd({h1_bob, zin1_public, zin2_bob, term}, cfg.tmt);
        // Eve runs the same solver on what she can see: her own link from Alice
        // and the public Zin1. Where it fails she falls back to her raw CTF.
        const TmtSolution eve = solve_abcd({h_ae_eve, zin1_public, zin_eve_obs, term}, cfg.tmt);
        Spectrum::Vector eve_csi = h_ae_eve.values();
        for (std::size_t k = 0; k < grid.n_bins; ++k)
            if (eve.status[k] == BinStatus::ok)
                eve_csi[static_cast<Eigen::Index>(k)] = eve.h2_hat[k];
        const Spectrum h2_eve(grid, eve_csi);

        const std::vector<std::uint8_t> mask = bob.mask(); // exchanged publicly
        r.delta_median_db = delta_mismatch(h2_alice, bob.h2_hat).median_db(mask);
        if (bob.n_valid() == 0) {
            r.d_ab = r.d_ae = r.rho_ab = r.rho_ae = r.key_entropy = kNaN;
            return r;
        }

        auto make_key = [&](const Spectrum& csi) {
            const SymbolKey levels = quantize_levels(csi, cfg.nbits, mask);
            if (cfg.quantizer == QuantizerKind::binary_gray)
                return widen(gray_encode(levels));
            return coded_arrange(levels, lsb_value(csi, cfg.nbits, mask), cfg.full_scale).valid_symbols();
        };
        ka = make_key(h2_alice);
        kb = make_key(bob.h2_hat);
        ke = make_key(h2_eve);
        r.d_ab = key_distance(ka, kb);
        r.d_ae = key_distance(ka, ke);
        if (cfg.quantizer == QuantizerKind::binary_gray) {
            auto bits = [](const std::vector<std::uint32_t>& k) {
                std::string s;
                for (auto b : k)
                    s.push_back(b ? '1' : '0');
                return s;
            };
            r.key_alice = bits(ka);
            r.key_bob = bits(kb);
            r.key_eve = bits(ke);
        } else {
            r.key_alice = symbols_to_string(ka);
            r.key_bob = symbols_to_string(kb);
            r.key_eve = symbols_to_string(ke);
        }
    }
    r.rho_ab = key_correlation(ka, kb);
    r.rho_ae = key_correlation(ka, ke);
    r.key_entropy = symbol_entropy(ka);
    return r;
}

// ---------------------------------------------------------------------------
// Ensembles

std::vector<ResultRow> ResultTable::realizations(double sweep) const
{
    std::vector<ResultRow> out;
    for (const auto& row : rows)
        if (row.sweep == sweep && row.realization != "mean" && row.realization != "median" &&
            row.realization != "ratio")
            out.push_back(row);
    return out;
}

const ResultRow* ResultTable::aggregate(double sweep, const std::string& which) const
{
    for (const auto& row : rows)
        if (row.sweep == sweep && row.realization == which)
            return &row;
    return nullptr;
}

ResultTable run(const ExperimentConfig& cfg, std::size_t jobs)
{
    cfg.validate();
    const std::size_t n_sweep = cfg.sweep_values.size();
    const std::size_t n_real = cfg.n_realizations;
    std::vector<ExperimentConfig> points;
    for (double v : cfg.sweep_values)
        points.push_back(apply_sweep(cfg, v));

    const std::size_t n_tasks = n_sweep * n_real;
    std::vector<RealizationResult> results(n_tasks);
    std::vector<std::string> errors(n_tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) {
            try {
                results[t] = run_realization(points[t / n_real], t % n_real);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, n_tasks);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
    }
    for (std::size_t t = 0; t < n_tasks; ++t)
        if (!errors[t].empty())
            throw Error("realization " + std::to_string(t % n_real) + " (sweep value " +
                        format_double(cfg.sweep_values[t / n_real]) + "): " + errors[t]);

    ResultTable table;
    table.comments.push_back("plkey ensemble results");
    std::istringstream cfg_text(config_to_json(cfg));
    for (std::string line; std::getline(cfg_text, line);)
        table.comments.push_back(line);

    for (std::size_t s = 0; s < n_sweep; ++s) {
        const double sv = cfg.sweep_values[s];
        std::vector<double> d_ab, d_ae, rho_ab, rho_ae, delta, ent, asym;
        for (std::size_t i = 0; i < n_real; ++i) {
            const auto& r = results[s * n_real + i];
            table.rows.push_back({sv, std::to_string(i), r.d_ab, r.d_ae, r.rho_ab, r.rho_ae, r.delta_median_db,
                                  r.key_entropy, r.asymmetry});
            d_ab.push_back(r.d_ab);
            d_ae.push_back(r.d_ae);
            rho_ab.push_back(r.rho_ab);
            rho_ae.push_back(r.rho_ae);
            delta.push_back(r.delta_median_db);
            ent.push_back(r.key_entropy);
            asym.push_back(r.asymmetry);
        }
        const ResultRow mean{sv,           "mean",        nan_mean(d_ab),  nan_mean(d_ae),
                             nan_mean(rho_ab), nan_mean(rho_ae), nan_mean(delta), nan_mean(ent),
                             nan_mean(asym)};
        table.rows.push_back(mean);
        table.rows.push_back({sv, "median", nan_median(d_ab), nan_median(d_ae), nan_median(rho_ab),
                              nan_median(rho_ae), nan_median(delta), nan_median(ent), nan_median(asym)});
        // ratio row: Eve/legitimate distance ratio and legitimate/Eve correlation ratio
        table.rows.push_back({sv, "ratio", kNaN, mean.d_ae / mean.d_ab, kNaN, mean.rho_ab / mean.rho_ae, kNaN,
                              kNaN, kNaN});
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void emit_csv(const ResultTable& table, std::ostream& out)
{
    for (const auto& c : table.comments)
        out << "# " << c << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : table.rows) {
        out << format_double(r.sweep) << ',' << r.realization << ',' << format_double(r.d_ab) << ','
            << format_double(r.d_ae) << ',' << format_double(r.rho_ab) << ',' << format_double(r.rho_ae) << ','
            << format_double(r.delta_median_db) << ',' << format_double(r.key_entropy) << ','
            << format_double(r.asymmetry) << '\n';
    }
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    emit_csv(table, out);
}

namespace {

double parse_double(const std::string& s)
{
    if (s == "nan")
        return kNaN;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidArgument("csv: bad number '" + s + "'");
    return v;
}

} // namespace

ResultTable read_csv(std::istream& in)
{
    ResultTable table;
    bool header = false;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("# ", 0) == 0 && !header) {
            table.comments.push_back(line.substr(2));
            continue;
        }
        if (!header) {
            if (line != kCsvHeader)
                throw InvalidArgument("csv: unexpected header");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            f.push_back(cell);
        if (f.size() != 9)
            throw InvalidArgument("csv: expected 9 fields");
        table.rows.push_back({parse_double(f[0]), f[1], parse_double(f[2]), parse_double(f[3]),
                              parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), parse_double(f[7]),
                              parse_double(f[8])});
    }
    if (!header)
        throw InvalidArgument("csv: missing header");
    return table;
}

// ---------------------------------------------------------------------------
// Invariant suite

InvariantReport check_invariants(const ExperimentConfig& cfg, std::uint64_t seed_begin, std::size_t count)
{
    InvariantReport rep;
    const FrequencyGrid& grid = cfg.grid;
    const Termination mismatched = Termination::constant(grid, cfg.z_t, cfg.z_l);
    const Termination matched = Termination::constant(grid, cfg.z_l, cfg.z_l);

    for (std::uint64_t seed = seed_begin; seed < seed_begin + count; ++seed) {
        const std::string tag = "seed " + std::to_string(seed) + ": ";
        auto expect = [&](bool ok, const std::string& what) {
            ++rep.checks;
            if (!ok)
                rep.failures.push_back(tag + what);
        };
        try {
            const Topology top = synthesize(seed, cfg.topology);
            ++rep.topologies;
            const Roles roles = assign_roles(top, derive_seed(seed, {Stream::roles}));
            const AbcdChannel ab = extract_two_port(top, grid, {roles.alice, roles.bob});
            const AbcdChannel ba = extract_two_port(top, grid, {roles.bob, roles.alice});

            expect(ab.max_reciprocity_error() <= kReciprocityTol, "reciprocity");

            const AbcdChannel rev = reverse_direction(ba);
            auto rel = [](const auto& x, const auto& y) {
                return ((x - y).cwiseAbs().array() / x.cwiseAbs().array().max(1e-300)).maxCoeff();
            };
            const double path_err = std::max({rel(ab.a(), rev.a()), rel(ab.b(), rev.b()), rel(ab.c(), rev.c()),
                                              rel(ab.d(), rev.d())});
            expect(path_err <= 1e-9, "path symmetry");

            const Spectrum h1m = ctf_forward(ab, matched);
            const Spectrum h2m = ctf_reverse(ab, matched);
            expect(((h1m.values() - h2m.values()).cwiseAbs().array() / h1m.values().cwiseAbs().array())
                           .maxCoeff() <= 1e-12,
                   "matched-termination symmetry");

            const Spectrum zin1 = zin_port1(ab, mismatched.z_l);
            const Spectrum zin2 = zin_port2(ab, mismatched.z_l);
            expect(zin1.values().real().minCoeff() >= -1e-9 && zin2.values().real().minCoeff() >= -1e-9,
                   "passivity of input impedances");

            const TmtSolution sol = solve_abcd(observe_exact(ab, mismatched), cfg.tmt);
            const Spectrum h2 = ctf_reverse(ab, mismatched);
            const double rt = sol.n_valid() == grid.n_bins
                                  ? ((sol.h2_hat.values() - h2.values()).cwiseAbs().array() /
                                     h2.values().cwiseAbs().array())
                                        .maxCoeff()
                                  : std::numeric_limits<double>::infinity();
            expect(rt <= 1e-6, "TMT noiseless round trip");
        } catch (const std::exception& e) {
            rep.failures.push_back(tag + e.what());
        }
    }
    return rep;
}

} // namespace plkey
