// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "plkey/experiment.hpp"
#include "plkey/metrics.hpp"
#include "plkey/quantize.hpp"
#include "plkey/rng.hpp"

using namespace plkey;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_rel(const Spectrum& x, const Spectrum& y)
{
    return ((x.values() - y.values()).cwiseAbs().array() / x.values().cwiseAbs().array()).maxCoeff();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Alice-Bob channel of the topology seeded `seed` under default parameters.
AbcdChannel random_channel(const ExperimentConfig& cfg, std::uint64_t seed)
{
    const Topology top = synthesize(seed, cfg.topology);
    const Roles r = assign_roles(top, derive_seed(seed, {100}));
    return extract_two_port(top, cfg.grid, {r.alice, r.bob});
}

Outcome reciprocity(const ExperimentConfig& cfg)
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s)
        worst = std::max(worst, random_channel(cfg, 1'000'000 + s).max_reciprocity_error());
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 10.0, fmt("1000 channels x %zu bins, max |AD-BC-1| = %.2e, %.2f s", cfg.grid.n_bins,
                                           worst, t)};
}

Outcome symmetry(const ExperimentConfig& cfg)
{
    double worst = 0.0;
    for (double z : {1.0, 50.0, 1e4}) {
        const Termination term = Termination::constant(cfg.grid, z, z);
        for (std::uint64_t s = 0; s < 100; ++s) {
            const AbcdChannel ch = random_channel(cfg, 2'000'000 + s);
            worst = std::max(worst, max_rel(ctf_forward(ch, term), ctf_reverse(ch, term)));
        }
    }
    return {worst <= 1e-12, fmt("ZT = ZL in {1, 50, 1e4}, 100 channels each, max rel |H1-H2| = %.2e", worst)};
}

Outcome normalization(const ExperimentConfig& cfg)
{
    const FrequencyGrid& g = cfg.grid;
    const Termination term = Termination::constant(g, 1.0, 1e4);
    const Spectrum one = Spectrum::constant(g, 1.0);
    double wz = 0.0, wy = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const AbcdChannel ch = random_channel(cfg, 3'000'000 + s);
        const Spectrum h1 = ctf_forward(ch, term), h2 = ctf_reverse(ch, term);
        const Spectrum zin1 = zin_port1(ch, term.z_l), zin2 = zin_port2(ch, term.z_l);
        // trans-impedance: unit Norton current in parallel with z_t; trans-admittance: unit Thevenin voltage
        const Spectrum v2(g, h1.values().cwiseProduct(term.z_t.values()));
        const Spectrum v1(g, h2.values().cwiseProduct(term.z_t.values()));
        const Spectrum i2(g, h1.values().cwiseQuotient(term.z_l.values()));
        const Spectrum i1(g, h2.values().cwiseQuotient(term.z_l.values()));
        const auto z = normalize_transimpedance(one, v2, one, v1, zin1, zin2, term);
        const auto y = normalize_transadmittance(one, i2, one, i1, zin1, zin2, term);
        wz = std::max(wz, max_rel(z.forward, z.backward));
        wy = std::max(wy, max_rel(y.forward, y.backward));
    }
    return {wz <= 1e-9 && wy <= 1e-9,
            fmt("ZT = 1, ZL = 1e4, 100 channels: max rel Z21'/Z12' %.2e, Y21'/Y12' %.2e", wz, wy)};
}

Outcome asymmetry_trend(const ExperimentConfig& cfg)
{
    const std::array<double, 5> zts{1, 10, 100, 1e3, 1e4};
    std::vector<std::vector<double>> a(zts.size());
    for (std::uint64_t s = 0; s < 200; ++s) {
        const AbcdChannel ch = random_channel(cfg, 4'000'000 + s);
        for (std::size_t i = 0; i < zts.size(); ++i) {
            const Termination term = Termination::constant(cfg.grid, zts[i], 1e4);
            a[i].push_back(asymmetry_metric(ctf_forward(ch, term), ctf_reverse(ch, term)));
        }
    }
    std::string d = "200 topologies, median asymmetry:";
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zts.size(); ++i) {
        const double m = median(a[i]);
        d += fmt(" %g", m);
        ok = ok && m < prev;
        prev = m;
    }
    return {ok, d};
}

Outcome tmt_round_trip(const ExperimentConfig& cfg)
{
    const Termination term = Termination::constant(cfg.grid, cfg.z_t, cfg.z_l);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        const AbcdChannel ch = random_channel(cfg, 5'000'000 + s);
        const TmtSolution sol = solve_abcd(observe_exact(ch, term), cfg.tmt);
        const double e = sol.n_valid() == cfg.grid.n_bins ? max_rel(ctf_reverse(ch, term), sol.h2_hat)
                                                          : std::numeric_limits<double>::infinity();
        worst = std::max(worst, e);
    }
    ExperimentConfig c = cfg;
    c.method = Method::tmt;
    c.quantizer = QuantizerKind::coded;
    c.sounder.snr_h_db = c.sounder.snr_z_db = 30.0;
    c.sounder.n_avg = 10;
    c.n_realizations = 200;
    const double delta = run(c).aggregate(0.0, "median")->delta_median_db;
    return {worst <= 1e-6 && delta <= -20.0,
            fmt("noiseless: 500 channels, max rel H2 error %.2e; 30 dB / n_avg 10: median delta %.1f dB", worst,
                delta)};
}

Outcome peak_coincidence(const ExperimentConfig& cfg)
{
    const Termination term = Termination::constant(cfg.grid, cfg.z_t, cfg.z_l);
    TdstConfig t = cfg.tdst;
    t.pad_factor = 4;
    t.m = 5;
    double worst = 1.0, sum = 0.0;
    std::size_t perfect = 0;
    const std::size_t n = 200;
    for (std::uint64_t s = 0; s < n; ++s) {
        const AbcdChannel ch = random_channel(cfg, 6'000'000 + s);
        const double c = peak_support_coincidence(ctf_forward(ch, term), ctf_reverse(ch, term), t, 1);
        worst = std::min(worst, c);
        sum += c;
        perfect += c == 1.0;
    }
    return {worst == 1.0, fmt("ZT = %g, ZL = %g, %zu topologies: min %.2f, mean %.3f, %zu/%zu at 1.0", cfg.z_t,
                              cfg.z_l, n, worst, sum / static_cast<double>(n), perfect, n)};
}

Outcome security_ordering(const ExperimentConfig& cfg)
{
    const auto t0 = Clock::now();
    ExperimentConfig tdst = cfg;
    tdst.method = Method::tdst;
    tdst.n_realizations = 200;
    const double r_tdst = run(tdst).aggregate(0.0, "ratio")->d_ae;
    ExperimentConfig tmt = tdst;
    tmt.method = Method::tmt;
    tmt.quantizer = QuantizerKind::coded;
    const double r_tmt = run(tmt).aggregate(0.0, "ratio")->d_ae;
    const double t = seconds_since(t0);
    return {r_tdst >= 1.5 && r_tmt >= 2.0 && t < 300.0,
            fmt("200 realizations: d_AE/d_AB TDST %.2f, TMT-coded %.2f, %.1f s", r_tdst, r_tmt, t)};
}

Outcome fig8_trends(const ExperimentConfig& cfg)
{
    ExperimentConfig c = cfg;
    c.method = Method::tdst;
    c.n_realizations = 200;
    c.sweep = SweepVariable::m;
    c.sweep_values.clear();
    for (int m = 1; m <= 15; ++m)
        c.sweep_values.push_back(m);
    const ResultTable tm = run(c);
    bool ok_m = true;
    double prev = std::numeric_limits<double>::infinity();
    std::string d = "median d_AE / median d_AB over M=1..15:";
    std::string means = " (ratio of means:";
    for (double m : c.sweep_values) {
        const auto* md = tm.aggregate(m, "median");
        const double r = md->d_ae / md->d_ab;
        d += fmt(" %.3g", r);
        means += fmt(" %.3g", tm.aggregate(m, "ratio")->d_ae);
        ok_m = ok_m && r <= prev;
        prev = r;
    }
    d += means + ")" + (ok_m ? "" : " [M trend violated]");

    c.sweep = SweepVariable::pad_factor;
    c.sweep_values = {0, 1, 2, 4, 8};
    const ResultTable tp = run(c);
    bool ok_p = true;
    prev = std::numeric_limits<double>::infinity();
    d += "; mean d_AB over pad 0,1,2,4,8:";
    for (double p : c.sweep_values) {
        const double m = tp.aggregate(p, "mean")->d_ab;
        d += fmt(" %.3g", m);
        ok_p = ok_p && m <= prev;
        prev = m;
    }
    if (!ok_p)
        d += " [pad trend violated]";
    return {ok_m && ok_p, d};
}

Outcome quantizer_properties(const ExperimentConfig& cfg)
{
    std::size_t gray_bad = 0;
    for (unsigned n = 1; n <= 8; ++n)
        for (std::uint32_t s = 0; s + 1 < (1u << n); ++s)
            gray_bad += std::popcount(gray(s) ^ gray(s + 1)) != 1 || gray_inverse(gray(s)) != s;

    std::size_t ham_bad = 0;
    std::vector<std::uint32_t> a, b;
    for (unsigned len = 1; len <= 12; ++len) {
        a.assign(len, 0);
        b.assign(len, 0);
        for (std::uint32_t x = 0; x < (1u << len); ++x)
            for (std::uint32_t y = 0; y < (1u << len); ++y) {
                for (unsigned i = 0; i < len; ++i) {
                    a[i] = (x >> i) & 1u;
                    b[i] = (y >> i) & 1u;
                }
                const double d = key_distance(a, b);
                ham_bad += d != static_cast<double>(std::popcount(x ^ y));
            }
    }

    // Same shape at 1x and 2x, peak kept below full scale so the LSB symbol is not clipped.
    std::size_t coded_same = 0;
    const Termination term = Termination::constant(cfg.grid, cfg.z_t, cfg.z_l);
    Rng rng(9);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Spectrum h = ctf_reverse(random_channel(cfg, 9'000'000 + s), term);
        const double peak = rng.uniform(0.05, 0.45) * cfg.full_scale;
        const Spectrum h1(h.grid(), h.values() * (peak / h.values().cwiseAbs().maxCoeff()));
        const Spectrum h2(h.grid(), 2.0 * h1.values());
        const SymbolKey k1 = quantize_levels(h1, cfg.nbits), k2 = quantize_levels(h2, cfg.nbits);
        const auto c1 = coded_arrange(k1, lsb_value(h1, cfg.nbits), cfg.full_scale).valid_symbols();
        const auto c2 = coded_arrange(k2, lsb_value(h2, cfg.nbits), cfg.full_scale).valid_symbols();
        coded_same += c1 == c2;
    }
    return {gray_bad == 0 && ham_bad == 0 && coded_same == 0,
            fmt("gray adjacency violations %zu (nbits 1..8); Hamming mismatches %zu (lengths 1..12, all pairs); "
                "coded keys equal for 1x vs 2x amplitude %zu/50",
                gray_bad, ham_bad, coded_same)};
}

Outcome determinism(const ExperimentConfig& cfg)
{
    auto csv = [](const ExperimentConfig& c, std::size_t jobs) {
        std::ostringstream ss;
        emit_csv(run(c, jobs), ss);
        return ss.str();
    };
    std::size_t runs = 0, identical = 0;
    for (Method m : {Method::tdst, Method::tmt}) {
        ExperimentConfig c = cfg;
        c.method = m;
        c.quantizer = QuantizerKind::coded;
        c.n_realizations = 10;
        c.master_seed = 77;
        c.sweep = SweepVariable::m;
        c.sweep_values = {1, 5, 9};
        const std::string ref = csv(c, 1);
        for (std::size_t jobs : {1, 3}) {
            ++runs;
            identical += csv(c, jobs) == ref;
        }
    }
    return {identical == runs, fmt("%zu/%zu repeated sweeps byte-identical (1 and 3 worker threads)", identical, runs)};
}

} // namespace

int main()
{
    const ExperimentConfig cfg;
    const std::array<std::pair<const char*, std::function<Outcome(const ExperimentConfig&)>>, 10> criteria{{
        {"reciprocity suite", reciprocity},
        {"symmetry under ZT = ZL", symmetry},
        {"normalization symmetry", normalization},
        {"asymmetry decreasing in ZT", asymmetry_trend},
        {"TMT round trip", tmt_round_trip},
        {"wide-sense peak symmetry", peak_coincidence},
        {"security ordering", security_ordering},
        {"M and pad trends", fig8_trends},
        {"quantizer properties", quantizer_properties},
        {"determinism", determinism},
    }};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second(cfg);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
