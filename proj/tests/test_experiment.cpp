// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "plkey/experiment.hpp"

using namespace plkey;
using namespace plkey::test;

namespace {

ExperimentConfig small_config(Method m)
{
    ExperimentConfig c;
    c.grid = FrequencyGrid::span(1.8e6, 30e6, 256);
    c.method = m;
    c.quantizer = m == Method::tmt ? QuantizerKind::coded : QuantizerKind::binary_gray;
    c.nbits = m == Method::tmt ? 4 : 8;
    c.n_realizations = 12;
    c.master_seed = 17;
    return c;
}

std::string csv_of(const ResultTable& t)
{
    std::ostringstream ss;
    emit_csv(t, ss);
    return ss.str();
}

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

} // namespace

TEST_SUITE("experiment")
{
    TEST_CASE("config json")
    {
        ExperimentConfig c = small_config(Method::tmt);
        c.sounder.snr_z_db = kInfiniteSnr;
        c.tdst.window = {WindowKind::hann, 0.0};
        c.tmt.root_rule = RootRule::smallest_step;
        c.sweep = SweepVariable::z_t;
        c.sweep_values = {1.0, 10.0, 100.0};
        c.output = "out.csv";
        const std::string text = config_to_json(c);
        const ExperimentConfig back = config_from_json(text);
        CHECK(config_to_json(back) == text);
        CHECK(back.grid == c.grid);
        CHECK(std::isinf(back.sounder.snr_z_db));
        CHECK(back.sweep_values == c.sweep_values);
        CHECK(back.tmt.root_rule == RootRule::smallest_step);

        const ExperimentConfig d = config_from_json(R"({"method": "tdst", "tdst": {"m": 3}})");
        CHECK(d.tdst.m == 3);
        CHECK(d.tdst.gamma == ExperimentConfig{}.tdst.gamma);
        CHECK(d.grid == ExperimentConfig{}.grid);

        const ExperimentConfig e = config_from_json(R"({"grid": {"f_start": 1e6, "f_step": 1e5, "n_bins": 10}})");
        CHECK(e.grid.f_step == 1e5);
        CHECK(e.grid.n_bins == 10);

        CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json(R"({"tdst": {"gama": 0.1}})"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json(R"({"method": "fft"})"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json(R"({"nbits": 0})"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json(R"({"sounder": {"snr_h_db": "loud"}})"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json("[1, 2]"), InvalidArgument);
        CHECK_THROWS_AS(config_from_json("{"), InvalidArgument);

        const auto path = std::filesystem::temp_directory_path() / "plkey_config_test.json";
        {
            std::ofstream f(path);
            f << text;
        }
        CHECK(config_to_json(load_config(path)) == text);
        std::filesystem::remove(path);
    }

    TEST_CASE("sweep application")
    {
        ExperimentConfig c;
        c.sweep = SweepVariable::snr_db;
        const ExperimentConfig s = apply_sweep(c, 12.5);
        CHECK(s.sounder.snr_h_db == 12.5);
        CHECK(s.sounder.snr_z_db == 12.5);
        c.sweep = SweepVariable::m;
        CHECK(apply_sweep(c, 7).tdst.m == 7);
        CHECK_THROWS_AS(apply_sweep(c, 2.5), InvalidArgument);
        CHECK_THROWS_AS(apply_sweep(c, -1), InvalidArgument);
        c.sweep = SweepVariable::z_l;
        CHECK(apply_sweep(c, 50).z_l == 50.0);
        c.sweep = SweepVariable::none;
        CHECK(config_to_json(apply_sweep(c, 99)) == config_to_json(c));

        for (auto v : {SweepVariable::none, SweepVariable::m, SweepVariable::n_blocks, SweepVariable::epsilon,
                       SweepVariable::pad_factor, SweepVariable::gamma, SweepVariable::nbits, SweepVariable::z_t,
                       SweepVariable::z_l, SweepVariable::snr_db, SweepVariable::n_avg})
            CHECK(sweep_variable_from_string(to_string(v)) == v);
        CHECK_THROWS_AS(sweep_variable_from_string("temperature"), InvalidArgument);
    }

    TEST_CASE("roles and seeds")
    {
        CHECK(realization_seed(1, 0) != realization_seed(1, 1));
        CHECK(realization_seed(1, 5) == realization_seed(1, 5));
        CHECK(realization_seed(1, 5) != realization_seed(2, 5));

        TopologyParams p;
        p.n_outlets = 3;
        p.depth = 1;
        std::set<NodeId> alices;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const Topology t = synthesize(s, {});
            const Roles r = assign_roles(t, s);
            CHECK(r.alice != r.bob);
            CHECK(r.alice != r.eve);
            CHECK(r.bob != r.eve);
            for (NodeId n : {r.alice, r.bob, r.eve})
                CHECK(t.node(n).outlet);
            const Roles small = assign_roles(synthesize(s, p), s);
            alices.insert(small.alice);
        }
        // every outlet of the star gets to be Alice
        CHECK(alices.size() == 3);
    }

    TEST_CASE("csv")
    {
        ResultTable empty;
        CHECK(csv_of(empty) == std::string(kCsvHeader) + "\n");

        ResultTable one;
        one.rows.push_back({2.0, "0", 1.0, 3.0, 0.9, 0.1, -30.5, 2.25, 0.01});
        const std::string text = csv_of(one);
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        ResultTable t;
        t.comments = {"first", "second line"};
        t.rows.push_back({0.1, "0", 1.0 / 3.0, 2.0 / 7.0, 0.1 + 0.2, -1e-300, nan, 5e-324, 1e300});
        t.rows.push_back({0.1, "mean", nan, 4.0, 0.0, -0.0, 123456789.125, 1.0, 2.0});
        const std::string s = csv_of(t);
        CHECK(s.rfind("# first\n# second line\n", 0) == 0);
        CHECK(s.find("nan") != std::string::npos);
        std::istringstream in(s);
        const ResultTable back = read_csv(in);
        REQUIRE(back.rows.size() == 2);
        CHECK(back.comments == t.comments);
        for (std::size_t i = 0; i < 2; ++i) {
            const ResultRow &a = t.rows[i], &b = back.rows[i];
            CHECK(a.realization == b.realization);
            for (auto m : {&ResultRow::sweep, &ResultRow::d_ab, &ResultRow::d_ae, &ResultRow::rho_ab,
                           &ResultRow::rho_ae, &ResultRow::delta_median_db, &ResultRow::key_entropy,
                           &ResultRow::asymmetry})
                CHECK((same_bits(a.*m, b.*m) || (std::isnan(a.*m) && std::isnan(b.*m))));
        }
        CHECK(csv_of(back) == s);

        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(nan) == "nan");
        CHECK(format_double(1e300) == "1e+300");

        std::istringstream bad_header("a,b,c\n");
        CHECK_THROWS_AS(read_csv(bad_header), InvalidArgument);
        std::istringstream short_row(std::string(kCsvHeader) + "\n1,0,2\n");
        CHECK_THROWS_AS(read_csv(short_row), InvalidArgument);
    }

    TEST_CASE("ensemble runs")
    {
        for (Method m : {Method::tdst, Method::tmt}) {
            ExperimentConfig c = small_config(m);
            c.sweep = SweepVariable::snr_db;
            c.sweep_values = {20.0, 40.0};
            const ResultTable serial = run(c, 1);
            const ResultTable parallel = run(c, 4);
            CHECK(csv_of(serial) == csv_of(parallel));
            CHECK(serial.rows.size() == 2 * (12 + 3));
            CHECK(serial.realizations(20.0).size() == 12);
            REQUIRE(serial.aggregate(40.0, "mean") != nullptr);
            REQUIRE(serial.aggregate(40.0, "ratio") != nullptr);
            CHECK(serial.aggregate(40.0, "nope") == nullptr);

            const ResultRow& mean = *serial.aggregate(40.0, "mean");
            CHECK(mean.d_ab < mean.d_ae);
            const ResultRow& ratio = *serial.aggregate(40.0, "ratio");
            CHECK(ratio.d_ae == doctest::Approx(mean.d_ae / mean.d_ab));
            CHECK(ratio.rho_ae == doctest::Approx(mean.rho_ab / mean.rho_ae));
            CHECK(std::isnan(ratio.key_entropy));

            // a realization is reproducible on its own
            const RealizationResult r = run_realization(apply_sweep(c, 20.0), 3);
            const ResultRow& row = serial.realizations(20.0)[3];
            CHECK(same_bits(r.d_ab, row.d_ab));
            CHECK(same_bits(r.asymmetry, row.asymmetry));
            CHECK(r.key_alice.size() > 0);
        }
    }

    TEST_CASE("matching terminations removes the asymmetry")
    {
        ExperimentConfig c = small_config(Method::tdst);
        c.n_realizations = 20;
        c.sweep = SweepVariable::z_t;
        c.sweep_values = {1.0, 100.0, 1e4};
        const ResultTable t = run(c, 2);
        const double a1 = t.aggregate(1.0, "median")->asymmetry;
        const double a2 = t.aggregate(100.0, "median")->asymmetry;
        const double a3 = t.aggregate(1e4, "median")->asymmetry;
        CHECK(a1 > a2);
        CHECK(a2 > a3);
        CHECK(a3 < 1e-12);
    }

    TEST_CASE("invariants")
    {
        const InvariantReport rep = check_invariants(ExperimentConfig{}, 0, 20);
        CHECK(rep.ok());
        CHECK(rep.topologies == 20);
        CHECK(rep.checks > 20);
    }
}
