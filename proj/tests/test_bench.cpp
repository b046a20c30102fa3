#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "illposed/bench.hpp"

using namespace illposed;

namespace {

std::string base_config(const std::string& extra = "") {
    return std::string(R"({
        "problem": {"name": "integration", "n": 32},
        "truth": {"nu": 1.0, "rho": 1.0, "w_seed": 7},
        "method": "tikhonov",
        "rule": "morozov",
        "delta_grid": {"start": 1e-2, "factor": 0.5, "count": 3},
        "seeds": {"master": 42, "realizations": 2})") +
           extra + "\n}";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("bench");

TEST_CASE("config parsing") {
    SUBCASE("round trip of a valid config") {
        const ExperimentConfig c = parse_config(base_config());
        CHECK(c.problem_name == "integration");
        CHECK(c.n == 32);
        CHECK(c.method == "tikhonov");
        CHECK(c.rule == "morozov");
        CHECK(c.delta_count == 3);
        CHECK(c.realizations == 2);
        CHECK(c.tau == 2.0);  // default preserved
    }

    SUBCASE("unknown keys are rejected by name") {
        try {
            parse_config(base_config(",\n\"delta_stop\": 1.0"));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("delta_stop") != std::string::npos);
        }
    }

    SUBCASE("wrong types are rejected") {
        CHECK_THROWS_AS(parse_config(base_config(",\n\"tau\": \"big\"")), ConfigError);
    }

    SUBCASE("missing required fields are rejected") {
        CHECK_THROWS_AS(parse_config("{\"problem\": \"integration\"}"), ConfigError);
    }

    SUBCASE("non-decreasing delta grids are rejected") {
        std::string bad = base_config();
        const auto pos = bad.find("\"factor\": 0.5");
        bad.replace(pos, 13, "\"factor\": 1.5");
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }

    SUBCASE("incompatible method and rule are rejected") {
        std::string bad = base_config();
        const auto pos = bad.find("\"method\": \"tikhonov\"");
        bad.replace(pos, 20, "\"method\": \"pinsker\"");
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }

    SUBCASE("malformed json is rejected") {
        CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
    }
}

TEST_CASE("experiment runner") {
    SUBCASE("single delta, single realization") {
        ExperimentConfig c = parse_config(base_config());
        c.delta_count = 1;
        c.realizations = 1;
        const std::vector<RunRecord> recs = run_experiment(c);
        REQUIRE(recs.size() == 1);
        CHECK(std::isfinite(recs[0].error));
        CHECK(recs[0].delta == 1e-2);
        CHECK(recs[0].method == "tikhonov");
        CHECK(recs[0].rule == "morozov");
        CHECK(recs[0].residual <= c.tau * recs[0].delta);
    }

    SUBCASE("record count and ordering") {
        ExperimentConfig c = parse_config(base_config());
        c.delta_count = 5;
        c.realizations = 3;
        const std::vector<RunRecord> recs = run_experiment(c);
        REQUIRE(recs.size() == 15);
        for (std::size_t i = 1; i < recs.size(); ++i)
            CHECK(recs[i].delta <= recs[i - 1].delta);
        for (std::size_t d = 0; d < 5; ++d)
            for (std::size_t r = 1; r < 3; ++r)
                CHECK(recs[3 * d + r].delta == recs[3 * d].delta);
    }

    SUBCASE("thread count does not change the records") {
        ExperimentConfig c = parse_config(base_config());
        const std::vector<RunRecord> one = run_experiment(c, 1);
        const std::vector<RunRecord> four = run_experiment(c, 4);
        REQUIRE(one.size() == four.size());
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK(one[i].error == four[i].error);
            CHECK(one[i].alpha_or_N == four[i].alpha_or_N);
            CHECK(one[i].seed == four[i].seed);
        }
    }

    SUBCASE("distinct realizations use distinct seeds") {
        ExperimentConfig c = parse_config(base_config());
        c.delta_count = 1;
        c.realizations = 3;
        const std::vector<RunRecord> recs = run_experiment(c);
        CHECK(recs[0].seed != recs[1].seed);
        CHECK(recs[1].seed != recs[2].seed);
    }
}

TEST_CASE("csv io") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "illposed_bench_test";
    fs::create_directories(dir);
    const std::string path = (dir / "out.csv").string();

    ExperimentConfig c = parse_config(base_config());
    const std::vector<RunRecord> recs = run_experiment(c);

    SUBCASE("write/read round trip") {
        write_csv(recs, path);
        const std::vector<RunRecord> back = read_csv(path);
        REQUIRE(back.size() == recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            CHECK(back[i].delta == recs[i].delta);
            CHECK(back[i].error == recs[i].error);
            CHECK(back[i].residual == recs[i].residual);
            CHECK(back[i].rule == recs[i].rule);
            CHECK(back[i].method == recs[i].method);
            CHECK(back[i].seed == recs[i].seed);
            CHECK(back[i].wall_ms == 0.0);  // column is normalized on write
        }
    }

    SUBCASE("identical configs give identical bytes") {
        write_csv(run_experiment(parse_config(base_config())), path);
        const std::string first = slurp(path);
        write_csv(run_experiment(parse_config(base_config())), path);
        CHECK(first == slurp(path));
        CHECK(first.rfind("delta,alpha_or_N,error,residual,rule,method,seed,wall_ms",
                          0) == 0);
    }

    fs::remove_all(dir);
}

TEST_CASE("rate fitting") {
    auto synth = [](auto errf, std::size_t count) {
        std::vector<RunRecord> recs;
        for (std::size_t i = 0; i < count; ++i) {
            RunRecord r;
            r.delta = std::pow(10.0, -double(i) - 1.0);
            r.error = errf(r.delta);
            r.method = "tikhonov";
            r.rule = "apriori";
            recs.push_back(r);
        }
        return recs;
    };

    SUBCASE("recovers a square-root law exactly") {
        const RateFit f =
            fit_rate(synth([](double d) { return std::sqrt(d); }, 5));
        CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(f.fit_residual <= 1e-12);
    }

    SUBCASE("recovers slope and intercept of 3 delta^2") {
        const RateFit f =
            fit_rate(synth([](double d) { return 3.0 * d * d; }, 4));
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    }

    SUBCASE("medians absorb one outlier per delta") {
        std::vector<RunRecord> recs;
        for (std::size_t i = 0; i < 4; ++i) {
            const double d = std::pow(10.0, -double(i) - 1.0);
            for (int r = 0; r < 3; ++r) {
                RunRecord rec;
                rec.delta = d;
                rec.error = (r == 2) ? 1e6 : d;  // one wild value out of three
                recs.push_back(rec);
            }
        }
        CHECK(fit_rate(recs, "median").slope == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("fewer than three distinct deltas is an error") {
        CHECK_THROWS_AS(fit_rate(synth([](double d) { return d; }, 2)),
                        std::invalid_argument);
    }
}

TEST_SUITE_END();
