#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "../tests/helpers.hpp"
#include "pslola/depgraph.hpp"
#include "pslola/workload.hpp"

using namespace pslola;

TEST_CASE("generated traces are deterministic per seed") {
    Spec spec = parse_and_check(
        "input a : int\n"
        "input b : bool\n"
        "input c : float\n"
        "output out := a\n");
    GenConfig cfg;
    cfg.n = 50;
    cfg.seed = 7;
    auto one = gen_inputs(spec, cfg);
    auto two = gen_inputs(spec, cfg);
    REQUIRE(one.n == 50);
    REQUIRE(one.events == two.events);

    cfg.seed = 8;
    auto three = gen_inputs(spec, cfg);
    REQUIRE(one.events != three.events);
}

TEST_CASE("full density yields one event per stream per instant") {
    Spec spec = parse_and_check("input a : int\noutput out := a\n");
    GenConfig cfg;
    cfg.n = 30;
    auto ds = gen_inputs(spec, cfg);
    REQUIRE(ds.events.at("a").size() == 31);
    for (int j = 0; j <= 30; ++j) REQUIRE(ds.events.at("a")[static_cast<size_t>(j)].first == j);
}

TEST_CASE("lower density thins the trace") {
    Spec spec = parse_and_check("input a : int\noutput out := a\n");
    GenConfig sparse;
    sparse.n = 400;
    sparse.density = 0.3;
    sparse.seed = 9;
    auto ds = gen_inputs(spec, sparse);
    auto count = static_cast<double>(ds.events.at("a").size());
    REQUIRE(count > 401 * 0.2);
    REQUIRE(count < 401 * 0.4);
    int last = -1;
    for (const auto& [sigma, v] : ds.events.at("a")) {
        REQUIRE(sigma > last);
        last = sigma;
    }
}

TEST_CASE("unsigned walks never go negative") {
    Spec spec = parse_and_check("input u : uint\noutput out := u\n");
    GenConfig cfg;
    cfg.n = 300;
    cfg.seed = 10;
    auto ds = gen_inputs(spec, cfg);
    for (const auto& [sigma, v] : ds.events.at("u"))
        REQUIRE(std::get<std::int64_t>(v) >= 0);
}

TEST_CASE("boolean streams retain their value about four times in five") {
    Spec spec = parse_and_check("input p : bool\noutput out := !p\n");
    GenConfig cfg;
    cfg.n = 10000;
    cfg.seed = 11;
    auto ds = gen_inputs(spec, cfg);
    const auto& evs = ds.events.at("p");
    int held = 0;
    for (size_t i = 1; i < evs.size(); ++i)
        if (evs[i].second == evs[i - 1].second) ++held;
    double rate = static_cast<double>(held) / static_cast<double>(evs.size() - 1);
    REQUIRE(rate > 0.78);
    REQUIRE(rate < 0.82);
}

TEST_CASE("the gaussian source is centered with unit spread") {
    std::mt19937_64 rng(12);
    double sum = 0.0, sq = 0.0;
    const int samples = 20000;
    for (int i = 0; i < samples; ++i) {
        double g = gaussian(rng);
        sum += g;
        sq += g * g;
    }
    double mean = sum / samples;
    double var = sq / samples - mean * mean;
    REQUIRE(std::abs(mean) < 0.03);
    REQUIRE(std::abs(var - 1.0) < 0.05);

    for (int i = 0; i < 1000; ++i) {
        double u = uniform01(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("read assignments cover every event") {
    Spec spec = parse_and_check(
        "input a : int\n"
        "input b : float\n"
        "output out := a\n");
    GenConfig gen;
    gen.n = 80;
    gen.density = 0.6;
    gen.seed = 13;
    auto ds = gen_inputs(spec, gen);
    for (double p : {0.2, 0.5, 0.8}) {
        ReadConfig rc;
        rc.monitors = 3;
        rc.p_read = p;
        rc.seed = 14;
        auto views = assign_reads(ds, rc);
        REQUIRE(views.size() == 3);
        REQUIRE(validate_views(ds, views).ok);
    }
}

TEST_CASE("a low read probability still leaves no event unread") {
    Spec spec = parse_and_check("input a : int\noutput out := a\n");
    GenConfig gen;
    gen.n = 200;
    gen.seed = 15;
    auto ds = gen_inputs(spec, gen);
    ReadConfig rc;
    rc.monitors = 4;
    rc.p_read = 0.05;
    rc.seed = 16;
    auto views = assign_reads(ds, rc);
    REQUIRE(validate_views(ds, views).ok);
    // With p that small most events arrive through the repair path, which
    // deals them out by position, so every monitor holds something.
    for (const auto& v : views) REQUIRE_FALSE(v.reads.empty());
}

TEST_CASE("separation distances are frozen") {
    REQUIRE(race_separation(1000.0, 10.0, 20.0, 500.0, 10.0, 20.0) == 500.0);
    REQUIRE(race_separation(0.0, 1.0, 0.0, 0.0, 0.0, 0.0) == 111200.0);
    REQUIRE(race_separation(0.0, 0.0, 1.0, 0.0, 0.0, 0.0) == 87620.0);
    REQUIRE_THAT(race_separation(100.0, 10.001, 20.002, 0.0, 10.0, 20.0),
                 Catch::Matchers::WithinRel(
                     std::sqrt(100.0 * 100.0 + 111.2 * 111.2 + 175.24 * 175.24), 1e-9));
    // Symmetric in its endpoints.
    REQUIRE(race_separation(10.0, 1.0, 2.0, 30.0, 4.0, 5.0) ==
            race_separation(30.0, 4.0, 5.0, 10.0, 1.0, 2.0));
}

TEST_CASE("benchmark specifications scale and stay well-formed") {
    for (int inputs : {1, 2, 3, 7}) {
        Spec spec = bench_spec(inputs);
        REQUIRE(static_cast<int>(spec.inputs.size()) == inputs);
        REQUIRE_FALSE(spec.outputs.empty());
        auto wf = check_well_formed(build_dependency_graph(spec));
        REQUIRE(wf.ok);

        GenConfig gen;
        gen.n = 20;
        gen.seed = 17;
        auto ds = gen_inputs(spec, gen);
        auto outs = evaluate_sync(spec, densify(ds, spec));
        for (const auto& o : spec.outputs)
            REQUIRE(outs.at(o.name).size() == 21);
    }
}
