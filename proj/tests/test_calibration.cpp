#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "saidr/calibration.hpp"
#include "saidr/config.hpp"
#include "saidr/erlang.hpp"
#include "saidr/errors.hpp"

using namespace saidr;

namespace {

// Small, fast scenario: two groups, coarse phases, short horizon.
FitScenario toy_scenario() {
    FitScenario sc;
    GroupParams a;
    a.id = 1;
    a.population = 800;
    a.v1 = 5.0;
    a.v2 = 3.0;
    GroupParams b = a;
    b.id = 2;
    b.population = 400;
    b.v1 = 3.0;
    b.v2 = 1.0;
    sc.groups = {a, b};
    sc.mixing = MixingRule::full(2);
    sc.layout.k_a = 2;
    sc.layout.k_e = 2;
    sc.layout.k_is = 1;
    sc.layout.k_ia = 3;
    sc.layout.k_d = 2;
    sc.layout.k_c = 2;
    sc.params.lambda_ia = 1.0; // mean 3 with k_ia = 3
    sc.params.lambda_tr = 1.5;
    sc.student_groups = {0, 1};
    sc.t0_max = 7.0;
    sc.dt = 0.1;
    return sc;
}

ParamVector toy_truth(const FitScenario& sc, std::size_t n_obs) {
    ParamVector t;
    t.is_mean = 1.5;
    t.is_var = 2.25; // exponential: k = 1
    t.beta.assign(sc.n_beta(n_obs), 0.08);
    t.t0 = 3.0;
    t.f = 0.3;
    return t;
}

} // namespace

TEST_CASE("observed series validation and IO") {
    ObservedSeries obs;
    obs.counts = {1.0, 4.0, 9.0};
    obs.validate();
    write_observed_csv("/tmp/obs_roundtrip.csv", obs);
    const auto back = read_observed_csv("/tmp/obs_roundtrip.csv");
    CHECK(back.counts == obs.counts);

    ObservedSeries bad;
    bad.counts = {5.0, 3.0};
    CHECK_THROWS_AS(bad.validate(), input_error);
    ObservedSeries neg;
    neg.counts = {-1.0};
    CHECK_THROWS_AS(neg.validate(), input_error);
    CHECK_THROWS_AS(read_observed_csv("/tmp/missing_observed.csv"), input_error);
}

TEST_CASE("loss") {
    const auto sc = toy_scenario();
    const std::size_t n_obs = 5;
    const auto truth = toy_truth(sc, n_obs);

    SUBCASE("self-generated data fits itself exactly") {
        ObservedSeries obs;
        obs.counts = model_series(truth, n_obs, sc);
        CHECK(loss(truth, obs, sc) <= 1e-8);
    }
    SUBCASE("zero observations make the loss the summed model output") {
        ObservedSeries zeros;
        zeros.counts.assign(n_obs, 0.0);
        const auto y = model_series(truth, n_obs, sc);
        double want = 0.0;
        for (double v : y) want += v;
        CHECK(loss(truth, zeros, sc) == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("perturbing beta away from the truth increases the loss") {
        ObservedSeries obs;
        obs.counts = model_series(truth, n_obs, sc);
        const double base = loss(truth, obs, sc);
        for (double scale : {0.8, 0.9, 1.1, 1.2}) {
            ParamVector p = truth;
            for (double& b : p.beta) b *= scale;
            CHECK(loss(p, obs, sc) > base);
        }
    }
}

TEST_CASE("metropolis-hastings kernel") {
    SUBCASE("zero proposal width keeps the chain at the initial sample") {
        Rng rng(3);
        const auto chain = mh_chain(
            {1.0, 2.0}, std::vector<double>{0.0, 0.0}, 50,
            [](std::span<const double> x) { return 1.0 + x[0] * x[0] + x[1] * x[1]; },
            [](std::span<const double>) { return true; }, rng);
        for (const auto& row : chain) {
            CHECK(row[0] == 1.0);
            CHECK(row[1] == 2.0);
        }
    }
    SUBCASE("deterministic replay") {
        const auto run = [](std::uint64_t seed) {
            Rng rng(seed);
            return mh_chain(
                {0.5}, std::vector<double>{1.0}, 200,
                [](std::span<const double> x) { return 1.0 + x[0] * x[0]; },
                [](std::span<const double>) { return true; }, rng);
        };
        CHECK(run(7) == run(7));
        CHECK(run(7) != run(8));
    }
    SUBCASE("acceptance is scale-free in the loss") {
        const auto run = [](double scale) {
            Rng rng(11);
            return mh_chain(
                {0.5}, std::vector<double>{1.5}, 400,
                [scale](std::span<const double> x) { return scale * (1.0 + x[0] * x[0]); },
                [](std::span<const double>) { return true; }, rng);
        };
        CHECK(run(1.0) == run(250.0));
    }
    SUBCASE("sampled density matches the quadrature-normalized target") {
        // S(x) = 1 + x^2 gives target density proportional to (1+x^2)^-2 with
        // analytic CDF 1/2 + (atan x + x/(1+x^2)) / pi.
        Rng rng(13);
        const auto chain = mh_chain(
            {0.0}, std::vector<double>{2.0}, 100000,
            [](std::span<const double> x) { return 1.0 + x[0] * x[0]; },
            [](std::span<const double>) { return true; }, rng);
        std::vector<double> xs(chain.size());
        for (std::size_t i = 0; i < chain.size(); ++i) xs[i] = chain[i][0];
        const double pi = 3.14159265358979323846;
        const double ks = oracles::ks_statistic(std::move(xs), [&](double x) {
            return 0.5 + (std::atan(x) + x / (1.0 + x * x)) / pi;
        });
        CHECK(ks < 0.02);
    }
    SUBCASE("out-of-domain proposals are rejected") {
        Rng rng(17);
        const auto chain = mh_chain(
            {0.5}, std::vector<double>{10.0}, 300,
            [](std::span<const double> x) { return 1.0 + x[0] * x[0]; },
            [](std::span<const double> x) { return x[0] >= 0.0 && x[0] <= 1.0; }, rng);
        for (const auto& row : chain) {
            CHECK(row[0] >= 0.0);
            CHECK(row[0] <= 1.0);
        }
    }
    SUBCASE("input validation") {
        Rng rng(19);
        CHECK_THROWS_AS(mh_chain({0.5}, std::vector<double>{1.0, 1.0}, 10,
                                 [](std::span<const double>) { return 1.0; },
                                 [](std::span<const double>) { return true; }, rng),
                        input_error);
        CHECK_THROWS_AS(mh_chain({-1.0}, std::vector<double>{1.0}, 10,
                                 [](std::span<const double>) { return 1.0; },
                                 [](std::span<const double> x) { return x[0] > 0.0; }, rng),
                        input_error);
    }
}

TEST_CASE("typed chain on the toy problem") {
    const auto sc = toy_scenario();
    const std::size_t n_obs = 5;
    const auto truth = toy_truth(sc, n_obs);
    ObservedSeries obs = synthesize_observed(truth, n_obs, sc);

    ParamVector initial = truth;
    initial.is_mean = 2.5;
    initial.is_var = 3.0;
    for (double& b : initial.beta) b = 0.05;
    initial.t0 = 4.0;
    initial.f = 0.5;

    MhSettings mh;
    mh.samples = 600;
    mh.compute_effectiveness = false;
    mh.proposal_sd = {0.2, 0.5, 0.008, 0.008, 0.008, 0.8, 0.05};
    REQUIRE(mh.proposal_sd.size() == initial.dim());

    Rng rng(23);
    const auto chain = metropolis_hastings(initial, mh, obs, sc, rng);
    REQUIRE(chain.size() == 600);

    std::size_t accepted = 0;
    for (const auto& cs : chain) accepted += cs.accepted ? 1 : 0;
    const double rate = static_cast<double>(accepted) / 600.0;
    CHECK(rate > 0.05);
    CHECK(rate < 0.95);

    double running_min = chain.front().error;
    for (const auto& cs : chain) {
        CHECK(cs.error >= 0.0);
        running_min = std::min(running_min, cs.error);
    }
    CHECK(running_min < chain.front().error); // the chain actually improved
}

TEST_CASE("effectiveness") {
    auto sc = toy_scenario();
    const std::size_t n_obs = 5;
    auto truth = toy_truth(sc, n_obs);
    // Make the scenario clearly supercritical so tracing has work to do.
    for (double& b : truth.beta) b = 0.25;

    SUBCASE("no tracing in the scenario means ratio one") {
        auto sc0 = sc;
        sc0.params.lambda_tr = 0.0;
        bool flagged = false;
        CHECK(effectiveness(truth, sc0, n_obs, &flagged) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(flagged);
    }
    SUBCASE("no transmission means nothing to avert") {
        ParamVector p = truth;
        for (double& b : p.beta) b = 0.0;
        CHECK(effectiveness(p, sc, n_obs) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("tracing cannot increase infections") {
        CHECK(effectiveness(truth, sc, n_obs) >= 1.0);
        ParamVector milder = truth;
        for (double& b : milder.beta) b = 0.12;
        CHECK(effectiveness(milder, sc, n_obs) >= 1.0);
    }
    SUBCASE("detected-only variant also stays at or above one") {
        auto scd = sc;
        scd.detected_only_effectiveness = true;
        CHECK(effectiveness(truth, scd, n_obs) >= 1.0);
    }
    SUBCASE("sub-person denominators are flagged") {
        auto tiny = sc;
        tiny.e1_initial = 1e-9; // ever-infected stays far below one person
        ParamVector quiet = truth;
        for (double& b : quiet.beta) b = 0.0;
        bool flagged = false;
        CHECK(effectiveness(quiet, tiny, n_obs, &flagged) == 1.0);
        CHECK(flagged);
    }
}

TEST_CASE("synthetic recovery finds the generating parameters") {
    const auto sc = toy_scenario();
    const std::size_t n_obs = 5;
    const auto truth = toy_truth(sc, n_obs);
    const ObservedSeries obs = synthesize_observed(truth, n_obs, sc);

    ParamVector initial;
    initial.is_mean = 3.0;
    initial.is_var = 4.0;
    initial.beta.assign(truth.beta.size(), 0.05);
    initial.t0 = 4.0;
    initial.f = 0.5;

    MhSettings mh;
    mh.samples = 4000;
    mh.compute_effectiveness = false;
    mh.proposal_sd = {0.25, 0.6, 0.006, 0.006, 0.006, 0.6, 0.05};

    Rng rng(29);
    const auto chain = metropolis_hastings(initial, mh, obs, sc, rng);

    const auto sum = summarize(chain, 1e18);
    // Minimum-error sample should sit near the truth on beta.
    for (std::size_t w = 0; w < truth.beta.size(); ++w) {
        CHECK(sum.min_error_sample.beta[w] ==
              doctest::Approx(truth.beta[w]).epsilon(0.2));
    }
    // Modal infectious-period shape equals the generating one.
    std::map<int, int> k_counts;
    for (const auto& cs : chain) {
        ++k_counts[fit_erlang(cs.params.is_mean, cs.params.is_var).k];
    }
    int modal_k = 0, best = 0;
    for (const auto& [k, c] : k_counts) {
        if (c > best) {
            best = c;
            modal_k = k;
        }
    }
    CHECK(modal_k == fit_erlang(truth.is_mean, truth.is_var).k);
}

TEST_CASE("summaries") {
    SUBCASE("identical samples collapse the histograms") {
        ChainSample cs;
        cs.params.is_mean = 2.0;
        cs.params.is_var = 1.0;
        cs.params.beta = {0.1};
        cs.params.t0 = 1.0;
        cs.params.f = 0.4;
        cs.error = 10.0;
        cs.effectiveness = 2.5;
        std::vector<ChainSample> chain(20, cs);
        const auto sum = summarize(chain, 100.0);
        CHECK(sum.used == 20);
        CHECK(sum.effectiveness_mean == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(sum.beta_quartiles.size() == 1);
        CHECK(sum.beta_quartiles[0][1] == doctest::Approx(0.1).epsilon(1e-12));
        std::size_t nonzero_bins = 0;
        for (auto c : sum.error_hist.counts) nonzero_bins += c > 0 ? 1 : 0;
        CHECK(nonzero_bins == 1);
    }
    SUBCASE("truncation changes the mean of a long-tailed chain") {
        std::vector<ChainSample> chain;
        for (int i = 0; i < 50; ++i) {
            ChainSample cs;
            cs.params.beta = {0.1};
            cs.error = i < 40 ? 100.0 : 50000.0;
            cs.effectiveness = i < 40 ? 2.0 : 9.0;
            chain.push_back(cs);
        }
        const auto truncated = summarize(chain, 5000.0);
        const auto full = summarize(chain, 1e18);
        CHECK(truncated.used == 40);
        CHECK(full.used == 50);
        CHECK(truncated.effectiveness_mean < full.effectiveness_mean);
    }
    SUBCASE("an empty filtered set is an error") {
        ChainSample cs;
        cs.params.beta = {0.1};
        cs.error = 10.0;
        std::vector<ChainSample> chain{cs};
        CHECK_THROWS_AS(summarize(chain, 1.0), input_error);
        CHECK_THROWS_AS(summarize({}, 1.0), input_error);
    }
}
