#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "platsim/ocs.hpp"

using namespace platsim;

namespace {

ComparisonResult comparison(int effect_index, Decision decision, int n_t = 80,
                            int n_c_final = 60) {
    ComparisonResult c;
    c.effect_index = effect_index;
    c.d = EffectDistribution::kGrid[static_cast<std::size_t>(effect_index)];
    c.decision = decision;
    c.n_treatment = n_t;
    if (decision != Decision::stopped_futility) c.n_controls_final = n_c_final;
    c.entry_week = 1;
    c.exit_week = 24;
    c.duration_weeks = 24;
    return c;
}

ReplicateResult replicate(std::vector<ComparisonResult> comps, long total_n) {
    ReplicateResult r;
    r.comparisons = std::move(comps);
    r.total_n = total_n;
    r.control_n = total_n / 4;
    r.n_arms_tested = static_cast<int>(r.comparisons.size());
    r.duration_weeks = 200;
    return r;
}

}  // namespace

TEST_CASE("aggregate pools decisions by effect and summarizes per replicate") {
    std::vector<ReplicateResult> results;
    results.push_back(replicate({comparison(0, Decision::failure),
                                 comparison(2, Decision::success),
                                 comparison(2, Decision::failure)},
                                300));
    results.push_back(replicate({comparison(2, Decision::success),
                                 comparison(3, Decision::stopped_futility)},
                                500));
    auto oc = aggregate(results);
    CHECK(oc.replicates == 2);
    CHECK(oc.total_comparisons == 5);
    CHECK(oc.per_effect[0].n_comparisons == 1);
    CHECK(oc.per_effect[0].success_rate == doctest::Approx(0.0));
    CHECK(oc.per_effect[2].n_comparisons == 3);
    CHECK(oc.per_effect[2].success_rate == doctest::Approx(2.0 / 3.0));
    CHECK(oc.per_effect[2].failure_rate == doctest::Approx(1.0 / 3.0));
    CHECK(oc.per_effect[3].futility_rate == doctest::Approx(1.0));
    CHECK(oc.per_effect[1].n_comparisons == 0);

    // arms_per_1000 is the median of per-replicate ratios: {10, 4}
    CHECK(oc.arms_per_1000.median == doctest::Approx(7.0));
    CHECK(oc.total_n.median == doctest::Approx(400.0));
    CHECK(oc.total_n.q25 == doctest::Approx(350.0));
    CHECK(oc.n_arms.median == doctest::Approx(2.5));
    CHECK(oc.per_arm_n.median == doctest::Approx(80.0));
    REQUIRE(oc.controls_final.has_value());
    CHECK(oc.controls_final->n == 4);  // the futility stop has no final-control count
    CHECK(oc.controls_final->median == doctest::Approx(60.0));
}

TEST_CASE("aggregation is invariant under result order") {
    std::vector<ReplicateResult> results;
    for (int i = 0; i < 7; ++i)
        results.push_back(replicate({comparison(i % 4, i % 2 ? Decision::success
                                                            : Decision::failure)},
                                    200 + 10 * i));
    auto oc1 = serialize_oc(aggregate(results));
    std::reverse(results.begin(), results.end());
    auto oc2 = serialize_oc(aggregate(results));
    CHECK(oc1 == oc2);
}

TEST_CASE("failed replicates are excluded; all-failed throws") {
    std::vector<ReplicateResult> results;
    results.push_back(replicate({comparison(0, Decision::failure)}, 100));
    ReplicateResult bad;
    bad.failed = true;
    bad.error = "degenerate fit";
    results.push_back(bad);
    auto oc = aggregate(results);
    CHECK(oc.replicates == 1);
    CHECK(oc.total_n.median == doctest::Approx(100.0));

    CHECK_THROWS_AS(aggregate({bad}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("mc errors follow the binomial formula") {
    std::vector<ReplicateResult> results;
    std::vector<ComparisonResult> comps;
    for (int i = 0; i < 100; ++i)
        comps.push_back(comparison(1, i < 25 ? Decision::success : Decision::failure));
    results.push_back(replicate(std::move(comps), 1000));
    auto oc = aggregate(results);
    CHECK(oc.per_effect[1].success_rate == doctest::Approx(0.25));
    CHECK(oc.per_effect[1].se_success ==
          doctest::Approx(std::sqrt(0.25 * 0.75 / 100.0)).epsilon(1e-12));
}

TEST_CASE("interim control summaries appear only when interims ran") {
    std::vector<ReplicateResult> results;
    results.push_back(replicate({comparison(0, Decision::failure)}, 100));
    auto oc = aggregate(results);
    CHECK(!oc.controls_interim.has_value());

    auto c = comparison(1, Decision::success);
    c.n_controls_interim = 30;
    c.p_interim = 0.2;
    results.push_back(replicate({c}, 150));
    auto oc2 = aggregate(results);
    REQUIRE(oc2.controls_interim.has_value());
    CHECK(oc2.controls_interim->median == doctest::Approx(30.0));
}
