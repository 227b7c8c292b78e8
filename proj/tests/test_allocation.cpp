#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "platsim/allocation.hpp"

using namespace platsim;

namespace {
AllocationPolicy make(AllocationKind kind, double cap = 0.35) { return {kind, cap}; }
}  // namespace

TEST_CASE("control ratios per policy") {
    CHECK(control_ratio(make(AllocationKind::balanced), 3) == doctest::Approx(0.25));
    CHECK(control_ratio(make(AllocationKind::balanced), 1) == doctest::Approx(0.5));
    CHECK(control_ratio(make(AllocationKind::k_alloc), 1) == doctest::Approx(0.5));
    CHECK(control_ratio(make(AllocationKind::k_alloc), 6) == doctest::Approx(0.5));
    CHECK(control_ratio(make(AllocationKind::sqrt_k), 4) == doctest::Approx(1.0 / 3.0));
    double r3 = std::sqrt(3.0) / (3.0 + std::sqrt(3.0));
    CHECK(control_ratio(make(AllocationKind::sqrt_k), 3) == doctest::Approx(r3).epsilon(1e-14));
    // the floor binds only when sqrt(k)/(k+sqrt(k)) falls below it
    CHECK(control_ratio(make(AllocationKind::sqrt_k_capped), 2) ==
          doctest::Approx(std::sqrt(2.0) / (2.0 + std::sqrt(2.0))));
    CHECK(control_ratio(make(AllocationKind::sqrt_k_capped), 6) == doctest::Approx(0.35));
    CHECK(control_ratio(make(AllocationKind::sqrt_k_capped), 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(control_ratio(make(AllocationKind::balanced), 0), std::invalid_argument);
}

TEST_CASE("control spots x inverts the ratio") {
    for (auto kind : {AllocationKind::balanced, AllocationKind::k_alloc, AllocationKind::sqrt_k,
                      AllocationKind::sqrt_k_capped}) {
        for (int k = 1; k <= 8; ++k) {
            auto policy = make(kind);
            double r = control_ratio(policy, k);
            double x = control_spots_x(policy, k);
            CHECK(x / (k + x) == doctest::Approx(r).epsilon(1e-12));
        }
    }
    // sqrt_k gives x = sqrt(k) exactly
    CHECK(control_spots_x(make(AllocationKind::sqrt_k), 3) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("blocks contain each arm once and floor(x) or floor(x)+1 controls") {
    RngStream rng(31, 0);
    const std::vector<int> arms{4, 9, 17};
    const double x = std::sqrt(3.0);  // frac = 0.732...
    int longer = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        auto block = generate_block(rng, arms, x);
        int controls = 0;
        std::multiset<int> seen;
        for (int a : block) {
            if (a == kControl) ++controls;
            else seen.insert(a);
        }
        CHECK(seen == std::multiset<int>(arms.begin(), arms.end()));
        CHECK((controls == 1 || controls == 2));
        longer += controls == 2;
    }
    double frac = longer / double(n);
    CHECK(std::fabs(frac - (std::sqrt(3.0) - 1.0)) < 0.02);  // Frac(sqrt(3)) = 0.732
}

TEST_CASE("block positions are uniformly permuted") {
    RngStream rng(5, 5);
    const std::vector<int> arms{1, 2};
    std::map<int, int> first_pos_count;
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        auto block = generate_block(rng, arms, 1.0);  // [1, 2, control] permuted
        CHECK(block.size() == 3);
        ++first_pos_count[block[0]];
    }
    for (int v : {1, 2, kControl})
        CHECK(std::fabs(first_pos_count[v] / double(n) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("block randomizer consumes whole blocks for a stable set") {
    RngStream rng(8, 1);
    BlockRandomizer br;
    const std::vector<int> arms{2, 5, 8};
    auto policy = make(AllocationKind::k_alloc);  // r = 1/2, x = 3: fixed length 6
    for (int rep = 0; rep < 500; ++rep) {
        std::multiset<int> chunk;
        for (int i = 0; i < 6; ++i) chunk.insert(br.next(rng, arms, policy));
        CHECK(chunk == std::multiset<int>{kControl, kControl, kControl, 2, 5, 8});
    }
}

TEST_CASE("block randomizer discards pending spots when the set changes") {
    RngStream rng(13, 2);
    BlockRandomizer br;
    auto policy = make(AllocationKind::k_alloc);
    std::vector<int> before{1, 2, 3};
    for (int i = 0; i < 2; ++i) br.next(rng, before, policy);
    std::vector<int> after{1, 2};
    for (int i = 0; i < 400; ++i) {
        int a = br.next(rng, after, policy);
        CHECK((a == kControl || a == 1 || a == 2));
    }
}

TEST_CASE("long-run control fraction matches the policy ratio") {
    const std::vector<int> arms{0, 1, 2, 3, 4, 5};
    for (auto kind : {AllocationKind::balanced, AllocationKind::k_alloc, AllocationKind::sqrt_k,
                      AllocationKind::sqrt_k_capped}) {
        auto policy = make(kind);
        double r = control_ratio(policy, 6);
        RngStream rng(99, static_cast<std::uint64_t>(kind));
        BlockRandomizer br;
        int controls = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) controls += br.next(rng, arms, policy) == kControl;
        CHECK(std::fabs(controls / double(n) - r) < 0.005);
    }
}

TEST_CASE("simple randomization hits the ratio and spreads arms evenly") {
    const std::vector<int> arms{3, 6, 9, 12};
    auto policy = make(AllocationKind::sqrt_k_capped);
    double r = control_ratio(policy, 4);
    RngStream rng(123, 4);
    std::map<int, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[next_assignment_simple(rng, arms, policy)];
    CHECK(std::fabs(counts[kControl] / double(n) - r) < 0.005);
    for (int a : arms)
        CHECK(std::fabs(counts[a] / double(n) - (1.0 - r) / 4.0) < 0.005);
}
