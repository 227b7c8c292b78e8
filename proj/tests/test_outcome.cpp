#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "platsim/outcome.hpp"
#include "platsim/stats.hpp"

using namespace platsim;

TEST_CASE("standard calibration satisfies its defining identities") {
    auto c = OutcomeCalibration::standard();
    // SD of change anchored by the d -> points map
    double sd_delta = (2.25 / 0.2 + 4.0 / 0.35 + 5.7 / 0.5) / 3.0;
    CHECK(c.sd_delta == doctest::Approx(sd_delta).epsilon(1e-14));
    CHECK(c.sigma_baseline == doctest::Approx(c.sigma_week6 / 2.0).epsilon(1e-14));
    // Var(week6 - baseline) must equal sd_delta^2 under (sigma, sigma/2, rho)
    double var_change = c.sigma_week6 * c.sigma_week6 + c.sigma_baseline * c.sigma_baseline -
                        2.0 * c.rho * c.sigma_week6 * c.sigma_baseline;
    CHECK(var_change == doctest::Approx(sd_delta * sd_delta).epsilon(1e-12));
    CHECK(c.mu_baseline == 32.0);
    CHECK(c.mu_week6_control == 20.0);
    CHECK(c.rho == 0.214);
}

TEST_CASE("standardized effects recover the grid") {
    auto c = OutcomeCalibration::standard();
    CHECK(standardized_effect(c.delta_map[1], c.sd_delta) == doctest::Approx(0.2).epsilon(0.01));
    CHECK(standardized_effect(c.delta_map[2], c.sd_delta) == doctest::Approx(0.35).epsilon(0.01));
    CHECK(standardized_effect(c.delta_map[3], c.sd_delta) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("control draws reproduce means, correlation, and change SD") {
    auto c = OutcomeCalibration::standard();
    RngStream rng(1001, 0);
    const int n = 200000;
    double sb = 0, sw = 0, sbb = 0, sww = 0, sbw = 0, sd2 = 0, sd1 = 0;
    for (int i = 0; i < n; ++i) {
        auto [bl, w6] = generate_outcome(rng, true, 0, 0, c, std::nullopt);
        sb += bl;
        sw += w6;
        sbb += bl * bl;
        sww += w6 * w6;
        sbw += bl * w6;
        double ch = w6 - bl;
        sd1 += ch;
        sd2 += ch * ch;
    }
    double mb = sb / n, mw = sw / n;
    double vb = sbb / n - mb * mb, vw = sww / n - mw * mw;
    double corr = (sbw / n - mb * mw) / std::sqrt(vb * vw);
    double var_change = sd2 / n - (sd1 / n) * (sd1 / n);
    CHECK(mb == doctest::Approx(32.0).epsilon(0.003));
    CHECK(mw == doctest::Approx(20.0).epsilon(0.005));
    CHECK(corr == doctest::Approx(0.214).epsilon(0.03));
    CHECK(std::sqrt(vb) == doctest::Approx(c.sigma_baseline).epsilon(0.01));
    CHECK(std::sqrt(vw) == doctest::Approx(c.sigma_week6).epsilon(0.01));
    CHECK(std::sqrt(var_change) == doctest::Approx(c.sd_delta).epsilon(0.01));
}

TEST_CASE("treatment draws shift week6 by the mapped reduction") {
    auto c = OutcomeCalibration::standard();
    RngStream rng(1002, 0);
    const int n = 120000;
    double sw = 0;
    for (int i = 0; i < n; ++i) {
        auto [bl, w6] = generate_outcome(rng, false, 3, 0, c, std::nullopt);
        (void)bl;
        sw += w6;
    }
    CHECK(sw / n == doctest::Approx(20.0 - 5.7).epsilon(0.007));  // 14.3 +- ~0.1
}

TEST_CASE("empirical standardized effect matches the configured d") {
    auto c = OutcomeCalibration::standard();
    for (int idx : {1, 2, 3}) {
        RngStream rng(1003, static_cast<std::uint64_t>(idx));
        const int n = 150000;
        double st = 0, st2 = 0, sc = 0, sc2 = 0;
        for (int i = 0; i < n; ++i) {
            auto [bt, wt] = generate_outcome(rng, false, idx, 0, c, std::nullopt);
            auto [bc, wc] = generate_outcome(rng, true, 0, 0, c, std::nullopt);
            double dt = wt - bt, dc = wc - bc;
            st += dt;
            st2 += dt * dt;
            sc += dc;
            sc2 += dc * dc;
        }
        double mt = st / n, mc = sc / n;
        double vt = st2 / n - mt * mt, vc = sc2 / n - mc * mc;
        double pooled = std::sqrt(0.5 * (vt + vc));
        double d_hat = (mc - mt) / pooled;
        CHECK(std::fabs(d_hat - EffectDistribution::kGrid[static_cast<std::size_t>(idx)]) < 0.02);
    }
}

TEST_CASE("step trend adds one step per period") {
    auto c = OutcomeCalibration::standard();
    TimeTrend var_trend{0.1, TrendInterpretation::variance};
    TimeTrend sd_trend{0.1, TrendInterpretation::sd};
    CHECK(trend_offset(0, var_trend, c) == 0.0);
    CHECK(trend_offset(2, var_trend, c) ==
          doctest::Approx(0.2 * c.sigma_week6 * c.sigma_week6).epsilon(1e-13));
    CHECK(trend_offset(3, sd_trend, c) == doctest::Approx(0.3 * c.sigma_week6).epsilon(1e-13));
    CHECK(trend_offset(5, std::nullopt, c) == 0.0);

    // the offset is purely additive: same rng stream with/without trend differs
    // by exactly the offset on week6 and not at all on baseline
    RngStream a(7, 7), b(7, 7);
    auto [bl1, w61] = generate_outcome(a, true, 0, 4, c, var_trend);
    auto [bl2, w62] = generate_outcome(b, true, 0, 4, c, std::nullopt);
    CHECK(bl1 == doctest::Approx(bl2).epsilon(1e-15));
    CHECK(w61 - w62 == doctest::Approx(trend_offset(4, var_trend, c)).epsilon(1e-12));
}
