#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "eoelab/econsim.hpp"
#include "eoelab/errors.hpp"
#include "eoelab/rng.hpp"

using namespace eoelab;
using namespace eoelab::econsim;

namespace {
const AssetId kAsset = AssetId::with_defaults("BTC");
}

TEST_CASE("economy_from_velocities: two-token hand example") {
    const std::vector<double> vs{1.0, 3.0};
    const auto s = economy_from_velocities(vs, kAsset);
    CHECK(s.mean_velocity == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.mean_holding_time == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(s.mean_velocity * s.mean_holding_time > 1.0);
}

TEST_CASE("economy_from_velocities rejects non-positive draws") {
    try {
        economy_from_velocities(std::vector<double>{1.0, 0.0}, kAsset);
        FAIL("expected NonPositiveDraw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_positive_draw);
    }
}

TEST_CASE("degenerate lognormal economy is exact") {
    const auto d = distfit::FittedDistribution::lognormal(std::log(2.0), 0.0);
    const auto s = simulate_economy(d, 100, 42, kAsset);
    CHECK(s.mean_velocity == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.mean_holding_time == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("product of means converges to exp(sigma^2) for lognormal(0,1)") {
    const auto d = distfit::FittedDistribution::lognormal(0.0, 1.0);
    SimulationConfig config;
    config.tokens_per_economy = 100;
    config.economies_per_distribution = 10000;  // 1e6 total draws
    config.seed = 7;
    const auto batch = simulate_batch(d, config, kAsset);
    double acc = 0.0;
    for (const auto& s : batch) {
        CHECK(s.mean_velocity * s.mean_holding_time >= 1.0);
        acc += s.mean_velocity * s.mean_holding_time;
    }
    acc /= static_cast<double>(batch.size());
    const double e = std::exp(1.0);
    CHECK(std::fabs(acc - e) <= 0.02 * e);
}

TEST_CASE("batch average holding time matches the analytic lognormal moment") {
    const auto d = distfit::FittedDistribution::lognormal(0.4, 0.7);
    SimulationConfig config;
    config.tokens_per_economy = 100;
    config.economies_per_distribution = 2000;
    config.seed = 11;
    const auto batch = simulate_batch(d, config, kAsset);
    double acc = 0.0;
    for (const auto& s : batch) acc += s.mean_holding_time;
    acc /= static_cast<double>(batch.size());
    const double expected = std::exp(-0.4 + 0.5 * 0.49);  // E[1/V]
    CHECK(std::fabs(acc - expected) <= 0.02 * expected);
}

TEST_CASE("simulate_batch is deterministic and consistent with simulate_economy") {
    const auto d = distfit::FittedDistribution::lognormal(0.0, 1.0);
    SimulationConfig config;
    config.tokens_per_economy = 100;
    config.economies_per_distribution = 50;
    config.seed = 42;
    const auto a = simulate_batch(d, config, kAsset);
    const auto b = simulate_batch(d, config, kAsset);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_velocity == b[i].mean_velocity);
        CHECK(a[i].mean_holding_time == b[i].mean_holding_time);
    }

    config.economies_per_distribution = 1;
    const auto single = simulate_batch(d, config, kAsset);
    const auto direct = simulate_economy(d, 100, rng::derive_stream_seed(42, 0), kAsset);
    CHECK(single[0].mean_velocity == direct.mean_velocity);
    CHECK(single[0].mean_holding_time == direct.mean_holding_time);
}

TEST_CASE("iqr_filter: hand-computed fences") {
    const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
    const auto keep = iqr_filter(xs);
    // Q1 = 3.25, Q3 = 7.75, IQR = 4.5, fences [-3.5, 14.5]
    for (std::size_t i = 0; i < 9; ++i) CHECK(keep[i]);
    CHECK_FALSE(keep[9]);
}

TEST_CASE("iqr_filter: all-equal and uniform ramp keep everything") {
    const std::vector<double> same(10, 3.0);
    for (bool k : iqr_filter(same)) CHECK(k);

    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i + 1.0;
    for (bool k : iqr_filter(ramp)) CHECK(k);

    CHECK_THROWS_AS(iqr_filter(std::vector<double>{1.0, 2.0, 3.0}), Error);
}

TEST_CASE("build_regression_dataset excludes non-medium-of-exchange assets") {
    const auto usdt = AssetId::with_defaults("USDT");
    std::vector<EconomySample> batch;
    for (int i = 0; i < 10; ++i) batch.push_back({1.0 + 0.01 * i, 1.0, usdt});
    try {
        build_regression_dataset({{usdt, batch}});
        FAIL("expected EmptyAfterExclusion");
    } catch (const Error& e) {
        CHECK(e.code() == errc::empty_after_exclusion);
    }
}

TEST_CASE("build_regression_dataset: tight batches survive whole") {
    std::vector<EconomySample> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back({2.0 + 0.001 * i, 0.5, kAsset});
        b.push_back({2.01 + 0.001 * i, 0.5, AssetId::with_defaults("ETH")});
    }
    const auto ds = build_regression_dataset({{kAsset, a}, {AssetId::with_defaults("ETH"), b}});
    CHECK(ds.points.size() == 20);
    CHECK(ds.iqr_removed_count == 0);
    CHECK(ds.excluded_assets.empty());
}

TEST_CASE("build_regression_dataset: retained points sit inside both fences") {
    SimulationConfig config;
    config.tokens_per_economy = 100;
    config.economies_per_distribution = 1000;
    config.seed = 5;
    std::vector<std::pair<AssetId, std::vector<EconomySample>>> batches;
    const char* tickers[] = {"BTC", "ETH", "BNB", "CRV", "DOT", "LINK", "UNI"};
    double mu = -0.5;
    for (const char* t : tickers) {
        const auto d = distfit::FittedDistribution::lognormal(mu, 0.6);
        mu += 0.2;
        config.seed += 1;
        batches.push_back({AssetId::with_defaults(t), simulate_batch(d, config, AssetId::with_defaults(t))});
    }
    const auto ds = build_regression_dataset(batches);
    CHECK(ds.points.size() <= 7000);

    // recompute fences from the pre-filter combined set
    std::vector<double> vs, hs;
    for (const auto& [asset, batch] : batches)
        for (const auto& s : batch) {
            vs.push_back(s.mean_velocity);
            hs.push_back(s.mean_holding_time);
        }
    auto fences = [](std::vector<double> xs) {
        std::sort(xs.begin(), xs.end());
        auto q = [&](double p) {
            const double pos = 1.0 + p * (static_cast<double>(xs.size()) - 1.0);
            const auto lo = static_cast<std::size_t>(pos) - 1;
            const double frac = pos - std::floor(pos);
            return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
        };
        const double q1 = q(0.25), q3 = q(0.75);
        return std::pair<double, double>{q1 - 1.5 * (q3 - q1), q3 + 1.5 * (q3 - q1)};
    };
    const auto [vlo, vhi] = fences(vs);
    const auto [hlo, hhi] = fences(hs);
    for (const auto& p : ds.points) {
        CHECK(p.mean_velocity >= vlo);
        CHECK(p.mean_velocity <= vhi);
        CHECK(p.mean_holding_time >= hlo);
        CHECK(p.mean_holding_time <= hhi);
    }
    CHECK(ds.iqr_removed_count == 7000 - ds.points.size());

    const auto ds2 = build_regression_dataset(batches);
    CHECK(ds2.points.size() == ds.points.size());
}

TEST_CASE("dataset CSV round trip") {
    RegressionDataset ds;
    ds.points.push_back({1.25, 0.875, kAsset});
    ds.points.push_back({0.3333333333333333, 3.0000000000000004, AssetId::with_defaults("ETH")});
    const std::string text = serialize_dataset_csv(ds);
    CHECK(text.substr(0, 20) == "asset,mean_V,mean_H\n");
    const auto back = parse_dataset_csv(text);
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[0].mean_velocity == 1.25);
    CHECK(back.points[1].mean_velocity == ds.points[1].mean_velocity);
    CHECK(back.points[1].mean_holding_time == ds.points[1].mean_holding_time);
    CHECK(back.points[0].source_asset.ticker == "BTC");
}
