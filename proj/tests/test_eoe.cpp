#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "eoelab/eoe.hpp"
#include "eoelab/errors.hpp"

using namespace eoelab;
using namespace eoelab::eoe;

namespace {

ingest::SeriesRow make_row(int day, double price, double t, double m, double v) {
    ingest::SeriesRow r;
    r.date = ingest::Date{day};
    r.price = price;
    r.t = t;
    r.m = m;
    r.mc = price * m;
    r.v = v;
    r.h = v > 0.0 ? 1.0 / v : 0.0;
    return r;
}

// ln price = c0 + ct ln T + cm ln M + cv ln(1/V) + noise
AssetSeries eoe_series(const std::string& ticker, std::size_t n, double c0, double ct, double cm,
                       double cv, double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> lt(10.0, 14.0), lm(14.0, 18.0), lv(-2.0, 2.0);
    std::normal_distribution<double> eps(0.0, noise_sigma);
    AssetSeries s;
    s.asset = ingest::AssetId::with_defaults(ticker);
    for (std::size_t i = 0; i < n; ++i) {
        const double ln_t = lt(gen), ln_m = lm(gen), ln_v = lv(gen);
        double lp = c0 + ct * ln_t + cm * ln_m + cv * (-ln_v);
        if (noise_sigma > 0.0) lp += eps(gen);
        s.rows.push_back(make_row(static_cast<int>(i), std::exp(lp), std::exp(ln_t),
                                  std::exp(ln_m), std::exp(ln_v)));
    }
    return s;
}

// recursive lookahead generator: ln p_t = c0 + ct lnT + cm lnM + cv lnV + cl ln p_{t-1}
AssetSeries lookahead_series(const std::string& ticker, std::size_t n, double c0, double ct,
                             double cm, double cv, double cl, double noise_sigma,
                             std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> lt(10.0, 0.3), lm(12.0, 0.3), lv(0.0, 0.3);
    std::normal_distribution<double> eps(0.0, noise_sigma);
    AssetSeries s;
    s.asset = ingest::AssetId::with_defaults(ticker);
    double ln_prev = 4.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ln_t = lt(gen), ln_m = lm(gen), ln_v = lv(gen);
        double lp = c0 + ct * ln_t + cm * ln_m + cv * ln_v + cl * ln_prev;
        if (noise_sigma > 0.0) lp += eps(gen);
        s.rows.push_back(
            make_row(static_cast<int>(i), std::exp(lp), std::exp(ln_t), std::exp(ln_m), std::exp(ln_v)));
        ln_prev = lp;
    }
    return s;
}

regress::FittedLinearModel inverse_vmodel(double a, double b) {
    regress::FittedLinearModel m;
    m.spec.response = "V";
    m.spec.intercept = true;
    m.spec.features = {{"H", regress::FeatureTransform::inverse_power(1)}};
    m.coefficients = {a, b};
    return m;
}

}  // namespace

TEST_CASE("pool_series drops store-of-value assets and assigns groups") {
    auto btc = eoe_series("BTC", 5, 0.0, 0.88, 0.84, 1.15, 0.0, 1);
    auto eth = eoe_series("ETH", 3, 0.0, 0.88, 0.84, 1.15, 0.0, 2);
    auto usdt = eoe_series("USDT", 4, 0.0, 0.88, 0.84, 1.15, 0.0, 3);
    const auto pooled = pool_series({btc, usdt, eth});
    CHECK(pooled.table.row_count() == 8);
    CHECK(pooled.assets == std::vector<std::string>{"BTC", "ETH"});
    CHECK(pooled.table.groups == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1});
    CHECK(pooled.table.has_column("price"));
    CHECK(pooled.table.has_column("H"));

    try {
        pool_series({usdt});
        FAIL("expected EmptyAfterExclusion");
    } catch (const Error& e) {
        CHECK(e.code() == errc::empty_after_exclusion);
    }
}

TEST_CASE("fit_eoe recovers the generator with and without intercept") {
    const auto s = eoe_series("BTC", 300, 0.0, 0.88, 0.84, 1.15, 1e-3, 17);
    const auto pooled = pool_series({s});

    const auto with = fit_eoe(pooled, false, true);
    REQUIRE(with.fit.coefficients.size() == 4);
    CHECK(std::fabs(with.fit.coefficients[0] - 0.0) <= 1e-3);
    CHECK(std::fabs(with.fit.coefficients[1] - 0.88) <= 1e-3);
    CHECK(std::fabs(with.fit.coefficients[2] - 0.84) <= 1e-3);
    CHECK(std::fabs(with.fit.coefficients[3] - 1.15) <= 1e-3);
    CHECK(with.fit.adj_r2 > 0.999);
    CHECK_FALSE(with.use_derived);
    CHECK(with.fitted_on == std::vector<std::string>{"BTC"});

    const auto without = fit_eoe(pooled, false, false);
    REQUIRE(without.fit.coefficients.size() == 3);
    CHECK(std::fabs(without.fit.coefficients[0] - 0.88) <= 1e-3);
    CHECK(std::fabs(without.fit.coefficients[1] - 0.84) <= 1e-3);
    CHECK(std::fabs(without.fit.coefficients[2] - 1.15) <= 1e-3);
}

TEST_CASE("fit_eoe preconditions") {
    const auto small = eoe_series("BTC", 99, 0.0, 0.88, 0.84, 1.15, 0.0, 4);
    try {
        fit_eoe(pool_series({small}), false);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == errc::insufficient_data);
    }

    AssetSeries flat;
    flat.asset = ingest::AssetId::with_defaults("BTC");
    for (int i = 0; i < 150; ++i) flat.rows.push_back(make_row(i, 2.0, 1.0, 1.0, 1.0));
    try {
        fit_eoe(pool_series({flat}), false);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == errc::rank_deficient);
    }
}

TEST_CASE("predict_price with published coefficients") {
    EoEModel model;
    model.fit.spec.intercept = false;
    model.fit.coefficients = {0.88, 0.84, 1.15};

    CHECK(predict_price(model, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(predict_price(model, std::exp(1.0), 1.0, 1.0) ==
          doctest::Approx(std::exp(0.88)).epsilon(1e-12));
    const double base = predict_price(model, 5e9, 2e7, 0.8);
    CHECK(predict_price(model, 5e9, 2e7, 1.6) / base ==
          doctest::Approx(std::pow(2.0, -1.15)).epsilon(1e-12));
    // homogeneity in T
    CHECK(predict_price(model, 3.7 * 5e9, 2e7, 0.8) / base ==
          doctest::Approx(std::pow(3.7, 0.88)).epsilon(1e-12));
    CHECK_THROWS_AS(predict_price(model, 0.0, 1.0, 1.0), Error);
}

TEST_CASE("derive_columns: closed-form inverse model") {
    const auto vmodel = inverse_vmodel(0.03358, 1.20329);
    AssetSeries s;
    s.asset = ingest::AssetId::with_defaults("BTC");
    s.rows.push_back(make_row(0, 100.0, 1.0, 1.0, 1.23687));  // h = 1/1.23687, v matches model at H=1
    s.rows[0].h = 1.0;
    s.rows.push_back(make_row(1, 100.0, 1.0, 1.0, 0.02));  // v below the asymptote a
    s.rows.push_back(make_row(2, 100.0, 1.0, 1.0, 0.5));
    s.rows[2].h = -3.0;  // outside positivity for the forward map

    const auto d = derive_columns(s, vmodel);
    REQUIRE(d.v_derived.size() == 3);
    CHECK(d.v_derived[0] == doctest::Approx(1.23687).epsilon(1e-9));
    CHECK(d.h_derived[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(d.outside_range[0]);

    CHECK(std::isnan(d.h_derived[1]));
    CHECK(d.outside_range[1]);

    CHECK(std::isnan(d.v_derived[2]));
    CHECK(d.outside_range[2]);
    CHECK(d.flagged_count == 2);
    CHECK(d.series.rows.size() == 3);  // flagged rows are kept

    // round trip across a grid of holding times
    AssetSeries grid;
    grid.asset = s.asset;
    for (int i = 0; i < 40; ++i) {
        const double h = 0.5 * std::pow(1.2, i);
        const double v = 0.03358 + 1.20329 / h;
        auto row = make_row(i, 10.0, 1.0, 1.0, v);
        row.h = h;
        grid.rows.push_back(row);
    }
    const auto g = derive_columns(grid, vmodel);
    for (int i = 0; i < 40; ++i) {
        CHECK_FALSE(g.outside_range[static_cast<std::size_t>(i)]);
        CHECK(g.h_derived[static_cast<std::size_t>(i)] ==
              doctest::Approx(grid.rows[static_cast<std::size_t>(i)].h).epsilon(1e-9));
        CHECK(g.v_derived[static_cast<std::size_t>(i)] ==
              doctest::Approx(grid.rows[static_cast<std::size_t>(i)].v).epsilon(1e-9));
    }
}

TEST_CASE("derive_columns: bisection inversion for the log model") {
    regress::FittedLinearModel vmodel;
    vmodel.spec.response = "V";
    vmodel.spec.intercept = true;
    vmodel.spec.features = {{"H", regress::FeatureTransform::log()}};
    vmodel.coefficients = {0.37503, -0.09028};

    AssetSeries s;
    s.asset = ingest::AssetId::with_defaults("BTC");
    const double v_at_2 = 0.37503 - 0.09028 * std::log(2.0);
    auto row = make_row(0, 10.0, 1.0, 1.0, v_at_2);
    row.h = 2.0;
    s.rows.push_back(row);
    auto outside = make_row(1, 10.0, 1.0, 1.0, 0.3);
    outside.h = 100.0;  // past the positivity boundary ~63.7
    s.rows.push_back(outside);

    const auto d = derive_columns(s, vmodel);
    CHECK(d.v_derived[0] == doctest::Approx(v_at_2).epsilon(1e-12));
    CHECK(d.h_derived[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_FALSE(d.outside_range[0]);
    CHECK(std::isnan(d.v_derived[1]));
    CHECK(d.outside_range[1]);
}

TEST_CASE("derived-velocity fit uses the V_derived column") {
    // V column holds junk; V_derived holds the velocities the price was built from
    auto s = eoe_series("BTC", 200, 0.0, 0.88, 0.84, 1.15, 0.0, 23);
    DerivedSeries d;
    d.series = s;
    d.v_derived.reserve(s.rows.size());
    for (auto& r : d.series.rows) {
        d.v_derived.push_back(r.v);
        r.v = 123.0;  // junk the empirical column
    }
    d.h_derived.assign(s.rows.size(), 1.0);
    d.outside_range.assign(s.rows.size(), false);
    // blank out a few derived values; those rows must drop from the fit
    d.v_derived[0] = std::numeric_limits<double>::quiet_NaN();
    d.v_derived[1] = std::numeric_limits<double>::quiet_NaN();

    const auto pooled = pool_derived({d});
    const auto model = fit_eoe(pooled, true, true);
    CHECK(model.use_derived);
    CHECK(model.fit.n == 198);
    CHECK(std::fabs(model.fit.coefficients[1] - 0.88) <= 1e-6);
    CHECK(std::fabs(model.fit.coefficients[2] - 0.84) <= 1e-6);
    CHECK(std::fabs(model.fit.coefficients[3] - 1.15) <= 1e-6);
}

TEST_CASE("fit_lookahead: random walk puts all weight on the lag") {
    const auto a = lookahead_series("BTC", 400, 0.0, 0.0, 0.0, 0.0, 1.0, 0.02, 31);
    const auto b = lookahead_series("ETH", 400, 0.0, 0.0, 0.0, 0.0, 1.0, 0.02, 32);
    const auto pooled = pool_series({a, b});
    const auto model = fit_lookahead(pooled);
    REQUIRE(model.fit.coefficients.size() == 5);
    CHECK(model.fit.n == 798);  // first row of each asset has no lag
    CHECK(std::fabs(model.fit.coefficients[4] - 1.0) <= 0.05);
    CHECK(std::fabs(model.fit.coefficients[1]) <= 0.05);
    CHECK(std::fabs(model.fit.coefficients[2]) <= 0.05);
    CHECK(std::fabs(model.fit.coefficients[3]) <= 0.05);
}

TEST_CASE("fit_lookahead: single-row asset contributes nothing") {
    auto solo = lookahead_series("BNB", 1, -1.0, 0.2, 0.05, 0.05, 0.6, 0.0, 40);
    auto full = lookahead_series("BTC", 300, -1.0, 0.2, 0.05, 0.05, 0.6, 0.0, 41);
    const auto pooled = pool_series({solo, full});
    const auto model = fit_lookahead(pooled);
    CHECK(model.fit.n == 299);
}

TEST_CASE("cv_folds: partition invariants, sizes, block layout") {
    const auto folds = cv_folds(103, 20, 9, false);
    REQUIRE(folds.size() == 20);
    std::multiset<std::size_t> seen;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        CHECK(folds[f].size() == (f < 3 ? 6 : 5));
        seen.insert(folds[f].begin(), folds[f].end());
    }
    CHECK(seen.size() == 103);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 102);
    std::set<std::size_t> unique(seen.begin(), seen.end());
    CHECK(unique.size() == 103);  // disjoint

    const auto again = cv_folds(103, 20, 9, false);
    CHECK(folds == again);
    const auto other = cv_folds(103, 20, 10, false);
    CHECK(folds != other);

    const auto block = cv_folds(10, 3, 9, true);
    CHECK(block[0] == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(block[1] == std::vector<std::size_t>{4, 5, 6});
    CHECK(block[2] == std::vector<std::size_t>{7, 8, 9});

    CHECK_THROWS_AS(cv_folds(10, 1, 0, false), Error);
    try {
        cv_folds(5, 6, 0, false);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == errc::insufficient_data);
    }
}

TEST_CASE("cross_validate: noise-free lookahead data is perfect in every fold") {
    const auto a = lookahead_series("BTC", 103, -1.0, 0.2, 0.05, 0.05, 0.6, 0.0, 51);
    const auto b = lookahead_series("ETH", 103, -1.0, 0.2, 0.05, 0.05, 0.6, 0.0, 52);
    const auto pooled = pool_series({a, b});
    const auto report = cross_validate(lookahead_spec(), pooled, 20, 3);
    CHECK(report.k == 20);
    REQUIRE(report.per_fold.size() == 20);
    for (const auto& fm : report.per_fold) {
        CHECK(fm.mae <= 1e-6);
        CHECK(fm.rmse <= 1e-6);
        CHECK(fm.r2 >= 0.999999);
    }
    CHECK(report.mean_mae <= 1e-6);
    CHECK(report.r2_excluded_folds == 0);

    const auto rerun = cross_validate(lookahead_spec(), pooled, 20, 3);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(report.per_fold[i].mae == rerun.per_fold[i].mae);
        CHECK(report.per_fold[i].rmse == rerun.per_fold[i].rmse);
        CHECK(report.per_fold[i].r2 == rerun.per_fold[i].r2);
    }
}

TEST_CASE("cross_validate: leave-one-out flags undefined fold r2") {
    const auto a = lookahead_series("BTC", 41, -1.0, 0.2, 0.05, 0.05, 0.6, 0.01, 61);
    const auto pooled = pool_series({a});
    const auto report = cross_validate(lookahead_spec(), pooled, 40, 5);
    REQUIRE(report.per_fold.size() == 40);
    for (const auto& fm : report.per_fold) CHECK(std::isnan(fm.r2));
    CHECK(report.r2_excluded_folds == 40);
    CHECK(std::isnan(report.mean_r2));
    CHECK(report.mean_mae >= 0.0);
    CHECK(std::isfinite(report.mean_mae));

    try {
        cross_validate(lookahead_spec(), pooled, 41, 5);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == errc::insufficient_data);
    }
}

TEST_CASE("cross_validate: r2 domain flag changes the aggregate on noisy data") {
    const auto a = lookahead_series("BTC", 150, -1.0, 0.2, 0.05, 0.05, 0.6, 0.05, 71);
    const auto b = lookahead_series("ETH", 150, -1.0, 0.2, 0.05, 0.05, 0.6, 0.05, 72);
    const auto pooled = pool_series({a, b});
    const auto price = cross_validate(lookahead_spec(), pooled, 10, 4, false, CvDomain::price);
    const auto logp = cross_validate(lookahead_spec(), pooled, 10, 4, false, CvDomain::log_price);
    CHECK(price.mean_mae == logp.mean_mae);  // MAE always in price domain
    CHECK(price.mean_r2 != logp.mean_r2);
    CHECK(std::isfinite(price.mean_r2));
    CHECK(std::isfinite(logp.mean_r2));

    const auto block = cross_validate(lookahead_spec(), pooled, 10, 4, true, CvDomain::price);
    CHECK(block.block);
    CHECK(block.mean_mae != price.mean_mae);  // different partition, different folds
}
