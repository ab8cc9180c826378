#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "eoelab/csv.hpp"
#include "eoelab/errors.hpp"
#include "eoelab/preprocess.hpp"

using namespace eoelab;
using namespace eoelab::ingest;

namespace {

AssetId test_asset() { return AssetId::with_defaults("BTC"); }

RawRecord rec(int day, double price, double mc, double t) {
    return {Date{day}, price, mc, t};
}

bool has_code(const Error& e, errc c) { return e.code() == c; }

}  // namespace

TEST_CASE("parse_asset_csv maps the CoinGecko export format") {
    const std::string text =
        "snapped_at,price,market_cap,total_volume\n"
        "2021-01-01 00:00:00 UTC,29374.15,546137034670.6,40730301359.0\n";
    const auto records = parse_asset_csv(text, test_asset());
    REQUIRE(records.size() == 1);
    CHECK(records[0].date.to_string() == "2021-01-01");
    CHECK(records[0].price == doctest::Approx(29374.15));
    CHECK(records[0].market_cap == doctest::Approx(5.461370346706e11));
    CHECK(records[0].total_volume == doctest::Approx(4.07303013590e10));
}

TEST_CASE("parse_asset_csv accepts the plain date header and sorts by date") {
    const std::string text =
        "date,price,market_cap,total_volume\n"
        "2021-01-03,3,30,3\n"
        "2021-01-01,1,10,1\n"
        "2021-01-02,2,20,2\n";
    const auto records = parse_asset_csv(text, test_asset());
    REQUIRE(records.size() == 3);
    CHECK(records[0].date.to_string() == "2021-01-01");
    CHECK(records[2].date.to_string() == "2021-01-03");
}

TEST_CASE("parse_asset_csv: empty body after header gives an empty sequence") {
    CHECK(parse_asset_csv("snapped_at,price,market_cap,total_volume\n", test_asset()).empty());
}

TEST_CASE("parse_asset_csv error paths") {
    try {
        parse_asset_csv("foo,bar\n", test_asset());
        FAIL("expected MalformedHeader");
    } catch (const Error& e) {
        CHECK(has_code(e, errc::malformed_header));
        CHECK(std::string(e.what()).find("MalformedHeader") != std::string::npos);
    }

    try {
        parse_asset_csv(
            "date,price,market_cap,total_volume\n"
            "2021-01-01,1,10,1\n"
            "2021-01-02,abc,20,2\n",
            test_asset());
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(has_code(e, errc::malformed_row));
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    try {
        parse_asset_csv(
            "date,price,market_cap,total_volume\n"
            "2021-01-01,1,10,1\n"
            "2021-01-01,2,20,2\n",
            test_asset());
        FAIL("expected DuplicateDate");
    } catch (const Error& e) {
        CHECK(has_code(e, errc::duplicate_date));
    }

    try {
        parse_asset_csv("date,price,market_cap,total_volume\n2021-01-01,-1,10,1\n", test_asset());
        FAIL("expected MalformedRow for negative price");
    } catch (const Error& e) {
        CHECK(has_code(e, errc::malformed_row));
    }
}

TEST_CASE("missing numeric fields read as zero and are dropped by preprocess") {
    const auto records = parse_asset_csv(
        "date,price,market_cap,total_volume\n"
        "2021-01-01,1,,1\n"
        "2021-01-02,2,20,2\n",
        test_asset());
    REQUIRE(records.size() == 2);
    CHECK(records[0].market_cap == 0.0);
    PreprocessStats stats;
    const auto series = preprocess(records, test_asset(), &stats);
    CHECK(stats.dropped_non_positive == 1);
    CHECK(series.rows.size() == 1);
}

TEST_CASE("preprocess: single row arithmetic") {
    const auto series = preprocess({rec(0, 10, 100, 50)}, test_asset());
    REQUIRE(series.rows.size() == 1);
    CHECK(series.rows[0].m == doctest::Approx(10.0));
    CHECK(series.rows[0].v == doctest::Approx(0.5));
    CHECK(series.rows[0].h == doctest::Approx(2.0));
}

TEST_CASE("preprocess: bottom 10% of velocity trimmed") {
    std::vector<RawRecord> records;
    for (int i = 1; i <= 10; ++i) records.push_back(rec(i, 1.0, 10.0, 10.0 * i));  // V = i
    const auto series = preprocess(records, test_asset());
    REQUIRE(series.rows.size() == 9);
    const double min_v =
        std::min_element(series.rows.begin(), series.rows.end(),
                         [](const auto& a, const auto& b) { return a.v < b.v; })
            ->v;
    CHECK(min_v == doctest::Approx(2.0));
}

TEST_CASE("preprocess: zero-volume row drops before trimming") {
    std::vector<RawRecord> records;
    for (int i = 1; i <= 9; ++i) records.push_back(rec(i, 1.0, 10.0, 10.0 * i));
    records.push_back(rec(10, 1.0, 10.0, 0.0));
    PreprocessStats stats;
    const auto series = preprocess(records, test_asset(), &stats);
    CHECK(stats.dropped_non_positive == 1);
    CHECK(stats.trimmed_low_velocity == 0);  // floor(0.1 * 9) = 0
    CHECK(series.rows.size() == 9);
}

TEST_CASE("preprocess: velocity ties trim the earlier date") {
    // two rows share the lowest V; the later date stays
    std::vector<RawRecord> records;
    records.push_back(rec(1, 1.0, 10.0, 1.0));
    records.push_back(rec(2, 1.0, 10.0, 1.0));
    for (int i = 3; i <= 10; ++i) records.push_back(rec(i, 1.0, 10.0, 5.0));
    const auto series = preprocess(records, test_asset());
    REQUIRE(series.rows.size() == 9);
    bool day1_present = false, day2_present = false;
    for (const auto& r : series.rows) {
        if (r.date.days_since_epoch == 1) day1_present = true;
        if (r.date.days_since_epoch == 2) day2_present = true;
    }
    CHECK_FALSE(day1_present);
    CHECK(day2_present);
}

TEST_CASE("preprocess: EmptyAfterFilter when nothing survives") {
    try {
        preprocess({rec(1, 0.0, 10.0, 1.0)}, test_asset());
        FAIL("expected EmptyAfterFilter");
    } catch (const Error& e) {
        CHECK(has_code(e, errc::empty_after_filter));
    }
    CHECK_THROWS_AS(preprocess({}, test_asset()), Error);
}

TEST_CASE("row invariants: V*H = 1 and M*price = MC") {
    std::vector<RawRecord> records;
    double price = 17.25;
    double mc = 9.4e8;
    double t = 3.1e7;
    for (int i = 0; i < 200; ++i) {
        records.push_back(rec(i, price, mc, t));
        price *= 1.0 + 0.01 * std::sin(i);
        mc *= 1.0 + 0.005 * std::cos(i * 0.7);
        t *= 1.0 + 0.02 * std::sin(i * 1.3 + 0.5);
    }
    const auto series = preprocess(records, test_asset());
    REQUIRE_FALSE(series.rows.empty());
    for (const auto& r : series.rows) {
        CHECK(std::fabs(r.v * r.h - 1.0) <= 1e-9);
        CHECK(std::fabs(r.m * r.price - r.mc) <= 1e-6 * r.mc);
    }
}

TEST_CASE("trim correctness: surviving velocities sit at or above the 10th percentile") {
    std::vector<RawRecord> records;
    for (int i = 0; i < 157; ++i) {
        const double t = 1e6 * (1.0 + 0.9 * std::sin(i * 2.13 + 0.4));
        records.push_back(rec(i, 2.0, 1e7, std::max(t, 1.0)));
    }
    PreprocessStats stats;
    const auto series = preprocess(records, test_asset(), &stats);

    // oracle: nearest-rank 10th percentile of the pre-trim velocities
    std::vector<double> vs;
    for (const auto& r : records)
        if (r.total_volume > 0) vs.push_back(r.total_volume / 1e7);
    std::sort(vs.begin(), vs.end());
    const std::size_t k = static_cast<std::size_t>(0.10 * static_cast<double>(vs.size()));
    const double threshold = vs[k];  // (k+1)-th order statistic
    CHECK(stats.trimmed_low_velocity == k);
    for (const auto& r : series.rows) CHECK(r.v >= vs[k == 0 ? 0 : k - 1]);
    const double min_kept =
        std::min_element(series.rows.begin(), series.rows.end(),
                         [](const auto& a, const auto& b) { return a.v < b.v; })
            ->v;
    CHECK(min_kept <= threshold + 1e-12);
}

TEST_CASE("serialize/parse round trip preserves numbers") {
    std::vector<RawRecord> records;
    for (int i = 0; i < 40; ++i)
        records.push_back(rec(i, 29374.15 + i * 0.37, 5.461e11 * (1 + 0.001 * i), 4.07e10 + i));
    const auto series = preprocess(records, test_asset());
    const std::string text = serialize_series_csv(series);
    const auto back = parse_series_csv(text, series.asset);
    REQUIRE(back.rows.size() == series.rows.size());
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        CHECK(back.rows[i].date == series.rows[i].date);
        CHECK(back.rows[i].price == series.rows[i].price);
        CHECK(back.rows[i].mc == series.rows[i].mc);
        CHECK(back.rows[i].t == series.rows[i].t);
        CHECK(back.rows[i].m == series.rows[i].m);
        CHECK(back.rows[i].v == series.rows[i].v);
        CHECK(back.rows[i].h == series.rows[i].h);
    }
}

TEST_CASE("load_series_file sniffs raw and normalized formats") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "eoelab_ingest_test";
    fs::create_directories(dir);

    std::vector<RawRecord> records;
    for (int i = 0; i < 30; ++i) records.push_back(rec(i, 2.0 + i, 100.0 * (i + 1), 50.0 * (i + 1)));
    const auto series = preprocess(records, test_asset());

    const auto norm_path = (dir / "norm.csv").string();
    write_file(norm_path, serialize_series_csv(series));
    const auto from_norm = load_series_file(norm_path, series.asset);
    CHECK(from_norm.rows.size() == series.rows.size());

    std::string raw = "snapped_at,price,market_cap,total_volume\n";
    for (int i = 0; i < 30; ++i) {
        raw += Date{i}.to_string() + " 00:00:00 UTC," + format_double(2.0 + i) + "," +
               format_double(100.0 * (i + 1)) + "," + format_double(50.0 * (i + 1)) + "\n";
    }
    const auto raw_path = (dir / "raw.csv").string();
    write_file(raw_path, raw);
    const auto from_raw = load_series_file(raw_path, series.asset);
    CHECK(from_raw.rows.size() == series.rows.size());
    fs::remove_all(dir);
}

TEST_CASE("asset id rules") {
    CHECK_THROWS_AS(AssetId::make("", AssetClass::cryptocurrency, true), Error);
    CHECK_THROWS_AS(AssetId::make("WAYTOOLONGNAME", AssetClass::cryptocurrency, true), Error);
    CHECK_THROWS_AS(AssetId::make("USDT", AssetClass::stablecoin, true), Error);
    const auto usdt = AssetId::with_defaults("USDT");
    CHECK(usdt.asset_class == AssetClass::stablecoin);
    CHECK_FALSE(usdt.is_medium_of_exchange);
    const auto btc = AssetId::with_defaults("BTC");
    CHECK(btc.is_medium_of_exchange);
    const auto other = AssetId::with_defaults("XYZ");
    CHECK(other.asset_class == AssetClass::cryptocurrency);
    CHECK(other.is_medium_of_exchange);
}

TEST_CASE("date conversions") {
    CHECK(Date::from_ymd(1970, 1, 1).days_since_epoch == 0);
    CHECK(Date::from_ymd(2021, 1, 1).to_string() == "2021-01-01");
    CHECK(Date::from_ymd(2020, 2, 29).to_string() == "2020-02-29");
    CHECK_THROWS_AS(Date::from_ymd(2021, 2, 29), Error);
    CHECK_THROWS_AS(Date::from_ymd(2021, 13, 1), Error);
    CHECK(Date::from_ymd(2021, 1, 2) > Date::from_ymd(2021, 1, 1));
}
