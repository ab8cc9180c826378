#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "eoelab/distfit.hpp"
#include "eoelab/errors.hpp"
#include "eoelab/svg.hpp"

using namespace eoelab;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

bool well_formed(const std::string& doc) {
    return doc.rfind("<svg ", 0) == 0 && doc.size() > 8 &&
           doc.substr(doc.size() - 7) == "</svg>\n";
}

}  // namespace

TEST_CASE("histogram chart renders bars and overlay deterministically") {
    const auto dist = distfit::FittedDistribution::lognormal(-2.5, 0.6);
    const auto samples = distfit::sample(dist, 400, 11);

    const auto doc = svg::histogram_chart(samples, 20, &dist, "velocity", "V", false);
    CHECK(well_formed(doc));
    CHECK(count_occurrences(doc, "<rect") > 5);  // background + bars
    CHECK(count_occurrences(doc, "<path") >= 2);  // axes + pdf curve
    CHECK(doc.find("velocity") != std::string::npos);
    CHECK(doc.find("density") != std::string::npos);

    CHECK(svg::histogram_chart(samples, 20, &dist, "velocity", "V", false) == doc);

    const auto no_overlay = svg::histogram_chart(samples, 20, nullptr, "velocity", "V", false);
    CHECK(well_formed(no_overlay));
    CHECK(no_overlay != doc);
}

TEST_CASE("log-axis histogram transforms and filters") {
    const auto dist = distfit::FittedDistribution::lognormal(0.0, 1.0);
    auto samples = distfit::sample(dist, 300, 5);

    const auto raw = svg::histogram_chart(samples, 15, &dist, "t", "x", false);
    const auto logged = svg::histogram_chart(samples, 15, &dist, "t", "ln(x)", true);
    CHECK(well_formed(logged));
    CHECK(raw != logged);

    // non-positive values only drop in log mode
    samples.push_back(-1.0);
    CHECK(well_formed(svg::histogram_chart(samples, 15, nullptr, "t", "ln(x)", true)));

    const std::vector<double> all_bad = {-1.0, 0.0};
    CHECK_THROWS_AS(svg::histogram_chart(all_bad, 10, nullptr, "t", "x", true), Error);
}

TEST_CASE("histogram chart input validation") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(svg::histogram_chart(empty, 10, nullptr, "t", "x", false), Error);

    const std::vector<double> some = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(svg::histogram_chart(some, 0, nullptr, "t", "x", false), Error);

    // a constant sample still renders (range is widened around the point)
    const std::vector<double> flat = {2.0, 2.0, 2.0};
    CHECK(well_formed(svg::histogram_chart(flat, 10, nullptr, "t", "x", false)));
}

TEST_CASE("qq chart plots one point per sample") {
    const auto dist = distfit::FittedDistribution::normal(1.0, 2.0);
    const auto samples = distfit::sample(dist, 57, 3);

    const auto doc = svg::qq_chart(samples, dist, "qq");
    CHECK(well_formed(doc));
    CHECK(count_occurrences(doc, "<circle") == 57);
    CHECK(doc.find("fitted quantiles") != std::string::npos);
    CHECK(doc.find("empirical quantiles") != std::string::npos);
    CHECK(svg::qq_chart(samples, dist, "qq") == doc);

    const std::vector<double> empty;
    CHECK_THROWS_AS(svg::qq_chart(empty, dist, "qq"), Error);
}

TEST_CASE("scatter chart") {
    const std::vector<double> actual = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> predicted = {1.1, 1.9, 3.2, 3.8};

    const auto doc = svg::scatter_chart(actual, predicted, "fit", "actual", "predicted");
    CHECK(well_formed(doc));
    CHECK(count_occurrences(doc, "<circle") == 4);
    CHECK(svg::scatter_chart(actual, predicted, "fit", "actual", "predicted") == doc);

    const std::vector<double> short_pred = {1.0};
    CHECK_THROWS_AS(svg::scatter_chart(actual, short_pred, "t", "x", "y"), Error);
    const std::vector<double> empty;
    CHECK_THROWS_AS(svg::scatter_chart(empty, empty, "t", "x", "y"), Error);
}

TEST_CASE("titles are escaped") {
    const std::vector<double> xs = {1.0, 2.0};
    const auto doc = svg::scatter_chart(xs, xs, "a < b & c", "x", "y");
    CHECK(doc.find("a &lt; b &amp; c") != std::string::npos);
    CHECK(doc.find("a < b & c") == std::string::npos);
}
