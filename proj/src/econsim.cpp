#include "eoelab/econsim.hpp"

#include <algorithm>
#include <cmath>

#include "eoelab/csv.hpp"
#include "eoelab/rng.hpp"

namespace eoelab::econsim {

EconomySample economy_from_velocities(std::span<const double> velocities, const AssetId& asset) {
    if (velocities.empty()) raise(errc::invalid_argument, "economy needs at least one token");
    double sum_v = 0.0;
    double sum_h = 0.0;
    for (double v : velocities) {
        if (!(v > 0.0))
            raise(errc::non_positive_draw,
                  "token velocity " + std::to_string(v) + " is not positive");
        sum_v += v;
        sum_h += 1.0 / v;
    }
    const double n = static_cast<double>(velocities.size());
    return {sum_v / n, sum_h / n, asset};
}

EconomySample simulate_economy(const distfit::FittedDistribution& dist, int n_tokens,
                               std::uint64_t seed, const AssetId& asset) {
    if (n_tokens < 2) raise(errc::invalid_argument, "tokens_per_economy must be >= 2");
    const auto velocities = distfit::sample(dist, static_cast<std::size_t>(n_tokens), seed);
    return economy_from_velocities(velocities, asset);
}

std::vector<EconomySample> simulate_batch(const distfit::FittedDistribution& dist,
                                          const SimulationConfig& config, const AssetId& asset) {
    if (config.economies_per_distribution < 1)
        raise(errc::invalid_argument, "economies_per_distribution must be >= 1");
    std::vector<EconomySample> out;
    out.reserve(static_cast<std::size_t>(config.economies_per_distribution));
    for (int i = 0; i < config.economies_per_distribution; ++i) {
        const std::uint64_t sub_seed =
            rng::derive_stream_seed(config.seed, static_cast<std::uint64_t>(i));
        out.push_back(simulate_economy(dist, config.tokens_per_economy, sub_seed, asset));
    }
    return out;
}

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const double pos = 1.0 + p * (static_cast<double>(sorted.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(pos) - 1;
    const double frac = pos - std::floor(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<bool> iqr_filter(std::span<const double> values) {
    if (values.size() < 4) raise(errc::invalid_argument, "iqr_filter needs at least 4 values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double q1 = interpolated_quantile(sorted, 0.25);
    const double q3 = interpolated_quantile(sorted, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr;
    const double hi = q3 + 1.5 * iqr;
    std::vector<bool> keep(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) keep[i] = values[i] >= lo && values[i] <= hi;
    return keep;
}

RegressionDataset build_regression_dataset(
    const std::vector<std::pair<AssetId, std::vector<EconomySample>>>& batches) {
    RegressionDataset out;
    std::vector<EconomySample> combined;
    for (const auto& [asset, samples] : batches) {
        if (!asset.is_medium_of_exchange) {
            out.excluded_assets.push_back(asset);
            continue;
        }
        combined.insert(combined.end(), samples.begin(), samples.end());
    }
    if (combined.empty())
        raise(errc::empty_after_exclusion, "no medium-of-exchange batches to combine");

    if (combined.size() < 4) {
        out.points = std::move(combined);
        return out;
    }

    std::vector<double> vs(combined.size());
    std::vector<double> hs(combined.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        vs[i] = combined[i].mean_velocity;
        hs[i] = combined[i].mean_holding_time;
    }
    const auto keep_v = iqr_filter(vs);
    const auto keep_h = iqr_filter(hs);
    for (std::size_t i = 0; i < combined.size(); ++i) {
        if (keep_v[i] && keep_h[i])
            out.points.push_back(combined[i]);
        else
            ++out.iqr_removed_count;
    }
    return out;
}

std::string serialize_dataset_csv(const RegressionDataset& dataset) {
    std::string out = "asset,mean_V,mean_H\n";
    for (const auto& p : dataset.points) {
        out += p.source_asset.ticker;
        out += ',';
        out += ingest::format_double(p.mean_velocity);
        out += ',';
        out += ingest::format_double(p.mean_holding_time);
        out += '\n';
    }
    return out;
}

RegressionDataset parse_dataset_csv(std::string_view text) {
    RegressionDataset out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (line.empty()) continue;
        ++line_no;
        if (!saw_header) {
            if (line != "asset,mean_V,mean_H")
                raise(errc::malformed_header, "expected 'asset,mean_V,mean_H'");
            saw_header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos)
            raise(errc::malformed_row, "line " + std::to_string(line_no) + ": expected 3 fields");
        EconomySample s;
        s.source_asset = AssetId::with_defaults(std::string(line.substr(0, c1)));
        try {
            s.mean_velocity = std::stod(std::string(line.substr(c1 + 1, c2 - c1 - 1)));
            s.mean_holding_time = std::stod(std::string(line.substr(c2 + 1)));
        } catch (const std::exception&) {
            raise(errc::malformed_row, "line " + std::to_string(line_no) + ": bad number");
        }
        out.points.push_back(std::move(s));
    }
    if (!saw_header) raise(errc::malformed_header, "empty dataset file");
    return out;
}

}  // namespace eoelab::econsim
