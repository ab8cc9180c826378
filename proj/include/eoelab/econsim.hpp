#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eoelab/asset.hpp"
#include "eoelab/distfit.hpp"

namespace eoelab::econsim {

using ingest::AssetId;

struct SimulationConfig {
    int tokens_per_economy = 100;
    int economies_per_distribution = 1000;
    std::uint64_t seed = 0;
};

// One synthetic economy: per-token velocities drawn from a fitted
// distribution, holding time per token is the reciprocal. The two means are
// tracked separately because mean(1/v) >= 1/mean(v) (Jensen), which is the
// whole point of the exercise.
struct EconomySample {
    double mean_velocity = 0.0;
    double mean_holding_time = 0.0;
    AssetId source_asset;
};

struct RegressionDataset {
    std::vector<EconomySample> points;
    std::vector<AssetId> excluded_assets;
    std::size_t iqr_removed_count = 0;
};

// Test hook: build a sample from explicit per-token velocities.
EconomySample economy_from_velocities(std::span<const double> velocities, const AssetId& asset);

// Draws n_tokens velocities from dist (must have positive support; a draw
// <= 0 raises NonPositiveDraw).
EconomySample simulate_economy(const distfit::FittedDistribution& dist, int n_tokens,
                               std::uint64_t seed, const AssetId& asset);

// economies_per_distribution independent economies; economy i is seeded from
// (config.seed, i) so the batch is reproducible and order-independent.
std::vector<EconomySample> simulate_batch(const distfit::FittedDistribution& dist,
                                          const SimulationConfig& config, const AssetId& asset);

// Keep-mask under the 1.5 IQR rule. Quartiles use linear interpolation
// between order statistics (position 1 + p*(n-1)). Requires length >= 4.
std::vector<bool> iqr_filter(std::span<const double> values);

// Drops batches from assets that are not a medium of exchange, concatenates
// the rest, and removes points outside the IQR fences on either coordinate.
RegressionDataset build_regression_dataset(
    const std::vector<std::pair<AssetId, std::vector<EconomySample>>>& batches);

// CSV body: header "asset,mean_V,mean_H", one row per point.
std::string serialize_dataset_csv(const RegressionDataset& dataset);
RegressionDataset parse_dataset_csv(std::string_view text);

}  // namespace eoelab::econsim
