#pragma once

#include <vector>

#include "eoelab/asset.hpp"

namespace eoelab::ingest {

struct PreprocessStats {
    std::size_t rows_in = 0;
    std::size_t dropped_non_positive = 0;
    std::size_t trimmed_low_velocity = 0;
    std::size_t rows_out = 0;
};

// Turns raw records into a usable series:
//   1. drop rows with any of price, MC, T <= 0 (V and H are undefined there)
//   2. compute M = MC/price, V = T/MC, H = MC/T
//   3. trim the floor(0.10 * n) lowest-velocity rows; velocity ties keep
//      the later date
//   4. sort by date
// Throws EmptyAfterFilter when nothing survives.
AssetSeries preprocess(const std::vector<RawRecord>& records, const AssetId& asset,
                       PreprocessStats* stats = nullptr);

}  // namespace eoelab::ingest
