#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eoelab/asset.hpp"
#include "eoelab/preprocess.hpp"

namespace eoelab::ingest {

// Parses a CoinGecko-style daily export. Accepted headers:
//   snapped_at,price,market_cap,total_volume
//   date,price,market_cap,total_volume
// Dates come as YYYY-MM-DD or "YYYY-MM-DD HH:MM:SS UTC". Empty numeric
// fields read as 0 (CoinGecko leaves early market caps blank); they are
// dropped later by preprocessing. Output is sorted ascending by date.
std::vector<RawRecord> parse_asset_csv(std::string_view text, const AssetId& asset);

// Normalized per-asset series, header: date,price,MC,T,M,V,H. Numbers are
// written in shortest round-trip form so serialize -> parse is lossless.
std::string serialize_series_csv(const AssetSeries& series);
AssetSeries parse_series_csv(std::string_view text, const AssetId& asset);

// Reads a file that may be either format; raw exports are preprocessed
// first (see preprocess.hpp), normalized files load as-is (stats then just
// echo the row count).
AssetSeries load_series_file(const std::string& path, const AssetId& asset,
                             PreprocessStats* stats = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace eoelab::ingest
