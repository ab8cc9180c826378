#include "eoelab/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eoelab::ingest {

AssetSeries preprocess(const std::vector<RawRecord>& records, const AssetId& asset,
                       PreprocessStats* stats) {
    PreprocessStats local;
    local.rows_in = records.size();
    if (records.empty())
        raise(errc::empty_after_filter, asset.ticker + ": empty input");

    std::vector<SeriesRow> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        if (!(rec.price > 0.0) || !(rec.market_cap > 0.0) || !(rec.total_volume > 0.0)) {
            ++local.dropped_non_positive;
            continue;
        }
        SeriesRow row;
        row.date = rec.date;
        row.price = rec.price;
        row.mc = rec.market_cap;
        row.t = rec.total_volume;
        row.m = rec.market_cap / rec.price;
        row.v = rec.total_volume / rec.market_cap;
        row.h = rec.market_cap / rec.total_volume;
        rows.push_back(row);
    }
    if (rows.empty())
        raise(errc::empty_after_filter, asset.ticker + ": no usable rows after positivity filter");

    // Bottom-10% velocity trim. Sorting ascending by (V, date) and cutting
    // the first k means ties at the cutoff keep the later date.
    const std::size_t k = static_cast<std::size_t>(std::floor(0.10 * static_cast<double>(rows.size())));
    if (k > 0) {
        std::vector<std::size_t> order(rows.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (rows[a].v != rows[b].v) return rows[a].v < rows[b].v;
            return rows[a].date < rows[b].date;
        });
        std::vector<bool> drop(rows.size(), false);
        for (std::size_t i = 0; i < k; ++i) drop[order[i]] = true;
        std::vector<SeriesRow> kept;
        kept.reserve(rows.size() - k);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!drop[i]) kept.push_back(rows[i]);
        rows = std::move(kept);
        local.trimmed_low_velocity = k;
    }
    if (rows.empty())
        raise(errc::empty_after_filter, asset.ticker + ": nothing left after velocity trim");

    std::sort(rows.begin(), rows.end(),
              [](const SeriesRow& a, const SeriesRow& b) { return a.date < b.date; });

    local.rows_out = rows.size();
    if (stats) *stats = local;
    return AssetSeries{asset, std::move(rows)};
}

}  // namespace eoelab::ingest
