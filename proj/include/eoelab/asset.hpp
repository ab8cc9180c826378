#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoelab/errors.hpp"

namespace eoelab::ingest {

enum class AssetClass {
    cryptocurrency,
    exchange_token,
    defi_token,
    smart_contract_token,
    oracle_token,
    stablecoin,
};

const char* asset_class_name(AssetClass c);
AssetClass asset_class_from_name(const std::string& name);

struct AssetId {
    std::string ticker;
    AssetClass asset_class = AssetClass::cryptocurrency;
    bool is_medium_of_exchange = true;

    // Throws on empty/oversized tickers and on a stablecoin marked as a
    // medium of exchange (stablecoins are stores of value here).
    static AssetId make(std::string ticker, AssetClass cls, bool medium_of_exchange);

    // Class and medium-of-exchange defaults for the well-known tickers
    // (BTC, ETH, BNB, CRV, UNI, DOT, LINK, USDT); anything else is treated
    // as a plain medium-of-exchange cryptocurrency.
    static AssetId with_defaults(const std::string& ticker);
};

// Calendar date, UTC midnight. Stored as a count of days since 1970-01-01
// so ordering and formatting stay trivial.
struct Date {
    std::int32_t days_since_epoch = 0;

    static Date from_ymd(int year, int month, int day);
    std::string to_string() const;  // YYYY-MM-DD

    auto operator<=>(const Date&) const = default;
};

struct RawRecord {
    Date date;
    double price = 0.0;       // USD per token
    double market_cap = 0.0;  // USD
    double total_volume = 0.0;  // USD per day
};

struct SeriesRow {
    Date date;
    double price = 0.0;  // USD per token
    double mc = 0.0;     // market cap, USD
    double t = 0.0;      // daily transaction volume, USD
    double m = 0.0;      // token supply = mc / price
    double v = 0.0;      // daily velocity = t / mc
    double h = 0.0;      // holding time in days = mc / t
};

struct AssetSeries {
    AssetId asset;
    std::vector<SeriesRow> rows;

    std::vector<double> column(const std::string& name) const;  // "price"|"MC"|"T"|"M"|"V"|"H"
};

}  // namespace eoelab::ingest
