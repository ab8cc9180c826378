#include "eoelab/asset.hpp"

#include <array>
#include <cstdio>

namespace eoelab::ingest {

const char* asset_class_name(AssetClass c) {
    switch (c) {
        case AssetClass::cryptocurrency: return "cryptocurrency";
        case AssetClass::exchange_token: return "exchange_token";
        case AssetClass::defi_token: return "defi_token";
        case AssetClass::smart_contract_token: return "smart_contract_token";
        case AssetClass::oracle_token: return "oracle_token";
        case AssetClass::stablecoin: return "stablecoin";
    }
    return "cryptocurrency";
}

AssetClass asset_class_from_name(const std::string& name) {
    if (name == "cryptocurrency") return AssetClass::cryptocurrency;
    if (name == "exchange_token") return AssetClass::exchange_token;
    if (name == "defi_token") return AssetClass::defi_token;
    if (name == "smart_contract_token") return AssetClass::smart_contract_token;
    if (name == "oracle_token") return AssetClass::oracle_token;
    if (name == "stablecoin") return AssetClass::stablecoin;
    raise(errc::invalid_argument, "unknown asset class '" + name + "'");
}

AssetId AssetId::make(std::string ticker, AssetClass cls, bool medium_of_exchange) {
    if (ticker.empty() || ticker.size() > 12)
        raise(errc::invalid_argument, "ticker must be 1..12 characters, got '" + ticker + "'");
    if (cls == AssetClass::stablecoin && medium_of_exchange)
        raise(errc::invalid_argument,
              "stablecoin '" + ticker + "' cannot be a medium of exchange");
    return AssetId{std::move(ticker), cls, medium_of_exchange};
}

AssetId AssetId::with_defaults(const std::string& ticker) {
    if (ticker == "BTC" || ticker == "ETH")
        return make(ticker, AssetClass::cryptocurrency, true);
    if (ticker == "BNB") return make(ticker, AssetClass::exchange_token, true);
    if (ticker == "CRV" || ticker == "UNI") return make(ticker, AssetClass::defi_token, true);
    if (ticker == "DOT") return make(ticker, AssetClass::smart_contract_token, true);
    if (ticker == "LINK") return make(ticker, AssetClass::oracle_token, true);
    if (ticker == "USDT") return make(ticker, AssetClass::stablecoin, false);
    return make(ticker, AssetClass::cryptocurrency, true);
}

namespace {

constexpr bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr int days_in_month(int y, int m) {
    constexpr std::array<int, 12> d = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

// civil <-> day count conversions (Howard Hinnant's algorithm)
constexpr std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yr + (m <= 2);
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        raise(errc::invalid_argument, "invalid calendar date");
    return Date{days_from_civil(year, month, day)};
}

std::string Date::to_string() const {
    int y, m, d;
    civil_from_days(days_since_epoch, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

std::vector<double> AssetSeries::column(const std::string& name) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (name == "price") out.push_back(r.price);
        else if (name == "MC") out.push_back(r.mc);
        else if (name == "T") out.push_back(r.t);
        else if (name == "M") out.push_back(r.m);
        else if (name == "V") out.push_back(r.v);
        else if (name == "H") out.push_back(r.h);
        else raise(errc::invalid_argument, "unknown column '" + name + "'");
    }
    return out;
}

}  // namespace eoelab::ingest
