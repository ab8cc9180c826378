#include "eoelab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eoelab/preprocess.hpp"

namespace eoelab::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line_no, const char* what) {
    if (field.empty()) return 0.0;  // missing value, filtered in preprocessing
    double value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        raise(errc::malformed_row, std::string("line ") + std::to_string(line_no) +
                                       ": non-numeric " + what + " '" + std::string(field) + "'");
    if (value < 0.0)
        raise(errc::malformed_row, std::string("line ") + std::to_string(line_no) +
                                       ": negative " + what);
    return value;
}

int parse_int_field(std::string_view s, std::size_t line_no) {
    int value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        raise(errc::malformed_row,
              "line " + std::to_string(line_no) + ": bad date component '" + std::string(s) + "'");
    return value;
}

// YYYY-MM-DD with optional " HH:MM:SS UTC" tail.
Date parse_date(std::string_view field, std::size_t line_no) {
    std::string_view date_part = field.substr(0, field.find(' '));
    if (date_part.size() != 10 || date_part[4] != '-' || date_part[7] != '-')
        raise(errc::malformed_row,
              "line " + std::to_string(line_no) + ": bad date '" + std::string(field) + "'");
    const int y = parse_int_field(date_part.substr(0, 4), line_no);
    const int m = parse_int_field(date_part.substr(5, 2), line_no);
    const int d = parse_int_field(date_part.substr(8, 2), line_no);
    if (field.size() > 10) {
        std::string_view tail = trim(field.substr(10));
        const bool ok = tail.size() == 12 && tail.substr(8) == " UTC" && tail[2] == ':' && tail[5] == ':';
        if (!ok)
            raise(errc::malformed_row,
                  "line " + std::to_string(line_no) + ": bad date suffix '" + std::string(field) + "'");
    }
    try {
        return Date::from_ymd(y, m, d);
    } catch (const Error&) {
        raise(errc::malformed_row,
              "line " + std::to_string(line_no) + ": invalid date '" + std::string(field) + "'");
    }
}

struct LineReader {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    bool next(std::string_view& line) {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            line = trim(text.substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (!line.empty()) return true;
        }
        return false;
    }
};

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<RawRecord> parse_asset_csv(std::string_view text, const AssetId& asset) {
    LineReader reader{text};
    std::string_view header;
    if (!reader.next(header))
        raise(errc::malformed_header, asset.ticker + ": empty input");

    const auto cols = split_line(header);
    const bool coingecko = cols.size() == 4 && cols[0] == "snapped_at" && cols[1] == "price" &&
                           cols[2] == "market_cap" && cols[3] == "total_volume";
    const bool plain = cols.size() == 4 && cols[0] == "date" && cols[1] == "price" &&
                       cols[2] == "market_cap" && cols[3] == "total_volume";
    if (!coingecko && !plain)
        raise(errc::malformed_header,
              asset.ticker + ": unrecognized column set '" + std::string(header) + "'");

    std::vector<RawRecord> records;
    std::string_view line;
    while (reader.next(line)) {
        const auto fields = split_line(line);
        if (fields.size() != 4)
            raise(errc::malformed_row, "line " + std::to_string(reader.line_no) + ": expected 4 fields, got " +
                                           std::to_string(fields.size()));
        RawRecord rec;
        rec.date = parse_date(fields[0], reader.line_no);
        rec.price = parse_number(fields[1], reader.line_no, "price");
        rec.market_cap = parse_number(fields[2], reader.line_no, "market_cap");
        rec.total_volume = parse_number(fields[3], reader.line_no, "total_volume");
        records.push_back(rec);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].date == records[i - 1].date)
            raise(errc::duplicate_date,
                  asset.ticker + ": date " + records[i].date.to_string() + " appears twice");
    return records;
}

std::string serialize_series_csv(const AssetSeries& series) {
    std::string out = "date,price,MC,T,M,V,H\n";
    for (const auto& r : series.rows) {
        out += r.date.to_string();
        out += ',';
        out += format_double(r.price);
        out += ',';
        out += format_double(r.mc);
        out += ',';
        out += format_double(r.t);
        out += ',';
        out += format_double(r.m);
        out += ',';
        out += format_double(r.v);
        out += ',';
        out += format_double(r.h);
        out += '\n';
    }
    return out;
}

AssetSeries parse_series_csv(std::string_view text, const AssetId& asset) {
    LineReader reader{text};
    std::string_view header;
    if (!reader.next(header))
        raise(errc::malformed_header, asset.ticker + ": empty input");
    if (trim(header) != "date,price,MC,T,M,V,H")
        raise(errc::malformed_header,
              asset.ticker + ": expected normalized header, got '" + std::string(header) + "'");

    AssetSeries series{asset, {}};
    std::string_view line;
    while (reader.next(line)) {
        const auto fields = split_line(line);
        if (fields.size() != 7)
            raise(errc::malformed_row, "line " + std::to_string(reader.line_no) + ": expected 7 fields");
        SeriesRow row;
        row.date = parse_date(fields[0], reader.line_no);
        row.price = parse_number(fields[1], reader.line_no, "price");
        row.mc = parse_number(fields[2], reader.line_no, "MC");
        row.t = parse_number(fields[3], reader.line_no, "T");
        row.m = parse_number(fields[4], reader.line_no, "M");
        row.v = parse_number(fields[5], reader.line_no, "V");
        row.h = parse_number(fields[6], reader.line_no, "H");
        series.rows.push_back(row);
    }
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        if (series.rows[i].date == series.rows[i - 1].date)
            raise(errc::duplicate_date,
                  asset.ticker + ": date " + series.rows[i].date.to_string() + " appears twice");
        if (series.rows[i].date < series.rows[i - 1].date)
            raise(errc::malformed_row, asset.ticker + ": normalized series must be date-sorted");
    }
    return series;
}

AssetSeries load_series_file(const std::string& path, const AssetId& asset,
                             PreprocessStats* stats) {
    const std::string text = read_file(path);
    const std::size_t eol = text.find('\n');
    const std::string_view header = trim(std::string_view(text).substr(0, eol));
    if (header == "date,price,MC,T,M,V,H") {
        AssetSeries series = parse_series_csv(text, asset);
        if (stats) *stats = {series.rows.size(), 0, 0, series.rows.size()};
        return series;
    }
    return preprocess(parse_asset_csv(text, asset), asset, stats);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) raise(errc::io_error, "short write to '" + path + "'");
}

}  // namespace eoelab::ingest
