#pragma once

#include <stdexcept>
#include <string>

namespace eoelab {

// Every recoverable failure in the toolkit carries one of these codes so
// callers (and the CLI exit-code mapping) can react without string matching.
enum class errc {
    malformed_header,
    malformed_row,
    duplicate_date,
    empty_after_filter,
    unsupported_support,
    non_convergence,
    degenerate_sample,
    all_families_failed,
    non_positive_draw,
    empty_after_exclusion,
    rank_deficient,
    insufficient_data,
    no_positive_region,
    outside_valid_range,
    missing_stage,
    invalid_argument,
    io_error,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::malformed_header: return "MalformedHeader";
        case errc::malformed_row: return "MalformedRow";
        case errc::duplicate_date: return "DuplicateDate";
        case errc::empty_after_filter: return "EmptyAfterFilter";
        case errc::unsupported_support: return "UnsupportedSupport";
        case errc::non_convergence: return "NonConvergence";
        case errc::degenerate_sample: return "DegenerateSample";
        case errc::all_families_failed: return "AllFamiliesFailed";
        case errc::non_positive_draw: return "NonPositiveDraw";
        case errc::empty_after_exclusion: return "EmptyAfterExclusion";
        case errc::rank_deficient: return "RankDeficient";
        case errc::insufficient_data: return "InsufficientData";
        case errc::no_positive_region: return "NoPositiveRegion";
        case errc::outside_valid_range: return "OutsideValidRange";
        case errc::missing_stage: return "MissingStage";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::io_error: return "IoError";
    }
    return "Unknown";
}

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, std::string(errc_name(code)) + ": " + message);
}

}  // namespace eoelab
