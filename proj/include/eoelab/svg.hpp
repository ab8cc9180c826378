#pragma once

#include <span>
#include <string>

#include "eoelab/distfit.hpp"

namespace eoelab::svg {

// Standalone fixed-size SVG documents. Every number is printed through
// snprintf with a fixed precision, so identical inputs give identical bytes.

// Density histogram with an optional fitted-pdf overlay. log_x plots the
// natural log of the samples and transforms the overlay density to match;
// non-positive samples are skipped in that mode.
std::string histogram_chart(std::span<const double> samples, int bin_count,
                            const distfit::FittedDistribution* overlay, const std::string& title,
                            const std::string& x_label, bool log_x);

// Empirical quantiles (sorted samples) against fitted quantiles at
// probabilities k/(n+1), k = 1..n, with a y = x reference line.
std::string qq_chart(std::span<const double> samples, const distfit::FittedDistribution& dist,
                     const std::string& title);

// Predicted-vs-actual scatter with a y = x reference line.
std::string scatter_chart(std::span<const double> actual, std::span<const double> predicted,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label);

}  // namespace eoelab::svg
