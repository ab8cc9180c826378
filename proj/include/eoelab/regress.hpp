#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eoelab/econsim.hpp"
#include "eoelab/errors.hpp"

namespace eoelab::regress {

// ---------------------------------------------------------------------------
// model specification
// ---------------------------------------------------------------------------

enum class TransformKind { identity, power, log, log_power, inverse_power, lag_log };

// Single-argument feature transform. power/log_power/inverse_power carry an
// integer exponent; lag_log(1) takes the natural log of the previous row's
// value within the same group.
struct FeatureTransform {
    TransformKind kind = TransformKind::identity;
    int k = 1;

    static FeatureTransform identity() { return {TransformKind::identity, 1}; }
    static FeatureTransform power(int k);          // k >= 2
    static FeatureTransform log() { return {TransformKind::log, 1}; }
    static FeatureTransform log_power(int k);      // (ln x)^k, k >= 2
    static FeatureTransform inverse_power(int k);  // x^(-k), k >= 1
    static FeatureTransform lag_log() { return {TransformKind::lag_log, 1}; }

    bool is_lag() const { return kind == TransformKind::lag_log; }
    bool defined_at(double x) const;
    double value(double x) const;
    double derivative(double x) const;
    std::string term_name(const std::string& variable) const;
};

struct Feature {
    std::string variable;
    FeatureTransform transform;
};

struct ModelSpec {
    std::string response;
    bool log_response = false;
    std::vector<Feature> features;
    bool intercept = true;
};

// Column-oriented table. `groups` (optional, per row) scopes lag features so
// they never reach across asset boundaries; empty means one group.
struct DataTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<int> groups;

    std::size_t row_count() const { return columns.empty() ? 0 : columns[0].size(); }
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    void add_column(std::string name, std::vector<double> values);
};

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

struct FittedLinearModel {
    ModelSpec spec;
    std::vector<double> coefficients;  // intercept first when present
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::size_t n = 0;  // rows actually used after dropping undefined ones
    std::vector<double> residuals;
};

// Design matrix for spec over table, with rows dropped where any transform
// (or the log response) is undefined. X is row-major, ncols wide.
struct DesignMatrix {
    std::vector<double> X;
    std::vector<double> y;
    std::size_t ncols = 0;
    std::vector<std::size_t> rows;  // indices into the source table
};

DesignMatrix build_design(const ModelSpec& spec, const DataTable& table);

// Least squares via Householder QR (never normal equations). Throws
// RankDeficient when the design has a numerically collinear column.
std::vector<double> solve_least_squares(const std::vector<double>& X, const std::vector<double>& y,
                                        std::size_t ncols);

FittedLinearModel fit_ols(const ModelSpec& spec, const DataTable& table);

// Student-t CDF through the regularized incomplete beta.
double t_cdf(double t, double dof);

double adjusted_r2(double r2, std::size_t n, std::size_t p_non_intercept, bool intercept = true);

// ---------------------------------------------------------------------------
// range analysis and the velocity model zoo
// ---------------------------------------------------------------------------

enum class DerivativeSign { increasing, decreasing, mixed };

struct Interval {
    double lo;  // -inf allowed
    double hi;  // +inf allowed
};

struct RangeAnalysis {
    std::vector<Interval> positivity;  // where predicted V > 0, ascending
    bool monotonic = false;
    DerivativeSign sign = DerivativeSign::mixed;
    bool constant = false;  // identically-zero derivative (intercept-only)
    std::string label;      // e.g. "H < 47.384", "All H", intervals joined by " or "
};

// Predicted response and its derivative for models in a single variable.
double evaluate_single(const FittedLinearModel& model, double x);
double derivative_single(const FittedLinearModel& model, double x);

// Positivity range and monotonicity of a single-variable model. Polynomial
// specs are analyzed over all reals, log/inverse specs over x > 0; the
// numeric search window is |x| <= 1e6 and grid edges count as unbounded.
RangeAnalysis analyze_range(const FittedLinearModel& model);

struct ZooEntry {
    FittedLinearModel model;
    RangeAnalysis range;
    std::string equation;  // coefficients to 5 decimals
    std::string remarks;   // auto-generated; empty when clean
    bool admissible = false;
};

struct ZooResult {
    std::vector<ZooEntry> entries;  // fixed ten-spec order
    std::size_t selected = 0;       // index into entries
    bool fallback = false;          // no admissible model; best adj_r2 used
};

// The ten velocity-vs-holding-time specifications, fitted in a fixed order.
// Selection: highest adj_r2 among models whose coefficients are all
// significant at 5%, monotonic, and positive for all H > 0. When nothing
// qualifies the best adj_r2 overall is selected and flagged.
ZooResult velocity_model_zoo(const econsim::RegressionDataset& dataset);

std::vector<ModelSpec> zoo_specs();

}  // namespace eoelab::regress
