#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoelab/asset.hpp"
#include "eoelab/regress.hpp"

namespace eoelab::eoe {

using ingest::AssetId;
using ingest::AssetSeries;

// Pooled per-day rows across assets: columns price, T, M, V, H; groups map
// each row to its asset so lag features stay within one asset.
struct PooledTable {
    regress::DataTable table;
    std::vector<std::string> assets;  // ticker per group id
};

// Drops non-medium-of-exchange assets and concatenates the rest.
PooledTable pool_series(const std::vector<AssetSeries>& all);

// Velocity predicted from H by the selected velocity model, and the holding
// time implied by inverting it at the observed V. Rows where either falls
// outside the model's valid range are flagged and carry NaN, never dropped.
struct DerivedSeries {
    AssetSeries series;
    std::vector<double> v_derived;
    std::vector<double> h_derived;
    std::vector<bool> outside_range;
    std::size_t flagged_count = 0;
};

DerivedSeries derive_columns(const AssetSeries& series, const regress::FittedLinearModel& vmodel);

// As pool_series plus a V_derived column (NaN rows drop out of any fit that
// logs the column).
PooledTable pool_derived(const std::vector<DerivedSeries>& all);

// ln(price) = c0 + cT ln T + cM ln M + cV ln(1/V); c0 omitted when fitted
// without intercept.
struct EoEModel {
    regress::FittedLinearModel fit;
    bool use_derived = false;
    std::vector<std::string> fitted_on;
};

EoEModel fit_eoe(const PooledTable& pooled, bool use_derived, bool intercept = true);

double predict_price(const EoEModel& model, double t_volume, double m_supply, double velocity);

// One-step-ahead model: ln price on {ln T, ln M, ln V, ln price_(t-1)} with
// intercept; each asset's first row has no lag and is never a target.
struct LookaheadModel {
    regress::FittedLinearModel fit;
};

regress::ModelSpec lookahead_spec();
LookaheadModel fit_lookahead(const PooledTable& pooled);

enum class CvDomain { price, log_price };

struct FoldMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;  // NaN for size-1 folds, excluded from the aggregate
};

struct CVReport {
    int k = 0;
    std::vector<FoldMetrics> per_fold;
    double mean_mae = 0.0;
    double mean_rmse = 0.0;
    double mean_r2 = 0.0;
    std::uint64_t seed = 0;
    CvDomain domain = CvDomain::price;
    bool block = false;
    std::size_t r2_excluded_folds = 0;
};

// Fold membership for k-fold CV over n rows: a seeded shuffle split into k
// near-equal slices (first n mod k folds get the extra row), or contiguous
// blocks in row order when block = true. Folds partition 0..n-1.
std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, int k, std::uint64_t seed,
                                               bool block);

// k-fold CV of spec over pooled rows. Folds come from cv_folds; MAE/RMSE are
// always in USD price, R^2 in the domain given by the flag.
CVReport cross_validate(const regress::ModelSpec& spec, const PooledTable& pooled, int k = 20,
                        std::uint64_t seed = 0, bool block = false,
                        CvDomain domain = CvDomain::price);

}  // namespace eoelab::eoe
