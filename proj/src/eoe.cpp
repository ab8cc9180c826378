#include "eoelab/eoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eoelab/rng.hpp"

namespace eoelab::eoe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSearchFloor = 1e-9;
constexpr double kSearchLimit = 1e6;

void append_series(PooledTable& out, const AssetSeries& s, const std::vector<double>* v_derived) {
    const int group = static_cast<int>(out.assets.size());
    out.assets.push_back(s.asset.ticker);
    auto& cols = out.table.columns;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const auto& r = s.rows[i];
        cols[0].push_back(r.price);
        cols[1].push_back(r.t);
        cols[2].push_back(r.m);
        cols[3].push_back(r.v);
        cols[4].push_back(r.h);
        if (v_derived) cols[5].push_back((*v_derived)[i]);
        out.table.groups.push_back(group);
    }
}

PooledTable make_pooled(bool with_derived) {
    PooledTable out;
    out.table.names = {"price", "T", "M", "V", "H"};
    out.table.columns.resize(5);
    if (with_derived) {
        out.table.names.push_back("V_derived");
        out.table.columns.resize(6);
    }
    return out;
}

}  // namespace

PooledTable pool_series(const std::vector<AssetSeries>& all) {
    PooledTable out = make_pooled(false);
    for (const auto& s : all) {
        if (!s.asset.is_medium_of_exchange) continue;
        append_series(out, s, nullptr);
    }
    if (out.table.row_count() == 0)
        raise(errc::empty_after_exclusion, "no medium-of-exchange series to pool");
    return out;
}

PooledTable pool_derived(const std::vector<DerivedSeries>& all) {
    PooledTable out = make_pooled(true);
    for (const auto& d : all) {
        if (!d.series.asset.is_medium_of_exchange) continue;
        append_series(out, d.series, &d.v_derived);
    }
    if (out.table.row_count() == 0)
        raise(errc::empty_after_exclusion, "no medium-of-exchange series to pool");
    return out;
}

namespace {

bool inside_positivity(const regress::RangeAnalysis& range, double h) {
    for (const auto& iv : range.positivity)
        if (h > iv.lo && h < iv.hi) return true;
    return false;
}

// Inverts v = model(h) for h inside one positivity interval; the model is
// monotonic there, so a sign change brackets exactly one root.
double invert_by_bisection(const regress::FittedLinearModel& model,
                           const regress::RangeAnalysis& range, double v) {
    for (const auto& iv : range.positivity) {
        double lo = std::max(iv.lo, kSearchFloor);
        double hi = std::isinf(iv.hi) ? kSearchLimit : iv.hi;
        if (!(lo < hi)) continue;
        // nudge off the exact boundary where the prediction is ~0
        const double span = hi - lo;
        lo += 1e-12 * span;
        hi -= 1e-12 * span;
        double flo = regress::evaluate_single(model, lo) - v;
        double fhi = regress::evaluate_single(model, hi) - v;
        if (std::isnan(flo) || std::isnan(fhi)) continue;
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        if ((flo < 0.0) == (fhi < 0.0)) continue;
        for (int i = 0; i < 300; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            const double fm = regress::evaluate_single(model, mid) - v;
            if (fm == 0.0) return mid;
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    return kNaN;
}

}  // namespace

DerivedSeries derive_columns(const AssetSeries& series, const regress::FittedLinearModel& vmodel) {
    const regress::RangeAnalysis range = regress::analyze_range(vmodel);

    // default inverse model V = a + b/H inverts in closed form
    const bool closed_form = vmodel.spec.intercept && vmodel.spec.features.size() == 1 &&
                             vmodel.spec.features[0].transform.kind ==
                                 regress::TransformKind::inverse_power &&
                             vmodel.spec.features[0].transform.k == 1;

    DerivedSeries out;
    out.series = series;
    out.v_derived.resize(series.rows.size(), kNaN);
    out.h_derived.resize(series.rows.size(), kNaN);
    out.outside_range.assign(series.rows.size(), false);

    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const double h_obs = series.rows[i].h;
        const double v_obs = series.rows[i].v;
        bool flagged = false;

        if (inside_positivity(range, h_obs)) {
            out.v_derived[i] = regress::evaluate_single(vmodel, h_obs);
        } else {
            flagged = true;
        }

        double h_inv = kNaN;
        if (closed_form) {
            const double a = vmodel.coefficients[0];
            const double b = vmodel.coefficients[1];
            const double denom = v_obs - a;
            if (denom != 0.0) {
                const double h = b / denom;
                if (h > 0.0 && inside_positivity(range, h)) h_inv = h;
            }
        } else {
            h_inv = invert_by_bisection(vmodel, range, v_obs);
        }
        if (std::isnan(h_inv))
            flagged = true;
        else
            out.h_derived[i] = h_inv;

        out.outside_range[i] = flagged;
        if (flagged) ++out.flagged_count;
    }
    return out;
}

EoEModel fit_eoe(const PooledTable& pooled, bool use_derived, bool intercept) {
    if (pooled.table.row_count() < 100)
        raise(errc::insufficient_data, "EoE fit needs at least 100 pooled rows");
    const std::string v_column = use_derived ? "V_derived" : "V";
    const auto& v = pooled.table.column(v_column);

    regress::DataTable table = pooled.table;
    std::vector<double> inv_v(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) inv_v[i] = v[i] > 0.0 ? 1.0 / v[i] : kNaN;
    table.add_column("inv_V", std::move(inv_v));

    regress::ModelSpec spec;
    spec.response = "price";
    spec.log_response = true;
    spec.intercept = intercept;
    spec.features = {{"T", regress::FeatureTransform::log()},
                     {"M", regress::FeatureTransform::log()},
                     {"inv_V", regress::FeatureTransform::log()}};

    EoEModel model;
    model.fit = regress::fit_ols(spec, table);
    model.use_derived = use_derived;
    model.fitted_on = pooled.assets;
    return model;
}

double predict_price(const EoEModel& model, double t_volume, double m_supply, double velocity) {
    if (!(t_volume > 0.0) || !(m_supply > 0.0) || !(velocity > 0.0))
        raise(errc::invalid_argument, "predict_price needs T, M, V > 0");
    std::size_t j = 0;
    double lp = model.fit.spec.intercept ? model.fit.coefficients[j++] : 0.0;
    lp += model.fit.coefficients[j++] * std::log(t_volume);
    lp += model.fit.coefficients[j++] * std::log(m_supply);
    lp += model.fit.coefficients[j++] * std::log(1.0 / velocity);
    return std::exp(lp);
}

regress::ModelSpec lookahead_spec() {
    regress::ModelSpec spec;
    spec.response = "price";
    spec.log_response = true;
    spec.intercept = true;
    spec.features = {{"T", regress::FeatureTransform::log()},
                     {"M", regress::FeatureTransform::log()},
                     {"V", regress::FeatureTransform::log()},
                     {"price", regress::FeatureTransform::lag_log()}};
    return spec;
}

LookaheadModel fit_lookahead(const PooledTable& pooled) {
    return {regress::fit_ols(lookahead_spec(), pooled.table)};
}

std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, int k, std::uint64_t seed,
                                               bool block) {
    if (k < 2) raise(errc::invalid_argument, "cross-validation needs k >= 2");
    if (n < static_cast<std::size_t>(k))
        raise(errc::insufficient_data, "fewer rows than folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (!block) {
        rng::Stream stream(seed);
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(stream.next_u64() % (i + 1));
            std::swap(order[i], order[j]);
        }
    }
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::size_t fold_size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                        order.begin() + static_cast<std::ptrdiff_t>(cursor + fold_size));
        cursor += fold_size;
    }
    return folds;
}

CVReport cross_validate(const regress::ModelSpec& spec, const PooledTable& pooled, int k,
                        std::uint64_t seed, bool block, CvDomain domain) {
    if (k < 2) raise(errc::invalid_argument, "cross_validate needs k >= 2");
    const regress::DesignMatrix design = regress::build_design(spec, pooled.table);
    const std::size_t n = design.y.size();
    const std::size_t ncols = design.ncols;
    const auto folds = cv_folds(n, k, seed, block);

    CVReport report;
    report.k = k;
    report.seed = seed;
    report.domain = domain;
    report.block = block;

    double sum_mae = 0.0, sum_rmse = 0.0, sum_r2 = 0.0;
    std::size_t r2_folds = 0;

    for (const auto& fold : folds) {
        const std::size_t fold_size = fold.size();
        std::vector<bool> held(n, false);
        for (std::size_t row : fold) held[row] = true;

        std::vector<double> x_train, y_train;
        x_train.reserve((n - fold_size) * ncols);
        y_train.reserve(n - fold_size);
        for (std::size_t row = 0; row < n; ++row) {
            if (held[row]) continue;
            x_train.insert(x_train.end(), design.X.begin() + static_cast<std::ptrdiff_t>(row * ncols),
                           design.X.begin() + static_cast<std::ptrdiff_t>((row + 1) * ncols));
            y_train.push_back(design.y[row]);
        }
        const std::vector<double> coef = regress::solve_least_squares(x_train, y_train, ncols);

        std::vector<double> pred_ln(fold_size), act_ln(fold_size);
        for (std::size_t i = 0; i < fold_size; ++i) {
            const std::size_t row = fold[i];
            double lp = 0.0;
            for (std::size_t j = 0; j < ncols; ++j) lp += design.X[row * ncols + j] * coef[j];
            pred_ln[i] = lp;
            act_ln[i] = design.y[row];
        }

        FoldMetrics fm;
        double se = 0.0, ae = 0.0;
        for (std::size_t i = 0; i < fold_size; ++i) {
            const double diff = std::exp(pred_ln[i]) - std::exp(act_ln[i]);
            ae += std::fabs(diff);
            se += diff * diff;
        }
        fm.mae = ae / static_cast<double>(fold_size);
        fm.rmse = std::sqrt(se / static_cast<double>(fold_size));

        if (fold_size < 2) {
            fm.r2 = kNaN;
            ++report.r2_excluded_folds;
        } else {
            double ss_res = 0.0, ss_tot = 0.0, mean_act = 0.0;
            for (std::size_t i = 0; i < fold_size; ++i)
                mean_act += domain == CvDomain::price ? std::exp(act_ln[i]) : act_ln[i];
            mean_act /= static_cast<double>(fold_size);
            for (std::size_t i = 0; i < fold_size; ++i) {
                const double a = domain == CvDomain::price ? std::exp(act_ln[i]) : act_ln[i];
                const double p = domain == CvDomain::price ? std::exp(pred_ln[i]) : pred_ln[i];
                ss_res += (a - p) * (a - p);
                ss_tot += (a - mean_act) * (a - mean_act);
            }
            fm.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-30 ? 1.0 : 0.0);
            sum_r2 += fm.r2;
            ++r2_folds;
        }
        sum_mae += fm.mae;
        sum_rmse += fm.rmse;
        report.per_fold.push_back(fm);
    }

    report.mean_mae = sum_mae / static_cast<double>(k);
    report.mean_rmse = sum_rmse / static_cast<double>(k);
    report.mean_r2 = r2_folds > 0 ? sum_r2 / static_cast<double>(r2_folds) : kNaN;
    return report;
}

}  // namespace eoelab::eoe
