#include "eoelab/regress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "eoelab/special.hpp"

namespace eoelab::regress {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSearchLimit = 1e6;  // holding times beyond ~2,700 years are noise
constexpr double kSearchFloor = 1e-9;
constexpr int kGridPoints = 10000;

}  // namespace

// ---------------------------------------------------------------------------
// transforms
// ---------------------------------------------------------------------------

FeatureTransform FeatureTransform::power(int k) {
    if (k < 2) raise(errc::invalid_argument, "power transform needs k >= 2 (use identity)");
    return {TransformKind::power, k};
}
FeatureTransform FeatureTransform::log_power(int k) {
    if (k < 2) raise(errc::invalid_argument, "log_power transform needs k >= 2 (use log)");
    return {TransformKind::log_power, k};
}
FeatureTransform FeatureTransform::inverse_power(int k) {
    if (k < 1) raise(errc::invalid_argument, "inverse_power transform needs k >= 1");
    return {TransformKind::inverse_power, k};
}

bool FeatureTransform::defined_at(double x) const {
    switch (kind) {
        case TransformKind::identity:
        case TransformKind::power: return true;
        case TransformKind::log:
        case TransformKind::log_power:
        case TransformKind::lag_log: return x > 0.0;
        case TransformKind::inverse_power: return x != 0.0;
    }
    return false;
}

double FeatureTransform::value(double x) const {
    switch (kind) {
        case TransformKind::identity: return x;
        case TransformKind::power: return std::pow(x, k);
        case TransformKind::log:
        case TransformKind::lag_log: return std::log(x);
        case TransformKind::log_power: return std::pow(std::log(x), k);
        case TransformKind::inverse_power: return std::pow(x, -k);
    }
    return 0.0;
}

double FeatureTransform::derivative(double x) const {
    switch (kind) {
        case TransformKind::identity: return 1.0;
        case TransformKind::power: return k * std::pow(x, k - 1);
        case TransformKind::log:
        case TransformKind::lag_log: return 1.0 / x;
        case TransformKind::log_power: return k * std::pow(std::log(x), k - 1) / x;
        case TransformKind::inverse_power: return -k * std::pow(x, -k - 1);
    }
    return 0.0;
}

std::string FeatureTransform::term_name(const std::string& variable) const {
    switch (kind) {
        case TransformKind::identity: return variable;
        case TransformKind::power: return variable + "^" + std::to_string(k);
        case TransformKind::log: return "log(" + variable + ")";
        case TransformKind::log_power: return "log(" + variable + ")^" + std::to_string(k);
        case TransformKind::inverse_power:
            return k == 1 ? "1/" + variable : "1/" + variable + "^" + std::to_string(k);
        case TransformKind::lag_log: return "log(" + variable + "_t-1)";
    }
    return variable;
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

bool DataTable::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& DataTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    raise(errc::invalid_argument, "no column named '" + name + "'");
}

void DataTable::add_column(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != columns[0].size())
        raise(errc::invalid_argument, "column '" + name + "' has mismatched length");
    if (has_column(name)) raise(errc::invalid_argument, "duplicate column '" + name + "'");
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

// ---------------------------------------------------------------------------
// design and solve
// ---------------------------------------------------------------------------

namespace {

void validate_spec(const ModelSpec& spec) {
    if (spec.features.empty()) raise(errc::invalid_argument, "model needs at least one feature");
    for (std::size_t i = 0; i < spec.features.size(); ++i)
        for (std::size_t j = i + 1; j < spec.features.size(); ++j) {
            const auto& a = spec.features[i];
            const auto& b = spec.features[j];
            if (a.variable == b.variable && a.transform.kind == b.transform.kind &&
                a.transform.k == b.transform.k)
                raise(errc::invalid_argument,
                      "duplicate feature " + a.transform.term_name(a.variable));
        }
}

}  // namespace

DesignMatrix build_design(const ModelSpec& spec, const DataTable& table) {
    validate_spec(spec);
    const auto& response = table.column(spec.response);
    const std::size_t n_rows = table.row_count();
    if (!table.groups.empty() && table.groups.size() != n_rows)
        raise(errc::invalid_argument, "groups length does not match row count");

    std::vector<const std::vector<double>*> cols;
    cols.reserve(spec.features.size());
    for (const auto& f : spec.features) cols.push_back(&table.column(f.variable));

    DesignMatrix design;
    design.ncols = spec.features.size() + (spec.intercept ? 1 : 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (spec.log_response && !(response[r] > 0.0)) continue;
        bool ok = true;
        for (std::size_t j = 0; j < spec.features.size() && ok; ++j) {
            const auto& t = spec.features[j].transform;
            if (t.is_lag()) {
                const bool has_prev =
                    r > 0 && (table.groups.empty() || table.groups[r] == table.groups[r - 1]);
                ok = has_prev && t.defined_at((*cols[j])[r - 1]);
            } else {
                ok = t.defined_at((*cols[j])[r]);
            }
        }
        if (!ok) continue;
        design.rows.push_back(r);
        if (spec.intercept) design.X.push_back(1.0);
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            const auto& t = spec.features[j].transform;
            design.X.push_back(t.value(t.is_lag() ? (*cols[j])[r - 1] : (*cols[j])[r]));
        }
        design.y.push_back(spec.log_response ? std::log(response[r]) : response[r]);
    }
    return design;
}

namespace {

struct QrSolution {
    std::vector<double> coef;
    std::vector<double> xtx_inv_diag;  // diagonal of (X'X)^-1 = R^-1 R^-T
};

QrSolution qr_least_squares(const std::vector<double>& X, const std::vector<double>& y,
                            std::size_t ncols, bool want_inverse) {
    const std::size_t m = y.size();
    const std::size_t n = ncols;
    if (m < n) raise(errc::insufficient_data, "fewer rows than design columns");

    std::vector<double> A = X;
    std::vector<double> b = y;
    for (std::size_t kcol = 0; kcol < n; ++kcol) {
        double norm = 0.0;
        for (std::size_t i = kcol; i < m; ++i) norm += A[i * n + kcol] * A[i * n + kcol];
        norm = std::sqrt(norm);
        const double pivot = A[kcol * n + kcol];
        const double alpha = -std::copysign(norm, pivot);
        std::vector<double> v(m - kcol);
        v[0] = pivot - alpha;
        for (std::size_t i = kcol + 1; i < m; ++i) v[i - kcol] = A[i * n + kcol];
        double vnorm2 = 0.0;
        for (double w : v) vnorm2 += w * w;
        if (vnorm2 > 0.0) {
            for (std::size_t j = kcol; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t i = kcol; i < m; ++i) dot += v[i - kcol] * A[i * n + j];
                const double factor = 2.0 * dot / vnorm2;
                for (std::size_t i = kcol; i < m; ++i) A[i * n + j] -= factor * v[i - kcol];
            }
            double dot = 0.0;
            for (std::size_t i = kcol; i < m; ++i) dot += v[i - kcol] * b[i];
            const double factor = 2.0 * dot / vnorm2;
            for (std::size_t i = kcol; i < m; ++i) b[i] -= factor * v[i - kcol];
        }
        A[kcol * n + kcol] = alpha;
    }

    double max_diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) max_diag = std::max(max_diag, std::fabs(A[j * n + j]));
    if (max_diag == 0.0) raise(errc::rank_deficient, "design matrix is zero");
    for (std::size_t j = 0; j < n; ++j)
        if (std::fabs(A[j * n + j]) < 1e-10 * max_diag)
            raise(errc::rank_deficient,
                  "collinear design column " + std::to_string(j) + " (R diagonal ~ 0)");

    QrSolution sol;
    sol.coef.assign(n, 0.0);
    for (std::size_t jj = n; jj-- > 0;) {
        double acc = b[jj];
        for (std::size_t l = jj + 1; l < n; ++l) acc -= A[jj * n + l] * sol.coef[l];
        sol.coef[jj] = acc / A[jj * n + jj];
    }

    if (want_inverse) {
        // columns of R^-1 by back substitution; diag((X'X)^-1) is the row
        // sums of squares of R^-1
        std::vector<double> rinv(n * n, 0.0);
        for (std::size_t c = 0; c < n; ++c) {
            rinv[c * n + c] = 1.0 / A[c * n + c];
            for (std::size_t r = c; r-- > 0;) {
                double acc = 0.0;
                for (std::size_t l = r + 1; l <= c; ++l) acc += A[r * n + l] * rinv[l * n + c];
                rinv[r * n + c] = -acc / A[r * n + r];
            }
        }
        sol.xtx_inv_diag.assign(n, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r; c < n; ++c)
                sol.xtx_inv_diag[r] += rinv[r * n + c] * rinv[r * n + c];
    }
    return sol;
}

}  // namespace

std::vector<double> solve_least_squares(const std::vector<double>& X, const std::vector<double>& y,
                                        std::size_t ncols) {
    return qr_least_squares(X, y, ncols, false).coef;
}

double t_cdf(double t, double dof) {
    if (!(dof > 0.0)) raise(errc::invalid_argument, "t_cdf needs dof > 0");
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    if (t == 0.0) return 0.5;
    if (dof > 1e5) return special::norm_cdf(t);
    const double w = special::inc_beta(0.5 * dof, 0.5, dof / (dof + t * t));
    return t > 0.0 ? 1.0 - 0.5 * w : 0.5 * w;
}

double adjusted_r2(double r2, std::size_t n, std::size_t p_non_intercept, bool intercept) {
    const auto denom = static_cast<double>(n) - static_cast<double>(p_non_intercept) -
                       (intercept ? 1.0 : 0.0);
    if (denom <= 0.0) raise(errc::insufficient_data, "adjusted R^2 needs n > p + 1");
    return 1.0 - (1.0 - r2) * (static_cast<double>(n) - 1.0) / denom;
}

FittedLinearModel fit_ols(const ModelSpec& spec, const DataTable& table) {
    const DesignMatrix design = build_design(spec, table);
    const std::size_t n = design.y.size();
    const std::size_t ncols = design.ncols;
    if (n < ncols + 1)
        raise(errc::insufficient_data, "need more observations than coefficients (n > p + 1)");

    const QrSolution sol = qr_least_squares(design.X, design.y, ncols, true);

    FittedLinearModel model;
    model.spec = spec;
    model.coefficients = sol.coef;
    model.n = n;
    model.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < ncols; ++j) fit += design.X[i * ncols + j] * sol.coef[j];
        model.residuals[i] = design.y[i] - fit;
        sse += model.residuals[i] * model.residuals[i];
    }

    const auto dof = static_cast<double>(n - ncols);
    const double s2 = sse / dof;
    model.std_errors.resize(ncols);
    model.t_stats.resize(ncols);
    model.p_values.resize(ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
        model.std_errors[j] = std::sqrt(s2 * sol.xtx_inv_diag[j]);
        if (model.std_errors[j] == 0.0) {
            model.t_stats[j] = sol.coef[j] == 0.0 ? 0.0 : std::copysign(kInf, sol.coef[j]);
        } else {
            model.t_stats[j] = sol.coef[j] / model.std_errors[j];
        }
        const double p = 2.0 * (1.0 - t_cdf(std::fabs(model.t_stats[j]), dof));
        model.p_values[j] = std::clamp(p, 0.0, 1.0);
    }

    double ybar = 0.0;
    for (double v : design.y) ybar += v;
    ybar /= static_cast<double>(n);
    double sst = 0.0;
    for (double v : design.y) sst += (v - ybar) * (v - ybar);
    model.r2 = sst > 0.0 ? 1.0 - sse / sst : (sse <= 1e-30 ? 1.0 : 0.0);
    model.adj_r2 = adjusted_r2(model.r2, n, spec.features.size(), spec.intercept);
    return model;
}

// ---------------------------------------------------------------------------
// range analysis
// ---------------------------------------------------------------------------

namespace {

void require_single_variable(const FittedLinearModel& model) {
    const auto& fs = model.spec.features;
    for (const auto& f : fs) {
        if (f.transform.is_lag())
            raise(errc::invalid_argument, "range analysis does not support lag features");
        if (f.variable != fs.front().variable)
            raise(errc::invalid_argument, "range analysis needs a single-variable model");
    }
}

bool positive_domain_only(const ModelSpec& spec) {
    if (spec.features.empty()) return true;
    for (const auto& f : spec.features)
        switch (f.transform.kind) {
            case TransformKind::log:
            case TransformKind::log_power:
            case TransformKind::inverse_power: return true;
            default: break;
        }
    return false;
}

double bisect_root(const FittedLinearModel& model, double lo, double hi, double flo) {
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = evaluate_single(model, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

std::string format_boundary(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string interval_label(const Interval& iv, bool positive_domain) {
    const bool lo_open = positive_domain ? iv.lo <= 0.0 : std::isinf(iv.lo);
    const bool hi_open = std::isinf(iv.hi);
    const std::string var = "H";
    if (lo_open && hi_open) return positive_domain ? var + " > 0" : "All " + var;
    if (lo_open)
        return positive_domain ? "0 < " + var + " < " + format_boundary(iv.hi)
                               : var + " < " + format_boundary(iv.hi);
    if (hi_open) return var + " > " + format_boundary(iv.lo);
    return format_boundary(iv.lo) + " < " + var + " < " + format_boundary(iv.hi);
}

}  // namespace

double evaluate_single(const FittedLinearModel& model, double x) {
    std::size_t j = 0;
    double acc = 0.0;
    if (model.spec.intercept) acc = model.coefficients[j++];
    for (const auto& f : model.spec.features) {
        if (!f.transform.defined_at(x)) return std::numeric_limits<double>::quiet_NaN();
        acc += model.coefficients[j++] * f.transform.value(x);
    }
    return acc;
}

double derivative_single(const FittedLinearModel& model, double x) {
    std::size_t j = model.spec.intercept ? 1 : 0;
    double acc = 0.0;
    for (const auto& f : model.spec.features) {
        if (!f.transform.defined_at(x)) return std::numeric_limits<double>::quiet_NaN();
        acc += model.coefficients[j++] * f.transform.derivative(x);
    }
    return acc;
}

RangeAnalysis analyze_range(const FittedLinearModel& model) {
    require_single_variable(model);
    const bool positive_domain = positive_domain_only(model.spec);

    std::vector<double> grid;
    {
        const double llo = std::log(kSearchFloor);
        const double lhi = std::log(kSearchLimit);
        std::vector<double> pos(kGridPoints + 1);
        for (int i = 0; i <= kGridPoints; ++i)
            pos[static_cast<std::size_t>(i)] =
                std::exp(llo + (lhi - llo) * static_cast<double>(i) / kGridPoints);
        if (positive_domain) {
            grid = std::move(pos);
        } else {
            grid.reserve(2 * pos.size() + 1);
            for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
            grid.push_back(0.0);
            grid.insert(grid.end(), pos.begin(), pos.end());
        }
    }

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = evaluate_single(model, grid[i]);

    RangeAnalysis out;
    bool in_run = false;
    Interval current{0.0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool pos_here = values[i] > 0.0;
        if (pos_here && !in_run) {
            in_run = true;
            if (i == 0)
                current.lo = positive_domain ? 0.0 : -kInf;
            else
                current.lo = bisect_root(model, grid[i - 1], grid[i], values[i - 1]);
        } else if (!pos_here && in_run) {
            in_run = false;
            current.hi = bisect_root(model, grid[i - 1], grid[i], values[i - 1]);
            out.positivity.push_back(current);
        }
    }
    if (in_run) {
        current.hi = kInf;
        out.positivity.push_back(current);
    }
    if (out.positivity.empty())
        raise(errc::no_positive_region, "predicted velocity is nowhere positive");

    bool saw_pos = false;
    bool saw_neg = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        bool inside = false;
        for (const auto& iv : out.positivity)
            if (x > iv.lo && x < iv.hi) {
                inside = true;
                break;
            }
        if (!inside) continue;
        const double d = derivative_single(model, x);
        if (std::isnan(d)) continue;
        if (d > 0.0) saw_pos = true;
        if (d < 0.0) saw_neg = true;
    }
    if (!saw_pos && !saw_neg) {
        out.monotonic = true;
        out.sign = DerivativeSign::mixed;
        out.constant = true;
    } else if (saw_pos && saw_neg) {
        out.monotonic = false;
        out.sign = DerivativeSign::mixed;
    } else {
        out.monotonic = true;
        out.sign = saw_pos ? DerivativeSign::increasing : DerivativeSign::decreasing;
    }

    for (std::size_t i = 0; i < out.positivity.size(); ++i) {
        if (i) out.label += " or ";
        out.label += interval_label(out.positivity[i], positive_domain);
    }
    return out;
}

// ---------------------------------------------------------------------------
// velocity model zoo
// ---------------------------------------------------------------------------

namespace {

ModelSpec velocity_spec(std::vector<FeatureTransform> transforms) {
    ModelSpec spec;
    spec.response = "V";
    spec.intercept = true;
    for (auto& t : transforms) spec.features.push_back({"H", t});
    return spec;
}

std::string format_coefficient(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return buf;
}

std::string equation_string(const FittedLinearModel& model) {
    std::string out = model.spec.response + " = ";
    std::size_t j = 0;
    if (model.spec.intercept) out += format_coefficient(model.coefficients[j++]);
    for (std::size_t f = 0; f < model.spec.features.size(); ++f, ++j) {
        const double c = model.coefficients[j];
        const auto& feat = model.spec.features[f];
        if (j == 0) {
            out += format_coefficient(c);
        } else {
            out += c < 0.0 ? " - " : " + ";
            out += format_coefficient(std::fabs(c));
        }
        out += " * " + feat.transform.term_name(feat.variable);
    }
    return out;
}

bool covers_all_positive(const RangeAnalysis& range) {
    return range.positivity.size() == 1 && range.positivity[0].lo <= 0.0 &&
           std::isinf(range.positivity[0].hi);
}

}  // namespace

std::vector<ModelSpec> zoo_specs() {
    using T = FeatureTransform;
    return {
        velocity_spec({T::identity(), T::inverse_power(1), T::log()}),
        velocity_spec({T::log(), T::log_power(2)}),
        velocity_spec({T::log(), T::log_power(2), T::log_power(3)}),
        velocity_spec({T::inverse_power(1), T::inverse_power(2), T::inverse_power(3)}),
        velocity_spec({T::inverse_power(1), T::inverse_power(2)}),
        velocity_spec({T::identity(), T::power(2), T::power(3)}),
        velocity_spec({T::inverse_power(1)}),
        velocity_spec({T::identity(), T::power(2)}),
        velocity_spec({T::log()}),
        velocity_spec({T::identity()}),
    };
}

ZooResult velocity_model_zoo(const econsim::RegressionDataset& dataset) {
    if (dataset.points.empty()) raise(errc::insufficient_data, "empty regression dataset");

    DataTable table;
    std::vector<double> vs(dataset.points.size());
    std::vector<double> hs(dataset.points.size());
    for (std::size_t i = 0; i < dataset.points.size(); ++i) {
        vs[i] = dataset.points[i].mean_velocity;
        hs[i] = dataset.points[i].mean_holding_time;
    }
    table.add_column("V", std::move(vs));
    table.add_column("H", std::move(hs));

    ZooResult result;
    for (const auto& spec : zoo_specs()) {
        ZooEntry entry;
        entry.model = fit_ols(spec, table);
        entry.equation = equation_string(entry.model);

        std::string remarks;
        bool all_significant = true;
        std::size_t j = 0;
        auto note_term = [&](const std::string& term) {
            if (entry.model.p_values[j] >= 0.05) {
                all_significant = false;
                if (!remarks.empty()) remarks += "; ";
                remarks += "coef for " + term + " has p-value > 0.05";
            }
            ++j;
        };
        if (spec.intercept) note_term("intercept");
        for (const auto& f : spec.features) note_term(f.transform.term_name(f.variable));

        bool has_range = true;
        try {
            entry.range = analyze_range(entry.model);
        } catch (const Error&) {
            has_range = false;
            entry.range.label = "none";
        }
        if (!has_range) {
            if (!remarks.empty()) remarks += "; ";
            remarks += "no positive region";
        } else if (!entry.range.monotonic) {
            if (!remarks.empty()) remarks += "; ";
            remarks += "non-monotonic relationship";
        }
        entry.remarks = std::move(remarks);
        entry.admissible =
            all_significant && has_range && entry.range.monotonic && covers_all_positive(entry.range);
        result.entries.push_back(std::move(entry));
    }

    // Exact fits tie at adj_r2 == 1.0; prefer the model with fewer terms then.
    auto better = [&](std::size_t i, std::size_t j) {
        const double a = result.entries[i].model.adj_r2;
        const double b = result.entries[j].model.adj_r2;
        if (a != b) return a > b;
        return result.entries[i].model.coefficients.size() <
               result.entries[j].model.coefficients.size();
    };
    std::size_t best_admissible = result.entries.size();
    std::size_t best_overall = 0;
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        if (better(i, best_overall)) best_overall = i;
        if (result.entries[i].admissible &&
            (best_admissible == result.entries.size() || better(i, best_admissible)))
            best_admissible = i;
    }
    if (best_admissible < result.entries.size()) {
        result.selected = best_admissible;
        result.fallback = false;
    } else {
        result.selected = best_overall;
        result.fallback = true;
    }
    return result;
}

}  // namespace eoelab::regress
