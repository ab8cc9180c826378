#include "eoelab/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eoelab/optim.hpp"
#include "eoelab/rng.hpp"
#include "eoelab/special.hpp"

namespace eoelab::distfit {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
constexpr double kBarrier = 1e100;  // NLL value for parameter/support violations

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // population variance
    double min = 0.0;
    double max = 0.0;
};

Moments compute_moments(std::span<const double> xs) {
    Moments m;
    m.min = xs[0];
    m.max = xs[0];
    for (double x : xs) {
        m.mean += x;
        m.min = std::min(m.min, x);
        m.max = std::max(m.max, x);
    }
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(xs.size());
    return m;
}

void require_positive(std::span<const double> xs, Family f) {
    for (double x : xs)
        if (!(x > 0.0))
            raise(errc::unsupported_support,
                  std::string(family_name(f)) + " requires strictly positive samples, found " +
                      std::to_string(x));
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::lognormal: return "lognormal";
        case Family::normal: return "normal";
        case Family::exponential: return "exponential";
        case Family::gamma: return "gamma";
        case Family::beta: return "beta";
        case Family::gev: return "gev";
        case Family::pareto: return "pareto";
        case Family::student_t: return "student_t";
        case Family::weibull: return "weibull";
        case Family::uniform: return "uniform";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    for (Family f : kAllFamilies)
        if (name == family_name(f)) return f;
    raise(errc::invalid_argument, "unknown distribution family '" + name + "'");
}

bool requires_positive_support(Family f) {
    switch (f) {
        case Family::lognormal:
        case Family::exponential:
        case Family::gamma:
        case Family::pareto:
        case Family::weibull:
            return true;
        default:
            return false;
    }
}

FittedDistribution::FittedDistribution(Family f, std::initializer_list<double> params)
    : family_(f) {
    std::size_t i = 0;
    for (double p : params) params_[i++] = p;
}

std::size_t FittedDistribution::param_count() const {
    switch (family_) {
        case Family::exponential: return 1;
        case Family::lognormal:
        case Family::normal:
        case Family::gamma:
        case Family::pareto:
        case Family::weibull:
        case Family::uniform: return 2;
        case Family::gev:
        case Family::student_t: return 3;
        case Family::beta: return 4;
    }
    return 0;
}

std::vector<std::string> FittedDistribution::param_names() const {
    switch (family_) {
        case Family::lognormal:
        case Family::normal: return {"mu", "sigma"};
        case Family::exponential: return {"rate"};
        case Family::gamma: return {"shape", "scale"};
        case Family::beta: return {"alpha", "beta", "lower", "upper"};
        case Family::gev: return {"shape_xi", "loc", "scale"};
        case Family::pareto: return {"alpha", "x_min"};
        case Family::student_t: return {"dof", "loc", "scale"};
        case Family::weibull: return {"shape", "scale"};
        case Family::uniform: return {"lower", "upper"};
    }
    return {};
}

namespace {

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        raise(errc::invalid_argument, std::string(what) + " must be finite and > 0");
}

}  // namespace

FittedDistribution FittedDistribution::lognormal(double mu, double sigma) {
    if (!(sigma >= 0.0)) raise(errc::invalid_argument, "lognormal sigma must be >= 0");
    return FittedDistribution(Family::lognormal, {mu, sigma});
}
FittedDistribution FittedDistribution::normal(double mu, double sigma) {
    if (!(sigma >= 0.0)) raise(errc::invalid_argument, "normal sigma must be >= 0");
    return FittedDistribution(Family::normal, {mu, sigma});
}
FittedDistribution FittedDistribution::exponential(double rate) {
    require_finite_positive(rate, "exponential rate");
    return FittedDistribution(Family::exponential, {rate});
}
FittedDistribution FittedDistribution::gamma(double shape, double scale) {
    require_finite_positive(shape, "gamma shape");
    require_finite_positive(scale, "gamma scale");
    return FittedDistribution(Family::gamma, {shape, scale});
}
FittedDistribution FittedDistribution::beta(double alpha, double beta, double lower, double upper) {
    require_finite_positive(alpha, "beta alpha");
    require_finite_positive(beta, "beta beta");
    if (!(upper > lower)) raise(errc::invalid_argument, "beta upper must exceed lower");
    return FittedDistribution(Family::beta, {alpha, beta, lower, upper});
}
FittedDistribution FittedDistribution::gev(double shape_xi, double loc, double scale) {
    require_finite_positive(scale, "gev scale");
    return FittedDistribution(Family::gev, {shape_xi, loc, scale});
}
FittedDistribution FittedDistribution::pareto(double alpha, double x_min) {
    require_finite_positive(alpha, "pareto alpha");
    require_finite_positive(x_min, "pareto x_min");
    return FittedDistribution(Family::pareto, {alpha, x_min});
}
FittedDistribution FittedDistribution::student_t(double dof, double loc, double scale) {
    require_finite_positive(dof, "student_t dof");
    require_finite_positive(scale, "student_t scale");
    return FittedDistribution(Family::student_t, {dof, loc, scale});
}
FittedDistribution FittedDistribution::weibull(double shape, double scale) {
    require_finite_positive(shape, "weibull shape");
    require_finite_positive(scale, "weibull scale");
    return FittedDistribution(Family::weibull, {shape, scale});
}
FittedDistribution FittedDistribution::uniform(double lower, double upper) {
    if (!(upper > lower)) raise(errc::invalid_argument, "uniform upper must exceed lower");
    return FittedDistribution(Family::uniform, {lower, upper});
}

FittedDistribution FittedDistribution::from_params(Family f, std::span<const double> params) {
    const auto p = [&](std::size_t i) { return params[i]; };
    switch (f) {
        case Family::lognormal:
            if (params.size() == 2) return lognormal(p(0), p(1));
            break;
        case Family::normal:
            if (params.size() == 2) return normal(p(0), p(1));
            break;
        case Family::exponential:
            if (params.size() == 1) return exponential(p(0));
            break;
        case Family::gamma:
            if (params.size() == 2) return gamma(p(0), p(1));
            break;
        case Family::beta:
            if (params.size() == 4) return beta(p(0), p(1), p(2), p(3));
            break;
        case Family::gev:
            if (params.size() == 3) return gev(p(0), p(1), p(2));
            break;
        case Family::pareto:
            if (params.size() == 2) return pareto(p(0), p(1));
            break;
        case Family::student_t:
            if (params.size() == 3) return student_t(p(0), p(1), p(2));
            break;
        case Family::weibull:
            if (params.size() == 2) return weibull(p(0), p(1));
            break;
        case Family::uniform:
            if (params.size() == 2) return uniform(p(0), p(1));
            break;
    }
    raise(errc::invalid_argument,
          std::string(family_name(f)) + " takes a different parameter count");
}

// ---------------------------------------------------------------------------
// density / distribution / quantile
// ---------------------------------------------------------------------------

double pdf(const FittedDistribution& d, double x) {
    switch (d.family()) {
        case Family::lognormal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (x <= 0.0) return 0.0;
            if (sigma == 0.0) return 0.0;  // point mass; density undefined
            const double z = (std::log(x) - mu) / sigma;
            return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * kPi));
        }
        case Family::normal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (sigma == 0.0) return 0.0;
            const double z = (x - mu) / sigma;
            return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
        }
        case Family::exponential: {
            const double rate = d.param(0);
            if (x < 0.0) return 0.0;
            return rate * std::exp(-rate * x);
        }
        case Family::gamma: {
            const double k = d.param(0), theta = d.param(1);
            if (x < 0.0) return 0.0;
            if (x == 0.0) return k > 1.0 ? 0.0 : (k == 1.0 ? 1.0 / theta : std::numeric_limits<double>::infinity());
            return std::exp((k - 1.0) * std::log(x) - x / theta - special::ln_gamma(k) - k * std::log(theta));
        }
        case Family::beta: {
            const double a = d.param(0), b = d.param(1), lo = d.param(2), hi = d.param(3);
            if (x <= lo || x >= hi) return 0.0;
            const double w = hi - lo;
            const double y = (x - lo) / w;
            return std::exp((a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y) - special::ln_beta(a, b)) / w;
        }
        case Family::gev: {
            const double xi = d.param(0), loc = d.param(1), s = d.param(2);
            const double z = (x - loc) / s;
            if (std::fabs(xi) < 1e-12) {
                const double e = std::exp(-z);
                return e * std::exp(-e) / s;
            }
            const double t = 1.0 + xi * z;
            if (t <= 0.0) return 0.0;
            const double lt = std::log(t);
            const double tpow = std::exp(-lt / xi);  // t^(-1/xi)
            return std::exp(-(1.0 + 1.0 / xi) * lt - tpow) / s;
        }
        case Family::pareto: {
            const double alpha = d.param(0), xm = d.param(1);
            if (x < xm) return 0.0;
            return alpha * std::exp(alpha * std::log(xm) - (alpha + 1.0) * std::log(x));
        }
        case Family::student_t: {
            const double nu = d.param(0), loc = d.param(1), s = d.param(2);
            const double z = (x - loc) / s;
            const double ln_norm = special::ln_gamma(0.5 * (nu + 1.0)) - special::ln_gamma(0.5 * nu) -
                                   0.5 * std::log(nu * kPi) - std::log(s);
            return std::exp(ln_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
        }
        case Family::weibull: {
            const double k = d.param(0), lam = d.param(1);
            if (x < 0.0) return 0.0;
            if (x == 0.0) return k > 1.0 ? 0.0 : (k == 1.0 ? 1.0 / lam : std::numeric_limits<double>::infinity());
            const double z = x / lam;
            return (k / lam) * std::exp((k - 1.0) * std::log(z) - std::pow(z, k));
        }
        case Family::uniform: {
            const double lo = d.param(0), hi = d.param(1);
            if (x < lo || x > hi) return 0.0;
            return 1.0 / (hi - lo);
        }
    }
    return 0.0;
}

double cdf(const FittedDistribution& d, double x) {
    switch (d.family()) {
        case Family::lognormal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (x <= 0.0) return 0.0;
            if (sigma == 0.0) return std::log(x) < mu ? 0.0 : 1.0;
            return special::norm_cdf((std::log(x) - mu) / sigma);
        }
        case Family::normal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (sigma == 0.0) return x < mu ? 0.0 : 1.0;
            return special::norm_cdf((x - mu) / sigma);
        }
        case Family::exponential: {
            const double rate = d.param(0);
            if (x <= 0.0) return 0.0;
            return -std::expm1(-rate * x);
        }
        case Family::gamma: {
            const double k = d.param(0), theta = d.param(1);
            if (x <= 0.0) return 0.0;
            return special::gamma_p(k, x / theta);
        }
        case Family::beta: {
            const double a = d.param(0), b = d.param(1), lo = d.param(2), hi = d.param(3);
            if (x <= lo) return 0.0;
            if (x >= hi) return 1.0;
            return special::inc_beta(a, b, (x - lo) / (hi - lo));
        }
        case Family::gev: {
            const double xi = d.param(0), loc = d.param(1), s = d.param(2);
            const double z = (x - loc) / s;
            if (std::fabs(xi) < 1e-12) return std::exp(-std::exp(-z));
            const double t = 1.0 + xi * z;
            if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
            return std::exp(-std::pow(t, -1.0 / xi));
        }
        case Family::pareto: {
            const double alpha = d.param(0), xm = d.param(1);
            if (x <= xm) return 0.0;
            return -std::expm1(alpha * std::log(xm / x));
        }
        case Family::student_t: {
            const double nu = d.param(0), loc = d.param(1), s = d.param(2);
            const double z = (x - loc) / s;
            const double w = special::inc_beta(0.5 * nu, 0.5, nu / (nu + z * z));
            return z >= 0.0 ? 1.0 - 0.5 * w : 0.5 * w;
        }
        case Family::weibull: {
            const double k = d.param(0), lam = d.param(1);
            if (x <= 0.0) return 0.0;
            return -std::expm1(-std::pow(x / lam, k));
        }
        case Family::uniform: {
            const double lo = d.param(0), hi = d.param(1);
            if (x <= lo) return 0.0;
            if (x >= hi) return 1.0;
            return (x - lo) / (hi - lo);
        }
    }
    return 0.0;
}

namespace {

// Bisect cdf(x) = p on [lo, hi]; assumes cdf is monotone and the bracket
// is valid.
double bisect_quantile(const FittedDistribution& d, double p, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (cdf(d, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double quantile(const FittedDistribution& d, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        raise(errc::invalid_argument, "quantile probability must lie in [0, 1]");
    switch (d.family()) {
        case Family::lognormal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (p == 0.0) return 0.0;
            if (p == 1.0) return std::numeric_limits<double>::infinity();
            return std::exp(mu + sigma * special::norm_quantile(p));
        }
        case Family::normal: {
            const double mu = d.param(0), sigma = d.param(1);
            return mu + sigma * special::norm_quantile(p);
        }
        case Family::exponential:
            return -std::log1p(-p) / d.param(0);
        case Family::gamma: {
            if (p == 0.0) return 0.0;
            const double mean = d.param(0) * d.param(1);
            const double sd = std::sqrt(d.param(0)) * d.param(1);
            double hi = mean + 10.0 * sd;
            while (cdf(d, hi) < p) hi *= 2.0;
            return bisect_quantile(d, p, 0.0, hi);
        }
        case Family::beta:
            return bisect_quantile(d, p, d.param(2), d.param(3));
        case Family::gev: {
            const double xi = d.param(0), loc = d.param(1), s = d.param(2);
            if (p == 0.0 || p == 1.0) {
                const double inf = std::numeric_limits<double>::infinity();
                if (std::fabs(xi) < 1e-12) return p == 0.0 ? -inf : inf;
                if (xi > 0.0) return p == 0.0 ? loc - s / xi : inf;
                return p == 0.0 ? -inf : loc - s / xi;
            }
            const double ln_p = -std::log(p);
            if (std::fabs(xi) < 1e-12) return loc - s * std::log(ln_p);
            return loc + s * (std::pow(ln_p, -xi) - 1.0) / xi;
        }
        case Family::pareto:
            return d.param(1) * std::pow(1.0 - p, -1.0 / d.param(0));
        case Family::student_t: {
            const double loc = d.param(1), s = d.param(2);
            if (p == 0.5) return loc;
            double half_width = 10.0 * s;
            while (cdf(d, loc + half_width) < p || cdf(d, loc - half_width) > p) half_width *= 2.0;
            return bisect_quantile(d, p, loc - half_width, loc + half_width);
        }
        case Family::weibull:
            return d.param(1) * std::pow(-std::log1p(-p), 1.0 / d.param(0));
        case Family::uniform:
            return d.param(0) + p * (d.param(1) - d.param(0));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

namespace {

double draw_normal01(rng::Stream& stream) {
    return special::norm_quantile(stream.next_open01());
}

// Marsaglia-Tsang; exact for all shapes via the shape+1 boost below 1.
double draw_gamma(rng::Stream& stream, double shape, double scale) {
    if (shape < 1.0) {
        const double u = stream.next_open01();
        return draw_gamma(stream, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = draw_normal01(stream);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = stream.next_open01();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
    }
}

double draw_one(const FittedDistribution& d, rng::Stream& stream) {
    switch (d.family()) {
        case Family::lognormal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (sigma == 0.0) {
                (void)stream.next_open01();  // keep stream advance uniform
                return std::exp(mu);
            }
            return std::exp(mu + sigma * draw_normal01(stream));
        }
        case Family::normal: {
            const double mu = d.param(0), sigma = d.param(1);
            if (sigma == 0.0) {
                (void)stream.next_open01();
                return mu;
            }
            return mu + sigma * draw_normal01(stream);
        }
        case Family::exponential:
            return -std::log(stream.next_open01()) / d.param(0);
        case Family::gamma:
            return draw_gamma(stream, d.param(0), d.param(1));
        case Family::beta: {
            const double x = draw_gamma(stream, d.param(0), 1.0);
            const double y = draw_gamma(stream, d.param(1), 1.0);
            return d.param(2) + (d.param(3) - d.param(2)) * (x / (x + y));
        }
        case Family::gev:
            return quantile(d, stream.next_open01());
        case Family::pareto:
            return d.param(1) * std::pow(stream.next_open01(), -1.0 / d.param(0));
        case Family::student_t: {
            const double nu = d.param(0);
            const double z = draw_normal01(stream);
            const double chi2 = draw_gamma(stream, 0.5 * nu, 2.0);
            return d.param(1) + d.param(2) * z / std::sqrt(chi2 / nu);
        }
        case Family::weibull:
            return d.param(1) * std::pow(-std::log(stream.next_open01()), 1.0 / d.param(0));
        case Family::uniform:
            return d.param(0) + (d.param(1) - d.param(0)) * stream.next_half_open01();
    }
    return 0.0;
}

}  // namespace

std::vector<double> sample(const FittedDistribution& dist, std::size_t count, std::uint64_t seed) {
    if (count == 0) raise(errc::invalid_argument, "sample count must be >= 1");
    rng::Stream stream(seed);
    std::vector<double> out(count);
    for (auto& x : out) x = draw_one(dist, stream);
    return out;
}

// ---------------------------------------------------------------------------
// maximum-likelihood fitting
// ---------------------------------------------------------------------------

namespace {

// Rounding in log-moment sums can leave a fake nonzero variance on a
// constant sample, so degeneracy is tested on the raw values.
bool all_equal(std::span<const double> xs) {
    for (double x : xs)
        if (x != xs.front()) return false;
    return true;
}

FittedDistribution fit_lognormal(std::span<const double> xs) {
    require_positive(xs, Family::lognormal);
    if (all_equal(xs)) raise(errc::degenerate_sample, "lognormal: zero variance in log-samples");
    double mu = 0.0;
    for (double x : xs) mu += std::log(x);
    mu /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        const double dl = std::log(x) - mu;
        ss += dl * dl;
    }
    const double sigma = std::sqrt(ss / static_cast<double>(xs.size()));
    if (sigma == 0.0) raise(errc::degenerate_sample, "lognormal: zero variance in log-samples");
    return FittedDistribution::lognormal(mu, sigma);
}

FittedDistribution fit_normal(std::span<const double> xs) {
    const Moments m = compute_moments(xs);
    if (m.var == 0.0) raise(errc::degenerate_sample, "normal: zero variance");
    return FittedDistribution::normal(m.mean, std::sqrt(m.var));
}

FittedDistribution fit_exponential(std::span<const double> xs) {
    require_positive(xs, Family::exponential);
    const Moments m = compute_moments(xs);
    return FittedDistribution::exponential(1.0 / m.mean);
}

FittedDistribution fit_gamma(std::span<const double> xs) {
    require_positive(xs, Family::gamma);
    if (all_equal(xs)) raise(errc::degenerate_sample, "gamma: zero variance");
    const Moments m = compute_moments(xs);
    double mean_log = 0.0;
    for (double x : xs) mean_log += std::log(x);
    mean_log /= static_cast<double>(xs.size());
    const double s = std::log(m.mean) - mean_log;  // >= 0, zero iff all equal
    if (!(s > 0.0)) raise(errc::degenerate_sample, "gamma: zero variance");

    // Newton on ln(k) - digamma(k) = s, started from the standard
    // closed-form approximation.
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int it = 0; it < 100; ++it) {
        const double g = std::log(k) - special::digamma(k) - s;
        const double gp = 1.0 / k - special::trigamma(k);
        double step = g / gp;
        while (k - step <= 0.0) step *= 0.5;
        k -= step;
        if (std::fabs(g) < 1e-13) break;
    }
    return FittedDistribution::gamma(k, m.mean / k);
}

FittedDistribution fit_beta(std::span<const double> xs) {
    const Moments m = compute_moments(xs);
    const double range = m.max - m.min;
    if (range == 0.0) raise(errc::degenerate_sample, "beta: zero sample range");
    const double eps = 1e-9 * range;
    const double lower = m.min - eps;
    const double upper = m.max + eps;
    const double w = upper - lower;

    // Sufficient statistics make the NLL O(1) per evaluation.
    double s1 = 0.0, s2 = 0.0;
    for (double x : xs) {
        const double y = (x - lower) / w;
        s1 += std::log(y);
        s2 += std::log1p(-y);
    }
    const double n = static_cast<double>(xs.size());
    s1 /= n;
    s2 /= n;

    const double mean_y = (m.mean - lower) / w;
    double var_y = m.var / (w * w);
    const double cap = mean_y * (1.0 - mean_y);
    if (var_y >= cap) var_y = 0.5 * cap;
    const double t = cap / var_y - 1.0;
    const double a0 = std::max(mean_y * t, 1e-3);
    const double b0 = std::max((1.0 - mean_y) * t, 1e-3);

    auto nll = [&](const std::vector<double>& p) {
        const double a = std::exp(p[0]);
        const double b = std::exp(p[1]);
        if (!(a > 0.0) || !(b > 0.0) || a > 1e8 || b > 1e8) return kBarrier;
        return special::ln_beta(a, b) - (a - 1.0) * s1 - (b - 1.0) * s2;
    };
    const auto res = optim::nelder_mead(nll, {std::log(a0), std::log(b0)});
    if (!res.converged)
        raise(errc::non_convergence, "beta MLE exceeded the evaluation budget");
    return FittedDistribution::beta(std::exp(res.x[0]), std::exp(res.x[1]), lower, upper);
}

FittedDistribution fit_gev(std::span<const double> xs) {
    const Moments m = compute_moments(xs);
    if (m.var == 0.0) raise(errc::degenerate_sample, "gev: zero variance");
    const double n = static_cast<double>(xs.size());

    auto nll = [&](const std::vector<double>& p) {
        const double xi = p[0];
        const double loc = p[1];
        const double s = std::exp(p[2]);
        if (!(s > 0.0) || !std::isfinite(s)) return kBarrier;
        double acc = n * p[2];
        if (std::fabs(xi) < 1e-9) {
            for (double x : xs) {
                const double z = (x - loc) / s;
                acc += z + std::exp(-z);
                if (!std::isfinite(acc)) return kBarrier;
            }
            return acc;
        }
        const double inv_xi = 1.0 / xi;
        for (double x : xs) {
            const double t = 1.0 + xi * (x - loc) / s;
            if (t <= 0.0) return kBarrier;
            const double lt = std::log(t);
            acc += (1.0 + inv_xi) * lt + std::exp(-inv_xi * lt);
            if (!std::isfinite(acc)) return kBarrier;
        }
        return acc;
    };

    // Gumbel moment estimates seed the search.
    const double sigma0 = std::sqrt(6.0 * m.var) / kPi;
    const double mu0 = m.mean - kEulerGamma * sigma0;
    const auto res = optim::nelder_mead(nll, {0.1, mu0, std::log(sigma0)});
    if (!res.converged)
        raise(errc::non_convergence, "gev MLE exceeded the evaluation budget");
    return FittedDistribution::gev(res.x[0], res.x[1], std::exp(res.x[2]));
}

FittedDistribution fit_pareto(std::span<const double> xs) {
    require_positive(xs, Family::pareto);
    const Moments m = compute_moments(xs);
    double s = 0.0;
    for (double x : xs) s += std::log(x / m.min);
    if (!(s > 0.0)) raise(errc::degenerate_sample, "pareto: all samples equal");
    return FittedDistribution::pareto(static_cast<double>(xs.size()) / s, m.min);
}

FittedDistribution fit_student_t(std::span<const double> xs) {
    const Moments m = compute_moments(xs);
    if (m.var == 0.0) raise(errc::degenerate_sample, "student_t: zero variance");
    const double n = static_cast<double>(xs.size());

    auto nll = [&](const std::vector<double>& p) {
        const double nu = std::exp(p[0]);
        const double loc = p[1];
        const double s = std::exp(p[2]);
        if (!(nu > 1e-3) || nu > 1e6 || !(s > 0.0)) return kBarrier;
        const double ln_norm = special::ln_gamma(0.5 * (nu + 1.0)) - special::ln_gamma(0.5 * nu) -
                               0.5 * std::log(nu * kPi) - std::log(s);
        double acc = -n * ln_norm;
        const double half = 0.5 * (nu + 1.0);
        for (double x : xs) {
            const double z = (x - loc) / s;
            acc += half * std::log1p(z * z / nu);
            if (!std::isfinite(acc)) return kBarrier;
        }
        return acc;
    };

    const double scale0 = std::sqrt(std::max(m.var * 0.6, 1e-12));
    const auto res = optim::nelder_mead(nll, {std::log(5.0), m.mean, std::log(scale0)});
    if (!res.converged)
        raise(errc::non_convergence, "student_t MLE exceeded the evaluation budget");
    return FittedDistribution::student_t(std::exp(res.x[0]), res.x[1], std::exp(res.x[2]));
}

FittedDistribution fit_weibull(std::span<const double> xs) {
    require_positive(xs, Family::weibull);
    if (all_equal(xs)) raise(errc::degenerate_sample, "weibull: zero variance");
    const double n = static_cast<double>(xs.size());
    std::vector<double> logs(xs.size());
    double mean_log = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        logs[i] = std::log(xs[i]);
        mean_log += logs[i];
    }
    mean_log /= n;
    double var_log = 0.0;
    for (double l : logs) var_log += (l - mean_log) * (l - mean_log);
    var_log /= n;
    if (var_log == 0.0) raise(errc::degenerate_sample, "weibull: zero variance");

    // Profile likelihood equation in the shape k; scaled exponentials keep
    // x^k finite for large k.
    auto profile = [&](double k, double& g, double& gp) {
        double lmax = logs[0];
        for (double l : logs) lmax = std::max(lmax, l);
        double sw = 0.0, swl = 0.0, swl2 = 0.0;
        for (double l : logs) {
            const double w = std::exp(k * (l - lmax));
            sw += w;
            swl += w * l;
            swl2 += w * l * l;
        }
        const double r = swl / sw;
        g = r - 1.0 / k - mean_log;
        gp = (swl2 / sw - r * r) + 1.0 / (k * k);
    };

    double k = 1.2826 / std::sqrt(var_log);  // pi / sqrt(6) over std of logs
    for (int it = 0; it < 100; ++it) {
        double g, gp;
        profile(k, g, gp);
        double step = g / gp;
        while (k - step <= 0.0) step *= 0.5;
        k -= step;
        if (std::fabs(g) < 1e-13) break;
    }

    double lmax = logs[0];
    for (double l : logs) lmax = std::max(lmax, l);
    double sw = 0.0;
    for (double l : logs) sw += std::exp(k * (l - lmax));
    const double lambda = std::exp(lmax + std::log(sw / n) / k);
    return FittedDistribution::weibull(k, lambda);
}

FittedDistribution fit_uniform(std::span<const double> xs) {
    const Moments m = compute_moments(xs);
    if (m.min == m.max) raise(errc::degenerate_sample, "uniform: zero sample range");
    return FittedDistribution::uniform(m.min, m.max);
}

}  // namespace

FittedDistribution fit_mle(std::span<const double> samples, Family family) {
    if (samples.size() < 2)
        raise(errc::insufficient_data, "fit_mle needs at least 2 samples");
    switch (family) {
        case Family::lognormal: return fit_lognormal(samples);
        case Family::normal: return fit_normal(samples);
        case Family::exponential: return fit_exponential(samples);
        case Family::gamma: return fit_gamma(samples);
        case Family::beta: return fit_beta(samples);
        case Family::gev: return fit_gev(samples);
        case Family::pareto: return fit_pareto(samples);
        case Family::student_t: return fit_student_t(samples);
        case Family::weibull: return fit_weibull(samples);
        case Family::uniform: return fit_uniform(samples);
    }
    raise(errc::invalid_argument, "unknown family");
}

// ---------------------------------------------------------------------------
// histogram scoring and ranking
// ---------------------------------------------------------------------------

double rss_score(const FittedDistribution& dist, std::span<const double> samples, int bin_count) {
    if (bin_count < 5) raise(errc::invalid_argument, "bin_count must be >= 5");
    if (samples.empty()) raise(errc::insufficient_data, "rss_score needs samples");
    const Moments m = compute_moments(samples);
    if (m.min == m.max) raise(errc::degenerate_sample, "rss_score: min == max");

    const double width = (m.max - m.min) / bin_count;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bin_count), 0);
    for (double x : samples) {
        auto idx = static_cast<std::size_t>((x - m.min) / width);
        if (idx >= counts.size()) idx = counts.size() - 1;  // x == max
        ++counts[idx];
    }

    const double n = static_cast<double>(samples.size());
    double rss = 0.0;
    // The empirical density is a bin average, so the model side is averaged
    // over the same bin; evaluating the pdf at the center instead biases the
    // score against sharply curved densities in wide bins.
    for (int b = 0; b < bin_count; ++b) {
        const double density = static_cast<double>(counts[static_cast<std::size_t>(b)]) / (n * width);
        const double lo = m.min + b * width;
        const double hi = b + 1 == bin_count ? m.max : m.min + (b + 1) * width;
        const double model = (cdf(dist, hi) - cdf(dist, lo)) / width;
        const double diff = density - model;
        rss += diff * diff;
    }
    return rss;
}

FitRanking rank_fits(std::span<const double> samples, std::span<const Family> families,
                     int bin_count) {
    if (samples.size() < 20)
        raise(errc::insufficient_data, "rank_fits needs at least 20 samples");

    FitRanking ranking;
    ranking.sample_count = samples.size();
    ranking.bin_count = bin_count;
    for (Family f : families) {
        try {
            RankedFit fit{fit_mle(samples, f), 0.0};
            fit.rss = rss_score(fit.dist, samples, bin_count);
            ranking.entries.push_back(std::move(fit));
        } catch (const Error& e) {
            ranking.skipped.push_back({f, e.what()});
        }
    }
    if (ranking.entries.empty())
        raise(errc::all_families_failed, "no candidate family could be fitted");

    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const RankedFit& a, const RankedFit& b) {
        if (a.rss != b.rss) return a.rss < b.rss;
        return static_cast<int>(a.dist.family()) < static_cast<int>(b.dist.family());
    });
    return ranking;
}

}  // namespace eoelab::distfit
