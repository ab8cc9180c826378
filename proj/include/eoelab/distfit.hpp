#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eoelab/errors.hpp"

namespace eoelab::distfit {

// The candidate catalog: the families reported for velocity and holding
// time fits, plus common baselines. Enumeration order is the deterministic
// tie-break for equal-RSS rankings.
enum class Family {
    lognormal,
    normal,
    exponential,
    gamma,
    beta,
    gev,
    pareto,
    student_t,
    weibull,
    uniform,
};

inline constexpr Family kAllFamilies[] = {
    Family::lognormal, Family::normal,  Family::exponential, Family::gamma,
    Family::beta,      Family::gev,     Family::pareto,      Family::student_t,
    Family::weibull,   Family::uniform,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// True when the family's support is restricted to positive reals.
bool requires_positive_support(Family f);

// A parametric family plus its estimated parameters. Parameter slots by
// family:
//   lognormal(mu, sigma)            normal(mu, sigma)
//   exponential(rate)               gamma(shape, scale)
//   beta(alpha, beta, lower, upper) gev(shape_xi, loc, scale)
//   pareto(alpha, x_min)            student_t(dof, loc, scale)
//   weibull(shape, scale)           uniform(lower, upper)
// sigma = 0 is tolerated for normal/lognormal so degenerate (point-mass)
// distributions can drive simulations; fit_mle never produces one.
class FittedDistribution {
  public:
    static FittedDistribution lognormal(double mu, double sigma);
    static FittedDistribution normal(double mu, double sigma);
    static FittedDistribution exponential(double rate);
    static FittedDistribution gamma(double shape, double scale);
    static FittedDistribution beta(double alpha, double beta, double lower, double upper);
    static FittedDistribution gev(double shape_xi, double loc, double scale);
    static FittedDistribution pareto(double alpha, double x_min);
    static FittedDistribution student_t(double dof, double loc, double scale);
    static FittedDistribution weibull(double shape, double scale);
    static FittedDistribution uniform(double lower, double upper);

    // Generic constructor from a parameter vector in slot order; validates
    // through the per-family factories. For deserialization.
    static FittedDistribution from_params(Family f, std::span<const double> params);

    Family family() const { return family_; }
    std::size_t param_count() const;
    double param(std::size_t i) const { return params_[i]; }

    // Parameter names in slot order, e.g. {"mu", "sigma"}.
    std::vector<std::string> param_names() const;

  private:
    FittedDistribution(Family f, std::initializer_list<double> params);

    Family family_;
    double params_[4] = {0, 0, 0, 0};
};

// Maximum-likelihood fit. Closed forms where they exist (lognormal, normal,
// exponential, pareto, uniform), Newton on the digamma equation for gamma
// and on the profile likelihood for weibull, Nelder-Mead on the negative
// log-likelihood for gev / student_t / beta.
// Throws UnsupportedSupport, DegenerateSample, NonConvergence,
// InsufficientData.
FittedDistribution fit_mle(std::span<const double> samples, Family family);

double pdf(const FittedDistribution& dist, double x);
double cdf(const FittedDistribution& dist, double x);
double quantile(const FittedDistribution& dist, double p);

// count i.i.d. draws, bit-identical for identical (dist, count, seed).
// Inverse-CDF sampling where the quantile is closed-form, transformation
// methods (Marsaglia-Tsang gamma, gamma ratios for beta, normal/chi mix
// for student_t) otherwise.
std::vector<double> sample(const FittedDistribution& dist, std::size_t count, std::uint64_t seed);

// Histogram goodness-of-fit: equal-width density-normalized histogram over
// [min, max]; RSS = sum over bins of the squared gap between the empirical
// bin density and the model's average density over the same bin.
double rss_score(const FittedDistribution& dist, std::span<const double> samples, int bin_count);

struct RankedFit {
    FittedDistribution dist;
    double rss = 0.0;
};

struct SkippedFamily {
    Family family;
    std::string reason;
};

struct FitRanking {
    std::vector<RankedFit> entries;  // ascending by rss
    std::vector<SkippedFamily> skipped;
    std::size_t sample_count = 0;
    int bin_count = 0;
};

// Fit every requested family, score by RSS, sort ascending. Families whose
// support excludes the samples (or whose fit fails) are recorded as skips.
// Requires at least 20 samples; throws AllFamiliesFailed when nothing fits.
FitRanking rank_fits(std::span<const double> samples,
                     std::span<const Family> families = kAllFamilies, int bin_count = 50);

}  // namespace eoelab::distfit
