#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace bayescomp {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_sum_exp(std::span<const double> v);
double log_add_exp(double a, double b);

// log(n!) through lgamma; valid for any real n > -1.
inline double lfact(double n) { return std::lgamma(n + 1.0); }
double log_choose(double n, double k);

// Normalizes log-weights in place into probabilities; returns the log normalizer.
double normalize_log_weights(std::vector<double>& w);

struct KsResult {
    double statistic;
    double p_value;
};

// Asymptotic Kolmogorov tail with Stephens' finite-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);
KsResult ks_uniform(std::vector<double> u);
KsResult ks_test(std::span<const double> draws, const std::function<double(double)>& cdf);

// Upper tail of a chi-square with `df` degrees of freedom.
double chi_square_sf(double x, double df);

// Pearson goodness of fit; cells with expected count below `min_expected`
// are pooled into their neighbour before the statistic is formed.
struct ChiSquareResult {
    double statistic;
    double df;
    double p_value;
};
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected = 5.0);

double total_variation(std::span<const double> p, std::span<const double> q);

// Adaptive Gauss-Kronrod; limits may be infinite.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

struct MeanSe {
    double mean;
    double se;
};
MeanSe mean_se(std::span<const double> x);

// Batch-means standard error for correlated chains.
MeanSe batch_mean_se(std::span<const double> x, std::size_t batches = 50);

}  // namespace bayescomp
