#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bayescomp/random.hpp"

namespace bayescomp {

enum class Family {
    normal,         // (mean, variance)
    gamma,          // (shape, rate)
    inverse_gamma,  // (shape, scale): density b^a/G(a) x^{-a-1} e^{-b/x}
    beta,           // (a, b)
    student_t,      // (df, location, squared scale)
    cauchy,         // (location, scale)
    poisson,        // (rate)
    binomial,       // (trials, success probability)
    exponential,    // (rate)
    weibull_power,  // (shape, rate, power): X^power ~ gamma(shape, rate)
    lognormal,      // (mean of log, variance of log)
};

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct Interval {
    double lower;
    double upper;
};

class ScalarFamily {
public:
    ScalarFamily(Family tag, std::vector<double> params);

    static ScalarFamily normal(double mean, double variance);
    static ScalarFamily gamma(double shape, double rate);
    static ScalarFamily inverse_gamma(double shape, double scale);
    static ScalarFamily beta(double a, double b);
    static ScalarFamily student_t(double df, double location = 0.0, double scale2 = 1.0);
    static ScalarFamily cauchy(double location, double scale);
    static ScalarFamily poisson(double rate);
    static ScalarFamily binomial(double trials, double prob);
    static ScalarFamily exponential(double rate);
    static ScalarFamily weibull_power(double shape, double rate, double power);
    static ScalarFamily lognormal(double meanlog, double varlog);

    [[nodiscard]] Family family() const noexcept { return tag_; }
    [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
    [[nodiscard]] double param(std::size_t i) const { return params_.at(i); }
    [[nodiscard]] bool discrete() const noexcept;
    [[nodiscard]] Interval support() const;
    [[nodiscard]] bool in_support(double x) const;

private:
    Family tag_;
    std::vector<double> params_;
};

// Log density (log mass for discrete families). Throws std::domain_error outside the support.
double logpdf(const ScalarFamily& fam, double x);
double cdf(const ScalarFamily& fam, double x);
double quantile(const ScalarFamily& fam, double p);
double mean(const ScalarFamily& fam);
double variance(const ScalarFamily& fam);

double draw(const ScalarFamily& fam, Stream& rng);
std::vector<double> sample(const ScalarFamily& fam, Stream& rng, std::size_t n);

// Building blocks shared by the samplers in other modules.
double std_normal(Stream& rng);
double gamma_unit(Stream& rng, double shape);  // rate 1
double beta_variate(Stream& rng, double a, double b);
std::uint64_t poisson_variate(Stream& rng, double rate);
std::uint64_t binomial_variate(Stream& rng, std::uint64_t trials, double prob);
std::size_t categorical(Stream& rng, std::span<const double> probs);
std::size_t categorical_log(Stream& rng, std::span<const double> log_weights);

double normal_cdf(double z);
double normal_quantile(double p);
double normal_logpdf(double x, double mean, double variance);

enum class Side { negative, positive };

// N(mu, sigma^2) restricted to (-inf, 0) or (0, inf) by inverse-cdf composition.
// Throws NumericalError when the retained mass is below 1e-300.
double sample_truncated_normal(double mu, double sigma, Side side, Stream& rng);

std::vector<double> sample_dirichlet(std::span<const double> delta, Stream& rng);

// KS p-value of F(draws) against U(0,1), F being the family's own cdf.
double inverse_cdf_uniformity(const ScalarFamily& fam, std::span<const double> draws);

class MultivariateStudentT {
public:
    MultivariateStudentT(double df, Eigen::VectorXd location, Eigen::MatrixXd scale);

    [[nodiscard]] double df() const noexcept { return df_; }
    [[nodiscard]] const Eigen::VectorXd& location() const noexcept { return location_; }
    [[nodiscard]] const Eigen::MatrixXd& scale() const noexcept { return scale_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return location_.size(); }

    [[nodiscard]] double logpdf(const Eigen::VectorXd& x) const;
    Eigen::VectorXd draw(Stream& rng) const;
    // Covariance df/(df-2) * scale; requires df > 2.
    [[nodiscard]] Eigen::MatrixXd covariance() const;

private:
    double df_;
    Eigen::VectorXd location_;
    Eigen::MatrixXd scale_;
    Eigen::MatrixXd chol_;  // lower factor of scale
    double log_det_;
};

Eigen::VectorXd draw_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower,
                              Stream& rng);

}  // namespace bayescomp
