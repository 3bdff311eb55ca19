#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bayescomp/dist.hpp"

namespace bayescomp {

// f(y|theta) = h(y) exp{theta . R(y) - Psi(theta)} for scalar observations.
struct ExpFamilySpec {
    std::string name;
    Eigen::Index dim = 1;
    bool discrete = false;
    Interval support{};  // observation support; integer range when discrete

    std::function<Eigen::VectorXd(double)> statistic;
    std::function<double(double)> log_carrier;
    std::function<double(const Eigen::VectorXd&)> log_partition;
    std::function<bool(const Eigen::VectorXd&)> in_domain;

    // Optional analytic derivatives; central differences are used when empty.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

// Names: normal-known-var, binomial, geometric, poisson, exponential.
// `trials` is used by the binomial only.
ExpFamilySpec builtin_expfam(std::string_view name, int trials = 10);

// Weibull with known power is exponential-family in its rate; an unknown
// power throws UnsupportedError.
ExpFamilySpec weibull_expfam(std::optional<double> power);

double expfam_logpdf(const ExpFamilySpec& fam, const Eigen::VectorXd& theta, double y);
Eigen::VectorXd log_partition_gradient(const ExpFamilySpec& fam, const Eigen::VectorXd& theta);
Eigen::MatrixXd log_partition_hessian(const ExpFamilySpec& fam, const Eigen::VectorXd& theta);

// E_theta[R(Y)] = grad Psi(theta). Throws std::domain_error outside the natural domain.
Eigen::VectorXd expfam_mean(const ExpFamilySpec& fam, const Eigen::VectorXd& theta);

struct ConjugateHyper {
    Eigen::VectorXd xi;
    double lambda;
};

// xi' = xi + sum R(y_i), lambda' = lambda + n.
ConjugateHyper conjugate_update(const ConjugateHyper& hyper, const ExpFamilySpec& fam,
                                std::span<const double> data);

enum class JeffreysKind { location, scale, expfam };

using LogPrior = std::function<double(const Eigen::VectorXd&)>;

// location: 0; scale: -log theta; expfam: log sqrt(det H(theta)).
LogPrior jeffreys_prior(JeffreysKind kind, const ExpFamilySpec* fam = nullptr);

// Prior N(xi, s2/lambda_mu) x IG(lambda_sigma, alpha) on (mu, s2), the inverse gamma
// with density proportional to s2^{-lambda_sigma-1} exp(-alpha/s2).
struct NormalNigPrior {
    double xi;
    double lambda_mu;
    double lambda_sigma;
    double alpha;
};

// Posterior kernel s2^{-lambda_sigma_d} exp{-(lambda_mu_d (mu - xi_d)^2 + alpha_d) / 2 s2}.
struct NormalNigPosterior {
    double lambda_sigma_d;
    double lambda_mu_d;
    double xi_d;
    double alpha_d;
    std::size_t n;

    [[nodiscard]] ScalarFamily variance_marginal() const;  // IG(lambda_sigma_d - 3/2, alpha_d / 2)
    [[nodiscard]] ScalarFamily mean_marginal() const;      // Student t
    [[nodiscard]] double log_kernel(double mu, double s2) const;
};

NormalNigPosterior normal_nig_posterior(const NormalNigPrior& prior, std::span<const double> data);

// Prior marginal of mu, T(2 lambda_sigma, xi, alpha / (lambda_mu lambda_sigma)).
ScalarFamily nig_prior_mean_marginal(const NormalNigPrior& prior);

// P(mu < 0 | x) for x ~ N(mu, sigma^2), mu ~ N(xi, tau^2).
double posterior_prob_mu_negative(double x, double sigma, double xi, double tau);

// Under the 0-a0-a1 loss the Bayes rule picks the null (indicator 1) when
// P(Theta0|x) > a1/(a0+a1) and the alternative (indicator 0) otherwise.
enum class TestDecision { alternative = 0, null = 1 };
TestDecision bayes_test_decision(double p0, double a0, double a1);

// Two-point hypotheses: P(theta0|x) from the prior weight and the two likelihoods.
double two_point_posterior(double rho0, double f0, double f1);

// Normalizing integral over [-L, L] for L = width, 2 width, ...; the sequence
// of log integrals is reported together with whether it settled.
struct NormalizerProbe {
    std::vector<double> log_integrals;
    bool stabilized;
};
NormalizerProbe probe_normalizer(const std::function<double(double)>& log_density, double width,
                                 int doublings, double rel_tol = 1e-6);

}  // namespace bayescomp
