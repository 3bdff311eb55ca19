#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"
#include "bayescomp/sampling.hpp"

namespace bayescomp {

enum class Link { probit, logit };

struct BinaryGlmData {
    Eigen::MatrixXd X;  // n x k
    Eigen::VectorXd y;  // entries 0 or 1
    Link link = Link::probit;

    [[nodiscard]] Eigen::Index n() const noexcept { return X.rows(); }
    [[nodiscard]] Eigen::Index k() const noexcept { return X.cols(); }
    // Binary y, full column rank, at least one success and one failure.
    void validate() const;
};

BinaryGlmData make_glm_data(Eigen::MatrixXd X, Eigen::VectorXd y, Link link);

// log Phi(t) without underflow for very negative t.
double log_normal_cdf(double t);

double glm_loglik(const BinaryGlmData& data, const Eigen::VectorXd& beta);

// Logit sufficient statistic sum_i y_i x_i.
Eigen::VectorXd logit_sufficient_statistic(const BinaryGlmData& data);

bool poisson_regression_link_check(const Eigen::VectorXd& mu, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

// Cell probabilities of the multinomial law of Poisson counts given their total.
Eigen::VectorXd poisson_to_multinomial(const Eigen::VectorXd& mu);

enum class GlmPrior { flat, noninformative };

// flat: the log-likelihood. noninformative: adds log of
// |X'X|^1/2 Gamma((2k-1)/4) pi^-k/2 (b'X'Xb)^-(2k-1)/4, which is -inf at b = 0.
double glm_log_posterior(const BinaryGlmData& data, GlmPrior prior, const Eigen::VectorXd& beta);

struct GlmFit {
    Eigen::VectorXd beta;
    Eigen::MatrixXd covariance;  // inverse observed information
    double loglik;
    bool converged;
    int iterations;
};

// Newton-Raphson with step halving; stops on a relative deviance change below 1e-10
// or after 25 iterations, so separated data return a large finite fit.
GlmFit glm_mle(const BinaryGlmData& data);

struct GlmChain {
    ChainTrace trace;
    double acceptance;
    Eigen::VectorXd mean;  // after burn-in
    Eigen::MatrixXd covariance;
    bool separation_warning;  // mean norm above 1e3 with acceptance above 0.9
};

// Random walk b' ~ N(b, scale * Sigma) started at the maximum likelihood fit, Sigma its covariance.
GlmChain mh_glm_sampler(const BinaryGlmData& data, GlmPrior prior, double scale, Stream& rng,
                        std::size_t iterations, std::size_t burnin = 0);

// Latent z ~ N(mean, 1) restricted to z > 0 when y = 1 and z <= 0 when y = 0.
double draw_latent(double mean, bool success, Stream& rng);

struct AlbertChibChain {
    GlmChain chain;
    std::size_t sign_violations;  // latent draws on the wrong side, always 0
};

AlbertChibChain albert_chib_gibbs(const BinaryGlmData& data, Stream& rng, std::size_t iterations,
                                  std::size_t burnin = 0);

struct GlmBayesFactor {
    double log_b10;
    double jackknife_se;
    double log_marginal_full;
    double log_marginal_null;
};

// Importance sampling of both marginals under the noninformative prior. The proposal is a
// Student t with 5 df centred on an MH chain mean with twice the chain covariance.
GlmBayesFactor glm_bayes_factor(const BinaryGlmData& data, const std::vector<Eigen::Index>& subset0, Stream& rng,
                                std::size_t n_imp, std::size_t chain_iterations = 10'000);

// log Jacobian of b -> p = F(X~ b): sum_i log f(x~_i'b) + log|det X~|, f the link density.
double prior_transform_jacobian(Link link, const Eigen::MatrixXd& Xtilde, const Eigen::VectorXd& beta);

// Prior on b induced by independent Beta(K_i g_i, K_i (1 - g_i)) laws on p_i = F(x~_i'b).
double induced_log_prior(Link link, const Eigen::MatrixXd& Xtilde, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& K, const Eigen::VectorXd& g);

struct ContingencyTable2x2 {
    std::int64_t n11 = 0, n12 = 0, n21 = 0, n22 = 0;

    [[nodiscard]] std::int64_t total() const noexcept { return n11 + n12 + n21 + n22; }
    void validate() const;
};

struct ContingencyMarginals {
    double log_full;   // multinomial with Dirichlet(1/2, 1/2, 1/2, 1/2) cell probabilities
    double log_indep;  // multinomial with cells a b, uniform priors on both margins
};

ContingencyMarginals contingency_marginals(const ContingencyTable2x2& table);
// log B01 = log m0 - log m.
double contingency_bf(const ContingencyTable2x2& table);

struct SubmodelCount {
    long long single_factor;
    long long two_factor;
    long long three_factor;
    long long total;
};

// Hierarchical log-linear submodels of a four-way table.
SubmodelCount submodel_count(int n_vars);

}  // namespace bayescomp
