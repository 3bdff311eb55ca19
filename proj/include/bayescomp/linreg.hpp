#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bayescomp/dist.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"

namespace bayescomp {

// Design matrix with the intercept as column 0.
struct RegressionData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    [[nodiscard]] Eigen::Index n() const noexcept { return X.rows(); }
    [[nodiscard]] Eigen::Index p() const noexcept { return X.cols(); }  // k + 1
    // Shape and rank checks; singular value ratio below 1e-10 is rank deficient.
    void validate() const;
};

RegressionData make_regression_data(Eigen::MatrixXd X, Eigen::VectorXd y);

struct ConjugateRegressionPrior {
    Eigen::VectorXd beta_tilde;
    Eigen::MatrixXd M;  // prior precision factor: beta | sigma^2 ~ N(beta_tilde, sigma^2 M^-1)
    double a = 1.0;
    double b = 1.0;

    void validate(Eigen::Index p) const;
};

struct GPrior {
    double c = 1.0;
    Eigen::VectorXd beta_tilde;
    // Exponent of pi(c) ~ c^-alpha on c = 1, 2, ...; set for the hierarchical version.
    std::optional<double> hierarchical_exponent;
};

struct JeffreysRegressionPrior {};

using RegressionPrior = std::variant<ConjugateRegressionPrior, GPrior, JeffreysRegressionPrior>;

struct InverseGammaParams {
    double shape;
    double scale;
};

// Multivariate Student law T(df, center, scale).
struct PosteriorStudentT {
    double df;
    Eigen::VectorXd center;
    Eigen::MatrixXd scale;

    [[nodiscard]] MultivariateStudentT law() const { return {df, center, scale}; }
    [[nodiscard]] double logpdf(const Eigen::VectorXd& x) const { return law().logpdf(x); }
};

struct OlsFit {
    Eigen::VectorXd beta_hat;
    double s2;                  // residual sum of squares
    Eigen::MatrixXd xtx_inv;    // (X'X)^-1, computed once
    Eigen::VectorXd std_error;  // sqrt(s2/(n-p) diag (X'X)^-1)
};

OlsFit ols(const RegressionData& data);

// Normal-inverse-gamma posterior: beta | sigma^2 ~ N(mean, sigma^2 precision^-1).
struct ConjugateRegressionPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;    // M + X'X
    double quadratic_form;        // (bt-bh)'(M^-1 + (X'X)^-1)^-1 (bt-bh)
    InverseGammaParams sigma2;
    [[nodiscard]] PosteriorStudentT beta_marginal() const;
};

ConjugateRegressionPosterior conjugate_posterior(const RegressionData& data, const ConjugateRegressionPrior& prior);

// Both sides of the two inverse identities; used by the property tests.
struct MatrixIdentityCheck {
    double inverse_gap;   // (M+X'X)^-1 against M^-1 - M^-1 (M^-1+(X'X)^-1)^-1 M^-1
    double inverse_gap2;  // against the (X'X)^-1 form
    double product_gap;   // X'X (M+X'X)^-1 M against (M^-1+(X'X)^-1)^-1
};
MatrixIdentityCheck check_matrix_identities(const Eigen::MatrixXd& M, const Eigen::MatrixXd& xtx);

struct HpdRegion {
    double level;  // coverage 1 - alpha
    Eigen::VectorXd center;
    Eigen::MatrixXd scale;
    double radius;  // bound on (b-center)' scale^-1 (b-center)

    [[nodiscard]] bool contains(const Eigen::VectorXd& beta) const;
};

// Radius p F_{1-alpha}(p, df), since the quadratic form over p is F(p, df).
HpdRegion hpd_region(const PosteriorStudentT& post, double alpha);

PosteriorStudentT predictive(const RegressionData& data, const RegressionPrior& prior, const Eigen::MatrixXd& x_new);

// Conjugate: log density of T_n(2a, X bt, (b/a)(I + X M^-1 X')).
// Fixed-c G-prior: log Gamma(n/2) pi^-n/2 (c+1)^-(k+1)/2 [s^2 + (bt-bh)'X'X(bt-bh)/(c+1)]^-n/2,
// relative to the 1/sigma^2 measure shared by all G-prior models.
double marginal_likelihood(const RegressionData& data, const RegressionPrior& prior);

// log det(I_n + c X (X'X)^-1 X') by direct factorization.
double log_det_gprior_kernel(const Eigen::MatrixXd& X, double c);

// Null-space construction for H0: R beta = 0. beta = N beta0 with N an orthonormal basis
// of ker R, X0 = X N, beta0 ~ N(N' bt, sigma^2 (N'MN)^-1) and the same (a, b).
struct RestrictedModel {
    Eigen::MatrixXd basis;  // N, p x (p - q)
    RegressionData data;
    ConjugateRegressionPrior prior;
};
RestrictedModel restrict_model(const RegressionData& data, const ConjugateRegressionPrior& prior,
                               const Eigen::MatrixXd& R);

// log B01 = log m0(y) - log m1(y).
double bayes_factor_restriction(const RegressionData& data, const ConjugateRegressionPrior& prior,
                                const Eigen::MatrixXd& R);

struct GPriorPosterior {
    PosteriorStudentT beta;
    InverseGammaParams sigma2;
    Eigen::MatrixXd conditional_scale;  // beta | sigma^2 covariance over sigma^2
};
GPriorPosterior gprior_posterior(const RegressionData& data, const GPrior& prior);

// Noninformative prior 1/sigma^2: T_p(n-p, bh, s^2 (X'X)^-1/(n-p)).
PosteriorStudentT jeffreys_posterior(const RegressionData& data);
// Coefficient j marginal: T_1(n-p, bh_j, w_jj s^2/(n-p)).
PosteriorStudentT jeffreys_coefficient_marginal(const RegressionData& data, Eigen::Index j);

// Series over c = 1, 2, ... with terms c^-alpha (c+1)^-(q+1)/2 [A - c/(c+1) B]^-n/2.
struct SeriesTerm {
    double alpha;
    double q_plus_one;  // number of columns in the model
    double n;
    double yty;         // A
    double fitted;      // B = y'P y
    [[nodiscard]] double log_term(double c) const;
};

struct SeriesSum {
    double log_value;
    std::size_t direct_terms;  // summed one by one; the rest comes from the tail estimate
    double tail_share;         // fraction of the total carried by the tail estimate
};

// Direct summation until the Euler-Maclaurin tail estimate is below 1e-12 of the head
// or 2^16 terms; beyond that the tail is integral + half term + first derivative correction.
SeriesSum sum_series(const SeriesTerm& term, double abs_tol = 1e-12);

struct HierarchicalCPosterior {
    Eigen::VectorXd beta_estimate;      // E[c/(c+1)] beta_hat
    double shrinkage;                   // E[c/(c+1) | y]
    std::vector<double> c_weights;      // normalized posterior of c = 1..size
    double tail_mass;                   // posterior mass beyond the listed c values
    std::size_t direct_terms;
};

// pi(c) ~ c^-alpha with beta_tilde = 0.
HierarchicalCPosterior hier_c_posterior(const RegressionData& data, double alpha_exponent,
                                        std::size_t listed = 200);

// Variable selection over the k non-intercept columns; the intercept is always kept.
struct ModelWeights {
    std::vector<std::vector<bool>> models;  // in enumeration order (bit j = variable j+1)
    std::vector<double> probabilities;
    [[nodiscard]] std::size_t argmax() const;
};

double log_model_weight(const RegressionData& data, const std::vector<bool>& gamma, double alpha);
ModelWeights enumerate_models(const RegressionData& data, double alpha);

struct VariableSelectionTrace {
    std::vector<std::vector<bool>> draws;
    ModelWeights frequencies;  // empirical, same order as enumerate_models
};

VariableSelectionTrace variable_selection_gibbs(const RegressionData& data, double alpha, Stream& rng,
                                                std::size_t iterations, std::size_t burnin = 100);

// Reconstruction g(y1,y2) = g2(y2|y1) / int g2(v|y1)/g1(y1|v) dv on a grid.
struct JointReconstruction {
    bool compatible;
    std::string reason;           // empty when compatible
    Eigen::MatrixXd density;      // rows follow grid1, columns grid2; normalized on the grid
    double max_conditional_error;
};

JointReconstruction joint_from_conditionals_2var(const std::function<double(double, double)>& g1_given2,
                                                 const std::function<double(double, double)>& g2_given1,
                                                 const std::vector<double>& grid1,
                                                 const std::vector<double>& grid2);

enum class DiskParameterization { raw, rotated };

struct TwoDiskRun {
    Eigen::MatrixXd trace;  // sweeps x 2, in the original coordinates
    bool crossed;           // visited both disks
    double upper_disk_share;
};

// Gibbs on the uniform law over the unit disks centred at (1,1) and (-1,-1).
TwoDiskRun two_disk_gibbs_demo(DiskParameterization param, const Eigen::Vector2d& start, Stream& rng,
                               std::size_t sweeps);

}  // namespace bayescomp
