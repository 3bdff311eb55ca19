#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"
#include "bayescomp/sampling.hpp"

namespace bayescomp {

struct MixtureParams {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;

    [[nodiscard]] int k() const noexcept { return static_cast<int>(weights.size()); }
    // Equal sizes, weights on the simplex, positive variances.
    void validate() const;
};

// mu_j | s2_j ~ N(mean, s2_j / prior_count), s2_j ~ IG(df / 2, scale / 2).
struct ComponentPrior {
    double mean = 0.0;
    double prior_count = 1.0;
    double df = 1.0;
    double scale = 1.0;
};

// Current parameter values (also the starting point of samplers) and prior.
struct MixtureModel {
    MixtureParams params;
    std::vector<ComponentPrior> priors;
    std::vector<double> weight_prior;  // Dirichlet; (alpha, beta) when k = 2

    [[nodiscard]] int k() const noexcept { return params.k(); }
    void validate() const;
};

double mixture_loglik(const MixtureParams& params, std::span<const double> data);

struct MixtureSample {
    std::vector<double> data;
    std::vector<int> labels;
};

MixtureSample simulate_mixture(const MixtureParams& params, std::size_t n, Stream& rng);

// ---------------------------------------------------------------- completion

// Labels are 0-based.
struct AllocationStats {
    std::vector<std::int64_t> counts;
    std::vector<double> means;       // 0 for empty components
    std::vector<double> sq_dev;      // sum of squared deviations from the subsample mean
};

AllocationStats allocation_stats(std::span<const double> data, std::span<const int> z, int k);

struct ComponentConditional {
    double location;  // posterior mean of mu_j
    double count;     // prior_count + l_j; mu_j | s2_j has variance s2_j / count
    double shape;     // (df + l_j) / 2
    double scale;     // s_j(z) / 2
};

struct CompleteConditionals {
    std::vector<double> weight_dirichlet;
    std::vector<ComponentConditional> components;
};

CompleteConditionals complete_conditionals(const MixtureModel& model, std::span<const double> data,
                                           std::span<const int> z);

// log posterior mass of z up to a constant shared by all allocations.
double allocation_log_weight(const MixtureModel& model, std::span<const double> data, std::span<const int> z);

// ---------------------------------------------------------------- Gibbs

enum class MixtureParameterization { means, location_scale };

struct MixtureGibbsOptions {
    MixtureParameterization parameterization = MixtureParameterization::means;
    bool update_weights = false;
    bool update_variances = false;
};

// Columns: means (k), weights (k), variances (k).
// The location-scale variant (k = 2, fixed weights and variances, flat prior on
// mu0 and xi with mu1 = mu0 - xi, mu2 = mu0 + xi) ignores the mean priors.
ChainTrace gibbs_mixture(const MixtureModel& model, std::span<const double> data, const MixtureGibbsOptions& options,
                         Stream& rng, std::size_t sweeps);

// Mean mixture with fixed weights and variances; one Gibbs sweep targeting
// posterior^gamma through gamma replicated allocations. gamma = 1 is plain Gibbs.
std::vector<double> annealed_sweep(const MixtureModel& model, std::span<const double> data,
                                   std::span<const double> means, int gamma, Stream& rng);

// One sweep per entry of gammas; columns are the means.
ChainTrace annealed_gibbs_mixture(const MixtureModel& model, std::span<const double> data,
                                  std::span<const int> gammas, Stream& rng);

// Mean-mixture posterior in the means, weights and variances held at model values.
double mean_mixture_log_posterior(const MixtureModel& model, std::span<const double> data,
                                  std::span<const double> means);
TargetDensity mean_mixture_target(const MixtureModel& model, std::vector<double> data);

// Tempering pump over the means with random-walk kernels on each rung.
ChainTrace tempered_mixture_chain(const MixtureModel& model, std::span<const double> data,
                                  const TemperingLadder& ladder, double scale, Stream& rng, std::size_t iterations);

// Random-walk acceptance rate on posterior^power for each power, from the model means.
std::vector<double> tempered_acceptance_profile(const MixtureModel& model, std::span<const double> data,
                                                std::span<const double> powers, double scale, Stream& rng,
                                                std::size_t steps);

// ---------------------------------------------------------------- posterior grid

// Two-mean posterior on axis x axis; (i, j) is mu1 = axis[i], mu2 = axis[j].
struct MeanPosteriorGrid {
    std::vector<double> axis;
    Eigen::MatrixXd log_density;

    [[nodiscard]] std::pair<double, double> map() const;
    [[nodiscard]] std::pair<double, double> posterior_mean() const;
    // Grid local maximum reached by steepest ascent from the node nearest to the point.
    [[nodiscard]] std::pair<Eigen::Index, Eigen::Index> basin(double mu1, double mu2) const;
    [[nodiscard]] bool in_map_basin(double mu1, double mu2) const;
};

MeanPosteriorGrid mean_posterior_grid(const MixtureModel& model, std::span<const double> data, double lo, double hi,
                                      std::size_t points);

struct TrappingReport {
    std::size_t chains = 0;
    std::size_t trapped = 0;  // second-half mean outside the MAP basin
    [[nodiscard]] double frequency() const noexcept {
        return chains ? static_cast<double>(trapped) / static_cast<double>(chains) : 0.0;
    }
};

TrappingReport mode_trapping(const MixtureModel& model, std::span<const double> data,
                             const MixtureGibbsOptions& options, std::span<const std::pair<double, double>> starts,
                             const MeanPosteriorGrid& grid, Stream& rng, std::size_t sweeps);

// ---------------------------------------------------------------- EM

struct EmOptions {
    std::size_t max_iterations = 50;
    bool fix_weights = false;
    double variance_floor = 1e-12;
};

struct EmResult {
    std::vector<MixtureParams> path;  // path[0] is the start
    std::vector<double> loglik;
    bool degenerate = false;          // some variance fell below the floor; iteration stopped there
};

EmResult em_mixture(const MixtureParams& start, std::span<const double> data, const EmOptions& options = {});

// Weight U(0,1), means mean + 2 sd N(0,1), variances var Exp(1).
MixtureParams em_random_start(std::span<const double> data, Stream& rng);

// ---------------------------------------------------------------- likelihood surface

// 0.5 N(0,1) + 0.5 N(mu, var).
double half_mixture_loglik(std::span<const double> data, double mu, double var);

struct LikelihoodSurface {
    std::vector<double> means;
    std::vector<double> variances;
    Eigen::MatrixXd loglik;  // (i, j) = (means[i], variances[j])
};

LikelihoodSurface likelihood_surface(std::span<const double> data, std::vector<double> means,
                                     std::vector<double> variances);

struct ExplosionProbe {
    std::vector<double> variances;  // 10^-1 down to 10^min_log10
    std::vector<double> loglik;
    double reference;               // at variance 1
    bool diverging;                 // constant positive gain per decade at the end, above the reference
};

// Log-likelihood along mu = data[index] as the variance shrinks.
ExplosionProbe explosion_probe(std::span<const double> data, std::size_t index, int min_log10 = -300);

// ---------------------------------------------------------------- structure

// Bernoulli(sum_i w_i q_i).
double collapse_bernoulli_mixture(std::span<const double> weights, std::span<const double> probs);
// Cell probabilities sum_i w_i q_ij; row i of probs is component i.
std::vector<double> collapse_categorical_mixture(std::span<const double> weights, const Eigen::MatrixXd& probs);

// C(n + k - 1, n).
boost::multiprecision::cpp_int partition_count(std::int64_t n, std::int64_t k);

struct SubmodelSummary {
    double prior_weight;
    double log_marginal;
    std::function<double(double)> predictive;
};

struct ModelAverage {
    double log_marginal;
    std::vector<double> posterior_weights;
    std::function<double(double)> predictive;
};

// Raises DataError when every marginal is zero.
ModelAverage model_average(std::vector<SubmodelSummary> submodels);

struct CandidateModel {
    double prior_weight;
    TargetDensity prior;     // normalized log density
    LogDensity loglik;       // empty: no data
};

struct ModelProposal {
    double weight;
    Sampler sampler;         // density must be normalized
};

struct ModelImportanceSample {
    std::vector<std::size_t> model;
    std::vector<Eigen::VectorXd> theta;
    std::vector<double> log_prior_ratio;  // log rho_k pi_k / (omega_k eta_k)
    std::vector<double> log_weight;       // plus the log-likelihood

    [[nodiscard]] std::vector<double> model_probabilities(std::size_t models) const;
};

// ConfigError when a proposal box does not cover its prior box.
ModelImportanceSample model_importance_sampler(const std::vector<CandidateModel>& models,
                                               const std::vector<ModelProposal>& proposals, Stream& rng,
                                               std::size_t n);

// 1/k; ConfigError unless the weight prior and the component priors are exchangeable.
double exchangeable_weight_mean(const MixtureModel& model);

}  // namespace bayescomp
