#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"
#include "bayescomp/sampling.hpp"

namespace bayescomp {

// Episode counts n_1..n_T and recaptures m_2..m_T of marked individuals.
struct CaptureRecord {
    std::vector<std::int64_t> captures;
    std::vector<std::int64_t> recaptures;

    [[nodiscard]] int episodes() const noexcept { return static_cast<int>(captures.size()); }
    [[nodiscard]] std::int64_t n_plus() const;   // distinct individuals
    [[nodiscard]] std::int64_t n_total() const;  // total captures
    [[nodiscard]] std::int64_t m_plus() const;   // total recaptures
    // T n_1 + sum_{j>=2} (T-j+1)(n_j - m_j): p-exposures ending in a first capture
    [[nodiscard]] std::int64_t n_star() const;
    // m_t <= n_t and m_t <= individuals marked before episode t.
    void validate() const;
};

// Posterior on N over the grid n_min..n_max. grid mass + tail_mass = 1.
struct PopulationPosterior {
    std::int64_t n_min = 0;
    std::vector<double> log_weights;  // unnormalized, entry i is N = n_min + i
    double log_normalizer = 0.0;      // includes the tail beyond the grid
    double tail_mass = 0.0;

    [[nodiscard]] std::int64_t n_max() const noexcept {
        return n_min + static_cast<std::int64_t>(log_weights.size()) - 1;
    }
    [[nodiscard]] double probability(std::int64_t N) const;
    [[nodiscard]] std::vector<double> probabilities() const;
    [[nodiscard]] double mean() const;
    // Smallest N whose cumulative mass exceeds 1/2.
    [[nodiscard]] std::int64_t median() const;
    // Grid points with cumulative mass below 1/2.
    [[nodiscard]] std::size_t count_below_half() const;
};

inline constexpr std::int64_t kDefaultNMax = 10'000;

struct UniformPriorPosterior {
    PopulationPosterior posterior;  // 1/(N(N+1)) normalized in closed form
    double normalizer;              // n+ v 1
    std::int64_t median;            // 2 (n+ v 1)
};

UniformPriorPosterior uniform_prior_posterior(std::int64_t nplus, std::int64_t n_max = kDefaultNMax);

struct TagRecoveryPosterior {
    PopulationPosterior posterior;
    double mean;
    std::int64_t median;
    std::size_t count_below_half;  // grid points from n1+ with cumulative mass below 1/2
    double crude_estimate;         // n1+ / p-hat with p-hat = sum recoveries / ((k-1) n1+)
};

// Prior 1/N. Raises NumericalError when more than 1e-6 of the mass sits at or beyond n_max.
TagRecoveryPosterior tag_recovery_posterior(std::int64_t n1plus, const std::vector<std::int64_t>& recoveries,
                                            std::int64_t n_max = kDefaultNMax);

struct DarrochPosterior {
    PopulationPosterior posterior;
    double mean;
};

DarrochPosterior darroch_posterior(std::int64_t n1, std::int64_t n2, std::int64_t m2,
                                   std::int64_t n_max = kDefaultNMax);

struct DarrochMle {
    double estimate;        // n1 n2 / m2
    std::int64_t integer;   // floor(n1 n2 / m2); on ties N-1 and N are both maximizers
};

// Empty when m2 = 0: the likelihood then increases without bound.
std::optional<DarrochMle> darroch_mle(std::int64_t n1, std::int64_t n2, std::int64_t m2);

// log of (N-n1)! (N-n2)! / ((N-n+)! N!), -inf for N < n+.
double darroch_loglik(std::int64_t n1, std::int64_t n2, std::int64_t m2, std::int64_t N);

struct HypergeometricLaw {
    std::int64_t lo;
    std::vector<double> pmf;  // m2 = lo + i
    double mean;
};

HypergeometricLaw hypergeometric_conditional(std::int64_t n1, std::int64_t n2, std::int64_t N);

// log N!/(N-n+)! p^nc (1-p)^(TN-nc), a function of (n+, nc, T) only.
double kstage_loglik(const CaptureRecord& record, std::int64_t N, double p);

// Capture probability p for unmarked and q for marked individuals:
// log N!/(N-n+)! p^n+ (1-p)^(TN-n*) q^m+ (1-q)^(n*-nc).
double heterogeneous_loglik(const CaptureRecord& record, std::int64_t N, double p, double q);

// Data-only term completing either kernel to the log-probability of the record:
// -log(prod of first-capture counts!) + sum_t log C(marked before t, m_t).
double capture_log_constant(const CaptureRecord& record);

struct MarkLossLikelihood {
    double loglik;
    bool feasible;  // false when no latent z is compatible with the data
};

// q loss probability, r recovery probability of a lost mark, k recovered marks.
MarkLossLikelihood markloss_loglik(std::int64_t n1, std::int64_t n2, std::int64_t m2, std::int64_t k, std::int64_t N,
                                   double p, double q, double r);

struct CapturePrior {
    enum class Kind { poisson, one_over_n };
    Kind kind = Kind::one_over_n;
    double lambda = 0.0;

    static CapturePrior poisson(double lambda) { return {Kind::poisson, lambda}; }
    static CapturePrior one_over_n() { return {Kind::one_over_n, 0.0}; }
};

// Marginal posterior on N under the prior, grid up to n_max.
PopulationPosterior capture_posterior(const CaptureRecord& record, const CapturePrior& prior,
                                      std::int64_t n_max = kDefaultNMax);

// MH update of N given p under the 1/N prior; proposal N' - n+ ~ Poisson(N (1-p)^T),
// target (N-1)!/(N-n+)! (1-p)^TN.
std::int64_t capture_n_step(const CaptureRecord& record, std::int64_t N, double p, Stream& rng, bool* accepted = nullptr);

// Columns N and p. Starts at N = 2 (n+ v 1).
ChainTrace capture_gibbs(const CaptureRecord& record, const CapturePrior& prior, Stream& rng, std::size_t iterations);

struct DiscreteLaw {
    std::vector<double> pmf;  // value i has mass pmf[i]
};

// Conditional of r1 given r2 (joint case) or with r2 summed out.
DiscreteLaw r1_conditional(std::int64_t n1, std::int64_t c2, std::int64_t c3, std::optional<std::int64_t> r2,
                           double p, double q);

// 3^(N T), the number of (exit, capture) histories.
std::uint64_t open_population_complexity(int N, int T);

struct OpenHistory {
    int N;
    int T;
    std::vector<std::uint8_t> exited;    // row-major i * T + t
    std::vector<std::uint8_t> captured;
};

// Sum of history probabilities over histories accepted by keep; N T <= 8.
double open_population_likelihood(int N, int T, double p, double q,
                                  const std::function<bool(const OpenHistory&)>& keep);

struct BetaElicitation {
    double alpha;
    double a;  // alpha m
    double b;  // alpha (1 - m)
    double coverage;
};

// Bisection on log alpha over [1e-3, 1e6] for Be(alpha m, alpha (1-m)) mass on (lo, hi).
BetaElicitation beta_from_mean_interval(double mean, double lo, double hi, double coverage);

}  // namespace bayescomp
