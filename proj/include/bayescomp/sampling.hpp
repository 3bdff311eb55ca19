#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bayescomp/dist.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"

namespace bayescomp {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

// Unnormalized log density on a box (bounds may be infinite).
struct TargetDensity {
    LogDensity log_density;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static TargetDensity unbounded(Eigen::Index dim, LogDensity f);
    static TargetDensity box(Eigen::VectorXd lower, Eigen::VectorXd upper, LogDensity f);
    static TargetDensity scalar(std::function<double(double)> f, double lower, double upper);
    static TargetDensity from_family(const ScalarFamily& fam);

    [[nodiscard]] Eigen::Index dim() const noexcept { return lower.size(); }
    [[nodiscard]] bool contains(const Eigen::VectorXd& x) const;
    // -inf outside the box.
    [[nodiscard]] double operator()(const Eigen::VectorXd& x) const;
    [[nodiscard]] double at(double x) const;
};

// Raised when a dominating bound fails on the probe grid.
class EnvelopeError : public NumericalError {
public:
    EnvelopeError(const std::string& what, double x) : NumericalError(what), x_(x) {}
    [[nodiscard]] double where() const noexcept { return x_; }

private:
    double x_;
};

struct ChainTrace {
    Eigen::MatrixXd draws;               // iterations x dimension
    std::vector<std::uint8_t> accepted;  // one flag per iteration
    std::uint64_t seed = 0;
    std::size_t burnin = 0;

    [[nodiscard]] std::size_t size() const noexcept { return accepted.size(); }
    [[nodiscard]] std::vector<double> component(Eigen::Index j, bool after_burnin = true) const;
};

void write_trace_csv(const ChainTrace& trace, std::ostream& out);

// ---------------------------------------------------------------- accept-reject

struct AcceptRejectResult {
    std::vector<double> draws;
    std::vector<std::size_t> trials;  // proposals used for each accepted draw
    [[nodiscard]] double mean_trials() const;
};

// Requires log target <= log_bound + log proposal on a 1000-point probe grid.
// Gives up with NumericalError after max_trials proposals for a single draw.
AcceptRejectResult accept_reject(const TargetDensity& target, const ScalarFamily& proposal, double log_bound,
                                 Stream& rng, std::size_t n, std::size_t max_trials = 100'000'000);

// ---------------------------------------------------------- importance sampling

struct Sampler {
    TargetDensity density;
    std::function<Eigen::VectorXd(Stream&)> draw;

    static Sampler from_family(const ScalarFamily& fam);
};

struct ImportanceResult {
    double estimate;
    double max_weight_share;
    double effective_sample_size;
    bool unstable;  // max normalized weight above 0.1
    double log_weight_sd;
};

inline constexpr double kUnstableWeightShare = 0.1;

ImportanceResult importance_estimate(const std::function<double(const Eigen::VectorXd&)>& h,
                                     const TargetDensity& target, const Sampler& proposal, Stream& rng,
                                     std::size_t n);

// ---------------------------------------------------------------- bridge sampling

// n1 sum_{draws2} pi1~ alpha / n2 sum_{draws1} pi2~ alpha, all in log space.
double bridge_bayes_factor(const LogDensity& log_pi1, const LogDensity& log_pi2,
                           std::span<const Eigen::VectorXd> draws1, std::span<const Eigen::VectorXd> draws2,
                           const LogDensity& log_alpha);

// ------------------------------------------------ two-sample Bayes factor by simulation

enum class BfMethod { normal_sim, t_sim };

struct TwoSampleBfTrace {
    std::vector<double> running;  // cumulated-average estimate of 1/B10 after each draw
    double df;                    // Student proposal parameters (t_sim)
    double location;
    double scale2;
    double log_constant;
};

TwoSampleBfTrace bayes_factor_two_sample_mean(int n, double xbar, double ybar, double s2, std::size_t draws,
                                              BfMethod method, Stream& rng);

// ------------------------------------------------------------------ slice sampler

struct SliceTarget {
    std::function<double(double)> density;  // unnormalized, bounded
    Interval domain;
    // Optional closed form of {x in domain : density(x) >= u}; must be an interval.
    std::function<Interval(double)> level_set;
};

std::vector<double> slice_sampler(const SliceTarget& target, double start, Stream& rng, std::size_t n,
                                  std::size_t grid = 1000);

// ---------------------------------------------------------------- MH kernels

enum class ProposalKind { random_walk, independence, logit_random_walk, lognormal_scale };

struct Proposal {
    ProposalKind kind = ProposalKind::random_walk;
    double scale = 1.0;
    std::optional<ScalarFamily> family;  // independence proposals only

    static Proposal random_walk(double scale) { return {ProposalKind::random_walk, scale, std::nullopt}; }
    static Proposal independence(ScalarFamily fam) { return {ProposalKind::independence, 1.0, std::move(fam)}; }
    static Proposal logit_walk(double scale) { return {ProposalKind::logit_random_walk, scale, std::nullopt}; }
    static Proposal lognormal(double scale) { return {ProposalKind::lognormal_scale, scale, std::nullopt}; }
};

struct KernelStep {
    Eigen::VectorXd state;
    bool accepted;
};

// One Metropolis-Hastings transition. The log acceptance ratio carries the
// proposal's Jacobian; proposals outside the target box are rejected.
KernelStep mh_kernel(const TargetDensity& target, const Proposal& proposal, const Eigen::VectorXd& state,
                     Stream& rng);

// log q(x -> y) up to terms that cancel in the ratio, used by mh_kernel.
double proposal_log_ratio(const Proposal& proposal, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

ChainTrace run_mh(const TargetDensity& target, const Proposal& proposal, Eigen::VectorXd start, Stream& rng,
                  std::size_t iterations, std::size_t burnin = 0);

// min(1, pi(y) q(y,x) / pi(x) q(x,y)).
double mh_acceptance(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx);

// pi(y) q(y,x) / (pi(y) q(y,x) + pi(x) q(x,y)).
double boltzmann_acceptance(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx);

// log of pi(x) q(x,y) rho(x,y) under Boltzmann acceptance; symmetric in its
// two (pi, q) pairs by construction.
double boltzmann_log_flow(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx);

// ------------------------------------------------------------- tempering

struct TemperingLadder {
    std::vector<double> powers;  // strictly decreasing in (0, 1]
    std::size_t kernels_per_rung = 1;

    void validate() const;
};

// Kernel reversible with respect to target^power.
using TemperedKernel = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double, Stream&)>;

// Power applied at each step of the down-then-up sweep (a palindrome).
std::vector<double> pump_schedule(const TemperingLadder& ladder);

// log acceptance of a sweep x_0, ..., x_K visited under `schedule` (K = schedule size):
// log pi(x_K) - log pi(x_0) + sum_i a_i (log pi(x_{i-1}) - log pi(x_i)).
double pump_log_acceptance(const std::vector<double>& schedule, std::span<const double> log_target_path);

KernelStep tempering_pump(const TargetDensity& target, const TemperingLadder& ladder, const TemperedKernel& kernel,
                          const Eigen::VectorXd& state, Stream& rng);

// Random-walk MH kernel on target^power with step scale / sqrt(power).
TemperedKernel tempered_random_walk(const TargetDensity& target, double scale);

TargetDensity annealed_target(const TargetDensity& target, int gamma);

// ------------------------------------------------------------- diagnostics

struct Diagnostics {
    double acceptance_rate;
    std::vector<double> acf;  // lags 0..max_lag; empty when degenerate
    bool degenerate;          // constant trace
};

Diagnostics diagnostics(const ChainTrace& trace, std::size_t max_lag, Eigen::Index component = 0);
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);
std::vector<double> cumulated_average(std::span<const double> x);

// Pointwise min/max of the cumulated averages of several runs of equal length.
struct ReplicationBand {
    std::vector<double> lower;
    std::vector<double> upper;
    // True when some prefix of length >= first_prefix has the band off `truth`.
    [[nodiscard]] bool excludes(double truth, std::size_t first_prefix = 1) const;
};
ReplicationBand replication_band(const std::vector<std::vector<double>>& runs);

}  // namespace bayescomp
