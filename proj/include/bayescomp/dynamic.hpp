#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bayescomp/dist.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/mixture.hpp"
#include "bayescomp/random.hpp"
#include "bayescomp/sampling.hpp"

namespace bayescomp {

using Complex = std::complex<double>;

// ---------------------------------------------------------------- moving averages of a trend

// w_t = (2q + 1)^-1 sum_{|j| <= q} x_{t+j} with x_t = a + b t + y_t, y iid (0, sigma2).
struct WindowedAverageStats {
    double intercept;
    double slope;
    double noise_variance;
    int half_width;

    [[nodiscard]] double mean(double t) const noexcept { return intercept + slope * t; }
    // cov(w_t, w_{t+h}); the same for every t.
    [[nodiscard]] double autocovariance(int lag) const noexcept;
    [[nodiscard]] bool mean_stationary() const noexcept { return slope == 0.0; }
};

WindowedAverageStats windowed_average_stats(double intercept, double slope, double noise_variance, int half_width);

// ---------------------------------------------------------------- AR(1)

struct Ar1Stationarity {
    bool possible;                 // |rho| < 1
    double required_variance;      // sigma2 / (1 - rho^2); +inf when impossible
    bool stationary;               // possible and tau2 matches to 1e-12 relative
};

// x_0 ~ N(0, tau2), x_{t+1} | x_t ~ N(rho x_t, sigma2).
Ar1Stationarity ar1_stationary_check(double tau2, double sigma2, double rho);

// Conditional on x_0, prior 1/sigma, rho unconstrained. Series is x_0..x_T.
struct Ar1Posterior {
    std::size_t transitions;  // T
    double lag_sq;            // sum_{t<T} x_t^2
    double cross;             // sum_{t<T} x_t x_{t+1}
    double lead_sq;           // sum_{t>=1} x_t^2
    double last;              // x_T

    [[nodiscard]] double rho_mean() const noexcept { return cross / lag_sq; }
    [[nodiscard]] double residual_ss() const noexcept;
    [[nodiscard]] ScalarFamily rho_given_variance(double sigma2) const;
    // Student (T - 1, rho_mean, nu^2). DataError on a zero residual sum of squares.
    [[nodiscard]] ScalarFamily rho_marginal() const;
    // x_{T+1}: Student (T - 1, rho_mean x_T, RSS (1 + x_T^2 / lag_sq) / (T - 1)).
    [[nodiscard]] ScalarFamily predictive() const;
};

Ar1Posterior ar1_posterior(std::span<const double> series);

// ---------------------------------------------------------------- AR(p)

// x_t - mean = sum_i coefficients[i-1] (x_{t-i} - mean) + sd eps_t.
struct ArModel {
    double mean = 0.0;
    Eigen::VectorXd coefficients;
    double sd = 1.0;
    std::optional<std::vector<Complex>> inverse_roots;

    [[nodiscard]] int order() const noexcept { return static_cast<int>(coefficients.size()); }
    // Inverse roots stored or computed from the companion matrix.
    [[nodiscard]] std::vector<Complex> roots() const;
    [[nodiscard]] bool causal() const;
    void validate() const;
};

bool ar2_causal(double rho1, double rho2);
bool ar2_in_triangle(double rho1, double rho2) noexcept;

struct RootExpansion {
    Eigen::VectorXd coefficients;
    std::size_t operations;  // complex multiply-adds in the recursion
};

// prod_i (1 - lambda_i u) = 1 - sum_j rho_j u^j. ConfigError on an unpaired complex root.
RootExpansion roots_to_coeffs(std::span<const Complex> inverse_roots);

// Eigenvalues of the companion matrix; conjugate pairs come out exactly conjugate.
std::vector<Complex> coeffs_to_roots(const Eigen::VectorXd& coefficients);

Eigen::MatrixXd companion_matrix(const Eigen::VectorXd& coefficients);

struct StationaryCovariance {
    Eigen::MatrixXd covariance;
    std::size_t iterations;
    double residual;  // max-abs of A - B A B' - V
};

// Fixed point of A = B A B' + V. NumericalError when the iteration diverges or stalls.
StationaryCovariance ar_stationary_covariance(const ArModel& model, std::size_t max_iterations = 100'000,
                                              double tolerance = 1e-12);

// Prior 1/sigma^2, likelihood conditional on the first p observations.
constexpr bool ar_posterior_validity(std::size_t length, std::size_t order) noexcept { return length > order; }

// Started from the mean with `burnin` discarded steps.
std::vector<double> simulate_ar(const ArModel& model, std::size_t n, Stream& rng, std::size_t burnin = 1000);

// Conditional on the first `conditioning` observations.
double ar_conditional_loglik(std::span<const double> series, double mean, const Eigen::VectorXd& coefficients,
                             double variance, std::size_t conditioning);

// ---------------------------------------------------------------- reversible jump over the order

struct RjArOptions {
    int max_order = 5;
    std::size_t iterations = 5000;
    std::size_t burnin = 1000;
    bool jumps = true;
    int start_order = 0;       // real roots at 0
    double root_step = 0.1;    // random-walk sd for roots
    double log_var_step = 0.3; // lognormal proposal sd on sigma^2
    std::vector<double> order_prior;  // weights on 0..max_order; empty is uniform
};

// Columns: order, mean, sd, then (re, im) for max_order inverse roots; reals first,
// each complex pair as lambda and its conjugate, zero padded.
struct RjArResult {
    ChainTrace trace;
    int max_order;
    std::size_t birth_accepted = 0, birth_proposed = 0;
    std::size_t death_accepted = 0, death_proposed = 0;

    [[nodiscard]] std::vector<double> order_posterior() const;
    [[nodiscard]] int order_mode() const;
    // Mean coefficient vector over post-burnin draws of the given order.
    [[nodiscard]] Eigen::VectorXd mean_coefficients(int order) const;
};

// Prior: order from order_prior, number of complex pairs uniform given the
// order, real roots U(-1, 1), complex pairs uniform on the unit disk, flat on the
// mean, 1/sigma^2. All likelihoods condition on the first max_order observations.
RjArResult rj_ar_order(std::span<const double> series, const RjArOptions& options, Stream& rng);

// ---------------------------------------------------------------- MA(q)

// x_t = mean + eps_t + sum_j coefficients[j-1] eps_{t-j}.
struct MaModel {
    double mean = 0.0;
    Eigen::VectorXd coefficients;
    double sd = 1.0;

    [[nodiscard]] int order() const noexcept { return static_cast<int>(coefficients.size()); }
    void validate() const;
};

double ma_autocovariance(const MaModel& model, int lag);

// Returns x_1..x_n with the q initial noises drawn from N(0, sd^2).
std::vector<double> simulate_ma(const MaModel& model, std::size_t n, Stream& rng);

// eps_hat_t = x_t - mean - sum_j theta_j eps_hat_{t-j}, started from eps_0, eps_-1, ...
std::vector<double> ma_residuals(const MaModel& model, std::span<const double> series, std::span<const double> initial);

enum class NoiseConditional {
    exact,  // all of x_1..x_T through eps_hat_t = delta_t + beta_t eps, O(Tq)
    local   // only terms t <= q - index + 1, eps_hat_t held at their current values
};

struct NormalParams {
    double mean;
    double variance;
};

// Conditional of eps_{1-index} (index in 1..q) given x_1..x_T and the other initial
// noises. `initial` holds eps_0, eps_-1, ..., eps_{1-q}; the entry being updated is
// read only by the local form (it feeds the held residuals).
NormalParams ma_initial_noise_conditional(const MaModel& model, std::span<const double> series, int index,
                                          std::span<const double> initial,
                                          NoiseConditional form = NoiseConditional::local);

struct MaForecast {
    double mean;
    bool beyond_horizon;  // h > q: the forecast is the unconditional mean
};

// E[x_{T+h} | x_1..x_T], exact Gaussian conditioning by a Kalman filter.
MaForecast ma_predictive(const MaModel& model, std::span<const double> series, int horizon);

// ---------------------------------------------------------------- hidden and switching chains

// Power iteration on the lazy chain (P + I) / 2. ConfigError when P is reducible
// or not row stochastic to 1e-12.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

MixtureParams hmm_marginal_mixture(const Eigen::MatrixXd& transition, std::span<const double> means,
                                   std::span<const double> variances);

struct HmmSample {
    std::vector<int> states;
    std::vector<double> observations;
};

// Normal emissions; the first state is drawn from the stationary distribution.
HmmSample simulate_hmm(const Eigen::MatrixXd& transition, std::span<const double> means,
                       std::span<const double> variances, std::size_t n, Stream& rng);

// y_0 ~ N(0, s^2), y_t = phi y_{t-1} + s eps*, x_t = beta exp(y_t / 2) eps. x is x_1..x_T, y is y_0..y_T.
double sv_joint_logdensity(double phi, double sigma, double beta, std::span<const double> x,
                           std::span<const double> y);

struct MarkovSwitch {
    Eigen::MatrixXd transition;
    // log f(x_r | x_{r-1}, y_r = state)
    std::function<double(int state, double current, double previous)> log_conditional;
    double initial = 0.0;  // x_0

    [[nodiscard]] int states() const noexcept { return static_cast<int>(transition.rows()); }
    void validate() const;
};

struct PredictionFilter {
    Eigen::MatrixXd state_probabilities;  // row r-1 is phi_r = P(y_r | x_1..x_{r-1})
    std::vector<double> cumulative_loglik;  // log p(x_1..x_r)

    [[nodiscard]] double loglik() const { return cumulative_loglik.empty() ? 0.0 : cumulative_loglik.back(); }
};

// Started at the stationary distribution. NumericalError when every state has zero density.
PredictionFilter ms_prediction_filter(const MarkovSwitch& model, std::span<const double> series);

}  // namespace bayescomp
