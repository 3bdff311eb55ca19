#include "bayescomp/capture.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bayescomp/dist.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lfact(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// a log b with 0 log 0 = 0.
double xlogy(double a, double b) {
    if (a == 0.0) return 0.0;
    return b > 0.0 ? a * std::log(b) : kNegInf;
}

void require_probability(double p, const char* who, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(std::string(who) + ": " + name + " must lie in [0, 1]");
}

// Grid posterior from a log kernel; the tail beyond n_max follows the local power-law decay.
PopulationPosterior grid_posterior(std::int64_t n_min, std::int64_t n_max,
                                   const std::function<double(std::int64_t)>& log_kernel, const char* who) {
    if (n_max < n_min + 1)
        throw ConfigError(std::string(who) + ": N_max=" + std::to_string(n_max) + " must exceed the smallest N=" +
                          std::to_string(n_min));
    PopulationPosterior post;
    post.n_min = n_min;
    post.log_weights.resize(static_cast<std::size_t>(n_max - n_min + 1));
    for (std::int64_t N = n_min; N <= n_max; ++N) post.log_weights[static_cast<std::size_t>(N - n_min)] = log_kernel(N);
    const double grid = log_sum_exp(post.log_weights);
    if (!std::isfinite(grid)) throw NumericalError(std::string(who) + ": posterior kernel vanishes on the grid");
    const double last = post.log_weights.back();
    const double prev = post.log_weights[post.log_weights.size() - 2];
    const double nm = static_cast<double>(n_max);
    const double slope = -(last - prev) / std::log(nm / (nm - 1.0));
    double tail = std::numeric_limits<double>::infinity();
    if (slope > 1.0) tail = std::exp(last - grid) * nm / (slope - 1.0);
    const double boundary = std::exp(last - grid) + tail;
    if (!(boundary <= 1e-6))
        throw NumericalError(std::string(who) + ": posterior mass at or beyond N_max=" + std::to_string(n_max) +
                             " is " + std::to_string(boundary) + " (> 1e-6); increase N_max");
    post.log_normalizer = grid + std::log1p(tail);
    post.tail_mass = tail / (1.0 + tail);
    return post;
}

}  // namespace

std::int64_t CaptureRecord::n_plus() const {
    std::int64_t s = captures.empty() ? 0 : captures[0];
    for (std::size_t t = 1; t < captures.size(); ++t) s += captures[t] - recaptures[t - 1];
    return s;
}

std::int64_t CaptureRecord::n_total() const { return std::accumulate(captures.begin(), captures.end(), std::int64_t{0}); }

std::int64_t CaptureRecord::m_plus() const {
    return std::accumulate(recaptures.begin(), recaptures.end(), std::int64_t{0});
}

std::int64_t CaptureRecord::n_star() const {
    const auto T = static_cast<std::int64_t>(captures.size());
    std::int64_t s = T * captures[0];
    for (std::int64_t j = 2; j <= T; ++j)
        s += (T - j + 1) * (captures[static_cast<std::size_t>(j - 1)] - recaptures[static_cast<std::size_t>(j - 2)]);
    return s;
}

void CaptureRecord::validate() const {
    if (captures.empty()) throw DataError("capture record: no episodes");
    if (recaptures.size() + 1 != captures.size())
        throw DataError("capture record: " + std::to_string(captures.size()) + " episodes need " +
                        std::to_string(captures.size() - 1) + " recapture counts");
    std::int64_t marked = captures[0];
    if (marked < 0) throw DataError("capture record: negative count in episode 1");
    for (std::size_t t = 1; t < captures.size(); ++t) {
        const auto n = captures[t], m = recaptures[t - 1];
        if (n < 0 || m < 0) throw DataError("capture record: negative count in episode " + std::to_string(t + 1));
        if (m > n || m > marked)
            throw DataError("capture record: " + std::to_string(m) + " recaptures in episode " + std::to_string(t + 1) +
                            " exceed captures or the " + std::to_string(marked) + " marked individuals");
        marked += n - m;
    }
}

double PopulationPosterior::probability(std::int64_t N) const {
    if (N < n_min || N > n_max()) return 0.0;
    return std::exp(log_weights[static_cast<std::size_t>(N - n_min)] - log_normalizer);
}

std::vector<double> PopulationPosterior::probabilities() const {
    std::vector<double> out(log_weights.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_weights[i] - log_normalizer);
    return out;
}

double PopulationPosterior::mean() const {
    const auto pr = probabilities();
    double s = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
        s += pr[i] * static_cast<double>(n_min + static_cast<std::int64_t>(i));
        mass += pr[i];
    }
    return s / mass;
}

std::int64_t PopulationPosterior::median() const {
    const auto pr = probabilities();
    double cum = 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
        cum += pr[i];
        if (cum > 0.5) return n_min + static_cast<std::int64_t>(i);
    }
    throw NumericalError("population posterior: median lies beyond the grid");
}

std::size_t PopulationPosterior::count_below_half() const {
    const auto pr = probabilities();
    double cum = 0.0;
    std::size_t count = 0;
    for (double v : pr) {
        cum += v;
        if (cum < 0.5) ++count;
    }
    return count;
}

UniformPriorPosterior uniform_prior_posterior(std::int64_t nplus, std::int64_t n_max) {
    if (nplus < 0) throw DataError("uniform_prior_posterior: n+ must be non-negative");
    const std::int64_t n0 = std::max<std::int64_t>(nplus, 1);
    if (n_max < 2 * n0) throw ConfigError("uniform_prior_posterior: N_max must be at least 2 (n+ v 1)");
    PopulationPosterior post;
    post.n_min = n0;
    post.log_weights.resize(static_cast<std::size_t>(n_max - n0 + 1));
    for (std::int64_t N = n0; N <= n_max; ++N) {
        const double x = static_cast<double>(N);
        post.log_weights[static_cast<std::size_t>(N - n0)] = -std::log(x) - std::log1p(x);
    }
    // sum_{N >= n0} 1/(N(N+1)) = 1/n0
    post.log_normalizer = -std::log(static_cast<double>(n0));
    post.tail_mass = static_cast<double>(n0) / static_cast<double>(n_max + 1);
    return {std::move(post), static_cast<double>(n0), 2 * n0};
}

TagRecoveryPosterior tag_recovery_posterior(std::int64_t n1plus, const std::vector<std::int64_t>& recoveries,
                                            std::int64_t n_max) {
    if (n1plus < 0) throw DataError("tag_recovery_posterior: n1+ must be non-negative");
    if (recoveries.empty()) throw DataError("tag_recovery_posterior: no recovery counts");
    std::int64_t total = n1plus;
    for (auto r : recoveries) {
        if (r < 0 || r > n1plus) throw DataError("tag_recovery_posterior: recovery count outside [0, n1+]");
        total += r;
    }
    const auto k = static_cast<std::int64_t>(recoveries.size()) + 1;
    const std::int64_t shift = k * n1plus - total;
    auto kernel = [&](std::int64_t N) {
        return std::lgamma(static_cast<double>(N)) - lfact(N - n1plus) + lfact(N + shift) - lfact(N + k * n1plus + 1);
    };
    TagRecoveryPosterior out;
    out.posterior = grid_posterior(std::max<std::int64_t>(n1plus, 1), n_max, kernel, "tag_recovery_posterior");
    out.mean = out.posterior.mean();
    out.median = out.posterior.median();
    out.count_below_half = out.posterior.count_below_half();
    const double p_hat = static_cast<double>(total - n1plus) / static_cast<double>((k - 1) * n1plus);
    out.crude_estimate = p_hat > 0.0 ? static_cast<double>(n1plus) / p_hat : std::numeric_limits<double>::infinity();
    return out;
}

PopulationPosterior capture_posterior(const CaptureRecord& record, const CapturePrior& prior, std::int64_t n_max) {
    record.validate();
    const std::int64_t nplus = record.n_plus(), nc = record.n_total();
    const std::int64_t T = record.episodes();
    // p integrated out: B(nc+1, TN-nc+1) = nc! (TN-nc)!/(TN+1)!
    if (prior.kind == CapturePrior::Kind::poisson) {
        if (!(prior.lambda > 0.0)) throw ConfigError("capture_posterior: Poisson rate must be positive");
        const double log_lambda = std::log(prior.lambda);
        return grid_posterior(
            nplus, n_max,
            [&](std::int64_t N) {
                return static_cast<double>(N) * log_lambda - lfact(N - nplus) + lfact(T * N - nc) - lfact(T * N + 1);
            },
            "capture_posterior");
    }
    return grid_posterior(
        std::max<std::int64_t>(nplus, 1), n_max,
        [&](std::int64_t N) {
            return std::lgamma(static_cast<double>(N)) - lfact(N - nplus) + lfact(T * N - nc) - lfact(T * N + 1);
        },
        "capture_posterior");
}

DarrochPosterior darroch_posterior(std::int64_t n1, std::int64_t n2, std::int64_t m2, std::int64_t n_max) {
    if (n1 < 0 || n2 < 0 || m2 < 0 || m2 > std::min(n1, n2))
        throw DataError("darroch_posterior: need 0 <= m2 <= min(n1, n2)");
    DarrochPosterior out;
    out.posterior = capture_posterior(CaptureRecord{{n1, n2}, {m2}}, CapturePrior::one_over_n(), n_max);
    out.mean = out.posterior.mean();
    return out;
}

std::optional<DarrochMle> darroch_mle(std::int64_t n1, std::int64_t n2, std::int64_t m2) {
    if (n1 < 0 || n2 < 0 || m2 < 0 || m2 > std::min(n1, n2))
        throw DataError("darroch_mle: need 0 <= m2 <= min(n1, n2)");
    if (m2 == 0) return std::nullopt;
    const double est = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(m2);
    // l(N+1)/l(N) >= 1 exactly when N + 1 <= n1 n2 / m2, and n1 n2 / m2 >= n+ always
    return DarrochMle{est, (n1 * n2) / m2};
}

double darroch_loglik(std::int64_t n1, std::int64_t n2, std::int64_t m2, std::int64_t N) {
    const std::int64_t nplus = n1 + n2 - m2;
    if (N < nplus) return kNegInf;
    return lfact(N - n1) + lfact(N - n2) - lfact(N - nplus) - lfact(N);
}

HypergeometricLaw hypergeometric_conditional(std::int64_t n1, std::int64_t n2, std::int64_t N) {
    if (n1 < 0 || n2 < 0 || N < std::max(n1, n2))
        throw DataError("hypergeometric_conditional: need N >= n1, n2 >= 0");
    HypergeometricLaw law;
    law.lo = std::max<std::int64_t>(0, n1 + n2 - N);
    const std::int64_t hi = std::min(n1, n2);
    std::vector<double> lw;
    for (std::int64_t m = law.lo; m <= hi; ++m)
        lw.push_back(log_choose(static_cast<double>(n1), static_cast<double>(m)) +
                     log_choose(static_cast<double>(N - n1), static_cast<double>(n2 - m)) -
                     log_choose(static_cast<double>(N), static_cast<double>(n2)));
    normalize_log_weights(lw);
    law.pmf = std::move(lw);
    law.mean = N == 0 ? 0.0 : static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(N);
    return law;
}

double capture_log_constant(const CaptureRecord& record) {
    record.validate();
    std::int64_t marked = record.captures[0];
    double s = -lfact(marked);
    for (std::size_t t = 1; t < record.captures.size(); ++t) {
        const auto fresh = record.captures[t] - record.recaptures[t - 1];
        s += log_choose(static_cast<double>(marked), static_cast<double>(record.recaptures[t - 1])) - lfact(fresh);
        marked += fresh;
    }
    return s;
}

double kstage_loglik(const CaptureRecord& record, std::int64_t N, double p) {
    record.validate();
    require_probability(p, "kstage_loglik", "p");
    if (N < record.n_plus()) return kNegInf;
    const double nc = static_cast<double>(record.n_total());
    const double TN = static_cast<double>(record.episodes()) * static_cast<double>(N);
    return lfact(N) - lfact(N - record.n_plus()) + xlogy(nc, p) + xlogy(TN - nc, 1.0 - p);
}

double heterogeneous_loglik(const CaptureRecord& record, std::int64_t N, double p, double q) {
    record.validate();
    require_probability(p, "heterogeneous_loglik", "p");
    require_probability(q, "heterogeneous_loglik", "q");
    if (N < record.n_plus()) return kNegInf;
    const double TN = static_cast<double>(record.episodes()) * static_cast<double>(N);
    const double nstar = static_cast<double>(record.n_star());
    const double nc = static_cast<double>(record.n_total());
    return lfact(N) - lfact(N - record.n_plus()) + xlogy(static_cast<double>(record.n_plus()), p) +
           xlogy(TN - nstar, 1.0 - p) + xlogy(static_cast<double>(record.m_plus()), q) + xlogy(nstar - nc, 1.0 - q);
}

MarkLossLikelihood markloss_loglik(std::int64_t n1, std::int64_t n2, std::int64_t m2, std::int64_t k, std::int64_t N,
                                   double p, double q, double r) {
    require_probability(p, "markloss_loglik", "p");
    require_probability(q, "markloss_loglik", "q");
    require_probability(r, "markloss_loglik", "r");
    if (n1 < 0 || n2 < 0 || m2 < 0 || k < 0 || k > n1 || m2 > std::min(n1, n2))
        throw DataError("markloss_loglik: need 0 <= k <= n1 and 0 <= m2 <= min(n1, n2)");
    if (N < n1) return {kNegInf, false};
    const auto d = [](std::int64_t v) { return static_cast<double>(v); };
    const double head = log_choose(d(N), d(n1)) + xlogy(d(n1), p) + xlogy(d(N - n1), 1.0 - p);
    std::vector<double> terms;
    // z tagged individuals lost their mark; they rejoin the unmarked pool at episode 2
    for (std::int64_t z = k; z <= n1 - m2; ++z) {
        const double t = log_choose(d(n1), d(z)) + xlogy(d(z), q) + xlogy(d(n1 - z), 1.0 - q) +
                         log_choose(d(z), d(k)) + xlogy(d(k), r) + xlogy(d(z - k), 1.0 - r) +
                         log_choose(d(n1 - z), d(m2)) + xlogy(d(m2), p) + xlogy(d(n1 - z - m2), 1.0 - p) +
                         log_choose(d(N - n1 + z), d(n2 - m2)) + xlogy(d(n2 - m2), p) +
                         xlogy(d(N - n1 + z - n2 + m2), 1.0 - p);
        if (t > kNegInf) terms.push_back(t);
    }
    if (terms.empty()) return {kNegInf, false};
    return {head + log_sum_exp(terms), true};
}

std::int64_t capture_n_step(const CaptureRecord& record, std::int64_t N, double p, Stream& rng, bool* accepted) {
    const std::int64_t nplus = record.n_plus();
    const double T = static_cast<double>(record.episodes());
    const double keep = std::pow(1.0 - p, T);
    auto log_target = [&](std::int64_t n) {
        return std::lgamma(static_cast<double>(n)) - lfact(n - nplus) + static_cast<double>(n) * T * std::log1p(-p);
    };
    auto log_proposal = [&](std::int64_t to, std::int64_t from) {
        const double rate = static_cast<double>(from) * keep;
        const double x = static_cast<double>(to - nplus);
        if (rate <= 0.0) return x == 0.0 ? 0.0 : kNegInf;
        return x * std::log(rate) - rate - std::lgamma(x + 1.0);
    };
    const double rate = static_cast<double>(N) * keep;
    const auto cand = nplus + static_cast<std::int64_t>(rate > 0.0 ? draw(ScalarFamily::poisson(rate), rng) : 0.0);
    const double u = rng.uniform();
    bool ok = false;
    if (cand >= 1 && cand != N) {
        const double log_ratio = log_target(cand) - log_target(N) + log_proposal(N, cand) - log_proposal(cand, N);
        ok = std::log(u) < log_ratio;
    } else if (cand == N) {
        ok = true;
    }
    if (accepted) *accepted = ok;
    return ok ? cand : N;
}

ChainTrace capture_gibbs(const CaptureRecord& record, const CapturePrior& prior, Stream& rng, std::size_t iterations) {
    record.validate();
    if (iterations == 0) throw ConfigError("capture_gibbs: iterations must be positive");
    if (prior.kind == CapturePrior::Kind::poisson && !(prior.lambda > 0.0))
        throw ConfigError("capture_gibbs: Poisson rate must be positive");
    const std::int64_t nplus = record.n_plus(), nc = record.n_total();
    const double T = static_cast<double>(record.episodes());
    auto draw_p = [&](std::int64_t N) {
        return draw(ScalarFamily::beta(static_cast<double>(nc) + 1.0, T * static_cast<double>(N) - nc + 1.0), rng);
    };

    ChainTrace trace;
    trace.seed = rng.seed();
    trace.draws.resize(static_cast<Eigen::Index>(iterations), 2);
    trace.accepted.resize(iterations);
    std::int64_t N = 2 * std::max<std::int64_t>(nplus, 1);
    double p = draw_p(N);
    for (std::size_t t = 0; t < iterations; ++t) {
        bool ok = true;
        if (prior.kind == CapturePrior::Kind::poisson) {
            const double rate = prior.lambda * std::pow(1.0 - p, T);
            N = nplus + static_cast<std::int64_t>(rate > 0.0 ? draw(ScalarFamily::poisson(rate), rng) : 0.0);
        } else {
            N = capture_n_step(record, N, p, rng, &ok);
        }
        p = draw_p(N);
        trace.draws(static_cast<Eigen::Index>(t), 0) = static_cast<double>(N);
        trace.draws(static_cast<Eigen::Index>(t), 1) = p;
        trace.accepted[t] = ok ? 1 : 0;
    }
    return trace;
}

DiscreteLaw r1_conditional(std::int64_t n1, std::int64_t c2, std::int64_t c3, std::optional<std::int64_t> r2,
                           double p, double q) {
    if (!(p >= 0.0 && p < 1.0) || !(q >= 0.0 && q < 1.0)) throw ConfigError("r1_conditional: need p, q in [0, 1)");
    if (n1 < 0 || c2 < 0 || c3 < 0 || (r2 && *r2 < 0)) throw DataError("r1_conditional: negative count");
    const auto d = [](std::int64_t v) { return static_cast<double>(v); };
    const std::int64_t top = r2 ? std::min(n1 - *r2 - c3, n1 - c2) : std::min(n1 - c2, n1 - c3);
    if (top < 0) throw DataError("r1_conditional: empty support for r1");
    std::vector<double> lw;
    if (r2) {
        const double ratio = q / ((1.0 - q) * (1.0 - q) * (1.0 - p) * (1.0 - p));
        for (std::int64_t r1 = 0; r1 <= top; ++r1)
            lw.push_back(log_choose(d(n1 - c2), d(r1)) + log_choose(d(n1 - r1), d(*r2 + c3)) + xlogy(d(r1), ratio));
    } else {
        // r2 summed out by the binomial theorem
        const double ratio = q / ((1.0 - p) * (1.0 - q) * (q + (1.0 - p) * (1.0 - q)));
        for (std::int64_t r1 = 0; r1 <= top; ++r1)
            lw.push_back(lfact(n1 - r1) - lfact(r1) - lfact(n1 - r1 - c2) - lfact(n1 - r1 - c3) + xlogy(d(r1), ratio));
    }
    normalize_log_weights(lw);
    return {std::move(lw)};
}

std::uint64_t open_population_complexity(int N, int T) {
    if (N < 0 || T < 0) throw ConfigError("open_population_complexity: negative size");
    if (N * T > 40) throw ConfigError("open_population_complexity: 3^(N T) overflows for N T > 40");
    std::uint64_t c = 1;
    for (int i = 0; i < N * T; ++i) c *= 3;
    return c;
}

double open_population_likelihood(int N, int T, double p, double q,
                                  const std::function<bool(const OpenHistory&)>& keep) {
    require_probability(p, "open_population_likelihood", "p");
    require_probability(q, "open_population_likelihood", "q");
    if (N < 1 || T < 1) throw ConfigError("open_population_likelihood: need N, T >= 1");
    if (N * T > 8) throw ConfigError("open_population_likelihood: enumeration limited to N T <= 8");
    const int cells = N * T;
    const std::uint64_t total = open_population_complexity(N, T);
    OpenHistory h{N, T, std::vector<std::uint8_t>(static_cast<std::size_t>(cells)),
                  std::vector<std::uint8_t>(static_cast<std::size_t>(cells))};
    double sum = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        // cell state: 0 exited, 1 present and captured, 2 present and missed
        for (int j = 0; j < cells; ++j, c /= 3) {
            const auto s = static_cast<std::uint8_t>(c % 3);
            h.exited[static_cast<std::size_t>(j)] = s == 0;
            h.captured[static_cast<std::size_t>(j)] = s == 1;
        }
        double prob = 1.0;
        for (int i = 0; i < N && prob > 0.0; ++i) {
            bool gone = false;
            for (int t = 0; t < T; ++t) {
                const auto j = static_cast<std::size_t>(i * T + t);
                const double exit_prob = gone ? 1.0 : q;
                if (h.exited[j]) {
                    prob *= exit_prob;
                    gone = true;
                } else {
                    prob *= (1.0 - exit_prob) * (h.captured[j] ? p : 1.0 - p);
                }
            }
        }
        if (prob > 0.0 && keep(h)) sum += prob;
    }
    return sum;
}

BetaElicitation beta_from_mean_interval(double mean, double lo, double hi, double coverage) {
    if (!(0.0 < lo && lo < mean && mean < hi && hi < 1.0))
        throw ConfigError("beta_from_mean_interval: need 0 < lo < mean < hi < 1");
    if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("beta_from_mean_interval: coverage must be in (0, 1)");
    auto cover = [&](double alpha) {
        const double a = alpha * mean, b = alpha * (1.0 - mean);
        return boost::math::ibeta(a, b, hi) - boost::math::ibeta(a, b, lo);
    };
    double x0 = std::log(1e-3), x1 = std::log(1e6);
    const double f0 = cover(std::exp(x0)) - coverage, f1 = cover(std::exp(x1)) - coverage;
    if (!(f0 < 0.0 && f1 > 0.0))
        throw ConfigError("beta_from_mean_interval: coverage " + std::to_string(coverage) +
                          " is not bracketed on alpha in [1e-3, 1e6] (coverage there: " +
                          std::to_string(f0 + coverage) + ", " + std::to_string(f1 + coverage) + ")");
    for (int it = 0; it < 200 && x1 - x0 > 1e-13; ++it) {
        const double mid = 0.5 * (x0 + x1);
        (cover(std::exp(mid)) < coverage ? x0 : x1) = mid;
    }
    const double alpha = std::exp(0.5 * (x0 + x1));
    return {alpha, alpha * mean, alpha * (1.0 - mean), cover(alpha)};
}

}  // namespace bayescomp
