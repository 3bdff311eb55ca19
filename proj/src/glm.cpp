#include "bayescomp/glm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bayescomp/dist.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 + e^t) without overflow.
double log1p_exp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double log_link_cdf(Link link, double t) { return link == Link::probit ? log_normal_cdf(t) : -log1p_exp(-t); }

double log_link_density(Link link, double t) {
    if (link == Link::probit) return -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi);
    return -std::abs(t) - 2.0 * std::log1p(std::exp(-std::abs(t)));
}

// d/dt and d2/dt2 of the log-likelihood contribution of one observation at t = x'b.
std::pair<double, double> contribution_derivatives(Link link, bool success, double t) {
    if (link == Link::logit) {
        const double p = 1.0 / (1.0 + std::exp(-t));
        return {(success ? 1.0 : 0.0) - p, -p * (1.0 - p)};
    }
    const double s = success ? t : -t;
    const double mills = std::exp(-0.5 * s * s - 0.5 * std::log(2.0 * std::numbers::pi) - log_normal_cdf(s));
    const double d1 = success ? mills : -mills;
    return {d1, -mills * (s + mills)};
}

void require_beta(const BinaryGlmData& data, const Eigen::VectorXd& beta, const char* who) {
    if (beta.size() != data.k())
        throw ConfigError(std::string(who) + ": beta has " + std::to_string(beta.size()) + " entries, design has " +
                          std::to_string(data.k()) + " columns");
}

double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

void BinaryGlmData::validate() const {
    if (X.rows() == 0 || X.cols() == 0) throw DataError("glm data: empty design matrix");
    if (y.size() != X.rows())
        throw DataError("glm data: " + std::to_string(y.size()) + " responses for " + std::to_string(X.rows()) +
                        " design rows");
    if (!X.allFinite()) throw DataError("glm data: non-finite design entry");
    double successes = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw DataError("glm data: response " + std::to_string(i) + " is not 0 or 1");
        successes += y[i];
    }
    if (successes == 0.0 || successes == static_cast<double>(y.size()))
        throw DataError("glm data: posterior is improper when all responses are equal");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) throw DataError("glm data: design matrix is rank deficient");
}

BinaryGlmData make_glm_data(Eigen::MatrixXd X, Eigen::VectorXd y, Link link) {
    BinaryGlmData d{std::move(X), std::move(y), link};
    d.validate();
    return d;
}

double log_normal_cdf(double t) {
    if (t > -30.0) {
        if (t > 5.0) return std::log1p(-0.5 * std::erfc(t / std::numbers::sqrt2));
        return std::log(0.5 * std::erfc(-t / std::numbers::sqrt2));
    }
    // Mills ratio expansion; relative error below 1e-10 at t = -30.
    const double r = 1.0 / (t * t);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-t) + std::log(series);
}

double glm_loglik(const BinaryGlmData& data, const Eigen::VectorXd& beta) {
    require_beta(data, beta, "glm_loglik");
    const Eigen::VectorXd eta = data.X * beta;
    double total = 0.0;
    if (data.link == Link::logit) {
        // canonical form: y'eta - sum log(1 + e^eta)
        for (Eigen::Index i = 0; i < eta.size(); ++i) total -= log1p_exp(eta[i]);
        return total + logit_sufficient_statistic(data).dot(beta);
    }
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        total += log_normal_cdf(data.y[i] == 1.0 ? eta[i] : -eta[i]);
    return total;
}

Eigen::VectorXd logit_sufficient_statistic(const BinaryGlmData& data) { return data.X.transpose() * data.y; }

bool poisson_regression_link_check(const Eigen::VectorXd& mu, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    if (mu.size() != X.rows() || beta.size() != X.cols())
        throw ConfigError("poisson_regression_link_check: dimension mismatch");
    const Eigen::VectorXd eta = X * beta;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!(mu[i] > 0.0)) return false;
        if (std::abs(std::log(mu[i]) - eta[i]) > 1e-12) return false;
    }
    return true;
}

Eigen::VectorXd poisson_to_multinomial(const Eigen::VectorXd& mu) {
    if (mu.size() == 0) throw ConfigError("poisson_to_multinomial: empty mean vector");
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        if (!(mu[i] > 0.0) || !std::isfinite(mu[i]))
            throw ConfigError("poisson_to_multinomial: means must be positive and finite");
    return mu / mu.sum();
}

double glm_log_posterior(const BinaryGlmData& data, GlmPrior prior, const Eigen::VectorXd& beta) {
    const double ll = glm_loglik(data, beta);
    if (prior == GlmPrior::flat) return ll;
    const Eigen::MatrixXd xtx = data.X.transpose() * data.X;
    const double quad = beta.dot(xtx * beta);
    if (!(quad > 0.0)) return kNegInf;
    const double k = static_cast<double>(data.k());
    const double log_det = 2.0 * Eigen::LLT<Eigen::MatrixXd>(xtx).matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double log_const = 0.5 * log_det + std::lgamma((2.0 * k - 1.0) / 4.0) - 0.5 * k * std::log(std::numbers::pi);
    return ll + log_const - (2.0 * k - 1.0) / 4.0 * std::log(quad);
}

GlmFit glm_mle(const BinaryGlmData& data) {
    data.validate();
    const Eigen::Index k = data.k();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    double ll = glm_loglik(data, beta);
    Eigen::MatrixXd info(k, k);
    bool converged = false;
    int it = 0;

    auto gradient_info = [&](const Eigen::VectorXd& b, Eigen::VectorXd& grad) {
        grad.setZero(k);
        info.setZero();
        const Eigen::VectorXd eta = data.X * b;
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const auto [d1, d2] = contribution_derivatives(data.link, data.y[i] == 1.0, eta[i]);
            grad += d1 * data.X.row(i).transpose();
            info.noalias() -= d2 * data.X.row(i).transpose() * data.X.row(i);
        }
    };

    Eigen::VectorXd grad;
    for (it = 1; it <= 25; ++it) {
        gradient_info(beta, grad);
        const Eigen::VectorXd step = info.ldlt().solve(grad);
        double t = 1.0;
        Eigen::VectorXd next = beta + step;
        double ll_next = glm_loglik(data, next);
        for (int h = 0; h < 40 && !(ll_next >= ll); ++h) {
            t *= 0.5;
            next = beta + t * step;
            ll_next = glm_loglik(data, next);
        }
        if (!(ll_next >= ll)) break;
        const double change = std::abs(ll_next - ll) / (std::abs(2.0 * ll_next) + 0.1);
        beta = next;
        ll = ll_next;
        if (change < 1e-10 && step.lpNorm<Eigen::Infinity>() * t < 1e-6) {
            converged = true;
            break;
        }
    }
    gradient_info(beta, grad);
    Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    cov = 0.5 * (cov + cov.transpose());
    return {beta, cov, ll, converged, std::min(it, 25)};
}

namespace {

GlmChain summarize(ChainTrace trace) {
    GlmChain out;
    const Eigen::Index n = trace.draws.rows();
    const Eigen::Index b = static_cast<Eigen::Index>(std::min<std::size_t>(trace.burnin, static_cast<std::size_t>(n)));
    const Eigen::MatrixXd kept = trace.draws.bottomRows(n - b);
    std::size_t acc = 0;
    for (auto a : trace.accepted) acc += a;
    out.acceptance = trace.accepted.empty() ? 0.0 : static_cast<double>(acc) / static_cast<double>(trace.accepted.size());
    if (kept.rows() > 0) {
        out.mean = kept.colwise().mean().transpose();
        const Eigen::MatrixXd centred = kept.rowwise() - out.mean.transpose();
        out.covariance = centred.transpose() * centred / std::max<double>(1.0, static_cast<double>(kept.rows() - 1));
        out.separation_warning = kept.rowwise().norm().mean() > 1e3 && out.acceptance > 0.9;
    } else {
        out.mean = Eigen::VectorXd::Zero(trace.draws.cols());
        out.covariance = Eigen::MatrixXd::Zero(trace.draws.cols(), trace.draws.cols());
        out.separation_warning = false;
    }
    out.trace = std::move(trace);
    return out;
}

Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& cov, const char* who) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || !cov.allFinite())
        throw NumericalError(std::string(who) + ": proposal covariance is not positive definite");
    return llt.matrixL();
}

}  // namespace

GlmChain mh_glm_sampler(const BinaryGlmData& data, GlmPrior prior, double scale, Stream& rng,
                        std::size_t iterations, std::size_t burnin) {
    if (!(scale > 0.0)) throw ConfigError("mh_glm_sampler: scale must be positive");
    if (iterations == 0) throw ConfigError("mh_glm_sampler: iterations must be positive");
    const GlmFit fit = glm_mle(data);
    const Eigen::MatrixXd L = std::sqrt(scale) * lower_factor(fit.covariance, "mh_glm_sampler");
    const Eigen::Index k = data.k();

    ChainTrace trace;
    trace.seed = rng.seed();
    trace.burnin = burnin;
    trace.draws.resize(static_cast<Eigen::Index>(iterations), k);
    trace.accepted.resize(iterations);
    Eigen::VectorXd beta = fit.beta;
    double lp = glm_log_posterior(data, prior, beta);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
    for (std::size_t t = 0; t < iterations; ++t) {
        const Eigen::VectorXd cand = draw_mvnormal(beta, L, rng);
        const double lp_cand = glm_log_posterior(data, prior, cand);
        const double u = rng.uniform();
        const bool accept = lp_cand > kNegInf && (lp == kNegInf || std::log(u) < lp_cand - lp);
        if (accept) {
            beta = cand;
            lp = lp_cand;
        }
        trace.draws.row(static_cast<Eigen::Index>(t)) = beta.transpose();
        trace.accepted[t] = accept ? 1 : 0;
    }
    return summarize(std::move(trace));
}

double draw_latent(double mean, bool success, Stream& rng) {
    return sample_truncated_normal(mean, 1.0, success ? Side::positive : Side::negative, rng);
}

AlbertChibChain albert_chib_gibbs(const BinaryGlmData& data, Stream& rng, std::size_t iterations,
                                  std::size_t burnin) {
    if (data.link != Link::probit) throw ConfigError("albert_chib_gibbs: requires the probit link");
    if (iterations == 0) throw ConfigError("albert_chib_gibbs: iterations must be positive");
    const GlmFit fit = glm_mle(data);
    const Eigen::Index k = data.k();
    const Eigen::MatrixXd xtx_inv =
        (data.X.transpose() * data.X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd L = lower_factor(0.5 * (xtx_inv + xtx_inv.transpose()), "albert_chib_gibbs");
    const Eigen::MatrixXd hat = xtx_inv * data.X.transpose();

    ChainTrace trace;
    trace.seed = rng.seed();
    trace.burnin = burnin;
    trace.draws.resize(static_cast<Eigen::Index>(iterations), k);
    trace.accepted.assign(iterations, 1);
    std::size_t violations = 0;
    Eigen::VectorXd beta = fit.beta;
    Eigen::VectorXd z(data.n());
    for (std::size_t t = 0; t < iterations; ++t) {
        const Eigen::VectorXd eta = data.X * beta;
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            const bool success = data.y[i] == 1.0;
            z[i] = draw_latent(eta[i], success, rng);
            if ((z[i] > 0.0) != success) ++violations;
        }
        beta = draw_mvnormal(hat * z, L, rng);
        trace.draws.row(static_cast<Eigen::Index>(t)) = beta.transpose();
    }
    return {summarize(std::move(trace)), violations};
}

GlmBayesFactor glm_bayes_factor(const BinaryGlmData& data, const std::vector<Eigen::Index>& subset0, Stream& rng,
                                std::size_t n_imp, std::size_t chain_iterations) {
    data.validate();
    if (subset0.empty()) throw ConfigError("glm_bayes_factor: null model needs at least one column");
    std::vector<Eigen::Index> cols = subset0;
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end())
        throw ConfigError("glm_bayes_factor: repeated column in subset");
    for (auto c : cols)
        if (c < 0 || c >= data.k()) throw ConfigError("glm_bayes_factor: column index out of range");
    if (static_cast<Eigen::Index>(cols.size()) == data.k()) return {0.0, 0.0, 0.0, 0.0};
    if (n_imp < 40) throw ConfigError("glm_bayes_factor: n_imp must be at least 40");

    BinaryGlmData null_model{Eigen::MatrixXd(data.n(), static_cast<Eigen::Index>(cols.size())), data.y, data.link};
    for (std::size_t j = 0; j < cols.size(); ++j) null_model.X.col(static_cast<Eigen::Index>(j)) = data.X.col(cols[j]);

    constexpr std::size_t kBlocks = 20;
    auto log_weights = [&](const BinaryGlmData& model) {
        const GlmChain chain = mh_glm_sampler(model, GlmPrior::noninformative, 1.0, rng, chain_iterations,
                                              chain_iterations / 10);
        lower_factor(chain.covariance, "glm_bayes_factor");
        const MultivariateStudentT proposal(5.0, chain.mean, 2.0 * chain.covariance);
        std::vector<double> w(n_imp);
        for (auto& wi : w) {
            const Eigen::VectorXd b = proposal.draw(rng);
            wi = glm_log_posterior(model, GlmPrior::noninformative, b) - proposal.logpdf(b);
        }
        return w;
    };
    const std::vector<double> w1 = log_weights(data);
    const std::vector<double> w0 = log_weights(null_model);

    // Block log-sums; block b holds indices with i % kBlocks == b.
    auto block_sums = [&](const std::vector<double>& w) {
        std::array<std::vector<double>, kBlocks> parts;
        for (std::size_t i = 0; i < w.size(); ++i) parts[i % kBlocks].push_back(w[i]);
        std::array<double, kBlocks> out{};
        for (std::size_t b = 0; b < kBlocks; ++b) out[b] = log_sum_exp(parts[b]);
        return out;
    };
    const auto s1 = block_sums(w1);
    const auto s0 = block_sums(w0);
    const double log_n = std::log(static_cast<double>(n_imp));
    const double m1 = log_sum_exp(w1) - log_n;
    const double m0 = log_sum_exp(w0) - log_n;

    std::array<double, kBlocks> loo{};
    for (std::size_t b = 0; b < kBlocks; ++b) {
        std::vector<double> r1, r0;
        double kept = 0.0;
        for (std::size_t c = 0; c < kBlocks; ++c) {
            if (c == b) continue;
            r1.push_back(s1[c]);
            r0.push_back(s0[c]);
        }
        for (std::size_t i = 0; i < n_imp; ++i) kept += (i % kBlocks != b) ? 1.0 : 0.0;
        loo[b] = (log_sum_exp(r1) - std::log(kept)) - (log_sum_exp(r0) - std::log(kept));
    }
    double loo_mean = 0.0;
    for (double v : loo) loo_mean += v / kBlocks;
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    const double se = std::sqrt((kBlocks - 1.0) / kBlocks * ss);
    return {m1 - m0, se, m1, m0};
}

double prior_transform_jacobian(Link link, const Eigen::MatrixXd& Xtilde, const Eigen::VectorXd& beta) {
    if (Xtilde.rows() != Xtilde.cols() || Xtilde.cols() != beta.size())
        throw ConfigError("prior_transform_jacobian: X~ must be square and match beta");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Xtilde);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw ConfigError("prior_transform_jacobian: X~ is singular");
    const Eigen::VectorXd eta = Xtilde * beta;
    double total = std::log(std::abs(lu.determinant()));
    for (Eigen::Index i = 0; i < eta.size(); ++i) total += log_link_density(link, eta[i]);
    return total;
}

double induced_log_prior(Link link, const Eigen::MatrixXd& Xtilde, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& K, const Eigen::VectorXd& g) {
    if (K.size() != beta.size() || g.size() != beta.size())
        throw ConfigError("induced_log_prior: K and g must match beta");
    const double jac = prior_transform_jacobian(link, Xtilde, beta);
    const Eigen::VectorXd eta = Xtilde * beta;
    double total = jac;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (!(K[i] > 0.0) || !(g[i] > 0.0 && g[i] < 1.0))
            throw ConfigError("induced_log_prior: need K > 0 and 0 < g < 1");
        const double a = K[i] * g[i];
        const double b = K[i] * (1.0 - g[i]);
        total += (a - 1.0) * log_link_cdf(link, eta[i]) + (b - 1.0) * log_link_cdf(link, -eta[i]) - lbeta(a, b);
    }
    return total;
}

void ContingencyTable2x2::validate() const {
    if (n11 < 0 || n12 < 0 || n21 < 0 || n22 < 0) throw DataError("contingency table: negative count");
    if (total() < 1) throw DataError("contingency table: no observations");
}

ContingencyMarginals contingency_marginals(const ContingencyTable2x2& t) {
    t.validate();
    const double n = static_cast<double>(t.total());
    std::array<double, 4> cells{static_cast<double>(t.n11), static_cast<double>(t.n12), static_cast<double>(t.n21),
                                static_cast<double>(t.n22)};
    // Fixed summation order keeps the result identical under relabelling.
    std::sort(cells.begin(), cells.end());
    double full = -std::log(n + 1.0) - 2.0 * std::log(std::numbers::pi);
    double coef = std::lgamma(n + 1.0);
    for (double c : cells) {
        full += std::lgamma(c + 0.5) - std::lgamma(c + 1.0);
        coef -= std::lgamma(c + 1.0);
    }
    auto margin = [&](double r) {
        const double lo = std::min(r, n - r), hi = std::max(r, n - r);
        return std::lgamma(lo + 1.0) + std::lgamma(hi + 1.0) - std::lgamma(n + 2.0);
    };
    const double rows = margin(static_cast<double>(t.n11 + t.n12));
    const double colm = margin(static_cast<double>(t.n11 + t.n21));
    const double indep = coef + std::min(rows, colm) + std::max(rows, colm);
    return {full, indep};
}

double contingency_bf(const ContingencyTable2x2& table) {
    const auto m = contingency_marginals(table);
    return m.log_indep - m.log_full;
}

SubmodelCount submodel_count(int n_vars) {
    if (n_vars != 4) throw UnsupportedError("submodel_count: only four-way tables are supported");
    SubmodelCount c{};
    c.single_factor = 1LL << 4;
    c.two_factor = (1LL << 6) - 1;
    c.three_factor = (1LL << 4) - 1;
    c.total = c.single_factor + c.two_factor + c.three_factor;
    return c;
}

}  // namespace bayescomp
