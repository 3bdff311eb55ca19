#include "bayescomp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "bayescomp/dist.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

double log_normal_density(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

void check_simplex(std::span<const double> w, const char* what) {
    if (w.empty()) throw ConfigError(std::string(what) + ": empty weight vector");
    double s = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + ": weights must be nonnegative");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError(std::string(what) + ": weights must sum to 1");
}

void check_data(std::span<const double> data, const char* what) {
    if (data.empty()) throw DataError(std::string(what) + ": empty data");
    for (double x : data)
        if (!std::isfinite(x)) throw DataError(std::string(what) + ": non-finite observation");
}

void check_allocation(std::span<const double> data, std::span<const int> z, int k) {
    if (z.size() != data.size()) throw DataError("allocation size differs from data size");
    for (int v : z)
        if (v < 0 || v >= k) throw DataError("allocation label out of range");
}

// log p_j + log N(x; mu_j, s2_j) for every component.
void component_log_terms(const MixtureParams& p, double x, std::vector<double>& out) {
    out.resize(p.weights.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = p.weights[j] > 0.0 ? std::log(p.weights[j]) + log_normal_density(x, p.means[j], p.variances[j]) : -kInf;
}

void draw_allocations(const MixtureParams& p, std::span<const double> data, Stream& rng, std::vector<int>& z) {
    std::vector<double> lw;
    z.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        component_log_terms(p, data[i], lw);
        z[i] = static_cast<int>(categorical_log(rng, lw));
    }
}

void record(ChainTrace& trace, std::size_t t, const MixtureParams& p) {
    const auto k = static_cast<Eigen::Index>(p.k());
    const auto row = static_cast<Eigen::Index>(t);
    for (Eigen::Index j = 0; j < k; ++j) {
        trace.draws(row, j) = p.means[j];
        trace.draws(row, k + j) = p.weights[j];
        trace.draws(row, 2 * k + j) = p.variances[j];
    }
    trace.accepted[t] = 1;
}

}  // namespace

void MixtureParams::validate() const {
    if (weights.empty() || means.size() != weights.size() || variances.size() != weights.size())
        throw ConfigError("mixture: weights, means and variances must have the same positive length");
    check_simplex(weights, "mixture");
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!std::isfinite(means[j])) throw ConfigError("mixture: non-finite mean");
        if (!(variances[j] > 0.0) || !std::isfinite(variances[j])) throw ConfigError("mixture: variances must be positive");
    }
}

void MixtureModel::validate() const {
    params.validate();
    const auto k = static_cast<std::size_t>(params.k());
    if (priors.size() != k) throw ConfigError("mixture: one component prior per component");
    if (weight_prior.size() != k) throw ConfigError("mixture: one Dirichlet parameter per component");
    for (double a : weight_prior)
        if (!(a > 0.0)) throw ConfigError("mixture: Dirichlet parameters must be positive");
    for (const auto& c : priors)
        if (!(c.prior_count > 0.0) || !(c.df > 0.0) || !(c.scale > 0.0) || !std::isfinite(c.mean))
            throw ConfigError("mixture: component prior needs positive count, df and scale");
}

double mixture_loglik(const MixtureParams& params, std::span<const double> data) {
    params.validate();
    double ll = 0.0;
    std::vector<double> lw;
    for (double x : data) {
        component_log_terms(params, x, lw);
        ll += log_sum_exp(lw);
    }
    return ll;
}

MixtureSample simulate_mixture(const MixtureParams& params, std::size_t n, Stream& rng) {
    params.validate();
    MixtureSample s;
    s.data.reserve(n);
    s.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = categorical(rng, params.weights);
        s.labels.push_back(static_cast<int>(j));
        s.data.push_back(params.means[j] + std::sqrt(params.variances[j]) * std_normal(rng));
    }
    return s;
}

AllocationStats allocation_stats(std::span<const double> data, std::span<const int> z, int k) {
    check_allocation(data, z, k);
    AllocationStats st{std::vector<std::int64_t>(k, 0), std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
    for (std::size_t i = 0; i < data.size(); ++i) {
        ++st.counts[z[i]];
        st.means[z[i]] += data[i];
    }
    for (int j = 0; j < k; ++j)
        if (st.counts[j] > 0) st.means[j] /= static_cast<double>(st.counts[j]);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = data[i] - st.means[z[i]];
        st.sq_dev[z[i]] += d * d;
    }
    return st;
}

CompleteConditionals complete_conditionals(const MixtureModel& model, std::span<const double> data,
                                           std::span<const int> z) {
    model.validate();
    const int k = model.k();
    const auto st = allocation_stats(data, z, k);
    CompleteConditionals out;
    for (int j = 0; j < k; ++j) {
        const auto& pr = model.priors[j];
        const double l = static_cast<double>(st.counts[j]);
        const double count = pr.prior_count + l;
        const double gap = pr.mean - st.means[j];
        out.weight_dirichlet.push_back(model.weight_prior[j] + l);
        out.components.push_back({(pr.prior_count * pr.mean + l * st.means[j]) / count, count, 0.5 * (pr.df + l),
                                   0.5 * (pr.scale + st.sq_dev[j] + pr.prior_count * l / count * gap * gap)});
    }
    return out;
}

double allocation_log_weight(const MixtureModel& model, std::span<const double> data, std::span<const int> z) {
    const auto cc = complete_conditionals(model, data, z);
    const double a0 = std::accumulate(model.weight_prior.begin(), model.weight_prior.end(), 0.0);
    std::vector<double> terms;
    for (std::size_t j = 0; j < cc.components.size(); ++j) {
        const auto& c = cc.components[j];
        terms.push_back(std::lgamma(cc.weight_dirichlet[j]) + std::lgamma(c.shape) - c.shape * std::log(c.scale) -
                        0.5 * std::log(c.count));
    }
    // summed in sorted order so that relabelling gives the same bits
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0) - std::lgamma(a0 + static_cast<double>(data.size()));
}

// ---------------------------------------------------------------- Gibbs

std::vector<double> annealed_sweep(const MixtureModel& model, std::span<const double> data,
                                   std::span<const double> means, int gamma, Stream& rng) {
    if (gamma < 1) throw ConfigError("annealing power must be a positive integer");
    const int k = model.k();
    MixtureParams cur = model.params;
    cur.means.assign(means.begin(), means.end());
    std::vector<double> sums(k, 0.0), counts(k, 0.0), lw;
    for (int r = 0; r < gamma; ++r)
        for (double x : data) {
            component_log_terms(cur, x, lw);
            const auto j = categorical_log(rng, lw);
            sums[j] += x;
            counts[j] += 1.0;
        }
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) {
        const auto& pr = model.priors[j];
        const double prec = gamma * pr.prior_count + counts[j];
        out[j] = (gamma * pr.prior_count * pr.mean + sums[j]) / prec +
                 std::sqrt(model.params.variances[j] / prec) * std_normal(rng);
    }
    return out;
}

ChainTrace annealed_gibbs_mixture(const MixtureModel& model, std::span<const double> data,
                                  std::span<const int> gammas, Stream& rng) {
    model.validate();
    check_data(data, "annealed_gibbs_mixture");
    if (gammas.empty()) throw ConfigError("annealed_gibbs_mixture: empty schedule");
    const auto k = static_cast<Eigen::Index>(model.k());
    ChainTrace trace;
    trace.seed = rng.seed();
    trace.draws.resize(static_cast<Eigen::Index>(gammas.size()), k);
    trace.accepted.assign(gammas.size(), 1);
    std::vector<double> mu = model.params.means;
    for (std::size_t t = 0; t < gammas.size(); ++t) {
        mu = annealed_sweep(model, data, mu, gammas[t], rng);
        for (Eigen::Index j = 0; j < k; ++j) trace.draws(static_cast<Eigen::Index>(t), j) = mu[j];
    }
    return trace;
}

ChainTrace gibbs_mixture(const MixtureModel& model, std::span<const double> data, const MixtureGibbsOptions& options,
                         Stream& rng, std::size_t sweeps) {
    model.validate();
    check_data(data, "gibbs_mixture");
    if (sweeps == 0) throw ConfigError("gibbs_mixture: sweeps must be positive");
    const int k = model.k();
    const bool location_scale = options.parameterization == MixtureParameterization::location_scale;
    if (location_scale && (k != 2 || options.update_weights || options.update_variances))
        throw ConfigError("location-scale parameterization needs k = 2 with fixed weights and variances");

    ChainTrace trace;
    trace.seed = rng.seed();
    trace.draws.resize(static_cast<Eigen::Index>(sweeps), 3 * k);
    trace.accepted.resize(sweeps);
    MixtureParams cur = model.params;
    std::vector<int> z;
    double mu0 = 0.5 * (cur.means[0] + cur.means[k - 1]);
    double xi = 0.5 * (cur.means[k - 1] - cur.means[0]);
    for (std::size_t t = 0; t < sweeps; ++t) {
        draw_allocations(cur, data, rng, z);
        if (location_scale) {
            const double v1 = cur.variances[0], v2 = cur.variances[1];
            double s1 = 0.0, s2 = 0.0, l1 = 0.0, l2 = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (z[i] == 0) s1 += data[i], l1 += 1.0;
                else s2 += data[i], l2 += 1.0;
            }
            const double prec = l1 / v1 + l2 / v2;
            mu0 = ((s1 + l1 * xi) / v1 + (s2 - l2 * xi) / v2) / prec + std_normal(rng) / std::sqrt(prec);
            xi = ((s2 - l2 * mu0) / v2 - (s1 - l1 * mu0) / v1) / prec + std_normal(rng) / std::sqrt(prec);
            cur.means = {mu0 - xi, mu0 + xi};
        } else {
            const auto cc = complete_conditionals(model, data, z);
            if (options.update_weights) cur.weights = sample_dirichlet(cc.weight_dirichlet, rng);
            for (int j = 0; j < k; ++j) {
                const auto& c = cc.components[j];
                // with l_j = 0 the conditionals are the prior
                if (options.update_variances) cur.variances[j] = c.scale / gamma_unit(rng, c.shape);
                cur.means[j] = c.location + std::sqrt(cur.variances[j] / c.count) * std_normal(rng);
            }
        }
        record(trace, t, cur);
    }
    return trace;
}

double mean_mixture_log_posterior(const MixtureModel& model, std::span<const double> data,
                                  std::span<const double> means) {
    if (means.size() != static_cast<std::size_t>(model.k())) throw ConfigError("mean mixture: one mean per component");
    MixtureParams p = model.params;
    p.means.assign(means.begin(), means.end());
    double lp = 0.0;
    std::vector<double> lw;
    for (double x : data) {
        component_log_terms(p, x, lw);
        lp += log_sum_exp(lw);
    }
    for (int j = 0; j < model.k(); ++j)
        lp += log_normal_density(means[j], model.priors[j].mean, p.variances[j] / model.priors[j].prior_count);
    return lp;
}

TargetDensity mean_mixture_target(const MixtureModel& model, std::vector<double> data) {
    model.validate();
    check_data(data, "mean_mixture_target");
    return TargetDensity::unbounded(model.k(), [model, data = std::move(data)](const Eigen::VectorXd& mu) {
        return mean_mixture_log_posterior(model, data, std::span<const double>(mu.data(), mu.size()));
    });
}

ChainTrace tempered_mixture_chain(const MixtureModel& model, std::span<const double> data,
                                  const TemperingLadder& ladder, double scale, Stream& rng, std::size_t iterations) {
    const auto target = mean_mixture_target(model, std::vector<double>(data.begin(), data.end()));
    const auto kernel = tempered_random_walk(target, scale);
    ChainTrace trace;
    trace.seed = rng.seed();
    trace.draws.resize(static_cast<Eigen::Index>(iterations), model.k());
    trace.accepted.resize(iterations);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(model.params.means.data(), model.k());
    for (std::size_t t = 0; t < iterations; ++t) {
        x = kernel(x, 1.0, rng);
        const auto step = tempering_pump(target, ladder, kernel, x, rng);
        x = step.state;
        trace.draws.row(static_cast<Eigen::Index>(t)) = x.transpose();
        trace.accepted[t] = step.accepted ? 1 : 0;
    }
    return trace;
}

std::vector<double> tempered_acceptance_profile(const MixtureModel& model, std::span<const double> data,
                                                std::span<const double> powers, double scale, Stream& rng,
                                                std::size_t steps) {
    if (!(scale > 0.0) || steps == 0) throw ConfigError("acceptance profile: need positive scale and steps");
    const auto target = mean_mixture_target(model, std::vector<double>(data.begin(), data.end()));
    std::vector<double> rates;
    for (double a : powers) {
        if (!(a > 0.0)) throw ConfigError("acceptance profile: powers must be positive");
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(model.params.means.data(), model.k());
        double lx = target(x);
        std::size_t acc = 0;
        for (std::size_t s = 0; s < steps; ++s) {
            Eigen::VectorXd y = x;
            for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += scale * std_normal(rng);
            const double ly = target(y);
            if (std::log(rng.uniform()) < a * (ly - lx)) {
                x = y;
                lx = ly;
                ++acc;
            }
        }
        rates.push_back(static_cast<double>(acc) / static_cast<double>(steps));
    }
    return rates;
}

// ---------------------------------------------------------------- posterior grid

MeanPosteriorGrid mean_posterior_grid(const MixtureModel& model, std::span<const double> data, double lo, double hi,
                                      std::size_t points) {
    model.validate();
    if (model.k() != 2) throw ConfigError("mean posterior grid needs k = 2");
    if (!(hi > lo) || points < 3) throw ConfigError("mean posterior grid: need lo < hi and at least 3 points");
    MeanPosteriorGrid g;
    const auto m = static_cast<Eigen::Index>(points);
    for (Eigen::Index i = 0; i < m; ++i) g.axis.push_back(lo + (hi - lo) * static_cast<double>(i) / (m - 1.0));
    g.log_density.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const double mu[2] = {g.axis[i], g.axis[j]};
            g.log_density(i, j) = mean_mixture_log_posterior(model, data, mu);
        }
    g.log_density.array() -= g.log_density.maxCoeff();
    return g;
}

std::pair<double, double> MeanPosteriorGrid::map() const {
    Eigen::Index i = 0, j = 0;
    log_density.maxCoeff(&i, &j);
    return {axis[i], axis[j]};
}

std::pair<double, double> MeanPosteriorGrid::posterior_mean() const {
    const Eigen::ArrayXXd w = log_density.array().exp();
    const double total = w.sum();
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            m1 += w(i, j) * axis[i];
            m2 += w(i, j) * axis[j];
        }
    return {m1 / total, m2 / total};
}

std::pair<Eigen::Index, Eigen::Index> MeanPosteriorGrid::basin(double mu1, double mu2) const {
    const auto m = static_cast<Eigen::Index>(axis.size());
    const double h = (axis.back() - axis.front()) / (m - 1.0);
    auto nearest = [&](double v) {
        return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::lround((v - axis.front()) / h)), 0, m - 1);
    };
    Eigen::Index i = nearest(mu1), j = nearest(mu2);
    for (;;) {
        Eigen::Index bi = i, bj = j;
        for (Eigen::Index di = -1; di <= 1; ++di)
            for (Eigen::Index dj = -1; dj <= 1; ++dj) {
                const Eigen::Index a = i + di, b = j + dj;
                if (a < 0 || b < 0 || a >= m || b >= m) continue;
                if (log_density(a, b) > log_density(bi, bj)) bi = a, bj = b;
            }
        if (bi == i && bj == j) return {i, j};
        i = bi;
        j = bj;
    }
}

bool MeanPosteriorGrid::in_map_basin(double mu1, double mu2) const {
    Eigen::Index i = 0, j = 0;
    log_density.maxCoeff(&i, &j);
    return basin(mu1, mu2) == std::pair<Eigen::Index, Eigen::Index>{i, j};
}

TrappingReport mode_trapping(const MixtureModel& model, std::span<const double> data,
                             const MixtureGibbsOptions& options, std::span<const std::pair<double, double>> starts,
                             const MeanPosteriorGrid& grid, Stream& rng, std::size_t sweeps) {
    if (sweeps < 2) throw ConfigError("mode_trapping: need at least 2 sweeps");
    TrappingReport rep;
    for (std::size_t c = 0; c < starts.size(); ++c) {
        MixtureModel m = model;
        m.params.means = {starts[c].first, starts[c].second};
        Stream chain = rng.split(c);
        const auto tr = gibbs_mixture(m, data, options, chain, sweeps);
        const auto half = static_cast<Eigen::Index>(sweeps / 2);
        const auto tail = tr.draws.bottomRows(tr.draws.rows() - half);
        ++rep.chains;
        if (!grid.in_map_basin(tail.col(0).mean(), tail.col(1).mean())) ++rep.trapped;
    }
    return rep;
}

// ---------------------------------------------------------------- EM

EmResult em_mixture(const MixtureParams& start, std::span<const double> data, const EmOptions& options) {
    start.validate();
    check_data(data, "em_mixture");
    if (std::adjacent_find(data.begin(), data.end(), std::not_equal_to<>()) == data.end())
        throw DataError("em_mixture: need at least two distinct observations");
    const int k = start.k();
    const std::size_t n = data.size();
    EmResult res;
    res.path.push_back(start);
    res.loglik.push_back(mixture_loglik(start, data));
    Eigen::MatrixXd resp(static_cast<Eigen::Index>(n), k);
    std::vector<double> lw;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        const MixtureParams& cur = res.path.back();
        for (std::size_t i = 0; i < n; ++i) {
            component_log_terms(cur, data[i], lw);
            const double z = log_sum_exp(lw);
            for (int j = 0; j < k; ++j) resp(static_cast<Eigen::Index>(i), j) = std::exp(lw[j] - z);
        }
        MixtureParams next = cur;
        for (int j = 0; j < k; ++j) {
            const double w = resp.col(j).sum();
            if (!options.fix_weights) next.weights[j] = w / static_cast<double>(n);
            if (!(w > 0.0)) {
                res.degenerate = true;
                continue;
            }
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m += resp(static_cast<Eigen::Index>(i), j) * data[i];
            m /= w;
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += resp(static_cast<Eigen::Index>(i), j) * (data[i] - m) * (data[i] - m);
            v /= w;
            next.means[j] = m;
            next.variances[j] = v;
            if (v < options.variance_floor) res.degenerate = true;
        }
        if (res.degenerate) {
            // keep the collapsing step visible without evaluating a zero variance
            for (double& v : next.variances) v = std::max(v, std::numeric_limits<double>::min());
            res.path.push_back(next);
            res.loglik.push_back(mixture_loglik(next, data));
            break;
        }
        res.path.push_back(next);
        res.loglik.push_back(mixture_loglik(next, data));
    }
    return res;
}

MixtureParams em_random_start(std::span<const double> data, Stream& rng) {
    const auto ms = mean_se(data);
    double var = 0.0;
    for (double x : data) var += (x - ms.mean) * (x - ms.mean);
    var /= static_cast<double>(data.size() - 1);
    const double sd = std::sqrt(var);
    MixtureParams p;
    const double w = rng.uniform();
    p.weights = {w, 1.0 - w};
    p.means = {ms.mean + 2.0 * std_normal(rng) * sd, ms.mean + 2.0 * std_normal(rng) * sd};
    p.variances = {-std::log(rng.uniform()) * var, -std::log(rng.uniform()) * var};
    return p;
}

// ---------------------------------------------------------------- likelihood surface

double half_mixture_loglik(std::span<const double> data, double mu, double var) {
    if (!(var > 0.0)) throw ConfigError("half_mixture_loglik: variance must be positive");
    double ll = 0.0;
    for (double x : data)
        ll += log_add_exp(log_normal_density(x, 0.0, 1.0), log_normal_density(x, mu, var)) - std::numbers::ln2;
    return ll;
}

LikelihoodSurface likelihood_surface(std::span<const double> data, std::vector<double> means,
                                     std::vector<double> variances) {
    check_data(data, "likelihood_surface");
    LikelihoodSurface s{std::move(means), std::move(variances), {}};
    s.loglik.resize(static_cast<Eigen::Index>(s.means.size()), static_cast<Eigen::Index>(s.variances.size()));
    for (std::size_t i = 0; i < s.means.size(); ++i)
        for (std::size_t j = 0; j < s.variances.size(); ++j)
            s.loglik(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                half_mixture_loglik(data, s.means[i], s.variances[j]);
    return s;
}

ExplosionProbe explosion_probe(std::span<const double> data, std::size_t index, int min_log10) {
    check_data(data, "explosion_probe");
    if (index >= data.size()) throw ConfigError("explosion_probe: index out of range");
    if (min_log10 > -10 || min_log10 < -300) throw ConfigError("explosion_probe: min_log10 must lie in [-300, -10]");
    ExplosionProbe p{{}, {}, half_mixture_loglik(data, data[index], 1.0), false};
    for (int e = -1; e >= min_log10; --e) {
        p.variances.push_back(std::pow(10.0, e));
        p.loglik.push_back(half_mixture_loglik(data, data[index], p.variances.back()));
    }
    // once every other point has dropped out of the spike, each decade adds the same positive amount
    const std::size_t m = p.loglik.size();
    bool steady = true;
    for (std::size_t i = m - 5; i < m; ++i) {
        const double step = p.loglik[i] - p.loglik[i - 1], prev = p.loglik[i - 1] - p.loglik[i - 2];
        if (!(step > 0.0) || std::abs(step - prev) > 1e-9 * std::abs(step)) steady = false;
    }
    p.diverging = steady && p.loglik.back() > p.reference;
    return p;
}

// ---------------------------------------------------------------- structure

double collapse_bernoulli_mixture(std::span<const double> weights, std::span<const double> probs) {
    check_simplex(weights, "bernoulli mixture");
    if (probs.size() != weights.size()) throw ConfigError("bernoulli mixture: one probability per component");
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) throw ConfigError("bernoulli mixture: probabilities must lie in [0, 1]");
        s += weights[i] * probs[i];
    }
    return s;
}

std::vector<double> collapse_categorical_mixture(std::span<const double> weights, const Eigen::MatrixXd& probs) {
    check_simplex(weights, "categorical mixture");
    if (probs.rows() != static_cast<Eigen::Index>(weights.size()))
        throw ConfigError("categorical mixture: one row of cell probabilities per component");
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        const Eigen::VectorXd row = probs.row(i).transpose();
        check_simplex(std::span<const double>(row.data(), row.size()), "categorical mixture");
    }
    std::vector<double> cells(static_cast<std::size_t>(probs.cols()), 0.0);
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        for (Eigen::Index j = 0; j < probs.cols(); ++j) cells[j] += weights[i] * probs(i, j);
    return cells;
}

boost::multiprecision::cpp_int partition_count(std::int64_t n, std::int64_t k) {
    if (n < 1 || k < 1) throw ConfigError("partition_count: need n, k >= 1");
    boost::multiprecision::cpp_int r = 1;
    for (std::int64_t i = 1; i < k; ++i) {
        r *= n + i;
        r /= i;  // exact: r is C(n + i, i) here
    }
    return r;
}

ModelAverage model_average(std::vector<SubmodelSummary> submodels) {
    if (submodels.empty()) throw ConfigError("model_average: no submodels");
    std::vector<double> w;
    for (const auto& s : submodels) w.push_back(s.prior_weight);
    check_simplex(w, "model_average");
    std::vector<double> lw;
    for (const auto& s : submodels) lw.push_back(s.prior_weight > 0.0 ? std::log(s.prior_weight) + s.log_marginal : -kInf);
    const double lm = log_sum_exp(lw);
    if (!std::isfinite(lm)) throw DataError("model_average: every submodel gives the data zero marginal");
    ModelAverage out{lm, {}, {}};
    const double top = *std::max_element(lw.begin(), lw.end());
    double total = 0.0;
    for (double v : lw) total += std::exp(v - top);
    for (double v : lw) out.posterior_weights.push_back(std::exp(v - top) / total);
    out.predictive = [subs = std::move(submodels), pw = out.posterior_weights](double x) {
        double f = 0.0;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (pw[i] > 0.0) f += pw[i] * subs[i].predictive(x);
        return f;
    };
    return out;
}

std::vector<double> ModelImportanceSample::model_probabilities(std::size_t models) const {
    std::vector<double> lw(models, -kInf);
    if (log_weight.empty()) throw NumericalError("model_probabilities: empty sample");
    const double top = *std::max_element(log_weight.begin(), log_weight.end());
    if (!std::isfinite(top)) throw NumericalError("model_probabilities: all weights vanish");
    std::vector<double> mass(models, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < log_weight.size(); ++i) {
        const double w = std::exp(log_weight[i] - top);
        mass[model[i]] += w;
        total += w;
    }
    for (double& m : mass) m /= total;
    return mass;
}

ModelImportanceSample model_importance_sampler(const std::vector<CandidateModel>& models,
                                               const std::vector<ModelProposal>& proposals, Stream& rng,
                                               std::size_t n) {
    if (models.empty() || models.size() != proposals.size())
        throw ConfigError("model importance sampler: one proposal per model");
    std::vector<double> rho, omega;
    for (const auto& m : models) rho.push_back(m.prior_weight);
    for (const auto& p : proposals) omega.push_back(p.weight);
    check_simplex(rho, "model prior");
    check_simplex(omega, "model proposal");
    for (std::size_t k = 0; k < models.size(); ++k) {
        if (rho[k] > 0.0 && omega[k] == 0.0)
            throw ConfigError("model importance sampler: proposal weight zero on a model with prior mass");
        const auto& pr = models[k].prior;
        const auto& q = proposals[k].sampler.density;
        if (pr.dim() != q.dim()) throw ConfigError("model importance sampler: dimension mismatch");
        for (Eigen::Index i = 0; i < pr.dim(); ++i)
            if (q.lower(i) > pr.lower(i) || q.upper(i) < pr.upper(i))
                throw ConfigError("model importance sampler: proposal support does not cover the prior support");
    }
    ModelImportanceSample s;
    for (std::size_t t = 0; t < n; ++t) {
        const auto k = categorical(rng, omega);
        Eigen::VectorXd theta = proposals[k].sampler.draw(rng);
        const double lr = ((rho[k] > 0.0 ? std::log(rho[k]) : -kInf) - std::log(omega[k])) +
                          (models[k].prior(theta) - proposals[k].sampler.density(theta));
        const double ll = models[k].loglik && std::isfinite(lr) ? models[k].loglik(theta) : 0.0;
        s.model.push_back(k);
        s.theta.push_back(std::move(theta));
        s.log_prior_ratio.push_back(lr);
        s.log_weight.push_back(lr + ll);
    }
    return s;
}

double exchangeable_weight_mean(const MixtureModel& model) {
    model.validate();
    const auto& a = model.weight_prior;
    const auto& p = model.priors;
    const bool same_weights = std::all_of(a.begin(), a.end(), [&](double v) { return v == a.front(); });
    const bool same_components = std::all_of(p.begin(), p.end(), [&](const ComponentPrior& c) {
        return c.mean == p.front().mean && c.prior_count == p.front().prior_count && c.df == p.front().df &&
               c.scale == p.front().scale;
    });
    if (!same_weights || !same_components) throw ConfigError("exchangeable_weight_mean: prior is not exchangeable");
    return 1.0 / model.k();
}

}  // namespace bayescomp
