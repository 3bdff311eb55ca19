#include "bayescomp/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "bayescomp/dist.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

void check_series(std::span<const double> x, const char* what) {
    for (double v : x)
        if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite observation");
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

// ---------------------------------------------------------------- moving averages

double WindowedAverageStats::autocovariance(int lag) const noexcept {
    const int width = 2 * half_width + 1;
    const int h = std::abs(lag);
    if (h >= width) return 0.0;
    return static_cast<double>(width - h) * noise_variance / (static_cast<double>(width) * width);
}

WindowedAverageStats windowed_average_stats(double intercept, double slope, double noise_variance, int half_width) {
    if (half_width < 0) throw ConfigError("window half width must be nonnegative");
    if (!(noise_variance >= 0.0)) throw ConfigError("noise variance must be nonnegative");
    return {intercept, slope, noise_variance, half_width};
}

// ---------------------------------------------------------------- AR(1)

Ar1Stationarity ar1_stationary_check(double tau2, double sigma2, double rho) {
    if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw ConfigError("variances must be positive");
    if (!(std::abs(rho) < 1.0)) return {false, kInf, false};
    const double required = sigma2 / (1.0 - rho * rho);
    return {true, required, std::abs(tau2 - required) <= 1e-12 * required};
}

double Ar1Posterior::residual_ss() const noexcept { return std::max(0.0, lead_sq - cross * cross / lag_sq); }

ScalarFamily Ar1Posterior::rho_given_variance(double sigma2) const {
    if (!(sigma2 > 0.0)) throw ConfigError("variance must be positive");
    return ScalarFamily::normal(rho_mean(), sigma2 / lag_sq);
}

ScalarFamily Ar1Posterior::rho_marginal() const {
    const double rss = residual_ss();
    if (!(rss > 0.0)) throw DataError("zero residual sum of squares: the series is an exact AR(1) path");
    const double df = static_cast<double>(transitions) - 1.0;
    return ScalarFamily::student_t(df, rho_mean(), rss / (lag_sq * df));
}

ScalarFamily Ar1Posterior::predictive() const {
    const double rss = residual_ss();
    if (!(rss > 0.0)) throw DataError("zero residual sum of squares: the series is an exact AR(1) path");
    const double df = static_cast<double>(transitions) - 1.0;
    return ScalarFamily::student_t(df, rho_mean() * last, rss * (1.0 + last * last / lag_sq) / df);
}

Ar1Posterior ar1_posterior(std::span<const double> series) {
    if (series.size() < 4) throw DataError("AR(1) posterior needs at least three transitions");
    check_series(series, "AR(1) posterior");
    Ar1Posterior post{series.size() - 1, 0.0, 0.0, 0.0, series.back()};
    for (std::size_t t = 0; t + 1 < series.size(); ++t) {
        post.lag_sq += series[t] * series[t];
        post.cross += series[t] * series[t + 1];
        post.lead_sq += series[t + 1] * series[t + 1];
    }
    if (!(post.lag_sq > 0.0)) throw DataError("AR(1) posterior: lagged sum of squares is zero");
    return post;
}

// ---------------------------------------------------------------- AR(p)

std::vector<Complex> ArModel::roots() const {
    if (inverse_roots) return *inverse_roots;
    return coeffs_to_roots(coefficients);
}

bool ArModel::causal() const {
    const auto r = roots();
    return std::all_of(r.begin(), r.end(), [](Complex z) { return std::abs(z) < 1.0; });
}

void ArModel::validate() const {
    if (!(sd >= 0.0) || !std::isfinite(sd)) throw ConfigError("AR innovation sd must be finite and nonnegative");
    if (!std::isfinite(mean) || !coefficients.allFinite()) throw ConfigError("AR parameters must be finite");
    if (inverse_roots) {
        if (static_cast<Eigen::Index>(inverse_roots->size()) != coefficients.size())
            throw ConfigError("AR model: number of inverse roots differs from the order");
        const auto expanded = roots_to_coeffs(*inverse_roots).coefficients;
        if ((expanded - coefficients).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("AR model: coefficients do not match the inverse roots");
    }
}

bool ar2_causal(double rho1, double rho2) {
    // inverse roots solve z^2 - rho1 z - rho2 = 0
    const Complex disc = std::sqrt(Complex(rho1 * rho1 + 4.0 * rho2, 0.0));
    const Complex a = (rho1 + disc) / 2.0;
    const Complex b = (rho1 - disc) / 2.0;
    return std::abs(a) < 1.0 && std::abs(b) < 1.0;
}

bool ar2_in_triangle(double rho1, double rho2) noexcept { return rho2 > -1.0 && rho2 < 1.0 - std::abs(rho1); }

RootExpansion roots_to_coeffs(std::span<const Complex> inverse_roots) {
    const std::size_t p = inverse_roots.size();
    std::vector<bool> used(p, false);
    for (std::size_t i = 0; i < p; ++i) {
        const Complex z = inverse_roots[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("inverse roots must be finite");
        if (z.imag() == 0.0 || used[i]) continue;
        const double tol = 1e-12 * (1.0 + std::abs(z));
        bool found = false;
        for (std::size_t j = i + 1; j < p && !found; ++j) {
            if (used[j] || inverse_roots[j].imag() == 0.0) continue;
            if (std::abs(inverse_roots[j] - std::conj(z)) <= tol) used[j] = found = true;
        }
        if (!found) throw ConfigError("complex inverse root without its conjugate");
        used[i] = true;
    }

    std::vector<Complex> psi(p + 1, Complex(0.0));
    psi[0] = 1.0;
    std::size_t ops = 0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j >= 1; --j) {
            psi[j] -= inverse_roots[i] * psi[j - 1];
            ++ops;
        }
    }
    RootExpansion out{Eigen::VectorXd(static_cast<Eigen::Index>(p)), ops};
    for (std::size_t j = 1; j <= p; ++j) {
        if (std::abs(psi[j].imag()) > 1e-12 * std::max(1.0, std::abs(psi[j])))
            throw NumericalError("root expansion left an imaginary part above 1e-12");
        out.coefficients(static_cast<Eigen::Index>(j - 1)) = -psi[j].real();
    }
    return out;
}

Eigen::MatrixXd companion_matrix(const Eigen::VectorXd& coefficients) {
    const Eigen::Index p = coefficients.size();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
    if (p == 0) return b;
    b.row(0) = coefficients.transpose();
    for (Eigen::Index i = 1; i < p; ++i) b(i, i - 1) = 1.0;
    return b;
}

std::vector<Complex> coeffs_to_roots(const Eigen::VectorXd& coefficients) {
    if (coefficients.size() == 0) return {};
    if (!coefficients.allFinite()) throw ConfigError("AR coefficients must be finite");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion_matrix(coefficients), false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

StationaryCovariance ar_stationary_covariance(const ArModel& model, std::size_t max_iterations, double tolerance) {
    model.validate();
    const Eigen::Index p = model.coefficients.size();
    if (p == 0) return {Eigen::MatrixXd::Zero(0, 0), 0, 0.0};
    const Eigen::MatrixXd b = companion_matrix(model.coefficients);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p, p);
    v(0, 0) = model.sd * model.sd;

    Eigen::MatrixXd a = v;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        Eigen::MatrixXd next = b * a * b.transpose() + v;
        const double residual = max_abs(next - a);
        if (!next.allFinite() || max_abs(next) > 1e200)
            throw NumericalError("stationary covariance iteration diverges: the model is not causal");
        a = std::move(next);
        if (residual <= tolerance * std::max(1.0, max_abs(a)))
            return {a, it, max_abs(a - b * a * b.transpose() - v)};
    }
    throw NumericalError("stationary covariance iteration did not converge: unit root or near-unit root");
}

std::vector<double> simulate_ar(const ArModel& model, std::size_t n, Stream& rng, std::size_t burnin) {
    model.validate();
    const auto p = static_cast<std::size_t>(model.order());
    std::vector<double> dev(burnin + n + p, 0.0);
    for (std::size_t t = p; t < dev.size(); ++t) {
        double s = model.sd * std_normal(rng);
        for (std::size_t i = 1; i <= p; ++i) s += model.coefficients(static_cast<Eigen::Index>(i - 1)) * dev[t - i];
        dev[t] = s;
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = model.mean + dev[p + burnin + t];
    return out;
}

double ar_conditional_loglik(std::span<const double> series, double mean, const Eigen::VectorXd& coefficients,
                             double variance, std::size_t conditioning) {
    const auto p = static_cast<std::size_t>(coefficients.size());
    if (conditioning < p) throw ConfigError("conditioning set shorter than the order");
    if (series.size() <= conditioning) throw DataError("series no longer than the conditioning set");
    if (!(variance > 0.0)) return -kInf;
    double ss = 0.0;
    for (std::size_t t = conditioning; t < series.size(); ++t) {
        double e = series[t] - mean;
        for (std::size_t i = 1; i <= p; ++i)
            e -= coefficients(static_cast<Eigen::Index>(i - 1)) * (series[t - i] - mean);
        ss += e * e;
    }
    const auto m = static_cast<double>(series.size() - conditioning);
    return -0.5 * m * (kLogTwoPi + std::log(variance)) - 0.5 * ss / variance;
}

// ---------------------------------------------------------------- reversible jump

namespace {

struct RootState {
    std::vector<double> reals;
    std::vector<Complex> pairs;  // one member of each conjugate pair
    double mean = 0.0;
    double variance = 1.0;

    [[nodiscard]] int order() const noexcept { return static_cast<int>(reals.size() + 2 * pairs.size()); }

    [[nodiscard]] std::vector<Complex> roots() const {
        std::vector<Complex> r;
        r.reserve(static_cast<std::size_t>(order()));
        for (double v : reals) r.emplace_back(v, 0.0);
        for (Complex z : pairs) {
            r.push_back(z);
            r.push_back(std::conj(z));
        }
        return r;
    }

    [[nodiscard]] Eigen::VectorXd coefficients() const {
        const auto r = roots();
        return roots_to_coeffs(r).coefficients;
    }
};

enum class Jump { birth_real, birth_complex, death };

// Move-kind probabilities at (reals, pairs) with infeasible kinds dropped.
double jump_probability(Jump kind, int reals, int pairs, int max_order) {
    const int p = reals + 2 * pairs;
    const double br = p + 1 <= max_order ? 0.25 : 0.0;
    const double bc = p + 2 <= max_order ? 0.25 : 0.0;
    const double d = reals + pairs > 0 ? 0.5 : 0.0;
    const double total = br + bc + d;
    if (total == 0.0) return 0.0;
    switch (kind) {
        case Jump::birth_real: return br / total;
        case Jump::birth_complex: return bc / total;
        case Jump::death: return d / total;
    }
    return 0.0;
}

double log_discrete_prior(int reals, int pairs, const RjArOptions& o) {
    const int p = reals + 2 * pairs;
    const double order = o.order_prior.empty() ? -std::log(o.max_order + 1.0)
                                               : std::log(o.order_prior[static_cast<std::size_t>(p)]);
    return order - std::log(p / 2 + 1.0);
}

Complex disk_point(Stream& rng) {
    const double r = std::sqrt(rng.uniform());
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    return {r * std::cos(a), r * std::sin(a)};
}

class RjChain {
public:
    RjChain(std::span<const double> x, const RjArOptions& o) : x_(x), o_(o) {}

    double loglik(const RootState& s) const {
        return ar_conditional_loglik(x_, s.mean, s.coefficients(), s.variance,
                                     static_cast<std::size_t>(o_.max_order));
    }

    // Returns true when accepted.
    bool jump(RootState& s, double& ll, Stream& rng, bool& was_birth) {
        const int r = static_cast<int>(s.reals.size());
        const int c = static_cast<int>(s.pairs.size());
        const double pbr = jump_probability(Jump::birth_real, r, c, o_.max_order);
        const double pbc = jump_probability(Jump::birth_complex, r, c, o_.max_order);
        const double pd = jump_probability(Jump::death, r, c, o_.max_order);
        if (pbr + pbc + pd == 0.0) return false;
        const double u = rng.uniform() * (pbr + pbc + pd);
        RootState prop = s;
        double log_ratio = 0.0;
        if (u < pbr + pbc) {
            was_birth = true;
            if (u < pbr) {
                prop.reals.push_back(2.0 * rng.uniform() - 1.0);
                log_ratio = log_discrete_prior(r + 1, c, o_) - log_discrete_prior(r, c, o_) +
                            std::log(r + 1.0) - std::log(r + c + 1.0) +
                            std::log(jump_probability(Jump::death, r + 1, c, o_.max_order)) - std::log(pbr);
            } else {
                prop.pairs.push_back(disk_point(rng));
                log_ratio = log_discrete_prior(r, c + 1, o_) - log_discrete_prior(r, c, o_) +
                            std::log(c + 1.0) - std::log(r + c + 1.0) +
                            std::log(jump_probability(Jump::death, r, c + 1, o_.max_order)) - std::log(pbc);
            }
        } else {
            was_birth = false;
            const auto g = static_cast<int>(rng.below(static_cast<std::uint64_t>(r + c)));
            if (g < r) {
                prop.reals.erase(prop.reals.begin() + g);
                log_ratio = log_discrete_prior(r - 1, c, o_) - log_discrete_prior(r, c, o_) +
                            std::log(r + c) - std::log(static_cast<double>(r)) +
                            std::log(jump_probability(Jump::birth_real, r - 1, c, o_.max_order)) - std::log(pd);
            } else {
                prop.pairs.erase(prop.pairs.begin() + (g - r));
                log_ratio = log_discrete_prior(r, c - 1, o_) - log_discrete_prior(r, c, o_) +
                            std::log(r + c) - std::log(static_cast<double>(c)) +
                            std::log(jump_probability(Jump::birth_complex, r, c - 1, o_.max_order)) - std::log(pd);
            }
        }
        const double ll_prop = loglik(prop);
        if (std::log(rng.uniform()) < ll_prop - ll + log_ratio) {
            s = std::move(prop);
            ll = ll_prop;
            return true;
        }
        return false;
    }

    // Roots, then mean (exact conditional), then sigma^2 (lognormal proposal).
    bool within(RootState& s, double& ll, Stream& rng) {
        for (std::size_t i = 0; i < s.reals.size(); ++i) {
            const double v = s.reals[i] + o_.root_step * std_normal(rng);
            if (!(std::abs(v) < 1.0)) {
                rng.uniform();
                continue;
            }
            RootState prop = s;
            prop.reals[i] = v;
            try_accept(s, prop, ll, rng);
        }
        for (std::size_t i = 0; i < s.pairs.size(); ++i) {
            const double re = o_.root_step * std_normal(rng);
            const double im = o_.root_step * std_normal(rng);
            const Complex z = s.pairs[i] + Complex(re, im);
            if (!(std::abs(z) < 1.0) || z.imag() == 0.0) {
                rng.uniform();
                continue;
            }
            RootState prop = s;
            prop.pairs[i] = z;
            try_accept(s, prop, ll, rng);
        }

        // y_t = x_t - sum rho_i x_{t-i} = mean (1 - sum rho) + noise
        const Eigen::VectorXd rho = s.coefficients();
        const auto p = static_cast<std::size_t>(rho.size());
        const auto start = static_cast<std::size_t>(o_.max_order);
        double sy = 0.0;
        for (std::size_t t = start; t < x_.size(); ++t) {
            double y = x_[t];
            for (std::size_t i = 1; i <= p; ++i) y -= rho(static_cast<Eigen::Index>(i - 1)) * x_[t - i];
            sy += y;
        }
        const double a = 1.0 - rho.sum();
        const auto n = static_cast<double>(x_.size() - start);
        s.mean = sy / (n * a) + std::sqrt(s.variance / (n * a * a)) * std_normal(rng);
        ll = loglik(s);

        RootState prop = s;
        prop.variance = s.variance * std::exp(o_.log_var_step * std_normal(rng));
        return try_accept(s, prop, ll, rng);
    }

private:
    bool try_accept(RootState& s, RootState& prop, double& ll, Stream& rng) const {
        const double ll_prop = loglik(prop);
        if (std::log(rng.uniform()) < ll_prop - ll) {
            s = std::move(prop);
            ll = ll_prop;
            return true;
        }
        return false;
    }

    std::span<const double> x_;
    const RjArOptions& o_;
};

}  // namespace

std::vector<double> RjArResult::order_posterior() const {
    std::vector<double> h(static_cast<std::size_t>(max_order) + 1, 0.0);
    const auto col = trace.component(0, true);
    for (double v : col) h[static_cast<std::size_t>(v)] += 1.0;
    if (!col.empty())
        for (double& v : h) v /= static_cast<double>(col.size());
    return h;
}

int RjArResult::order_mode() const {
    const auto h = order_posterior();
    return static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
}

Eigen::VectorXd RjArResult::mean_coefficients(int order) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(order);
    std::size_t count = 0;
    for (auto i = static_cast<Eigen::Index>(trace.burnin); i < trace.draws.rows(); ++i) {
        if (static_cast<int>(trace.draws(i, 0)) != order) continue;
        std::vector<Complex> roots;
        for (int j = 0; j < order; ++j) roots.emplace_back(trace.draws(i, 3 + 2 * j), trace.draws(i, 4 + 2 * j));
        acc += roots_to_coeffs(roots).coefficients;
        ++count;
    }
    if (count == 0) throw DataError("no post-burnin draws of the requested order");
    return acc / static_cast<double>(count);
}

RjArResult rj_ar_order(std::span<const double> series, const RjArOptions& options, Stream& rng) {
    if (options.max_order < 0) throw ConfigError("maximum order must be nonnegative");
    if (options.start_order < 0 || options.start_order > options.max_order)
        throw ConfigError("starting order outside 0..max_order");
    if (options.burnin >= options.iterations) throw ConfigError("iterations must exceed burn-in");
    if (!(options.root_step > 0.0) || !(options.log_var_step > 0.0)) throw ConfigError("proposal scales must be positive");
    if (!options.order_prior.empty()) {
        if (options.order_prior.size() != static_cast<std::size_t>(options.max_order) + 1)
            throw ConfigError("order prior needs max_order + 1 weights");
        const double total = std::accumulate(options.order_prior.begin(), options.order_prior.end(), 0.0);
        for (double w : options.order_prior)
            if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("order prior weights must be positive");
        if (std::abs(total - 1.0) > 1e-9) throw ConfigError("order prior weights must sum to 1");
    }
    if (series.size() < static_cast<std::size_t>(options.max_order) + 2)
        throw DataError("series must be longer than max_order + 1");
    check_series(series, "reversible jump AR");

    RootState s;
    s.reals.assign(static_cast<std::size_t>(options.start_order), 0.0);
    const auto n = static_cast<double>(series.size());
    s.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : series) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss > 0.0 ? ss / n : 1.0;

    RjChain chain(series, options);
    double ll = chain.loglik(s);
    const Eigen::Index cols = 3 + 2 * options.max_order;
    RjArResult out{ChainTrace{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(options.iterations), cols),
                              std::vector<std::uint8_t>(options.iterations, 0), rng.seed(), options.burnin},
                   options.max_order};
    for (std::size_t it = 0; it < options.iterations; ++it) {
        bool flag = false;
        if (options.jumps) {
            bool birth = false;
            flag = chain.jump(s, ll, rng, birth);
            (birth ? out.birth_proposed : out.death_proposed) += 1;
            if (flag) (birth ? out.birth_accepted : out.death_accepted) += 1;
            chain.within(s, ll, rng);
        } else {
            flag = chain.within(s, ll, rng);
        }
        const auto row = static_cast<Eigen::Index>(it);
        out.trace.accepted[it] = flag;
        out.trace.draws(row, 0) = s.order();
        out.trace.draws(row, 1) = s.mean;
        out.trace.draws(row, 2) = std::sqrt(s.variance);
        const auto roots = s.roots();
        for (std::size_t j = 0; j < roots.size(); ++j) {
            out.trace.draws(row, static_cast<Eigen::Index>(3 + 2 * j)) = roots[j].real();
            out.trace.draws(row, static_cast<Eigen::Index>(4 + 2 * j)) = roots[j].imag();
        }
    }
    return out;
}

// ---------------------------------------------------------------- MA(q)

void MaModel::validate() const {
    if (!(sd > 0.0) || !std::isfinite(sd)) throw ConfigError("MA innovation sd must be positive");
    if (!std::isfinite(mean) || !coefficients.allFinite()) throw ConfigError("MA parameters must be finite");
}

double ma_autocovariance(const MaModel& model, int lag) {
    model.validate();
    const int q = model.order();
    const int s = std::abs(lag);
    if (s > q) return 0.0;
    auto theta = [&](int i) { return i == 0 ? 1.0 : model.coefficients(i - 1); };
    double acc = 0.0;
    for (int i = 0; i + s <= q; ++i) acc += theta(i) * theta(i + s);
    return model.sd * model.sd * acc;
}

std::vector<double> simulate_ma(const MaModel& model, std::size_t n, Stream& rng) {
    model.validate();
    const auto q = static_cast<std::size_t>(model.order());
    std::vector<double> eps(n + q);
    for (double& e : eps) e = model.sd * std_normal(rng);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = model.mean + eps[t + q];
        for (std::size_t j = 1; j <= q; ++j) v += model.coefficients(static_cast<Eigen::Index>(j - 1)) * eps[t + q - j];
        x[t] = v;
    }
    return x;
}

std::vector<double> ma_residuals(const MaModel& model, std::span<const double> series, std::span<const double> initial) {
    model.validate();
    const int q = model.order();
    if (static_cast<int>(initial.size()) != q) throw ConfigError("need exactly q initial noises");
    const auto T = static_cast<int>(series.size());
    std::vector<double> e(series.size());
    auto past = [&](int s) { return s >= 1 ? e[static_cast<std::size_t>(s - 1)] : initial[static_cast<std::size_t>(-s)]; };
    for (int t = 1; t <= T; ++t) {
        double v = series[static_cast<std::size_t>(t - 1)] - model.mean;
        for (int j = 1; j <= q; ++j) v -= model.coefficients(j - 1) * past(t - j);
        e[static_cast<std::size_t>(t - 1)] = v;
    }
    return e;
}

NormalParams ma_initial_noise_conditional(const MaModel& model, std::span<const double> series, int index,
                                          std::span<const double> initial, NoiseConditional form) {
    model.validate();
    check_series(series, "MA conditional");
    const int q = model.order();
    if (index < 1 || index > q) throw ConfigError("initial noise index must lie in 1..q");
    if (static_cast<int>(initial.size()) != q) throw ConfigError("need exactly q initial noises");
    const double s2 = model.sd * model.sd;
    const auto slot = static_cast<std::size_t>(index - 1);
    double precision = 1.0, shift = 0.0;

    if (form == NoiseConditional::exact) {
        // eps_hat_t = delta_t + beta_t eps
        std::vector<double> base(initial.begin(), initial.end());
        base[slot] = 0.0;
        const auto delta = ma_residuals(model, series, base);
        const auto T = static_cast<int>(series.size());
        std::vector<double> beta(series.size());
        auto past = [&](int s) {
            if (s >= 1) return beta[static_cast<std::size_t>(s - 1)];
            return -s == index - 1 ? 1.0 : 0.0;
        };
        for (int t = 1; t <= T; ++t) {
            double v = 0.0;
            for (int j = 1; j <= q; ++j) v -= model.coefficients(j - 1) * past(t - j);
            beta[static_cast<std::size_t>(t - 1)] = v;
        }
        for (std::size_t t = 0; t < beta.size(); ++t) {
            precision += beta[t] * beta[t];
            shift -= delta[t] * beta[t];
        }
    } else {
        const auto held = ma_residuals(model, series, initial);
        auto past = [&](int s) { return s >= 1 ? held[static_cast<std::size_t>(s - 1)] : initial[static_cast<std::size_t>(-s)]; };
        const int last = std::min(q - index + 1, static_cast<int>(series.size()));
        for (int t = 1; t <= last; ++t) {
            const int hit = t + index - 1;  // lag at which eps_{1-index} enters x_t
            double c = series[static_cast<std::size_t>(t - 1)] - model.mean;
            for (int j = 1; j <= q; ++j)
                if (j != hit) c -= model.coefficients(j - 1) * past(t - j);
            const double b = model.coefficients(hit - 1);
            precision += b * b;
            shift += b * c;
        }
    }
    return {shift / precision, s2 / precision};
}

MaForecast ma_predictive(const MaModel& model, std::span<const double> series, int horizon) {
    model.validate();
    check_series(series, "MA forecast");
    if (horizon < 1) throw ConfigError("forecast horizon must be at least 1");
    const int q = model.order();
    if (horizon > q) return {model.mean, true};

    // state (eps_t, eps_{t-1}, ..., eps_{t-q})
    const Eigen::Index d = q + 1;
    const double s2 = model.sd * model.sd;
    Eigen::VectorXd h(d);
    h(0) = 1.0;
    h.tail(q) = model.coefficients;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd P = s2 * Eigen::MatrixXd::Identity(d, d);
    for (double x : series) {
        Eigen::VectorXd mp = Eigen::VectorXd::Zero(d);
        mp.tail(q) = m.head(q);
        Eigen::MatrixXd Pp = Eigen::MatrixXd::Zero(d, d);
        Pp.bottomRightCorner(q, q) = P.topLeftCorner(q, q);
        Pp(0, 0) = s2;
        const Eigen::VectorXd ph = Pp * h;
        const double f = h.dot(ph);
        const Eigen::VectorXd gain = ph / f;
        m = mp + gain * (x - model.mean - h.dot(mp));
        P = Pp - gain * ph.transpose();
        P = 0.5 * (P + P.transpose());
    }
    double mean = model.mean;
    for (int j = horizon; j <= q; ++j) mean += model.coefficients(j - 1) * m(j - horizon);
    return {mean, false};
}

// ---------------------------------------------------------------- hidden and switching chains

namespace {

void check_transition(const Eigen::MatrixXd& p) {
    if (p.rows() == 0 || p.rows() != p.cols()) throw ConfigError("transition matrix must be square and nonempty");
    if (!p.allFinite() || p.minCoeff() < 0.0) throw ConfigError("transition probabilities must be nonnegative");
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        if (std::abs(p.row(i).sum() - 1.0) > 1e-12) throw ConfigError("transition matrix rows must sum to 1");
}

bool irreducible(const Eigen::MatrixXd& p) {
    const Eigen::Index k = p.rows();
    for (Eigen::Index s = 0; s < k; ++s) {
        std::vector<bool> seen(static_cast<std::size_t>(k), false);
        std::vector<Eigen::Index> stack{s};
        seen[static_cast<std::size_t>(s)] = true;
        while (!stack.empty()) {
            const Eigen::Index i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < k; ++j)
                if (p(i, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    stack.push_back(j);
                }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
    }
    return true;
}

}  // namespace

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
    check_transition(transition);
    if (!irreducible(transition)) throw ConfigError("reducible chain: no unique stationary distribution");
    const Eigen::Index k = transition.rows();
    const Eigen::MatrixXd lazy = 0.5 * (transition + Eigen::MatrixXd::Identity(k, k));
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(k, 1.0 / static_cast<double>(k));
    for (int it = 0; it < 10'000'000; ++it) {
        Eigen::RowVectorXd next = pi * lazy;
        next /= next.sum();
        const double step = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (step < 1e-16 || (step < 1e-14 && (pi * transition - pi).cwiseAbs().maxCoeff() < 1e-12)) break;
    }
    if ((pi * transition - pi).cwiseAbs().maxCoeff() >= 1e-12)
        throw NumericalError("stationary distribution: power iteration did not reach residual 1e-12");
    return pi.transpose();
}

MixtureParams hmm_marginal_mixture(const Eigen::MatrixXd& transition, std::span<const double> means,
                                   std::span<const double> variances) {
    const Eigen::VectorXd pi = stationary_distribution(transition);
    if (means.size() != static_cast<std::size_t>(pi.size()) || variances.size() != means.size())
        throw ConfigError("one emission mean and variance per state");
    MixtureParams mix{{pi.data(), pi.data() + pi.size()}, {means.begin(), means.end()}, {variances.begin(), variances.end()}};
    mix.validate();
    return mix;
}

HmmSample simulate_hmm(const Eigen::MatrixXd& transition, std::span<const double> means,
                       std::span<const double> variances, std::size_t n, Stream& rng) {
    const MixtureParams mix = hmm_marginal_mixture(transition, means, variances);
    HmmSample out;
    out.states.reserve(n);
    out.observations.reserve(n);
    std::vector<double> row(static_cast<std::size_t>(transition.cols()));
    auto state = static_cast<int>(categorical(rng, mix.weights));
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = transition(state, static_cast<Eigen::Index>(j));
            state = static_cast<int>(categorical(rng, row));
        }
        const auto s = static_cast<std::size_t>(state);
        out.states.push_back(state);
        out.observations.push_back(mix.means[s] + std::sqrt(mix.variances[s]) * std_normal(rng));
    }
    return out;
}

double sv_joint_logdensity(double phi, double sigma, double beta, std::span<const double> x,
                           std::span<const double> y) {
    if (!(sigma > 0.0) || !(beta > 0.0)) throw ConfigError("sigma and beta must be positive");
    if (y.size() != x.size() + 1) throw DataError("latent series must be one longer than the observations");
    const double s2 = sigma * sigma;
    const double log_b2 = 2.0 * std::log(beta);
    double lp = normal_logpdf(y[0], 0.0, s2);
    for (std::size_t t = 1; t < y.size(); ++t) {
        lp += normal_logpdf(y[t], phi * y[t - 1], s2);
        const double xt = x[t - 1];
        // x^2 e^{-y} / beta^2 in log space
        const double quad = xt == 0.0 ? 0.0 : std::exp(2.0 * std::log(std::abs(xt)) - y[t] - log_b2);
        lp += -0.5 * (kLogTwoPi + log_b2) - 0.5 * y[t] - 0.5 * quad;
    }
    return lp;
}

void MarkovSwitch::validate() const {
    check_transition(transition);
    if (!log_conditional) throw ConfigError("Markov switching model needs a conditional density");
}

PredictionFilter ms_prediction_filter(const MarkovSwitch& model, std::span<const double> series) {
    model.validate();
    const int k = model.states();
    const auto T = static_cast<Eigen::Index>(series.size());
    PredictionFilter out{Eigen::MatrixXd::Zero(T, k), {}};
    out.cumulative_loglik.reserve(series.size());
    Eigen::VectorXd phi = stationary_distribution(model.transition);
    Eigen::VectorXd logf(k);
    double total = 0.0;
    for (Eigen::Index r = 0; r < T; ++r) {
        out.state_probabilities.row(r) = phi.transpose();
        const double prev = r == 0 ? model.initial : series[static_cast<std::size_t>(r - 1)];
        const double x = series[static_cast<std::size_t>(r)];
        for (int i = 0; i < k; ++i) logf(i) = model.log_conditional(i, x, prev);
        const double top = logf.maxCoeff();
        if (!std::isfinite(top)) throw NumericalError("prediction filter: every state gives zero density");
        Eigen::VectorXd w = phi.cwiseProduct((logf.array() - top).exp().matrix());
        const double mass = w.sum();
        if (!(mass > 0.0)) throw NumericalError("prediction filter: all filter weights vanished");
        total += top + std::log(mass);
        out.cumulative_loglik.push_back(total);
        phi = model.transition.transpose() * (w / mass);
        phi /= phi.sum();
    }
    return out;
}

}  // namespace bayescomp
