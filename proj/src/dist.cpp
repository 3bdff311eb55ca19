#include "bayescomp/dist.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bayescomp/errors.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using RoundUpPolicy = boost::math::policies::policy<
    boost::math::policies::discrete_quantile<boost::math::policies::integer_round_up>>;

std::size_t arity(Family f) {
    switch (f) {
        case Family::poisson:
        case Family::exponential:
            return 1;
        case Family::student_t:
        case Family::weibull_power:
            return 3;
        default:
            return 2;
    }
}

void require(bool ok, Family f, const char* what) {
    if (!ok)
        throw ConfigError(std::string(family_name(f)) + ": " + what);
}

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

void check_support(const ScalarFamily& fam, double x) {
    if (!fam.in_support(x))
        throw std::domain_error(std::string(family_name(fam.family())) + ": x=" + std::to_string(x) +
                                " outside support");
}

double gamma_logpdf(double x, double shape, double rate) {
    if (x == 0.0) {
        if (shape == 1.0) return std::log(rate);
        return shape < 1.0 ? kInf : -kInf;
    }
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace

std::string_view family_name(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::gamma: return "gamma";
        case Family::inverse_gamma: return "inverse-gamma";
        case Family::beta: return "beta";
        case Family::student_t: return "student-t";
        case Family::cauchy: return "cauchy";
        case Family::poisson: return "poisson";
        case Family::binomial: return "binomial";
        case Family::exponential: return "exponential";
        case Family::weibull_power: return "weibull-power";
        case Family::lognormal: return "lognormal";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::normal, Family::gamma, Family::inverse_gamma, Family::beta, Family::student_t,
                     Family::cauchy, Family::poisson, Family::binomial, Family::exponential,
                     Family::weibull_power, Family::lognormal}) {
        if (family_name(f) == name) return f;
    }
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

ScalarFamily::ScalarFamily(Family tag, std::vector<double> params) : tag_(tag), params_(std::move(params)) {
    require(params_.size() == arity(tag_), tag_, "wrong number of parameters");
    for (double p : params_) require(std::isfinite(p), tag_, "parameters must be finite");
    const auto& p = params_;
    switch (tag_) {
        case Family::normal:
        case Family::lognormal:
            require(p[1] > 0, tag_, "variance must be positive");
            break;
        case Family::gamma:
        case Family::inverse_gamma:
        case Family::beta:
            require(p[0] > 0 && p[1] > 0, tag_, "parameters must be positive");
            break;
        case Family::student_t:
            require(p[0] > 0, tag_, "degrees of freedom must be positive");
            require(p[2] > 0, tag_, "scale must be positive");
            break;
        case Family::cauchy:
            require(p[1] > 0, tag_, "scale must be positive");
            break;
        case Family::poisson:
        case Family::exponential:
            require(p[0] > 0, tag_, "rate must be positive");
            break;
        case Family::binomial:
            require(is_integer(p[0]) && p[0] >= 0, tag_, "trials must be a non-negative integer");
            require(p[1] >= 0 && p[1] <= 1, tag_, "probability must lie in [0,1]");
            break;
        case Family::weibull_power:
            require(p[0] > 0 && p[1] > 0 && p[2] > 0, tag_, "parameters must be positive");
            break;
    }
}

ScalarFamily ScalarFamily::normal(double m, double v) { return {Family::normal, {m, v}}; }
ScalarFamily ScalarFamily::gamma(double a, double r) { return {Family::gamma, {a, r}}; }
ScalarFamily ScalarFamily::inverse_gamma(double a, double b) { return {Family::inverse_gamma, {a, b}}; }
ScalarFamily ScalarFamily::beta(double a, double b) { return {Family::beta, {a, b}}; }
ScalarFamily ScalarFamily::student_t(double df, double loc, double s2) { return {Family::student_t, {df, loc, s2}}; }
ScalarFamily ScalarFamily::cauchy(double loc, double s) { return {Family::cauchy, {loc, s}}; }
ScalarFamily ScalarFamily::poisson(double r) { return {Family::poisson, {r}}; }
ScalarFamily ScalarFamily::binomial(double n, double p) { return {Family::binomial, {n, p}}; }
ScalarFamily ScalarFamily::exponential(double r) { return {Family::exponential, {r}}; }
ScalarFamily ScalarFamily::weibull_power(double a, double r, double g) { return {Family::weibull_power, {a, r, g}}; }
ScalarFamily ScalarFamily::lognormal(double m, double v) { return {Family::lognormal, {m, v}}; }

bool ScalarFamily::discrete() const noexcept {
    return tag_ == Family::poisson || tag_ == Family::binomial;
}

Interval ScalarFamily::support() const {
    switch (tag_) {
        case Family::gamma:
        case Family::exponential:
        case Family::weibull_power:
        case Family::poisson:
            return {0.0, kInf};
        case Family::inverse_gamma:
        case Family::lognormal:
            return {0.0, kInf};
        case Family::beta:
            return {0.0, 1.0};
        case Family::binomial:
            return {0.0, params_[0]};
        default:
            return {-kInf, kInf};
    }
}

bool ScalarFamily::in_support(double x) const {
    if (std::isnan(x)) return false;
    const Interval s = support();
    if (tag_ == Family::inverse_gamma || tag_ == Family::lognormal) return x > 0 && x < kInf;
    if (x < s.lower || x > s.upper) return false;
    if (discrete()) return is_integer(x);
    return true;
}

double logpdf(const ScalarFamily& fam, double x) {
    check_support(fam, x);
    const auto p = fam.params();
    switch (fam.family()) {
        case Family::normal:
            return normal_logpdf(x, p[0], p[1]);
        case Family::gamma:
            return gamma_logpdf(x, p[0], p[1]);
        case Family::inverse_gamma:
            return p[0] * std::log(p[1]) - std::lgamma(p[0]) - (p[0] + 1.0) * std::log(x) - p[1] / x;
        case Family::beta: {
            const double lb = std::lgamma(p[0]) + std::lgamma(p[1]) - std::lgamma(p[0] + p[1]);
            const double t1 = (p[0] == 1.0) ? 0.0 : (p[0] - 1.0) * std::log(x);
            const double t2 = (p[1] == 1.0) ? 0.0 : (p[1] - 1.0) * std::log1p(-x);
            return t1 + t2 - lb;
        }
        case Family::student_t: {
            const double nu = p[0];
            const double z2 = (x - p[1]) * (x - p[1]) / p[2];
            return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                   0.5 * std::log(nu * std::numbers::pi * p[2]) - (nu + 1.0) / 2.0 * std::log1p(z2 / nu);
        }
        case Family::cauchy: {
            const double z = (x - p[0]) / p[1];
            return -std::log(std::numbers::pi * p[1]) - std::log1p(z * z);
        }
        case Family::poisson:
            return x * std::log(p[0]) - p[0] - lfact(x);
        case Family::binomial: {
            const double n = p[0], q = p[1];
            const double a = (x == 0.0) ? 0.0 : x * std::log(q);
            const double b = (x == n) ? 0.0 : (n - x) * std::log1p(-q);
            return log_choose(n, x) + a + b;
        }
        case Family::exponential:
            return std::log(p[0]) - p[0] * x;
        case Family::weibull_power: {
            if (x == 0.0) return (p[2] * p[0] < 1.0) ? kInf : (p[2] * p[0] == 1.0 ? std::log(p[2] * p[1]) : -kInf);
            const double y = std::pow(x, p[2]);
            return std::log(p[2]) + (p[2] - 1.0) * std::log(x) + gamma_logpdf(y, p[0], p[1]);
        }
        case Family::lognormal:
            return -std::log(x) + normal_logpdf(std::log(x), p[0], p[1]);
    }
    return kNaN;
}

double cdf(const ScalarFamily& fam, double x) {
    const auto p = fam.params();
    const Interval s = fam.support();
    if (x <= s.lower && fam.family() != Family::poisson && fam.family() != Family::binomial) return 0.0;
    if (x >= s.upper) return 1.0;
    switch (fam.family()) {
        case Family::normal:
            return normal_cdf((x - p[0]) / std::sqrt(p[1]));
        case Family::gamma:
            return boost::math::gamma_p(p[0], p[1] * x);
        case Family::inverse_gamma:
            return boost::math::gamma_q(p[0], p[1] / x);
        case Family::beta:
            return boost::math::ibeta(p[0], p[1], x);
        case Family::student_t:
            return boost::math::cdf(boost::math::students_t(p[0]), (x - p[1]) / std::sqrt(p[2]));
        case Family::cauchy:
            return 0.5 + std::atan((x - p[0]) / p[1]) / std::numbers::pi;
        case Family::poisson:
            if (x < 0) return 0.0;
            return boost::math::gamma_q(std::floor(x) + 1.0, p[0]);
        case Family::binomial:
            if (x < 0) return 0.0;
            return boost::math::cdf(boost::math::binomial(p[0], p[1]), std::floor(x));
        case Family::exponential:
            return -std::expm1(-p[0] * x);
        case Family::weibull_power:
            return boost::math::gamma_p(p[0], p[1] * std::pow(x, p[2]));
        case Family::lognormal:
            return normal_cdf((std::log(x) - p[0]) / std::sqrt(p[1]));
    }
    return kNaN;
}

double quantile(const ScalarFamily& fam, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile: probability outside [0,1]");
    const auto p = fam.params();
    const Interval s = fam.support();
    if (q == 0.0) return s.lower;
    if (q == 1.0) return s.upper;
    switch (fam.family()) {
        case Family::normal:
            return p[0] + std::sqrt(p[1]) * normal_quantile(q);
        case Family::gamma:
            return boost::math::gamma_p_inv(p[0], q) / p[1];
        case Family::inverse_gamma:
            return p[1] / boost::math::gamma_q_inv(p[0], q);
        case Family::beta:
            return boost::math::ibeta_inv(p[0], p[1], q);
        case Family::student_t:
            return p[1] + std::sqrt(p[2]) * boost::math::quantile(boost::math::students_t(p[0]), q);
        case Family::cauchy:
            return p[0] + p[1] * std::tan(std::numbers::pi * (q - 0.5));
        case Family::poisson:
            return boost::math::quantile(boost::math::poisson_distribution<double, RoundUpPolicy>(p[0]), q);
        case Family::binomial:
            return boost::math::quantile(boost::math::binomial_distribution<double, RoundUpPolicy>(p[0], p[1]), q);
        case Family::exponential:
            return -std::log1p(-q) / p[0];
        case Family::weibull_power:
            return std::pow(boost::math::gamma_p_inv(p[0], q) / p[1], 1.0 / p[2]);
        case Family::lognormal:
            return std::exp(p[0] + std::sqrt(p[1]) * normal_quantile(q));
    }
    return kNaN;
}

double mean(const ScalarFamily& fam) {
    const auto p = fam.params();
    switch (fam.family()) {
        case Family::normal: return p[0];
        case Family::gamma: return p[0] / p[1];
        case Family::inverse_gamma: return p[0] > 1 ? p[1] / (p[0] - 1.0) : kInf;
        case Family::beta: return p[0] / (p[0] + p[1]);
        case Family::student_t: return p[0] > 1 ? p[1] : kNaN;
        case Family::cauchy: return kNaN;
        case Family::poisson: return p[0];
        case Family::binomial: return p[0] * p[1];
        case Family::exponential: return 1.0 / p[0];
        case Family::weibull_power:
            return std::exp(std::lgamma(p[0] + 1.0 / p[2]) - std::lgamma(p[0]) - std::log(p[1]) / p[2]);
        case Family::lognormal: return std::exp(p[0] + p[1] / 2.0);
    }
    return kNaN;
}

double variance(const ScalarFamily& fam) {
    const auto p = fam.params();
    switch (fam.family()) {
        case Family::normal: return p[1];
        case Family::gamma: return p[0] / (p[1] * p[1]);
        case Family::inverse_gamma:
            return p[0] > 2 ? p[1] * p[1] / ((p[0] - 1.0) * (p[0] - 1.0) * (p[0] - 2.0)) : kInf;
        case Family::beta: {
            const double s = p[0] + p[1];
            return p[0] * p[1] / (s * s * (s + 1.0));
        }
        case Family::student_t: return p[0] > 2 ? p[2] * p[0] / (p[0] - 2.0) : kInf;
        case Family::cauchy: return kNaN;
        case Family::poisson: return p[0];
        case Family::binomial: return p[0] * p[1] * (1.0 - p[1]);
        case Family::exponential: return 1.0 / (p[0] * p[0]);
        case Family::weibull_power: {
            const double m = mean(fam);
            const double m2 = std::exp(std::lgamma(p[0] + 2.0 / p[2]) - std::lgamma(p[0]) - 2.0 * std::log(p[1]) / p[2]);
            return m2 - m * m;
        }
        case Family::lognormal: return std::expm1(p[1]) * std::exp(2.0 * p[0] + p[1]);
    }
    return kNaN;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -kInf;
        if (p == 1.0) return kInf;
        throw std::domain_error("normal_quantile: probability outside [0,1]");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_logpdf(double x, double m, double v) {
    return -kLogSqrt2Pi - 0.5 * std::log(v) - (x - m) * (x - m) / (2.0 * v);
}

double std_normal(Stream& rng) { return normal_quantile(rng.uniform()); }

double gamma_unit(Stream& rng, double shape) {
    if (shape < 1.0) {
        const double g = gamma_unit(rng, shape + 1.0);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = std_normal(rng);
        const double t = 1.0 + c * z;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = rng.uniform();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

double beta_variate(Stream& rng, double a, double b) {
    const double x = gamma_unit(rng, a);
    const double y = gamma_unit(rng, b);
    if (x + y > 0.0) return x / (x + y);
    // both underflowed: fall back to log-space comparison of the two gamma draws
    const double lx = std::log(gamma_unit(rng, a + 1.0)) + std::log(rng.uniform()) / a;
    const double ly = std::log(gamma_unit(rng, b + 1.0)) + std::log(rng.uniform()) / b;
    return 1.0 / (1.0 + std::exp(ly - lx));
}

std::uint64_t poisson_variate(Stream& rng, double rate) {
    if (rate <= 0.0) return 0;
    if (rate < 10.0) {
        // sequential inversion
        const double u = rng.uniform();
        double pk = std::exp(-rate);
        double cum = pk;
        std::uint64_t k = 0;
        while (u > cum && k < 1000) {
            ++k;
            pk *= rate / static_cast<double>(k);
            cum += pk;
        }
        return k;
    }
    // PTRS transformed rejection (Hormann 1993)
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -rate + k * loglam - lfact(k))
            return static_cast<std::uint64_t>(k);
    }
}

std::uint64_t binomial_variate(Stream& rng, std::uint64_t n, double p) {
    std::uint64_t offset = 0;
    // Knuth's order-statistic split until the remaining count is small
    while (n > 64 && p > 0.0 && p < 1.0) {
        const std::uint64_t a = 1 + n / 2;
        const std::uint64_t b = n + 1 - a;
        const double x = beta_variate(rng, static_cast<double>(a), static_cast<double>(b));
        if (x >= p) {
            n = a - 1;
            p = p / x;
        } else {
            offset += a;
            n = b - 1;
            p = (p - x) / (1.0 - x);
        }
    }
    if (p <= 0.0) return offset;
    if (p >= 1.0) return offset + n;
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        if (rng.uniform() < p) ++k;
    return offset + k;
}

std::size_t categorical(Stream& rng, std::span<const double> probs) {
    double total = 0.0;
    for (double w : probs) total += w;
    if (!(total > 0.0)) throw NumericalError("categorical: weights sum to zero");
    const double u = rng.uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    // rounding left u at the very top; return the last positive cell
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return probs.size() - 1;
}

std::size_t categorical_log(Stream& rng, std::span<const double> log_weights) {
    const double m = *std::max_element(log_weights.begin(), log_weights.end());
    if (!std::isfinite(m)) throw NumericalError("categorical: no finite log-weight");
    std::vector<double> w(log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - m);
    return categorical(rng, w);
}

double draw(const ScalarFamily& fam, Stream& rng) {
    const auto p = fam.params();
    switch (fam.family()) {
        case Family::normal: return p[0] + std::sqrt(p[1]) * std_normal(rng);
        case Family::gamma: return gamma_unit(rng, p[0]) / p[1];
        case Family::inverse_gamma: return p[1] / gamma_unit(rng, p[0]);
        case Family::beta: return beta_variate(rng, p[0], p[1]);
        case Family::student_t: {
            const double z = std_normal(rng);
            const double chi = 2.0 * gamma_unit(rng, p[0] / 2.0) / p[0];
            return p[1] + std::sqrt(p[2]) * z / std::sqrt(chi);
        }
        case Family::cauchy: return p[0] + p[1] * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
        case Family::poisson: return static_cast<double>(poisson_variate(rng, p[0]));
        case Family::binomial:
            return static_cast<double>(binomial_variate(rng, static_cast<std::uint64_t>(p[0]), p[1]));
        case Family::exponential: return -std::log(rng.uniform()) / p[0];
        case Family::weibull_power: return std::pow(gamma_unit(rng, p[0]) / p[1], 1.0 / p[2]);
        case Family::lognormal: return std::exp(p[0] + std::sqrt(p[1]) * std_normal(rng));
    }
    return kNaN;
}

std::vector<double> sample(const ScalarFamily& fam, Stream& rng, std::size_t n) {
    if (n == 0) throw ConfigError("sample: n must be at least 1");
    std::vector<double> out(n);
    for (auto& x : out) x = draw(fam, rng);
    return out;
}

double sample_truncated_normal(double mu, double sigma, Side side, Stream& rng) {
    if (!(sigma > 0.0)) throw ConfigError("truncated normal: sigma must be positive");
    if (side == Side::negative) return -sample_truncated_normal(-mu, sigma, Side::positive, rng);
    // retained mass P(Z > a), a the standardized boundary
    const double a = -mu / sigma;
    const double mass = normal_cdf(-a);
    if (!(mass >= 1e-300))
        throw NumericalError("truncated normal: retained mass " + std::to_string(mass) +
                             " below 1e-300 (mu=" + std::to_string(mu) + ", sigma=" + std::to_string(sigma) + ")");
    const double z = -normal_quantile(rng.uniform() * mass);
    const double x = mu + sigma * z;
    return x > 0.0 ? x : std::numeric_limits<double>::denorm_min();
}

std::vector<double> sample_dirichlet(std::span<const double> delta, Stream& rng) {
    if (delta.empty()) throw ConfigError("dirichlet: empty parameter vector");
    std::vector<double> lg(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] > 0.0)) throw ConfigError("dirichlet: parameters must be positive");
        if (delta[i] < 1.0)
            lg[i] = std::log(gamma_unit(rng, delta[i] + 1.0)) + std::log(rng.uniform()) / delta[i];
        else
            lg[i] = std::log(gamma_unit(rng, delta[i]));
    }
    normalize_log_weights(lg);
    return lg;
}

double inverse_cdf_uniformity(const ScalarFamily& fam, std::span<const double> draws) {
    if (fam.discrete()) throw UnsupportedError("inverse_cdf_uniformity: discrete family");
    if (draws.empty()) throw ConfigError("inverse_cdf_uniformity: empty draw vector");
    return ks_test(draws, [&](double x) { return cdf(fam, x); }).p_value;
}

MultivariateStudentT::MultivariateStudentT(double df, Eigen::VectorXd location, Eigen::MatrixXd scale)
    : df_(df), location_(std::move(location)), scale_(std::move(scale)) {
    if (!(df_ > 0)) throw ConfigError("multivariate t: df must be positive");
    if (scale_.rows() != location_.size() || scale_.cols() != location_.size())
        throw ConfigError("multivariate t: scale dimension mismatch");
    if ((scale_ - scale_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale_.cwiseAbs().maxCoeff()))
        throw ConfigError("multivariate t: scale matrix not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(scale_);
    if (llt.info() != Eigen::Success) throw ConfigError("multivariate t: scale matrix not positive definite");
    chol_ = llt.matrixL();
    log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

double MultivariateStudentT::logpdf(const Eigen::VectorXd& x) const {
    const double d = static_cast<double>(dim());
    const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(x - location_);
    return std::lgamma((df_ + d) / 2.0) - std::lgamma(df_ / 2.0) - 0.5 * d * std::log(df_ * std::numbers::pi) -
           0.5 * log_det_ - (df_ + d) / 2.0 * std::log1p(w.squaredNorm() / df_);
}

Eigen::VectorXd MultivariateStudentT::draw(Stream& rng) const {
    Eigen::VectorXd z(dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
    const double chi = 2.0 * gamma_unit(rng, df_ / 2.0) / df_;
    return location_ + chol_ * z / std::sqrt(chi);
}

Eigen::MatrixXd MultivariateStudentT::covariance() const {
    if (!(df_ > 2)) throw std::domain_error("multivariate t: covariance needs df > 2");
    return scale_ * (df_ / (df_ - 2.0));
}

Eigen::VectorXd draw_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower, Stream& rng) {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
    return mean + chol_lower * z;
}

}  // namespace bayescomp
