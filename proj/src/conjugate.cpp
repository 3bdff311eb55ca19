#include "bayescomp/conjugate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bayescomp/errors.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }
Eigen::MatrixXd scalar_matrix(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

double fd_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

void require_domain(const ExpFamilySpec& fam, const Eigen::VectorXd& theta) {
    if (theta.size() != fam.dim) throw ConfigError(fam.name + ": natural parameter has wrong dimension");
    if (fam.in_domain && !fam.in_domain(theta))
        throw std::domain_error(fam.name + ": natural parameter outside its domain");
}

}  // namespace

ExpFamilySpec builtin_expfam(std::string_view name, int trials) {
    ExpFamilySpec f;
    f.name = std::string(name);
    f.statistic = [](double y) { return scalar(y); };
    f.in_domain = [](const Eigen::VectorXd&) { return true; };
    if (name == "normal-known-var") {
        f.support = {-kInf, kInf};
        f.log_carrier = [](double y) { return -0.5 * y * y - kLogSqrt2Pi; };
        f.log_partition = [](const Eigen::VectorXd& t) { return 0.5 * t(0) * t(0); };
        f.gradient = [](const Eigen::VectorXd& t) { return scalar(t(0)); };
        f.hessian = [](const Eigen::VectorXd&) { return scalar_matrix(1.0); };
    } else if (name == "binomial") {
        if (trials < 1) throw ConfigError("binomial: trials must be positive");
        const double n = trials;
        f.discrete = true;
        f.support = {0.0, n};
        f.log_carrier = [n](double y) { return log_choose(n, y); };
        f.log_partition = [n](const Eigen::VectorXd& t) { return n * log_add_exp(0.0, t(0)); };
        f.gradient = [n](const Eigen::VectorXd& t) { return scalar(n / (1.0 + std::exp(-t(0)))); };
        f.hessian = [n](const Eigen::VectorXd& t) {
            const double p = 1.0 / (1.0 + std::exp(-t(0)));
            return scalar_matrix(n * p * (1.0 - p));
        };
    } else if (name == "geometric") {
        // failures before the first success, theta = log(1 - p) < 0
        f.discrete = true;
        f.support = {0.0, kInf};
        f.log_carrier = [](double) { return 0.0; };
        f.in_domain = [](const Eigen::VectorXd& t) { return t(0) < 0.0; };
        f.log_partition = [](const Eigen::VectorXd& t) { return -std::log(-std::expm1(t(0))); };
        f.gradient = [](const Eigen::VectorXd& t) { return scalar(1.0 / std::expm1(-t(0))); };
        f.hessian = [](const Eigen::VectorXd& t) {
            const double e = std::exp(t(0));
            return scalar_matrix(e / ((1.0 - e) * (1.0 - e)));
        };
    } else if (name == "poisson") {
        f.discrete = true;
        f.support = {0.0, kInf};
        f.log_carrier = [](double y) { return -lfact(y); };
        f.log_partition = [](const Eigen::VectorXd& t) { return std::exp(t(0)); };
        f.gradient = [](const Eigen::VectorXd& t) { return scalar(std::exp(t(0))); };
        f.hessian = [](const Eigen::VectorXd& t) { return scalar_matrix(std::exp(t(0))); };
    } else if (name == "exponential") {
        f.support = {0.0, kInf};
        f.statistic = [](double y) { return scalar(-y); };
        f.log_carrier = [](double) { return 0.0; };
        f.in_domain = [](const Eigen::VectorXd& t) { return t(0) > 0.0; };
        f.log_partition = [](const Eigen::VectorXd& t) { return -std::log(t(0)); };
        f.gradient = [](const Eigen::VectorXd& t) { return scalar(-1.0 / t(0)); };
        f.hessian = [](const Eigen::VectorXd& t) { return scalar_matrix(1.0 / (t(0) * t(0))); };
    } else {
        throw ConfigError("unknown exponential family '" + std::string(name) + "'");
    }
    return f;
}

ExpFamilySpec weibull_expfam(std::optional<double> power) {
    if (!power) throw UnsupportedError("weibull with unknown power is not an exponential family");
    const double g = *power;
    if (!(g > 0.0)) throw ConfigError("weibull: power must be positive");
    ExpFamilySpec f;
    f.name = "weibull";
    f.support = {0.0, kInf};
    f.statistic = [g](double y) { return scalar(-std::pow(y, g)); };
    f.log_carrier = [g](double y) { return std::log(g) + (g - 1.0) * std::log(y); };
    f.in_domain = [](const Eigen::VectorXd& t) { return t(0) > 0.0; };
    f.log_partition = [](const Eigen::VectorXd& t) { return -std::log(t(0)); };
    return f;
}

double expfam_logpdf(const ExpFamilySpec& fam, const Eigen::VectorXd& theta, double y) {
    require_domain(fam, theta);
    if (y < fam.support.lower || y > fam.support.upper || (fam.discrete && y != std::floor(y)))
        throw std::domain_error(fam.name + ": observation outside support");
    return fam.log_carrier(y) + theta.dot(fam.statistic(y)) - fam.log_partition(theta);
}

Eigen::VectorXd log_partition_gradient(const ExpFamilySpec& fam, const Eigen::VectorXd& theta) {
    require_domain(fam, theta);
    if (fam.gradient) return fam.gradient(theta);
    Eigen::VectorXd g(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = fd_step(theta(i));
        Eigen::VectorXd up = theta, dn = theta;
        up(i) += h;
        dn(i) -= h;
        g(i) = (fam.log_partition(up) - fam.log_partition(dn)) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd log_partition_hessian(const ExpFamilySpec& fam, const Eigen::VectorXd& theta) {
    require_domain(fam, theta);
    if (fam.hessian) return fam.hessian(theta);
    const Eigen::Index d = theta.size();
    Eigen::MatrixXd h(d, d);
    const auto psi = [&](const Eigen::VectorXd& t) { return fam.log_partition(t); };
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            const double hi = fd_step(theta(i)), hj = fd_step(theta(j));
            auto at = [&](double si, double sj) {
                Eigen::VectorXd t = theta;
                t(i) += si * hi;
                t(j) += sj * hj;
                return psi(t);
            };
            h(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
            h(j, i) = h(i, j);
        }
    }
    return h;
}

Eigen::VectorXd expfam_mean(const ExpFamilySpec& fam, const Eigen::VectorXd& theta) {
    return log_partition_gradient(fam, theta);
}

ConjugateHyper conjugate_update(const ConjugateHyper& hyper, const ExpFamilySpec& fam,
                                std::span<const double> data) {
    if (!(hyper.lambda > 0.0)) throw ConfigError("conjugate prior: lambda must be positive");
    ConjugateHyper out = hyper;
    for (double y : data) {
        if (y < fam.support.lower || y > fam.support.upper || (fam.discrete && y != std::floor(y)))
            throw DataError(fam.name + ": observation outside support");
        out.xi += fam.statistic(y);
    }
    out.lambda += static_cast<double>(data.size());
    return out;
}

LogPrior jeffreys_prior(JeffreysKind kind, const ExpFamilySpec* fam) {
    switch (kind) {
        case JeffreysKind::location:
            return [](const Eigen::VectorXd&) { return 0.0; };
        case JeffreysKind::scale:
            return [](const Eigen::VectorXd& t) {
                if (!(t(0) > 0.0)) throw std::domain_error("scale prior: parameter must be positive");
                return -std::log(t(0));
            };
        case JeffreysKind::expfam:
            if (fam == nullptr) throw ConfigError("expfam Jeffreys prior needs a family");
            return [f = *fam](const Eigen::VectorXd& t) {
                const double det = log_partition_hessian(f, t).determinant();
                if (!(det > 0.0)) throw NumericalError(f.name + ": Fisher information not positive definite");
                return 0.5 * std::log(det);
            };
    }
    throw ConfigError("unknown Jeffreys prior kind");
}

ScalarFamily NormalNigPosterior::variance_marginal() const {
    return ScalarFamily::inverse_gamma(lambda_sigma_d - 1.5, alpha_d / 2.0);
}

ScalarFamily NormalNigPosterior::mean_marginal() const {
    const double df = 2.0 * (lambda_sigma_d - 1.5);
    return ScalarFamily::student_t(df, xi_d, alpha_d / (lambda_mu_d * df));
}

double NormalNigPosterior::log_kernel(double mu, double s2) const {
    if (!(s2 > 0.0)) throw std::domain_error("variance must be positive");
    return -lambda_sigma_d * std::log(s2) - (lambda_mu_d * (mu - xi_d) * (mu - xi_d) + alpha_d) / (2.0 * s2);
}

NormalNigPosterior normal_nig_posterior(const NormalNigPrior& prior, std::span<const double> data) {
    if (!(prior.lambda_mu > 0 && prior.lambda_sigma > 0 && prior.alpha > 0))
        throw ConfigError("normal-inverse-gamma prior: lambda_mu, lambda_sigma and alpha must be positive");
    const double n = static_cast<double>(data.size());
    double xbar = 0.0;
    for (double x : data) xbar += x;
    if (n > 0) xbar /= n;
    double s2 = 0.0;
    for (double x : data) s2 += (x - xbar) * (x - xbar);

    NormalNigPosterior post{};
    post.n = data.size();
    post.lambda_sigma_d = prior.lambda_sigma + 1.5 + n / 2.0;
    post.lambda_mu_d = prior.lambda_mu + n;
    post.xi_d = (prior.lambda_mu * prior.xi + n * xbar) / post.lambda_mu_d;
    post.alpha_d = 2.0 * prior.alpha + s2 + n * prior.lambda_mu / post.lambda_mu_d * (xbar - prior.xi) * (xbar - prior.xi);
    return post;
}

ScalarFamily nig_prior_mean_marginal(const NormalNigPrior& prior) {
    return ScalarFamily::student_t(2.0 * prior.lambda_sigma, prior.xi,
                                   prior.alpha / (prior.lambda_mu * prior.lambda_sigma));
}

double posterior_prob_mu_negative(double x, double sigma, double xi, double tau) {
    if (!(sigma > 0.0 && tau > 0.0)) throw ConfigError("sigma and tau must be positive");
    const double s2 = sigma * sigma, t2 = tau * tau;
    // posterior N((s2 xi + t2 x)/(s2 + t2), s2 t2/(s2 + t2))
    const double z = (s2 * xi + t2 * x) / (std::sqrt(s2 + t2) * sigma * tau);
    return normal_cdf(-z);
}

TestDecision bayes_test_decision(double p0, double a0, double a1) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("posterior probability outside [0,1]");
    if (!(a0 > 0.0 && a1 > 0.0)) throw ConfigError("loss weights must be positive");
    return p0 > a1 / (a0 + a1) ? TestDecision::null : TestDecision::alternative;
}

double two_point_posterior(double rho0, double f0, double f1) {
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw ConfigError("prior weight must lie in (0,1)");
    const double odds = rho0 * f0 / ((1.0 - rho0) * f1);
    return odds / (1.0 + odds);
}

NormalizerProbe probe_normalizer(const std::function<double(double)>& log_density, double width, int doublings,
                                 double rel_tol) {
    if (!(width > 0.0) || doublings < 1) throw ConfigError("normalizer probe: bad width or doubling count");
    NormalizerProbe probe{{}, false};
    constexpr int kPoints = 20001;
    double half = width;
    for (int k = 0; k <= doublings; ++k, half *= 2.0) {
        std::vector<double> lw(kPoints);
        const double step = 2.0 * half / (kPoints - 1);
        for (int i = 0; i < kPoints; ++i) {
            lw[i] = log_density(-half + step * i);
            if (i == 0 || i == kPoints - 1) lw[i] -= std::log(2.0);
        }
        probe.log_integrals.push_back(log_sum_exp(lw) + std::log(step));
    }
    const auto& li = probe.log_integrals;
    const double last = li.back() - li[li.size() - 2];
    probe.stabilized = std::isfinite(last) && std::abs(std::expm1(last)) < rel_tol;
    return probe;
}

}  // namespace bayescomp
