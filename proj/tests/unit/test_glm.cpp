#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bayescomp/glm.hpp"
#include "bayescomp/numeric.hpp"
#include "doctest.h"

using namespace bayescomp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Intercept plus standard normal covariates; y drawn from the link.
BinaryGlmData simulate(Stream& rng, int n, const VectorXd& beta, Link link) {
    const auto k = beta.size();
    MatrixXd X(n, k);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < k; ++j) X(i, j) = std_normal(rng);
        const double eta = X.row(i).dot(beta);
        const double p = link == Link::probit ? normal_cdf(eta) : 1.0 / (1.0 + std::exp(-eta));
        y(i) = rng.uniform() < p ? 1.0 : 0.0;
    }
    return make_glm_data(X, y, link);
}

// Plain Nelder-Mead maximizer.
VectorXd nelder_mead_max(const std::function<double(const VectorXd&)>& f, VectorXd start, double step) {
    const auto k = start.size();
    std::vector<VectorXd> pts{start};
    for (Eigen::Index j = 0; j < k; ++j) {
        VectorXd p = start;
        p[j] += step;
        pts.push_back(p);
    }
    std::vector<double> val;
    for (auto& p : pts) val.push_back(-f(p));
    for (int it = 0; it < 20000; ++it) {
        std::vector<std::size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return val[a] < val[b]; });
        const auto best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];
        if (std::abs(val[worst] - val[best]) < 1e-15 && (pts[worst] - pts[best]).norm() < 1e-10) break;
        VectorXd centroid = VectorXd::Zero(k);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) centroid += pts[idx[i]] / static_cast<double>(k);
        const VectorXd refl = centroid + (centroid - pts[worst]);
        const double fr = -f(refl);
        if (fr < val[best]) {
            const VectorXd exp = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = -f(exp);
            pts[worst] = fe < fr ? exp : refl;
            val[worst] = std::min(fe, fr);
        } else if (fr < val[second]) {
            pts[worst] = refl;
            val[worst] = fr;
        } else {
            const VectorXd con = centroid + 0.5 * (pts[worst] - centroid);
            const double fc = -f(con);
            if (fc < val[worst]) {
                pts[worst] = con;
                val[worst] = fc;
            } else {
                for (auto i : idx) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    val[i] = -f(pts[i]);
                }
            }
        }
    }
    return pts[static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin())];
}

std::vector<double> thinned(const ChainTrace& tr, Eigen::Index j, std::size_t every) {
    const auto c = tr.component(j);
    std::vector<double> out;
    for (std::size_t i = 0; i < c.size(); i += every) out.push_back(c[i]);
    return out;
}

// Permutation p-value of the energy distance between two samples of points.
double energy_test(const MatrixXd& a, const MatrixXd& b, Stream& rng, int perms) {
    const Eigen::Index na = a.rows(), n = a.rows() + b.rows();
    MatrixXd pool(n, a.cols());
    pool << a, b;
    MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (pool.row(i) - pool.row(j)).norm();
    auto stat = [&](const std::vector<int>& lab) {
        double xy = 0, xx = 0, yy = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (lab[i] != lab[j]) xy += d(i, j);
                else if (lab[i] == 0) xx += d(i, j);
                else yy += d(i, j);
            }
        const double nb = static_cast<double>(n - na), nA = static_cast<double>(na);
        return xy / (nA * nb) - xx / (nA * nA) - yy / (nb * nb);
    };
    std::vector<int> lab(n, 1);
    std::fill(lab.begin(), lab.begin() + na, 0);
    const double observed = stat(lab);
    int above = 0;
    for (int p = 0; p < perms; ++p) {
        for (Eigen::Index i = n - 1; i > 0; --i) std::swap(lab[i], lab[rng.below(static_cast<std::uint64_t>(i + 1))]);
        above += stat(lab) >= observed ? 1 : 0;
    }
    return (above + 1.0) / (perms + 1.0);
}

template <class F>
double gauss(F f, double a, double b) {
    return boost::math::quadrature::gauss<double, 40>::integrate(f, a, b);
}

}  // namespace

TEST_CASE("binary data validation") {
    MatrixXd X(3, 1);
    X << 1, 2, 3;
    CHECK_THROWS_AS(make_glm_data(X, VectorXd::Ones(3), Link::probit), DataError);
    CHECK_THROWS_AS(make_glm_data(X, VectorXd::Zero(3), Link::probit), DataError);
    CHECK_THROWS_AS(make_glm_data(X, VectorXd{{1.0, 0.5, 0.0}}, Link::probit), DataError);
    MatrixXd twin(3, 2);
    twin << 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(make_glm_data(twin, VectorXd{{1.0, 0.0, 1.0}}, Link::logit), DataError);
    CHECK_NOTHROW(make_glm_data(X, VectorXd{{1.0, 0.0, 1.0}}, Link::logit));
}

TEST_CASE("log normal cdf against long double erfc") {
    for (double t : {-100.0, -60.0, -38.0, -30.0001, -30.0, -29.9999, -10.0, -1.0, 0.0, 0.7, 5.0, 5.0001, 9.0}) {
        const long double ref = std::log(0.5L * std::erfc(-static_cast<long double>(t) / std::sqrt(2.0L)));
        CHECK(log_normal_cdf(t) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-10));
    }
    CHECK(log_normal_cdf(40.0) == 0.0);
}

TEST_CASE("log-likelihood trivial cases and sufficiency") {
    Stream rng(3);
    for (Link link : {Link::probit, Link::logit}) {
        const auto data = simulate(rng, 40, VectorXd{{0.2, 1.0}}, link);
        CHECK(glm_loglik(data, VectorXd::Zero(2)) == doctest::Approx(40 * std::log(0.5)).epsilon(1e-14));
        CHECK_THROWS_AS(glm_loglik(data, VectorXd::Zero(3)), ConfigError);
    }
    // separated along the sign of x
    MatrixXd X(6, 1);
    X << -3, -2, -1, 1, 2, 3;
    const VectorXd y{{0, 0, 0, 1, 1, 1}};
    for (Link link : {Link::probit, Link::logit}) {
        const BinaryGlmData sep{X, y, link};
        const double ll = glm_loglik(sep, VectorXd::Constant(1, 1e3));
        CHECK(ll <= 0.0);
        CHECK(ll > -1e-12);
        CHECK(glm_loglik(sep, VectorXd::Constant(1, 1.0)) < glm_loglik(sep, VectorXd::Constant(1, 10.0)));
    }
    // rows 0 and 1 share a covariate; swapping their responses keeps sum y_i x_i
    MatrixXd Xd(4, 2);
    Xd << 1, 0.5, 1, 0.5, 1, -1, 1, 2;
    const BinaryGlmData a{Xd, VectorXd{{1, 0, 1, 0}}, Link::logit};
    const BinaryGlmData b{Xd, VectorXd{{0, 1, 1, 0}}, Link::logit};
    CHECK((logit_sufficient_statistic(a) - logit_sufficient_statistic(b)).norm() == 0.0);
    const VectorXd beta{{0.3, -1.7}};
    CHECK(glm_loglik(a, beta) == glm_loglik(b, beta));
    // the probit likelihood agrees with the direct Bernoulli form
    const BinaryGlmData p{Xd, VectorXd{{1, 0, 1, 0}}, Link::probit};
    double direct = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double q = normal_cdf(Xd.row(i).dot(beta));
        direct += p.y[i] == 1.0 ? std::log(q) : std::log(1.0 - q);
    }
    CHECK(glm_loglik(p, beta) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("log-likelihood is concave along random segments") {
    Stream rng(17);
    for (Link link : {Link::probit, Link::logit}) {
        const auto data = simulate(rng, 60, VectorXd{{-0.3, 0.8, 0.4}}, link);
        for (int rep = 0; rep < 200; ++rep) {
            VectorXd u(3), v(3);
            for (int j = 0; j < 3; ++j) {
                u[j] = 4.0 * std_normal(rng);
                v[j] = 4.0 * std_normal(rng);
            }
            const double mid = glm_loglik(data, 0.5 * (u + v));
            CHECK(mid >= 0.5 * (glm_loglik(data, u) + glm_loglik(data, v)) - 1e-10);
        }
    }
}

TEST_CASE("poisson link and multinomial conditioning") {
    MatrixXd X(3, 2);
    X << 1, 0.2, 1, -1, 1, 3;
    CHECK(poisson_regression_link_check(VectorXd::Ones(3), X, VectorXd::Zero(2)));
    const VectorXd beta{{0.4, -0.3}};
    VectorXd mu = (X * beta).array().exp();
    CHECK(poisson_regression_link_check(mu, X, beta));
    mu[1] *= 1.0 + 1e-6;
    CHECK_FALSE(poisson_regression_link_check(mu, X, beta));

    const VectorXd half = poisson_to_multinomial(VectorXd{{1.0, 1.0}});
    CHECK(half[0] == 0.5);
    const VectorXd q = poisson_to_multinomial(VectorXd{{2.0, 6.0}});
    CHECK(q[0] == doctest::Approx(0.25));
    CHECK(q[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(poisson_to_multinomial(VectorXd{{1.0, 0.0}}), ConfigError);

    auto pois = [](int y, double m) { return std::exp(y * std::log(m) - m - std::lgamma(y + 1.0)); };
    for (const auto& m : {VectorXd{{1.0, 3.0}}, VectorXd{{0.4, 2.5}}}) {
        const double a = poisson_to_multinomial(m)[0];
        for (int n = 0; n <= 6; ++n) {
            double norm = 0.0;
            for (int j = 0; j <= n; ++j) norm += pois(j, m[0]) * pois(n - j, m[1]);
            for (int j = 0; j <= n; ++j) {
                const double cond = pois(j, m[0]) * pois(n - j, m[1]) / norm;
                const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0)) *
                                     std::pow(a, j) * std::pow(1 - a, n - j);
                CHECK(std::abs(cond - binom) < 1e-12);
            }
        }
    }
}

TEST_CASE("maximum likelihood agrees with an independent optimizer") {
    Stream rng(5);
    for (Link link : {Link::probit, Link::logit}) {
        const auto data = simulate(rng, 150, VectorXd{{0.4, -0.9, 0.6}}, link);
        const GlmFit fit = glm_mle(data);
        CHECK(fit.converged);
        const VectorXd nm = nelder_mead_max([&](const VectorXd& b) { return glm_loglik(data, b); },
                                            VectorXd::Zero(3), 0.5);
        CHECK((fit.beta - nm).lpNorm<Eigen::Infinity>() < 1e-3);
        // covariance is the inverse of the numerically differentiated information
        MatrixXd H(3, 3);
        const double h = 1e-4;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                VectorXd e_i = VectorXd::Unit(3, i) * h, e_j = VectorXd::Unit(3, j) * h;
                H(i, j) = (glm_loglik(data, fit.beta + e_i + e_j) - glm_loglik(data, fit.beta + e_i - e_j) -
                           glm_loglik(data, fit.beta - e_i + e_j) + glm_loglik(data, fit.beta - e_i - e_j)) /
                          (4 * h * h);
            }
        CHECK((fit.covariance - (-H).inverse()).norm() < 1e-4 * fit.covariance.norm());
    }
}

TEST_CASE("random-walk sampler recovers the truth at large n") {
    Stream rng(11);
    const VectorXd truth{{0.5, -1.0}};
    const auto data = simulate(rng, 500, truth, Link::probit);
    for (GlmPrior prior : {GlmPrior::flat, GlmPrior::noninformative}) {
        Stream chain_rng(12);
        const GlmChain chain = mh_glm_sampler(data, prior, 1.0, chain_rng, 6000, 1000);
        CHECK(chain.acceptance > 0.2);
        CHECK(chain.acceptance < 0.8);
        CHECK_FALSE(chain.separation_warning);
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(chain.mean[j] - truth[j]) < 3.0 * std::sqrt(chain.covariance(j, j)));
    }
}

TEST_CASE("noninformative prior rejects the origin") {
    Stream rng(2);
    const auto data = simulate(rng, 30, VectorXd{{0.1, 0.5}}, Link::logit);
    CHECK(glm_log_posterior(data, GlmPrior::noninformative, VectorXd::Zero(2)) ==
          -std::numeric_limits<double>::infinity());
    // with k = 1 and X'X = 1 the prior term is log Gamma(1/4) - log(pi)/2 - log(b^2)/4
    MatrixXd X(2, 1);
    X << 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2;
    const BinaryGlmData one{X, VectorXd{{1, 0}}, Link::probit};
    const VectorXd b = VectorXd::Constant(1, 0.7);
    CHECK(glm_log_posterior(one, GlmPrior::noninformative, b) - glm_loglik(one, b) ==
          doctest::Approx(std::lgamma(0.25) - 0.5 * std::log(std::numbers::pi) - 0.25 * std::log(0.49)).epsilon(1e-12));
}

TEST_CASE("separated data trigger the warning") {
    Stream rng(8);
    MatrixXd X(50, 1);
    VectorXd y(50);
    for (int i = 0; i < 50; ++i) {
        X(i, 0) = std_normal(rng);
        y[i] = X(i, 0) > 0.0 ? 1.0 : 0.0;
    }
    const auto data = make_glm_data(X, y, Link::probit);
    const GlmChain chain = mh_glm_sampler(data, GlmPrior::flat, 1.0, rng, 4000);
    CHECK(chain.separation_warning);
    const auto c = chain.trace.component(0, false);
    auto quarter_mean = [&](int q) {
        double s = 0.0;
        for (std::size_t i = q * c.size() / 4; i < (q + 1) * c.size() / 4; ++i) s += std::abs(c[i]);
        return s / (c.size() / 4.0);
    };
    CHECK(quarter_mean(0) < quarter_mean(1));
    CHECK(quarter_mean(1) < quarter_mean(3));
    CHECK(*std::min_element(c.begin(), c.end()) > 0.0);
}

TEST_CASE("latent draws respect the sign convention") {
    Stream rng(21);
    for (double m : {-6.0, -1.0, 0.0, 2.0, 8.0}) {
        for (int i = 0; i < 500; ++i) {
            CHECK(draw_latent(m, true, rng) > 0.0);
            CHECK(draw_latent(m, false, rng) < 0.0);
        }
    }
}

TEST_CASE("Albert-Chib and random-walk samplers share a posterior") {
    Stream rng(31);
    const auto data = simulate(rng, 100, VectorXd{{0.3, 0.8}}, Link::probit);
    Stream r1(32), r2(33);
    const AlbertChibChain ac = albert_chib_gibbs(data, r1, 20000, 1000);
    const GlmChain mh = mh_glm_sampler(data, GlmPrior::flat, 1.0, r2, 20000, 1000);
    CHECK(ac.sign_violations == 0);
    for (int j = 0; j < 2; ++j) {
        const auto a = batch_mean_se(ac.chain.trace.component(j));
        const auto b = batch_mean_se(mh.trace.component(j));
        CHECK(std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.se, b.se));
    }
    const std::size_t thin = 38;
    MatrixXd A(static_cast<Eigen::Index>(thinned(ac.chain.trace, 0, thin).size()), 2);
    MatrixXd B(static_cast<Eigen::Index>(thinned(mh.trace, 0, thin).size()), 2);
    for (int j = 0; j < 2; ++j) {
        const auto ta = thinned(ac.chain.trace, j, thin), tb = thinned(mh.trace, j, thin);
        A.col(j) = Eigen::Map<const VectorXd>(ta.data(), static_cast<Eigen::Index>(ta.size()));
        B.col(j) = Eigen::Map<const VectorXd>(tb.data(), static_cast<Eigen::Index>(tb.size()));
    }
    Stream perm(34);
    CHECK(energy_test(A, B, perm, 199) > 0.01);

    MatrixXd Xl(2, 1);
    Xl << 1, 1;
    CHECK_THROWS_AS(albert_chib_gibbs(BinaryGlmData{Xl, VectorXd{{1, 0}}, Link::logit}, r1, 10), ConfigError);
}

TEST_CASE("Albert-Chib on null data") {
    Stream rng(41);
    const int n = 80;
    MatrixXd raw(n, 2);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        raw(i, 0) = std_normal(rng);
        raw(i, 1) = std_normal(rng);
        y[i] = i % 2;
    }
    for (int i = n - 1; i > 0; --i) std::swap(y[i], y[static_cast<int>(rng.below(i + 1))]);
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(raw).householderQ() * MatrixXd::Identity(n, 2);
    const auto data = make_glm_data(Q, y, Link::probit);
    const AlbertChibChain ac = albert_chib_gibbs(data, rng, 5000, 500);
    CHECK(ac.sign_violations == 0);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(ac.chain.mean[j]) < 3.0 * std::sqrt(ac.chain.covariance(j, j)));
}

TEST_CASE("importance-sampled Bayes factor") {
    Stream rng(51);
    const auto data = simulate(rng, 200, VectorXd{{0.2, 0.7, 0.0, 0.0}}, Link::probit);
    const auto same = glm_bayes_factor(data, {0, 1, 2, 3}, rng, 1000);
    CHECK(same.log_b10 == 0.0);
    CHECK_THROWS_AS(glm_bayes_factor(data, {0, 7}, rng, 1000), ConfigError);

    Stream a(52), b(52);
    const auto small = glm_bayes_factor(data, {0, 1}, a, 4000, 4000);
    const auto large = glm_bayes_factor(data, {0, 1}, b, 8000, 4000);
    CHECK(small.jackknife_se > 0.0);
    CHECK(std::abs(small.log_b10 - large.log_b10) < 2.0 * small.jackknife_se);

    // rescaling a column leaves the Bayes factor unchanged: the prior carries |X'X|^1/2
    BinaryGlmData scaled = data;
    scaled.X.col(2) *= 10.0;
    Stream c(52);
    const auto resc = glm_bayes_factor(scaled, {0, 1}, c, 4000, 4000);
    CHECK(resc.log_b10 == doctest::Approx(small.log_b10).epsilon(1e-8));
}

TEST_CASE("Bayes factor favours the true null") {
    int favour_null = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Stream rng(1000 + seed);
        const auto data = simulate(rng, 500, VectorXd{{0.2, 0.7, 0.0, 0.0}}, Link::probit);
        const auto bf = glm_bayes_factor(data, {0, 1}, rng, 2000, 3000);
        favour_null += bf.log_b10 < 0.0 ? 1 : 0;
    }
    CHECK(favour_null >= 16);
}

TEST_CASE("induced priors through the link") {
    const MatrixXd one = MatrixXd::Identity(1, 1);
    const VectorXd K1 = VectorXd::Constant(1, 2.0), g1 = VectorXd::Constant(1, 0.5);
    for (double b : {-3.0, -0.4, 0.0, 1.3}) {
        const VectorXd beta = VectorXd::Constant(1, b);
        // Beta(1, 1) on p gives the link density
        CHECK(induced_log_prior(Link::probit, one, beta, K1, g1) ==
              doctest::Approx(-0.5 * b * b - 0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-14));
        CHECK(induced_log_prior(Link::logit, one, beta, K1, g1) ==
              doctest::Approx(b - 2.0 * std::log1p(std::exp(b))).epsilon(1e-14));
        const MatrixXd two = 2.0 * one;
        CHECK(prior_transform_jacobian(Link::probit, two, beta) -
                  prior_transform_jacobian(Link::probit, one, 2.0 * beta) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-15));
    }
    // change of variables: P(beta <= c) = I_{Phi(c)}(a, b)
    const VectorXd K = VectorXd::Constant(1, 5.0), g = VectorXd::Constant(1, 0.4);
    for (double c : {-1.5, 0.0, 0.8}) {
        const double mass = integrate(
            [&](double b) { return std::exp(induced_log_prior(Link::probit, one, VectorXd::Constant(1, b), K, g)); },
            -std::numeric_limits<double>::infinity(), c, 1e-12);
        CHECK(std::abs(mass - boost::math::ibeta(2.0, 3.0, normal_cdf(c))) < 1e-8);
    }
    // logit form exp(K g x'b) / (1 + e^x'b)^K up to a constant
    const double c0 = induced_log_prior(Link::logit, one, VectorXd::Zero(1), K, g) - (-5.0 * std::log(2.0));
    for (double b : {-2.0, 0.5, 3.0})
        CHECK(induced_log_prior(Link::logit, one, VectorXd::Constant(1, b), K, g) - c0 ==
              doctest::Approx(2.0 * b - 5.0 * std::log1p(std::exp(b))).epsilon(1e-12));
    // k = 2 Jacobian against finite differences of b -> F(X~ b)
    MatrixXd Xt(2, 2);
    Xt << 1.0, 0.3, -0.5, 2.0;
    const VectorXd beta{{0.2, -0.4}};
    for (Link link : {Link::probit, Link::logit}) {
        auto F = [&](const VectorXd& b) {
            VectorXd e = Xt * b;
            for (auto& v : e) v = link == Link::probit ? normal_cdf(v) : 1.0 / (1.0 + std::exp(-v));
            return e;
        };
        MatrixXd J(2, 2);
        for (int j = 0; j < 2; ++j) {
            const VectorXd h = VectorXd::Unit(2, j) * 1e-5;
            J.col(j) = (F(beta + h) - F(beta - h)) / 2e-5;
        }
        CHECK(prior_transform_jacobian(link, Xt, beta) == doctest::Approx(std::log(std::abs(J.determinant()))).epsilon(1e-8));
    }
    MatrixXd sing(2, 2);
    sing << 1, 2, 2, 4;
    CHECK_THROWS_AS(prior_transform_jacobian(Link::probit, sing, beta), ConfigError);
}

TEST_CASE("contingency marginals against simplex quadrature") {
    CHECK_THROWS_AS(contingency_bf(ContingencyTable2x2{0, 0, 0, 0}), DataError);
    constexpr double pi = std::numbers::pi;
    for (const auto& t : {ContingencyTable2x2{1, 0, 0, 1}, ContingencyTable2x2{3, 1, 0, 2}}) {
        const std::array<int, 4> c{static_cast<int>(t.n11), static_cast<int>(t.n12), static_cast<int>(t.n21),
                                   static_cast<int>(t.n22)};
        const int n = c[0] + c[1] + c[2] + c[3];
        double coef = std::lgamma(n + 1.0);
        for (int v : c) coef -= std::lgamma(v + 1.0);
        coef = std::exp(coef);
        // stick-breaking v1 ~ Be(1/2, 3/2), v2 ~ Be(1/2, 1), v3 ~ Be(1/2, 1/2) with v = sin^2(phi)
        auto beta_weight = [](double phi, double a, double b) {
            return 2.0 * std::pow(std::sin(phi), 2 * a - 1) * std::pow(std::cos(phi), 2 * b - 1) /
                   std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
        };
        const double full = gauss(
            [&](double p1) {
                const double v1 = std::pow(std::sin(p1), 2);
                return beta_weight(p1, 0.5, 1.5) * gauss(
                    [&](double p2) {
                        const double v2 = std::pow(std::sin(p2), 2);
                        return beta_weight(p2, 0.5, 1.0) * gauss(
                            [&](double p3) {
                                const double v3 = std::pow(std::sin(p3), 2);
                                const std::array<double, 4> th{v1, (1 - v1) * v2, (1 - v1) * (1 - v2) * v3,
                                                               (1 - v1) * (1 - v2) * (1 - v3)};
                                double l = 1.0;
                                for (int i = 0; i < 4; ++i) l *= std::pow(th[i], c[i]);
                                return beta_weight(p3, 0.5, 0.5) * l;
                            },
                            0.0, pi / 2);
                    },
                    0.0, pi / 2);
            },
            0.0, pi / 2);
        const double indep = gauss(
            [&](double a) {
                return gauss(
                    [&](double b) {
                        return std::pow(a * b, c[0]) * std::pow(a * (1 - b), c[1]) * std::pow((1 - a) * b, c[2]) *
                               std::pow((1 - a) * (1 - b), c[3]);
                    },
                    0.0, 1.0);
            },
            0.0, 1.0);
        const auto m = contingency_marginals(t);
        CHECK(std::abs(std::exp(m.log_full) - coef * full) < 1e-6);
        CHECK(std::abs(std::exp(m.log_indep) - coef * indep) < 1e-6);
        CHECK(contingency_bf(t) == doctest::Approx(m.log_indep - m.log_full));
    }
}

TEST_CASE("contingency Bayes factor symmetries and large counts") {
    const ContingencyTable2x2 t{7, 2, 4, 11};
    const double bf = contingency_bf(t);
    CHECK(contingency_bf({t.n21, t.n22, t.n11, t.n12}) == bf);
    CHECK(contingency_bf({t.n12, t.n11, t.n22, t.n21}) == bf);
    CHECK(contingency_bf({t.n22, t.n21, t.n12, t.n11}) == bf);
    CHECK(contingency_bf({t.n11, t.n21, t.n12, t.n22}) == bf);
    const double big = contingency_bf({1'000'000, 999'000, 1'001'000, 1'000'000});
    CHECK(std::isfinite(big));
    CHECK(big > 0.0);
    CHECK(contingency_bf({1'000'000, 10, 10, 1'000'000}) < -1e5);
}

TEST_CASE("log-linear submodel count") {
    const auto c = submodel_count(4);
    CHECK(c.total == 94);
    CHECK(c.total == (1 << 6) + (1 << 5) - 2);
    CHECK(c.single_factor == 16);
    CHECK(c.two_factor == 63);
    CHECK(c.three_factor == 15);
    CHECK_THROWS_AS(submodel_count(3), UnsupportedError);
}
