#include <cmath>
#include <numbers>
#include <numeric>

#include "bayescomp/dist.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/numeric.hpp"
#include "doctest.h"

using namespace bayescomp;

namespace {

double sample_mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_var(const std::vector<double>& x) {
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

std::vector<ScalarFamily> continuous_families() {
    return {ScalarFamily::normal(1.0, 2.0),       ScalarFamily::gamma(2.5, 1.5),
            ScalarFamily::inverse_gamma(3.0, 2.0), ScalarFamily::beta(2.0, 3.5),
            ScalarFamily::student_t(4.0, 1.0, 2.0), ScalarFamily::cauchy(0.5, 2.0),
            ScalarFamily::exponential(2.0),        ScalarFamily::weibull_power(2.0, 1.5, 1.7),
            ScalarFamily::lognormal(0.3, 0.5)};
}

}  // namespace

TEST_CASE("logpdf reference values") {
    CHECK(logpdf(ScalarFamily::normal(0, 1), 0.0) == doctest::Approx(-0.918938533204673).epsilon(1e-14));
    CHECK(logpdf(ScalarFamily::gamma(1, 1), 0.5) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(logpdf(ScalarFamily::student_t(1, 0, 1), 0.0) ==
          doctest::Approx(-std::log(std::numbers::pi)).epsilon(1e-14));
    CHECK_THROWS_AS(logpdf(ScalarFamily::gamma(2, 1), -1.0), std::domain_error);
    CHECK_THROWS_AS(logpdf(ScalarFamily::poisson(2), 1.5), std::domain_error);
    CHECK_THROWS_AS(logpdf(ScalarFamily::beta(2, 2), 1.5), std::domain_error);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(ScalarFamily::normal(0, -1), ConfigError);
    CHECK_THROWS_AS(ScalarFamily::student_t(0.0), ConfigError);
    CHECK_THROWS_AS(ScalarFamily::binomial(2.5, 0.3), ConfigError);
    CHECK_THROWS_AS(ScalarFamily(Family::gamma, {1.0}), ConfigError);
    CHECK_THROWS_AS(parse_family("zeta"), ConfigError);
    CHECK(parse_family("weibull-power") == Family::weibull_power);
}

TEST_CASE("continuous densities integrate to one") {
    for (const auto& fam : continuous_families()) {
        const Interval s = fam.support();
        // split at the mode region so the adaptive rule sees the peak
        const double mid = quantile(fam, 0.5);
        auto f = [&](double x) { return fam.in_support(x) ? std::exp(logpdf(fam, x)) : 0.0; };
        const double total = integrate(f, s.lower, mid) + integrate(f, mid, s.upper);
        INFO(family_name(fam.family()));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("discrete masses sum to one") {
    const auto po = ScalarFamily::poisson(7.5);
    double s = 0.0;
    for (int k = 0; k < 200; ++k) s += std::exp(logpdf(po, k));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const auto bi = ScalarFamily::binomial(30, 0.2);
    s = 0.0;
    for (int k = 0; k <= 30; ++k) s += std::exp(logpdf(bi, k));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cdf(bi, 30) == 1.0);
    double direct = 0.0;
    for (int k = 0; k <= 3; ++k) direct += std::exp(logpdf(po, k));
    CHECK(cdf(po, 3.0) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(cdf(po, 3.7) == cdf(po, 3.0));
}

TEST_CASE("quantile inverts cdf on a support grid") {
    for (const auto& fam : continuous_families()) {
        INFO(family_name(fam.family()));
        const double lo = quantile(fam, 0.001), hi = quantile(fam, 0.999);
        for (int i = 0; i < 100; ++i) {
            const double x = lo + (hi - lo) * (i + 0.5) / 100.0;
            const double back = quantile(fam, cdf(fam, x));
            CHECK(std::abs(back - x) <= 1e-8 * std::max(1.0, std::abs(x)));
        }
    }
}

TEST_CASE("seeded streams reproduce bitwise") {
    Stream a(42), b(42);
    for (const auto& fam : continuous_families()) {
        const auto xa = sample(fam, a, 50);
        const auto xb = sample(fam, b, 50);
        CHECK(xa == xb);
    }
    CHECK(a.counter() == b.counter());
    Stream c(42, a.counter());
    CHECK(c.next() == a.next());
    CHECK(a.split(1).next() != a.split(2).next());
    CHECK_THROWS_AS(sample(ScalarFamily::normal(0, 1), a, 0), ConfigError);
}

TEST_CASE("sample moments") {
    Stream rng(7);
    const auto x = sample(ScalarFamily::normal(2, 4), rng, 100000);
    CHECK(std::abs(sample_mean(x) - 2.0) < 2.0 * 2.0 / std::sqrt(1e5));
    double m3 = 0.0, m4 = 0.0;
    const double m = sample_mean(x);
    for (double v : x) {
        m3 += std::pow(v - m, 3);
        m4 += std::pow(v - m, 4);
    }
    m3 /= x.size();
    m4 /= x.size();
    CHECK(std::abs(m3 / 8.0) < 0.05);
    CHECK(m4 / 16.0 == doctest::Approx(3.0).epsilon(0.05));

    const auto p = sample(ScalarFamily::poisson(3), rng, 100000);
    const double ratio = sample_var(p) / sample_mean(p);
    CHECK(ratio >= 0.97);
    CHECK(ratio <= 1.03);

    for (double rate : {0.5, 9.9, 10.0, 45.0, 1000.0}) {
        const auto q = sample(ScalarFamily::poisson(rate), rng, 20000);
        INFO("poisson rate " << rate);
        CHECK(std::abs(sample_mean(q) - rate) < 5.0 * std::sqrt(rate / 2e4));
    }
    for (double n : {10.0, 100.0, 5000.0}) {
        const auto fam = ScalarFamily::binomial(n, 0.3);
        const auto q = sample(fam, rng, 20000);
        INFO("binomial n " << n);
        CHECK(std::abs(sample_mean(q) - mean(fam)) < 5.0 * std::sqrt(variance(fam) / 2e4));
        CHECK(sample_var(q) == doctest::Approx(variance(fam)).epsilon(0.05));
    }
}

TEST_CASE("continuous generators match their own cdf") {
    Stream rng(11);
    for (const auto& fam : continuous_families()) {
        INFO(family_name(fam.family()));
        const auto x = sample(fam, rng, 20000);
        CHECK(inverse_cdf_uniformity(fam, x) > 0.001);
    }
    const auto small = ScalarFamily::gamma(0.3, 2.0);
    CHECK(inverse_cdf_uniformity(small, sample(small, rng, 20000)) > 0.001);
}

TEST_CASE("power transform of the weibull-power draws is gamma") {
    Stream rng(3);
    const auto fam = ScalarFamily::weibull_power(2.0, 3.0, 2.5);
    auto x = sample(fam, rng, 20000);
    for (double& v : x) v = std::pow(v, 2.5);
    CHECK(inverse_cdf_uniformity(ScalarFamily::gamma(2.0, 3.0), x) > 0.01);
}

TEST_CASE("discrete generators pass chi-square") {
    Stream rng(5);
    const auto fam = ScalarFamily::binomial(200, 0.4);
    std::vector<double> obs(201, 0.0), expv(201);
    const std::size_t n = 50000;
    for (std::size_t i = 0; i < n; ++i) obs[static_cast<std::size_t>(draw(fam, rng))] += 1.0;
    for (int k = 0; k <= 200; ++k) expv[k] = n * std::exp(logpdf(fam, k));
    CHECK(chi_square_gof(obs, expv).p_value > 0.001);

    const auto po = ScalarFamily::poisson(25.0);
    std::vector<double> pobs(120, 0.0), pexp(120);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(draw(po, rng));
        pobs[std::min<std::size_t>(k, 119)] += 1.0;
    }
    for (int k = 0; k < 120; ++k) pexp[k] = n * std::exp(logpdf(po, k));
    CHECK(chi_square_gof(pobs, pexp).p_value > 0.001);
}

TEST_CASE("truncated normal") {
    Stream rng(9);
    std::vector<double> neg(50000), pos(50000);
    for (auto& v : neg) v = sample_truncated_normal(0.0, 1.0, Side::negative, rng);
    for (auto& v : pos) v = sample_truncated_normal(0.0, 1.0, Side::positive, rng);
    CHECK(*std::max_element(neg.begin(), neg.end()) < 0.0);
    CHECK(*std::min_element(pos.begin(), pos.end()) > 0.0);
    // half-normal mean by quadrature
    const double half = integrate([](double x) { return 2.0 * x * std::exp(normal_logpdf(x, 0, 1)); }, 0.0,
                                  std::numeric_limits<double>::infinity());
    CHECK(half == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-10));
    CHECK(std::abs(sample_mean(neg) + half) < 0.01);
    CHECK(std::abs(sample_mean(pos) - half) < 0.01);
    CHECK(std::abs(sample_mean(neg) + sample_mean(pos)) < 0.015);

    std::vector<double> far(20000);
    for (auto& v : far) v = sample_truncated_normal(5.0, 1.0, Side::positive, rng);
    CHECK(*std::min_element(far.begin(), far.end()) > 0.0);
    CHECK(std::abs(sample_mean(far) - 5.0) < 0.03);

    // deep tail stays on the right side
    for (int i = 0; i < 1000; ++i) CHECK(sample_truncated_normal(-30.0, 1.0, Side::positive, rng) > 0.0);
    CHECK_THROWS_AS(sample_truncated_normal(-40.0, 1.0, Side::positive, rng), NumericalError);
    CHECK_THROWS_AS(sample_truncated_normal(40.0, 1.0, Side::negative, rng), NumericalError);
}

TEST_CASE("dirichlet") {
    Stream rng(13);
    const std::vector<double> flat{1.0, 1.0};
    std::vector<double> first(20000);
    for (auto& v : first) v = sample_dirichlet(flat, rng)[0];
    CHECK(ks_uniform(first).p_value > 0.01);

    const std::vector<double> d{2.0, 3.0, 4.0};
    for (auto& v : first) {
        const auto p = sample_dirichlet(d, rng);
        CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));
        v = p[0];
    }
    CHECK(inverse_cdf_uniformity(ScalarFamily::beta(2.0, 7.0), first) > 0.01);

    const std::vector<double> big{1e6, 1e6};
    const auto c = sample_dirichlet(big, rng);
    CHECK(std::abs(c[0] - 0.5) < 0.01);
    CHECK(std::abs(c[1] - 0.5) < 0.01);

    const std::vector<double> tiny{1e-4, 1e-4, 1e-4};
    const auto t = sample_dirichlet(tiny, rng);
    CHECK(t[0] + t[1] + t[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(sample_dirichlet(std::vector<double>{1.0, 0.0}, rng), ConfigError);
}

TEST_CASE("dirichlet marginals for random parameter vectors") {
    Stream rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t k = 2 + rng.below(4);
        std::vector<double> d(k);
        for (auto& v : d) v = 0.2 + 5.0 * rng.uniform();
        const double rest = std::accumulate(d.begin() + 1, d.end(), 0.0);
        std::vector<double> first(100000);
        for (auto& v : first) v = sample_dirichlet(d, rng)[0];
        CHECK(inverse_cdf_uniformity(ScalarFamily::beta(d[0], rest), first) > 0.01);
    }
}

TEST_CASE("inverse cdf uniformity") {
    int passes = 0;
    const auto nrm = ScalarFamily::normal(0, 1);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Stream rng(seed);
        if (inverse_cdf_uniformity(nrm, sample(nrm, rng, 1000)) > 0.01) ++passes;
    }
    CHECK(passes >= 98);
    Stream rng(1);
    CHECK(inverse_cdf_uniformity(nrm, sample(ScalarFamily::exponential(2), rng, 10000)) < 0.01);
    CHECK_THROWS_AS(inverse_cdf_uniformity(nrm, std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(inverse_cdf_uniformity(ScalarFamily::poisson(1), std::vector<double>{1.0}), UnsupportedError);
}

TEST_CASE("multivariate t") {
    Eigen::MatrixXd s(2, 2);
    s << 2.0, 0.5, 0.5, 1.0;
    const MultivariateStudentT t(5.0, Eigen::Vector2d(1.0, -1.0), s);
    // one-dimensional reduction equals the scalar t
    const MultivariateStudentT t1(5.0, Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0));
    Eigen::VectorXd x1(1);
    x1 << 0.3;
    CHECK(t1.logpdf(x1) == doctest::Approx(logpdf(ScalarFamily::student_t(5, 1, 2), 0.3)).epsilon(1e-12));

    Stream rng(21);
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd d = t.draw(rng);
        m += d;
        c += (d - t.location()) * (d - t.location()).transpose();
    }
    m /= n;
    c /= n;
    CHECK((m - t.location()).cwiseAbs().maxCoeff() < 0.03);
    CHECK((c - t.covariance()).cwiseAbs().maxCoeff() < 0.15);

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.2, 0.3, 1.0;
    CHECK_THROWS_AS(MultivariateStudentT(3.0, Eigen::Vector2d::Zero(), bad), ConfigError);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(MultivariateStudentT(3.0, Eigen::Vector2d::Zero(), bad), ConfigError);
}
