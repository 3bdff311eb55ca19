#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <numeric>

#include "bayescomp/dist.hpp"
#include "bayescomp/dynamic.hpp"
#include "bayescomp/numeric.hpp"
#include "doctest.h"

using namespace bayescomp;
using boost::math::quadrature::gauss;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double npdf_of(double x, double m, double sd) { return std::exp(-0.5 * (x - m) * (x - m) / (sd * sd)) / (sd * std::sqrt(2 * M_PI)); }

// Inverse roots: reals U(-1, 1) and pairs uniform on the disk.
std::vector<Complex> random_roots(int p, Stream& rng) {
    std::vector<Complex> r;
    while (static_cast<int>(r.size()) < p) {
        if (static_cast<int>(r.size()) + 2 <= p && rng.uniform() < 0.5) {
            const double rad = std::sqrt(rng.uniform()), ang = 2 * M_PI * rng.uniform();
            const Complex z(rad * std::cos(ang), rad * std::sin(ang));
            r.push_back(z);
            r.push_back(std::conj(z));
        } else {
            r.emplace_back(2 * rng.uniform() - 1, 0.0);
        }
    }
    return r;
}

// Coefficients of prod (1 - lambda u) by direct polynomial multiplication.
Eigen::VectorXd convolve_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> poly{1.0};
    for (Complex z : roots) {
        std::vector<Complex> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= z * poly[i];
        }
        poly = next;
    }
    Eigen::VectorXd rho(static_cast<Eigen::Index>(roots.size()));
    for (std::size_t j = 1; j < poly.size(); ++j) rho(static_cast<Eigen::Index>(j - 1)) = -poly[j].real();
    return rho;
}

// Every variable as a linear map of base noises eps_{1-q}..eps_T; conditions
// eps_{1-index} on x_1..x_T and the remaining initial noises.
NormalParams joint_gaussian_conditional(const MaModel& m, const std::vector<double>& x, int index,
                                        const std::vector<double>& initial) {
    const int q = m.order(), T = static_cast<int>(x.size());
    const int base = q + T;  // column c is eps_{c + 1 - q}
    auto col = [&](int s) { return s + q - 1; };
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q + T, base);
    for (int l = 1; l <= q; ++l) L(l - 1, col(1 - l)) = 1.0;
    for (int t = 1; t <= T; ++t) {
        L(q + t - 1, col(t)) = 1.0;
        for (int j = 1; j <= q; ++j) L(q + t - 1, col(t - j)) = m.coefficients(j - 1);
    }
    const Eigen::MatrixXd S = m.sd * m.sd * L * L.transpose();
    std::vector<int> cond;
    Eigen::VectorXd val(q - 1 + T);
    int k = 0;
    for (int l = 1; l <= q; ++l)
        if (l != index) {
            cond.push_back(l - 1);
            val(k++) = initial[static_cast<std::size_t>(l - 1)];
        }
    for (int t = 1; t <= T; ++t) {
        cond.push_back(q + t - 1);
        val(k++) = x[static_cast<std::size_t>(t - 1)] - m.mean;
    }
    const int target = index - 1;
    const auto n = static_cast<Eigen::Index>(cond.size());
    Eigen::MatrixXd Scc(n, n);
    Eigen::VectorXd Stc(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Stc(i) = S(target, cond[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) Scc(i, j) = S(cond[static_cast<std::size_t>(i)], cond[static_cast<std::size_t>(j)]);
    }
    const auto llt = Scc.llt();
    return {Stc.dot(llt.solve(val)), S(target, target) - Stc.dot(llt.solve(Stc))};
}

double mixture_cdf(const MixtureParams& m, double x) {
    double c = 0;
    for (int j = 0; j < m.k(); ++j) c += m.weights[j] * normal_cdf((x - m.means[j]) / std::sqrt(m.variances[j]));
    return c;
}

MarkovSwitch switching_ar(Eigen::MatrixXd P, std::vector<double> slopes, std::vector<double> vars) {
    MarkovSwitch ms;
    ms.transition = std::move(P);
    ms.log_conditional = [slopes, vars](int i, double x, double prev) {
        return normal_logpdf(x, slopes[i] * prev, vars[i]);
    };
    ms.initial = 0.4;
    return ms;
}

// log p(x) summed over every state path.
double path_enumeration(const MarkovSwitch& ms, const std::vector<double>& x) {
    const int k = ms.states(), T = static_cast<int>(x.size());
    const Eigen::VectorXd pi = stationary_distribution(ms.transition);
    std::vector<int> path(T, 0);
    double total = 0;
    while (true) {
        double pr = pi(path[0]) * std::exp(ms.log_conditional(path[0], x[0], ms.initial));
        for (int r = 1; r < T; ++r)
            pr *= ms.transition(path[r - 1], path[r]) * std::exp(ms.log_conditional(path[r], x[r], x[r - 1]));
        total += pr;
        int r = 0;
        while (r < T && ++path[r] == k) path[r++] = 0;
        if (r == T) break;
    }
    return std::log(total);
}

}  // namespace

TEST_CASE("windowed average of a trend") {
    const auto w = windowed_average_stats(1.0, 0.0, 2.0, 2);
    CHECK(w.mean(0) == 1.0);
    CHECK(w.mean(100) == 1.0);
    CHECK(w.mean_stationary());
    const auto trend = windowed_average_stats(1.0, 0.5, 1.0, 2);
    CHECK_FALSE(trend.mean_stationary());
    CHECK(trend.mean(10) == doctest::Approx(6.0));
    CHECK(trend.autocovariance(0) == doctest::Approx(5.0 / 25));
    CHECK(trend.autocovariance(-3) == trend.autocovariance(3));
    CHECK(trend.autocovariance(5) == 0.0);
    CHECK_THROWS_AS(windowed_average_stats(0, 0, 1, -1), ConfigError);

    // simulation oracle at lags 1 and 3 (beyond the half width) with t = 10
    Stream rng(1);
    const int paths = 100000, q = 2;
    for (int h : {1, 3}) {
        std::vector<double> prod(paths);
        for (int i = 0; i < paths; ++i) {
            std::vector<double> y(2 * q + 1 + h);
            for (double& v : y) v = std_normal(rng);
            double a = 0, b = 0;
            for (int j = 0; j <= 2 * q; ++j) {
                a += 1.0 + 0.5 * (10 + j - q) + y[j];
                b += 1.0 + 0.5 * (10 + h + j - q) + y[j + h];
            }
            a /= 2 * q + 1;
            b /= 2 * q + 1;
            prod[i] = (a - trend.mean(10)) * (b - trend.mean(10 + h));
        }
        const auto est = mean_se(prod);
        CHECK(std::abs(est.mean - trend.autocovariance(h)) < 3 * est.se);
    }
}

TEST_CASE("AR(1) stationarity") {
    const auto half = ar1_stationary_check(4.0 / 3, 1.0, 0.5);
    CHECK(half.possible);
    CHECK(half.required_variance == doctest::Approx(4.0 / 3).epsilon(1e-15));
    CHECK(half.stationary);
    CHECK_FALSE(ar1_stationary_check(1.0, 1.0, 0.5).stationary);
    const auto walk = ar1_stationary_check(1.0, 1.0, 1.0);
    CHECK_FALSE(walk.possible);
    CHECK_FALSE(walk.stationary);
    CHECK(ar1_stationary_check(2.0, 2.0, 0.0).required_variance == 2.0);
    CHECK_THROWS_AS(ar1_stationary_check(0.0, 1.0, 0.5), ConfigError);
}

TEST_CASE("AR(1) closed-form posterior") {
    std::vector<double> ones(8, 1.0);
    const auto flat = ar1_posterior(ones);
    CHECK(flat.rho_mean() == 1.0);
    CHECK_THROWS_AS(flat.rho_marginal(), DataError);
    CHECK_THROWS_AS(ar1_posterior(std::vector<double>{0, 0, 0, 0, 0}), DataError);
    CHECK_THROWS_AS(ar1_posterior(std::vector<double>{1, 2, 3}), DataError);

    const std::vector<double> x{0.3, 0.9, 0.2, -0.4, 0.5, 1.1, 0.6, -0.2, 0.1, 0.8, 0.4};
    const auto post = ar1_posterior(x);
    auto ss = [&](double rho) {
        double s = 0;
        for (std::size_t t = 1; t < x.size(); ++t) s += (x[t] - rho * x[t - 1]) * (x[t] - rho * x[t - 1]);
        return s;
    };
    const double T = static_cast<double>(x.size() - 1);

    SUBCASE("marginal of rho by integrating sigma numerically") {
        auto dens = [&](double rho) {
            const double s = ss(rho);
            return integrate([&](double sig) { return std::pow(sig, -T - 1) * std::exp(-s / (2 * sig * sig)); }, 0.0,
                             kInf);
        };
        const double z = integrate(dens, -kInf, kInf);
        const auto student = post.rho_marginal();
        double gap = 0;
        for (double r = -1.0; r <= 2.0; r += 0.1)
            gap = std::max(gap, std::abs(integrate(dens, -kInf, r) / z - cdf(student, r)));
        CHECK(gap < 1e-3);
    }

    SUBCASE("predictive by integrating rho and sigma numerically") {
        auto joint = [&](double rho, double sig) { return std::pow(sig, -T - 1) * std::exp(-ss(rho) / (2 * sig * sig)); };
        auto over = [&](const std::function<double(double, double)>& f) {
            return integrate([&](double rho) { return integrate([&](double sig) { return f(rho, sig); }, 0.0, kInf); },
                             -kInf, kInf);
        };
        const double z = over(joint);
        const auto pred = post.predictive();
        for (double y : {-1.0, 0.1, 0.6, 2.0}) {
            const double oracle =
                over([&](double rho, double sig) { return joint(rho, sig) * npdf_of(y, rho * x.back(), sig); }) / z;
            CHECK(std::exp(logpdf(pred, y)) == doctest::Approx(oracle).epsilon(1e-6));
        }
        CHECK(integrate([&](double y) { return std::exp(logpdf(pred, y)); }, -kInf, kInf) ==
              doctest::Approx(1.0).epsilon(1e-6));
        CHECK(pred.param(0) == T - 1);
    }

    SUBCASE("consistency on a long simulated path") {
        Stream rng(3);
        ArModel m{0.0, Eigen::VectorXd::Constant(1, 0.5), 1.0, std::nullopt};
        auto path = simulate_ar(m, 501, rng);
        const auto big = ar1_posterior(path);
        const auto marg = big.rho_marginal();
        CHECK(std::abs(big.rho_mean() - 0.5) < 3 * std::sqrt(marg.param(2)));
        const auto cond = big.rho_given_variance(1.0);
        CHECK(variance(cond) == doctest::Approx(1.0 / big.lag_sq));
    }
}

TEST_CASE("AR(2) causality region") {
    CHECK(ar2_causal(0.0, 0.5));
    CHECK(ar2_in_triangle(0.0, 0.5));
    CHECK_FALSE(ar2_causal(1.5, 0.3));
    CHECK_FALSE(ar2_in_triangle(1.5, 0.3));
    CHECK(ar2_causal(1.2, -0.52));

    Stream rng(5);
    int disagreements = 0, causal = 0;
    for (int i = 0; i < 10000; ++i) {
        double a = std_normal(rng), b = std_normal(rng);
        const double rad = 6 * rng.uniform() / std::hypot(a, b);
        a *= rad;
        b *= rad;
        const bool root = ar2_causal(a, b);
        causal += root;
        disagreements += root != ar2_in_triangle(a, b);
        ArModel m{0.0, Eigen::Vector2d(a, b), 1.0, std::nullopt};
        disagreements += m.causal() != root;
    }
    CHECK(disagreements == 0);
    CHECK(causal > 500);
}

TEST_CASE("inverse roots to coefficients") {
    const std::vector<Complex> sym{0.5, -0.5};
    const auto e = roots_to_coeffs(sym);
    CHECK(e.coefficients(0) == doctest::Approx(0.0));
    CHECK(e.coefficients(1) == doctest::Approx(0.25));
    CHECK(roots_to_coeffs(std::vector<Complex>{0.9}).coefficients(0) == doctest::Approx(0.9));
    CHECK(roots_to_coeffs(std::vector<Complex>{}).coefficients.size() == 0);
    CHECK_THROWS_AS(roots_to_coeffs(std::vector<Complex>{Complex(0.2, 0.3), 0.1}), ConfigError);
    CHECK_THROWS_AS(roots_to_coeffs(std::vector<Complex>{Complex(0.2, 0.3), Complex(0.2, 0.3)}), ConfigError);

    Stream rng(6);
    double worst = 0, back = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto roots = random_roots(1 + rep % 6, rng);
        const auto ex = roots_to_coeffs(roots);
        worst = std::max(worst, (ex.coefficients - convolve_roots(roots)).cwiseAbs().maxCoeff());
        const auto again = roots_to_coeffs(coeffs_to_roots(ex.coefficients)).coefficients;
        back = std::max(back, (again - ex.coefficients).cwiseAbs().maxCoeff());
        const auto p = roots.size();
        CHECK(ex.operations <= p * p);
    }
    CHECK(worst < 1e-12);
    CHECK(back < 1e-8);

    const auto r6 = random_roots(6, rng);
    ArModel m{0.0, roots_to_coeffs(r6).coefficients, 1.0, r6};
    CHECK_NOTHROW(m.validate());
    CHECK(m.causal());
    m.coefficients(0) += 1e-6;
    CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("stationary covariance of an AR(p)") {
    ArModel one{0.0, Eigen::VectorXd::Constant(1, 0.6), 2.0, std::nullopt};
    const auto a1 = ar_stationary_covariance(one);
    CHECK(a1.covariance(0, 0) == doctest::Approx(4.0 / (1 - 0.36)).epsilon(1e-10));
    CHECK(a1.residual < 1e-10);

    ArModel quiet{0.0, Eigen::Vector2d(0.5, 0.3), 0.0, std::nullopt};
    CHECK(ar_stationary_covariance(quiet).covariance.isZero(0.0));

    ArModel two{1.0, Eigen::Vector2d(0.5, 0.3), 1.0, std::nullopt};
    const auto a2 = ar_stationary_covariance(two);
    CHECK(a2.residual < 1e-10);
    // Kronecker-vectorized Lyapunov solve
    const Eigen::MatrixXd B = companion_matrix(two.coefficients);
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) K.block(2 * i, 2 * j, 2, 2) -= B(i, j) * B;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v(0) = 1.0;
    const Eigen::VectorXd vecA = K.fullPivLu().solve(v);
    CHECK((a2.covariance - Eigen::Map<const Eigen::MatrixXd>(vecA.data(), 2, 2)).cwiseAbs().maxCoeff() < 1e-10);

    Stream rng(7);
    const auto path = simulate_ar(two, 1'000'000, rng);
    double g0 = 0, g1 = 0;
    for (std::size_t t = 1; t < path.size(); ++t) {
        g0 += (path[t] - 1) * (path[t] - 1);
        g1 += (path[t] - 1) * (path[t - 1] - 1);
    }
    g0 /= static_cast<double>(path.size() - 1);
    g1 /= static_cast<double>(path.size() - 1);
    CHECK(std::abs(g0 / a2.covariance(0, 0) - 1) < 0.02);
    CHECK(std::abs(g1 / a2.covariance(0, 1) - 1) < 0.02);

    ArModel explosive{0.0, Eigen::VectorXd::Constant(1, 1.2), 1.0, std::nullopt};
    CHECK_THROWS_AS(ar_stationary_covariance(explosive), NumericalError);
    ArModel walk{0.0, Eigen::VectorXd::Constant(1, 1.0), 1.0, std::nullopt};
    CHECK_THROWS_AS(ar_stationary_covariance(walk, 1000), NumericalError);
}

TEST_CASE("AR posterior validity") {
    static_assert(ar_posterior_validity(10, 3));
    CHECK_FALSE(ar_posterior_validity(3, 3));
    CHECK(ar_posterior_validity(4, 3));
    CHECK_FALSE(ar_posterior_validity(0, 0));
}

TEST_CASE("fixed-order chain matches the grid posterior") {
    Stream gen(8);
    ArModel truth{0.5, Eigen::VectorXd::Constant(1, 0.6), 1.0, std::nullopt};
    const auto x = simulate_ar(truth, 100, gen);
    // rho marginal with mean and variance integrated: |1 - rho|^-1 S_y(rho)^{-(n-1)/2}
    auto log_grid = [&](double rho) {
        std::vector<double> y;
        for (std::size_t t = 1; t < x.size(); ++t) y.push_back(x[t] - rho * x[t - 1]);
        const double m = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double s = 0;
        for (double v : y) s += (v - m) * (v - m);
        return -std::log(std::abs(1 - rho)) - 0.5 * (y.size() - 1.0) * std::log(s);
    };
    const int cells = 4000;
    std::vector<double> cum(cells + 1, 0.0), lw(cells);
    for (int i = 0; i < cells; ++i) lw[i] = log_grid(-1 + (i + 0.5) * 2.0 / cells);
    const double top = *std::max_element(lw.begin(), lw.end());
    for (int i = 0; i < cells; ++i) cum[i + 1] = cum[i] + std::exp(lw[i] - top);
    for (double& c : cum) c /= cum.back();
    std::vector<double> cuts;
    for (int b = 1; b < 20; ++b) {
        const auto it = std::lower_bound(cum.begin(), cum.end(), b / 20.0);
        cuts.push_back(-1 + 2.0 * static_cast<double>(it - cum.begin()) / cells);
    }
    std::vector<double> expected(20), observed(20, 0.0);
    for (int b = 0; b < 20; ++b) {
        auto at = [&](double r) {
            const double pos = (r + 1) / 2 * cells;
            const auto i = std::clamp(static_cast<int>(pos), 0, cells - 1);
            return cum[i] + (cum[i + 1] - cum[i]) * (pos - i);
        };
        expected[b] = (b == 19 ? 1.0 : at(cuts[b])) - (b == 0 ? 0.0 : at(cuts[b - 1]));
    }

    RjArOptions opt;
    opt.max_order = 1;
    opt.start_order = 1;
    opt.jumps = false;
    opt.iterations = 40000;
    opt.burnin = 2000;
    Stream rng(9);
    const auto res = rj_ar_order(x, opt, rng);
    const auto rho = res.trace.component(3);
    for (double r : rho) observed[std::upper_bound(cuts.begin(), cuts.end(), r) - cuts.begin()] += 1.0 / rho.size();
    const double tv = total_variation(observed, expected);
    MESSAGE("fixed-order TV " << tv);
    CHECK(tv < 0.05);
    CHECK(res.order_posterior()[1] == 1.0);
}

TEST_CASE("reversible jump picks the order") {
    RjArOptions opt;
    opt.max_order = 5;
    opt.iterations = 6000;
    opt.burnin = 1000;

    SUBCASE("white noise") {
        Stream gen(10);
        ArModel noise{0.0, Eigen::VectorXd(0), 1.0, std::nullopt};
        const auto x = simulate_ar(noise, 300, gen);
        Stream rng(11);
        const auto res = rj_ar_order(x, opt, rng);
        const auto h = res.order_posterior();
        MESSAGE("white noise order posterior " << h[0] << " " << h[1] << " " << h[2]);
        CHECK(h[0] + h[1] >= 0.7);
        CHECK(res.death_accepted > 0);
    }

    SUBCASE("AR(2) data: the order is at least 2 in every seed") {
        const std::vector<Complex> lam{0.7, -0.5};
        ArModel truth{0.0, roots_to_coeffs(lam).coefficients, 1.0, lam};
        int hits = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            Stream gen(1000 + s), rng(2000 + s);
            const auto x = simulate_ar(truth, 500, gen);
            const auto res = rj_ar_order(x, opt, rng);
            const auto h = res.order_posterior();
            CHECK(h[0] + h[1] < 0.01);
            hits += res.order_mode() == 2;
        }
        MESSAGE("order-2 mode in " << hits << " of 20 under the uniform order prior");
    }
}

TEST_CASE("reversible jump order posterior against grid integration") {
    Stream gen(30);
    const std::vector<Complex> lam{0.6, 0.2};
    ArModel truth{0.0, roots_to_coeffs(lam).coefficients, 1.0, lam};
    const auto x = simulate_ar(truth, 200, gen);
    const int pmax = 2;
    // mean and variance integrated: |1 - sum rho|^-1 S_y^{-(n-1)/2}
    auto log_marginal = [&](const std::vector<Complex>& roots) {
        const Eigen::VectorXd rho = roots_to_coeffs(roots).coefficients;
        std::vector<double> y;
        for (std::size_t t = pmax; t < x.size(); ++t) {
            double v = x[t];
            for (Eigen::Index i = 1; i <= rho.size(); ++i) v -= rho(i - 1) * x[t - i];
            y.push_back(v);
        }
        const double m = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double ss = 0;
        for (double v : y) ss += (v - m) * (v - m);
        return -std::log(std::abs(1 - rho.sum())) - 0.5 * (y.size() - 1.0) * std::log(ss);
    };
    const double ref = log_marginal({});
    const int G = 400;
    const double h = 2.0 / G;
    double m1 = 0, m2 = 0, mc = 0;
    for (int i = 0; i < G; ++i) {
        const double a = -1 + (i + 0.5) * h;
        m1 += std::exp(log_marginal({a}) - ref) * h / 2;
        for (int j = 0; j < G; ++j) {
            const double b = -1 + (j + 0.5) * h;
            m2 += std::exp(log_marginal({a, b}) - ref) * h * h / 4;
            if (a * a + b * b < 1) mc += std::exp(log_marginal({Complex(a, b), Complex(a, -b)}) - ref) * h * h / M_PI;
        }
    }
    // order prior uniform, pair count uniform given the order
    std::vector<double> exact{1.0, m1, 0.5 * m2 + 0.5 * mc};
    const double z = exact[0] + exact[1] + exact[2];
    for (double& v : exact) v /= z;

    RjArOptions opt;
    opt.max_order = pmax;
    opt.iterations = 60000;
    opt.burnin = 2000;
    Stream rng(31);
    const auto post = rj_ar_order(x, opt, rng).order_posterior();
    MESSAGE("exact " << exact[0] << " " << exact[1] << " " << exact[2] << ", sampled " << post[0] << " " << post[1]
                     << " " << post[2]);
    for (int p = 0; p <= pmax; ++p) CHECK(std::abs(post[p] - exact[p]) < 0.03);
    CHECK(exact[1] > 0.1);
    CHECK(exact[2] > 0.1);

    // a nonuniform order prior reweights the same marginals
    opt.order_prior = {0.2, 0.2, 0.6};
    Stream rng2(32);
    const auto tilted = rj_ar_order(x, opt, rng2).order_posterior();
    std::vector<double> want{0.2 * exact[0], 0.2 * exact[1], 0.6 * exact[2]};
    const double zt = want[0] + want[1] + want[2];
    for (int p = 0; p <= pmax; ++p) CHECK(std::abs(tilted[p] - want[p] / zt) < 0.03);
}

TEST_CASE("reversible jump input checks") {
    Stream rng(12);
    std::vector<double> x(5, 0.1);
    RjArOptions opt;
    CHECK_THROWS_AS(rj_ar_order(x, opt, rng), DataError);
    opt.max_order = 2;
    opt.start_order = 3;
    CHECK_THROWS_AS(rj_ar_order(x, opt, rng), ConfigError);
    opt.start_order = 0;
    opt.order_prior = {0.5, 0.5};
    CHECK_THROWS_AS(rj_ar_order(x, opt, rng), ConfigError);
    opt.order_prior.clear();
    opt.burnin = opt.iterations;
    CHECK_THROWS_AS(rj_ar_order(x, opt, rng), ConfigError);
}

TEST_CASE("MA autocovariance") {
    MaModel one{0.0, Eigen::VectorXd::Constant(1, 0.5), 1.0};
    CHECK(ma_autocovariance(one, 0) == doctest::Approx(1.25));
    CHECK(ma_autocovariance(one, 1) == doctest::Approx(0.5));
    CHECK(ma_autocovariance(one, 2) == 0.0);
    CHECK(ma_autocovariance(one, -1) == ma_autocovariance(one, 1));

    MaModel two{2.0, Eigen::Vector2d(0.6, -0.4), 1.5};
    Stream rng(13);
    const auto x = simulate_ma(two, 1'000'000, rng);
    for (int s = 0; s <= 3; ++s) {
        std::vector<double> prod;
        prod.reserve(x.size());
        for (std::size_t t = s; t < x.size(); ++t) prod.push_back((x[t] - 2.0) * (x[t - s] - 2.0));
        const auto est = batch_mean_se(prod, 50);
        CHECK(std::abs(est.mean - ma_autocovariance(two, s)) < 3 * est.se);
    }
}

TEST_CASE("conditional of an initial MA noise") {
    SUBCASE("exact form against joint Gaussian conditioning") {
        MaModel m{0.3, Eigen::VectorXd::Constant(1, 0.7), 1.3};
        const std::vector<double> x{0.9, -0.4, 1.6};
        const std::vector<double> init{0.0};
        const auto got = ma_initial_noise_conditional(m, x, 1, init, NoiseConditional::exact);
        const auto want = joint_gaussian_conditional(m, x, 1, init);
        CHECK(std::abs(got.mean - want.mean) < 1e-10);
        CHECK(std::abs(got.variance - want.variance) < 1e-10);

        MaModel m3{-0.2, Eigen::Vector3d(0.5, -0.3, 0.8), 0.9};
        const std::vector<double> y{0.4, 1.2, -0.7, 0.3, -1.5, 0.8};
        const std::vector<double> init3{0.25, -0.6, 1.1};
        for (int idx = 1; idx <= 3; ++idx) {
            const auto g = ma_initial_noise_conditional(m3, y, idx, init3, NoiseConditional::exact);
            const auto w = joint_gaussian_conditional(m3, y, idx, init3);
            CHECK(std::abs(g.mean - w.mean) < 1e-10);
            CHECK(std::abs(g.variance - w.variance) < 1e-10);
        }
    }

    SUBCASE("local form uses the first q - index + 1 observations only") {
        MaModel m{0.3, Eigen::VectorXd::Constant(1, 0.7), 1.3};
        const std::vector<double> x{0.9, -0.4, 1.6};
        const auto loc = ma_initial_noise_conditional(m, x, 1, std::vector<double>{0.5});
        const auto first = joint_gaussian_conditional(m, {x[0]}, 1, {0.0});
        CHECK(std::abs(loc.mean - first.mean) < 1e-12);
        CHECK(std::abs(loc.variance - first.variance) < 1e-12);

        MaModel m3{-0.2, Eigen::Vector3d(0.5, -0.3, 0.8), 0.9};
        std::vector<double> y{0.4, 1.2, -0.7, 0.3, -1.5, 0.8};
        const std::vector<double> init3{0.25, -0.6, 1.1};
        const auto before = ma_initial_noise_conditional(m3, y, 2, init3);
        for (std::size_t t = 2; t < y.size(); ++t) y[t] += 10.0;
        const auto after = ma_initial_noise_conditional(m3, y, 2, init3);
        CHECK(before.mean == after.mean);
        CHECK(before.variance == after.variance);
        const auto exact_after = ma_initial_noise_conditional(m3, y, 2, init3, NoiseConditional::exact);
        CHECK(exact_after.mean != doctest::Approx(before.mean));
    }

    SUBCASE("zero coefficients give the prior") {
        MaModel m{0.0, Eigen::Vector2d(0.0, 0.0), 1.7};
        const std::vector<double> x{1, 2, 3, 4};
        for (auto form : {NoiseConditional::exact, NoiseConditional::local}) {
            const auto c = ma_initial_noise_conditional(m, x, 2, std::vector<double>{0.3, 0.4}, form);
            CHECK(c.mean == 0.0);
            CHECK(c.variance == doctest::Approx(1.7 * 1.7));
        }
    }

    MaModel m{0.0, Eigen::VectorXd::Constant(1, 0.5), 1.0};
    CHECK_THROWS_AS(ma_initial_noise_conditional(m, std::vector<double>{1.0}, 2, std::vector<double>{0.0}), ConfigError);
    CHECK_THROWS_AS(ma_initial_noise_conditional(m, std::vector<double>{1.0}, 1, std::vector<double>{}), ConfigError);
}

TEST_CASE("MA forecasts") {
    MaModel m{1.0, Eigen::Vector2d(0.6, -0.4), 1.2};
    Stream rng(14);
    auto x = simulate_ma(m, 30, rng);
    // dense Gaussian conditioning on the Toeplitz autocovariance
    const auto T = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd G(T, T);
    Eigen::VectorXd dev(T);
    for (Eigen::Index i = 0; i < T; ++i) {
        dev(i) = x[static_cast<std::size_t>(i)] - 1.0;
        for (Eigen::Index j = 0; j < T; ++j) G(i, j) = ma_autocovariance(m, static_cast<int>(i - j));
    }
    const Eigen::VectorXd alpha = G.llt().solve(dev);
    for (int h = 1; h <= 2; ++h) {
        double want = 1.0;
        for (Eigen::Index i = 0; i < T; ++i) want += ma_autocovariance(m, static_cast<int>(T - 1 + h - i)) * alpha(i);
        const auto got = ma_predictive(m, x, h);
        CHECK_FALSE(got.beyond_horizon);
        CHECK(got.mean == doctest::Approx(want).epsilon(1e-9));
    }
    const auto far = ma_predictive(m, x, 3);
    CHECK(far.beyond_horizon);
    CHECK(far.mean == 1.0);

    const double before = ma_predictive(m, x, 1).mean;
    x.back() += 1.0;
    CHECK(ma_predictive(m, x, 1).mean != before);

    MaModel noise{0.5, Eigen::VectorXd(0), 1.0};
    for (int h = 1; h <= 3; ++h) CHECK(ma_predictive(noise, x, h).beyond_horizon);
    CHECK_THROWS_AS(ma_predictive(m, x, 0), ConfigError);
}

TEST_CASE("hidden Markov marginal is a mixture") {
    Eigen::Matrix2d sym;
    sym << 0.8, 0.2, 0.2, 0.8;
    const auto pi = stationary_distribution(sym);
    CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-12));

    Eigen::Matrix2d P;
    P << 0.6, 0.4, 0.3, 0.7;
    const auto mix = hmm_marginal_mixture(P, std::vector<double>{-1.0, 2.0}, std::vector<double>{1.0, 0.5});
    CHECK(mix.weights[0] == doctest::Approx(3.0 / 7).epsilon(1e-12));
    const Eigen::RowVectorXd row = stationary_distribution(P).transpose();
    CHECK((row * P - row).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::Matrix2d flip;
    flip << 0.0, 1.0, 1.0, 0.0;
    CHECK(stationary_distribution(flip)(1) == doctest::Approx(0.5).epsilon(1e-12));

    const auto single = hmm_marginal_mixture(Eigen::MatrixXd::Ones(1, 1), std::vector<double>{3.0}, std::vector<double>{2.0});
    CHECK(single.k() == 1);
    CHECK(single.weights[0] == 1.0);

    Eigen::Matrix2d absorbing;
    absorbing << 1.0, 0.0, 0.5, 0.5;
    CHECK_THROWS_AS(stationary_distribution(absorbing), ConfigError);
    Eigen::Matrix2d bad;
    bad << 0.5, 0.4, 0.5, 0.5;
    CHECK_THROWS_AS(stationary_distribution(bad), ConfigError);

    Stream rng(15);
    const auto sample = simulate_hmm(P, mix.means, mix.variances, 100000, rng);
    std::vector<double> thinned;
    for (std::size_t t = 0; t < sample.observations.size(); t += 10) thinned.push_back(sample.observations[t]);
    const auto ks = ks_test(thinned, [&](double v) { return mixture_cdf(mix, v); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("stochastic volatility joint density") {
    const std::vector<double> zero(4, 0.0);
    const double phi = 0.8, sigma = 0.5, beta = 1.3;
    auto ar_part = [&](const std::vector<double>& y) {
        double lp = normal_logpdf(y[0], 0, sigma * sigma);
        for (std::size_t t = 1; t < y.size(); ++t) lp += normal_logpdf(y[t], phi * y[t - 1], sigma * sigma);
        return lp;
    };
    // with x = 0 only the -sum y_t / 2 scale term remains besides the AR(1) prior
    double ref = 0;
    Stream rng(16);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> y(5);
        for (double& v : y) v = 3 * std_normal(rng);
        const double diff = sv_joint_logdensity(phi, sigma, beta, zero, y) - ar_part(y) +
                            0.5 * (y[1] + y[2] + y[3] + y[4]);
        if (rep == 0) ref = diff;
        CHECK(diff == doctest::Approx(ref).epsilon(1e-12));
    }

    const std::vector<double> x{0.3, -1.1, 2.0, 0.5};
    CHECK(std::isfinite(sv_joint_logdensity(phi, sigma, beta, x, std::vector<double>(5, 50.0))));
    CHECK(std::isfinite(sv_joint_logdensity(phi, sigma, beta, x, std::vector<double>(5, -50.0))));
    CHECK_THROWS_AS(sv_joint_logdensity(phi, 0.0, beta, x, std::vector<double>(5, 0.0)), ConfigError);
    CHECK_THROWS_AS(sv_joint_logdensity(phi, sigma, beta, x, std::vector<double>(4, 0.0)), DataError);

    // T = 2: integrate the joint over (y0, y1, y2) and compare with the generative marginal over (y1, y2)
    const std::vector<double> x2{0.3, -1.1};
    const double s2 = sigma * sigma;
    auto inner3 = [&](double y1, double y2) {
        return gauss<double, 40>::integrate(
            [&](double y0) { return std::exp(sv_joint_logdensity(phi, sigma, beta, x2, std::vector<double>{y0, y1, y2})); },
            -6 * sigma, 6 * sigma);
    };
    const double lim = 7 * sigma * std::sqrt(1 / (1 - phi * phi));
    const double route1 = gauss<double, 40>::integrate(
        [&](double y1) { return gauss<double, 40>::integrate([&](double y2) { return inner3(y1, y2); }, -lim, lim); },
        -lim, lim);
    auto gen = [&](double y1, double y2) {
        return std::exp(normal_logpdf(y1, 0, s2 * (1 + phi * phi)) + normal_logpdf(y2, phi * y1, s2) +
                        normal_logpdf(x2[0], 0, beta * beta * std::exp(y1)) +
                        normal_logpdf(x2[1], 0, beta * beta * std::exp(y2)));
    };
    const double route2 = gauss<double, 40>::integrate(
        [&](double y1) { return gauss<double, 40>::integrate([&](double y2) { return gen(y1, y2); }, -lim, lim); },
        -lim, lim);
    CHECK(std::abs(route1 / route2 - 1) < 1e-4);
}

TEST_CASE("Markov-switching prediction filter") {
    SUBCASE("one state is a plain sum") {
        auto ms = switching_ar(Eigen::MatrixXd::Ones(1, 1), {0.6}, {0.8});
        const std::vector<double> x{0.2, -0.5, 1.0, 0.7};
        const auto f = ms_prediction_filter(ms, x);
        double direct = normal_logpdf(x[0], 0.6 * ms.initial, 0.8);
        for (std::size_t t = 1; t < x.size(); ++t) direct += normal_logpdf(x[t], 0.6 * x[t - 1], 0.8);
        CHECK(f.loglik() == doctest::Approx(direct).epsilon(1e-14));
    }

    SUBCASE("path enumeration") {
        Eigen::Matrix2d P2;
        P2 << 0.9, 0.1, 0.25, 0.75;
        Eigen::Matrix3d P3;
        P3 << 0.5, 0.3, 0.2, 0.1, 0.8, 0.1, 0.3, 0.3, 0.4;
        Stream rng(17);
        for (int T : {1, 4, 8}) {
            std::vector<double> x(T);
            for (double& v : x) v = 1.5 * std_normal(rng);
            const auto two = switching_ar(P2, {0.2, 0.9}, {0.5, 2.0});
            const auto three = switching_ar(P3, {-0.5, 0.3, 1.0}, {1.0, 0.3, 2.5});
            for (const auto* ms : {&two, &three}) {
                const auto f = ms_prediction_filter(*ms, x);
                CHECK(std::abs(f.loglik() - path_enumeration(*ms, x)) < 1e-10);
                for (Eigen::Index r = 0; r < f.state_probabilities.rows(); ++r)
                    CHECK(f.state_probabilities.row(r).sum() == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(f.cumulative_loglik.size() == x.size());
            }
        }
        const auto two = switching_ar(P2, {0.2, 0.9}, {0.5, 2.0});
        const auto f = ms_prediction_filter(two, std::vector<double>{0.1, 0.2});
        CHECK((f.state_probabilities.row(0).transpose() - stationary_distribution(P2)).cwiseAbs().maxCoeff() < 1e-15);
    }

    MarkovSwitch dead;
    dead.transition = Eigen::Matrix2d::Constant(0.5);
    dead.log_conditional = [](int, double, double) { return -kInf; };
    CHECK_THROWS_AS(ms_prediction_filter(dead, std::vector<double>{1.0}), NumericalError);
    MarkovSwitch missing;
    missing.transition = Eigen::Matrix2d::Constant(0.5);
    CHECK_THROWS_AS(ms_prediction_filter(missing, std::vector<double>{1.0}), ConfigError);
}
