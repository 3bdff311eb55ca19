#include "bayescomp/numeric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <limits>
#include <numeric>

#include "bayescomp/errors.hpp"

namespace bayescomp {

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_choose(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return lfact(n) - lfact(k) - lfact(n - k);
}

double normalize_log_weights(std::vector<double>& w) {
    const double z = log_sum_exp(w);
    if (!std::isfinite(z)) throw NumericalError("all log-weights are -inf or non-finite");
    for (double& x : w) x = std::exp(x - z);
    return z;
}

double kolmogorov_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_uniform(std::vector<double> u) {
    if (u.empty()) throw ConfigError("KS test needs at least one draw");
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double lo = u[i] - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - u[i];
        d = std::max({d, lo, hi});
    }
    return {d, kolmogorov_pvalue(d, u.size())};
}

KsResult ks_test(std::span<const double> draws, const std::function<double(double)>& cdf) {
    std::vector<double> u(draws.size());
    std::transform(draws.begin(), draws.end(), u.begin(), cdf);
    return ks_uniform(std::move(u));
}

double chi_square_sf(double x, double df) {
    if (x <= 0) return 1.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw ConfigError("chi-square: observed and expected sizes differ");
    std::vector<double> o, e;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += expected[i];
        if (acc_e >= min_expected) {
            o.push_back(acc_o);
            e.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0) {
        if (e.empty()) {
            o.push_back(acc_o);
            e.push_back(acc_e);
        } else {
            o.back() += acc_o;
            e.back() += acc_e;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    const double df = static_cast<double>(o.size()) - 1.0;
    return {stat, df, df > 0 ? chi_square_sf(stat, df) : 1.0};
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ConfigError("total variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

MeanSe mean_se(std::span<const double> x) {
    if (x.size() < 2) throw ConfigError("mean_se needs at least two values");
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

MeanSe batch_mean_se(std::span<const double> x, std::size_t batches) {
    if (x.size() < 2 * batches) return mean_se(x);
    const std::size_t len = x.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    const MeanSe bm = mean_se(means);
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    return {m, bm.se};
}

}  // namespace bayescomp
