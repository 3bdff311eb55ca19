#include "bayescomp/linreg.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool is_spd(const MatrixXd& m) {
    if (m.rows() != m.cols() || m.size() == 0) return false;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
    Eigen::LLT<MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

MatrixXd spd_inverse(const MatrixXd& m) {
    Eigen::LDLT<MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) throw NumericalError("matrix factorization failed");
    return ldlt.solve(MatrixXd::Identity(m.rows(), m.cols()));
}

VectorXd tilde_or_zero(const VectorXd& bt, Eigen::Index p) {
    if (bt.size() == 0) return VectorXd::Zero(p);
    if (bt.size() != p) throw ConfigError("prior mean has " + std::to_string(bt.size()) + " entries, need " +
                                          std::to_string(p));
    return bt;
}

// Shared pieces of the G-prior posterior: B = s^2 + (bt-bh)'X'X(bt-bh)/(c+1).
struct GPieces {
    VectorXd center;
    double b_term;
};

GPieces gprior_pieces(const RegressionData& data, const OlsFit& fit, const GPrior& g) {
    if (!(g.c > 0.0)) throw ConfigError("G-prior c must be positive");
    const VectorXd bt = tilde_or_zero(g.beta_tilde, data.p());
    const VectorXd d = bt - fit.beta_hat;
    const double q = (data.X * d).squaredNorm();
    return {(bt + g.c * fit.beta_hat) / (g.c + 1.0), fit.s2 + q / (g.c + 1.0)};
}

}  // namespace

void RegressionData::validate() const {
    if (X.rows() != y.size()) throw DataError("design has " + std::to_string(X.rows()) + " rows but y has " +
                                              std::to_string(y.size()) + " entries");
    if (X.cols() == 0) throw DataError("design has no columns");
    if (X.rows() <= X.cols()) throw DataError("need more observations than columns");
    if (!X.allFinite() || !y.allFinite()) throw DataError("non-finite entries in the data");
    Eigen::JacobiSVD<MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) >= 1e-10 * sv(0))) throw DataError("design matrix is rank deficient (X'X singular)");
}

RegressionData make_regression_data(Eigen::MatrixXd X, Eigen::VectorXd y) {
    RegressionData d{std::move(X), std::move(y)};
    d.validate();
    return d;
}

void ConjugateRegressionPrior::validate(Eigen::Index p) const {
    if (beta_tilde.size() != p) throw ConfigError("prior mean has wrong dimension");
    if (M.rows() != p || !is_spd(M)) throw ConfigError("prior matrix M must be symmetric positive definite");
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("inverse-gamma prior needs a > 0 and b > 0");
}

OlsFit ols(const RegressionData& data) {
    data.validate();
    const MatrixXd xtx = data.X.transpose() * data.X;
    Eigen::LDLT<MatrixXd> ldlt(xtx);
    OlsFit fit;
    fit.beta_hat = ldlt.solve(data.X.transpose() * data.y);
    fit.s2 = (data.y - data.X * fit.beta_hat).squaredNorm();
    fit.xtx_inv = ldlt.solve(MatrixXd::Identity(data.p(), data.p()));
    const double dof = static_cast<double>(data.n() - data.p());
    fit.std_error = (fit.s2 / dof * fit.xtx_inv.diagonal()).cwiseSqrt();
    return fit;
}

PosteriorStudentT ConjugateRegressionPosterior::beta_marginal() const {
    const double df = 2.0 * sigma2.shape;
    return {df, mean, 2.0 * sigma2.scale / df * spd_inverse(precision)};
}

ConjugateRegressionPosterior conjugate_posterior(const RegressionData& data, const ConjugateRegressionPrior& prior) {
    prior.validate(data.p());
    const OlsFit fit = ols(data);
    const MatrixXd xtx = data.X.transpose() * data.X;
    ConjugateRegressionPosterior post;
    post.precision = prior.M + xtx;
    Eigen::LDLT<MatrixXd> ldlt(post.precision);
    post.mean = ldlt.solve(prior.M * prior.beta_tilde + xtx * fit.beta_hat);
    // (M^-1 + (X'X)^-1)^-1 = X'X (M + X'X)^-1 M
    const VectorXd d = prior.beta_tilde - fit.beta_hat;
    post.quadratic_form = d.dot(xtx * ldlt.solve(prior.M * d));
    const double n = static_cast<double>(data.n());
    post.sigma2 = {prior.a + 0.5 * n, prior.b + 0.5 * (fit.s2 + post.quadratic_form)};
    return post;
}

MatrixIdentityCheck check_matrix_identities(const MatrixXd& M, const MatrixXd& xtx) {
    const MatrixXd lhs = (M + xtx).inverse();
    const MatrixXd mi = M.inverse(), xi = xtx.inverse();
    const MatrixXd mid = (mi + xi).inverse();
    const double scale = lhs.norm();
    MatrixIdentityCheck out;
    out.inverse_gap = (lhs - (mi - mi * mid * mi)).norm() / scale;
    out.inverse_gap2 = (lhs - (xi - xi * mid * xi)).norm() / scale;
    out.product_gap = (xtx * lhs * M - mid).norm() / mid.norm();
    return out;
}

bool HpdRegion::contains(const VectorXd& beta) const {
    const VectorXd d = beta - center;
    return d.dot(scale.ldlt().solve(d)) <= radius;
}

HpdRegion hpd_region(const PosteriorStudentT& post, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("HPD level alpha must lie in (0, 1)");
    const double p = static_cast<double>(post.center.size());
    const boost::math::fisher_f_distribution<double> f(p, post.df);
    return {1.0 - alpha, post.center, post.scale, p * boost::math::quantile(f, 1.0 - alpha)};
}

PosteriorStudentT predictive(const RegressionData& data, const RegressionPrior& prior, const MatrixXd& x_new) {
    if (x_new.cols() != data.p()) throw ConfigError("new design has " + std::to_string(x_new.cols()) +
                                                    " columns, need " + std::to_string(data.p()));
    const OlsFit fit = ols(data);
    const auto m = x_new.rows();
    const MatrixXd eye = MatrixXd::Identity(m, m);
    const double n = static_cast<double>(data.n());
    if (const auto* cp = std::get_if<ConjugateRegressionPrior>(&prior)) {
        const auto post = conjugate_posterior(data, *cp);
        const double df = n + 2.0 * cp->a;
        const MatrixXd spread = eye + x_new * post.precision.ldlt().solve(x_new.transpose());
        return {df, x_new * post.mean, (2.0 * cp->b + fit.s2 + post.quadratic_form) / df * spread};
    }
    if (const auto* gp = std::get_if<GPrior>(&prior)) {
        if (gp->hierarchical_exponent) throw UnsupportedError("predictive under hierarchical c is a mixture of Student laws");
        const auto pieces = gprior_pieces(data, fit, *gp);
        const double shrink = gp->c / (gp->c + 1.0);
        const MatrixXd spread = eye + shrink * x_new * fit.xtx_inv * x_new.transpose();
        return {n, x_new * pieces.center, pieces.b_term / n * spread};
    }
    const double dof = n - static_cast<double>(data.p());
    const MatrixXd spread = eye + x_new * fit.xtx_inv * x_new.transpose();
    return {dof, x_new * fit.beta_hat, fit.s2 / dof * spread};
}

double marginal_likelihood(const RegressionData& data, const RegressionPrior& prior) {
    const double n = static_cast<double>(data.n());
    if (const auto* cp = std::get_if<ConjugateRegressionPrior>(&prior)) {
        data.validate();
        cp->validate(data.p());
        const MatrixXd spread = MatrixXd::Identity(data.n(), data.n()) +
                                data.X * cp->M.ldlt().solve(data.X.transpose());
        const MultivariateStudentT law(2.0 * cp->a, data.X * cp->beta_tilde, (cp->b / cp->a) * spread);
        return law.logpdf(data.y);
    }
    if (const auto* gp = std::get_if<GPrior>(&prior)) {
        if (gp->hierarchical_exponent) throw ConfigError("marginal likelihood needs a fixed c (improper component: c)");
        const OlsFit fit = ols(data);
        const auto pieces = gprior_pieces(data, fit, *gp);
        const double p = static_cast<double>(data.p());
        return std::lgamma(0.5 * n) - 0.5 * n * std::log(std::numbers::pi) - 0.5 * p * std::log1p(gp->c) -
               0.5 * n * std::log(pieces.b_term);
    }
    throw ConfigError("marginal likelihood undefined under an improper prior (component: beta, flat)");
}

double log_det_gprior_kernel(const MatrixXd& X, double c) {
    const MatrixXd xtx_inv = spd_inverse(X.transpose() * X);
    const MatrixXd k = MatrixXd::Identity(X.rows(), X.rows()) + c * X * xtx_inv * X.transpose();
    Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericalError("G-prior kernel is not positive definite");
    return 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

RestrictedModel restrict_model(const RegressionData& data, const ConjugateRegressionPrior& prior, const MatrixXd& R) {
    const auto p = data.p();
    if (R.rows() == 0) return {MatrixXd::Identity(p, p), data, prior};
    if (R.cols() != p) throw ConfigError("restriction has " + std::to_string(R.cols()) + " columns, need " +
                                         std::to_string(p));
    if (R.rows() >= p) throw ConfigError("restriction leaves no free coefficients");
    Eigen::JacobiSVD<MatrixXd> svd(R, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) >= 1e-10 * sv(0))) throw ConfigError("restriction matrix R is rank deficient");
    const auto q = R.rows();
    RestrictedModel out;
    out.basis = svd.matrixV().rightCols(p - q);
    out.data = {data.X * out.basis, data.y};
    out.prior.M = out.basis.transpose() * prior.M * out.basis;
    out.prior.M = 0.5 * (out.prior.M + out.prior.M.transpose());
    // conditional prior mean of beta on the null space
    out.prior.beta_tilde = out.prior.M.ldlt().solve(out.basis.transpose() * prior.M * prior.beta_tilde);
    out.prior.a = prior.a;
    out.prior.b = prior.b;
    return out;
}

double bayes_factor_restriction(const RegressionData& data, const ConjugateRegressionPrior& prior, const MatrixXd& R) {
    if (R.rows() == 0) return 0.0;
    const auto h0 = restrict_model(data, prior, R);
    return marginal_likelihood(h0.data, h0.prior) - marginal_likelihood(data, prior);
}

GPriorPosterior gprior_posterior(const RegressionData& data, const GPrior& prior) {
    const OlsFit fit = ols(data);
    const auto pieces = gprior_pieces(data, fit, prior);
    const double n = static_cast<double>(data.n());
    const double shrink = prior.c / (prior.c + 1.0);
    GPriorPosterior out;
    out.conditional_scale = shrink * fit.xtx_inv;
    out.beta = {n, pieces.center, pieces.b_term / n * out.conditional_scale};
    out.sigma2 = {0.5 * n, 0.5 * pieces.b_term};
    return out;
}

PosteriorStudentT jeffreys_posterior(const RegressionData& data) {
    const OlsFit fit = ols(data);
    const double dof = static_cast<double>(data.n() - data.p());
    return {dof, fit.beta_hat, fit.s2 / dof * fit.xtx_inv};
}

PosteriorStudentT jeffreys_coefficient_marginal(const RegressionData& data, Eigen::Index j) {
    if (j < 0 || j >= data.p()) throw ConfigError("coefficient index out of range");
    const auto full = jeffreys_posterior(data);
    return {full.df, full.center.segment(j, 1), full.scale.block(j, j, 1, 1)};
}

// ---------------------------------------------------------------- series over c

double SeriesTerm::log_term(double c) const {
    const double bracket = (yty - fitted) + fitted / (c + 1.0);
    return -alpha * std::log(c) - 0.5 * q_plus_one * std::log1p(c) - 0.5 * n * std::log(bracket);
}

SeriesSum sum_series(const SeriesTerm& term, double abs_tol) {
    const double power = term.alpha + 0.5 * term.q_plus_one;
    if (!(power > 1.0))
        throw ConfigError("series over c diverges: need alpha + (q+1)/2 > 1, got " + std::to_string(power));
    const double resid = term.yty - term.fitted;
    if (!(resid > 0.0) && term.n > 0.0) throw NumericalError("series over c diverges for an exact fit");
    // terms are below c^-power (y'y - y'Py)^-n/2
    const double log_scale = term.n > 0.0 ? -0.5 * term.n * std::log(resid) : 0.0;
    auto log_tail_bound = [&](double c) { return log_scale + (1.0 - power) * std::log(c) - std::log(power - 1.0); };

    constexpr std::size_t kMaxDirect = 1u << 16;
    double head = -std::numeric_limits<double>::infinity();
    std::size_t c = 0;
    std::size_t block = 64;
    while (true) {
        for (std::size_t stop = c + block; c < stop; ++c) head = log_add_exp(head, term.log_term(static_cast<double>(c + 1)));
        if (log_tail_bound(static_cast<double>(c)) < head + std::log(abs_tol)) return {head, c, 0.0};
        if (c >= kMaxDirect) break;
        block = c;
    }
    // Euler-Maclaurin: sum_{j>c} f(j) = int_{c+1}^inf f + f(c+1)/2 - f'(c+1)/12 + ...
    const double x0 = static_cast<double>(c + 1);
    const double l0 = term.log_term(x0);
    // x = x0 t^(-1/(power-1)) flattens the power-law decay on t in (0, 1]
    const double e = 1.0 / (power - 1.0);
    const double integral = integrate(
        [&](double t) {
            const double x = x0 * std::pow(t, -e);
            return std::exp(term.log_term(x) - l0) * x0 * e * std::pow(t, -e - 1.0);
        },
        0.0, 1.0, 1e-13);
    const double h = 1e-3 * x0;
    const double deriv = (std::exp(term.log_term(x0 + h) - l0) - std::exp(term.log_term(x0 - h) - l0)) / (2.0 * h);
    const double tail = integral + 0.5 - deriv / 12.0;
    if (!(tail > 0.0)) throw NumericalError("series tail estimate failed");
    const double total = log_add_exp(head, l0 + std::log(tail));
    return {total, c, std::exp(l0 + std::log(tail) - total)};
}

HierarchicalCPosterior hier_c_posterior(const RegressionData& data, double alpha_exponent, std::size_t listed) {
    const OlsFit fit = ols(data);
    const double p = static_cast<double>(data.p());
    if (!(alpha_exponent + 0.5 * p > 1.0))
        throw ConfigError("hierarchical c series diverges: need alpha + (k+1)/2 > 1");
    const double yty = data.y.squaredNorm();
    const double fitted = fit.beta_hat.dot(data.X.transpose() * data.y);
    SeriesTerm base{alpha_exponent, p, static_cast<double>(data.n()), yty, std::min(fitted, yty)};
    if (yty == 0.0) base = {alpha_exponent, p, 0.0, 1.0, 0.0};  // y = 0: only the prior factors remain
    // c/(c+1) times a term shifts the exponents by (-1, +2)
    SeriesTerm weighted = base;
    weighted.alpha -= 1.0;
    weighted.q_plus_one += 2.0;
    const auto s0 = sum_series(base);
    const auto s1 = sum_series(weighted);
    HierarchicalCPosterior out;
    out.shrinkage = std::exp(s1.log_value - s0.log_value);
    out.beta_estimate = out.shrinkage * fit.beta_hat;
    out.direct_terms = s0.direct_terms;
    double listed_mass = 0.0;
    for (std::size_t c = 1; c <= listed; ++c) {
        out.c_weights.push_back(std::exp(base.log_term(static_cast<double>(c)) - s0.log_value));
        listed_mass += out.c_weights.back();
    }
    out.tail_mass = std::max(0.0, 1.0 - listed_mass);
    return out;
}

// ------------------------------------------------------------ variable selection

namespace {

std::size_t mask_of(const std::vector<bool>& gamma) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < gamma.size(); ++j)
        if (gamma[j]) m |= std::size_t{1} << j;
    return m;
}

std::vector<bool> gamma_of(std::size_t mask, std::size_t k) {
    std::vector<bool> g(k);
    for (std::size_t j = 0; j < k; ++j) g[j] = (mask >> j) & 1u;
    return g;
}

void check_selection_inputs(const RegressionData& data, double alpha) {
    if (!(alpha > 0.5)) throw ConfigError("variable selection needs alpha > 1/2 for a proper posterior");
    if (data.X.rows() != data.y.size() || data.p() < 1) throw DataError("design and response do not match");
    if (data.p() - 1 > 20) throw ConfigError("variable selection supports at most 20 candidate variables");
}

}  // namespace

std::size_t ModelWeights::argmax() const {
    return static_cast<std::size_t>(std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

double log_model_weight(const RegressionData& data, const std::vector<bool>& gamma, double alpha) {
    check_selection_inputs(data, alpha);
    const auto k = static_cast<std::size_t>(data.p() - 1);
    if (gamma.size() != k) throw ConfigError("model indicator has wrong length");
    std::vector<Eigen::Index> cols{0};
    for (std::size_t j = 0; j < k; ++j)
        if (gamma[j]) cols.push_back(static_cast<Eigen::Index>(j + 1));
    MatrixXd xg(data.n(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) xg.col(static_cast<Eigen::Index>(j)) = data.X.col(cols[j]);
    // y'P y from the column-pivoted QR, robust to duplicated columns
    Eigen::ColPivHouseholderQR<MatrixXd> qr(xg);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    const VectorXd qty = qr.householderQ().transpose() * data.y;
    const double fitted = qty.head(rank).squaredNorm();
    const double yty = data.y.squaredNorm();
    const SeriesTerm term{alpha, static_cast<double>(cols.size()), static_cast<double>(data.n()), yty,
                          std::min(fitted, yty)};
    return sum_series(term).log_value;
}

ModelWeights enumerate_models(const RegressionData& data, double alpha) {
    check_selection_inputs(data, alpha);
    const auto k = static_cast<std::size_t>(data.p() - 1);
    ModelWeights out;
    for (std::size_t m = 0; m < (std::size_t{1} << k); ++m) {
        out.models.push_back(gamma_of(m, k));
        out.probabilities.push_back(log_model_weight(data, out.models.back(), alpha));
    }
    normalize_log_weights(out.probabilities);
    return out;
}

VariableSelectionTrace variable_selection_gibbs(const RegressionData& data, double alpha, Stream& rng,
                                                std::size_t iterations, std::size_t burnin) {
    check_selection_inputs(data, alpha);
    const auto k = static_cast<std::size_t>(data.p() - 1);
    std::unordered_map<std::size_t, double> cache;
    auto weight = [&](const std::vector<bool>& g) {
        const auto key = mask_of(g);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, log_model_weight(data, g, alpha)).first;
        return it->second;
    };
    std::vector<bool> gamma(k, false);
    VariableSelectionTrace out;
    std::vector<double> counts(std::size_t{1} << k, 0.0);
    for (std::size_t it = 0; it < burnin + iterations; ++it) {
        for (std::size_t j = 0; j < k; ++j) {
            gamma[j] = false;
            const double l0 = weight(gamma);
            gamma[j] = true;
            const double l1 = weight(gamma);
            const double p1 = 1.0 / (1.0 + std::exp(l0 - l1));
            gamma[j] = rng.uniform() < p1;
        }
        if (it >= burnin) {
            out.draws.push_back(gamma);
            counts[mask_of(gamma)] += 1.0;
        }
    }
    for (std::size_t m = 0; m < counts.size(); ++m) {
        out.frequencies.models.push_back(gamma_of(m, k));
        out.frequencies.probabilities.push_back(counts[m] / static_cast<double>(iterations));
    }
    return out;
}

// ------------------------------------------------------- joint from conditionals

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const std::size_t m = grid.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = grid[i + 1] - grid[i];
        if (!(h > 0.0)) throw ConfigError("grid must be strictly increasing");
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

JointReconstruction joint_from_conditionals_2var(const std::function<double(double, double)>& g1_given2,
                                                 const std::function<double(double, double)>& g2_given1,
                                                 const std::vector<double>& grid1,
                                                 const std::vector<double>& grid2) {
    if (grid1.size() < 3 || grid2.size() < 3) throw ConfigError("grids need at least three points");
    const auto n1 = static_cast<Eigen::Index>(grid1.size()), n2 = static_cast<Eigen::Index>(grid2.size());
    const auto w1 = trapezoid_weights(grid1), w2 = trapezoid_weights(grid2);
    MatrixXd c1(n1, n2), c2(n1, n2);  // g1(y1_i | y2_j), g2(y2_j | y1_i)
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j) {
            c1(i, j) = g1_given2(grid1[i], grid2[j]);
            c2(i, j) = g2_given1(grid2[j], grid1[i]);
            if (!(c1(i, j) > 0.0) || !(c2(i, j) > 0.0) || !std::isfinite(c1(i, j)) || !std::isfinite(c2(i, j)))
                throw ConfigError("conditionals must be positive and finite on the grid");
        }

    JointReconstruction out{true, "", MatrixXd(n1, n2), 0.0};
    double worst_edge = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i) {
        double integral = 0.0;
        for (Eigen::Index j = 0; j < n2; ++j) integral += w2[j] * c2(i, j) / c1(i, j);
        const double edge = (w2[0] * c2(i, 0) / c1(i, 0) + w2[n2 - 1] * c2(i, n2 - 1) / c1(i, n2 - 1)) / integral;
        worst_edge = std::max(worst_edge, edge);
        out.density.row(i) = c2.row(i) / integral;
    }
    double z = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j) z += w1[i] * w2[j] * out.density(i, j);
    out.density /= z;

    // conditionals of the reconstruction against the inputs, both normalized on the grid
    for (Eigen::Index j = 0; j < n2; ++j) {
        double zr = 0.0, zi = 0.0;
        for (Eigen::Index i = 0; i < n1; ++i) {
            zr += w1[i] * out.density(i, j);
            zi += w1[i] * c1(i, j);
        }
        for (Eigen::Index i = 0; i < n1; ++i)
            out.max_conditional_error = std::max(out.max_conditional_error, std::abs(out.density(i, j) / zr - c1(i, j) / zi));
    }
    for (Eigen::Index i = 0; i < n1; ++i) {
        double zr = 0.0, zi = 0.0;
        for (Eigen::Index j = 0; j < n2; ++j) {
            zr += w2[j] * out.density(i, j);
            zi += w2[j] * c2(i, j);
        }
        for (Eigen::Index j = 0; j < n2; ++j)
            out.max_conditional_error = std::max(out.max_conditional_error, std::abs(out.density(i, j) / zr - c2(i, j) / zi));
    }
    if (worst_edge > 1e-3) {
        out.compatible = false;
        out.reason = "ratio g2/g1 is not integrable: grid edges carry " + std::to_string(worst_edge) + " of the mass";
    } else if (out.max_conditional_error > 1e-3) {
        out.compatible = false;
        out.reason = "reconstructed conditionals differ from the inputs by " + std::to_string(out.max_conditional_error);
    }
    return out;
}

// ------------------------------------------------------------------- two disks

namespace {

struct Chord {
    double lo, hi;
};

// Chords cut on each disk by the line {across = t}; centres are (along, across) pairs.
std::vector<Chord> chords(double t, const std::vector<std::pair<double, double>>& centres, double r) {
    std::vector<Chord> out;
    for (auto [along, across] : centres) {
        const double h = r * r - (t - across) * (t - across);
        if (h >= 0.0) out.push_back({along - std::sqrt(h), along + std::sqrt(h)});
    }
    return out;
}

double uniform_on(const std::vector<Chord>& cs, Stream& rng) {
    double total = 0.0;
    for (const auto& c : cs) total += c.hi - c.lo;
    if (cs.empty()) throw NumericalError("two-disk Gibbs left the support");
    double u = rng.uniform() * total;
    for (const auto& c : cs) {
        const double len = c.hi - c.lo;
        if (u <= len) return c.lo + u;
        u -= len;
    }
    return cs.back().hi;
}

}  // namespace

TwoDiskRun two_disk_gibbs_demo(DiskParameterization param, const Eigen::Vector2d& start, Stream& rng,
                               std::size_t sweeps) {
    auto in_disk = [](const Eigen::Vector2d& x, double s) { return (x.array() - s).square().sum() <= 1.0; };
    if (!in_disk(start, 1.0) && !in_disk(start, -1.0)) throw ConfigError("start lies outside both disks");
    TwoDiskRun out{Eigen::MatrixXd(static_cast<Eigen::Index>(sweeps), 2), false, 0.0};
    bool upper = false, lower = false;
    double x1 = start(0), x2 = start(1);
    // rotated coordinates: y1 = x1 + x2, y2 = x2 - x1, disks centred at (+-2, 0) with radius sqrt 2
    double y1 = x1 + x2, y2 = x2 - x1;
    for (std::size_t s = 0; s < sweeps; ++s) {
        if (param == DiskParameterization::raw) {
            x1 = uniform_on(chords(x2, {{1.0, 1.0}, {-1.0, -1.0}}, 1.0), rng);
            x2 = uniform_on(chords(x1, {{1.0, 1.0}, {-1.0, -1.0}}, 1.0), rng);
        } else {
            y1 = uniform_on(chords(y2, {{2.0, 0.0}, {-2.0, 0.0}}, std::numbers::sqrt2), rng);
            y2 = uniform_on(chords(y1, {{0.0, 2.0}, {0.0, -2.0}}, std::numbers::sqrt2), rng);
            x1 = 0.5 * (y1 - y2);
            x2 = 0.5 * (y1 + y2);
        }
        out.trace(static_cast<Eigen::Index>(s), 0) = x1;
        out.trace(static_cast<Eigen::Index>(s), 1) = x2;
        const bool in_upper = x1 + x2 > 0.0;
        (in_upper ? upper : lower) = true;
        out.upper_disk_share += in_upper;
    }
    out.crossed = upper && lower;
    if (sweeps > 0) out.upper_disk_share /= static_cast<double>(sweeps);
    return out;
}

}  // namespace bayescomp
