#include "bayescomp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p) - std::log1p(-p); }
double logistic(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

// ------------------------------------------------------------------ TargetDensity

TargetDensity TargetDensity::unbounded(Eigen::Index dim, LogDensity f) {
    return {std::move(f), Eigen::VectorXd::Constant(dim, -kInf), Eigen::VectorXd::Constant(dim, kInf)};
}

TargetDensity TargetDensity::box(Eigen::VectorXd lower, Eigen::VectorXd upper, LogDensity f) {
    if (lower.size() != upper.size() || (lower.array() >= upper.array()).any())
        throw ConfigError("target box: lower bounds must lie below upper bounds");
    return {std::move(f), std::move(lower), std::move(upper)};
}

TargetDensity TargetDensity::scalar(std::function<double(double)> f, double lower, double upper) {
    return box(vec1(lower), vec1(upper), [f = std::move(f)](const Eigen::VectorXd& x) { return f(x(0)); });
}

TargetDensity TargetDensity::from_family(const ScalarFamily& fam) {
    if (fam.discrete()) throw UnsupportedError("target densities are continuous");
    const Interval s = fam.support();
    return scalar([fam](double x) { return fam.in_support(x) ? logpdf(fam, x) : -kInf; }, s.lower, s.upper);
}

bool TargetDensity::contains(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
    }
    return true;
}

double TargetDensity::operator()(const Eigen::VectorXd& x) const {
    if (!contains(x)) return -kInf;
    return log_density(x);
}

double TargetDensity::at(double x) const { return (*this)(vec1(x)); }

std::vector<double> ChainTrace::component(Eigen::Index j, bool after_burnin) const {
    const std::size_t start = after_burnin ? std::min(burnin, size()) : 0;
    std::vector<double> out;
    out.reserve(size() - start);
    for (std::size_t t = start; t < size(); ++t) out.push_back(draws(static_cast<Eigen::Index>(t), j));
    return out;
}

void write_trace_csv(const ChainTrace& trace, std::ostream& out) {
    out << "iter";
    for (Eigen::Index j = 0; j < trace.draws.cols(); ++j) out << ",dim_" << j;
    out << ",accepted\n";
    out.precision(17);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        out << t;
        for (Eigen::Index j = 0; j < trace.draws.cols(); ++j) out << ',' << trace.draws(static_cast<Eigen::Index>(t), j);
        out << ',' << static_cast<int>(trace.accepted[t]) << '\n';
    }
}

// ------------------------------------------------------------------ accept-reject

double AcceptRejectResult::mean_trials() const {
    if (trials.empty()) return 0.0;
    double s = 0.0;
    for (auto t : trials) s += static_cast<double>(t);
    return s / static_cast<double>(trials.size());
}

AcceptRejectResult accept_reject(const TargetDensity& target, const ScalarFamily& proposal, double log_bound,
                                 Stream& rng, std::size_t n, std::size_t max_trials) {
    if (target.dim() != 1) throw ConfigError("accept-reject: scalar targets only");
    if (n == 0) throw ConfigError("accept-reject: n must be at least 1");
    const double lo = std::max(target.lower(0), quantile(proposal, 1e-6));
    const double hi = std::min(target.upper(0), quantile(proposal, 1.0 - 1e-6));
    constexpr int kProbe = 1000;
    for (int i = 0; i < kProbe; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / kProbe;
        const double lt = target.at(x);
        if (lt == -kInf) continue;
        const double env = log_bound + logpdf(proposal, x);
        if (!(lt <= env + 1e-12 * std::max(1.0, std::abs(env))))
            throw EnvelopeError("accept-reject: target exceeds the envelope at x=" + std::to_string(x), x);
    }
    AcceptRejectResult out;
    out.draws.reserve(n);
    out.trials.reserve(n);
    while (out.draws.size() < n) {
        std::size_t tries = 0;
        for (;;) {
            ++tries;
            const double y = draw(proposal, rng);
            const double lu = std::log(rng.uniform());
            if (!proposal.in_support(y)) continue;
            if (lu <= target.at(y) - log_bound - logpdf(proposal, y)) {
                out.draws.push_back(y);
                break;
            }
            if (tries >= max_trials)
                throw NumericalError("accept-reject: no acceptance in " + std::to_string(max_trials) + " proposals");
        }
        out.trials.push_back(tries);
    }
    return out;
}

// ------------------------------------------------------------------ importance sampling

Sampler Sampler::from_family(const ScalarFamily& fam) {
    return {TargetDensity::from_family(fam), [fam](Stream& rng) { return vec1(bayescomp::draw(fam, rng)); }};
}

ImportanceResult importance_estimate(const std::function<double(const Eigen::VectorXd&)>& h,
                                     const TargetDensity& target, const Sampler& proposal, Stream& rng,
                                     std::size_t n) {
    if (n == 0) throw ConfigError("importance sampling: n must be at least 1");
    if (target.dim() != proposal.density.dim()) throw ConfigError("importance sampling: dimension mismatch");
    if ((proposal.density.lower.array() > target.lower.array()).any() ||
        (proposal.density.upper.array() < target.upper.array()).any())
        throw ConfigError("importance sampling: proposal support does not cover the target support");

    std::vector<double> lw(n), hv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd x = proposal.draw(rng);
        lw[i] = target(x) - proposal.density(x);
        hv[i] = std::isfinite(lw[i]) ? h(x) : 0.0;
    }
    std::vector<double> finite;
    for (double v : lw)
        if (std::isfinite(v)) finite.push_back(v);
    std::vector<double> w = lw;
    normalize_log_weights(w);  // throws when every weight is zero

    ImportanceResult r{};
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.estimate += w[i] * hv[i];
        ss += w[i] * w[i];
        r.max_weight_share = std::max(r.max_weight_share, w[i]);
    }
    r.effective_sample_size = 1.0 / ss;
    r.unstable = r.max_weight_share > kUnstableWeightShare;
    if (finite.size() > 1) {
        double m = 0.0;
        for (double v : finite) m += v;
        m /= static_cast<double>(finite.size());
        double v2 = 0.0;
        for (double v : finite) v2 += (v - m) * (v - m);
        r.log_weight_sd = std::sqrt(v2 / static_cast<double>(finite.size() - 1));
    }
    return r;
}

// ------------------------------------------------------------------ bridge sampling

double bridge_bayes_factor(const LogDensity& log_pi1, const LogDensity& log_pi2,
                           std::span<const Eigen::VectorXd> draws1, std::span<const Eigen::VectorXd> draws2,
                           const LogDensity& log_alpha) {
    if (draws1.empty() || draws2.empty()) throw ConfigError("bridge sampling: empty draw set");
    std::vector<double> num, den;
    num.reserve(draws2.size());
    den.reserve(draws1.size());
    for (const auto& t : draws2) num.push_back(log_pi1(t) + log_alpha(t));
    for (const auto& t : draws1) den.push_back(log_pi2(t) + log_alpha(t));
    const double ld = log_sum_exp(den);
    if (!std::isfinite(ld)) throw NumericalError("bridge sampling: zero denominator");
    const double n1 = static_cast<double>(draws1.size()), n2 = static_cast<double>(draws2.size());
    return std::exp((log_sum_exp(num) - ld) + (std::log(n1) - std::log(n2)));
}

// ------------------------------------------------------------------ two-sample Bayes factor

TwoSampleBfTrace bayes_factor_two_sample_mean(int n, double xbar, double ybar, double s2, std::size_t draws,
                                              BfMethod method, Stream& rng) {
    if (n < 2) throw ConfigError("two-sample Bayes factor: n must be at least 2");
    if (!(s2 > 0.0)) throw ConfigError("two-sample Bayes factor: S^2 must be positive");
    if (draws == 0) throw ConfigError("two-sample Bayes factor: N must be at least 1");
    const double power = -static_cast<double>(n) + 0.5;
    TwoSampleBfTrace tr{};
    tr.df = 2.0 * n - 2.0;
    tr.location = 0.5 * (ybar - xbar);
    tr.scale2 = 0.5 * s2 / tr.df;
    const double sigma = std::sqrt(tr.scale2);
    tr.log_constant = std::log(s2) * power + std::log(sigma * std::sqrt(tr.df * std::numbers::pi)) +
                      std::lgamma(0.5 * tr.df) - std::lgamma(0.5 * tr.df + 0.5);
    const double log_num = power * std::log(0.5 * (xbar - ybar) * (xbar - ybar) + s2);

    tr.running.resize(draws);
    double lacc = -kInf;
    const double half_df = tr.df / 2.0;
    for (std::size_t k = 0; k < draws; ++k) {
        double term;
        if (method == BfMethod::t_sim) {
            const double t = std_normal(rng) / std::sqrt(gamma_unit(rng, half_df) / half_df);
            const double xi = tr.location + sigma * t;
            term = -kLogSqrt2Pi - 0.5 * xi * xi;
        } else {
            const double xi = std_normal(rng);
            const double d = 2.0 * xi + xbar - ybar;
            term = power * std::log(s2 + 0.5 * d * d);
        }
        lacc = log_add_exp(lacc, term);
        const double log_mean = lacc - std::log(static_cast<double>(k + 1));
        tr.running[k] = method == BfMethod::t_sim ? std::exp(log_num - log_mean - tr.log_constant)
                                                  : std::exp(log_num - log_mean);
    }
    return tr;
}

// ------------------------------------------------------------------ slice sampler

namespace {

struct Segment {
    double lo, hi;
};

double bisect_crossing(const std::function<double(double)>& g, double u, double below, double above) {
    // g(below) < u <= g(above)
    for (int it = 0; it < 200 && std::abs(above - below) > 1e-10; ++it) {
        const double mid = 0.5 * (below + above);
        (g(mid) >= u ? above : below) = mid;
    }
    return above;
}

std::vector<Segment> level_segments(const SliceTarget& t, const std::vector<double>& grid,
                                    const std::vector<double>& gv, double u, double x) {
    std::vector<Segment> segs;
    const std::size_t m = grid.size();
    std::size_t i = 0;
    while (i < m) {
        if (gv[i] < u) {
            ++i;
            continue;
        }
        const double lo = i == 0 ? grid[0] : bisect_crossing(t.density, u, grid[i - 1], grid[i]);
        std::size_t j = i;
        while (j + 1 < m && gv[j + 1] >= u) ++j;
        const double hi = j + 1 == m ? grid[m - 1] : bisect_crossing(t.density, u, grid[j + 1], grid[j]);
        segs.push_back({lo, hi});
        i = j + 1;
    }
    const bool covered = std::any_of(segs.begin(), segs.end(), [&](const Segment& s) { return x >= s.lo && x <= s.hi; });
    if (!covered) {
        // x sits in a component narrower than the grid: walk out from it
        const double step = (grid[1] - grid[0]) / 64.0;
        double l = x, r = x;
        while (l - step > t.domain.lower && t.density(l - step) >= u) l -= step;
        while (r + step < t.domain.upper && t.density(r + step) >= u) r += step;
        const double lo = l - step > t.domain.lower ? bisect_crossing(t.density, u, l - step, l) : t.domain.lower;
        const double hi = r + step < t.domain.upper ? bisect_crossing(t.density, u, r + step, r) : t.domain.upper;
        segs.push_back({lo, hi});
        std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
        std::vector<Segment> merged;
        for (const auto& s : segs) {
            if (!merged.empty() && s.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, s.hi);
            else merged.push_back(s);
        }
        segs = std::move(merged);
    }
    return segs;
}

}  // namespace

std::vector<double> slice_sampler(const SliceTarget& target, double start, Stream& rng, std::size_t n,
                                  std::size_t grid_size) {
    const Interval d = target.domain;
    if (!(std::isfinite(d.lower) && std::isfinite(d.upper) && d.lower < d.upper))
        throw ConfigError("slice sampler: domain must be a bounded interval");
    if (!(start >= d.lower && start <= d.upper) || !(target.density(start) > 0.0))
        throw ConfigError("slice sampler: start must have positive density");
    if (grid_size < 2) throw ConfigError("slice sampler: grid needs at least two points");

    auto make_grid = [&](std::size_t m, std::vector<double>& pts, std::vector<double>& vals) {
        pts.resize(m);
        vals.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            pts[i] = d.lower + (d.upper - d.lower) * static_cast<double>(i) / static_cast<double>(m - 1);
            vals[i] = target.density(pts[i]);
        }
    };
    std::vector<double> grid, gv, fine, fv;
    if (!target.level_set) make_grid(grid_size, grid, gv);

    std::vector<double> out(n);
    double x = start;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform() * target.density(x);
        if (target.level_set) {
            Interval s = target.level_set(u);
            s.lower = std::max(s.lower, d.lower);
            s.upper = std::min(s.upper, d.upper);
            if (!(s.upper > s.lower)) throw NumericalError("slice sampler: empty level set");
            x = s.lower + (s.upper - s.lower) * rng.uniform();
        } else {
            auto segs = level_segments(target, grid, gv, u, x);
            double total = 0.0;
            for (const auto& s : segs) total += s.hi - s.lo;
            if (!(total > 0.0)) {
                if (fine.empty()) make_grid(10 * grid_size, fine, fv);
                segs = level_segments(target, fine, fv, u, x);
                total = 0.0;
                for (const auto& s : segs) total += s.hi - s.lo;
                if (!(total > 0.0)) throw NumericalError("slice sampler: level set has zero length");
            }
            double v = rng.uniform() * total;
            for (const auto& s : segs) {
                const double len = s.hi - s.lo;
                if (v <= len) {
                    x = s.lo + v;
                    break;
                }
                v -= len;
            }
        }
        out[k] = x;
    }
    return out;
}

// ------------------------------------------------------------------ MH kernels

double proposal_log_ratio(const Proposal& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    switch (p.kind) {
        case ProposalKind::random_walk:
            return 0.0;
        case ProposalKind::independence:
            return logpdf(*p.family, x(0)) - logpdf(*p.family, y(0));
        case ProposalKind::logit_random_walk: {
            double r = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i)
                r += std::log(y(i)) + std::log1p(-y(i)) - std::log(x(i)) - std::log1p(-x(i));
            return r;
        }
        case ProposalKind::lognormal_scale: {
            double r = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) r += std::log(y(i)) - std::log(x(i));
            return r;
        }
    }
    return 0.0;
}

KernelStep mh_kernel(const TargetDensity& target, const Proposal& p, const Eigen::VectorXd& x, Stream& rng) {
    if (!target.contains(x)) throw ConfigError("mh kernel: current state outside the target domain");
    Eigen::VectorXd y(x.size());
    switch (p.kind) {
        case ProposalKind::random_walk:
            for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = x(i) + p.scale * std_normal(rng);
            break;
        case ProposalKind::independence:
            if (!p.family || x.size() != 1) throw ConfigError("independence proposal needs a scalar family");
            y(0) = draw(*p.family, rng);
            if (!p.family->in_support(x(0))) throw ConfigError("independence proposal: state outside support");
            if (!p.family->in_support(y(0))) return {x, false};
            break;
        case ProposalKind::logit_random_walk:
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (!(x(i) > 0.0 && x(i) < 1.0)) throw ConfigError("logit walk: state must lie in (0,1)");
                y(i) = logistic(logit(x(i)) + p.scale * std_normal(rng));
            }
            break;
        case ProposalKind::lognormal_scale:
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (!(x(i) > 0.0)) throw ConfigError("lognormal proposal: state must be positive");
                y(i) = x(i) * std::exp(p.scale * std_normal(rng));
            }
            break;
    }
    const double lu = std::log(rng.uniform());
    const double ly = target(y);
    if (!(ly > -kInf)) return {x, false};
    const double ratio = ly - target(x) + proposal_log_ratio(p, x, y);
    if (lu < ratio) return {y, true};
    return {x, false};
}

ChainTrace run_mh(const TargetDensity& target, const Proposal& proposal, Eigen::VectorXd start, Stream& rng,
                  std::size_t iterations, std::size_t burnin) {
    ChainTrace tr;
    tr.seed = rng.seed();
    tr.burnin = burnin;
    tr.draws.resize(static_cast<Eigen::Index>(iterations), start.size());
    tr.accepted.resize(iterations);
    Eigen::VectorXd x = std::move(start);
    for (std::size_t t = 0; t < iterations; ++t) {
        auto step = mh_kernel(target, proposal, x, rng);
        x = std::move(step.state);
        tr.draws.row(static_cast<Eigen::Index>(t)) = x.transpose();
        tr.accepted[t] = step.accepted ? 1 : 0;
    }
    return tr;
}

double mh_acceptance(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx) {
    const double r = (log_pi_y + log_q_yx) - (log_pi_x + log_q_xy);
    if (std::isnan(r)) throw NumericalError("mh acceptance: undefined ratio");
    return r >= 0.0 ? 1.0 : std::exp(r);
}

double boltzmann_acceptance(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx) {
    const double a = log_pi_y + log_q_yx;
    const double b = log_pi_x + log_q_xy;
    if (a == -kInf && b == -kInf) throw NumericalError("Boltzmann acceptance: both flows are zero");
    // a - log(e^a + e^b), stable for |a|, |b| up to the double range
    return std::exp(a - log_add_exp(a, b));
}

double boltzmann_log_flow(double log_pi_x, double log_pi_y, double log_q_xy, double log_q_yx) {
    const double a = log_pi_y + log_q_yx;
    const double b = log_pi_x + log_q_xy;
    if (a == -kInf && b == -kInf) throw NumericalError("Boltzmann acceptance: both flows are zero");
    const double hi = std::max(a, b), lo = std::min(a, b);
    return (hi + lo) - log_add_exp(hi, lo);
}

// ------------------------------------------------------------------ tempering

void TemperingLadder::validate() const {
    if (powers.empty()) throw ConfigError("tempering ladder: no powers");
    if (kernels_per_rung == 0) throw ConfigError("tempering ladder: kernel budget must be positive");
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!(powers[i] > 0.0 && powers[i] <= 1.0)) throw ConfigError("tempering ladder: powers must lie in (0,1]");
        if (i > 0 && !(powers[i] < powers[i - 1]))
            throw ConfigError("tempering ladder: powers must be strictly decreasing");
    }
}

std::vector<double> pump_schedule(const TemperingLadder& ladder) {
    ladder.validate();
    std::vector<double> s;
    for (double a : ladder.powers)
        for (std::size_t k = 0; k < ladder.kernels_per_rung; ++k) s.push_back(a);
    const std::size_t half = s.size();
    for (std::size_t i = half; i-- > 0;) s.push_back(s[i]);
    return s;
}

double pump_log_acceptance(const std::vector<double>& schedule, std::span<const double> path) {
    if (path.size() != schedule.size() + 1) throw ConfigError("pump: path length must be schedule length + 1");
    double r = path.back() - path.front();
    for (std::size_t i = 0; i < schedule.size(); ++i) r += schedule[i] * (path[i] - path[i + 1]);
    return r;
}

KernelStep tempering_pump(const TargetDensity& target, const TemperingLadder& ladder, const TemperedKernel& kernel,
                          const Eigen::VectorXd& state, Stream& rng) {
    const auto schedule = pump_schedule(ladder);
    std::vector<double> path;
    path.reserve(schedule.size() + 1);
    path.push_back(target(state));
    Eigen::VectorXd x = state;
    for (double a : schedule) {
        x = kernel(x, a, rng);
        path.push_back(target(x));
    }
    const double la = pump_log_acceptance(schedule, path);
    if (std::log(rng.uniform()) < la) return {x, true};
    return {state, false};
}

TemperedKernel tempered_random_walk(const TargetDensity& target, double scale) {
    if (!(scale > 0.0)) throw ConfigError("random walk scale must be positive");
    return [target, scale](const Eigen::VectorXd& x, double power, Stream& rng) {
        const double step = scale / std::sqrt(power);
        Eigen::VectorXd y(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = x(i) + step * std_normal(rng);
        const double lu = std::log(rng.uniform());
        const double ly = target(y);
        if (ly == -kInf) return Eigen::VectorXd(x);
        return lu < power * (ly - target(x)) ? y : Eigen::VectorXd(x);
    };
}

TargetDensity annealed_target(const TargetDensity& target, int gamma) {
    if (gamma < 1) throw ConfigError("annealing power must be a positive integer");
    TargetDensity out = target;
    const double g = gamma;
    out.log_density = [f = target.log_density, g](const Eigen::VectorXd& x) { return g * f(x); };
    return out;
}

// ------------------------------------------------------------------ diagnostics

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (n == 0) throw ConfigError("autocorrelation: empty series");
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) return {};
    std::vector<double> acf(std::min(max_lag, n - 1) + 1);
    for (std::size_t k = 0; k < acf.size(); ++k) {
        double c = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - m) * (x[t + k] - m);
        acf[k] = c / c0;
    }
    return acf;
}

std::vector<double> cumulated_average(std::span<const double> x) {
    std::vector<double> out(x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i];
        out[i] = s / static_cast<double>(i + 1);
    }
    return out;
}

Diagnostics diagnostics(const ChainTrace& trace, std::size_t max_lag, Eigen::Index component) {
    if (trace.size() == 0) throw ConfigError("diagnostics: empty trace");
    Diagnostics d{};
    std::size_t acc = 0;
    for (auto a : trace.accepted) acc += a;
    d.acceptance_rate = static_cast<double>(acc) / static_cast<double>(trace.size());
    const auto x = trace.component(component, true);
    if (x.empty()) throw ConfigError("diagnostics: burn-in covers the whole trace");
    d.acf = autocorrelation(x, max_lag);
    d.degenerate = d.acf.empty();
    return d;
}

ReplicationBand replication_band(const std::vector<std::vector<double>>& runs) {
    if (runs.empty()) throw ConfigError("replication band: no runs");
    const std::size_t len = runs.front().size();
    ReplicationBand b{std::vector<double>(len, kInf), std::vector<double>(len, -kInf)};
    for (const auto& r : runs) {
        if (r.size() != len) throw ConfigError("replication band: runs differ in length");
        const auto avg = cumulated_average(r);
        for (std::size_t t = 0; t < len; ++t) {
            b.lower[t] = std::min(b.lower[t], avg[t]);
            b.upper[t] = std::max(b.upper[t], avg[t]);
        }
    }
    return b;
}

bool ReplicationBand::excludes(double truth, std::size_t first_prefix) const {
    for (std::size_t t = first_prefix == 0 ? 0 : first_prefix - 1; t < lower.size(); ++t) {
        if (truth < lower[t] || truth > upper[t]) return true;
    }
    return false;
}

}  // namespace bayescomp
