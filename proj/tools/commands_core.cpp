#include <cmath>
#include <numeric>

#include "bayescomp/conjugate.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/numeric.hpp"
#include "bayescomp/sampling.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

template <class F>
Json guarded(F&& f) {
    try {
        return number(f());
    } catch (const std::domain_error&) {
        return nullptr;
    }
}

Json family_json(const ScalarFamily& fam) {
    Json j;
    j["name"] = std::string(family_name(fam.family()));
    j["params"] = std::vector<double>(fam.params().begin(), fam.params().end());
    return j;
}

double tail_sd(const std::vector<double>& r) {
    const std::size_t len = std::max<std::size_t>(r.size() / 10, 1);
    const std::span<const double> tail(r.data() + r.size() - len, len);
    const double m = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(len);
    double s = 0.0;
    for (double v : tail) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(len));
}

Json sample_summary(const ScalarFamily& target, const std::vector<double>& draws) {
    const auto ms = mean_se(draws);
    double ss = 0.0;
    for (double v : draws) ss += (v - ms.mean) * (v - ms.mean);
    Json j;
    j["n"] = draws.size();
    j["mean"] = number(ms.mean);
    j["sd"] = number(std::sqrt(ss / static_cast<double>(draws.size())));
    if (!target.discrete())
        j["ks_p_value"] = number(ks_test(draws, [&](double x) { return cdf(target, x); }).p_value);
    return j;
}

Table draws_table(const std::vector<double>& draws) {
    Table t{{"draw"}, {}};
    for (double v : draws) t.rows.push_back({v});
    return t;
}

}  // namespace

void register_core(CLI::App& app, Context& ctx) {
    // ------------------------------------------------------------ dist
    {
        struct Opts {
            std::string family;
            std::vector<double> params, at, probs;
            std::size_t draws = 0;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("dist", "Densities, distribution functions, quantiles and draws");
        cmd->add_option("--family", o->family, "normal, gamma, inverse-gamma, beta, student-t, cauchy, poisson, binomial, exponential, weibull-power, lognormal")->required();
        cmd->add_option("--param", o->params, "Family parameters")->delimiter(',')->required();
        cmd->add_option("--at", o->at, "Evaluation points")->delimiter(',');
        cmd->add_option("--quantile", o->probs, "Probabilities")->delimiter(',');
        cmd->add_option("--draws", o->draws, "Number of random draws");
        cmd->callback([&ctx, o] {
            ctx.action = Action{"dist", [&ctx, o] {
                const ScalarFamily fam(bayescomp::parse_family(o->family), o->params);
                Output out;
                Json& r = out.result;
                r["family"] = family_json(fam);
                r["mean"] = guarded([&] { return mean(fam); });
                r["variance"] = guarded([&] { return variance(fam); });
                const auto sup = fam.support();
                r["support"] = {number(sup.lower), number(sup.upper)};
                r["points"] = Json::array();
                for (double x : o->at)
                    r["points"].push_back({{"x", x},
                                           {"logpdf", guarded([&] { return logpdf(fam, x); })},
                                           {"cdf", guarded([&] { return cdf(fam, x); })}});
                r["quantiles"] = Json::array();
                for (double p : o->probs)
                    r["quantiles"].push_back({{"p", p}, {"x", guarded([&] { return quantile(fam, p); })}});
                if (o->draws > 0) {
                    auto rng = ctx.common.stream("dist");
                    const auto d = sample(fam, rng, o->draws);
                    r["draws"] = sample_summary(fam, d);
                    out.table = draws_table(d);
                }
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ conjugate
    {
        auto* cmd = app.add_subcommand("conjugate", "Conjugate posterior updates");
        cmd->require_subcommand(1);

        struct Nig {
            std::string data, column = "x";
            double xi = 0.0, lambda_mu = 1.0, lambda_sigma = 1.0, alpha = 1.0;
        };
        auto n = std::make_shared<Nig>();
        auto* nig = cmd->add_subcommand("nig", "Normal observations, normal-inverse-gamma prior");
        nig->add_option("--data", n->data, "CSV file")->required();
        nig->add_option("--column", n->column, "Column name");
        nig->add_option("--xi", n->xi, "Prior mean of mu");
        nig->add_option("--lambda-mu", n->lambda_mu, "Prior count on mu");
        nig->add_option("--lambda-sigma", n->lambda_sigma, "Inverse gamma shape");
        nig->add_option("--alpha", n->alpha, "Inverse gamma scale");
        nig->callback([&ctx, n] {
            ctx.action = Action{"conjugate nig", [n] {
                const auto x = read_csv(n->data).column(n->column);
                const auto post = normal_nig_posterior({n->xi, n->lambda_mu, n->lambda_sigma, n->alpha}, x);
                Output out;
                Json& r = out.result;
                r["n"] = post.n;
                r["xi"] = post.xi_d;
                r["lambda_mu"] = post.lambda_mu_d;
                r["lambda_sigma"] = post.lambda_sigma_d;
                r["alpha"] = post.alpha_d;
                const auto mu = post.mean_marginal();
                const auto s2 = post.variance_marginal();
                r["mean_marginal"] = family_json(mu);
                r["variance_marginal"] = family_json(s2);
                r["posterior_mean_mu"] = guarded([&] { return mean(mu); });
                r["posterior_mean_sigma2"] = guarded([&] { return mean(s2); });
                return out;
            }};
        });

        struct Exp {
            std::string family, data, column = "x";
            std::vector<double> xi;
            double lambda = 1.0;
            int trials = 10;
        };
        auto e = std::make_shared<Exp>();
        auto* ex = cmd->add_subcommand("expfam", "Exponential-family conjugate hyperparameter update");
        ex->add_option("--family", e->family, "normal-known-var, binomial, geometric, poisson, exponential")->required();
        ex->add_option("--data", e->data, "CSV file")->required();
        ex->add_option("--column", e->column, "Column name");
        ex->add_option("--xi", e->xi, "Prior xi")->delimiter(',')->required();
        ex->add_option("--lambda", e->lambda, "Prior lambda");
        ex->add_option("--trials", e->trials, "Binomial trials");
        ex->callback([&ctx, e] {
            ctx.action = Action{"conjugate expfam", [e] {
                const auto fam = builtin_expfam(e->family, e->trials);
                const auto x = read_csv(e->data).column(e->column);
                Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(e->xi.data(), static_cast<Eigen::Index>(e->xi.size()));
                const auto post = conjugate_update({xi, e->lambda}, fam, x);
                Output out;
                out.result["family"] = fam.name;
                out.result["n"] = x.size();
                out.result["xi"] = to_json(post.xi);
                out.result["lambda"] = post.lambda;
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ mc
    {
        auto* cmd = app.add_subcommand("mc", "Monte Carlo methods");
        cmd->require_subcommand(1);

        struct Bf {
            int n = 100;
            double xbar = 0.0, ybar = 0.0, s2 = 1.0;
            std::size_t draws = 1'000'000;
        };
        auto b = std::make_shared<Bf>();
        auto* bf = cmd->add_subcommand("two-sample-bf", "Two-sample mean Bayes factor by normal and Student simulation");
        bf->add_option("--n", b->n, "Size of each sample")->required();
        bf->add_option("--xbar", b->xbar, "First sample mean")->required();
        bf->add_option("--ybar", b->ybar, "Second sample mean")->required();
        bf->add_option("--s2", b->s2, "Pooled sum of squares")->required();
        bf->add_option("--N", b->draws, "Simulation size");
        bf->callback([&ctx, b] {
            ctx.action = Action{"mc two-sample-bf", [&ctx, b] {
                if (b->draws < 10) throw ConfigError("--N must be at least 10");
                const auto base = ctx.common.stream("mc two-sample-bf");
                auto r1 = base.split(1), r2 = base.split(2);
                const auto nt = bayes_factor_two_sample_mean(b->n, b->xbar, b->ybar, b->s2, b->draws, BfMethod::normal_sim, r1);
                const auto tt = bayes_factor_two_sample_mean(b->n, b->xbar, b->ybar, b->s2, b->draws, BfMethod::t_sim, r2);
                Output out;
                Json& r = out.result;
                r["draws"] = b->draws;
                r["normal_sim"] = {{"inverse_b10", number(nt.running.back())}, {"terminal_sd", number(tail_sd(nt.running))}};
                r["t_sim"] = {{"inverse_b10", number(tt.running.back())},
                              {"terminal_sd", number(tail_sd(tt.running))},
                              {"df", tt.df},
                              {"location", number(tt.location)},
                              {"scale2", number(tt.scale2)}};
                r["terminal_sd_ratio"] = number(tail_sd(nt.running) / tail_sd(tt.running));
                Table t{{"draw", "normal_sim", "t_sim"}, {}};
                const std::size_t step = std::max<std::size_t>(b->draws / 1000, 1);
                for (std::size_t i = step - 1; i < b->draws; i += step)
                    t.rows.push_back({static_cast<double>(i + 1), nt.running[i], tt.running[i]});
                out.table = t;
                return out;
            }};
        });

        struct Ar {
            std::string target, proposal;
            double log_bound = 0.0;
            std::size_t n = 1000;
        };
        auto a = std::make_shared<Ar>();
        auto* ar = cmd->add_subcommand("accept-reject", "Accept-reject from a family target with a family proposal");
        ar->add_option("--target", a->target, "Family spec, e.g. beta:2.7,6.3")->required();
        ar->add_option("--proposal", a->proposal, "Family spec")->required();
        ar->add_option("--log-bound", a->log_bound, "log M with target <= M proposal")->required();
        ar->add_option("--n", a->n, "Accepted draws");
        ar->callback([&ctx, a] {
            ctx.action = Action{"mc accept-reject", [&ctx, a] {
                const auto target = parse_family(a->target);
                auto rng = ctx.common.stream("mc accept-reject");
                const auto res = accept_reject(TargetDensity::from_family(target), parse_family(a->proposal), a->log_bound,
                                               rng, a->n);
                Output out;
                Json& r = out.result;
                r["target"] = family_json(target);
                r["log_bound"] = a->log_bound;
                r["mean_trials"] = number(res.mean_trials());
                r["acceptance_rate"] = number(1.0 / res.mean_trials());
                r["inverse_bound"] = number(std::exp(-a->log_bound));
                r["draws"] = sample_summary(target, res.draws);
                out.table = draws_table(res.draws);
                return out;
            }};
        });

        struct Is {
            std::string target, proposal;
            int moment = 1;
            std::size_t n = 10000;
        };
        auto s = std::make_shared<Is>();
        auto* is = cmd->add_subcommand("importance", "Importance sampling estimate of a target moment");
        is->add_option("--target", s->target, "Family spec")->required();
        is->add_option("--proposal", s->proposal, "Family spec")->required();
        is->add_option("--moment", s->moment, "Estimate E[X^moment]");
        is->add_option("--n", s->n, "Proposal draws");
        is->callback([&ctx, s] {
            ctx.action = Action{"mc importance", [&ctx, s] {
                const auto target = parse_family(s->target);
                auto rng = ctx.common.stream("mc importance");
                const int k = s->moment;
                const auto res = importance_estimate([k](const Eigen::VectorXd& x) { return std::pow(x(0), k); },
                                                     TargetDensity::from_family(target),
                                                     Sampler::from_family(parse_family(s->proposal)), rng, s->n);
                Output out;
                Json& r = out.result;
                r["target"] = family_json(target);
                r["moment"] = k;
                r["estimate"] = number(res.estimate);
                r["effective_sample_size"] = number(res.effective_sample_size);
                r["max_weight_share"] = number(res.max_weight_share);
                r["log_weight_sd"] = number(res.log_weight_sd);
                r["unstable"] = res.unstable;
                return out;
            }};
        });

        struct Br {
            std::string first, second;
            double log_scale1 = 0.0, log_scale2 = 0.0;
            std::size_t n = 10000;
        };
        auto br = std::make_shared<Br>();
        auto* bridge = cmd->add_subcommand("bridge", "Bridge sampling ratio of two unnormalized family kernels");
        bridge->add_option("--first", br->first, "Family spec")->required();
        bridge->add_option("--second", br->second, "Family spec")->required();
        bridge->add_option("--log-scale1", br->log_scale1, "log constant multiplying the first density");
        bridge->add_option("--log-scale2", br->log_scale2, "log constant multiplying the second density");
        bridge->add_option("--n", br->n, "Draws from each");
        bridge->callback([&ctx, br] {
            ctx.action = Action{"mc bridge", [&ctx, br] {
                const auto f1 = parse_family(br->first), f2 = parse_family(br->second);
                auto rng = ctx.common.stream("mc bridge");
                const auto s1 = Sampler::from_family(f1), s2 = Sampler::from_family(f2);
                std::vector<Eigen::VectorXd> d1, d2;
                for (std::size_t i = 0; i < br->n; ++i) d1.push_back(s1.draw(rng));
                for (std::size_t i = 0; i < br->n; ++i) d2.push_back(s2.draw(rng));
                const double c1 = br->log_scale1, c2 = br->log_scale2;
                const LogDensity l1 = [&](const Eigen::VectorXd& x) { return c1 + s1.density(x); };
                const LogDensity l2 = [&](const Eigen::VectorXd& x) { return c2 + s2.density(x); };
                const LogDensity geo = [&](const Eigen::VectorXd& x) { return -0.5 * (l1(x) + l2(x)); };
                const double est = bridge_bayes_factor(l1, l2, d1, d2, geo);
                Output out;
                out.result["estimate"] = number(est);
                out.result["exact"] = number(std::exp(c1 - c2));
                return out;
            }};
        });

        struct Sl {
            std::string target;
            double start = 0.0;
            std::optional<double> lower, upper;
            std::size_t n = 10000;
        };
        auto sl = std::make_shared<Sl>();
        auto* slice = cmd->add_subcommand("slice", "Slice sampler on a family density over a bounded interval");
        slice->add_option("--target", sl->target, "Family spec")->required();
        slice->add_option("--start", sl->start, "Starting point")->required();
        slice->add_option("--lower", sl->lower, "Lower end (default: support)");
        slice->add_option("--upper", sl->upper, "Upper end (default: support)");
        slice->add_option("--n", sl->n, "Draws");
        slice->callback([&ctx, sl] {
            ctx.action = Action{"mc slice", [&ctx, sl] {
                const auto target = parse_family(sl->target);
                const auto sup = target.support();
                const Interval dom{sl->lower.value_or(sup.lower), sl->upper.value_or(sup.upper)};
                SliceTarget st{[target](double x) {
                                   return target.in_support(x) ? std::exp(logpdf(target, x)) : 0.0;
                               },
                               dom, {}};
                auto rng = ctx.common.stream("mc slice");
                const auto d = slice_sampler(st, sl->start, rng, sl->n);
                Output out;
                out.result["target"] = family_json(target);
                out.result["domain"] = {number(dom.lower), number(dom.upper)};
                out.result["draws"] = sample_summary(target, d);
                out.table = draws_table(d);
                return out;
            }};
        });
    }
}

}  // namespace bayescomp::cli
