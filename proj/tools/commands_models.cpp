#include <algorithm>
#include <cmath>

#include "bayescomp/capture.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/glm.hpp"
#include "bayescomp/linreg.hpp"
#include "bayescomp/mixture.hpp"
#include "bayescomp/numeric.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

Json student_json(const PosteriorStudentT& t) {
    Eigen::VectorXd sd = t.scale.diagonal();
    if (t.df > 2) sd *= t.df / (t.df - 2);
    return {{"df", t.df}, {"center", to_json(t.center)}, {"scale", to_json(t.scale)},
            {"sd", to_json(Eigen::VectorXd(sd.cwiseSqrt()))}};
}

Json trace_summary(const ChainTrace& tr, const std::vector<std::string>& names) {
    Json j = Json::object();
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto x = tr.component(static_cast<Eigen::Index>(c));
        const auto b = batch_mean_se(x);
        j[names[c]] = {{"mean", number(b.mean)}, {"se", number(b.se)}};
    }
    return j;
}

Table trace_table(const ChainTrace& tr, std::vector<std::string> names) {
    Table t{{"iteration"}, {}};
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (Eigen::Index i = 0; i < tr.draws.rows(); ++i) {
        std::vector<double> row{static_cast<double>(i + 1)};
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(names.size()); ++c) row.push_back(tr.draws(i, c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<std::string> coefficient_names(const std::vector<std::string>& x, bool intercept) {
    std::vector<std::string> n;
    if (intercept) n.emplace_back("intercept");
    n.insert(n.end(), x.begin(), x.end());
    return n;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd X(x.rows(), x.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(x.cols()) = x;
    return X;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json population_json(const PopulationPosterior& p) {
    return {{"n_min", p.n_min}, {"n_max", p.n_max()}, {"mean", number(p.mean())}, {"median", p.median()},
            {"tail_mass", number(p.tail_mass)}};
}

Table population_table(const PopulationPosterior& p, std::int64_t limit) {
    Table t{{"N", "probability"}, {}};
    const auto pr = p.probabilities();
    for (std::size_t i = 0; i < pr.size(); ++i) {
        const auto N = p.n_min + static_cast<std::int64_t>(i);
        if (N > limit) break;
        t.rows.push_back({static_cast<double>(N), pr[i]});
    }
    return t;
}

Json mixture_json(const MixtureParams& m) {
    return {{"weights", m.weights}, {"means", m.means}, {"variances", m.variances}};
}

}  // namespace

void register_models(CLI::App& app, Context& ctx) {
    // ------------------------------------------------------------ reg
    {
        struct Opts {
            std::string data, y = "y", prior = "jeffreys";
            std::vector<std::string> x;
            double c = 100.0;
            std::optional<double> hierarchical, select;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("reg", "Bayesian linear regression");
        cmd->add_option("--data", o->data, "CSV file")->required();
        cmd->add_option("--y", o->y, "Response column");
        cmd->add_option("--x", o->x, "Covariate columns")->delimiter(',')->required();
        cmd->add_option("--prior", o->prior, "jeffreys or g")->check(CLI::IsMember({"jeffreys", "g"}));
        cmd->add_option("--c", o->c, "G-prior scale");
        cmd->add_option("--hierarchical", o->hierarchical, "Exponent a of pi(c) ~ c^-a");
        cmd->add_option("--select", o->select, "Enumerate covariate subsets under pi(c) ~ c^-a");
        cmd->callback([&ctx, o] {
            ctx.action = Action{"reg", [o] {
                const auto csv = read_csv(o->data);
                const auto data = make_regression_data(with_intercept(csv.columns(o->x)), to_vector(csv.column(o->y)));
                const auto names = coefficient_names(o->x, true);
                const auto fit = ols(data);
                Output out;
                Json& r = out.result;
                r["n"] = data.n();
                r["coefficients"] = names;
                r["ols"] = {{"beta", to_json(fit.beta_hat)}, {"std_error", to_json(fit.std_error)}, {"rss", fit.s2}};
                if (o->prior == "jeffreys") {
                    r["posterior"] = student_json(jeffreys_posterior(data));
                } else if (o->hierarchical) {
                    const auto h = hier_c_posterior(data, *o->hierarchical);
                    r["posterior"] = {{"beta", to_json(h.beta_estimate)}, {"shrinkage", number(h.shrinkage)},
                                      {"tail_mass", number(h.tail_mass)}};
                } else {
                    GPrior g{o->c, Eigen::VectorXd::Zero(data.p()), std::nullopt};
                    const auto post = gprior_posterior(data, g);
                    r["posterior"] = student_json(post.beta);
                    r["posterior"]["sigma2"] = {{"shape", post.sigma2.shape}, {"scale", post.sigma2.scale}};
                    r["log_marginal"] = number(marginal_likelihood(data, g));
                }
                if (o->select) {
                    const auto w = enumerate_models(data, *o->select);
                    Json models = Json::array();
                    Table t{{"model"}, {}};
                    for (const auto& n : o->x) t.header.push_back(n);
                    t.header.push_back("probability");
                    for (std::size_t m = 0; m < w.models.size(); ++m) {
                        std::vector<std::string> in;
                        std::vector<double> row{static_cast<double>(m)};
                        for (std::size_t j = 0; j < w.models[m].size(); ++j) {
                            if (w.models[m][j]) in.push_back(o->x[j]);
                            row.push_back(w.models[m][j] ? 1.0 : 0.0);
                        }
                        row.push_back(w.probabilities[m]);
                        t.rows.push_back(std::move(row));
                        models.push_back({{"variables", in}, {"probability", number(w.probabilities[m])}});
                    }
                    r["selection"] = {{"models", models}, {"best", w.argmax()}};
                    out.table = t;
                }
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ glm
    {
        struct Opts {
            std::string data, y = "y", link = "probit", method = "mle", prior = "flat";
            std::vector<std::string> x;
            bool intercept = false;
            double scale = 1.0;
        };
        auto o = std::make_shared<Opts>();
        auto* cmd = app.add_subcommand("glm", "Binary regression: maximum likelihood, MH or latent-variable Gibbs");
        cmd->add_option("--data", o->data, "CSV file")->required();
        cmd->add_option("--y", o->y, "0/1 response column");
        cmd->add_option("--x", o->x, "Covariate columns")->delimiter(',')->required();
        cmd->add_flag("--intercept", o->intercept, "Prepend a column of ones");
        cmd->add_option("--link", o->link, "probit or logit")->check(CLI::IsMember({"probit", "logit"}));
        cmd->add_option("--method", o->method, "mle, mh or gibbs")->check(CLI::IsMember({"mle", "mh", "gibbs"}));
        cmd->add_option("--prior", o->prior, "flat or noninformative")->check(CLI::IsMember({"flat", "noninformative"}));
        cmd->add_option("--scale", o->scale, "MH proposal scale on the MLE covariance");
        cmd->callback([&ctx, o] {
            ctx.action = Action{"glm", [&ctx, o] {
                const auto csv = read_csv(o->data);
                Eigen::MatrixXd X = csv.columns(o->x);
                if (o->intercept) X = with_intercept(X);
                const auto data = make_glm_data(X, to_vector(csv.column(o->y)),
                                                o->link == "probit" ? Link::probit : Link::logit);
                const auto names = coefficient_names(o->x, o->intercept);
                Output out;
                Json& r = out.result;
                r["n"] = data.n();
                r["link"] = o->link;
                r["coefficients"] = names;
                const auto fit = glm_mle(data);
                Eigen::VectorXd se = fit.covariance.diagonal().cwiseSqrt();
                r["mle"] = {{"beta", to_json(fit.beta)}, {"std_error", to_json(se)}, {"loglik", number(fit.loglik)},
                            {"converged", fit.converged}};
                if (o->method == "mle") return out;
                if (o->method == "gibbs" && data.link != Link::probit)
                    throw ConfigError("--method gibbs needs --link probit");
                const auto [iters, burnin] = ctx.common.run_length(10000, 1000);
                auto rng = ctx.common.stream("glm");
                const auto chain =
                    o->method == "mh"
                        ? mh_glm_sampler(data, o->prior == "flat" ? GlmPrior::flat : GlmPrior::noninformative, o->scale,
                                         rng, iters, burnin)
                        : albert_chib_gibbs(data, rng, iters, burnin).chain;
                r["method"] = o->method;
                r["acceptance"] = number(chain.acceptance);
                r["posterior"] = trace_summary(chain.trace, names);
                r["separation_warning"] = chain.separation_warning;
                out.table = trace_table(chain.trace, names);
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ capture
    {
        auto* cmd = app.add_subcommand("capture", "Capture-recapture population posteriors");
        cmd->require_subcommand(1);

        struct Dar {
            std::int64_t n1 = 0, n2 = 0, m2 = 0, n_max = kDefaultNMax;
        };
        auto d = std::make_shared<Dar>();
        auto* dar = cmd->add_subcommand("darroch", "Two-stage model with the 1/N prior");
        dar->add_option("--n1", d->n1, "First-stage captures")->required();
        dar->add_option("--n2", d->n2, "Second-stage captures")->required();
        dar->add_option("--m2", d->m2, "Marked among the second-stage captures")->required();
        dar->add_option("--n-max", d->n_max, "Grid upper end");
        dar->callback([&ctx, d] {
            ctx.action = Action{"capture darroch", [d] {
                const auto mle = darroch_mle(d->n1, d->n2, d->m2);
                Output out;
                Json& r = out.result;
                r["n1"] = d->n1;
                r["n2"] = d->n2;
                r["m2"] = d->m2;
                r["mle"] = mle ? Json(mle->integer) : Json(nullptr);
                r["mle_continuous"] = mle ? number(mle->estimate) : Json(nullptr);
                // m2 = 0 leaves too much mass beyond any practical grid
                std::optional<DarrochPosterior> post;
                try {
                    post = darroch_posterior(d->n1, d->n2, d->m2, d->n_max);
                } catch (const NumericalError& e) {
                    if (d->m2 != 0) throw;
                    r["posterior_mean"] = nullptr;
                    r["posterior_median"] = nullptr;
                    r["tail_mass"] = nullptr;
                    r["posterior_error"] = e.what();
                    return out;
                }
                r["posterior_mean"] = number(post->mean);
                r["posterior_median"] = post->posterior.median();
                r["tail_mass"] = number(post->posterior.tail_mass);
                out.table = population_table(post->posterior, d->n_max);
                return out;
            }};
        });

        struct Tag {
            std::int64_t n1plus = 0, n_max = kDefaultNMax;
            std::vector<std::int64_t> recoveries;
        };
        auto t = std::make_shared<Tag>();
        auto* tag = cmd->add_subcommand("tag", "Tag-recovery model with the 1/N prior");
        tag->add_option("--n1plus", t->n1plus, "Individuals tagged")->required();
        tag->add_option("--recoveries", t->recoveries, "Recoveries per later episode")->delimiter(',')->required();
        tag->add_option("--n-max", t->n_max, "Grid upper end");
        tag->callback([&ctx, t] {
            ctx.action = Action{"capture tag", [t] {
                const auto post = tag_recovery_posterior(t->n1plus, t->recoveries, t->n_max);
                Output out;
                Json& r = out.result;
                r["posterior_mean"] = number(post.mean);
                r["posterior_median"] = post.median;
                r["count_below_half"] = post.count_below_half;
                r["crude_estimate"] = number(post.crude_estimate);
                r["tail_mass"] = number(post.posterior.tail_mass);
                out.table = population_table(post.posterior, t->n_max);
                return out;
            }};
        });

        struct Rec {
            std::vector<std::int64_t> captures, recaptures;
            std::string prior = "1/N";
            std::int64_t n_max = kDefaultNMax;
        };
        auto rc = std::make_shared<Rec>();
        auto add_record = [rc](CLI::App* sub) {
            sub->add_option("--captures", rc->captures, "n_1..n_T")->delimiter(',')->required();
            sub->add_option("--recaptures", rc->recaptures, "m_2..m_T")->delimiter(',')->required();
            sub->add_option("--prior", rc->prior, "1/N or poisson:LAMBDA");
        };
        auto make_prior = [](const std::string& s) {
            if (s == "1/N") return CapturePrior::one_over_n();
            if (s.rfind("poisson:", 0) == 0) {
                const auto m = parse_matrix(s.substr(8));
                if (m.size() != 1 || !(m(0, 0) > 0)) throw ConfigError("poisson prior needs a positive rate");
                return CapturePrior::poisson(m(0, 0));
            }
            throw ConfigError("unknown capture prior '" + s + "'");
        };
        auto* pst = cmd->add_subcommand("posterior", "Multi-stage model, exact posterior on N");
        add_record(pst);
        pst->add_option("--n-max", rc->n_max, "Grid upper end");
        pst->callback([&ctx, rc, make_prior] {
            ctx.action = Action{"capture posterior", [rc, make_prior] {
                const CaptureRecord rec{rc->captures, rc->recaptures};
                rec.validate();
                const auto post = capture_posterior(rec, make_prior(rc->prior), rc->n_max);
                Output out;
                out.result["n_plus"] = rec.n_plus();
                out.result["posterior"] = population_json(post);
                out.table = population_table(post, rc->n_max);
                return out;
            }};
        });
        auto* gib = cmd->add_subcommand("gibbs", "Multi-stage model, Gibbs on (N, p)");
        add_record(gib);
        gib->callback([&ctx, rc, make_prior] {
            ctx.action = Action{"capture gibbs", [&ctx, rc, make_prior] {
                const CaptureRecord rec{rc->captures, rc->recaptures};
                rec.validate();
                const auto [iters, burnin] = ctx.common.run_length(20000, 2000);
                auto rng = ctx.common.stream("capture gibbs");
                auto tr = capture_gibbs(rec, make_prior(rc->prior), rng, iters);
                tr.burnin = burnin;
                Output out;
                out.result["n_plus"] = rec.n_plus();
                out.result["posterior"] = trace_summary(tr, {"N", "p"});
                out.table = trace_table(tr, {"N", "p"});
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ mix
    {
        auto* cmd = app.add_subcommand("mix", "Two-component normal mixtures");
        cmd->require_subcommand(1);

        struct Em {
            std::string data, column = "x";
            std::size_t starts = 1, max_iterations = 200;
        };
        auto e = std::make_shared<Em>();
        auto* em = cmd->add_subcommand("em", "EM from random starts");
        em->add_option("--data", e->data, "CSV file")->required();
        em->add_option("--column", e->column, "Column name");
        em->add_option("--starts", e->starts, "Random starts")->check(CLI::PositiveNumber);
        em->add_option("--max-iterations", e->max_iterations, "EM iterations per start");
        em->callback([&ctx, e] {
            ctx.action = Action{"mix em", [&ctx, e] {
                const auto x = read_csv(e->data).column(e->column);
                auto rng = ctx.common.stream("mix em");
                Output out;
                Json runs = Json::array();
                Table t{{"start", "iteration", "loglik"}, {}};
                std::optional<EmResult> best;
                bool monotone = true;
                for (std::size_t s = 0; s < e->starts; ++s) {
                    auto res = em_mixture(em_random_start(x, rng), x, {e->max_iterations, false, 1e-12});
                    bool mono = true;
                    for (std::size_t i = 1; i < res.loglik.size(); ++i)
                        mono = mono && res.loglik[i] >= res.loglik[i - 1] - 1e-10;
                    monotone = monotone && mono;
                    for (std::size_t i = 0; i < res.loglik.size(); ++i)
                        t.rows.push_back({static_cast<double>(s), static_cast<double>(i), res.loglik[i]});
                    runs.push_back({{"final", mixture_json(res.path.back())},
                                    {"loglik", number(res.loglik.back())},
                                    {"iterations", res.loglik.size() - 1},
                                    {"monotone", mono},
                                    {"degenerate", res.degenerate}});
                    if (!res.degenerate && (!best || res.loglik.back() > best->loglik.back())) best = std::move(res);
                }
                out.result["n"] = x.size();
                out.result["monotone"] = monotone;
                out.result["best"] = best ? Json{{"params", mixture_json(best->path.back())},
                                                 {"loglik", number(best->loglik.back())}}
                                          : Json(nullptr);
                out.result["runs"] = runs;
                out.table = t;
                return out;
            }};
        });

        struct Gi {
            std::string data, column = "x";
            std::vector<double> weights{0.5, 0.5}, means{-1.0, 1.0}, variances{1.0, 1.0};
            bool update_weights = false, update_variances = false;
            double prior_mean = 0.0, prior_count = 0.1;
        };
        auto g = std::make_shared<Gi>();
        auto* gi = cmd->add_subcommand("gibbs", "Data-augmentation Gibbs sampler");
        gi->add_option("--data", g->data, "CSV file")->required();
        gi->add_option("--column", g->column, "Column name");
        gi->add_option("--weights", g->weights, "Starting weights")->delimiter(',');
        gi->add_option("--means", g->means, "Starting means")->delimiter(',');
        gi->add_option("--variances", g->variances, "Starting variances")->delimiter(',');
        gi->add_flag("--update-weights", g->update_weights, "Sample the weights");
        gi->add_flag("--update-variances", g->update_variances, "Sample the variances");
        gi->add_option("--prior-mean", g->prior_mean, "Prior mean of each component mean");
        gi->add_option("--prior-count", g->prior_count, "Prior count on each component mean");
        gi->callback([&ctx, g] {
            ctx.action = Action{"mix gibbs", [&ctx, g] {
                const auto x = read_csv(g->data).column(g->column);
                MixtureModel model;
                model.params = {g->weights, g->means, g->variances};
                model.params.validate();
                const auto k = static_cast<std::size_t>(model.k());
                model.priors.assign(k, ComponentPrior{g->prior_mean, g->prior_count, 1.0, 1.0});
                model.weight_prior.assign(k, 1.0);
                model.validate();
                const auto [iters, burnin] = ctx.common.run_length(5000, 500);
                auto rng = ctx.common.stream("mix gibbs");
                auto tr = gibbs_mixture(model, x, {MixtureParameterization::means, g->update_weights, g->update_variances},
                                        rng, iters);
                tr.burnin = burnin;
                std::vector<std::string> names;
                for (const char* p : {"mean", "weight", "variance"})
                    for (std::size_t j = 0; j < k; ++j) names.push_back(std::string(p) + std::to_string(j + 1));
                Output out;
                out.result["n"] = x.size();
                out.result["posterior"] = trace_summary(tr, names);
                out.table = trace_table(tr, names);
                return out;
            }};
        });
    }
}

}  // namespace bayescomp::cli
