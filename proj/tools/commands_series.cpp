#include <cmath>

#include "bayescomp/dynamic.hpp"
#include "bayescomp/errors.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

Json roots_json(const std::vector<Complex>& roots) {
    Json a = Json::array();
    for (const auto& r : roots) a.push_back({{"re", number(r.real())}, {"im", number(r.imag())}, {"modulus", number(std::abs(r))}});
    return a;
}

Json family_summary(const ScalarFamily& f) {
    return {{"df", f.param(0)}, {"location", number(f.param(1))}, {"scale2", number(f.param(2))}};
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void register_series(CLI::App& app, Context& ctx) {
    // ------------------------------------------------------------ ar
    {
        auto* cmd = app.add_subcommand("ar", "Autoregressive models");
        cmd->require_subcommand(1);

        struct Rj {
            std::string data, column = "x";
            int max_order = 5;
        };
        auto rj = std::make_shared<Rj>();
        auto* rjc = cmd->add_subcommand("rj", "Reversible jump over the order with inverse-root parameters");
        rjc->add_option("--data", rj->data, "CSV file")->required();
        rjc->add_option("--column", rj->column, "Column name");
        rjc->add_option("--max-order", rj->max_order, "Largest order")->check(CLI::Range(1, 20));
        rjc->callback([&ctx, rj] {
            ctx.action = Action{"ar rj", [&ctx, rj] {
                const auto x = read_csv(rj->data).column(rj->column);
                RjArOptions opt;
                opt.max_order = rj->max_order;
                std::tie(opt.iterations, opt.burnin) = ctx.common.run_length(opt.iterations, opt.burnin);
                auto rng = ctx.common.stream("ar rj");
                const auto res = rj_ar_order(x, opt, rng);
                Output out;
                Json& r = out.result;
                r["n"] = x.size();
                r["order_posterior"] = res.order_posterior();
                const int mode = res.order_mode();
                r["order_mode"] = mode;
                r["mode_coefficients"] = to_json(res.mean_coefficients(mode));
                r["birth_acceptance"] =
                    number(static_cast<double>(res.birth_accepted) / static_cast<double>(res.birth_proposed));
                r["death_acceptance"] =
                    number(static_cast<double>(res.death_accepted) / static_cast<double>(res.death_proposed));
                Table t{{"iteration", "order", "mean", "sd"}, {}};
                for (Eigen::Index i = 0; i < res.trace.draws.rows(); ++i)
                    t.rows.push_back({static_cast<double>(i + 1), res.trace.draws(i, 0), res.trace.draws(i, 1),
                                      res.trace.draws(i, 2)});
                out.table = t;
                return out;
            }};
        });

        auto coef = std::make_shared<std::vector<double>>();
        auto* roots = cmd->add_subcommand("roots", "Inverse roots and causality of given coefficients");
        roots->add_option("--coefficients", *coef, "rho_1..rho_p")->delimiter(',')->required();
        roots->callback([&ctx, coef] {
            ctx.action = Action{"ar roots", [coef] {
                const auto rho = to_vector(*coef);
                const ArModel m{0.0, rho, 1.0, std::nullopt};
                const auto lam = coeffs_to_roots(rho);
                Output out;
                out.result["coefficients"] = *coef;
                out.result["inverse_roots"] = roots_json(lam);
                out.result["causal"] = m.causal();
                if (coef->size() == 2) out.result["in_triangle"] = ar2_in_triangle((*coef)[0], (*coef)[1]);
                return out;
            }};
        });

        struct A1 {
            std::string data, column = "x";
        };
        auto a1 = std::make_shared<A1>();
        auto* ar1 = cmd->add_subcommand("ar1", "AR(1) posterior and one-step predictive, prior 1/sigma");
        ar1->add_option("--data", a1->data, "CSV file")->required();
        ar1->add_option("--column", a1->column, "Column name");
        ar1->callback([&ctx, a1] {
            ctx.action = Action{"ar ar1", [a1] {
                const auto x = read_csv(a1->data).column(a1->column);
                const auto post = ar1_posterior(x);
                Output out;
                out.result["transitions"] = post.transitions;
                out.result["rho_mean"] = number(post.rho_mean());
                out.result["residual_ss"] = number(post.residual_ss());
                out.result["rho_marginal"] = family_summary(post.rho_marginal());
                out.result["predictive"] = family_summary(post.predictive());
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ ma
    {
        auto* cmd = app.add_subcommand("ma", "Moving-average models");
        cmd->require_subcommand(1);

        struct Ma {
            std::string data, column = "x";
            std::vector<double> coefficients;
            double mean = 0.0, sd = 1.0;
            int horizon = 1, max_lag = 10;
        };
        auto o = std::make_shared<Ma>();
        auto model = [o] {
            MaModel m{o->mean, to_vector(o->coefficients), o->sd};
            m.validate();
            return m;
        };
        auto* fc = cmd->add_subcommand("forecast", "Exact predictive means E[x_{T+h} | x_1..x_T]");
        fc->add_option("--data", o->data, "CSV file")->required();
        fc->add_option("--column", o->column, "Column name");
        fc->add_option("--coefficients", o->coefficients, "theta_1..theta_q")->delimiter(',')->required();
        fc->add_option("--mean", o->mean, "Process mean");
        fc->add_option("--sd", o->sd, "Noise sd");
        fc->add_option("--horizon", o->horizon, "Largest horizon")->check(CLI::PositiveNumber);
        fc->callback([&ctx, o, model] {
            ctx.action = Action{"ma forecast", [o, model] {
                const auto x = read_csv(o->data).column(o->column);
                const auto m = model();
                Output out;
                Json f = Json::array();
                Table t{{"horizon", "mean"}, {}};
                for (int h = 1; h <= o->horizon; ++h) {
                    const auto p = ma_predictive(m, x, h);
                    f.push_back({{"horizon", h}, {"mean", number(p.mean)}, {"beyond_horizon", p.beyond_horizon}});
                    t.rows.push_back({static_cast<double>(h), p.mean});
                }
                out.result["forecasts"] = f;
                out.table = t;
                return out;
            }};
        });

        auto* acf = cmd->add_subcommand("acf", "Theoretical autocovariance and autocorrelation");
        acf->add_option("--coefficients", o->coefficients, "theta_1..theta_q")->delimiter(',')->required();
        acf->add_option("--sd", o->sd, "Noise sd");
        acf->add_option("--max-lag", o->max_lag, "Largest lag")->check(CLI::NonNegativeNumber);
        acf->callback([&ctx, o, model] {
            ctx.action = Action{"ma acf", [o, model] {
                const auto m = model();
                const double g0 = ma_autocovariance(m, 0);
                Json a = Json::array();
                Table t{{"lag", "autocovariance", "autocorrelation"}, {}};
                for (int h = 0; h <= o->max_lag; ++h) {
                    const double g = ma_autocovariance(m, h);
                    a.push_back({{"lag", h}, {"autocovariance", number(g)}, {"autocorrelation", number(g / g0)}});
                    t.rows.push_back({static_cast<double>(h), g, g / g0});
                }
                Output out;
                out.result["acf"] = a;
                out.table = t;
                return out;
            }};
        });
    }

    // ------------------------------------------------------------ hmm
    {
        auto* cmd = app.add_subcommand("hmm", "Hidden Markov chains with normal emissions");
        cmd->require_subcommand(1);

        struct Hmm {
            std::string data, column = "x", transition;
            std::vector<double> means, variances;
        };
        auto o = std::make_shared<Hmm>();
        auto add_model = [o](CLI::App* sub) {
            sub->add_option("--transition", o->transition, "Rows separated by ';', e.g. 0.9,0.1;0.2,0.8")->required();
            sub->add_option("--means", o->means, "Emission means")->delimiter(',')->required();
            sub->add_option("--variances", o->variances, "Emission variances")->delimiter(',')->required();
        };
        auto check = [o](const Eigen::MatrixXd& P) {
            if (o->means.size() != static_cast<std::size_t>(P.rows()) || o->variances.size() != o->means.size())
                throw ConfigError("one mean and one variance per state");
        };

        auto* filt = cmd->add_subcommand("filter", "Prediction filter and observed-data log-likelihood");
        add_model(filt);
        filt->add_option("--data", o->data, "CSV file")->required();
        filt->add_option("--column", o->column, "Column name");
        filt->callback([&ctx, o, check] {
            ctx.action = Action{"hmm filter", [o, check] {
                const auto x = read_csv(o->data).column(o->column);
                MarkovSwitch ms;
                ms.transition = parse_matrix(o->transition);
                check(ms.transition);
                ms.log_conditional = [o](int s, double cur, double) {
                    const auto i = static_cast<std::size_t>(s);
                    return normal_logpdf(cur, o->means[i], o->variances[i]);
                };
                ms.validate();
                const auto f = ms_prediction_filter(ms, x);
                Output out;
                out.result["n"] = x.size();
                out.result["loglik"] = number(f.loglik());
                Table t{{"t"}, {}};
                for (int s = 0; s < ms.states(); ++s) t.header.push_back("state" + std::to_string(s + 1));
                t.header.emplace_back("cumulative_loglik");
                for (Eigen::Index r = 0; r < f.state_probabilities.rows(); ++r) {
                    std::vector<double> row{static_cast<double>(r + 1)};
                    for (Eigen::Index s = 0; s < f.state_probabilities.cols(); ++s)
                        row.push_back(f.state_probabilities(r, s));
                    row.push_back(f.cumulative_loglik[static_cast<std::size_t>(r)]);
                    t.rows.push_back(std::move(row));
                }
                out.table = t;
                return out;
            }};
        });

        auto* marg = cmd->add_subcommand("marginal", "Stationary law and marginal mixture of the observations");
        add_model(marg);
        marg->callback([&ctx, o, check] {
            ctx.action = Action{"hmm marginal", [o, check] {
                const auto P = parse_matrix(o->transition);
                check(P);
                const auto pi = stationary_distribution(P);
                const auto mix = hmm_marginal_mixture(P, o->means, o->variances);
                Output out;
                out.result["stationary"] = to_json(pi);
                out.result["mixture"] = {{"weights", mix.weights}, {"means", mix.means}, {"variances", mix.variances}};
                return out;
            }};
        });
    }
}

}  // namespace bayescomp::cli
