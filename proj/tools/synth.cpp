#include <cmath>

#include "bayescomp/dynamic.hpp"
#include "bayescomp/errors.hpp"
#include "bayescomp/image.hpp"
#include "bayescomp/mixture.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

Output dataset(Table t, const std::string& generator) {
    Output out;
    out.result["generator"] = generator;
    out.result["rows"] = t.rows.size();
    out.result["columns"] = t.header;
    out.table = std::move(t);
    out.dataset = true;
    return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Table series_table(const std::vector<double>& x) {
    Table t{{"t", "x"}, {}};
    for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({static_cast<double>(i + 1), x[i]});
    return t;
}

}  // namespace

void register_synth(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("synth", "Seeded synthetic datasets (CSV)");
    cmd->require_subcommand(1);

    // x ~ N(0,1), y = 5 + 3 x + N(0, 0.3^2)
    struct Reg {
        std::size_t n = 20;
        double intercept = 5.0, slope = 3.0, sd = 0.3;
    };
    auto r = std::make_shared<Reg>();
    auto* reg = cmd->add_subcommand("regression", "Simple linear regression data");
    reg->add_option("--n", r->n, "Rows")->check(CLI::PositiveNumber);
    reg->add_option("--intercept", r->intercept, "Intercept");
    reg->add_option("--slope", r->slope, "Slope");
    reg->add_option("--sd", r->sd, "Noise sd")->check(CLI::NonNegativeNumber);
    reg->callback([&ctx, r] {
        ctx.action = Action{"synth regression", [&ctx, r] {
            auto rng = ctx.common.stream("synth regression");
            Table t{{"x", "y"}, {}};
            for (std::size_t i = 0; i < r->n; ++i) {
                const double x = std_normal(rng);
                t.rows.push_back({x, r->intercept + r->slope * x + r->sd * std_normal(rng)});
            }
            return dataset(std::move(t), "regression");
        }};
    });

    // 0.4 N(0, 1.1) + 0.6 N(3.5, 0.8), n = 324
    struct Mix {
        std::size_t n = 324;
        std::vector<double> weights{0.4, 0.6}, means{0.0, 3.5}, variances{1.1, 0.8};
    };
    auto m = std::make_shared<Mix>();
    auto* mix = cmd->add_subcommand("mixture", "Two-component normal mixture");
    mix->add_option("--n", m->n, "Rows")->check(CLI::PositiveNumber);
    mix->add_option("--weights", m->weights, "Weights")->delimiter(',');
    mix->add_option("--means", m->means, "Means")->delimiter(',');
    mix->add_option("--variances", m->variances, "Variances")->delimiter(',');
    mix->callback([&ctx, m] {
        ctx.action = Action{"synth mixture", [&ctx, m] {
            const MixtureParams p{m->weights, m->means, m->variances};
            p.validate();
            auto rng = ctx.common.stream("synth mixture");
            const auto s = simulate_mixture(p, m->n, rng);
            Table t{{"x", "component"}, {}};
            for (std::size_t i = 0; i < s.data.size(); ++i)
                t.rows.push_back({s.data[i], static_cast<double>(s.labels[i] + 1)});
            return dataset(std::move(t), "mixture");
        }};
    });

    struct Ar {
        std::size_t n = 200;
        std::vector<double> coefficients{0.5, -0.3};
        double mean = 0.0, sd = 1.0;
    };
    auto a = std::make_shared<Ar>();
    auto* ar = cmd->add_subcommand("ar", "Causal autoregression");
    ar->add_option("--n", a->n, "Length")->check(CLI::PositiveNumber);
    ar->add_option("--coefficients", a->coefficients, "rho_1..rho_p")->delimiter(',');
    ar->add_option("--mean", a->mean, "Process mean");
    ar->add_option("--sd", a->sd, "Noise sd")->check(CLI::PositiveNumber);
    ar->callback([&ctx, a] {
        ctx.action = Action{"synth ar", [&ctx, a] {
            const ArModel model{a->mean, to_vector(a->coefficients), a->sd, std::nullopt};
            model.validate();
            if (!model.causal()) throw ConfigError("AR coefficients are not causal");
            auto rng = ctx.common.stream("synth ar");
            return dataset(series_table(simulate_ar(model, a->n, rng)), "ar");
        }};
    });

    struct Ma {
        std::size_t n = 200;
        std::vector<double> coefficients{0.6};
        double mean = 0.0, sd = 1.0;
    };
    auto q = std::make_shared<Ma>();
    auto* ma = cmd->add_subcommand("ma", "Moving average");
    ma->add_option("--n", q->n, "Length")->check(CLI::PositiveNumber);
    ma->add_option("--coefficients", q->coefficients, "theta_1..theta_q")->delimiter(',');
    ma->add_option("--mean", q->mean, "Process mean");
    ma->add_option("--sd", q->sd, "Noise sd")->check(CLI::PositiveNumber);
    ma->callback([&ctx, q] {
        ctx.action = Action{"synth ma", [&ctx, q] {
            const MaModel model{q->mean, to_vector(q->coefficients), q->sd};
            model.validate();
            auto rng = ctx.common.stream("synth ma");
            return dataset(series_table(simulate_ma(model, q->n, rng)), "ma");
        }};
    });

    // Checkerboard Gibbs draw of the field; each site observes its label (1..colors) + N(0, noise^2).
    struct Potts {
        int rows = 16, cols = 16, colors = 2;
        double beta = 0.8, noise = 0.5;
        std::size_t sweeps = 200;
    };
    auto pt = std::make_shared<Potts>();
    auto* potts = cmd->add_subcommand("potts", "Potts field with Gaussian observations");
    potts->add_option("--rows", pt->rows, "Rows")->check(CLI::PositiveNumber);
    potts->add_option("--cols", pt->cols, "Columns")->check(CLI::PositiveNumber);
    potts->add_option("--colors", pt->colors, "Colors")->check(CLI::Range(2, 64));
    potts->add_option("--beta", pt->beta, "Interaction")->check(CLI::NonNegativeNumber);
    potts->add_option("--noise", pt->noise, "Observation noise sd")->check(CLI::NonNegativeNumber);
    potts->add_option("--sweeps", pt->sweeps, "Gibbs sweeps")->check(CLI::PositiveNumber);
    potts->callback([&ctx, pt] {
        ctx.action = Action{"synth potts", [&ctx, pt] {
            auto rng = ctx.common.stream("synth potts");
            LabelGrid grid = LabelGrid::constant(pt->rows, pt->cols, pt->colors);
            for (auto& l : grid.labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(pt->colors)));
            (void)checkerboard_gibbs(grid, {pt->beta, pt->colors}, rng, pt->sweeps);
            Table t{{"row", "col", "label", "observation"}, {}};
            for (int i = 0; i < grid.rows; ++i)
                for (int j = 0; j < grid.cols; ++j) {
                    const int l = grid.at(i, j);
                    t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(j + 1), static_cast<double>(l + 1),
                                      l + 1 + pt->noise * std_normal(rng)});
                }
            return dataset(std::move(t), "potts");
        }};
    });
}

}  // namespace bayescomp::cli
