#include <cmath>
#include <fstream>
#include <sstream>

#include "bayescomp/errors.hpp"
#include "bayescomp/image.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

Json grid_json(const std::vector<int>& labels, int rows, int cols) {
    Json g = Json::array();
    for (int r = 0; r < rows; ++r) {
        Json row = Json::array();
        for (int c = 0; c < cols; ++c) row.push_back(labels[static_cast<std::size_t>(r * cols + c)] + 1);
        g.push_back(row);
    }
    return g;
}

// Whitespace-separated numbers, one image row per line.
struct ObservedImage {
    int rows = 0, cols = 0;
    std::vector<double> values;
};

ObservedImage read_observations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    ObservedImage img;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tok;
        int n = 0;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                img.values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(lineno) + ": not a number '" + tok + "'");
            }
            ++n;
        }
        if (n == 0) continue;
        if (img.cols && n != img.cols)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(img.cols) +
                            " values, found " + std::to_string(n));
        img.cols = n;
        ++img.rows;
    }
    if (img.rows == 0) throw DataError(path + ": empty image");
    return img;
}

struct GridOpts {
    int rows = 3, cols = 5, colors = 2;
};

void add_grid(CLI::App* sub, GridOpts& g) {
    sub->add_option("--rows", g.rows, "Lattice rows")->check(CLI::PositiveNumber);
    sub->add_option("--cols", g.cols, "Lattice columns")->check(CLI::PositiveNumber);
    sub->add_option("--colors", g.colors, "Number of colors")->check(CLI::Range(2, 64));
}

}  // namespace

void register_image(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("ising", "Ising and Potts models on small lattices");
    cmd->require_subcommand(1);

    struct Exact {
        GridOpts grid;
        std::vector<double> betas{0.0, 0.2, 0.5, 1.0};
    };
    auto e = std::make_shared<Exact>();
    auto* ex = cmd->add_subcommand("exact", "log sum_x exp(beta S(x)) by enumeration");
    add_grid(ex, e->grid);
    ex->add_option("--betas", e->betas, "Values of beta")->delimiter(',');
    ex->callback([&ctx, e] {
        ctx.action = Action{"ising exact", [e] {
            const auto z = exact_partition(e->betas, e->grid.rows, e->grid.cols, e->grid.colors);
            Output out;
            Json& r = out.result;
            r["rows"] = e->grid.rows;
            r["cols"] = e->grid.cols;
            r["colors"] = e->grid.colors;
            r["beta_grid"] = z.betas;
            r["log_sum"] = z.log_sum;
            r["logZ"] = z.log_z;
            Table t{{"beta", "log_sum"}, {}};
            for (std::size_t i = 0; i < z.betas.size(); ++i) t.rows.push_back({z.betas[i], z.log_sum[i]});
            out.table = t;
            return out;
        }};
    });

    struct Path {
        GridOpts grid;
        double beta_max = 1.0;
        int points = 21;
    };
    auto p = std::make_shared<Path>();
    auto* ps = cmd->add_subcommand("path", "Path-sampling estimate of log sum_x exp(beta S(x))");
    add_grid(ps, p->grid);
    ps->add_option("--beta-max", p->beta_max, "Upper end of the beta grid")->check(CLI::PositiveNumber);
    ps->add_option("--points", p->points, "Grid points including 0")->check(CLI::Range(2, 10000));
    ps->callback([&ctx, p] {
        ctx.action = Action{"ising path", [&ctx, p] {
            std::vector<double> betas;
            for (int i = 0; i < p->points; ++i) betas.push_back(p->beta_max * i / (p->points - 1));
            const auto [iters, burnin] = ctx.common.run_length(10000, 1000);
            auto rng = ctx.common.stream("ising path");
            const auto est = path_sampling(betas, p->grid.rows, p->grid.cols, p->grid.colors, rng, iters - burnin, burnin);
            Output out;
            Json& r = out.result;
            r["rows"] = p->grid.rows;
            r["cols"] = p->grid.cols;
            r["colors"] = p->grid.colors;
            r["beta_grid"] = est.betas;
            r["mean_statistic"] = est.mean_statistic;
            r["standard_error"] = est.standard_error;
            r["logZ_estimates"] = est.log_sum;
            r["monotone"] = est.monotone;
            const double configs = p->grid.rows * p->grid.cols * std::log2(static_cast<double>(p->grid.colors));
            if (configs <= 20.0) r["exact_log_sum"] = exact_partition(betas, p->grid.rows, p->grid.cols, p->grid.colors).log_sum;
            Table t{{"beta", "mean_statistic", "standard_error", "log_sum"}, {}};
            for (std::size_t i = 0; i < est.betas.size(); ++i)
                t.rows.push_back({est.betas[i], est.mean_statistic[i], est.standard_error[i], est.log_sum[i]});
            out.table = t;
            return out;
        }};
    });

    struct Gibbs {
        GridOpts grid;
        double beta = 0.5;
        std::string start;
    };
    auto g = std::make_shared<Gibbs>();
    auto* gi = cmd->add_subcommand("gibbs", "Checkerboard Gibbs sampler on the prior field");
    add_grid(gi, g->grid);
    gi->add_option("--beta", g->beta, "Interaction")->check(CLI::NonNegativeNumber);
    gi->add_option("--start", g->start, "Starting label grid (labels 1..colors)");
    gi->callback([&ctx, g] {
        ctx.action = Action{"ising gibbs", [&ctx, g] {
            LabelGrid grid = LabelGrid::constant(g->grid.rows, g->grid.cols, g->grid.colors);
            if (!g->start.empty()) {
                std::ifstream in(g->start);
                if (!in) throw DataError("cannot open " + g->start);
                grid = read_label_grid(in, g->grid.colors);
            }
            const PottsParams params{g->beta, grid.colors};
            const auto [iters, burnin] = ctx.common.run_length(1000, 100);
            auto rng = ctx.common.stream("ising gibbs");
            const auto s = checkerboard_gibbs(grid, params, rng, iters);
            double m = 0.0;
            for (std::size_t i = burnin; i < s.size(); ++i) m += s[i];
            m /= static_cast<double>(s.size() - burnin);
            Output out;
            Json& r = out.result;
            r["beta"] = g->beta;
            r["sweeps"] = iters;
            r["mean_statistic"] = number(m);
            r["final_grid"] = grid_json(grid.labels, grid.rows, grid.cols);
            Table t{{"sweep", "statistic"}, {}};
            for (std::size_t i = 0; i < s.size(); ++i) t.rows.push_back({static_cast<double>(i + 1), s[i]});
            out.table = t;
            return out;
        }};
    });

    struct Seg {
        std::string image;
        int colors = 2;
        double beta = 0.5, variance = 1.0;
        std::vector<double> means;
    };
    auto sg = std::make_shared<Seg>();
    auto* seg = cmd->add_subcommand("segment", "MPM and MAP segmentation of a noisy image");
    seg->add_option("--image", sg->image, "Whitespace-separated gray levels, one row per line")->required();
    seg->add_option("--colors", sg->colors, "Number of classes")->check(CLI::Range(2, 64));
    seg->add_option("--beta", sg->beta, "Interaction")->check(CLI::NonNegativeNumber);
    seg->add_option("--means", sg->means, "Class means (default: evenly spaced over the data range)")->delimiter(',');
    seg->add_option("--variance", sg->variance, "Emission variance")->check(CLI::PositiveNumber);
    seg->callback([&ctx, sg] {
        ctx.action = Action{"ising segment", [&ctx, sg] {
            const auto img = read_observations(sg->image);
            auto means = sg->means;
            if (means.empty()) {
                const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
                for (int j = 0; j < sg->colors; ++j)
                    means.push_back(*lo + (*hi - *lo) * (j + 0.5) / sg->colors);
            }
            if (static_cast<int>(means.size()) != sg->colors) throw ConfigError("--means needs one value per color");
            const GaussianEmission em{img.values, means, sg->variance};
            LabelGrid grid = LabelGrid::constant(img.rows, img.cols, sg->colors);
            for (std::size_t i = 0; i < img.values.size(); ++i) {
                int best = 0;
                for (int j = 1; j < sg->colors; ++j)
                    if (std::abs(img.values[i] - means[static_cast<std::size_t>(j)]) <
                        std::abs(img.values[i] - means[static_cast<std::size_t>(best)]))
                        best = j;
                grid.labels[i] = best;
            }
            const PottsParams params{sg->beta, sg->colors};
            const auto [iters, burnin] = ctx.common.run_length(2000, 200);
            auto rng = ctx.common.stream("ising segment");
            (void)checkerboard_gibbs(grid, params, rng, burnin, &em);
            std::vector<std::vector<int>> draws;
            Table t{{"sweep", "statistic"}, {}};
            for (std::size_t i = burnin; i < iters; ++i) {
                const auto s = checkerboard_gibbs(grid, params, rng, 1, &em);
                draws.push_back(grid.labels);
                t.rows.push_back({static_cast<double>(i + 1), s.back()});
            }
            const auto est = mpm_map_from_draws(draws, sg->colors);
            Output out;
            Json& r = out.result;
            r["rows"] = img.rows;
            r["cols"] = img.cols;
            r["beta"] = sg->beta;
            r["means"] = means;
            r["draws"] = draws.size();
            r["mpm_grid"] = grid_json(est.mpm, img.rows, img.cols);
            r["map_grid"] = grid_json(est.map, img.rows, img.cols);
            out.table = t;
            return out;
        }};
    });
}

}  // namespace bayescomp::cli
