#include "bayescomp/image.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "bayescomp/dist.hpp"
#include "bayescomp/numeric.hpp"

namespace bayescomp {

namespace {

constexpr std::uint64_t kMaxConfigurations = std::uint64_t{1} << 24;

std::uint64_t configuration_count(int sites, int colors) {
    if (sites < 1) throw ConfigError("need at least one site");
    if (colors < 1) throw ConfigError("need at least one color");
    std::uint64_t total = 1;
    for (int i = 0; i < sites; ++i) {
        total *= static_cast<std::uint64_t>(colors);
        if (total > kMaxConfigurations) throw ConfigError("more than 2^24 configurations to enumerate");
    }
    return total;
}

// Advances x to the next configuration (site 0 fastest); false after the last.
// `on_change(site, old, new)` sees every single-site change.
template <class F>
bool advance(std::vector<int>& x, int colors, F&& on_change) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int old = x[i];
        const int now = (old + 1) % colors;
        on_change(static_cast<int>(i), old, now);
        x[i] = now;
        if (now != 0) return true;
    }
    return false;
}

int agreement_delta(const Neighborhood& nb, std::span<const int> x, int site, int from, int to) {
    int d = 0;
    for (int j : nb.adjacent[static_cast<std::size_t>(site)]) {
        d += (x[static_cast<std::size_t>(j)] == to) - (x[static_cast<std::size_t>(j)] == from);
    }
    return 2 * d;
}

std::vector<double> neighbor_counts(const Neighborhood& nb, std::span<const int> x, int site, int colors) {
    std::vector<double> n(static_cast<std::size_t>(colors), 0.0);
    for (int j : nb.adjacent[static_cast<std::size_t>(site)]) n[static_cast<std::size_t>(x[static_cast<std::size_t>(j)])] += 1.0;
    return n;
}

double emission_logdensity(const GaussianEmission& e, int site, int color) {
    const double r = e.observations[static_cast<std::size_t>(site)] - e.means[static_cast<std::size_t>(color)];
    return -0.5 * r * r / e.variance;
}

void check_emission(const GaussianEmission* e, int sites, int colors) {
    if (!e) return;
    if (static_cast<int>(e->observations.size()) != sites) throw DataError("one observation per site required");
    if (static_cast<int>(e->means.size()) != colors) throw ConfigError("one emission mean per color required");
    if (!(e->variance > 0.0)) throw ConfigError("emission variance must be positive");
    for (double y : e->observations)
        if (!std::isfinite(y)) throw DataError("non-finite observation");
}

std::vector<double> normalize_log(std::vector<double> w) {
    const double m = *std::max_element(w.begin(), w.end());
    double total = 0.0;
    for (double& v : w) total += (v = std::exp(v - m));
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> site_conditional(const Neighborhood& nb, std::span<const int> x, int site, double beta,
                                     int colors, const GaussianEmission* emission) {
    auto w = neighbor_counts(nb, x, site, colors);
    for (int g = 0; g < colors; ++g) {
        w[static_cast<std::size_t>(g)] *= beta;
        if (emission) w[static_cast<std::size_t>(g)] += emission_logdensity(*emission, site, g);
    }
    return normalize_log(std::move(w));
}

void check_cooccurrence(const Eigen::MatrixXd& p, std::span<const int> labels) {
    if (p.rows() != p.cols()) throw ConfigError("cooccurrence matrix must be square");
    if (static_cast<Eigen::Index>(labels.size()) != p.rows()) throw ConfigError("one label per site required");
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double v = p(i, j);
            if (!(v >= 0.0 && v <= 1.0)) throw DataError("cooccurrence probabilities must lie in [0, 1]");
            if (std::abs(v - p(j, i)) > 1e-12) throw DataError("cooccurrence matrix must be symmetric");
        }
}

}  // namespace

// ---------------------------------------------------------------- neighborhoods

bool Neighborhood::symmetric() const {
    for (std::size_t i = 0; i < adjacent.size(); ++i)
        for (int j : adjacent[i]) {
            if (j < 0 || j >= size() || static_cast<std::size_t>(j) == i) return false;
            const auto& back = adjacent[static_cast<std::size_t>(j)];
            if (std::find(back.begin(), back.end(), static_cast<int>(i)) == back.end()) return false;
        }
    return true;
}

std::size_t Neighborhood::ordered_pairs() const {
    std::size_t n = 0;
    for (const auto& a : adjacent) n += a.size();
    return n;
}

namespace {

Neighborhood lattice(int rows, int cols, bool diagonals) {
    if (rows < 1 || cols < 1) throw ConfigError("grid dimensions must be positive");
    Neighborhood nb;
    nb.adjacent.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            auto& a = nb.adjacent[static_cast<std::size_t>(r * cols + c)];
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    if (!diagonals && dr != 0 && dc != 0) continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr >= 0 && rr < rows && cc >= 0 && cc < cols) a.push_back(rr * cols + cc);
                }
            std::sort(a.begin(), a.end());
        }
    return nb;
}

}  // namespace

Neighborhood Neighborhood::four(int rows, int cols) { return lattice(rows, cols, false); }
Neighborhood Neighborhood::eight(int rows, int cols) { return lattice(rows, cols, true); }

KnnNeighborhood build_knn_neighborhood(const Eigen::MatrixXd& points, int k) {
    const auto n = static_cast<int>(points.rows());
    if (k < 1 || k >= n) throw ConfigError("k must lie in [1, number of points)");
    if (!points.allFinite()) throw DataError("non-finite coordinates");

    KnnNeighborhood out;
    out.nearest.resize(static_cast<std::size_t>(n));
    std::vector<std::pair<double, int>> d(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) d[m++] = {(points.row(i) - points.row(j)).squaredNorm(), j};
        std::partial_sort(d.begin(), d.begin() + k, d.end());
        auto& near = out.nearest[static_cast<std::size_t>(i)];
        for (int t = 0; t < k; ++t) near.push_back(d[static_cast<std::size_t>(t)].second);
    }

    out.symmetrized.adjacent.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j : out.nearest[static_cast<std::size_t>(i)]) {
            out.symmetrized.adjacent[static_cast<std::size_t>(i)].push_back(j);
            out.symmetrized.adjacent[static_cast<std::size_t>(j)].push_back(i);
        }
    for (auto& a : out.symmetrized.adjacent) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return out;
}

std::vector<std::pair<int, int>> KnnNeighborhood::asymmetric_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < nearest.size(); ++i)
        for (int j : nearest[i]) {
            const auto& back = nearest[static_cast<std::size_t>(j)];
            if (std::find(back.begin(), back.end(), static_cast<int>(i)) == back.end())
                out.emplace_back(static_cast<int>(i), j);
        }
    return out;
}

std::vector<int> KnnNeighborhood::sizes() const {
    std::vector<int> s;
    s.reserve(symmetrized.adjacent.size());
    for (const auto& a : symmetrized.adjacent) s.push_back(static_cast<int>(a.size()));
    return s;
}

std::vector<double> knn_size_distribution(int n, int k, std::size_t replicates, Stream& rng) {
    if (replicates == 0) throw ConfigError("need at least one replicate");
    std::vector<double> freq(static_cast<std::size_t>(2 * k + 1), 0.0);
    Eigen::MatrixXd pts(n, 3);
    for (std::size_t r = 0; r < replicates; ++r) {
        for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform();
        for (int s : build_knn_neighborhood(pts, k).sizes()) {
            if (static_cast<std::size_t>(s) >= freq.size()) freq.resize(static_cast<std::size_t>(s) + 1, 0.0);
            freq[static_cast<std::size_t>(s)] += 1.0;
        }
    }
    const double total = static_cast<double>(n) * static_cast<double>(replicates);
    for (double& f : freq) f /= total;
    return freq;
}

// ---------------------------------------------------------------- grids

LabelGrid LabelGrid::constant(int rows, int cols, int colors, NeighborhoodKind kind, int label) {
    if (kind == NeighborhoodKind::custom) throw ConfigError("custom neighborhoods need explicit adjacency");
    LabelGrid g;
    g.rows = rows;
    g.cols = cols;
    g.colors = colors;
    g.kind = kind;
    g.neighbors = kind == NeighborhoodKind::four ? Neighborhood::four(rows, cols) : Neighborhood::eight(rows, cols);
    g.labels.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), label);
    g.validate();
    return g;
}

void LabelGrid::validate() const {
    if (rows < 1 || cols < 1) throw ConfigError("grid dimensions must be positive");
    if (colors < 1) throw ConfigError("need at least one color");
    if (labels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw DataError("label count does not match the grid");
    if (neighbors.size() != size()) throw ConfigError("neighborhood size does not match the grid");
    for (int x : labels)
        if (x < 0 || x >= colors) throw DataError("label out of range");
}

void PottsParams::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and nonnegative");
    if (colors < 1) throw ConfigError("need at least one color");
}

int neighbor_agreement(const Neighborhood& nb, std::span<const int> labels) {
    if (static_cast<int>(labels.size()) != nb.size()) throw ConfigError("one label per site required");
    int s = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (int j : nb.adjacent[i]) s += labels[i] == labels[static_cast<std::size_t>(j)];
    return s;
}

std::vector<double> potts_conditional(const LabelGrid& grid, int site, const PottsParams& params,
                                      const GaussianEmission* emission) {
    params.validate();
    if (params.colors != grid.colors) throw ConfigError("color count differs between grid and parameters");
    if (site < 0 || site >= grid.size()) throw ConfigError("site out of range");
    check_emission(emission, grid.size(), grid.colors);
    return site_conditional(grid.neighbors, grid.labels, site, params.beta, grid.colors, emission);
}

SiteConditional potts_site_conditional(const Neighborhood& nb, const PottsParams& params) {
    params.validate();
    return [nb, params](int site, std::span<const int> x) {
        return site_conditional(nb, x, site, params.beta, params.colors, nullptr);
    };
}

// ---------------------------------------------------------------- Hammersley-Clifford

JointReconstruction hammersley_clifford_joint(const SiteConditional& conditional, int sites, int colors,
                                              std::span<const int> order) {
    if (sites > 16) throw ConfigError("at most 16 sites");
    if (colors < 2 || colors > 3) throw ConfigError("2 or 3 colors");
    const std::uint64_t total = configuration_count(sites, colors);

    std::vector<int> perm(static_cast<std::size_t>(sites));
    if (order.empty()) {
        std::iota(perm.begin(), perm.end(), 0);
    } else {
        if (static_cast<int>(order.size()) != sites) throw ConfigError("order must list every site once");
        perm.assign(order.begin(), order.end());
        auto sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < sites; ++i)
            if (sorted[static_cast<std::size_t>(i)] != i) throw ConfigError("order must list every site once");
    }

    auto evaluate = [&](int s, std::span<const int> z) {
        auto p = conditional(s, z);
        if (static_cast<int>(p.size()) != colors) throw ConfigError("conditional must return one value per color");
        for (double v : p)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("conditional probabilities must be finite and nonnegative");
        return p;
    };

    // log pi(x) / pi(0) = sum_k log p(x_s | 0 before s, x after s) / p(0 | same), s = order[k]
    std::vector<double> logw(total);
    std::vector<int> x(static_cast<std::size_t>(sites), 0);
    std::vector<int> z;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        z = x;
        double lr = 0.0;
        for (int s : perm) {
            const auto su = static_cast<std::size_t>(s);
            if (z[su] != 0) {
                const auto p = evaluate(s, z);
                if (p[static_cast<std::size_t>(z[su])] <= 0.0 || p[0] <= 0.0)
                    throw ConfigError("zero conditional probability: positivity fails");
                lr += std::log(p[static_cast<std::size_t>(z[su])]) - std::log(p[0]);
                z[su] = 0;
            }
        }
        logw[idx] = lr;
        advance(x, colors, [](int, int, int) {});
    }

    JointReconstruction out{normalize_log(std::move(logw)), true, 0.0};

    std::vector<std::uint64_t> stride(static_cast<std::size_t>(sites));
    std::uint64_t st = 1;
    for (auto& v : stride) {
        v = st;
        st *= static_cast<std::uint64_t>(colors);
    }
    std::fill(x.begin(), x.end(), 0);
    std::vector<double> local(static_cast<std::size_t>(colors));
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        for (int s = 0; s < sites; ++s) {
            const auto su = static_cast<std::size_t>(s);
            const std::uint64_t base = idx - static_cast<std::uint64_t>(x[su]) * stride[su];
            double sum = 0.0;
            for (int g = 0; g < colors; ++g)
                sum += local[static_cast<std::size_t>(g)] = out.probabilities[base + static_cast<std::uint64_t>(g) * stride[su]];
            const auto p = evaluate(s, x);
            for (int g = 0; g < colors; ++g)
                out.max_mismatch = std::max(out.max_mismatch,
                                            std::abs(local[static_cast<std::size_t>(g)] / sum - p[static_cast<std::size_t>(g)]));
        }
        advance(x, colors, [](int, int, int) {});
    }
    out.compatible = out.max_mismatch <= 1e-10;
    return out;
}

// ---------------------------------------------------------------- enumeration

AgreementCounts enumerate_agreement(const Neighborhood& nb, int colors) {
    configuration_count(nb.size(), colors);
    if (!nb.symmetric()) throw ConfigError("neighborhood must be symmetric");
    AgreementCounts out;
    out.counts.assign(nb.ordered_pairs() + 1, 0.0);
    std::vector<int> x(static_cast<std::size_t>(nb.size()), 0);
    auto s = static_cast<int>(nb.ordered_pairs());
    do {
        out.counts[static_cast<std::size_t>(s)] += 1.0;
    } while (advance(x, colors, [&](int i, int from, int to) { s += agreement_delta(nb, x, i, from, to); }));
    return out;
}

double AgreementCounts::log_sum(double beta) const {
    std::vector<double> terms;
    for (std::size_t s = 0; s < counts.size(); ++s)
        if (counts[s] > 0.0) terms.push_back(std::log(counts[s]) + beta * static_cast<double>(s));
    return log_sum_exp(terms);
}

std::vector<double> AgreementCounts::pmf(double beta) const {
    const double ls = log_sum(beta);
    std::vector<double> p(counts.size(), 0.0);
    for (std::size_t s = 0; s < counts.size(); ++s)
        if (counts[s] > 0.0) p[s] = std::exp(std::log(counts[s]) + beta * static_cast<double>(s) - ls);
    return p;
}

double AgreementCounts::mean(double beta) const {
    const auto p = pmf(beta);
    double m = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) m += static_cast<double>(s) * p[s];
    return m;
}

// One odometer pass with incremental S updates, O(mn G^{mn}) overall against
// O((mn)^2 2^{mn}) for recomputing S from scratch at every configuration.
ExactPartition exact_partition(std::span<const double> betas, int rows, int cols, int colors) {
    const auto counts = enumerate_agreement(Neighborhood::four(rows, cols), colors);
    ExactPartition out;
    for (double b : betas) {
        if (!std::isfinite(b)) throw ConfigError("beta must be finite");
        out.betas.push_back(b);
        out.log_sum.push_back(counts.log_sum(b));
        out.log_z.push_back(-out.log_sum.back());
    }
    return out;
}

std::vector<double> potts_configuration_probabilities(const Neighborhood& nb, const PottsParams& params,
                                                      const GaussianEmission* emission) {
    params.validate();
    const std::uint64_t total = configuration_count(nb.size(), params.colors);
    if (!nb.symmetric()) throw ConfigError("neighborhood must be symmetric");
    check_emission(emission, nb.size(), params.colors);

    std::vector<int> x(static_cast<std::size_t>(nb.size()), 0);
    auto s = static_cast<int>(nb.ordered_pairs());
    double e = 0.0;
    if (emission)
        for (int i = 0; i < nb.size(); ++i) e += emission_logdensity(*emission, i, 0);
    std::vector<double> logw;
    logw.reserve(total);
    do {
        logw.push_back(0.5 * params.beta * s + e);
    } while (advance(x, params.colors, [&](int i, int from, int to) {
        s += agreement_delta(nb, x, i, from, to);
        if (emission) e += emission_logdensity(*emission, i, to) - emission_logdensity(*emission, i, from);
    }));
    return normalize_log(std::move(logw));
}

// ---------------------------------------------------------------- samplers

std::array<std::vector<int>, 2> checkerboard_classes(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("grid dimensions must be positive");
    std::array<std::vector<int>, 2> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out[static_cast<std::size_t>((r + c) % 2)].push_back(r * cols + c);
    return out;
}

std::vector<double> checkerboard_gibbs(LabelGrid& grid, const PottsParams& params, Stream& rng, std::size_t sweeps,
                                       const GaussianEmission* emission) {
    grid.validate();
    params.validate();
    if (grid.kind != NeighborhoodKind::four) throw ConfigError("checkerboard updates need the four-neighbor grid");
    if (params.colors != grid.colors) throw ConfigError("color count differs between grid and parameters");
    check_emission(emission, grid.size(), grid.colors);

    const auto parity = checkerboard_classes(grid.rows, grid.cols);

    std::vector<double> trace;
    trace.reserve(sweeps);
    std::vector<std::vector<double>> probs;
    for (std::size_t t = 0; t < sweeps; ++t) {
        for (const auto& block : parity) {
            probs.clear();
            for (int i : block)
                probs.push_back(site_conditional(grid.neighbors, grid.labels, i, params.beta, grid.colors, emission));
            for (std::size_t m = 0; m < block.size(); ++m)
                grid.labels[static_cast<std::size_t>(block[m])] = static_cast<int>(categorical(rng, probs[m]));
        }
        trace.push_back(neighbor_agreement(grid.neighbors, grid.labels));
    }
    return trace;
}

SiteStep potts_site_mh(LabelGrid& grid, const PottsParams& params, ColorProposal proposal, Stream& rng) {
    const int site = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.size())));
    const auto su = static_cast<std::size_t>(site);
    const auto n = neighbor_counts(grid.neighbors, grid.labels, site, grid.colors);
    const int current = grid.labels[su];

    int proposed;
    double log_q_ratio = 0.0;
    if (proposal == ColorProposal::uniform) {
        proposed = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.colors)));
    } else {
        // Neighbors of the site do not include it, so the reverse weights are the same vector.
        std::vector<double> w(n);
        for (double& v : w) v = v > 0.0 ? v : 1.0;
        proposed = static_cast<int>(categorical(rng, w));
        log_q_ratio = std::log(w[static_cast<std::size_t>(current)]) - std::log(w[static_cast<std::size_t>(proposed)]);
    }
    if (proposed == current) return {site, current, proposed, true};

    const double log_alpha =
        params.beta * (n[static_cast<std::size_t>(proposed)] - n[static_cast<std::size_t>(current)]) + log_q_ratio;
    const bool accept = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
    if (accept) grid.labels[su] = proposed;
    return {site, current, proposed, accept};
}

MhSweeps potts_mh_sweeps(LabelGrid& grid, const PottsParams& params, ColorProposal proposal, Stream& rng,
                         std::size_t sweeps) {
    grid.validate();
    params.validate();
    if (params.colors != grid.colors) throw ConfigError("color count differs between grid and parameters");
    MhSweeps out{{}, 0.0};
    out.statistic.reserve(sweeps);
    std::size_t moves = 0, accepted = 0;
    for (std::size_t t = 0; t < sweeps; ++t) {
        for (int m = 0; m < grid.size(); ++m) {
            const auto step = potts_site_mh(grid, params, proposal, rng);
            if (step.proposed != step.current) {
                ++moves;
                accepted += step.accepted;
            }
        }
        out.statistic.push_back(neighbor_agreement(grid.neighbors, grid.labels));
    }
    // Among proposals that change the label.
    out.acceptance = moves ? static_cast<double>(accepted) / static_cast<double>(moves) : 1.0;
    return out;
}

// ---------------------------------------------------------------- path sampling

double PathSampling::integral(double a0, double a1) const {
    if (a0 > a1) return -integral(a1, a0);
    if (betas.empty() || a0 < betas.front() || a1 > betas.back())
        throw ConfigError("integration limits outside the beta grid");
    auto f = [&](std::size_t i, double b) {
        const double w = (b - betas[i]) / (betas[i + 1] - betas[i]);
        return (1.0 - w) * mean_statistic[i] + w * mean_statistic[i + 1];
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < betas.size(); ++i) {
        const double lo = std::max(a0, betas[i]);
        const double hi = std::min(a1, betas[i + 1]);
        if (lo < hi) total += 0.5 * (hi - lo) * (f(i, lo) + f(i, hi));
    }
    return total;
}

double PathSampling::log_sum_at(double beta) const { return log_sum.front() + integral(betas.front(), beta); }

PathSampling path_sampling(std::span<const double> betas, int rows, int cols, int colors, Stream& rng,
                           std::size_t sweeps, std::size_t burnin) {
    if (betas.size() < 2 || betas.front() != 0.0) throw ConfigError("beta grid must start at 0 and have two points");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1]) || !std::isfinite(betas[i])) throw ConfigError("beta grid must increase strictly");
    if (sweeps < 2) throw ConfigError("need at least two recorded sweeps");

    auto grid = LabelGrid::constant(rows, cols, colors);
    for (int& x : grid.labels) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(colors)));

    PathSampling out;
    out.betas.assign(betas.begin(), betas.end());
    out.monotone = true;
    for (double b : betas) {
        // exp(b S) with S over ordered pairs is the Potts law at interaction 2b.
        const PottsParams params{2.0 * b, colors};
        checkerboard_gibbs(grid, params, rng, burnin);
        const auto trace = checkerboard_gibbs(grid, params, rng, sweeps);
        const auto est = trace.size() >= 200 ? batch_mean_se(trace) : mean_se(trace);
        out.mean_statistic.push_back(est.mean);
        out.standard_error.push_back(est.se);
    }
    out.log_sum.push_back(grid.size() * std::log(static_cast<double>(colors)));
    for (std::size_t i = 1; i < betas.size(); ++i) {
        out.log_sum.push_back(out.log_sum.back() + 0.5 * (betas[i] - betas[i - 1]) *
                                                       (out.mean_statistic[i] + out.mean_statistic[i - 1]));
        if (out.mean_statistic[i] < out.mean_statistic[i - 1]) out.monotone = false;
    }
    return out;
}

// ---------------------------------------------------------------- estimators

SegmentationEstimate mpm_map_from_draws(const std::vector<std::vector<int>>& draws, int colors) {
    if (draws.empty()) throw DataError("no draws");
    if (colors < 1) throw ConfigError("need at least one color");
    const std::size_t n = draws.front().size();
    std::vector<std::vector<std::size_t>> marg(n, std::vector<std::size_t>(static_cast<std::size_t>(colors), 0));
    std::map<std::vector<int>, std::pair<std::size_t, std::size_t>> seen;  // count, first index
    for (std::size_t d = 0; d < draws.size(); ++d) {
        const auto& x = draws[d];
        if (x.size() != n) throw DataError("draws differ in length");
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] < 0 || x[i] >= colors) throw DataError("label out of range");
            ++marg[i][static_cast<std::size_t>(x[i])];
        }
        auto [it, fresh] = seen.try_emplace(x, 0, d);
        ++it->second.first;
    }
    SegmentationEstimate out;
    for (const auto& m : marg) out.mpm.push_back(static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin()));
    const std::pair<std::size_t, std::size_t>* best = nullptr;
    for (const auto& [x, cf] : seen)
        if (!best || cf.first > best->first || (cf.first == best->first && cf.second < best->second)) {
            best = &cf;
            out.map = x;
        }
    return out;
}

SegmentationEstimate mpm_map_from_table(std::span<const double> probabilities, int sites, int colors) {
    const std::uint64_t total = configuration_count(sites, colors);
    if (probabilities.size() != total) throw ConfigError("table size must be colors^sites");
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(sites),
                                          std::vector<double>(static_cast<std::size_t>(colors), 0.0));
    std::vector<int> x(static_cast<std::size_t>(sites), 0);
    std::uint64_t best = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const double p = probabilities[idx];
        if (!(p >= 0.0)) throw DataError("probabilities must be nonnegative");
        for (std::size_t i = 0; i < x.size(); ++i) marg[i][static_cast<std::size_t>(x[i])] += p;
        if (p > probabilities[best]) best = idx;
        advance(x, colors, [](int, int, int) {});
    }
    SegmentationEstimate out;
    for (const auto& m : marg) out.mpm.push_back(static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin()));
    for (int i = 0; i < sites; ++i) {
        out.map.push_back(static_cast<int>(best % static_cast<std::uint64_t>(colors)));
        best /= static_cast<std::uint64_t>(colors);
    }
    return out;
}

double l3_risk(const Eigen::MatrixXd& p, std::span<const int> labels) {
    check_cooccurrence(p, labels);
    double r = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (i != j && labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) r += p(i, j);
    return r;
}

double l4_risk(const Eigen::MatrixXd& p, std::span<const int> labels) {
    check_cooccurrence(p, labels);
    double r = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (i != j && labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) r += 1.0 - p(i, j);
    return r;
}

Clustering l4_clustering(const Eigen::MatrixXd& p, std::vector<int> initial, int classes) {
    check_cooccurrence(p, initial);
    if (classes < 1) throw ConfigError("need at least one class");
    for (int x : initial)
        if (x < 0 || x >= classes) throw DataError("initial label out of range");

    Clustering out{std::move(initial), {}, 0};
    out.risk.push_back(l4_risk(p, out.labels));
    const auto n = static_cast<Eigen::Index>(out.labels.size());
    std::vector<double> cost(static_cast<std::size_t>(classes));
    constexpr std::size_t kMaxPasses = 100'000;
    bool moved = true;
    while (moved) {
        if (++out.passes > kMaxPasses) throw NumericalError("reallocation did not settle");
        moved = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            std::fill(cost.begin(), cost.end(), 0.0);
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) cost[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(j)])] += 1.0 - p(i, j);
            const auto cur = static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)]);
            const auto best = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
            if (cost[best] < cost[cur] - 1e-12 * (1.0 + cost[cur])) {
                out.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
                out.risk.push_back(out.risk.back() + 2.0 * (cost[best] - cost[cur]));
                moved = true;
            }
        }
    }
    return out;
}

Clustering l4_clustering_restarts(const Eigen::MatrixXd& p, int classes, std::size_t restarts, Stream& rng) {
    if (restarts == 0) throw ConfigError("need at least one restart");
    if (classes < 1) throw ConfigError("need at least one class");
    std::optional<Clustering> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<int> start(static_cast<std::size_t>(p.rows()));
        for (int& x : start) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
        auto c = l4_clustering(p, std::move(start), classes);
        if (!best || c.risk.back() < best->risk.back()) best = std::move(c);
    }
    return *best;
}

SamePowerTarget same_power_target(int kappa) {
    if (kappa < 1) throw ConfigError("kappa must be a positive integer");
    return {kappa};
}

double SamePowerTarget::replicated_log_density(const Eigen::MatrixXd& joint, Eigen::Index x) const {
    if (x < 0 || x >= joint.rows()) throw ConfigError("x out of range");
    if ((joint.array() < 0.0).any() || !joint.allFinite()) throw DataError("joint must be finite and nonnegative");
    const int m = static_cast<int>(joint.cols());
    configuration_count(kappa, m);
    std::vector<int> theta(static_cast<std::size_t>(kappa), 0);
    double total = 0.0;
    do {
        double prod = 1.0;
        for (int t : theta) prod *= joint(x, t);
        total += prod;
    } while (advance(theta, m, [](int, int, int) {}));
    return std::log(total);
}

// ---------------------------------------------------------------- I/O

LabelGrid read_label_grid(std::istream& in, int colors) {
    if (colors < 0) throw ConfigError("colors must be nonnegative");
    std::vector<int> labels;
    int cols = -1, rows = 0, top = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::vector<int> row;
        std::string tok;
        while (ss >> tok) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw DataError("line " + std::to_string(lineno) + ": not an integer label");
            if (v < 1 || (colors > 0 && v > colors))
                throw DataError("line " + std::to_string(lineno) + ": label out of range");
            top = std::max(top, v);
            row.push_back(v - 1);
        }
        if (row.empty()) continue;
        if (cols >= 0 && static_cast<int>(row.size()) != cols)
            throw DataError("line " + std::to_string(lineno) + ": ragged row");
        cols = static_cast<int>(row.size());
        ++rows;
        labels.insert(labels.end(), row.begin(), row.end());
    }
    if (rows == 0) throw DataError("empty label grid");
    auto grid = LabelGrid::constant(rows, cols, colors > 0 ? colors : std::max(top, 2));
    grid.labels = std::move(labels);
    grid.validate();
    return grid;
}

void write_label_grid(const LabelGrid& grid, std::ostream& out) {
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) out << (c ? " " : "") << grid.at(r, c) + 1;
        out << '\n';
    }
}

LabelGrid read_pgm(std::istream& in, int colors) {
    if (colors < 2 || colors > 256) throw ConfigError("quantize into 2..256 colors");
    auto token = [&]() {
        std::string t;
        while (in >> std::ws && in.peek() == '#') std::getline(in, t);
        if (!(in >> t)) throw DataError("truncated PGM header");
        return t;
    };
    auto number = [&]() {
        const auto t = token();
        std::size_t used = 0;
        long v = -1;
        try {
            v = std::stol(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size() || v < 0) throw DataError("bad PGM header field '" + t + "'");
        return v;
    };
    const auto magic = token();
    if (magic != "P2" && magic != "P5") throw DataError("not a P2/P5 PGM file");
    const long w = number(), h = number(), maxval = number();
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw DataError("bad PGM dimensions or maxval");

    auto grid = LabelGrid::constant(static_cast<int>(h), static_cast<int>(w), colors);
    const auto quantize = [&](long v) {
        if (v > maxval) throw DataError("gray level above maxval");
        return static_cast<int>(std::min<long>(colors - 1, v * colors / (maxval + 1)));
    };
    if (magic == "P2") {
        for (int& x : grid.labels) x = quantize(number());
    } else {
        in.get();  // single whitespace after maxval
        for (int& x : grid.labels) {
            long v = in.get();
            if (maxval > 255) v = v * 256 + in.get();
            if (!in) throw DataError("truncated PGM raster");
            x = quantize(v);
        }
    }
    return grid;
}

}  // namespace bayescomp
