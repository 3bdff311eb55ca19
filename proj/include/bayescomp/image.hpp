#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bayescomp/errors.hpp"
#include "bayescomp/random.hpp"

namespace bayescomp {

// Symmetric adjacency lists over sites 0..n-1.
struct Neighborhood {
    std::vector<std::vector<int>> adjacent;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(adjacent.size()); }
    [[nodiscard]] int degree(int site) const { return static_cast<int>(adjacent.at(static_cast<std::size_t>(site)).size()); }
    [[nodiscard]] bool symmetric() const;
    [[nodiscard]] std::size_t ordered_pairs() const;

    // Row-major sites, site = r * cols + c.
    static Neighborhood four(int rows, int cols);
    static Neighborhood eight(int rows, int cols);
};

// ---------------------------------------------------------------- k nearest neighbors

struct KnnNeighborhood {
    std::vector<std::vector<int>> nearest;  // k nearest of each point, ties by index
    Neighborhood symmetrized;

    // (i, j) with j among i's nearest but not i among j's.
    [[nodiscard]] std::vector<std::pair<int, int>> asymmetric_pairs() const;
    [[nodiscard]] std::vector<int> sizes() const;
};

// Rows of `points` are coordinates. ConfigError unless 1 <= k < number of points.
KnnNeighborhood build_knn_neighborhood(const Eigen::MatrixXd& points, int k);

// Frequencies of the symmetrized neighborhood size (index 0..max seen) over all points
// of `replicates` uniform samples of n points in [0,1]^3.
std::vector<double> knn_size_distribution(int n, int k, std::size_t replicates, Stream& rng);

// ---------------------------------------------------------------- label grids

enum class NeighborhoodKind { four, eight, custom };

// Labels are 0..colors-1 in memory and 1..colors in text files.
struct LabelGrid {
    int rows = 0;
    int cols = 0;
    int colors = 2;
    std::vector<int> labels;  // row-major
    Neighborhood neighbors;
    NeighborhoodKind kind = NeighborhoodKind::four;

    static LabelGrid constant(int rows, int cols, int colors, NeighborhoodKind kind = NeighborhoodKind::four,
                              int label = 0);

    [[nodiscard]] int size() const noexcept { return rows * cols; }
    [[nodiscard]] int site(int r, int c) const noexcept { return r * cols + c; }
    [[nodiscard]] int at(int r, int c) const { return labels.at(static_cast<std::size_t>(site(r, c))); }
    void validate() const;
};

struct PottsParams {
    double beta = 0.0;
    int colors = 2;
    void validate() const;
};

// Per-color mean, common variance; observations indexed by site.
struct GaussianEmission {
    std::vector<double> observations;
    std::vector<double> means;
    double variance = 1.0;
};

// S(x) = sum_i sum_{j ~ i} 1{x_i = x_j}: every unordered neighbor pair counts twice.
// The Potts law with interaction beta is proportional to exp(beta S(x) / 2), so
// sum_x exp(beta S(x)) normalizes the model at interaction 2 beta.
int neighbor_agreement(const Neighborhood& nb, std::span<const int> labels);

// P(x_site = g | rest) proportional to exp(beta n_g(site)) [times the emission density].
std::vector<double> potts_conditional(const LabelGrid& grid, int site, const PottsParams& params,
                                      const GaussianEmission* emission = nullptr);

// Sites 0..n-1 with colors each; configuration index sum_i x_i colors^i.
using SiteConditional = std::function<std::vector<double>(int site, std::span<const int> config)>;

SiteConditional potts_site_conditional(const Neighborhood& nb, const PottsParams& params);

// ---------------------------------------------------------------- Hammersley-Clifford

struct JointReconstruction {
    std::vector<double> probabilities;  // by configuration index
    bool compatible;
    double max_mismatch;                // re-derived vs supplied conditionals
};

// Telescoping-ratio joint from the reference configuration (all zeros), site order
// given or 0..n-1. ConfigError on a zero conditional probability or beyond 16
// sites, 3 colors or 2^24 configurations.
JointReconstruction hammersley_clifford_joint(const SiteConditional& conditional, int sites, int colors,
                                              std::span<const int> order = {});

// ---------------------------------------------------------------- exact enumeration

// Maximal cliques of the eight-neighbor grid are its 2x2 squares.
constexpr std::int64_t clique_count_eight(std::int64_t rows, std::int64_t cols) {
    if (rows < 2 || cols < 2) throw ConfigError("grid needs at least 2 rows and 2 columns");
    return (rows - 1) * (cols - 1);
}

// Number of configurations with each value of S(x). ConfigError beyond 2^24 configurations.
struct AgreementCounts {
    std::vector<double> counts;  // index S

    [[nodiscard]] double log_sum(double beta) const;  // log sum_x exp(beta S(x))
    [[nodiscard]] std::vector<double> pmf(double beta) const;
    [[nodiscard]] double mean(double beta) const;
};

AgreementCounts enumerate_agreement(const Neighborhood& nb, int colors);

// The normalizing constant is Z(beta) = 1 / sum; log_z = -log_sum.
struct ExactPartition {
    std::vector<double> betas;
    std::vector<double> log_sum;
    std::vector<double> log_z;
};

ExactPartition exact_partition(std::span<const double> betas, int rows, int cols, int colors);

// Configuration probabilities by index, optionally conditioned on Gaussian observations.
std::vector<double> potts_configuration_probabilities(const Neighborhood& nb, const PottsParams& params,
                                                      const GaussianEmission* emission = nullptr);

// ---------------------------------------------------------------- samplers

// Sites with even and odd r + c.
std::array<std::vector<int>, 2> checkerboard_classes(int rows, int cols);

// Updates all even (r + c) sites from their conditionals, then all odd ones.
// Returns S(x) after each sweep. ConfigError unless the grid is four-neighbor.
std::vector<double> checkerboard_gibbs(LabelGrid& grid, const PottsParams& params, Stream& rng, std::size_t sweeps,
                                       const GaussianEmission* emission = nullptr);

enum class ColorProposal {
    uniform,
    neighbor  // proportional to neighbor counts, zero counts weighted 1
};

struct SiteStep {
    int site;
    int current;
    int proposed;
    bool accepted;
};

SiteStep potts_site_mh(LabelGrid& grid, const PottsParams& params, ColorProposal proposal, Stream& rng);

struct MhSweeps {
    std::vector<double> statistic;  // S(x) after each sweep of grid.size() site steps
    double acceptance;
};

MhSweeps potts_mh_sweeps(LabelGrid& grid, const PottsParams& params, ColorProposal proposal, Stream& rng,
                         std::size_t sweeps);

// ---------------------------------------------------------------- path sampling

struct PathSampling {
    std::vector<double> betas;     // starts at 0
    std::vector<double> mean_statistic;
    std::vector<double> standard_error;
    std::vector<double> log_sum;   // sites log G + integral from 0
    bool monotone;                 // false: sampling noise made the estimated f decrease

    // Integral of the piecewise-linear interpolant of f over [a0, a1] within the grid.
    [[nodiscard]] double integral(double a0, double a1) const;
    [[nodiscard]] double log_sum_at(double beta) const;
};

// Estimates log sum_x exp(beta S(x)) with f(beta) the mean of S under that law, the
// Potts model at interaction 2 beta. Checkerboard Gibbs at every grid point, warm
// started from the previous one; `burnin` sweeps discarded each time.
PathSampling path_sampling(std::span<const double> betas, int rows, int cols, int colors, Stream& rng,
                           std::size_t sweeps, std::size_t burnin);

// ---------------------------------------------------------------- estimators

struct SegmentationEstimate {
    std::vector<int> mpm;  // sitewise posterior mode, ties to the smallest label
    std::vector<int> map;  // configuration mode
};

// MAP is the most frequent draw, ties by first occurrence. DataError on no draws.
SegmentationEstimate mpm_map_from_draws(const std::vector<std::vector<int>>& draws, int colors);
SegmentationEstimate mpm_map_from_table(std::span<const double> probabilities, int sites, int colors);

// sum_{i != j} P_ij 1{xhat_i != xhat_j}
double l3_risk(const Eigen::MatrixXd& cooccurrence, std::span<const int> labels);
// sum_{i != j} (1 - P_ij) 1{xhat_i == xhat_j}
double l4_risk(const Eigen::MatrixXd& cooccurrence, std::span<const int> labels);

struct Clustering {
    std::vector<int> labels;
    std::vector<double> risk;  // L4 risk at the start and after every move
    std::size_t passes;
};

// Reallocates one site at a time to the class (among 0..classes-1) with the smallest
// sum of P(x_i != x_j) over its members, only on strict improvement, until a pass makes no move.
Clustering l4_clustering(const Eigen::MatrixXd& cooccurrence, std::vector<int> initial, int classes);

// Best of `restarts` random starts.
Clustering l4_clustering_restarts(const Eigen::MatrixXd& cooccurrence, int classes, std::size_t restarts, Stream& rng);

// pi(x | y)^kappa as the product of kappa independently integrated copies.
struct SamePowerTarget {
    int kappa = 1;

    [[nodiscard]] double operator()(double log_marginal) const noexcept { return kappa * log_marginal; }
    // log sum over (theta_1..theta_kappa) of prod_k joint(x, theta_k); rows of joint are x.
    [[nodiscard]] double replicated_log_density(const Eigen::MatrixXd& joint, Eigen::Index x) const;
};

SamePowerTarget same_power_target(int kappa);

// ---------------------------------------------------------------- grid I/O

// Whitespace-separated labels 1..colors, one row per line. colors = 0 takes the largest label.
LabelGrid read_label_grid(std::istream& in, int colors = 0);
void write_label_grid(const LabelGrid& grid, std::ostream& out);

// P2 or P5 image, gray levels quantized into `colors` equal bins.
LabelGrid read_pgm(std::istream& in, int colors);

}  // namespace bayescomp
