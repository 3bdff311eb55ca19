#pragma once

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bayescomp/dist.hpp"
#include "bayescomp/random.hpp"

namespace bayescomp::cli {

using Json = nlohmann::ordered_json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Output {
    Json result;
    std::optional<Table> table;  // trace or plot data
    bool dataset = false;        // table is the artifact: always written as CSV
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iters;
    std::optional<std::size_t> burnin;
    std::string out;
    std::string format = "json";
    std::string trace;

    // Substream of the global seed keyed by the command name. ConfigError without --seed.
    [[nodiscard]] Stream stream(const std::string& command) const;
    // iters > burnin >= 0 after defaults.
    [[nodiscard]] std::pair<std::size_t, std::size_t> run_length(std::size_t iters_default,
                                                                 std::size_t burnin_default) const;
};

// Command name (e.g. "capture darroch") and its body.
struct Action {
    std::string command;
    std::function<Output()> run;
};

struct Context {
    Common common;
    std::optional<Action> action;
};

// Registers subcommands whose callbacks set ctx.action.
void register_core(CLI::App& app, Context& ctx);
void register_models(CLI::App& app, Context& ctx);
void register_series(CLI::App& app, Context& ctx);
void register_image(CLI::App& app, Context& ctx);
void register_synth(CLI::App& app, Context& ctx);

// ---------------------------------------------------------------- I/O helpers

// Numbers with 17 significant digits; ordered keys; two-space indent.
std::string dump_json(const Json& j);
void write_csv(const Table& t, std::ostream& out);

// Header row, comma separated, numeric fields. DataError carries the line number.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::vector<double> column(const std::string& name) const;
    [[nodiscard]] Eigen::MatrixXd columns(const std::vector<std::string>& names) const;
};

CsvData read_csv(const std::string& path);

// "a,b;c,d"
Eigen::MatrixXd parse_matrix(const std::string& text);
// "normal:0,1"
ScalarFamily parse_family(const std::string& spec);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);
// Non-finite values become null.
Json number(double x);

}  // namespace bayescomp::cli
