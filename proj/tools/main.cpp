#include <fstream>
#include <sstream>
#include <iostream>

#include "bayescomp/errors.hpp"
#include "cli.hpp"

using namespace bayescomp;
using namespace bayescomp::cli;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

std::string csv_text(const Table& t) {
    std::ostringstream s;
    write_csv(t, s);
    return s.str();
}

int run(Context& ctx) {
    const Action& a = *ctx.action;
    const Output out = a.run();
    const Common& c = ctx.common;
    if (!c.trace.empty()) {
        if (!out.table) throw ConfigError("'" + a.command + "' has no trace to write");
        emit(c.trace, csv_text(*out.table));
    }
    if (out.dataset || c.format == "csv") {
        if (!out.table) throw ConfigError("'" + a.command + "' has no tabular output");
        emit(c.out, csv_text(*out.table));
        return 0;
    }
    Json doc;
    doc["command"] = a.command;
    doc["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    doc["result"] = out.result;
    emit(c.out, dump_json(doc));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian computation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    Common& c = ctx.common;
    app.add_option("--seed", c.seed, "64-bit seed; required for stochastic commands");
    app.add_option("--iters", c.iters, "Iterations");
    app.add_option("--burnin", c.burnin, "Burn-in iterations");
    app.add_option("--out", c.out, "Output file (default stdout)");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--trace", c.trace, "Also write the trace / plot data as CSV to this file");

    register_core(app, ctx);
    register_models(app, ctx);
    register_series(app, ctx);
    register_image(app, ctx);
    register_synth(app, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (!ctx.action) {
        std::cerr << "error: no command selected\n";
        return 2;
    }
    try {
        return run(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
