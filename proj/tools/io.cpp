#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bayescomp/errors.hpp"
#include "cli.hpp"

namespace bayescomp::cli {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void dump(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(k).dump() + ": ";
                dump(v, out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump(j[i], out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace

Stream Common::stream(const std::string& command) const {
    if (!seed) throw ConfigError("--seed is required for " + command);
    return Stream(*seed).split(fnv1a(command));
}

std::pair<std::size_t, std::size_t> Common::run_length(std::size_t iters_default, std::size_t burnin_default) const {
    const std::size_t it = iters.value_or(iters_default);
    const std::size_t b = burnin.value_or(burnin_default);
    if (!(it > b)) throw ConfigError("--iters must exceed --burnin");
    return {it, b};
}

std::string dump_json(const Json& j) {
    std::string out;
    dump(j, out, 0);
    out += '\n';
    return out;
}

void write_csv(const Table& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << (std::isfinite(row[i]) ? format_double(row[i]) : "NA");
        out << '\n';
    }
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    CsvData d;
    std::string line;
    std::size_t lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::string cur;
        std::istringstream ss(s);
        while (std::getline(ss, cur, ',')) f.push_back(cur);
        if (!s.empty() && s.back() == ',') f.emplace_back();
        return f;
    };
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (d.header.empty()) {
            for (auto& f : fields) d.header.push_back(trim(f));
            continue;
        }
        if (fields.size() != d.header.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
        std::vector<double> row;
        for (auto& f : fields) {
            const auto t = trim(f);
            double v = 0.0;
            const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
                throw DataError(path + ":" + std::to_string(lineno) + ": not a number '" + t + "'");
            row.push_back(v);
        }
        d.rows.push_back(std::move(row));
    }
    if (d.header.empty()) throw DataError(path + ": missing header row");
    if (d.rows.empty()) throw DataError(path + ": no data rows");
    return d;
}

std::vector<double> CsvData::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("no column '" + name + "'");
    const auto j = static_cast<std::size_t>(it - header.begin());
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[j]);
    return v;
}

Eigen::MatrixXd CsvData::columns(const std::vector<std::string>& names) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto v = column(names[c]);
        for (std::size_t r = 0; r < v.size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r];
    }
    return m;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream rs(text);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<double> r;
        std::istringstream cs(row);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("bad matrix entry '" + cell + "'");
            }
        }
        if (!rows.empty() && r.size() != rows.front().size()) throw ConfigError("matrix rows differ in length");
        rows.push_back(std::move(r));
    }
    if (rows.empty() || rows.front().empty()) throw ConfigError("empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

ScalarFamily parse_family(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        const auto m = parse_matrix(spec.substr(colon + 1));
        if (m.rows() != 1) throw ConfigError("family parameters are one comma-separated list");
        params.assign(m.data(), m.data() + m.size());
    }
    return ScalarFamily(bayescomp::parse_family(name), params);
}

Json to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

Json to_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
    return a;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace bayescomp::cli
