#include "mintrace/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mintrace/errors.hpp"

namespace mintrace::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json to_json(const Ordering& sigma) { return sigma.one_based(); }

Ordering ordering_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("ordering must be a JSON integer array");
    return Ordering::from_one_based(j.get<std::vector<int>>());
}

json to_json(const Dag& g) {
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({e.from + 1, e.to + 1});
    return {{"p", g.size()}, {"edges", edges}};
}

json to_json(const Move& move) { return {{"kind", to_string(move.kind)}, {"i", move.i}, {"j", move.j}}; }

json to_json(const HillClimbTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        auto entry = to_json(s.move);
        entry["objective"] = s.objective;
        steps.push_back(entry);
    }
    return {{"initial", to_json(trace.initial)},
            {"initial_objective", trace.initial_objective},
            {"steps", steps},
            {"final", to_json(trace.final_ordering)},
            {"iterations", trace.iterations()}};
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) + 0.0);
        rows.push_back(row);
    }
    return rows;
}

json to_json(const DecompositionResult& d) {
    return {{"b_sigma", matrix_to_json(d.b_sigma)},
            {"omega_sigma", std::vector<double>(d.omega_sigma.data(), d.omega_sigma.data() + d.omega_sigma.size())},
            {"trace", d.trace},
            {"dag", to_json(d.dag())}};
}

json to_json(const GapDiagnostic& g) {
    const bool finite = std::isfinite(g.ratio);
    return {{"min_offtrue_trace", finite ? json(g.min_offtrue_trace) : json(nullptr)},
            {"true_trace", g.true_trace},
            {"ratio", finite ? json(g.ratio) : json(nullptr)},
            {"xi_lower_bound", finite ? json(g.xi_lower_bound) : json(nullptr)},
            {"every_ordering_true", !finite}};
}

json model_to_json(const LinearSem& sem, std::optional<std::uint64_t> seed) {
    const int p = sem.size();
    json edges = json::array();
    const auto g = sem.dag();
    for (const auto& e : g.edges()) edges.push_back({e.from + 1, e.to + 1});
    std::vector<double> b;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) b.push_back(sem.b(i, j));
    }
    json out = {{"p", p},
                {"edges", edges},
                {"b", b},
                {"omega", std::vector<double>(sem.omega.data(), sem.omega.data() + p)},
                {"seed", seed ? json(*seed) : json(nullptr)}};
    if (sem.increasing_along) out["increasing_along"] = to_json(*sem.increasing_along);
    return out;
}

LinearSem model_from_json(const json& j) {
    try {
        const int p = j.at("p").get<int>();
        if (p < 1) throw ConfigError("model p must be positive");
        const auto b = j.at("b").get<std::vector<double>>();
        const auto omega = j.at("omega").get<std::vector<double>>();
        if (b.size() != static_cast<std::size_t>(p) * p || omega.size() != static_cast<std::size_t>(p)) {
            throw ConfigError("model arrays do not match p");
        }
        LinearSem sem;
        sem.b.resize(p, p);
        for (int r = 0; r < p; ++r) {
            for (int c = 0; c < p; ++c) sem.b(r, c) = b[static_cast<std::size_t>(r) * p + c];
        }
        sem.omega = Eigen::Map<const Eigen::VectorXd>(omega.data(), p);
        if (j.contains("increasing_along")) sem.increasing_along = ordering_from_json(j.at("increasing_along"));
        if (j.contains("edges")) {
            std::vector<Edge> listed;
            for (const auto& e : j.at("edges")) listed.push_back({e.at(0).get<int>() - 1, e.at(1).get<int>() - 1});
            if (Dag(p, listed) != sem.dag()) throw ModelError("listed edges disagree with the weight support");
        }
        sem.validate();
        return sem;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model JSON: ") + e.what());
    }
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
    for (int c = 0; c < data.p(); ++c) os << (c ? "," : "") << 'x' << c + 1;
    os << '\n';
    for (int r = 0; r < data.n(); ++r) {
        for (int c = 0; c < data.p(); ++c) os << (c ? "," : "") << format_double(data.x(r, c));
        os << '\n';
    }
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        if (first == std::string::npos) return false;
        double v = 0.0;
        const auto* begin = cell.data() + first;
        const auto* end = cell.data() + last + 1;
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr != end) return false;
        out.push_back(v);
    }
    return !out.empty();
}

std::vector<std::vector<double>> read_rows(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!parse_row(line, row)) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("non-numeric CSV row: " + line);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError("ragged CSV rows");
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Dataset read_dataset_csv(std::istream& is) {
    const auto rows = read_rows(is);
    if (rows.empty()) throw ConfigError("empty dataset CSV");
    Dataset d{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()))};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return d;
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
    const auto rows = read_rows(is);
    if (rows.empty() || rows.size() != rows.front().size()) throw ConfigError("covariance CSV must be a square matrix");
    const auto p = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

Covariance load_covariance(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return sigma_from_sem(model_from_json(read_json_file(path)));
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return Covariance(read_matrix_csv(in));
}

void write_census_csv(std::ostream& os, const CensusTable& table) {
    os << "replication,kind,strict,weak,global_min_trace,n_global_optima\n";
    for (std::size_t r = 0; r < table.reports.size(); ++r) {
        const auto& rep = table.reports[r];
        for (auto kind : kAllKinds) {
            const auto it = rep.per_kind.find(kind);
            if (it == rep.per_kind.end()) continue;
            os << r << ',' << to_string(kind) << ',' << it->second.strict << ',' << it->second.weak << ','
               << format_double(rep.global_min_trace) << ',' << rep.n_global_optima << '\n';
        }
    }
}

json census_summary_json(const CensusTable& table) {
    json cells = json::object();
    for (const auto& [kind, cell] : table.cells) {
        cells[std::string(to_string(kind))] = {
            {"strict", {{"mean", cell.strict.mean}, {"se", cell.strict.se}}},
            {"weak", {{"mean", cell.weak.mean}, {"se", cell.weak.se}}},
        };
    }
    return {{"p", table.p}, {"reps", table.reports.size()}, {"cells", cells}};
}

}  // namespace mintrace::io
