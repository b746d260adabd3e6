#include "mintrace/config.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <thread>

#include "mintrace/errors.hpp"

namespace mintrace {

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::Census: return "census";
        case Command::Complexity: return "complexity";
        case Command::Climb: return "climb";
        case Command::Decompose: return "decompose";
        case Command::Check: return "check";
    }
    return "?";
}

Command parse_command(std::string_view name) {
    for (auto c : {Command::Census, Command::Complexity, Command::Climb, Command::Decompose, Command::Check}) {
        if (name == to_string(c)) return c;
    }
    throw ConfigError("unknown command: " + std::string(name));
}

int ExperimentConfig::effective_reps() const noexcept {
    if (reps > 0) return reps;
    switch (command) {
        case Command::Census: return 10000;
        case Command::Complexity: return 50;
        case Command::Check: return 100;
        default: return 1;
    }
}

std::vector<NeighborhoodKind> ExperimentConfig::effective_kinds() const {
    if (!kinds.empty()) return kinds;
    if (command == Command::Census) return {kAllKinds.begin(), kAllKinds.end()};
    return {NeighborhoodKind::R2r};
}

std::vector<int> ExperimentConfig::effective_p() const {
    if (!p.empty()) return p;
    switch (command) {
        case Command::Complexity: return {5, 10, 20, 50, 100};
        case Command::Check: return {5};
        default: return {8};
    }
}

void ExperimentConfig::validate() const {
    for (int v : p) {
        if (v < 2) throw ConfigError("p must be at least 2");
    }
    if (n < 1) throw ConfigError("n must be positive");
    if (reps < 0) throw ConfigError("reps must be positive");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (!(census.rel_tol >= 0.0)) throw ConfigError("trace tolerance must be non-negative");
    if (!(move_tol >= 0.0)) throw ConfigError("move tolerance must be non-negative");
    if (!(condition5_tol >= 0.0)) throw ConfigError("condition tolerance must be non-negative");
    std::set<NeighborhoodKind> seen;
    for (auto k : kinds) {
        if (!seen.insert(k).second) throw ConfigError("neighborhood kind listed twice");
    }
    try {
        score.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

int default_workers() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

std::vector<int> int_list(const nlohmann::json& v) {
    if (v.is_number_integer()) return {v.get<int>()};
    return v.get<std::vector<int>>();
}

}  // namespace

void apply_json(ExperimentConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "command") cfg.command = parse_command(v.get<std::string>());
            else if (key == "p") cfg.p = int_list(v);
            else if (key == "n") cfg.n = v.get<int>();
            else if (key == "reps") {
                cfg.reps = v.get<int>();
                if (cfg.reps < 1) throw ConfigError("reps must be positive");
            }
            else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
            else if (key == "kinds") {
                cfg.kinds.clear();
                for (const auto& k : v) cfg.kinds.push_back(parse_kind(k.get<std::string>()));
            }
            else if (key == "din") cfg.score.d_in = v.get<int>();
            else if (key == "c0") cfg.score.c0 = v.get<double>();
            else if (key == "alpha") cfg.score.alpha = v.get<double>();
            else if (key == "gamma") cfg.score.gamma = v.get<double>();
            else if (key == "kappa") cfg.score.kappa = v.get<double>();
            else if (key == "exact_small") cfg.score.exact_small = v.get<bool>();
            else if (key == "tol") cfg.census.rel_tol = v.get<double>();
            else if (key == "move_tol") cfg.move_tol = v.get<double>();
            else if (key == "condition5_tol") cfg.condition5_tol = v.get<double>();
            else if (key == "include_global") cfg.census.include_global = v.get<bool>();
            else if (key == "out") cfg.out = v.get<std::string>();
            else if (key == "workers") cfg.workers = v.get<int>();
            else if (key == "sigma") cfg.sigma_path = v.get<std::string>();
            else if (key == "data") cfg.data_path = v.get<std::string>();
            else if (key == "order") cfg.order = v.get<std::vector<int>>();
            else if (key == "init") cfg.init = v.get<std::vector<int>>();
            else if (key == "sample") cfg.sample = v.get<bool>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace mintrace
