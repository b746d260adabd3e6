#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mintrace/census.hpp"
#include "mintrace/perm.hpp"
#include "mintrace/search.hpp"

namespace mintrace {

enum class Command { Census, Complexity, Climb, Decompose, Check };

[[nodiscard]] std::string_view to_string(Command c) noexcept;
[[nodiscard]] Command parse_command(std::string_view name);

/// Environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "MINTRACE_WORKERS";

struct ExperimentConfig {
    Command command = Command::Census;
    /// Node counts; census and climb use the first entry, complexity and check sweep all.
    std::vector<int> p;
    int n = 1000;
    /// 0 selects the per-command default (census 10000, complexity 50, check 100).
    int reps = 0;
    std::uint64_t seed = 1;
    /// Empty selects the per-command default (census: all four, otherwise R2R).
    std::vector<NeighborhoodKind> kinds;
    ScoreConfig score;
    CensusOptions census;
    double move_tol = kPopulationMoveTolerance;
    double condition5_tol = 1e-12;
    std::string out = ".";
    int workers = 1;
    /// Covariance (CSV) or model (JSON) input for decompose / climb.
    std::string sigma_path;
    /// Dataset CSV for a sample climb.
    std::string data_path;
    /// 1-based orderings for decompose / climb.
    std::vector<int> order;
    std::vector<int> init;
    /// climb: run the finite-sample climb on n generated rows instead of the population climb.
    bool sample = false;

    [[nodiscard]] int effective_reps() const noexcept;
    [[nodiscard]] std::vector<NeighborhoodKind> effective_kinds() const;
    [[nodiscard]] std::vector<int> effective_p() const;
    /// Throws ConfigError on non-positive counts and other invalid values.
    void validate() const;
};

/// MINTRACE_WORKERS if set and positive, else hardware concurrency.
[[nodiscard]] int default_workers();

/// Applies the keys of a JSON config document; unknown keys raise ConfigError.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& doc);

}  // namespace mintrace
