#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mintrace/census.hpp"
#include "mintrace/config.hpp"
#include "mintrace/model.hpp"
#include "mintrace/stats.hpp"

namespace mintrace {

/// Uniformly random ordering by Fisher-Yates from the given stream.
[[nodiscard]] Ordering random_ordering(int p, Rng& rng);

struct ComplexityRecord {
    int p = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    NeighborhoodKind kind = NeighborhoodKind::R2r;
    std::size_t edge_difference = 0;
    std::size_t iterations = 0;
    std::size_t true_edges = 0;
    std::size_t estimated_edges = 0;
};

struct ComplexityCell {
    int p = 0;
    NeighborhoodKind kind = NeighborhoodKind::R2r;
    int reps = 0;
    MeanSe edge_difference;
    MeanSe iterations;
    std::size_t max_iterations = 0;
    /// Share of replications recovering the true graph exactly.
    double exact_recovery = 0.0;
};

struct ComplexityResult {
    std::vector<ComplexityRecord> records;
    std::vector<ComplexityCell> cells;
};

/// Per replication r (seed base + r): model, n rows, random initial ordering,
/// finite-sample climb.
[[nodiscard]] ComplexityResult complexity_experiment(const ExperimentConfig& cfg);

struct CheckRecord {
    int replication = 0;
    int p = 0;
    std::uint64_t seed = 0;
    bool weakly_increasing = false;
    bool condition5 = false;
    /// Exhaustive landscape check ran (p <= kMaxCheckP).
    bool verified = false;
    /// Orderings outside the true set with no R2R neighbor at or below their trace.
    std::size_t strict_r2r_optima = 0;
};

inline constexpr int kMaxCheckP = 7;

struct CheckReport {
    std::vector<CheckRecord> records;
    std::size_t weakly_increasing = 0;
    std::size_t condition5 = 0;
    std::size_t verified_passing = 0;
    std::size_t passing_with_strict_optima = 0;
    std::size_t failing_checked = 0;
    std::size_t failing_conclusion_held = 0;
};

/// Number of orderings outside [sigma*] that are strict R2R local optima.
[[nodiscard]] std::size_t count_strict_r2r_outside_truth(const Covariance& cov, const Dag& truth, double rel_tol);

[[nodiscard]] CheckReport check_experiment(const ExperimentConfig& cfg);

[[nodiscard]] nlohmann::json complexity_summary_json(const ComplexityResult& result);
[[nodiscard]] nlohmann::json check_report_json(const CheckReport& report);

/// Runners used by the CLI. The file-writing ones place their outputs under cfg.out:
/// census.csv + census_summary.json, complexity.csv + complexity_summary.json,
/// check.csv + check_report.json.
CensusTable run_census(const ExperimentConfig& cfg);
ComplexityResult run_complexity(const ExperimentConfig& cfg);
CheckReport run_check(const ExperimentConfig& cfg);
[[nodiscard]] nlohmann::json run_climb(const ExperimentConfig& cfg);
[[nodiscard]] nlohmann::json run_decompose(const ExperimentConfig& cfg);

}  // namespace mintrace
