#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "mintrace/census.hpp"
#include "mintrace/chol.hpp"
#include "mintrace/model.hpp"
#include "mintrace/search.hpp"

namespace mintrace::io {

using nlohmann::json;

/// Shortest round-trip decimal form; identical bytes for identical doubles.
[[nodiscard]] std::string format_double(double v);

// Nodes and positions are 1-based in every serialized form.
[[nodiscard]] json to_json(const Ordering& sigma);
[[nodiscard]] Ordering ordering_from_json(const json& j);
[[nodiscard]] json to_json(const Dag& g);
[[nodiscard]] json to_json(const Move& move);
[[nodiscard]] json to_json(const HillClimbTrace& trace);
[[nodiscard]] json to_json(const DecompositionResult& d);
[[nodiscard]] json to_json(const GapDiagnostic& g);
[[nodiscard]] json matrix_to_json(const Eigen::MatrixXd& m);

/// {p, edges: [[i,j],...], b: row-major, omega: [...], seed}
[[nodiscard]] json model_to_json(const LinearSem& sem, std::optional<std::uint64_t> seed = std::nullopt);
[[nodiscard]] LinearSem model_from_json(const json& j);

/// Header x1..xp, one row per observation.
void write_dataset_csv(std::ostream& os, const Dataset& data);
[[nodiscard]] Dataset read_dataset_csv(std::istream& is);

/// Square numeric CSV; a leading non-numeric header row is skipped.
[[nodiscard]] Eigen::MatrixXd read_matrix_csv(std::istream& is);

/// Model JSON (covariance built from it) or CSV matrix, by file extension.
[[nodiscard]] Covariance load_covariance(const std::string& path);
[[nodiscard]] json read_json_file(const std::string& path);

/// Columns replication, kind, strict, weak, global_min_trace, n_global_optima.
void write_census_csv(std::ostream& os, const CensusTable& table);
[[nodiscard]] json census_summary_json(const CensusTable& table);

}  // namespace mintrace::io
