#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mintrace/model.hpp"
#include "mintrace/perm.hpp"
#include "mintrace/stats.hpp"

namespace mintrace {

/// tr(Omega_sigma) for every ordering of p nodes, indexed by lexicographic rank.
class TraceTable {
public:
    TraceTable(int p, std::vector<double> traces);

    [[nodiscard]] int p() const noexcept { return p_; }
    [[nodiscard]] std::size_t size() const noexcept { return traces_.size(); }
    [[nodiscard]] double operator[](std::size_t rank) const noexcept { return traces_[rank]; }
    [[nodiscard]] double trace_of(const Ordering& sigma) const { return traces_[lexicographic_rank(sigma.values())]; }
    [[nodiscard]] const std::vector<double>& traces() const noexcept { return traces_; }
    [[nodiscard]] double min_trace() const noexcept { return min_; }

private:
    int p_;
    std::vector<double> traces_;
    double min_;
};

/// Orderings of p nodes packed p bytes each in lexicographic order; cached per p.
[[nodiscard]] const std::vector<std::uint8_t>& packed_orderings(int p);

/// Lexicographic ranks of every neighbor of every ordering: row `rank` holds
/// the |N| neighbor ranks in move enumeration order. Cached per (p, kind).
struct NeighborTable {
    std::size_t width = 0;
    std::vector<std::uint32_t> ranks;
    [[nodiscard]] std::span<const std::uint32_t> row(std::size_t rank) const { return {ranks.data() + rank * width, width}; }
};
[[nodiscard]] const NeighborTable& neighbor_table(int p, NeighborhoodKind kind);

/// Throws SizeError beyond kMaxEnumerationP and DegeneracyError on a failed pivot.
[[nodiscard]] TraceTable enumerate_traces(const Covariance& cov);

struct CensusOptions {
    /// Traces within rel_tol * global minimum are treated as ties.
    double rel_tol = 1e-9;
    /// Count global optima too (off by default: only orderings above the global minimum are counted).
    bool include_global = false;
};

struct OptimaCounts {
    std::size_t strict = 0;
    std::size_t weak = 0;
    auto operator<=>(const OptimaCounts&) const = default;
};

/// Strict: trace below every neighbor by more than the tolerance. Weak: no
/// neighbor lower by more than the tolerance.
[[nodiscard]] OptimaCounts classify_local_optima(const TraceTable& traces, NeighborhoodKind kind,
                                                 const CensusOptions& opts = {});

/// Ranks of the orderings whose trace is within tolerance of the minimum.
[[nodiscard]] std::vector<std::uint32_t> global_optima(const TraceTable& traces, const CensusOptions& opts = {});

/// Re-derives local optimality of one ordering from fresh decompositions of all its neighbors.
[[nodiscard]] bool audit_local_optimum(const Covariance& cov, const Ordering& sigma, NeighborhoodKind kind,
                                       double global_min, const CensusOptions& opts, bool strict);

struct CensusReport {
    int p = 0;
    std::map<NeighborhoodKind, OptimaCounts> per_kind;
    double global_min_trace = 0.0;
    std::size_t n_global_optima = 0;
    std::uint64_t replication_seed = 0;
};

[[nodiscard]] CensusReport census_replication(int p, std::uint64_t seed, std::span<const NeighborhoodKind> kinds,
                                              const CensusOptions& opts = {});

struct CensusCell {
    MeanSe strict;
    MeanSe weak;
};

struct CensusTable {
    int p = 0;
    std::vector<CensusReport> reports;
    std::map<NeighborhoodKind, CensusCell> cells;
};

/// Replication r uses seed base_seed + r; reports are ordered by replication.
[[nodiscard]] CensusTable census_experiment(int reps, int p, std::uint64_t base_seed,
                                            std::span<const NeighborhoodKind> kinds, const CensusOptions& opts = {},
                                            int workers = 1);

}  // namespace mintrace
