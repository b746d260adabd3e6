#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mintrace/chol.hpp"
#include "mintrace/model.hpp"
#include "mintrace/perm.hpp"

namespace mintrace {

struct ClimbStep {
    Move move;
    /// Objective after the move: tr(Omega) for population climbs, phi for sample climbs.
    double objective = 0.0;
};

struct HillClimbTrace {
    Ordering initial;
    double initial_objective = 0.0;
    std::vector<ClimbStep> steps;
    Ordering final_ordering;

    [[nodiscard]] std::size_t iterations() const noexcept { return steps.size(); }
};

/// Hyperparameters of the order-based Bayesian score.
struct ScoreConfig {
    double c0 = 3.0;
    double alpha = 0.99;
    double gamma = 0.01;
    double kappa = 0.0;
    /// In-degree cap; p - 1 when unset.
    std::optional<int> d_in;
    /// Replace greedy parent selection by exhaustive search when p <= 4 and the cap <= 3.
    bool exact_small = true;

    [[nodiscard]] int in_degree_cap(int p) const noexcept { return d_in.value_or(p - 1); }
    /// Throws ParameterError on out-of-range hyperparameters.
    void validate() const;
    /// Per-edge penalty c0 log p + 0.5 log(1 + alpha / gamma).
    [[nodiscard]] double edge_penalty(int p) const;
    /// (alpha p n + kappa) / 2.
    [[nodiscard]] double rss_weight(int p, int n) const;
};

/// Relative improvement a population move must exceed.
inline constexpr double kPopulationMoveTolerance = 1e-12;

struct PopulationClimb {
    DecompositionResult decomposition;
    HillClimbTrace trace;
    [[nodiscard]] Dag dag() const { return decomposition.dag(); }
};

/// Steepest descent on tr(Omega_sigma): move to the best neighbor (first in
/// enumeration order on ties) while it improves by more than the relative tolerance.
[[nodiscard]] PopulationClimb hill_climb_population(const Covariance& cov, const Ordering& init, NeighborhoodKind kind,
                                                    double rel_tol = kPopulationMoveTolerance);

/// True iff no neighbor of sigma improves the trace by more than the relative tolerance.
[[nodiscard]] bool is_population_fixed_point(const Covariance& cov, const Ordering& sigma, NeighborhoodKind kind,
                                             double rel_tol = kPopulationMoveTolerance);

/// phi(G) with residual sums from Householder QR of each parent design.
/// Throws ParameterError when an in-degree exceeds min(n - 1, d_in) and
/// ConditioningError on a rank-deficient parent design.
[[nodiscard]] double phi_score(const Dataset& data, const Dag& g, const ScoreConfig& cfg);

/// Score evaluation from the Gram matrix X^T X; the fast path used inside searches.
class GramScorer {
public:
    GramScorer(const Dataset& data, const ScoreConfig& cfg);

    [[nodiscard]] int p() const noexcept { return p_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double gram(int a, int b) const noexcept { return gram_[static_cast<std::size_t>(a) * p_ + b]; }

    /// Residual sum of squares of X_j regressed on X_parents (order is significant
    /// for rounding only).
    [[nodiscard]] double rss(int j, std::span<const int> parents) const;
    /// phi(G) with parents taken in ascending order, so equal graphs score identically.
    [[nodiscard]] double score(const Dag& g) const;
    [[nodiscard]] double score_from_totals(std::size_t edges, double total_rss) const;

    struct MapEstimate {
        Dag dag;
        double score = 0.0;
    };
    /// Greedy forward edge addition (or exhaustive search in the small case).
    [[nodiscard]] MapEstimate map_dag(const Ordering& sigma) const;

private:
    [[nodiscard]] MapEstimate greedy_map(const Ordering& sigma) const;
    [[nodiscard]] MapEstimate exact_map(const Ordering& sigma) const;

    int n_;
    int p_;
    int cap_;
    ScoreConfig cfg_;
    std::vector<double> gram_;
};

[[nodiscard]] Dag map_dag_for_ordering(const Dataset& data, const Ordering& sigma, const ScoreConfig& cfg);

struct SampleClimb {
    Dag dag;
    HillClimbTrace trace;
};

/// Steepest ascent on phi(sigma) = phi(MAP DAG of sigma); moves iff strictly better.
[[nodiscard]] SampleClimb hill_climb_sample(const Dataset& data, const Ordering& init, NeighborhoodKind kind,
                                            const ScoreConfig& cfg);

}  // namespace mintrace
