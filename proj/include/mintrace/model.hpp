#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mintrace/perm.hpp"

namespace mintrace {

using Rng = std::mt19937_64;

/// Stream for replication `index` of an experiment seeded with `base_seed`.
[[nodiscard]] inline Rng replication_rng(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(base_seed + index);
}

struct Edge {
    int from = 0;
    int to = 0;
    auto operator<=>(const Edge&) const = default;
};

/// Directed acyclic graph on nodes 0..p-1. Edges are kept sorted and unique.
class Dag {
public:
    Dag() = default;
    /// Throws ModelError on self-loops, duplicates, out-of-range nodes or cycles.
    Dag(int p, std::vector<Edge> edges);
    explicit Dag(int p) : Dag(p, {}) {}

    [[nodiscard]] int size() const noexcept { return p_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] bool has_edge(int from, int to) const noexcept;
    /// Sorted ascending.
    [[nodiscard]] std::vector<int> parents(int node) const;
    [[nodiscard]] std::vector<int> topological_order() const;

    bool operator==(const Dag&) const = default;

private:
    int p_ = 0;
    std::vector<Edge> edges_;
};

/// Mean-zero Gaussian linear SEM: X = B^T X + eps, eps ~ N(0, diag(omega)).
struct LinearSem {
    Eigen::MatrixXd b;
    Eigen::VectorXd omega;
    /// Set when omega is weakly increasing along this ordering.
    std::optional<Ordering> increasing_along;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(omega.size()); }
    /// Edge set of the weight support.
    [[nodiscard]] Dag dag() const;
    /// Throws ModelError if the support has a cycle or an omega entry is not positive.
    void validate() const;
};

inline constexpr double kDefaultPivotFloor = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-12;

/// Symmetric positive definite covariance matrix.
class Covariance {
public:
    Covariance() = default;
    /// Throws ParameterError if not square or asymmetric beyond 1e-12, and
    /// DegeneracyError if a Cholesky pivot is at or below `pivot_floor`.
    explicit Covariance(Eigen::MatrixXd sigma, double pivot_floor = kDefaultPivotFloor);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(sigma_.rows()); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return sigma_; }
    [[nodiscard]] double operator()(int i, int j) const noexcept { return sigma_(i, j); }
    [[nodiscard]] double pivot_floor() const noexcept { return floor_; }

private:
    Eigen::MatrixXd sigma_;
    double floor_ = kDefaultPivotFloor;
};

/// n x p sample matrix, one observation per row.
struct Dataset {
    Eigen::MatrixXd x;
    [[nodiscard]] int n() const noexcept { return static_cast<int>(x.rows()); }
    [[nodiscard]] int p() const noexcept { return static_cast<int>(x.cols()); }
};

/// (I - B^T)^{-1} Omega (I - B)^{-1}.
[[nodiscard]] Covariance sigma_from_sem(const LinearSem& sem);

/// Random model with true ordering (1..p): each i<j edge with probability
/// min(1, 3/(2p-2)), weights in [-1,-0.3] U [0.3,1], variances from
/// U[1-a, 1+a] (a ~ U[0,1]) sorted ascending. Draw order: edges, weights, a, variances.
[[nodiscard]] LinearSem generate_model(int p, Rng& rng);

/// Rows L z with L the lower Cholesky factor of the covariance.
[[nodiscard]] Dataset sample_data(const Covariance& cov, int n, Rng& rng);

/// Size of the symmetric difference of the directed edge sets.
[[nodiscard]] std::size_t edge_difference(const Dag& g1, const Dag& g2);

/// True iff no edge i -> j has j placed before i.
[[nodiscard]] bool is_consistent(const Dag& g, const Ordering& sigma);
/// All orderings consistent with g, in lexicographic order (p <= 10).
[[nodiscard]] std::vector<Ordering> consistent_orderings(const Dag& g);

/// Support of a weight matrix: entries with |b_ij| > threshold.
inline constexpr double kSupportThreshold = 1e-8;
[[nodiscard]] Dag dag_from_weights(const Eigen::MatrixXd& b, double threshold = kSupportThreshold);

}  // namespace mintrace
