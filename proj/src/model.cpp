#include "mintrace/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "mintrace/errors.hpp"
#include "mintrace/kernels.hpp"

namespace mintrace {

Dag::Dag(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
    if (p < 0) throw ModelError("negative node count");
    for (const auto& e : edges_) {
        if (e.from < 0 || e.from >= p || e.to < 0 || e.to >= p) throw ModelError("edge endpoint out of range");
        if (e.from == e.to) throw ModelError("self-loop on node " + std::to_string(e.from + 1));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw ModelError("duplicate edge");
    if (topological_order().size() != static_cast<std::size_t>(p)) throw ModelError("edge set contains a cycle");
}

bool Dag::has_edge(int from, int to) const noexcept {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

std::vector<int> Dag::parents(int node) const {
    std::vector<int> out;
    for (const auto& e : edges_) {
        if (e.to == node) out.push_back(e.from);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Dag::topological_order() const {
    std::vector<int> indegree(p_, 0);
    std::vector<std::vector<int>> children(p_);
    for (const auto& e : edges_) {
        ++indegree[e.to];
        children[e.from].push_back(e.to);
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < p_; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<int> order;
    order.reserve(p_);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : children[v]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    return order;
}

Dag dag_from_weights(const Eigen::MatrixXd& b, double threshold) {
    std::vector<Edge> edges;
    for (int i = 0; i < b.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            if (std::abs(b(i, j)) > threshold) edges.push_back({i, j});
        }
    }
    return Dag(static_cast<int>(b.rows()), std::move(edges));
}

Dag LinearSem::dag() const { return dag_from_weights(b, 0.0); }

void LinearSem::validate() const {
    const int p = size();
    if (b.rows() != p || b.cols() != p) throw ModelError("weight matrix must be p x p");
    for (int j = 0; j < p; ++j) {
        if (!(omega[j] > 0.0) || !std::isfinite(omega[j])) throw ModelError("error variances must be positive");
    }
    (void)dag();
    if (increasing_along) {
        if (increasing_along->size() != p) throw ModelError("ordering size does not match model");
        for (int k = 1; k < p; ++k) {
            if (omega[(*increasing_along)[k - 1]] > omega[(*increasing_along)[k]]) {
                throw ModelError("variances are not weakly increasing along the flagged ordering");
            }
        }
    }
}

Covariance::Covariance(Eigen::MatrixXd sigma, double pivot_floor) : sigma_(std::move(sigma)), floor_(pivot_floor) {
    const auto p = sigma_.rows();
    if (p == 0 || sigma_.cols() != p) throw ParameterError("covariance must be a non-empty square matrix");
    if (!sigma_.allFinite()) throw ParameterError("covariance has non-finite entries");
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            if (std::abs(sigma_(i, j) - sigma_(j, i)) > kSymmetryTolerance) {
                throw ParameterError("covariance is not symmetric");
            }
        }
    }
    const int n = static_cast<int>(p);
    const auto identity = Ordering::identity(n);
    std::vector<double> lower(static_cast<std::size_t>(n) * n), pivots(n);
    if (!kernels::permuted_cholesky({sigma_.data(), static_cast<std::size_t>(sigma_.size())}, n, identity.values(),
                                    floor_, lower, pivots)) {
        throw DegeneracyError("covariance is not positive definite (pivot below floor)");
    }
}

Covariance sigma_from_sem(const LinearSem& sem) {
    sem.validate();
    const int p = sem.size();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd inv = (identity - sem.b).partialPivLu().inverse();
    Eigen::MatrixXd sigma = inv.transpose() * sem.omega.asDiagonal() * inv;
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return Covariance(std::move(sigma));
}

LinearSem generate_model(int p, Rng& rng) {
    if (p < 2) throw ParameterError("generate_model needs p >= 2");
    const double edge_prob = std::min(1.0, 3.0 / (2.0 * p - 2.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (unit(rng) < edge_prob) edges.push_back({i, j});
        }
    }

    LinearSem sem;
    sem.b = Eigen::MatrixXd::Zero(p, p);
    // Uniform on [-1,-0.3] U [0.3,1]: one draw on an interval of total length 1.4.
    std::uniform_real_distribution<double> weight(0.0, 1.4);
    for (const auto& e : edges) {
        const double u = weight(rng);
        sem.b(e.from, e.to) = u < 0.7 ? -1.0 + u : 0.3 + (u - 0.7);
    }

    const double a = unit(rng);
    std::uniform_real_distribution<double> variance(1.0 - a, 1.0 + a);
    std::vector<double> omega(p);
    for (auto& w : omega) w = variance(rng);
    std::sort(omega.begin(), omega.end());
    sem.omega = Eigen::Map<Eigen::VectorXd>(omega.data(), p);
    sem.increasing_along = Ordering::identity(p);
    return sem;
}

Dataset sample_data(const Covariance& cov, int n, Rng& rng) {
    if (n < 1) throw ParameterError("sample size must be at least 1");
    const int p = cov.size();
    Eigen::LLT<Eigen::MatrixXd> llt(cov.matrix());
    if (llt.info() != Eigen::Success) throw DegeneracyError("covariance factorization failed");
    const Eigen::MatrixXd lower = llt.matrixL();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(n, p);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < p; ++c) z(r, c) = normal(rng);
    }
    return Dataset{z * lower.transpose()};
}

std::size_t edge_difference(const Dag& g1, const Dag& g2) {
    if (g1.size() != g2.size()) throw ParameterError("edge_difference: graphs have different node counts");
    std::vector<Edge> diff;
    std::set_symmetric_difference(g1.edges().begin(), g1.edges().end(), g2.edges().begin(), g2.edges().end(),
                                  std::back_inserter(diff));
    return diff.size();
}

bool is_consistent(const Dag& g, const Ordering& sigma) {
    if (g.size() != sigma.size()) throw ParameterError("ordering size does not match graph");
    const auto pos = sigma.inverse();
    return std::all_of(g.edges().begin(), g.edges().end(),
                       [&](const Edge& e) { return pos[e.from] < pos[e.to]; });
}

std::vector<Ordering> consistent_orderings(const Dag& g) {
    std::vector<Ordering> out;
    for (auto& sigma : all_orderings(g.size())) {
        if (is_consistent(g, sigma)) out.push_back(std::move(sigma));
    }
    return out;
}

}  // namespace mintrace
