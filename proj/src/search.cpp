#include "mintrace/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "mintrace/errors.hpp"
#include "mintrace/kernels.hpp"

namespace mintrace {

void ScoreConfig::validate() const {
    if (!std::isfinite(c0)) throw ParameterError("c0 must be finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ParameterError("kappa must be non-negative");
    if (d_in && *d_in < 0) throw ParameterError("d_in must be non-negative");
}

double ScoreConfig::edge_penalty(int p) const { return c0 * std::log(static_cast<double>(p)) + 0.5 * std::log(1.0 + alpha / gamma); }

double ScoreConfig::rss_weight(int p, int n) const { return (alpha * p * n + kappa) / 2.0; }

// ---------------------------------------------------------------------------
// Population climb

namespace {

std::span<const double> flat(const Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

struct NeighborBatch {
    std::vector<Move> moves;
    std::vector<std::uint8_t> packed;
    std::vector<double> traces;
};

void evaluate_neighbors(const Covariance& cov, const Ordering& sigma, NeighborBatch& batch) {
    const int p = sigma.size();
    std::vector<int> buf(p);
    batch.packed.resize(batch.moves.size() * p);
    for (std::size_t m = 0; m < batch.moves.size(); ++m) {
        apply_move_to(sigma.values(), batch.moves[m], buf);
        std::copy(buf.begin(), buf.end(), batch.packed.begin() + static_cast<std::ptrdiff_t>(m * p));
    }
    batch.traces.resize(batch.moves.size());
    kernels::ordering_traces(flat(cov.matrix()), p, batch.packed, cov.pivot_floor(), batch.traces);
    for (double t : batch.traces) {
        if (std::isnan(t)) throw DegeneracyError("neighbor evaluation: Cholesky pivot below floor");
    }
}

std::size_t first_argmin(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] < v[best]) best = k;
    }
    return best;
}

}  // namespace

PopulationClimb hill_climb_population(const Covariance& cov, const Ordering& init, NeighborhoodKind kind,
                                      double rel_tol) {
    if (cov.size() != init.size()) throw ParameterError("initial ordering size does not match covariance");
    const int p = cov.size();
    HillClimbTrace trace;
    trace.initial = init;
    Ordering current = init;
    double current_trace = trace_objective(cov, current);
    trace.initial_objective = current_trace;

    NeighborBatch batch;
    batch.moves = neighborhood_moves(kind, p);
    while (!batch.moves.empty()) {
        evaluate_neighbors(cov, current, batch);
        const std::size_t best = first_argmin(batch.traces);
        if (!(batch.traces[best] < current_trace - rel_tol * current_trace)) break;
        current = apply_move(current, batch.moves[best]);
        current_trace = batch.traces[best];
        trace.steps.push_back({batch.moves[best], current_trace});
    }
    trace.final_ordering = current;
    return {decompose(cov, current), std::move(trace)};
}

bool is_population_fixed_point(const Covariance& cov, const Ordering& sigma, NeighborhoodKind kind, double rel_tol) {
    NeighborBatch batch;
    batch.moves = neighborhood_moves(kind, sigma.size());
    if (batch.moves.empty()) return true;
    evaluate_neighbors(cov, sigma, batch);
    const double t = trace_objective(cov, sigma);
    return !(batch.traces[first_argmin(batch.traces)] < t - rel_tol * t);
}

// ---------------------------------------------------------------------------
// Score

namespace {

void check_in_degrees(const Dag& g, int n, const ScoreConfig& cfg) {
    const int p = g.size();
    const int cap = std::min(n - 1, cfg.in_degree_cap(p));
    for (int j = 0; j < p; ++j) {
        if (static_cast<int>(g.parents(j).size()) > cap) {
            throw ParameterError("node " + std::to_string(j + 1) + " exceeds the in-degree cap " + std::to_string(cap));
        }
    }
}

constexpr double kRankTolerance = 1e-10;

}  // namespace

double phi_score(const Dataset& data, const Dag& g, const ScoreConfig& cfg) {
    cfg.validate();
    const int n = data.n();
    const int p = data.p();
    if (g.size() != p) throw ParameterError("graph size does not match data");
    check_in_degrees(g, n, cfg);

    double total = 0.0;
    for (int j = 0; j < p; ++j) {
        const auto parents = g.parents(j);
        const Eigen::VectorXd xj = data.x.col(j);
        if (parents.empty()) {
            total += xj.squaredNorm();
            continue;
        }
        const auto m = static_cast<Eigen::Index>(parents.size());
        Eigen::MatrixXd design(n, m);
        for (Eigen::Index c = 0; c < m; ++c) design.col(c) = data.x.col(parents[c]);
        const double scale = design.colwise().norm().maxCoeff();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
        const auto& r = qr.matrixQR();
        for (Eigen::Index c = 0; c < m; ++c) {
            if (!(std::abs(r(c, c)) > kRankTolerance * scale)) {
                throw ConditioningError("rank-deficient parent design for node " + std::to_string(j + 1));
            }
        }
        Eigen::VectorXd rotated = xj;
        rotated.applyOnTheLeft(qr.householderQ().adjoint());
        total += rotated.tail(n - m).squaredNorm();
    }
    return -static_cast<double>(g.edge_count()) * cfg.edge_penalty(p) - cfg.rss_weight(p, n) * std::log(total);
}

GramScorer::GramScorer(const Dataset& data, const ScoreConfig& cfg)
    : n_(data.n()), p_(data.p()), cap_(0), cfg_(cfg), gram_(static_cast<std::size_t>(data.p()) * data.p()) {
    cfg_.validate();
    cap_ = std::min(n_ - 1, cfg_.in_degree_cap(p_));
    kernels::gram({data.x.data(), static_cast<std::size_t>(data.x.size())}, n_, p_, gram_);
}

namespace {

/// Lower Cholesky factor of G restricted to `set`, with relative pivot check.
Eigen::MatrixXd gram_factor(const GramScorer& s, std::span<const int> set) {
    const auto m = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) block(a, b) = s.gram(set[a], set[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) throw ConditioningError("rank-deficient parent design");
    Eigen::MatrixXd lower = llt.matrixL();
    for (Eigen::Index a = 0; a < m; ++a) {
        if (!(lower(a, a) * lower(a, a) > kRankTolerance * kRankTolerance * block(a, a))) {
            throw ConditioningError("rank-deficient parent design");
        }
    }
    return lower;
}

Eigen::VectorXd forward_solve(const Eigen::MatrixXd& lower, const Eigen::VectorXd& rhs) {
    return lower.triangularView<Eigen::Lower>().solve(rhs);
}

}  // namespace

double GramScorer::rss(int j, std::span<const int> parents) const {
    if (parents.empty()) return gram(j, j);
    const auto lower = gram_factor(*this, parents);
    Eigen::VectorXd g(static_cast<Eigen::Index>(parents.size()));
    for (std::size_t a = 0; a < parents.size(); ++a) g[static_cast<Eigen::Index>(a)] = gram(parents[a], j);
    const Eigen::VectorXd z = forward_solve(lower, g);
    return std::max(gram(j, j) - z.squaredNorm(), 0.0);
}

double GramScorer::score_from_totals(std::size_t edges, double total_rss) const {
    return -static_cast<double>(edges) * cfg_.edge_penalty(p_) - cfg_.rss_weight(p_, n_) * std::log(total_rss);
}

double GramScorer::score(const Dag& g) const {
    if (g.size() != p_) throw ParameterError("graph size does not match data");
    check_in_degrees(g, n_, cfg_);
    double total = 0.0;
    for (int j = 0; j < p_; ++j) total += rss(j, g.parents(j));
    return score_from_totals(g.edge_count(), total);
}

GramScorer::MapEstimate GramScorer::map_dag(const Ordering& sigma) const {
    if (sigma.size() != p_) throw ParameterError("ordering size does not match data");
    if (cfg_.exact_small && p_ <= 4 && cap_ <= 3) return exact_map(sigma);
    return greedy_map(sigma);
}

GramScorer::MapEstimate GramScorer::greedy_map(const Ordering& sigma) const {
    struct NodeState {
        std::vector<int> parents;
        double rss = 0.0;
        int best_parent = -1;
        double best_gain = 0.0;
    };
    std::vector<NodeState> state(p_);

    // Best single parent to add to the node at `position`, given its current parents.
    const auto refresh = [&](int position) {
        const int j = sigma[position];
        auto& st = state[j];
        st.best_parent = -1;
        st.best_gain = 0.0;
        Eigen::MatrixXd lower;
        Eigen::VectorXd z;
        if (!st.parents.empty()) {
            lower = gram_factor(*this, st.parents);
            Eigen::VectorXd g(static_cast<Eigen::Index>(st.parents.size()));
            for (std::size_t a = 0; a < st.parents.size(); ++a) g[static_cast<Eigen::Index>(a)] = gram(st.parents[a], j);
            z = forward_solve(lower, g);
            st.rss = std::max(gram(j, j) - z.squaredNorm(), 0.0);
        } else {
            st.rss = gram(j, j);
        }
        if (static_cast<int>(st.parents.size()) >= cap_) return;
        for (int k = 0; k < position; ++k) {
            const int i = sigma[k];
            if (std::find(st.parents.begin(), st.parents.end(), i) != st.parents.end()) continue;
            double r_ii = gram(i, i);
            double r_ij = gram(i, j);
            if (!st.parents.empty()) {
                Eigen::VectorXd g(static_cast<Eigen::Index>(st.parents.size()));
                for (std::size_t a = 0; a < st.parents.size(); ++a) g[static_cast<Eigen::Index>(a)] = gram(st.parents[a], i);
                const Eigen::VectorXd y = forward_solve(lower, g);
                r_ii -= y.squaredNorm();
                r_ij -= y.dot(z);
            }
            if (!(r_ii > kRankTolerance * gram(i, i))) continue;
            const double gain = r_ij * r_ij / r_ii;
            if (gain > st.best_gain) {
                st.best_gain = gain;
                st.best_parent = i;
            }
        }
    };

    for (int k = 0; k < p_; ++k) refresh(k);
    const auto inverse = sigma.inverse();
    std::size_t edges = 0;
    const auto total_rss = [&] {
        double t = 0.0;
        for (const auto& st : state) t += st.rss;
        return t;
    };
    double total = total_rss();
    double current = score_from_totals(0, total);
    for (;;) {
        int node = -1;
        for (int k = 0; k < p_; ++k) {
            const auto& st = state[sigma[k]];
            if (st.best_parent >= 0 && (node < 0 || st.best_gain > state[node].best_gain)) node = sigma[k];
        }
        if (node < 0) break;
        const double remaining = total - state[node].best_gain;
        if (!(remaining > 0.0)) break;
        const double candidate = score_from_totals(edges + 1, remaining);
        if (!(candidate > current)) break;
        state[node].parents.push_back(state[node].best_parent);
        ++edges;
        refresh(inverse[node]);
        total = total_rss();
        current = score_from_totals(edges, total);
    }

    std::vector<Edge> chosen;
    for (int j = 0; j < p_; ++j) {
        for (int i : state[j].parents) chosen.push_back({i, j});
    }
    Dag dag(p_, std::move(chosen));
    const double s = score(dag);
    return {std::move(dag), s};
}

GramScorer::MapEstimate GramScorer::exact_map(const Ordering& sigma) const {
    // rss_table[k][mask]: RSS of the node at position k on the predecessors selected by mask.
    std::vector<std::vector<double>> rss_table(p_);
    std::vector<int> parents;
    for (int k = 0; k < p_; ++k) {
        rss_table[k].assign(std::size_t{1} << k, std::numeric_limits<double>::quiet_NaN());
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            if (std::popcount(mask) > cap_) continue;
            parents.clear();
            for (int b = 0; b < k; ++b) {
                if (mask & (1u << b)) parents.push_back(sigma[b]);
            }
            std::sort(parents.begin(), parents.end());
            rss_table[k][mask] = rss(sigma[k], parents);
        }
    }

    std::vector<std::uint32_t> choice(p_, 0), best_choice(p_, 0);
    double best = -std::numeric_limits<double>::infinity();
    const auto visit = [&](auto&& self, int k, std::size_t edges, double total) -> void {
        if (k == p_) {
            const double s = score_from_totals(edges, total);
            if (s > best) {
                best = s;
                best_choice = choice;
            }
            return;
        }
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            if (std::isnan(rss_table[k][mask])) continue;
            choice[k] = mask;
            self(self, k + 1, edges + static_cast<std::size_t>(std::popcount(mask)), total + rss_table[k][mask]);
        }
    };
    visit(visit, 0, 0, 0.0);

    std::vector<Edge> chosen;
    for (int k = 0; k < p_; ++k) {
        for (int b = 0; b < k; ++b) {
            if (best_choice[k] & (1u << b)) chosen.push_back({sigma[b], sigma[k]});
        }
    }
    Dag dag(p_, std::move(chosen));
    const double s = score(dag);
    return {std::move(dag), s};
}

Dag map_dag_for_ordering(const Dataset& data, const Ordering& sigma, const ScoreConfig& cfg) {
    return GramScorer(data, cfg).map_dag(sigma).dag;
}

SampleClimb hill_climb_sample(const Dataset& data, const Ordering& init, NeighborhoodKind kind, const ScoreConfig& cfg) {
    const int p = data.p();
    if (init.size() != p) throw ParameterError("initial ordering size does not match data");
    if (!(data.n() > cfg.in_degree_cap(p) + 1)) throw ParameterError("sample climb needs n > d_in + 1");
    const GramScorer scorer(data, cfg);

    HillClimbTrace trace;
    trace.initial = init;
    Ordering current = init;
    auto estimate = scorer.map_dag(current);
    trace.initial_objective = estimate.score;

    const auto moves = neighborhood_moves(kind, p);
    std::vector<int> buf(p);
    while (!moves.empty()) {
        std::size_t best_move = moves.size();
        GramScorer::MapEstimate best_estimate;
        for (std::size_t m = 0; m < moves.size(); ++m) {
            apply_move_to(current.values(), moves[m], buf);
            auto candidate = scorer.map_dag(Ordering(buf));
            if (best_move == moves.size() || candidate.score > best_estimate.score) {
                best_move = m;
                best_estimate = std::move(candidate);
            }
        }
        if (!(best_estimate.score > estimate.score)) break;
        current = apply_move(current, moves[best_move]);
        estimate = std::move(best_estimate);
        trace.steps.push_back({moves[best_move], estimate.score});
    }
    trace.final_ordering = current;
    return {std::move(estimate.dag), std::move(trace)};
}

}  // namespace mintrace
