#include "mintrace/chol.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "mintrace/errors.hpp"
#include "mintrace/kernels.hpp"

namespace mintrace {

namespace {

std::span<const double> flat(const Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

void require_match(const Covariance& cov, const Ordering& sigma) {
    if (cov.size() != sigma.size()) throw ParameterError("ordering size does not match covariance");
}

}  // namespace

DecompositionResult decompose(const Covariance& cov, const Ordering& sigma) {
    require_match(cov, sigma);
    const int p = cov.size();
    std::vector<double> lower(static_cast<std::size_t>(p) * p, 0.0);
    std::vector<double> pivots(p);
    if (!kernels::permuted_cholesky(flat(cov.matrix()), p, sigma.values(), cov.pivot_floor(), lower, pivots)) {
        throw DegeneracyError("decompose: Cholesky pivot below floor under ordering " + sigma.to_string());
    }

    // Permuted Sigma = U D U^T with U = L diag(1/sqrt(d)) unit lower triangular,
    // and U = (I - B_perm^T)^{-1}, so B_perm^T = I - U^{-1}.
    Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(p, p);
    for (int k = 0; k < p; ++k) {
        for (int l = 0; l < k; ++l) unit(k, l) = lower[k * p + l] / std::sqrt(pivots[l]);
    }
    const Eigen::MatrixXd unit_inv =
        unit.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXd::Identity(p, p));

    DecompositionResult out;
    out.b_sigma = Eigen::MatrixXd::Zero(p, p);
    out.omega_sigma.resize(p);
    for (int k = 0; k < p; ++k) {
        out.omega_sigma[sigma[k]] = pivots[k];
        out.trace = out.trace + pivots[k];
        for (int l = 0; l < k; ++l) out.b_sigma(sigma[l], sigma[k]) = -unit_inv(k, l);
    }
    return out;
}

double trace_objective(const Covariance& cov, const Ordering& sigma) {
    require_match(cov, sigma);
    const int p = cov.size();
    std::vector<std::uint8_t> order(sigma.values().begin(), sigma.values().end());
    double t = 0.0;
    kernels::ordering_traces(flat(cov.matrix()), p, order, cov.pivot_floor(), {&t, 1});
    if (std::isnan(t)) throw DegeneracyError("trace_objective: Cholesky pivot below floor");
    return t;
}

bool check_weakly_increasing(const LinearSem& sem, const Ordering& sigma_star) {
    if (sem.size() != sigma_star.size()) throw ParameterError("ordering size does not match model");
    for (int k = 1; k < sigma_star.size(); ++k) {
        if (sem.omega[sigma_star[k - 1]] > sem.omega[sigma_star[k]]) return false;
    }
    return true;
}

double conditional_variance(const Covariance& cov, int j, std::span<const int> given) {
    const auto& s = cov.matrix();
    if (given.empty()) return s(j, j);
    const auto m = static_cast<Eigen::Index>(given.size());
    Eigen::MatrixXd sss(m, m);
    Eigen::VectorXd ssj(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        ssj[a] = s(given[a], j);
        for (Eigen::Index b = 0; b < m; ++b) sss(a, b) = s(given[a], given[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sss);
    if (llt.info() != Eigen::Success) throw DegeneracyError("conditional_variance: singular conditioning block");
    return s(j, j) - ssj.dot(llt.solve(ssj));
}

bool check_condition5(const Covariance& cov, const Ordering& sigma_star, double tol) {
    require_match(cov, sigma_star);
    const int p = cov.size();
    const auto forward = decompose(cov, sigma_star).omega_sigma;
    std::vector<double> given_all(p);
    std::vector<int> others;
    others.reserve(p);
    for (int j = 0; j < p; ++j) {
        others.clear();
        for (int v = 0; v < p; ++v) {
            if (v != sigma_star[j]) others.push_back(v);
        }
        given_all[j] = conditional_variance(cov, sigma_star[j], others);
    }
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (forward[sigma_star[i]] > given_all[j] + tol) return false;
        }
    }
    return true;
}

GapDiagnostic gap_diagnostic(const Covariance& cov, const std::vector<Ordering>& true_orderings) {
    const int p = cov.size();
    if (p > kMaxEnumerationP) throw SizeError("gap_diagnostic: p exceeds exhaustive limit");
    if (true_orderings.empty()) throw ParameterError("gap_diagnostic: empty set of true orderings");
    std::unordered_set<std::uint32_t> truth;
    for (const auto& o : true_orderings) {
        require_match(cov, o);
        truth.insert(lexicographic_rank(o.values()));
    }

    const auto orderings = all_orderings(p);
    std::vector<std::uint8_t> packed;
    packed.reserve(orderings.size() * p);
    for (const auto& o : orderings) packed.insert(packed.end(), o.values().begin(), o.values().end());
    std::vector<double> traces(orderings.size());
    kernels::ordering_traces(flat(cov.matrix()), p, packed, cov.pivot_floor(), traces);

    GapDiagnostic g;
    g.true_trace = trace_objective(cov, true_orderings.front());
    g.min_offtrue_trace = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < traces.size(); ++r) {
        if (std::isnan(traces[r])) throw DegeneracyError("gap_diagnostic: Cholesky pivot below floor");
        if (!truth.contains(static_cast<std::uint32_t>(r))) g.min_offtrue_trace = std::min(g.min_offtrue_trace, traces[r]);
    }
    g.ratio = g.min_offtrue_trace / g.true_trace;
    g.xi_lower_bound = g.ratio - 1.0;
    return g;
}

}  // namespace mintrace
