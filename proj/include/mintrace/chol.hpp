#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mintrace/model.hpp"
#include "mintrace/perm.hpp"

namespace mintrace {

/// The unique pair (B_sigma, Omega_sigma) with Sigma = Sigma(B_sigma, Omega_sigma)
/// and B_sigma consistent with sigma.
struct DecompositionResult {
    Eigen::MatrixXd b_sigma;
    /// Indexed by node: omega_sigma[j] = Var(X_j | X_PRED_j(sigma)).
    Eigen::VectorXd omega_sigma;
    /// Sum of omega_sigma accumulated in ordering position order.
    double trace = 0.0;

    [[nodiscard]] Dag dag(double threshold = kSupportThreshold) const { return dag_from_weights(b_sigma, threshold); }
};

struct GapDiagnostic {
    double min_offtrue_trace = 0.0;
    double true_trace = 0.0;
    /// +infinity when every ordering is consistent with the true graph.
    double ratio = 0.0;
    double xi_lower_bound = 0.0;
};

/// One Cholesky factorization of the sigma-permuted covariance.
/// Throws DegeneracyError when a pivot is not above the covariance's floor.
[[nodiscard]] DecompositionResult decompose(const Covariance& cov, const Ordering& sigma);

/// tr(Omega_sigma).
[[nodiscard]] double trace_objective(const Covariance& cov, const Ordering& sigma);

/// omega[sigma*(1)] <= ... <= omega[sigma*(p)], no tolerance.
[[nodiscard]] bool check_weakly_increasing(const LinearSem& sem, const Ordering& sigma_star);

/// Var(X_j | X_given) as the Schur complement Sigma_jj - Sigma_jS Sigma_SS^{-1} Sigma_Sj.
[[nodiscard]] double conditional_variance(const Covariance& cov, int j, std::span<const int> given);

/// For all positions i < j: Var(X_{s(i)} | X_{s(1..i-1)}) <= Var(X_{s(j)} | every other variable) + tol.
[[nodiscard]] bool check_condition5(const Covariance& cov, const Ordering& sigma_star, double tol = 1e-12);

/// Exhaustive ratio min_{sigma not in true set} tr(Omega_sigma) / tr(Omega_true) (p <= 10).
[[nodiscard]] GapDiagnostic gap_diagnostic(const Covariance& cov, const std::vector<Ordering>& true_orderings);

}  // namespace mintrace
