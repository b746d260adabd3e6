#include <doctest.h>

#include <map>
#include <random>

#include "mintrace/census.hpp"
#include "mintrace/chol.hpp"
#include "mintrace/errors.hpp"
#include "oracles.hpp"

using namespace mintrace;

namespace {

// Independent classifier: orderings visited in a shuffled order, neighbors
// found with apply_move and looked up in a std::map.
OptimaCounts brute_force_counts(const Covariance& cov, NeighborhoodKind kind, const CensusOptions& opts,
                                std::uint64_t shuffle_seed) {
    const int p = cov.size();
    auto perms = oracle::permutations(p);
    std::mt19937_64 rng(shuffle_seed);
    std::shuffle(perms.begin(), perms.end(), rng);
    std::map<std::vector<int>, double> trace;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : perms) {
        trace[v] = trace_objective(cov, Ordering(v));
        best = std::min(best, trace[v]);
    }
    const double tol = opts.rel_tol * best;
    OptimaCounts c;
    const auto moves = neighborhood_moves(kind, p);
    for (const auto& v : perms) {
        const double t = trace.at(v);
        if (!opts.include_global && t <= best + tol) continue;
        bool strict = true, weak = true;
        for (const auto& m : moves) {
            const double u = trace.at(apply_move(Ordering(v), m).values());
            strict = strict && t < u - tol;
            weak = weak && t <= u + tol;
        }
        c.strict += strict;
        c.weak += weak;
    }
    return c;
}

}  // namespace

TEST_CASE("enumerate_traces") {
    const Covariance id(Eigen::MatrixXd::Identity(3, 3));
    const auto t = enumerate_traces(id);
    CHECK(t.size() == 6);
    for (double v : t.traces()) CHECK(v == 3.0);

    Rng rng(1);
    const auto cov = sigma_from_sem(generate_model(8, rng));
    const auto big = enumerate_traces(cov);
    CHECK(big.size() == 40320);
    for (std::size_t r = 0; r < big.size(); r += 997) {
        const auto s = all_orderings(8)[r];
        CHECK(big[r] == doctest::Approx(trace_objective(cov, s)).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)enumerate_traces(Covariance(Eigen::MatrixXd::Identity(11, 11))), SizeError);
}

TEST_CASE("flat landscape has no counted optima") {
    const Covariance id(Eigen::MatrixXd::Identity(5, 5));
    const auto t = enumerate_traces(id);
    for (auto kind : kAllKinds) CHECK(classify_local_optima(t, kind) == OptimaCounts{0, 0});
    CHECK(global_optima(t).size() == 120);
}

TEST_CASE("global optima contain exactly the consistent orderings") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto sem = generate_model(6, rng);
        const auto t = enumerate_traces(sigma_from_sem(sem));
        std::vector<std::uint32_t> expected;
        for (const auto& s : consistent_orderings(sem.dag())) expected.push_back(lexicographic_rank(s.values()));
        CHECK(global_optima(t) == expected);
    }
}

TEST_CASE("classification agrees with an unordered brute force") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Rng rng(seed);
        const auto cov = sigma_from_sem(generate_model(6, rng));
        const auto t = enumerate_traces(cov);
        for (bool include : {false, true}) {
            CensusOptions opts;
            opts.include_global = include;
            for (auto kind : kAllKinds) CHECK(classify_local_optima(t, kind, opts) == brute_force_counts(cov, kind, opts, seed));
        }
    }
}

TEST_CASE("strict optima are weak before global exclusion") {
    CensusOptions opts;
    opts.include_global = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto t = enumerate_traces(sigma_from_sem(generate_model(6, rng)));
        for (auto kind : kAllKinds) {
            const auto c = classify_local_optima(t, kind, opts);
            CHECK(c.strict <= c.weak);
        }
    }
}

TEST_CASE("spot audit of counted optima") {
    const CensusOptions opts;
    std::size_t audited = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto cov = sigma_from_sem(generate_model(7, rng));
        const auto t = enumerate_traces(cov);
        const double tol = opts.rel_tol * t.min_trace();
        const auto all = all_orderings(7);
        for (auto kind : kAllKinds) {
            const auto& nb = neighbor_table(7, kind);
            for (std::size_t r = 0; r < t.size(); r += 97) {
                if (t[r] <= t.min_trace() + tol) continue;
                bool strict = true, weak = true;
                for (auto q : nb.row(r)) {
                    strict = strict && t[r] < t[q] - tol;
                    weak = weak && t[r] <= t[q] + tol;
                }
                if (strict) CHECK(audit_local_optimum(cov, all[r], kind, t.min_trace(), opts, true));
                if (weak) {
                    CHECK(audit_local_optimum(cov, all[r], kind, t.min_trace(), opts, false));
                    ++audited;
                }
                if (!weak) CHECK_FALSE(audit_local_optimum(cov, all[r], kind, t.min_trace(), opts, false));
            }
        }
    }
    CHECK(audited > 0);
}

TEST_CASE("no strict R2R optima on condition-5 models") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 10 && seed < 500; ++seed) {
        Rng rng(seed);
        const auto cov = sigma_from_sem(generate_model(7, rng));
        if (!check_condition5(cov, Ordering::identity(7))) continue;
        ++checked;
        CHECK(classify_local_optima(enumerate_traces(cov), NeighborhoodKind::R2r).strict == 0);
    }
    CHECK(checked == 10);
}

TEST_CASE("census replication and experiment") {
    const auto a = census_replication(6, 42, kAllKinds);
    const auto b = census_replication(6, 42, kAllKinds);
    CHECK(a.per_kind == b.per_kind);
    CHECK(a.global_min_trace == b.global_min_trace);
    CHECK(a.replication_seed == 42);
    CHECK(a.n_global_optima >= 1);

    const auto one = census_experiment(6, 6, 10, kAllKinds, {}, 1);
    const auto three = census_experiment(6, 6, 10, kAllKinds, {}, 3);
    REQUIRE(one.reports.size() == 6);
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK(one.reports[r].replication_seed == 10 + r);
        CHECK(one.reports[r].per_kind == three.reports[r].per_kind);
        CHECK(one.reports[r].per_kind == census_replication(6, 10 + r, kAllKinds).per_kind);
    }
    std::vector<double> weak;
    for (const auto& r : one.reports) weak.push_back(static_cast<double>(r.per_kind.at(NeighborhoodKind::Adj).weak));
    const auto ms = mean_se(weak);
    CHECK(one.cells.at(NeighborhoodKind::Adj).weak.mean == ms.mean);
    CHECK(one.cells.at(NeighborhoodKind::Adj).weak.se == ms.se);
}

TEST_CASE("mean_se") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto m = mean_se(v);
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}
