#include <doctest.h>

#include <random>

#include "mintrace/census.hpp"
#include "mintrace/chol.hpp"
#include "mintrace/errors.hpp"
#include "mintrace/experiments.hpp"
#include "mintrace/search.hpp"
#include "oracles.hpp"

using namespace mintrace;

namespace {

std::vector<std::vector<int>> parent_lists(const Dag& g) {
    std::vector<std::vector<int>> out;
    for (int j = 0; j < g.size(); ++j) out.push_back(g.parents(j));
    return out;
}

Dataset random_dataset(int n, int p, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Dataset d;
    d.x.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) d.x(i, j) = z(rng);
    return d;
}

}  // namespace

TEST_CASE("population climb from a true ordering stays put") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto sem = generate_model(6, rng);
        const auto cov = sigma_from_sem(sem);
        const auto climb = hill_climb_population(cov, Ordering::identity(6), NeighborhoodKind::R2r);
        CHECK(climb.trace.iterations() == 0);
        CHECK(climb.dag() == sem.dag());
    }
}

TEST_CASE("population climb on the reversed 2x2 chain") {
    Eigen::Matrix2d s;
    s << 1.0, 0.5, 0.5, 1.25;
    const Covariance cov(s);
    const auto climb = hill_climb_population(cov, Ordering(std::vector<int>{1, 0}), NeighborhoodKind::R2r);
    REQUIRE(climb.trace.iterations() == 1);
    CHECK(climb.trace.steps[0].move == Move{NeighborhoodKind::R2r, 1, 2});
    CHECK(climb.trace.final_ordering == Ordering::identity(2));
    CHECK(climb.decomposition.trace == doctest::Approx(2.0));
    CHECK(climb.trace.initial_objective == doctest::Approx(2.05));
}

TEST_CASE("population climb reaches the global minimum at p = 8 when no weak optimum exists") {
    const CensusOptions opts;
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Rng rng(seed);
        const auto sem = generate_model(8, rng);
        const auto cov = sigma_from_sem(sem);
        const auto table = enumerate_traces(cov);
        if (classify_local_optima(table, NeighborhoodKind::R2r, opts).weak != 0) continue;
        ++checked;
        for (int start = 0; start < 5; ++start) {
            const auto init = random_ordering(8, rng);
            const auto climb = hill_climb_population(cov, init, NeighborhoodKind::R2r);
            CHECK(climb.decomposition.trace <= table.min_trace() * (1.0 + 1e-9));
            CHECK(is_population_fixed_point(cov, climb.trace.final_ordering, NeighborhoodKind::R2r));
            double prev = climb.trace.initial_objective;
            for (const auto& step : climb.trace.steps) {
                CHECK(step.objective < prev);
                prev = step.objective;
            }
        }
    }
    CHECK(checked > 5);
}

TEST_CASE("population climb is deterministic") {
    Rng rng(4);
    const auto cov = sigma_from_sem(generate_model(7, rng));
    const auto init = random_ordering(7, rng);
    for (auto kind : kAllKinds) {
        const auto a = hill_climb_population(cov, init, kind);
        const auto b = hill_climb_population(cov, init, kind);
        CHECK(a.trace.final_ordering == b.trace.final_ordering);
        CHECK(a.trace.steps.size() == b.trace.steps.size());
        CHECK(a.decomposition.trace == b.decomposition.trace);
        CHECK(is_population_fixed_point(cov, a.trace.final_ordering, kind));
    }
}

TEST_CASE("phi_score on the empty graph") {
    std::mt19937_64 rng(1);
    const auto data = random_dataset(25, 3, rng);
    const ScoreConfig cfg;
    const double expected = -(cfg.alpha * 3 * 25 + cfg.kappa) / 2.0 * std::log(data.x.squaredNorm());
    CHECK(phi_score(data, Dag(3), cfg) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("phi_score matches the dense projection oracle") {
    std::mt19937_64 rng(9);
    ScoreConfig cfg;
    cfg.kappa = 2.5;
    for (int t = 0; t < 100; ++t) {
        const int p = 2 + static_cast<int>(rng() % 3);
        const int n = p + 2 + static_cast<int>(rng() % (29 - p));
        const auto data = random_dataset(n, p, rng);
        std::vector<Edge> e;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (rng() % 2) e.push_back({i, j});
        const Dag g(p, e);
        const double want = oracle::dense_phi(data.x, parent_lists(g), cfg.c0, cfg.alpha, cfg.gamma, cfg.kappa);
        CHECK(std::abs(phi_score(data, g, cfg) - want) <= 1e-10 * std::abs(want));
        const GramScorer scorer(data, cfg);
        CHECK(std::abs(scorer.score(g) - want) <= 1e-9 * std::abs(want));
    }
}

TEST_CASE("phi_score error cases") {
    std::mt19937_64 rng(2);
    auto data = random_dataset(10, 3, rng);
    data.x.col(1) = 2.0 * data.x.col(0);
    CHECK_THROWS_AS((void)phi_score(data, Dag(3, {{0, 2}, {1, 2}}), ScoreConfig{}), ConditioningError);

    const auto tiny = random_dataset(2, 3, rng);
    CHECK_THROWS_AS((void)phi_score(tiny, Dag(3, {{0, 2}, {1, 2}}), ScoreConfig{}), ParameterError);

    ScoreConfig capped;
    capped.d_in = 1;
    const auto ok = random_dataset(20, 3, rng);
    CHECK_THROWS_AS((void)phi_score(ok, Dag(3, {{0, 2}, {1, 2}}), capped), ParameterError);

    ScoreConfig bad;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("residual sums shrink as parents are added") {
    std::mt19937_64 rng(3);
    const auto data = random_dataset(40, 5, rng);
    const GramScorer scorer(data, ScoreConfig{});
    std::vector<int> parents;
    double prev = scorer.rss(4, parents);
    for (int k = 0; k < 4; ++k) {
        parents.push_back(k);
        const double r = scorer.rss(4, parents);
        CHECK(r <= prev * (1.0 + 1e-12));
        CHECK(r == doctest::Approx(oracle::dense_rss(data.x, 4, parents)).epsilon(1e-9));
        prev = r;
    }
}

TEST_CASE("MAP estimate under independence is empty") {
    const Covariance id(Eigen::MatrixXd::Identity(3, 3));
    for (bool exact : {true, false}) {
        ScoreConfig cfg;
        cfg.exact_small = exact;
        int empty = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            const auto data = sample_data(id, 10'000, rng);
            empty += map_dag_for_ordering(data, Ordering::identity(3), cfg).edge_count() == 0;
        }
        CHECK(empty >= 95);
    }
}

TEST_CASE("MAP estimate finds a strong edge") {
    LinearSem sem;
    sem.b = Eigen::MatrixXd::Zero(2, 2);
    sem.b(0, 1) = 0.9;
    sem.omega = Eigen::VectorXd::Ones(2);
    Rng rng(6);
    const auto data = sample_data(sigma_from_sem(sem), 1000, rng);
    const ScoreConfig cfg;
    const auto g = map_dag_for_ordering(data, Ordering::identity(2), cfg);
    CHECK(g == Dag(2, {{0, 1}}));
    CHECK(phi_score(data, g, cfg) > phi_score(data, Dag(2), cfg));
}

TEST_CASE("greedy MAP never scores below the empty graph and exact search is no worse") {
    ScoreConfig greedy;
    greedy.exact_small = false;
    const ScoreConfig exact;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        const auto sem = generate_model(4, rng);
        const auto data = sample_data(sigma_from_sem(sem), 30 + static_cast<int>(seed), rng);
        const auto sigma = random_ordering(4, rng);
        const auto g = map_dag_for_ordering(data, sigma, greedy);
        const auto e = map_dag_for_ordering(data, sigma, exact);
        CHECK(is_consistent(g, sigma));
        CHECK(is_consistent(e, sigma));
        const double sg = phi_score(data, g, greedy);
        CHECK(sg >= phi_score(data, Dag(4), greedy));
        CHECK(phi_score(data, e, exact) >= sg - 1e-9 * std::abs(sg));
    }
}

TEST_CASE("sample climb recovers the graph at p = 5") {
    int exact = 0, zero_moves = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto sem = generate_model(5, rng);
        const auto data = sample_data(sigma_from_sem(sem), 1000, rng);
        const auto init = random_ordering(5, rng);
        const auto climb = hill_climb_sample(data, init, NeighborhoodKind::R2r, ScoreConfig{});
        exact += edge_difference(climb.dag, sem.dag()) == 0;
        CHECK(climb.trace.iterations() <= 4);
        double prev = climb.trace.initial_objective;
        for (const auto& step : climb.trace.steps) {
            CHECK(step.objective > prev);
            prev = step.objective;
        }
        const auto from_truth = hill_climb_sample(data, Ordering::identity(5), NeighborhoodKind::R2r, ScoreConfig{});
        zero_moves += from_truth.trace.iterations() == 0;

        const auto again = hill_climb_sample(data, init, NeighborhoodKind::R2r, ScoreConfig{});
        CHECK(again.dag == climb.dag);
        CHECK(again.trace.final_ordering == climb.trace.final_ordering);
    }
    CHECK(exact >= 18);
    CHECK(zero_moves >= 15);
}

TEST_CASE("sample climb needs more rows than the in-degree cap") {
    std::mt19937_64 rng(1);
    const auto data = random_dataset(3, 4, rng);
    CHECK_THROWS_AS((void)hill_climb_sample(data, Ordering::identity(4), NeighborhoodKind::R2r, ScoreConfig{}),
                    ParameterError);
}

TEST_CASE("no strict R2R optimum outside the truth on condition-5 models") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 10 && seed < 400; ++seed) {
        Rng rng(seed);
        const int p = 4 + static_cast<int>(seed % 3);
        const auto sem = generate_model(p, rng);
        const auto cov = sigma_from_sem(sem);
        if (!check_condition5(cov, Ordering::identity(p))) continue;
        ++checked;
        const auto table = enumerate_traces(cov);
        const double tol = 1e-9 * table.min_trace();
        for (const auto& s : all_orderings(p)) {
            if (is_consistent(sem.dag(), s)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [move, t] : neighborhood(s, NeighborhoodKind::R2r)) best = std::min(best, table.trace_of(t));
            CHECK(best <= table.trace_of(s) + tol);
        }
    }
    CHECK(checked == 10);
}
