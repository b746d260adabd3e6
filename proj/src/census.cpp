#include "mintrace/census.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "mintrace/chol.hpp"
#include "mintrace/errors.hpp"
#include "mintrace/kernels.hpp"
#include "mintrace/parallel.hpp"

namespace mintrace {

TraceTable::TraceTable(int p, std::vector<double> traces) : p_(p), traces_(std::move(traces)) {
    if (traces_.size() != factorial(p)) throw ParameterError("trace table must cover every ordering");
    min_ = *std::min_element(traces_.begin(), traces_.end());
}

namespace {

void check_guard(int p) {
    if (p < 1 || p > kMaxEnumerationP) {
        throw SizeError("exhaustive census refused for p = " + std::to_string(p) + " (limit " +
                        std::to_string(kMaxEnumerationP) + ")");
    }
}

std::mutex cache_mutex;

}  // namespace

const std::vector<std::uint8_t>& packed_orderings(int p) {
    check_guard(p);
    static std::map<int, std::unique_ptr<std::vector<std::uint8_t>>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[p];
    if (!slot) {
        auto packed = std::make_unique<std::vector<std::uint8_t>>();
        packed->reserve(factorial(p) * p);
        std::vector<int> perm(p);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            packed->insert(packed->end(), perm.begin(), perm.end());
        } while (std::next_permutation(perm.begin(), perm.end()));
        slot = std::move(packed);
    }
    return *slot;
}

const NeighborTable& neighbor_table(int p, NeighborhoodKind kind) {
    const auto& packed = packed_orderings(p);
    static std::map<std::pair<int, NeighborhoodKind>, std::unique_ptr<NeighborTable>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[{p, kind}];
    if (!slot) {
        auto table = std::make_unique<NeighborTable>();
        const auto moves = neighborhood_moves(kind, p);
        const std::size_t count = factorial(p);
        table->width = moves.size();
        table->ranks.resize(count * moves.size());
        std::vector<int> sigma(p), tau(p);
        for (std::size_t r = 0; r < count; ++r) {
            for (int k = 0; k < p; ++k) sigma[k] = packed[r * p + k];
            for (std::size_t m = 0; m < moves.size(); ++m) {
                apply_move_to(sigma, moves[m], tau);
                table->ranks[r * moves.size() + m] = lexicographic_rank(tau);
            }
        }
        slot = std::move(table);
    }
    return *slot;
}

TraceTable enumerate_traces(const Covariance& cov) {
    const int p = cov.size();
    check_guard(p);
    const auto& packed = packed_orderings(p);
    std::vector<double> traces(factorial(p));
    kernels::ordering_traces({cov.matrix().data(), static_cast<std::size_t>(cov.matrix().size())}, p, packed,
                             cov.pivot_floor(), traces);
    if (std::any_of(traces.begin(), traces.end(), [](double t) { return std::isnan(t); })) {
        throw DegeneracyError("enumerate_traces: Cholesky pivot below floor");
    }
    return TraceTable(p, std::move(traces));
}

std::vector<std::uint32_t> global_optima(const TraceTable& traces, const CensusOptions& opts) {
    const double cut = traces.min_trace() + opts.rel_tol * traces.min_trace();
    std::vector<std::uint32_t> out;
    for (std::size_t r = 0; r < traces.size(); ++r) {
        if (traces[r] <= cut) out.push_back(static_cast<std::uint32_t>(r));
    }
    return out;
}

OptimaCounts classify_local_optima(const TraceTable& traces, NeighborhoodKind kind, const CensusOptions& opts) {
    const auto& table = neighbor_table(traces.p(), kind);
    const double tol = opts.rel_tol * traces.min_trace();
    const double global_cut = traces.min_trace() + tol;
    const auto& t = traces.traces();
    OptimaCounts counts;
    for (std::size_t r = 0; r < t.size(); ++r) {
        const double here = t[r];
        if (!opts.include_global && here <= global_cut) continue;
        bool strict = true;
        bool weak = true;
        for (std::uint32_t nb : table.row(r)) {
            const double there = t[nb];
            strict = strict && here < there - tol;
            weak = weak && here <= there + tol;
            if (!weak) break;
        }
        counts.strict += strict && weak;
        counts.weak += weak;
    }
    return counts;
}

bool audit_local_optimum(const Covariance& cov, const Ordering& sigma, NeighborhoodKind kind, double global_min,
                         const CensusOptions& opts, bool strict) {
    const double tol = opts.rel_tol * global_min;
    const double here = decompose(cov, sigma).trace;
    for (const auto& [move, tau] : neighborhood(sigma, kind)) {
        const double there = decompose(cov, tau).trace;
        if (strict ? !(here < there - tol) : !(here <= there + tol)) return false;
    }
    return true;
}

CensusReport census_replication(int p, std::uint64_t seed, std::span<const NeighborhoodKind> kinds,
                                const CensusOptions& opts) {
    check_guard(p);
    Rng rng(seed);
    const auto sem = generate_model(p, rng);
    const auto cov = sigma_from_sem(sem);
    const auto traces = enumerate_traces(cov);

    CensusReport report;
    report.p = p;
    report.replication_seed = seed;
    report.global_min_trace = traces.min_trace();
    report.n_global_optima = global_optima(traces, opts).size();
    for (auto kind : kinds) report.per_kind[kind] = classify_local_optima(traces, kind, opts);
    return report;
}

CensusTable census_experiment(int reps, int p, std::uint64_t base_seed, std::span<const NeighborhoodKind> kinds,
                              const CensusOptions& opts, int workers) {
    if (reps < 1) throw ParameterError("census needs at least one replication");
    check_guard(p);
    for (auto kind : kinds) (void)neighbor_table(p, kind);

    CensusTable table;
    table.p = p;
    table.reports.resize(static_cast<std::size_t>(reps));
    parallel_for_index(table.reports.size(), workers, [&](std::size_t r) {
        table.reports[r] = census_replication(p, base_seed + r, kinds, opts);
    });

    for (auto kind : kinds) {
        std::vector<double> strict, weak;
        for (const auto& rep : table.reports) {
            strict.push_back(static_cast<double>(rep.per_kind.at(kind).strict));
            weak.push_back(static_cast<double>(rep.per_kind.at(kind).weak));
        }
        table.cells[kind] = {mean_se(strict), mean_se(weak)};
    }
    return table;
}

}  // namespace mintrace
