#include "mintrace/perm.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>

#include "mintrace/errors.hpp"

namespace mintrace {

Ordering::Ordering(std::vector<int> perm) : perm_(std::move(perm)) {
    const auto p = perm_.size();
    std::vector<char> seen(p, 0);
    for (int v : perm_) {
        if (v < 0 || static_cast<std::size_t>(v) >= p || seen[v]) {
            throw ParameterError("ordering is not a permutation: " + to_string());
        }
        seen[v] = 1;
    }
}

Ordering Ordering::identity(int p) {
    if (p < 0) throw ParameterError("negative ordering size");
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    return Ordering(std::move(perm));
}

Ordering Ordering::from_one_based(std::span<const int> perm) {
    std::vector<int> zero(perm.begin(), perm.end());
    for (int& v : zero) --v;
    return Ordering(std::move(zero));
}

std::vector<int> Ordering::inverse() const {
    std::vector<int> inv(perm_.size());
    for (std::size_t k = 0; k < perm_.size(); ++k) inv[perm_[k]] = static_cast<int>(k);
    return inv;
}

std::vector<int> Ordering::one_based() const {
    std::vector<int> out(perm_);
    for (int& v : out) ++v;
    return out;
}

std::string Ordering::to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < perm_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(perm_[k] + 1);
    }
    return s + ")";
}

std::string_view to_string(NeighborhoodKind kind) noexcept {
    switch (kind) {
        case NeighborhoodKind::Adj: return "ADJ";
        case NeighborhoodKind::Rts: return "RTS";
        case NeighborhoodKind::R2rRev: return "R2R_REV";
        case NeighborhoodKind::R2r: return "R2R";
    }
    return "?";
}

NeighborhoodKind parse_kind(std::string_view name) {
    std::string key;
    for (char c : name) key += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (auto kind : kAllKinds) {
        if (key == to_string(kind)) return kind;
    }
    throw ParameterError("unknown neighborhood kind: " + std::string(name));
}

std::size_t neighborhood_size(NeighborhoodKind kind, int p) noexcept {
    if (p < 2) return 0;
    const auto n = static_cast<std::size_t>(p);
    return kind == NeighborhoodKind::Adj ? n - 1 : n * (n - 1) / 2;
}

Ordering compose_cycle(const Ordering& sigma, std::span<const int> cycle) {
    const int p = sigma.size();
    std::vector<int> mu(p);
    std::iota(mu.begin(), mu.end(), 0);
    std::vector<char> used(p, 0);
    for (int c : cycle) {
        if (c < 1 || c > p) throw ParameterError("cycle index out of range");
        if (used[c - 1]) throw ParameterError("cycle repeats index " + std::to_string(c));
        used[c - 1] = 1;
    }
    for (std::size_t m = 0; m < cycle.size(); ++m) {
        mu[cycle[m] - 1] = cycle[(m + 1) % cycle.size()] - 1;
    }
    std::vector<int> tau(p);
    for (int k = 0; k < p; ++k) tau[k] = sigma[mu[k]];
    return Ordering(std::move(tau));
}

void apply_move_to(std::span<const int> in, const Move& move, std::span<int> out) noexcept {
    std::copy(in.begin(), in.end(), out.begin());
    const auto i = static_cast<std::ptrdiff_t>(move.i - 1);
    const auto j = static_cast<std::ptrdiff_t>(move.j - 1);
    switch (move.kind) {
        case NeighborhoodKind::Adj: std::swap(out[i], out[i + 1]); break;
        case NeighborhoodKind::Rts: std::swap(out[i], out[j]); break;
        case NeighborhoodKind::R2r: std::rotate(out.begin() + i, out.begin() + j, out.begin() + j + 1); break;
        case NeighborhoodKind::R2rRev: std::rotate(out.begin() + i, out.begin() + i + 1, out.begin() + j + 1); break;
    }
}

Ordering apply_op(const Ordering& sigma, NeighborhoodKind kind, int i, int j) {
    const int p = sigma.size();
    if (kind == NeighborhoodKind::Adj) {
        if (i < 1 || i > p - 1) throw ParameterError("ADJ position out of range");
        j = i + 1;
    } else if (i < 1 || j > p || i >= j) {
        throw ParameterError("move positions must satisfy 1 <= i < j <= p");
    }
    std::vector<int> out(p);
    apply_move_to(sigma.values(), Move{kind, i, j}, out);
    return Ordering(std::move(out));
}

Ordering apply_move(const Ordering& sigma, const Move& move) { return apply_op(sigma, move.kind, move.i, move.j); }

std::vector<Move> neighborhood_moves(NeighborhoodKind kind, int p) {
    std::vector<Move> moves;
    moves.reserve(neighborhood_size(kind, p));
    if (kind == NeighborhoodKind::Adj) {
        for (int i = 1; i < p; ++i) moves.push_back({kind, i, i + 1});
        return moves;
    }
    for (int i = 1; i < p; ++i) {
        for (int j = i + 1; j <= p; ++j) moves.push_back({kind, i, j});
    }
    return moves;
}

std::vector<std::pair<Move, Ordering>> neighborhood(const Ordering& sigma, NeighborhoodKind kind) {
    std::vector<std::pair<Move, Ordering>> out;
    for (const auto& move : neighborhood_moves(kind, sigma.size())) {
        out.emplace_back(move, apply_move(sigma, move));
    }
    return out;
}

std::uint64_t factorial(int p) noexcept {
    std::uint64_t f = 1;
    for (int k = 2; k <= p; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

std::uint32_t lexicographic_rank(std::span<const int> perm) noexcept {
    const int p = static_cast<int>(perm.size());
    std::uint32_t used = 0;
    std::uint32_t rank = 0;
    for (int k = 0; k < p; ++k) {
        const auto v = static_cast<std::uint32_t>(perm[k]);
        const auto smaller_unused = v - static_cast<std::uint32_t>(std::popcount(used & ((1u << v) - 1u)));
        rank = rank * static_cast<std::uint32_t>(p - k) + smaller_unused;
        used |= 1u << v;
    }
    return rank;
}

std::vector<Ordering> all_orderings(int p) {
    if (p > kMaxEnumerationP) {
        throw SizeError("exhaustive enumeration refused for p = " + std::to_string(p) + " (limit " +
                        std::to_string(kMaxEnumerationP) + ")");
    }
    std::vector<Ordering> out;
    out.reserve(factorial(p));
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        out.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace mintrace
