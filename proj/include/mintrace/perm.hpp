#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mintrace {

/// A permutation of the node set. Stored 0-based: `values()[k]` is the node
/// placed at position k. The move operators below take 1-based positions.
class Ordering {
public:
    Ordering() = default;
    /// Throws ParameterError unless `perm` is a bijection of {0..p-1}.
    explicit Ordering(std::vector<int> perm);

    static Ordering identity(int p);
    static Ordering from_one_based(std::span<const int> perm);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(perm_.size()); }
    [[nodiscard]] int operator[](std::size_t position) const noexcept { return perm_[position]; }
    [[nodiscard]] const std::vector<int>& values() const noexcept { return perm_; }

    /// inverse()[node] is the 0-based position of node.
    [[nodiscard]] std::vector<int> inverse() const;
    [[nodiscard]] std::vector<int> one_based() const;
    [[nodiscard]] std::string to_string() const;

    auto operator<=>(const Ordering&) const = default;

private:
    std::vector<int> perm_;
};

enum class NeighborhoodKind { Adj, Rts, R2rRev, R2r };

/// Column order used in every report.
inline constexpr std::array<NeighborhoodKind, 4> kAllKinds{
    NeighborhoodKind::Adj, NeighborhoodKind::Rts, NeighborhoodKind::R2rRev, NeighborhoodKind::R2r};

[[nodiscard]] std::string_view to_string(NeighborhoodKind kind) noexcept;
/// Accepts ADJ, RTS, R2R, R2R_REV (case-insensitive, '-' allowed for '_').
[[nodiscard]] NeighborhoodKind parse_kind(std::string_view name);

[[nodiscard]] std::size_t neighborhood_size(NeighborhoodKind kind, int p) noexcept;

/// One move of a neighborhood. Positions are 1-based with i < j; for ADJ, j = i + 1.
struct Move {
    NeighborhoodKind kind = NeighborhoodKind::R2r;
    int i = 1;
    int j = 2;
    auto operator<=>(const Move&) const = default;
};

/// sigma ∘ mu where mu is the cycle (c1, c2, ..., cm) on 1-based positions,
/// i.e. mu(c1) = c2, ..., mu(cm) = c1 and tau(k) = sigma(mu(k)).
[[nodiscard]] Ordering compose_cycle(const Ordering& sigma, std::span<const int> cycle);

/// ADJ swaps positions i, i+1 (j ignored). RTS swaps i and j. R2R moves the
/// element at j to position i, shifting the block right. R2R_REV moves the
/// element at i to position j, shifting the block left.
[[nodiscard]] Ordering apply_op(const Ordering& sigma, NeighborhoodKind kind, int i, int j = 0);
[[nodiscard]] Ordering apply_move(const Ordering& sigma, const Move& move);

/// Unchecked form for hot loops; `out` may not alias `in`. 0-based storage, 1-based move.
void apply_move_to(std::span<const int> in, const Move& move, std::span<int> out) noexcept;

/// All moves of a kind in enumeration order: i ascending, then j ascending.
[[nodiscard]] std::vector<Move> neighborhood_moves(NeighborhoodKind kind, int p);
[[nodiscard]] std::vector<std::pair<Move, Ordering>> neighborhood(const Ordering& sigma, NeighborhoodKind kind);

/// Largest p for which every ordering is enumerated.
inline constexpr int kMaxEnumerationP = 10;

/// Rank of a 0-based permutation in lexicographic order (p <= 12).
[[nodiscard]] std::uint32_t lexicographic_rank(std::span<const int> perm) noexcept;
[[nodiscard]] std::uint64_t factorial(int p) noexcept;
/// Every ordering of p nodes in lexicographic order; SizeError beyond kMaxEnumerationP.
[[nodiscard]] std::vector<Ordering> all_orderings(int p);

}  // namespace mintrace
