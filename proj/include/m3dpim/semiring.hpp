#ifndef M3DPIM_SEMIRING_HPP
#define M3DPIM_SEMIRING_HPP

// Saturating 32-bit (accumulate, combine) algebra shared by every DP kernel.
//
// Two sentinels bound the value range:
//   kPosInf = 2^31 - 1   unreachable; neutral element of min
//   kNegInf = -2^31      neutral element of max
// combine() is a saturating add in which a sentinel operand absorbs the other
// operand. POS_INF combined with NEG_INF yields the accumulate identity of the
// active semiring, so such a term can never win an accumulate.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "m3dpim/error.hpp"

namespace m3dpim {

using SatValue = std::int32_t;

inline constexpr SatValue kPosInf = std::numeric_limits<SatValue>::max();
inline constexpr SatValue kNegInf = std::numeric_limits<SatValue>::min();

constexpr bool is_sentinel(SatValue v) noexcept { return v == kPosInf || v == kNegInf; }

// Saturating add with absorbing sentinels. `opposite` is returned when the two
// operands are opposite-sign sentinels.
constexpr SatValue saturating_combine(SatValue a, SatValue b, SatValue opposite) noexcept {
    if (a == kPosInf || b == kPosInf) {
        return (a == kNegInf || b == kNegInf) ? opposite : kPosInf;
    }
    if (a == kNegInf || b == kNegInf) return kNegInf;
    const std::int64_t sum = std::int64_t{a} + std::int64_t{b};
    if (sum >= kPosInf) return kPosInf;
    if (sum <= kNegInf) return kNegInf;
    return static_cast<SatValue>(sum);
}

// Compile-time semiring policies used by the hot loops.
struct MinPlus {
    static constexpr SatValue accumulate_identity = kPosInf;
    static constexpr SatValue combine_identity = 0;
    static constexpr SatValue accumulate(SatValue a, SatValue b) noexcept { return a < b ? a : b; }
    static constexpr SatValue combine(SatValue a, SatValue b) noexcept {
        return saturating_combine(a, b, accumulate_identity);
    }
};

struct MaxPlus {
    static constexpr SatValue accumulate_identity = kNegInf;
    static constexpr SatValue combine_identity = 0;
    static constexpr SatValue accumulate(SatValue a, SatValue b) noexcept { return a < b ? b : a; }
    static constexpr SatValue combine(SatValue a, SatValue b) noexcept {
        return saturating_combine(a, b, accumulate_identity);
    }
};

template <typename S>
concept Semiring = requires(SatValue a, SatValue b) {
    { S::accumulate(a, b) } -> std::same_as<SatValue>;
    { S::combine(a, b) } -> std::same_as<SatValue>;
    { S::accumulate_identity } -> std::convertible_to<SatValue>;
    { S::combine_identity } -> std::convertible_to<SatValue>;
};

enum class AccumulateOp { Min, Max };

// Runtime description of a semiring; the value-level counterpart of the
// MinPlus / MaxPlus policies.
struct SemiringSpec {
    AccumulateOp op = AccumulateOp::Min;
    SatValue accumulate_identity = kPosInf;
    SatValue combine_identity = 0;

    constexpr SatValue accumulate(SatValue a, SatValue b) const noexcept {
        return op == AccumulateOp::Min ? MinPlus::accumulate(a, b) : MaxPlus::accumulate(a, b);
    }
    constexpr SatValue combine(SatValue a, SatValue b) const noexcept {
        return saturating_combine(a, b, accumulate_identity);
    }

    friend constexpr bool operator==(const SemiringSpec&, const SemiringSpec&) = default;
};

constexpr SemiringSpec minplus_spec() noexcept { return {AccumulateOp::Min, kPosInf, 0}; }
constexpr SemiringSpec maxplus_spec() noexcept { return {AccumulateOp::Max, kNegInf, 0}; }

// Square row-major B x B tile of saturating values.
class Tile {
public:
    Tile() = default;
    explicit Tile(std::size_t side, SatValue fill = 0) : side_(side), cells_(side * side, fill) {}
    Tile(std::size_t side, std::vector<SatValue> cells) : side_(side), cells_(std::move(cells)) {
        if (cells_.size() != side_ * side_) {
            throw ShapeError("tile of side " + std::to_string(side_) + " needs " +
                             std::to_string(side_ * side_) + " cells, got " +
                             std::to_string(cells_.size()));
        }
    }

    std::size_t side() const noexcept { return side_; }
    SatValue& operator()(std::size_t r, std::size_t c) noexcept { return cells_[r * side_ + c]; }
    SatValue operator()(std::size_t r, std::size_t c) const noexcept { return cells_[r * side_ + c]; }
    std::span<SatValue> cells() noexcept { return cells_; }
    std::span<const SatValue> cells() const noexcept { return cells_; }

    friend bool operator==(const Tile&, const Tile&) = default;

private:
    std::size_t side_ = 0;
    std::vector<SatValue> cells_;
};

namespace detail {

inline void check_tile_shapes(const Tile& d, const Tile& a, const Tile& b) {
    if (d.side() == 0 || a.side() != d.side() || b.side() != d.side()) {
        throw ShapeError("tile_update needs three non-empty tiles of equal side, got " +
                         std::to_string(d.side()) + ", " + std::to_string(a.side()) + ", " +
                         std::to_string(b.side()));
    }
}

}  // namespace detail

// D'[i][j] = D[i][j] (+) over k of (A[i][k] (x) Bt[k][j]). Pure: inputs are
// left untouched and every product reads the original operands.
template <Semiring S>
Tile tile_update(const Tile& d, const Tile& a, const Tile& bt) {
    detail::check_tile_shapes(d, a, bt);
    const std::size_t n = d.side();
    Tile out = d;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const SatValue aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) = S::accumulate(out(i, j), S::combine(aik, bt(k, j)));
            }
        }
    }
    return out;
}

inline Tile tile_update(const Tile& d, const Tile& a, const Tile& bt, const SemiringSpec& spec) {
    if (spec == minplus_spec()) return tile_update<MinPlus>(d, a, bt);
    if (spec == maxplus_spec()) return tile_update<MaxPlus>(d, a, bt);
    detail::check_tile_shapes(d, a, bt);
    const std::size_t n = d.side();
    Tile out = d;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) = spec.accumulate(out(i, j), spec.combine(a(i, k), bt(k, j)));
    return out;
}

}  // namespace m3dpim

#endif  // M3DPIM_SEMIRING_HPP
