#ifndef M3DPIM_APSP_HPP
#define M3DPIM_APSP_HPP

// All-pairs shortest paths over the (min, +) semiring: the scalar
// Floyd-Warshall reference and its blocked (tiled) three-phase form.

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "m3dpim/error.hpp"
#include "m3dpim/semiring.hpp"

namespace m3dpim {

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::int64_t weight = 1;
};

// n x n saturating distance grid. kPosInf marks "no path".
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    // Zero diagonal, everything else unreachable.
    explicit DistanceMatrix(std::size_t n) : n_(n), cells_(n * n, kPosInf) {
        for (std::size_t i = 0; i < n; ++i) cells_[i * n + i] = 0;
    }

    DistanceMatrix(std::size_t n, std::vector<SatValue> cells) : n_(n), cells_(std::move(cells)) {
        if (cells_.size() != n * n) throw ShapeError("distance matrix cell count does not match n*n");
    }

    std::size_t nodes() const noexcept { return n_; }
    SatValue& at(std::size_t i, std::size_t j) noexcept { return cells_[i * n_ + j]; }
    SatValue at(std::size_t i, std::size_t j) const noexcept { return cells_[i * n_ + j]; }
    std::span<SatValue> cells() noexcept { return cells_; }
    std::span<const SatValue> cells() const noexcept { return cells_; }

    // Tile side the matrix was last solved with; 0 for the unblocked solver.
    std::size_t block_size() const noexcept { return block_size_; }
    void set_block_size(std::size_t b) noexcept { block_size_ = b; }

    // Node count rounded up to a multiple of `block`.
    static std::size_t padded_size(std::size_t n, std::size_t block) noexcept {
        return block == 0 ? n : (n + block - 1) / block * block;
    }

    // Copy grown to `size` nodes; phantom rows and columns are unreachable.
    DistanceMatrix padded(std::size_t size) const {
        if (size < n_) throw ShapeError("cannot pad a matrix to fewer nodes");
        DistanceMatrix out(size);
        for (std::size_t i = 0; i < n_; ++i)
            std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(i * n_), n_,
                        out.cells_.begin() + static_cast<std::ptrdiff_t>(i * size));
        return out;
    }

    DistanceMatrix cropped(std::size_t size) const {
        if (size > n_) throw ShapeError("cannot crop a matrix to more nodes");
        DistanceMatrix out(size);
        for (std::size_t i = 0; i < size; ++i)
            std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(i * n_), size,
                        out.cells_.begin() + static_cast<std::ptrdiff_t>(i * size));
        return out;
    }

    Tile tile(std::size_t bi, std::size_t bj, std::size_t b) const {
        Tile t(b);
        for (std::size_t r = 0; r < b; ++r)
            for (std::size_t c = 0; c < b; ++c) t(r, c) = at(bi * b + r, bj * b + c);
        return t;
    }

    void store_tile(std::size_t bi, std::size_t bj, const Tile& t) {
        const std::size_t b = t.side();
        for (std::size_t r = 0; r < b; ++r)
            for (std::size_t c = 0; c < b; ++c) at(bi * b + r, bj * b + c) = t(r, c);
    }

    // Equality ignores the block_size annotation.
    friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
        return a.n_ == b.n_ && a.cells_ == b.cells_;
    }

private:
    std::size_t n_ = 0;
    std::size_t block_size_ = 0;
    std::vector<SatValue> cells_;
};

// Builds the initial matrix: zero diagonal, duplicate edges keep the lightest
// weight, self-loops are ignored.
inline DistanceMatrix load_graph(const std::vector<Edge>& edges, std::size_t n) {
    DistanceMatrix m(n);
    for (const Edge& e : edges) {
        if (e.from >= n || e.to >= n) {
            throw InputError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                             " references a node outside [0, " + std::to_string(n) + ")");
        }
        if (e.weight < 0) throw InputError("negative edge weight " + std::to_string(e.weight));
        if (e.weight >= kPosInf) throw InputError("edge weight does not fit in 31 bits");
        if (e.from == e.to) continue;
        SatValue& cell = m.at(e.from, e.to);
        cell = std::min(cell, static_cast<SatValue>(e.weight));
    }
    return m;
}

struct EdgeList {
    std::vector<Edge> edges;
    std::size_t nodes = 0;
    // Original identifier of each compact node id, in first-appearance order.
    std::vector<std::int64_t> original_ids;
};

// Parses `u v [w]` lines (SNAP style). '#' lines and blank lines are skipped,
// a missing weight defaults to 1. Node identifiers are compacted to
// 0..nodes-1 in order of first appearance. max_nodes > 0 keeps only edges
// whose endpoints are among the first max_nodes distinct identifiers.
inline EdgeList parse_edge_list(std::istream& in, std::size_t max_nodes = 0) {
    EdgeList out;
    std::unordered_map<std::int64_t, std::size_t> ids;
    auto intern = [&](std::int64_t raw, bool& ok) -> std::size_t {
        auto it = ids.find(raw);
        if (it != ids.end()) return it->second;
        if (max_nodes != 0 && ids.size() >= max_nodes) {
            ok = false;
            return 0;
        }
        const std::size_t id = ids.size();
        ids.emplace(raw, id);
        out.original_ids.push_back(raw);
        return id;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '#') continue;
        std::istringstream fields(line);
        std::int64_t u = 0, v = 0, w = 1;
        if (!(fields >> u >> v)) throw InputError("malformed edge on line " + std::to_string(lineno));
        if (!(fields >> w)) w = 1;
        if (u < 0 || v < 0) throw InputError("negative node id on line " + std::to_string(lineno));
        bool ok = true;
        const std::size_t a = intern(u, ok);
        const std::size_t b = ok ? intern(v, ok) : 0;
        if (!ok) continue;
        out.edges.push_back({a, b, w});
    }
    out.nodes = ids.size();
    return out;
}

namespace detail {

inline bool all_nonnegative(std::span<const SatValue> cells) {
    for (SatValue v : cells)
        if (v < 0) return false;
    return true;
}

// In-place D <- D (+) A (x) Bt on row-major views with a shared stride.
// Operands may alias the target; k is the outer loop, as Floyd-Warshall
// requires for the pivot tile.
//
// The unsigned path is exact for operands in [0, kPosInf]: the 32-bit
// unsigned sum of two such values cannot wrap, and clamping it to kPosInf
// reproduces the saturating combine.
template <bool NonNegative>
inline void minplus_block_inplace(SatValue* d, const SatValue* a, const SatValue* bt,
                                  std::size_t stride, std::size_t side) {
    for (std::size_t k = 0; k < side; ++k) {
        const SatValue* brow = bt + k * stride;
        for (std::size_t i = 0; i < side; ++i) {
            const SatValue aik = a[i * stride + k];
            if (aik == kPosInf) continue;
            SatValue* drow = d + i * stride;
            if constexpr (NonNegative) {
                const auto ua = static_cast<std::uint32_t>(aik);
                for (std::size_t j = 0; j < side; ++j) {
                    std::uint32_t s = ua + static_cast<std::uint32_t>(brow[j]);
                    s = s < static_cast<std::uint32_t>(kPosInf) ? s : static_cast<std::uint32_t>(kPosInf);
                    const auto cur = static_cast<std::uint32_t>(drow[j]);
                    drow[j] = static_cast<SatValue>(s < cur ? s : cur);
                }
            } else {
                for (std::size_t j = 0; j < side; ++j)
                    drow[j] = MinPlus::accumulate(drow[j], MinPlus::combine(aik, brow[j]));
            }
        }
    }
}

template <bool NonNegative>
inline void blocked_fw_inplace(std::span<SatValue> cells, std::size_t size, std::size_t b) {
    const std::size_t blocks = size / b;
    auto tile = [&](std::size_t bi, std::size_t bj) { return cells.data() + bi * b * size + bj * b; };
    for (std::size_t k = 0; k < blocks; ++k) {
        SatValue* pivot = tile(k, k);
        minplus_block_inplace<NonNegative>(pivot, pivot, pivot, size, b);
        for (std::size_t i = 0; i < blocks; ++i) {
            if (i == k) continue;
            minplus_block_inplace<NonNegative>(tile(i, k), tile(i, k), pivot, size, b);
        }
        for (std::size_t j = 0; j < blocks; ++j) {
            if (j == k) continue;
            minplus_block_inplace<NonNegative>(tile(k, j), pivot, tile(k, j), size, b);
        }
        for (std::size_t i = 0; i < blocks; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0; j < blocks; ++j) {
                if (j == k) continue;
                minplus_block_inplace<NonNegative>(tile(i, j), tile(i, k), tile(k, j), size, b);
            }
        }
    }
}

}  // namespace detail

// Scalar Floyd-Warshall, k outermost.
inline DistanceMatrix fw_reference(const DistanceMatrix& m) {
    DistanceMatrix out = m;
    const std::size_t n = m.nodes();
    if (n == 0) return out;
    if (detail::all_nonnegative(out.cells()))
        detail::minplus_block_inplace<true>(out.cells().data(), out.cells().data(), out.cells().data(), n, n);
    else
        detail::minplus_block_inplace<false>(out.cells().data(), out.cells().data(), out.cells().data(), n, n);
    out.set_block_size(0);
    return out;
}

// Scalar Floyd-Warshall confined to one square tile.
inline Tile fw_on_block(const Tile& pivot) {
    Tile out = pivot;
    const std::size_t b = out.side();
    if (b == 0) return out;
    detail::minplus_block_inplace<false>(out.cells().data(), out.cells().data(), out.cells().data(), b, b);
    return out;
}

// Target (+) Left (x) Top over (min, +).
inline Tile block_update(const Tile& target, const Tile& left, const Tile& top) {
    return tile_update<MinPlus>(target, left, top);
}

// Blocked Floyd-Warshall. The matrix is padded with unreachable phantom nodes
// up to a multiple of `block`, solved in size/block super-steps (pivot
// self-update, pivot row and column, internal tiles) and cropped back.
inline DistanceMatrix blocked_fw(const DistanceMatrix& m, std::size_t block) {
    if (block == 0) throw ConfigError("block size must be at least 1");
    const std::size_t n = m.nodes();
    const std::size_t size = DistanceMatrix::padded_size(n, block);
    DistanceMatrix work = size == n ? m : m.padded(size);
    if (size > 0) {
        if (detail::all_nonnegative(work.cells()))
            detail::blocked_fw_inplace<true>(work.cells(), size, block);
        else
            detail::blocked_fw_inplace<false>(work.cells(), size, block);
    }
    DistanceMatrix out = size == n ? std::move(work) : work.cropped(n);
    out.set_block_size(block);
    return out;
}

}  // namespace m3dpim

#endif  // M3DPIM_APSP_HPP
