#ifndef M3DPIM_ALIGN_HPP
#define M3DPIM_ALIGN_HPP

// Local (Smith-Waterman) alignment over the (max, +) semiring with a zero
// floor: the full-table reference, a fixed-band pass that stores 5-bit
// inter-cell differences, and an adaptive band that follows the best cell of
// each anti-diagonal.
//
// Orientation: DP row i walks the reference, column j walks the query.
// Moving "up" consumes a reference base (Delete), "left" a query base (Insert).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "m3dpim/error.hpp"
#include "m3dpim/semiring.hpp"

namespace m3dpim {

struct AlignmentParams {
    int match_score = 1;
    int mismatch_penalty = -1;
    int gap_penalty = -1;
    std::size_t band_width = 6;
    bool adaptive = false;

    void validate() const {
        if (match_score <= 0) throw ConfigError("match_score must be positive");
        if (mismatch_penalty > 0) throw ConfigError("mismatch_penalty must be <= 0");
        if (gap_penalty > 0) throw ConfigError("gap_penalty must be <= 0");
        if (band_width < 1) throw ConfigError("band_width must be at least 1");
        if (adaptive && band_width < 3)
            throw ConfigError("adaptive band_width must be >= 3, got " + std::to_string(band_width));
    }
};

// 5-bit signed difference, [-16, 15].
struct DiffCell {
    std::int8_t value = 0;
    friend bool operator==(DiffCell, DiffCell) = default;
};

inline constexpr int kDiffMin = -16;
inline constexpr int kDiffMax = 15;

constexpr DiffCell encode_diff(std::int64_t v) noexcept {
    return DiffCell{static_cast<std::int8_t>(std::clamp<std::int64_t>(v, kDiffMin, kDiffMax))};
}

constexpr SatValue decode_diff(DiffCell c, SatValue anchor) noexcept {
    return MaxPlus::combine(anchor, c.value);
}

enum class CigarOp : char { Match = 'M', Mismatch = 'X', Insert = 'I', Delete = 'D' };

struct CigarRun {
    CigarOp op = CigarOp::Match;
    std::size_t length = 0;
    friend bool operator==(const CigarRun&, const CigarRun&) = default;
};

using Cigar = std::vector<CigarRun>;

inline std::string to_string(const Cigar& cigar) {
    std::string out;
    for (const CigarRun& r : cigar) out += std::to_string(r.length) + static_cast<char>(r.op);
    return out;
}

// (query index, reference index) of a DP cell; both count consumed bases.
struct CellPos {
    std::size_t query = 0;
    std::size_t reference = 0;
    friend bool operator==(const CellPos&, const CellPos&) = default;
};

struct AlignmentResult {
    SatValue score = 0;
    CellPos end_position;
    // Filled only when traceback was requested.
    std::optional<Cigar> cigar;
    CellPos begin_position;
    // Some true inter-cell delta fell outside the 5-bit range.
    bool lossy = false;
    // Adaptive band: how often the centre's diagonal offset (query minus
    // reference index, sampled on even anti-diagonals) changed, and the
    // centre of every anti-diagonal.
    std::size_t band_shifts = 0;
    std::vector<CellPos> band_centers;
    // DP cells evaluated, and the number of dependent wavefront steps
    // (rows for the row-wise passes, anti-diagonals for the adaptive band).
    std::uint64_t cells = 0;
    std::uint64_t wavefronts = 0;
};

// Retained DP cells, one contiguous column range per reference row. Cells not
// stored read back as kNegInf; boundary cells (row or column 0) are 0.
class DpState {
public:
    DpState() = default;

    bool retained() const noexcept { return retained_; }

    void reset(std::string_view query, std::string_view reference, const AlignmentParams& p) {
        query_ = std::string(query);
        reference_ = std::string(reference);
        params_ = p;
        rows_.assign(reference.size() + 1, Row{});
        retained_ = true;
    }

    void store(std::size_t i, std::size_t j, SatValue v) {
        Row& r = rows_[i];
        if (r.values.empty()) {
            r.lo = j;
            r.values.push_back(v);
            return;
        }
        if (j < r.lo) {
            r.values.insert(r.values.begin(), r.lo - j, kNegInf);
            r.lo = j;
        } else if (j >= r.lo + r.values.size()) {
            r.values.resize(j - r.lo + 1, kNegInf);
        }
        r.values[j - r.lo] = v;
    }

    SatValue value(std::size_t i, std::size_t j) const noexcept {
        if (i == 0 || j == 0) return 0;
        if (i >= rows_.size()) return kNegInf;
        const Row& r = rows_[i];
        if (j < r.lo || j >= r.lo + r.values.size()) return kNegInf;
        return r.values[j - r.lo];
    }

    std::string_view query() const noexcept { return query_; }
    std::string_view reference() const noexcept { return reference_; }
    const AlignmentParams& params() const noexcept { return params_; }

private:
    struct Row {
        std::size_t lo = 0;
        std::vector<SatValue> values;
    };
    bool retained_ = false;
    std::string query_;
    std::string reference_;
    AlignmentParams params_;
    std::vector<Row> rows_;
};

namespace detail {

inline void check_sequence(std::string_view s, const char* what) {
    if (s.empty()) throw InputError(std::string(what) + " sequence is empty");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != 'A' && c != 'C' && c != 'G' && c != 'T' && c != 'N')
            throw InputError(std::string(what) + " has invalid base '" + std::string(1, c) + "' at " +
                             std::to_string(i));
    }
}

inline SatValue substitution(char r, char q, const AlignmentParams& p) noexcept {
    return (r == q && r != 'N') ? p.match_score : p.mismatch_penalty;
}

// max(0, diag + s, up + g, left + g) through the max-plus semiring.
inline SatValue sw_cell(SatValue diag, SatValue up, SatValue left, SatValue s, SatValue gap) noexcept {
    SatValue acc = MaxPlus::combine(diag, s);
    acc = MaxPlus::accumulate(acc, MaxPlus::combine(up, gap));
    acc = MaxPlus::accumulate(acc, MaxPlus::combine(left, gap));
    return MaxPlus::accumulate(acc, 0);
}

// Best end cell: highest score, then largest query end, then smallest
// reference end.
struct BestCell {
    SatValue score = 0;
    CellPos pos;
    void offer(SatValue v, std::size_t i, std::size_t j) noexcept {
        if (v > score || (v == score && v > 0 &&
                          (j > pos.query || (j == pos.query && i < pos.reference)))) {
            score = v;
            pos = {j, i};
        }
    }
};

inline void push_op(Cigar& c, CigarOp op) {
    if (!c.empty() && c.back().op == op)
        ++c.back().length;
    else
        c.push_back({op, 1});
}

}  // namespace detail

// Walks back from `end` to the first zero cell. Ties prefer diagonal, then
// up (Delete), then left (Insert). Returns the cigar and the start cell.
inline std::pair<Cigar, CellPos> traceback_with_start(const DpState& state, CellPos end) {
    if (!state.retained()) throw UsageError("traceback requested without retained DP state");
    const AlignmentParams& p = state.params();
    const std::string_view q = state.query();
    const std::string_view r = state.reference();
    if (end.query > q.size() || end.reference > r.size()) throw UsageError("traceback end lies outside the DP table");
    Cigar rev;
    std::size_t i = end.reference, j = end.query;
    while (i > 0 && j > 0) {
        const SatValue h = state.value(i, j);
        if (h <= 0) break;
        const SatValue s = detail::substitution(r[i - 1], q[j - 1], p);
        const SatValue diag = MaxPlus::combine(state.value(i - 1, j - 1), s);
        const SatValue up = MaxPlus::combine(state.value(i - 1, j), p.gap_penalty);
        const SatValue left = MaxPlus::combine(state.value(i, j - 1), p.gap_penalty);
        int move = 0;
        if (diag == h) move = 0;
        else if (up == h) move = 1;
        else if (left == h) move = 2;
        else if (diag >= up && diag >= left) move = 0;  // lossy storage: follow the best predecessor
        else move = up >= left ? 1 : 2;
        if (move == 0) {
            detail::push_op(rev, s > 0 ? CigarOp::Match : CigarOp::Mismatch);
            --i;
            --j;
        } else if (move == 1) {
            detail::push_op(rev, CigarOp::Delete);
            --i;
        } else {
            detail::push_op(rev, CigarOp::Insert);
            --j;
        }
    }
    std::reverse(rev.begin(), rev.end());
    return {rev, CellPos{j, i}};
}

inline Cigar traceback(const DpState& state, CellPos end) { return traceback_with_start(state, end).first; }

// Score obtained by replaying `cigar` from `begin`.
inline SatValue replay_cigar(std::string_view query, std::string_view reference, CellPos begin,
                             const Cigar& cigar, const AlignmentParams& p) {
    std::size_t i = begin.reference, j = begin.query;
    SatValue score = 0;
    for (const CigarRun& run : cigar) {
        for (std::size_t n = 0; n < run.length; ++n) {
            switch (run.op) {
            case CigarOp::Match:
            case CigarOp::Mismatch:
                if (i >= reference.size() || j >= query.size()) throw InputError("cigar runs past the sequences");
                score = MaxPlus::combine(score, detail::substitution(reference[i], query[j], p));
                ++i;
                ++j;
                break;
            case CigarOp::Delete:
                if (i >= reference.size()) throw InputError("cigar runs past the reference");
                score = MaxPlus::combine(score, p.gap_penalty);
                ++i;
                break;
            case CigarOp::Insert:
                if (j >= query.size()) throw InputError("cigar runs past the query");
                score = MaxPlus::combine(score, p.gap_penalty);
                ++j;
                break;
            }
        }
    }
    return score;
}

namespace detail {

inline void finish(AlignmentResult& res, DpState* state) {
    if (!state) return;
    auto [cigar, begin] = traceback_with_start(*state, res.end_position);
    res.cigar = std::move(cigar);
    res.begin_position = begin;
}

}  // namespace detail

// Full-table local alignment. Pass `state` to retain cells and get a cigar.
inline AlignmentResult sw_reference(std::string_view query, std::string_view reference,
                                    const AlignmentParams& p, DpState* state = nullptr) {
    detail::check_sequence(query, "query");
    detail::check_sequence(reference, "reference");
    p.validate();
    const std::size_t lq = query.size(), lr = reference.size();
    if (state) state->reset(query, reference, p);
    std::vector<SatValue> prev(lq + 1, 0), cur(lq + 1, 0);
    detail::BestCell best;
    for (std::size_t i = 1; i <= lr; ++i) {
        cur[0] = 0;
        for (std::size_t j = 1; j <= lq; ++j) {
            const SatValue v = detail::sw_cell(prev[j - 1], prev[j], cur[j - 1],
                                               detail::substitution(reference[i - 1], query[j - 1], p),
                                               p.gap_penalty);
            cur[j] = v;
            best.offer(v, i, j);
            if (state) state->store(i, j, v);
        }
        std::swap(prev, cur);
    }
    AlignmentResult res;
    res.score = best.score;
    res.end_position = best.pos;
    res.cells = static_cast<std::uint64_t>(lq) * lr;
    res.wavefronts = lr;
    detail::finish(res, state);
    return res;
}

// Fixed band |j - i| <= band_width. Each row is held as an absolute anchor
// (its first in-band cell) plus 5-bit differences to the left neighbour; the
// next row is computed from the decoded frontier. Cells outside the band read
// as the accumulate identity. A band at least as wide as the table computes
// every cell, so the result matches sw_reference.
inline AlignmentResult banded_diff_dp(std::string_view query, std::string_view reference,
                                      const AlignmentParams& p, DpState* state = nullptr) {
    detail::check_sequence(query, "query");
    detail::check_sequence(reference, "reference");
    p.validate();
    const std::size_t lq = query.size(), lr = reference.size();
    const std::size_t w = p.band_width;
    if (state) state->reset(query, reference, p);

    // Decoded previous row over columns [prev_lo, prev_hi]; row 0 is all zero.
    std::size_t prev_lo = 0, prev_hi = std::min(lq, w);
    std::vector<SatValue> prev(prev_hi - prev_lo + 1, 0);
    std::vector<SatValue> cur;
    std::vector<DiffCell> diffs;
    auto read_prev = [&](std::size_t j) -> SatValue {
        if (j == 0) return 0;
        if (j < prev_lo || j > prev_hi) return kNegInf;
        return prev[j - prev_lo];
    };

    detail::BestCell best;
    AlignmentResult res;
    for (std::size_t i = 1; i <= lr; ++i) {
        const std::size_t lo = std::max<std::size_t>(1, i > w ? i - w : 1);
        const std::size_t hi = std::min(lq, i + w);
        if (lo > hi) {
            // Band has left the query: nothing further is reachable.
            break;
        }
        cur.assign(hi - lo + 1, 0);
        SatValue left = lo == 1 ? 0 : kNegInf;
        for (std::size_t j = lo; j <= hi; ++j) {
            const SatValue v = detail::sw_cell(read_prev(j - 1), read_prev(j), left,
                                               detail::substitution(reference[i - 1], query[j - 1], p),
                                               p.gap_penalty);
            cur[j - lo] = v;
            left = v;
            best.offer(v, i, j);
        }
        res.cells += hi - lo + 1;
        ++res.wavefronts;

        // Store as anchor + differences and decode back: later rows see
        // exactly what the 5-bit storage holds.
        diffs.resize(cur.size());
        SatValue running = cur[0];
        for (std::size_t t = 1; t < cur.size(); ++t) {
            const std::int64_t delta = std::int64_t{cur[t]} - std::int64_t{cur[t - 1]};
            if (delta < kDiffMin || delta > kDiffMax) res.lossy = true;
            diffs[t] = encode_diff(delta);
            running = decode_diff(diffs[t], running);
            cur[t] = running;
        }
        if (state)
            for (std::size_t j = lo; j <= hi; ++j) state->store(i, j, cur[j - lo]);
        prev.swap(cur);
        prev_lo = lo;
        prev_hi = hi;
    }
    res.score = best.score;
    res.end_position = best.pos;
    detail::finish(res, state);
    return res;
}

// Adaptive band of band_width cells per anti-diagonal d = i + j. Anti-diagonal
// d holds cells (ci + t, cj - t), t in [-h, w - 1 - h] with h = w / 2, around
// the centre (ci, cj).
// After each anti-diagonal the centre moves down (ci + 1) when the maximum
// lies only below the centre (t > 0), right (cj + 1) when only above it, and
// otherwise goes straight, which alternates with the previous move so the
// band follows the diagonal.
inline AlignmentResult adaptive_banded_dp(std::string_view query, std::string_view reference,
                                          const AlignmentParams& p, DpState* state = nullptr) {
    detail::check_sequence(query, "query");
    detail::check_sequence(reference, "reference");
    AlignmentParams ap = p;
    ap.adaptive = true;
    ap.validate();
    const auto lq = static_cast<std::int64_t>(query.size());
    const auto lr = static_cast<std::int64_t>(reference.size());
    const auto h = static_cast<std::int64_t>(ap.band_width / 2);
    const auto hi = static_cast<std::int64_t>(ap.band_width) - 1 - h;
    const std::size_t width = ap.band_width;
    if (state) state->reset(query, reference, ap);

    struct Diag {
        std::int64_t ci = 0, cj = 0;
        std::vector<SatValue> v;  // index t + h
    };
    Diag d2, d1, d0;  // anti-diagonals d-2, d-1 and d
    bool have_d1 = false, have_d2 = false;

    auto in_table = [&](std::int64_t i, std::int64_t j) { return i >= 0 && j >= 0 && i <= lr && j <= lq; };
    auto read = [&](const Diag& dg, bool have, std::int64_t i, std::int64_t j) -> SatValue {
        if (i == 0 || j == 0) return 0;
        if (!have) return kNegInf;
        const std::int64_t t = i - dg.ci;
        if (t < -h || t > hi || j != dg.cj - t) return kNegInf;
        return dg.v[static_cast<std::size_t>(t + h)];
    };

    detail::BestCell best;
    AlignmentResult res;
    bool last_down = true;  // the first straight move goes right
    std::int64_t ci = 0, cj = 0, last_offset = 0;
    for (std::int64_t d = 0; d <= lr + lq; ++d) {
        d0.ci = ci;
        d0.cj = cj;
        d0.v.assign(width, kNegInf);
        bool any = false;
        SatValue dmax = kNegInf;
        for (std::int64_t t = -h; t <= hi; ++t) {
            const std::int64_t i = ci + t, j = cj - t;
            if (!in_table(i, j)) continue;
            any = true;
            SatValue v = 0;
            if (i > 0 && j > 0) {
                v = detail::sw_cell(read(d2, have_d2, i - 1, j - 1), read(d1, have_d1, i - 1, j),
                                    read(d1, have_d1, i, j - 1),
                                    detail::substitution(reference[static_cast<std::size_t>(i - 1)],
                                                         query[static_cast<std::size_t>(j - 1)], ap),
                                    ap.gap_penalty);
                best.offer(v, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                ++res.cells;
                if (state) state->store(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
            }
            d0.v[static_cast<std::size_t>(t + h)] = v;
            dmax = std::max(dmax, v);
        }
        if (!any) break;
        ++res.wavefronts;
        if (d % 2 == 0) {
            if (d > 0 && cj - ci != last_offset) ++res.band_shifts;
            last_offset = cj - ci;
        }
        res.band_centers.push_back({static_cast<std::size_t>(std::max<std::int64_t>(cj, 0)),
                                    static_cast<std::size_t>(std::max<std::int64_t>(ci, 0))});

        bool lower = false, upper = false, centre = false;
        for (std::int64_t t = -h; t <= hi; ++t) {
            if (!in_table(ci + t, cj - t) || d0.v[static_cast<std::size_t>(t + h)] != dmax) continue;
            if (t > 0) lower = true;
            else if (t < 0) upper = true;
            else centre = true;
        }
        bool down;
        if (centre || (lower && upper)) {
            down = !last_down;
        } else {
            down = lower;
        }
        last_down = down;
        if (down) ++ci;
        else ++cj;

        d2 = std::move(d1);
        have_d2 = have_d1;
        d1 = std::move(d0);
        have_d1 = true;
        d0 = Diag{};
    }
    res.score = best.score;
    res.end_position = best.pos;
    detail::finish(res, state);
    return res;
}

// Dispatches on p.adaptive.
inline AlignmentResult align(std::string_view query, std::string_view reference, const AlignmentParams& p,
                             DpState* state = nullptr) {
    return p.adaptive ? adaptive_banded_dp(query, reference, p, state) : banded_diff_dp(query, reference, p, state);
}

}  // namespace m3dpim

#endif  // M3DPIM_ALIGN_HPP
