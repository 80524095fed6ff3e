#ifndef M3DPIM_MEMMODEL_HPP
#define M3DPIM_MEMMODEL_HPP

// Monolithic-3D DRAM geometry and timing. Layers are grouped into tiers; the
// activate latency t_RCD grows with the tier index while precharge and the
// row-active remainder stay fixed. Times are kept in integer picoseconds so
// schedules add up exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "m3dpim/error.hpp"

namespace m3dpim {

using Picoseconds = std::int64_t;

inline Picoseconds ns_to_ps(double ns) { return static_cast<Picoseconds>(std::llround(ns * 1000.0)); }

struct MemConfig {
    std::uint32_t layers = 1024;
    std::uint32_t tiers = 8;
    std::uint64_t tier_capacity_bits = std::uint64_t{4} << 30;
    std::uint32_t channels = 16;
    std::uint32_t banks_per_channel = 16;
    std::uint32_t bank_groups_per_channel = 2;
    std::uint32_t row_buffer_bits = 32768;
    // Transfer unit of one column access.
    std::uint32_t access_bits = 8192;
    std::uint32_t io_bits_per_pu = 1024;
    std::vector<double> t_rcd_ns = {2.29, 3.92, 5.99, 8.50, 11.44, 14.82, 18.63, 22.88};
    double t_rp_ns = 4.77;
    double t_ras_offset_ns = 27.5;
    double t_cas_ns = 2.0;
    double energy_per_bit_pj = 0.429;

    std::uint32_t bank_groups() const noexcept { return channels * bank_groups_per_channel; }
    std::uint32_t banks_per_group() const noexcept { return banks_per_channel / bank_groups_per_channel; }
    std::uint32_t total_banks() const noexcept { return channels * banks_per_channel; }
    std::uint64_t chip_capacity_bits() const noexcept { return tier_capacity_bits * tiers; }
    std::uint64_t row_bytes() const noexcept { return row_buffer_bits / 8; }
    // Rows of one bank that fall inside one tier.
    std::uint64_t rows_per_bank_per_tier() const noexcept {
        return tier_capacity_bits / (std::uint64_t{total_banks()} * row_buffer_bits);
    }

    void validate() const {
        if (tiers == 0 || channels == 0 || banks_per_channel == 0 || bank_groups_per_channel == 0)
            throw ConfigError("memory geometry counts must be positive");
        if (layers % tiers != 0) throw ConfigError("layers must split evenly into tiers");
        if (banks_per_channel % bank_groups_per_channel != 0)
            throw ConfigError("banks_per_channel must be a multiple of bank_groups_per_channel");
        if (row_buffer_bits == 0 || row_buffer_bits % 8 != 0) throw ConfigError("row_buffer_bits must be a positive multiple of 8");
        if (access_bits == 0 || row_buffer_bits % access_bits != 0)
            throw ConfigError("access_bits must divide row_buffer_bits");
        if (io_bits_per_pu == 0) throw ConfigError("io_bits_per_pu must be positive");
        if (tier_capacity_bits == 0 || tier_capacity_bits % (std::uint64_t{total_banks()} * row_buffer_bits) != 0)
            throw ConfigError("tier_capacity_bits must be a whole number of rows in every bank");
        if (t_rcd_ns.size() != tiers)
            throw ConfigError("t_rcd_ns needs one entry per tier (" + std::to_string(tiers) + ")");
        for (std::size_t t = 0; t < t_rcd_ns.size(); ++t) {
            if (!(t_rcd_ns[t] > 0)) throw ConfigError("t_rcd_ns entries must be positive");
            if (t > 0 && !(t_rcd_ns[t] > t_rcd_ns[t - 1]))
                throw ConfigError("t_rcd_ns must be strictly increasing with tier index");
        }
        if (t_rp_ns < 0 || t_ras_offset_ns < 0 || t_cas_ns < 0) throw ConfigError("timing constants must be >= 0");
        if (energy_per_bit_pj < 0) throw ConfigError("energy_per_bit_pj must be >= 0");
    }

    void check_tier(std::uint32_t tier) const {
        if (tier >= tiers) throw ConfigError("tier " + std::to_string(tier) + " out of range [0, " + std::to_string(tiers) + ")");
    }
};

// Row cycle time: precharge + activate + the fixed row-active remainder.
inline double t_rc(const MemConfig& cfg, std::uint32_t tier) {
    cfg.check_tier(tier);
    return cfg.t_rp_ns + cfg.t_rcd_ns[tier] + cfg.t_ras_offset_ns;
}

inline Picoseconds t_rc_ps(const MemConfig& cfg, std::uint32_t tier) {
    cfg.check_tier(tier);
    return ns_to_ps(cfg.t_rp_ns) + ns_to_ps(cfg.t_rcd_ns[tier]) + ns_to_ps(cfg.t_ras_offset_ns);
}

struct PhysicalAddress {
    std::uint32_t channel = 0;
    std::uint32_t bank_group = 0;
    std::uint32_t bank = 0;  // within the bank group
    std::uint32_t tier = 0;
    std::uint64_t row = 0;   // within the bank and tier
    std::uint64_t column = 0;  // byte within the row
    friend bool operator==(const PhysicalAddress&, const PhysicalAddress&) = default;
};

enum class AddressLayout {
    // column | row | bank | bank_group | channel | tier (low to high)
    RowFirst,
    // column | channel | bank_group | bank | row | tier: consecutive rows
    // land in different channels.
    ChannelInterleaved,
};

inline PhysicalAddress decompose(std::uint64_t byte_addr, const MemConfig& cfg,
                                 AddressLayout layout = AddressLayout::RowFirst) {
    if (byte_addr >= cfg.chip_capacity_bits() / 8) throw InputError("address beyond chip capacity");
    PhysicalAddress a;
    std::uint64_t x = byte_addr;
    auto take = [&x](std::uint64_t radix) {
        const std::uint64_t v = x % radix;
        x /= radix;
        return v;
    };
    a.column = take(cfg.row_bytes());
    if (layout == AddressLayout::RowFirst) {
        a.row = take(cfg.rows_per_bank_per_tier());
        a.bank = static_cast<std::uint32_t>(take(cfg.banks_per_group()));
        a.bank_group = static_cast<std::uint32_t>(take(cfg.bank_groups_per_channel));
        a.channel = static_cast<std::uint32_t>(take(cfg.channels));
    } else {
        a.channel = static_cast<std::uint32_t>(take(cfg.channels));
        a.bank_group = static_cast<std::uint32_t>(take(cfg.bank_groups_per_channel));
        a.bank = static_cast<std::uint32_t>(take(cfg.banks_per_group()));
        a.row = take(cfg.rows_per_bank_per_tier());
    }
    a.tier = static_cast<std::uint32_t>(x);
    return a;
}

inline std::uint64_t compose(const PhysicalAddress& a, const MemConfig& cfg,
                             AddressLayout layout = AddressLayout::RowFirst) {
    std::uint64_t x = a.tier;
    auto put = [&x](std::uint64_t v, std::uint64_t radix) { x = x * radix + v; };
    if (layout == AddressLayout::RowFirst) {
        put(a.channel, cfg.channels);
        put(a.bank_group, cfg.bank_groups_per_channel);
        put(a.bank, cfg.banks_per_group());
        put(a.row, cfg.rows_per_bank_per_tier());
    } else {
        put(a.row, cfg.rows_per_bank_per_tier());
        put(a.bank, cfg.banks_per_group());
        put(a.bank_group, cfg.bank_groups_per_channel);
        put(a.channel, cfg.channels);
    }
    put(a.column, cfg.row_bytes());
    return x;
}

inline std::uint32_t global_bank(const PhysicalAddress& a, const MemConfig& cfg) noexcept {
    return (a.channel * cfg.bank_groups_per_channel + a.bank_group) * cfg.banks_per_group() + a.bank;
}

enum class RowOutcome { Hit, Miss, Conflict };

// Open-row bookkeeping for every bank. A row is identified by (tier, row).
class BankState {
public:
    explicit BankState(const MemConfig& cfg) : open_(cfg.total_banks(), kClosed) {}

    std::optional<std::uint64_t> open_row(std::uint32_t bank) const {
        return open_[bank] == kClosed ? std::nullopt : std::optional<std::uint64_t>(open_[bank]);
    }
    void set_open(std::uint32_t bank, std::uint64_t key) { open_[bank] = key; }
    void close(std::uint32_t bank) { open_[bank] = kClosed; }
    std::size_t banks() const noexcept { return open_.size(); }

private:
    static constexpr std::uint64_t kClosed = ~std::uint64_t{0};
    std::vector<std::uint64_t> open_;
};

inline std::uint64_t row_key(const PhysicalAddress& a) noexcept { return (std::uint64_t{a.tier} << 40) | a.row; }

inline RowOutcome classify(const PhysicalAddress& a, const BankState& state, const MemConfig& cfg) {
    const auto open = state.open_row(global_bank(a, cfg));
    if (!open) return RowOutcome::Miss;
    return *open == row_key(a) ? RowOutcome::Hit : RowOutcome::Conflict;
}

// Open-page latency under an optional timing tier that replaces the
// address's own tier.
inline Picoseconds access_latency_ps(const PhysicalAddress& a, BankState& state, const MemConfig& cfg,
                                     std::optional<std::uint32_t> timing_tier = std::nullopt,
                                     RowOutcome* outcome = nullptr) {
    const std::uint32_t tier = timing_tier.value_or(a.tier);
    cfg.check_tier(tier);
    const RowOutcome o = classify(a, state, cfg);
    if (outcome) *outcome = o;
    const Picoseconds cas = ns_to_ps(cfg.t_cas_ns);
    Picoseconds lat = cas;
    if (o != RowOutcome::Hit) lat += ns_to_ps(cfg.t_rcd_ns[tier]);
    if (o == RowOutcome::Conflict) lat += ns_to_ps(cfg.t_rp_ns);
    state.set_open(global_bank(a, cfg), row_key(a));
    return lat;
}

inline double access_latency(const PhysicalAddress& a, BankState& state, const MemConfig& cfg) {
    return static_cast<double>(access_latency_ps(a, state, cfg)) / 1000.0;
}

// Tile (i, j) of an M-tile-wide grid goes to PU (i*M + j) mod pus.
constexpr std::uint32_t map_tile_mod(std::uint64_t i, std::uint64_t j, std::uint64_t m, std::uint32_t pus) noexcept {
    return static_cast<std::uint32_t>((i * m + j) % pus);
}

inline std::uint32_t map_tile(std::uint64_t i, std::uint64_t j, std::uint64_t m, const MemConfig& cfg) {
    if (m == 0) throw ConfigError("tiles per row must be at least 1");
    return map_tile_mod(i, j, m, cfg.bank_groups());
}

inline double access_energy(std::uint64_t bits, const MemConfig& cfg) {
    return static_cast<double>(bits) * cfg.energy_per_bit_pj;
}

enum class Segment { PTR, CAL, Reference, ReadBuffer, DistanceMatrix, Scratch };
enum class PlacementPolicy { TierAware, UniformWorst, UniformBest };
enum class Interleave { ChannelInterleaved, Pinned };

inline const char* to_string(Segment s) {
    switch (s) {
    case Segment::PTR: return "ptr";
    case Segment::CAL: return "cal";
    case Segment::Reference: return "reference";
    case Segment::ReadBuffer: return "read_buffer";
    case Segment::DistanceMatrix: return "distance_matrix";
    case Segment::Scratch: return "scratch";
    }
    return "?";
}

inline const char* to_string(PlacementPolicy p) {
    switch (p) {
    case PlacementPolicy::TierAware: return "tier_aware";
    case PlacementPolicy::UniformWorst: return "uniform_worst";
    case PlacementPolicy::UniformBest: return "uniform_best";
    }
    return "?";
}

inline PlacementPolicy parse_policy(const std::string& s) {
    if (s == "tier_aware") return PlacementPolicy::TierAware;
    if (s == "uniform_worst") return PlacementPolicy::UniformWorst;
    if (s == "uniform_best") return PlacementPolicy::UniformBest;
    throw ConfigError("unknown mapping policy '" + s + "'");
}

struct SegmentRequest {
    Segment segment = Segment::Scratch;
    std::uint64_t bits = 0;
};

// A contiguous run of a segment inside one tier.
struct TierPiece {
    std::uint32_t tier = 0;
    std::uint64_t tier_offset_bits = 0;
    std::uint64_t bits = 0;
};

struct SegmentPlacement {
    Segment segment = Segment::Scratch;
    std::uint64_t bits = 0;
    std::uint32_t tier_lo = 0;
    std::uint32_t tier_hi = 0;
    Interleave interleave = Interleave::ChannelInterleaved;
    std::vector<TierPiece> pieces;
    // Tier whose timing every access to this segment uses, if not its own.
    std::optional<std::uint32_t> timing_tier;
};

namespace detail {

inline int segment_priority(Segment s) {
    switch (s) {
    case Segment::PTR: return 0;
    case Segment::CAL: return 1;
    case Segment::Reference: return 2;
    default: return 3;
    }
}

}  // namespace detail

// Fills tiers bottom-up in priority order PTR, CAL, Reference, then the rest
// in request order. The uniform policies keep the same physical layout and
// pin every access to the slowest or fastest tier's timing.
inline std::vector<SegmentPlacement> place_segments(const std::vector<SegmentRequest>& requests,
                                                    PlacementPolicy policy, const MemConfig& cfg) {
    std::uint64_t total = 0;
    for (const auto& r : requests) total += r.bits;
    if (total > cfg.chip_capacity_bits())
        throw PlacementError("requested " + std::to_string(total) + " bits exceed chip capacity of " +
                             std::to_string(cfg.chip_capacity_bits()));
    std::vector<std::size_t> order(requests.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detail::segment_priority(requests[a].segment) < detail::segment_priority(requests[b].segment);
    });

    std::vector<SegmentPlacement> out(requests.size());
    std::uint32_t tier = 0;
    std::uint64_t used = 0;
    for (std::size_t idx : order) {
        const SegmentRequest& r = requests[idx];
        SegmentPlacement& p = out[idx];
        p.segment = r.segment;
        p.bits = r.bits;
        p.interleave = (r.segment == Segment::PTR || r.segment == Segment::CAL) ? Interleave::Pinned
                                                                                : Interleave::ChannelInterleaved;
        std::uint64_t left = r.bits;
        p.tier_lo = tier;
        do {
            if (used == cfg.tier_capacity_bits) {
                ++tier;
                used = 0;
            }
            const std::uint64_t take = std::min(left, cfg.tier_capacity_bits - used);
            if (take > 0 || r.bits == 0) p.pieces.push_back({tier, used, take});
            used += take;
            left -= take;
        } while (left > 0);
        p.tier_hi = tier;
        if (policy == PlacementPolicy::UniformWorst) p.timing_tier = cfg.tiers - 1;
        if (policy == PlacementPolicy::UniformBest) p.timing_tier = 0;
    }
    return out;
}

// Physical address of a byte inside a placed segment. Each tier piece is
// laid out channel-interleaved, so consecutive rows spread across banks.
inline PhysicalAddress segment_address(const SegmentPlacement& p, std::uint64_t byte_offset, const MemConfig& cfg) {
    std::uint64_t bit = byte_offset * 8;
    for (const TierPiece& piece : p.pieces) {
        if (bit < piece.bits) {
            const std::uint64_t local = (piece.tier_offset_bits + bit) / 8;
            const std::uint64_t tier_bytes = cfg.tier_capacity_bits / 8;
            return decompose(std::uint64_t{piece.tier} * tier_bytes + local, cfg, AddressLayout::ChannelInterleaved);
        }
        bit -= piece.bits;
    }
    throw InputError(std::string("offset beyond the ") + to_string(p.segment) + " segment");
}

inline std::uint32_t timing_tier_of(const SegmentPlacement& p, const PhysicalAddress& a) {
    return p.timing_tier.value_or(a.tier);
}

}  // namespace m3dpim

#endif  // M3DPIM_MEMMODEL_HPP
