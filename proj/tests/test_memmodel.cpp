#include <gtest/gtest.h>

#include <random>

#include "m3dpim/memmodel.hpp"

using namespace m3dpim;

TEST(MemModel, DefaultsAreConsistent) {
    const MemConfig cfg;
    cfg.validate();
    EXPECT_EQ(cfg.chip_capacity_bits(), std::uint64_t{32} << 30);
    EXPECT_EQ(cfg.bank_groups(), 32u);
    EXPECT_EQ(cfg.rows_per_bank_per_tier(), 512u);
}

TEST(MemModel, RowCycleTimes) {
    const MemConfig cfg;
    EXPECT_NEAR(t_rc(cfg, 0), 34.56, 1e-9);
    EXPECT_NEAR(t_rc(cfg, 1), 36.19, 1e-9);
    EXPECT_NEAR(t_rc(cfg, 7), 55.15, 1e-9);
    EXPECT_EQ(t_rc_ps(cfg, 0), 34560);
    EXPECT_EQ(t_rc_ps(cfg, 7), 55150);
    EXPECT_NEAR(t_rc(cfg, 7) / t_rc(cfg, 0), 1.596, 0.001);
    EXPECT_THROW(t_rc(cfg, 8), ConfigError);
}

TEST(MemModel, ValidationRejectsBadTiming) {
    MemConfig cfg;
    cfg.t_rcd_ns[3] = cfg.t_rcd_ns[2];
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = MemConfig{};
    cfg.t_rcd_ns.pop_back();
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(MemModel, DecomposeRoundTrip) {
    const MemConfig cfg;
    std::mt19937_64 rng(41);
    for (auto layout : {AddressLayout::RowFirst, AddressLayout::ChannelInterleaved}) {
        for (int t = 0; t < 20000; ++t) {
            const std::uint64_t a = rng() % (cfg.chip_capacity_bits() / 8);
            const auto pa = decompose(a, cfg, layout);
            ASSERT_LT(pa.channel, cfg.channels);
            ASSERT_LT(pa.bank_group, cfg.bank_groups_per_channel);
            ASSERT_LT(pa.bank, cfg.banks_per_group());
            ASSERT_LT(pa.tier, cfg.tiers);
            ASSERT_LT(pa.row, cfg.rows_per_bank_per_tier());
            ASSERT_EQ(compose(pa, cfg, layout), a);
        }
    }
    const auto top = decompose(cfg.chip_capacity_bits() / 8 - 1, cfg);
    EXPECT_EQ(top.tier, 7u);
    EXPECT_THROW(decompose(cfg.chip_capacity_bits() / 8, cfg), InputError);
}

TEST(MemModel, OpenPageLatencies) {
    const MemConfig cfg;
    BankState st(cfg);
    PhysicalAddress a{};
    RowOutcome o;
    EXPECT_EQ(access_latency_ps(a, st, cfg, std::nullopt, &o), 2290 + 2000);
    EXPECT_EQ(o, RowOutcome::Miss);
    EXPECT_EQ(access_latency_ps(a, st, cfg, std::nullopt, &o), 2000);
    EXPECT_EQ(o, RowOutcome::Hit);
    PhysicalAddress b = a;
    b.tier = 7;
    b.row = 3;
    EXPECT_EQ(access_latency_ps(b, st, cfg, std::nullopt, &o), 4770 + 22880 + 2000);
    EXPECT_EQ(o, RowOutcome::Conflict);
    EXPECT_NEAR(access_latency(a, st, cfg), 4.77 + 2.29 + 2.0, 1e-9);
}

TEST(MemModel, TraceReplayAndMonotonicity) {
    const MemConfig cfg;
    BankState st(cfg), shadow(cfg);
    std::mt19937_64 rng(42);
    Picoseconds total = 0, replay = 0;
    // Replay: keep the open row per bank in a plain map.
    std::vector<std::int64_t> open(cfg.total_banks(), -1);
    for (int t = 0; t < 5000; ++t) {
        PhysicalAddress a;
        a.channel = rng() % 2;
        a.bank_group = rng() % 2;
        a.bank = rng() % 2;
        a.tier = rng() % 8;
        a.row = rng() % 3;
        total += access_latency_ps(a, st, cfg);
        const std::uint32_t bank = (a.channel * 2 + a.bank_group) * 8 + a.bank;
        const std::int64_t key = a.tier * 1000 + static_cast<std::int64_t>(a.row);
        const Picoseconds rcd = ns_to_ps(cfg.t_rcd_ns[a.tier]);
        if (open[bank] == key) replay += 2000;
        else if (open[bank] < 0) replay += rcd + 2000;
        else replay += 4770 + rcd + 2000;
        open[bank] = key;
    }
    EXPECT_EQ(total, replay);
    for (std::uint32_t tier = 0; tier < 8; ++tier) {
        PhysicalAddress a{};
        a.tier = tier;
        BankState s(cfg);
        const auto miss = access_latency_ps(a, s, cfg);
        const auto hit = access_latency_ps(a, s, cfg);
        a.row = 1;
        const auto conflict = access_latency_ps(a, s, cfg);
        EXPECT_LE(hit, miss);
        EXPECT_LE(miss, conflict);
    }
}

TEST(MemModel, TimingTierOverride) {
    const MemConfig cfg;
    BankState st(cfg);
    EXPECT_EQ(access_latency_ps(PhysicalAddress{}, st, cfg, 7u), 22880 + 2000);
}

TEST(MemModel, MapTile) {
    const MemConfig cfg;
    EXPECT_EQ(map_tile(0, 0, 256, cfg), 0u);
    EXPECT_EQ(map_tile(0, 1, 256, cfg), 1u);
    EXPECT_EQ(map_tile(1, 0, 256, cfg), 0u);
    EXPECT_THROW(map_tile(0, 0, 0, cfg), ConfigError);
}

TEST(MemModel, ConsecutiveTilesAreConflictFree) {
    const MemConfig cfg;
    for (std::uint64_t m = 1; m <= 512; ++m)
        for (std::uint64_t start = 0; start < m * m && start < 4096; ++start) {
            std::uint64_t seen = 0;
            for (std::uint64_t t = start; t < start + 32; ++t) seen |= std::uint64_t{1} << map_tile(t / m, t % m, m, cfg);
            ASSERT_EQ(seen, 0xffffffffu) << "M=" << m << " start=" << start;
        }
}

TEST(MemModel, Energy) {
    const MemConfig cfg;
    EXPECT_DOUBLE_EQ(access_energy(1, cfg), 0.429);
    EXPECT_NEAR(access_energy(8192, cfg), 3514.368, 1e-9);
    EXPECT_EQ(access_energy(0, cfg), 0.0);
}

TEST(MemModel, Placement) {
    const MemConfig cfg;
    const std::uint64_t gb = std::uint64_t{1} << 30;
    const std::vector<SegmentRequest> req = {
        {Segment::Reference, 3 * gb}, {Segment::CAL, 2 * gb}, {Segment::PTR, gb}, {Segment::ReadBuffer, 5 * gb}};
    const auto p = place_segments(req, PlacementPolicy::TierAware, cfg);
    EXPECT_EQ(p[2].tier_lo, 0u);
    EXPECT_EQ(p[2].tier_hi, 0u);
    EXPECT_EQ(p[1].tier_lo, 0u);
    EXPECT_EQ(p[1].tier_hi, 0u);
    EXPECT_EQ(p[0].tier_lo, 0u);
    EXPECT_EQ(p[0].tier_hi, 1u);
    EXPECT_EQ(p[2].interleave, Interleave::Pinned);

    std::vector<std::uint64_t> per_tier(cfg.tiers, 0);
    std::uint64_t placed = 0;
    for (const auto& s : p)
        for (const auto& piece : s.pieces) {
            per_tier[piece.tier] += piece.bits;
            placed += piece.bits;
        }
    EXPECT_EQ(placed, 11 * gb);
    for (auto bits : per_tier) EXPECT_LE(bits, cfg.tier_capacity_bits);

    const auto worst = place_segments(req, PlacementPolicy::UniformWorst, cfg);
    for (const auto& s : worst) EXPECT_EQ(s.timing_tier, 7u);
    const auto best = place_segments(req, PlacementPolicy::UniformBest, cfg);
    for (const auto& s : best) EXPECT_EQ(s.timing_tier, 0u);

    EXPECT_THROW(place_segments({{Segment::Scratch, 33 * gb}}, PlacementPolicy::TierAware, cfg), PlacementError);
}

TEST(MemModel, SegmentAddressesFollowPieces) {
    const MemConfig cfg;
    const std::uint64_t gb = std::uint64_t{1} << 30;
    const auto p = place_segments({{Segment::Scratch, 6 * gb}}, PlacementPolicy::TierAware, cfg);
    EXPECT_EQ(segment_address(p[0], 0, cfg).tier, 0u);
    EXPECT_EQ(segment_address(p[0], 4 * gb / 8, cfg).tier, 1u);
    EXPECT_NE(segment_address(p[0], 0, cfg).channel, segment_address(p[0], cfg.row_bytes(), cfg).channel);
    EXPECT_THROW(segment_address(p[0], 6 * gb / 8, cfg), InputError);
}
