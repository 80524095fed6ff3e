#include <gtest/gtest.h>

#include <random>

#include "m3dpim/engine.hpp"
#include "m3dpim/experiment.hpp"

using namespace m3dpim;

namespace {

DistanceMatrix graph(std::size_t n, double density, std::uint64_t seed) { return random_graph(n, density, 50, seed); }

struct SmallCorpus {
    std::string reference;
    SeedIndex index;
    std::vector<std::string> reads;
};

SmallCorpus small_corpus(std::size_t ref_len, std::size_t reads, std::uint64_t seed) {
    SmallCorpus c;
    c.reference = random_reference(ref_len, seed);
    c.index = build_index(c.reference, 12);
    c.reads = simulate_reads(c.reference, reads, 100, 0.05, seed + 1).reads;
    return c;
}

SeedParams stride12() {
    SeedParams sp;
    sp.stride = 12;
    return sp;
}

}  // namespace

TEST(Engine, BroadcastCost) {
    PuConfig pu;
    EXPECT_EQ(broadcast_cost(0, pu), 0);
    // 128 B/cycle at 1 GHz, 16 hops on a 32-PU bidirectional ring.
    EXPECT_EQ(broadcast_cost(262144, pu), 2048 + 16);
    pu.ring_link_gbps = 256;
    EXPECT_EQ(broadcast_cost(262144, pu), 1024 + 16);
}

TEST(Engine, PeComputeCycles) {
    PuConfig pu;
    EXPECT_EQ(pe_compute_cycles(16'777'216, pu), 65'536);
    EXPECT_EQ(pe_compute_cycles(0, pu), 0);
    pu.pes_per_pu = 8;
    EXPECT_EQ(pe_compute_cycles(16'777'216, pu), 131'072);
    EXPECT_THROW(pe_compute_cycles(10, pu, 24), ConfigError);
}

TEST(Engine, EnergyConstants) {
    EnergyModel m;
    EventCounts row;
    row.dram_bits = 8192;
    const auto e = accumulate_energy(row, m);
    EXPECT_EQ(e.dram_fj, 3'514'368);
    EXPECT_NEAR(e.total_pj(), 3514.37, 0.01);

    EventCounts local;
    local.local_sram_accesses = 1'000'000;
    EXPECT_DOUBLE_EQ(accumulate_energy(local, m).total_j(), 7e-6);

    EXPECT_EQ(accumulate_energy({}, m).total_fj(), 0);
}

TEST(Engine, EnergyAdditivityIsExact) {
    std::mt19937_64 rng(3);
    EnergyModel m;
    for (int t = 0; t < 200; ++t) {
        EventCounts c{rng() % 1'000'000'000, rng() % 1'000'000, rng() % 1'000'000, rng() % 1'000'000, rng() % 1'000'000};
        const auto e = accumulate_energy(c, m);
        std::int64_t sum = 0;
        for (const auto& [k, v] : e.components_fj()) sum += v;
        EXPECT_EQ(sum, e.total_fj());
    }
}

TEST(Engine, SingleTileApspHasNoRowColOrInternalWork) {
    SimConfig sc;
    const auto m = graph(64, 0.1, 1);
    const auto run = run_apsp_sim(sc, m, 64);
    EXPECT_EQ(run.result, blocked_fw(m, 64));
    EXPECT_EQ(run.report.phase_cycles.at("rowcol"), 0);
    EXPECT_EQ(run.report.phase_cycles.at("internal"), 0);
    EXPECT_EQ(run.report.stats.at("tiles_processed"), 1);
}

TEST(Engine, TileHistogramMatchesMapping) {
    SimConfig sc;
    const auto m = graph(1024, 0.01, 2);
    const auto run = run_apsp_sim(sc, m, 256);
    const std::uint64_t tiles = 4;
    std::vector<std::uint64_t> expect(sc.pu.compute_pus, 0);
    for (std::uint64_t k = 0; k < tiles; ++k) {
        std::vector<std::uint64_t> step(sc.pu.compute_pus, 0);
        std::uint64_t internal = 0;
        for (std::uint64_t i = 0; i < tiles; ++i)
            for (std::uint64_t j = 0; j < tiles; ++j) {
                if (i == k || j == k) continue;
                const auto pu = (i * tiles + j) % sc.pu.compute_pus;
                ++step[pu];
                ++expect[pu];
                ++internal;
            }
        EXPECT_EQ(internal, 9u);
        EXPECT_EQ(*std::max_element(step.begin(), step.end()), 1u);
    }
    EXPECT_EQ(run.report.tile_histogram, expect);
}

TEST(Engine, PivotPhaseOccupancyIsOneOverComputePus) {
    SimConfig sc;
    const auto run = run_apsp_sim(sc, graph(512, 0.02, 4), 64);
    EXPECT_DOUBLE_EQ(utilization(run.report).at("compute.pivot"), 1.0 / 24.0);
}

TEST(Engine, DoublingComputePusShrinksInternalPhase) {
    const auto m = graph(2048, 0.005, 5);
    SimConfig a;
    a.pu.total_pus = 16;
    a.pu.search_pus = 4;
    a.pu.compute_pus = 12;
    SimConfig b;
    const auto ra = run_apsp_sim(a, m, 64);
    const auto rb = run_apsp_sim(b, m, 64);
    const double shrink = static_cast<double>(ra.report.phase_cycles.at("internal")) /
                          static_cast<double>(rb.report.phase_cycles.at("internal"));
    EXPECT_GE(shrink, 1.8);
    EXPECT_LE(shrink, 2.0);
    EXPECT_EQ(ra.result, rb.result);
}

TEST(Engine, ApspTimingNeverChangesResults) {
    const auto m = graph(300, 0.03, 6);
    const auto ref = fw_reference(m);
    for (auto policy : {PlacementPolicy::TierAware, PlacementPolicy::UniformWorst, PlacementPolicy::UniformBest})
        for (std::uint32_t pes : {4u, 16u}) {
            SimConfig sc;
            sc.policy = policy;
            sc.pu.pes_per_pu = pes;
            EXPECT_EQ(run_apsp_sim(sc, m, 32).result, ref);
        }
}

TEST(Engine, ApspLedgerReplay) {
    SimConfig sc;
    const auto r = run_apsp_sim(sc, graph(512, 0.02, 7), 64).report;
    Cycles serial = 0;
    for (const auto& e : r.ledger) {
        EXPECT_EQ(e.start, serial);
        serial += e.duration;
    }
    EXPECT_EQ(serial, r.total_cycles);
    Cycles sum = 0;
    for (const auto& [k, v] : r.phase_cycles) sum += v;
    EXPECT_EQ(sum, r.total_cycles);
}

TEST(Engine, GenomicsResultsMatchFunctionalPipeline) {
    const auto c = small_corpus(100'000, 300, 11);
    const SeedParams sp = stride12();
    AlignmentParams ap;
    ap.adaptive = true;
    std::vector<ReadAlignment> expect;
    for (const auto& r : c.reads) expect.push_back(align_read(c.index, c.reference, r, sp, ap));
    for (auto mode : {PipelineMode::Integrated, PipelineMode::Hybrid, PipelineMode::CpuBaseline})
        for (auto policy : {PlacementPolicy::TierAware, PlacementPolicy::UniformWorst}) {
            SimConfig sc;
            sc.policy = policy;
            sc.pu.queue_depth = 2;
            EXPECT_EQ(run_genomics_sim(sc, c.index, c.reference, c.reads, sp, ap, mode).results, expect);
        }
}

TEST(Engine, OneReadIntegratedEqualsHybrid) {
    const auto c = small_corpus(20'000, 1, 12);
    SimConfig sc;
    AlignmentParams ap;
    const auto a = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), ap, PipelineMode::Integrated);
    const auto b = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), ap, PipelineMode::Hybrid);
    EXPECT_EQ(a.results, b.results);
    EXPECT_NE(a.report.total_cycles, b.report.total_cycles);
}

TEST(Engine, GenomicsLedgerAndPhases) {
    const auto c = small_corpus(100'000, 500, 13);
    SimConfig sc;
    for (auto mode : {PipelineMode::Integrated, PipelineMode::Hybrid, PipelineMode::CpuBaseline}) {
        const auto r = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, mode).report;
        Cycles end = 0;
        for (const auto& e : r.ledger) end = std::max(end, e.start + e.duration);
        EXPECT_EQ(end, r.total_cycles);
        for (const auto& [k, v] : r.phase_cycles) EXPECT_LE(v, r.total_cycles) << k;
        if (mode == PipelineMode::Integrated) EXPECT_GT(r.phase_cycles.at("pipeline_overlap"), 0);
        else EXPECT_EQ(r.phase_cycles.at("pipeline_overlap"), 0);
    }
}

TEST(Engine, CpuBaselineSplitsThirtySeventy) {
    const auto c = small_corpus(50'000, 100, 14);
    SimConfig sc;
    const auto r = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, PipelineMode::CpuBaseline).report;
    EXPECT_DOUBLE_EQ(static_cast<double>(r.phase_cycles.at("seeding")) / static_cast<double>(r.total_cycles), 0.3);
}

TEST(Engine, HybridLeavesComputeMostlyIdle) {
    const auto c = small_corpus(200'000, 2000, 15);
    SimConfig sc;
    const auto hybrid = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, PipelineMode::Hybrid).report;
    const auto integ = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, PipelineMode::Integrated).report;
    // Occupancy recomputed from the busy ledger and the replayed critical path.
    const auto& b = hybrid.busy.at("compute");
    const double occ = b.busy / (static_cast<double>(b.units) * static_cast<double>(replay_ledger(hybrid.ledger)));
    EXPECT_LT(occ, 0.2);
    EXPECT_DOUBLE_EQ(occ, utilization(hybrid).at("compute"));
    EXPECT_LT(integ.total_cycles, hybrid.total_cycles);
}

TEST(Engine, BalancedIntegratedRunKeepsBothClassesBusy) {
    ExperimentConfig c;
    c.workload = "genomics";
    c.sim.pu.search_pus = 7;
    c.sim.pu.compute_pus = 25;
    const auto r = run_genomics(c, make_genomics_inputs(c));
    const auto u = utilization(r);
    EXPECT_GE(u.at("search"), 0.8);
    EXPECT_GE(u.at("compute"), 0.8);
}

TEST(Engine, Determinism) {
    const auto c = small_corpus(100'000, 400, 16);
    SimConfig sc;
    const auto a = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, PipelineMode::Integrated).report;
    const auto b = run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), {}, PipelineMode::Integrated).report;
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    const auto m = graph(256, 0.05, 17);
    EXPECT_EQ(to_json(run_apsp_sim(sc, m, 64).report).dump(), to_json(run_apsp_sim(sc, m, 64).report).dump());
}

TEST(Engine, PowerAlarmWarnsWithoutChangingResults) {
    const auto m = graph(256, 0.05, 18);
    SimConfig quiet;
    SimConfig loud;
    loud.costs.power_density_alarm_w_mm2 = 1e-9;
    const auto a = run_apsp_sim(quiet, m, 64);
    const auto b = run_apsp_sim(loud, m, 64);
    EXPECT_TRUE(a.report.warnings.empty());
    ASSERT_EQ(b.report.warnings.size(), 1u);
    EXPECT_NE(b.report.warnings[0].find("power density"), std::string::npos);
    EXPECT_EQ(a.result, b.result);
    EXPECT_EQ(a.report.total_cycles, b.report.total_cycles);
    EXPECT_EQ(a.report.energy, b.report.energy);
}

TEST(Engine, AveragePowerIsEnergyOverRuntime) {
    SimConfig sc;
    const auto r = run_apsp_sim(sc, graph(256, 0.05, 19), 64).report;
    EXPECT_DOUBLE_EQ(r.average_power_w(), r.energy.total_j() / (static_cast<double>(r.total_cycles) * 1e-9));
}

TEST(Engine, ReportJsonRoundTrip) {
    SimConfig sc;
    const auto r = run_apsp_sim(sc, graph(128, 0.05, 20), 32).report;
    EXPECT_EQ(report_from_json(nlohmann::json::parse(to_json(r).dump())), r);
}

TEST(Engine, Errors) {
    SimConfig bad;
    bad.pu.search_pus = 9;
    EXPECT_THROW(run_apsp_sim(bad, graph(64, 0.1, 21), 32), ConfigError);
    SimConfig sc;
    EXPECT_THROW(run_apsp_sim(sc, graph(64, 0.1, 21), 0), ConfigError);

    const auto c = small_corpus(10'000, 3, 22);
    EXPECT_THROW(run_genomics_sim(sc, c.index, c.reference, {}, stride12(), {}, PipelineMode::Integrated), InputError);
    EXPECT_THROW(run_genomics_sim(sc, c.index, c.reference, {"ACGT"}, stride12(), {}, PipelineMode::Integrated),
                 InputError);
    AlignmentParams narrow;
    narrow.band_width = 2;
    EXPECT_THROW(run_genomics_sim(sc, c.index, c.reference, c.reads, stride12(), narrow, PipelineMode::Integrated),
                 ConfigError);
    EXPECT_THROW(parse_pipeline_mode("gpu"), ConfigError);
}
