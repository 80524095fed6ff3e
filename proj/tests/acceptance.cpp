// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every simulator run is recorded so the conservation check can
// replay it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "m3dpim/experiment.hpp"

using namespace m3dpim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct RecordedRun {
    std::string label;
    std::function<RunReport()> run;
    RunReport report;
    std::string dump;
};

std::deque<RecordedRun> g_runs;

const RunReport& record(const std::string& label, std::function<RunReport()> fn) {
    RecordedRun r{label, std::move(fn), {}, {}};
    r.report = r.run();
    r.dump = to_json(r.report).dump();
    g_runs.push_back(std::move(r));
    return g_runs.back().report;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

double ratio(const RunReport& slow, const RunReport& fast) {
    return static_cast<double>(slow.total_cycles) / static_cast<double>(fast.total_cycles);
}

double share(const RunReport& r, std::int64_t fj) {
    return static_cast<double>(fj) / static_cast<double>(r.energy.total_fj());
}

std::vector<Edge> random_edges(std::size_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution keep(density);
    std::uniform_int_distribution<int> w(1, 100);
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (u != v && keep(rng)) edges.push_back({u, v, w(rng)});
    return edges;
}

std::vector<std::int64_t> dijkstra(const std::vector<Edge>& edges, std::size_t n, std::size_t src) {
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> adj(n);
    for (const Edge& e : edges) adj[e.from].push_back({e.to, e.weight});
    std::vector<std::int64_t> dist(n, -1);
    using Item = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (dist[u] >= 0) continue;
        dist[u] = d;
        for (auto [v, w] : adj[u])
            if (dist[v] < 0) pq.push({d + w, v});
    }
    return dist;
}

ExperimentConfig genomics_default() {
    ExperimentConfig c;
    c.workload = "genomics";
    return c;
}

ExperimentConfig apsp_scaling() {
    ExperimentConfig c;
    c.workload = "apsp";
    c.apsp.nodes = 2048;
    c.apsp.density = 0.01;
    c.apsp.block = 64;
    return c;
}

// Inputs shared by the genomics criteria.
const GenomicsInputs& default_corpus() {
    static const GenomicsInputs in = make_genomics_inputs(genomics_default());
    return in;
}

const DistanceMatrix& scaling_graph() {
    static const DistanceMatrix g = make_graph(apsp_scaling());
    return g;
}

const RunReport& genomics_run(const std::string& label, const ExperimentConfig& c) {
    for (const auto& r : g_runs)
        if (r.label == label) return r.report;
    return record(label, [c] { return run_genomics(c, default_corpus()); });
}

const RunReport& apsp_run(const std::string& label, const ExperimentConfig& c) {
    for (const auto& r : g_runs)
        if (r.label == label) return r.report;
    return record(label, [c] { return run_apsp(c, scaling_graph()); });
}

// ---------------------------------------------------------------------------

Outcome blocked_fw_oracle() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> size(16, 128);
    std::size_t checks = 0;
    for (int g = 0; g < 200; ++g) {
        const std::size_t n = size(rng);
        const auto m = load_graph(random_edges(n, 0.05, rng), n);
        const auto ref = fw_reference(m);
        for (std::size_t b = 1; b <= n; ++b, ++checks)
            if (!(blocked_fw(m, b) == ref))
                return {false, "blocked_fw differs from fw_reference at n=" + std::to_string(n) + " B=" + std::to_string(b)};
    }
    for (int g = 0; g < 50; ++g) {
        const std::size_t n = size(rng);
        const auto edges = random_edges(n, 0.05, rng);
        const auto d = fw_reference(load_graph(edges, n));
        for (std::size_t s = 0; s < n; ++s) {
            const auto ref = dijkstra(edges, n, s);
            for (std::size_t t = 0; t < n; ++t)
                if (d.at(s, t) != (ref[t] < 0 ? std::int64_t{kPosInf} : ref[t]))
                    return {false, "fw_reference differs from Dijkstra on graph " + std::to_string(g)};
        }
    }
    return {true, std::to_string(checks) + " (graph, B) pairs exact; 50 graphs match Dijkstra"};
}

Outcome timing_formula() {
    const MemConfig m;
    const double t0 = t_rc(m, 0), t7 = t_rc(m, 7);
    const bool ok = std::abs(t0 - 34.56) < 1e-9 && std::abs(t7 - 55.15) < 1e-9 && std::abs(t7 / t0 - 1.596) <= 0.001;
    return {ok, "t_rc(0)=" + fmt(t0, 4) + " ns, t_rc(7)=" + fmt(t7, 4) + " ns, ratio " + fmt(t7 / t0, 4)};
}

Outcome tier_study() {
    ExperimentConfig base;
    base.workload = "genomics";
    base.genomics.reference_length = 10'000'000;
    base.genomics.read_count = 10'000;
    base.genomics.seed.stride = 1;
    base.genomics.seed.max_candidates = 1;
    const auto inputs = std::make_shared<GenomicsInputs>(make_genomics_inputs(base));

    // Tier-aware placement must put the seeding tables on tier 0.
    const auto placement = place_segments({{Segment::PTR, inputs->index.ptr.size() * 64},
                                           {Segment::CAL, inputs->index.cal.size() * 32},
                                           {Segment::Reference, inputs->reference.size() * 8}},
                                          PlacementPolicy::TierAware, base.sim.mem);
    for (const auto& p : placement)
        if (p.segment == Segment::PTR || p.segment == Segment::CAL)
            for (const auto& piece : p.pieces)
                if (piece.tier != 0) return {false, std::string(to_string(p.segment)) + " not pinned to tier 0"};

    std::map<std::string, const RunReport*> by_policy;
    for (const char* policy : {"uniform_worst", "tier_aware", "uniform_best"}) {
        const auto c = apply_axis(base, "tier_policy", policy);
        by_policy[policy] = &record(std::string("tier/") + policy, [c, inputs] { return run_genomics(c, *inputs); });
    }
    const auto& worst = *by_policy["uniform_worst"];
    const double tier = ratio(worst, *by_policy["tier_aware"]);
    const double best = ratio(worst, *by_policy["uniform_best"]);
    const double seed_share = static_cast<double>(worst.phase_cycles.at("seeding")) / static_cast<double>(worst.total_cycles);
    const bool ok = tier >= 1.45 && tier <= 1.60 && tier >= 0.9 * best;
    return {ok, "tier_aware " + fmt(tier) + "x, uniform_best " + fmt(best) + "x over uniform_worst (" +
                    fmt(100 * tier / best, 1) + "% of best; seeding spans " + fmt(100 * seed_share, 1) + "% of the run)"};
}

Outcome mapping_conflict_freedom() {
    MemConfig cfg;
    std::uint64_t windows = 0;
    for (std::uint64_t m = 1; m <= 512; ++m) {
        const std::uint64_t tiles = m * m;
        std::vector<std::uint32_t> pu(tiles);
        for (std::uint64_t t = 0; t < tiles; ++t) pu[t] = map_tile(t / m, t % m, m, cfg);
        for (std::uint64_t off = 0; off + 32 <= tiles; ++off, ++windows) {
            std::uint64_t seen = 0;
            for (std::uint64_t t = off; t < off + 32; ++t) seen |= std::uint64_t{1} << pu[t];
            if (__builtin_popcountll(seen) != 32)
                return {false, "collision at M=" + std::to_string(m) + " offset " + std::to_string(off)};
        }
    }
    return {true, std::to_string(windows) + " windows of 32 tiles, all distinct"};
}

Outcome seeding_oracle() {
    std::mt19937_64 rng(202);
    std::uint64_t kmers = 0;
    for (int r = 0; r < 100; ++r) {
        const auto ref = random_reference(10'000, rng());
        const auto idx = build_index(ref, 12);
        for (std::size_t p = 0; p + 12 <= ref.size(); ++p, ++kmers) {
            const auto got = lookup(idx, ref.substr(p, 12));
            if (got != brute_force_matches(ref, ref.substr(p, 12)))
                return {false, "lookup differs from the linear scan at reference " + std::to_string(r)};
        }
    }
    const auto ref = random_reference(1'000'000, 303);
    const auto idx = build_index(ref, 12);
    const auto reads = simulate_reads(ref, 10'000, 100, 0.0, 304);
    SeedParams sp;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < reads.reads.size(); ++i) {
        const auto c = seed_read(idx, reads.reads[i], sp);
        hits += !c.empty() && c.front().reference_position == reads.truth[i];
    }
    return {hits == reads.reads.size(), std::to_string(kmers) + " k-mers match the linear scan; top-1 recall " +
                                            std::to_string(hits) + "/" + std::to_string(reads.reads.size())};
}

Outcome alignment_oracles() {
    std::mt19937_64 rng(404);
    AlignmentParams p;
    for (int t = 0; t < 1000; ++t) {
        const auto q = random_reference(1 + rng() % 120, rng());
        const auto r = random_reference(1 + rng() % 120, rng());
        AlignmentParams wide = p;
        wide.band_width = std::max(q.size(), r.size());
        if (banded_diff_dp(q, r, wide).score != sw_reference(q, r, p).score)
            return {false, "covering band differs from sw_reference on pair " + std::to_string(t)};
    }
    const auto ref = random_reference(1'000'000, 405);
    const auto reads = simulate_reads(ref, 1000, 100, 0.05, 406);
    p.band_width = 6;
    std::size_t equal = 0;
    for (std::size_t i = 0; i < reads.reads.size(); ++i) {
        const auto [start, len] = candidate_window(reads.truth[i], reads.reads[i].size(), p.band_width, ref.size());
        const auto window = std::string_view(ref).substr(start, len);
        const auto a = adaptive_banded_dp(reads.reads[i], window, p).score;
        const auto s = sw_reference(reads.reads[i], window, p).score;
        if (a > s) return {false, "adaptive score exceeds sw_reference on read " + std::to_string(i)};
        equal += a == s;
    }
    return {equal >= 950, "1000 covering-band pairs exact; adaptive band 6 equals sw_reference on " +
                              std::to_string(equal) + "/1000 reads at 5% error, never above it"};
}

Outcome ratio_study() {
    const auto base = genomics_default();
    std::map<std::string, Cycles> cycles;
    for (const char* split : {"4:28", "8:24", "16:16"})
        cycles[split] = genomics_run(std::string("genomics/ratio ") + split, apply_axis(base, "search_compute_ratio", split))
                            .total_cycles;
    const bool ok = cycles["8:24"] < cycles["4:28"] && cycles["8:24"] < cycles["16:16"];
    return {ok, "cycles 4:28=" + std::to_string(cycles["4:28"]) + " 8:24=" + std::to_string(cycles["8:24"]) +
                    " 16:16=" + std::to_string(cycles["16:16"])};
}

Outcome scaling_study() {
    const auto a = apsp_scaling();
    const auto& p16 = apsp_run("apsp/total_pus 16", apply_axis(a, "total_pus", 16));
    const auto& p32 = apsp_run("apsp/default", a);
    const auto& p64 = apsp_run("apsp/total_pus 64", apply_axis(a, "total_pus", 64));
    const auto& e8 = apsp_run("apsp/pes 8", apply_axis(a, "pes_per_pu", 8));
    const auto& e32 = apsp_run("apsp/pes 32", apply_axis(a, "pes_per_pu", 32));
    const double pu_lo = ratio(p16, p32), pu_hi = ratio(p32, p64);
    const double ape_lo = ratio(e8, p32), ape_hi = ratio(p32, e32);

    const auto g = genomics_default();
    const auto& g8 = genomics_run("genomics/pes 8", apply_axis(g, "pes_per_pu", 8));
    const auto& g16 = genomics_run("genomics/default", g);
    const auto& g32 = genomics_run("genomics/pes 32", apply_axis(g, "pes_per_pu", 32));
    const double gpe_lo = ratio(g8, g16), gpe_hi = ratio(g16, g32);

    const bool ok = pu_lo >= 1.8 && pu_hi < pu_lo && ape_lo >= 1.8 && ape_hi <= 1.2 && gpe_lo >= 1.8 && gpe_hi <= 1.4;
    return {ok, "APSP PUs 16->32 " + fmt(pu_lo) + "x, 32->64 " + fmt(pu_hi) + "x; APSP PEs 8->16 " + fmt(ape_lo) +
                    "x, 16->32 " + fmt(ape_hi) + "x; genomics PEs 8->16 " + fmt(gpe_lo) + "x, 16->32 " + fmt(gpe_hi) + "x"};
}

Outcome pipeline_study() {
    const auto g = genomics_default();
    const auto& integrated = genomics_run("genomics/default", g);
    const auto& hybrid = genomics_run("genomics/hybrid", apply_axis(g, "pipeline_mode", "hybrid"));
    const auto& cpu = genomics_run("genomics/cpu_baseline", apply_axis(g, "pipeline_mode", "cpu_baseline"));
    const double occ = utilization(hybrid).at("compute");
    const bool ok = integrated.total_cycles < hybrid.total_cycles && hybrid.total_cycles < cpu.total_cycles &&
                    occ >= 0.05 && occ < 0.2;
    return {ok, "cycles integrated=" + std::to_string(integrated.total_cycles) + " hybrid=" +
                    std::to_string(hybrid.total_cycles) + " cpu_baseline=" + std::to_string(cpu.total_cycles) +
                    "; hybrid compute occupancy " + fmt(occ)};
}

Outcome energy_trends() {
    const auto& g = genomics_run("genomics/default", genomics_default());
    const auto& a = apsp_run("apsp/default", apsp_scaling());
    std::int64_t g_max = 0;
    for (const auto& [k, v] : g.energy.components_fj()) g_max = std::max(g_max, v);
    const double g_dram = share(g, g.energy.dram_fj), g_pe = share(g, g.energy.pe_ops_fj);
    const std::int64_t a_sram = a.energy.shared_sram_fj + a.energy.local_sram_fj;
    const double a_sram_share = share(a, a_sram), a_pe = share(a, a.energy.pe_ops_fj);
    const bool a_sram_largest =
        a_sram > a.energy.dram_fj && a_sram > a.energy.ring_fj && a_sram > a.energy.pe_ops_fj;
    const bool ok = g.energy.dram_fj == g_max && g_dram > 0.5 && a_sram_largest && a_sram_share > 0.6 &&
                    g_pe < 0.05 && a_pe < 0.05;
    return {ok, "genomics DRAM " + fmt(100 * g_dram, 1) + "%, compute " + fmt(100 * g_pe, 2) + "%; APSP SRAM " +
                    fmt(100 * a_sram_share, 1) + "%, compute " + fmt(100 * a_pe, 2) + "%"};
}

Outcome conservation() {
    std::size_t checked = 0;
    for (const auto& r : g_runs) {
        std::int64_t sum = 0;
        for (const auto& [k, v] : r.report.energy.components_fj()) sum += v;
        if (sum != r.report.energy.total_fj()) return {false, r.label + ": energy components do not sum to the total"};
        Cycles end = 0;
        for (const auto& e : r.report.ledger) end = std::max(end, e.start + e.duration);
        if (end != r.report.total_cycles) return {false, r.label + ": ledger replay differs from total_cycles"};
        if (to_json(r.run()).dump() != r.dump) return {false, r.label + ": rerun is not byte-identical"};
        ++checked;
    }
    if (!(make_genomics_inputs(genomics_default()).reads == default_corpus().reads))
        return {false, "default corpus differs between generations"};
    return {checked > 0, std::to_string(checked) + " runs: energy sums exact, ledger replay exact, reruns byte-identical"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*check)();
        double limit_s;
    };
    const Criterion criteria[] = {
        {"blocked-FW oracle equivalence", blocked_fw_oracle, 60},
        {"timing-formula fidelity", timing_formula, 1},
        {"tier-mapping study", tier_study, 300},
        {"mapping conflict-freedom", mapping_conflict_freedom, 60},
        {"seeding oracle", seeding_oracle, 120},
        {"alignment oracles", alignment_oracles, 300},
        {"resource-ratio study", ratio_study, 600},
        {"PU/PE scaling study", scaling_study, 900},
        {"pipeline study", pipeline_study, 300},
        {"energy-breakdown trends", energy_trends, 300},
        {"conservation suite", conservation, 3600},
    };
    int failures = 0;
    int id = 0;
    for (const auto& c : criteria) {
        ++id;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; exceeded the " + fmt(c.limit_s, 0) + " s budget";
        }
        failures += !o.pass;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", id - failures, id);
    return failures == 0 ? 0 : 1;
}
