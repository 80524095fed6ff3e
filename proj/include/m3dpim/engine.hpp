#ifndef M3DPIM_ENGINE_HPP
#define M3DPIM_ENGINE_HPP

// Cycle and energy accounting for the PU array.
//
// Mode 1 (APSP) is scheduled analytically per super-step: the pivot tile on
// one PU, the pivot row and column spread over the compute PUs after a ring
// broadcast of the pivot, then the internal tiles while the row and column
// tiles stream over the ring. Internal tiles go to PU (i*M + j) mod
// compute_pus.
//
// Mode 2 (genomics) is a discrete-event simulation. Search PEs run the
// PTR -> CAL dependency chain against a shared set of DRAM banks and push
// candidate batches into a bounded queue; compute PEs pop batches, fetch the
// reference windows and run the banded alignment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "m3dpim/align.hpp"
#include "m3dpim/apsp.hpp"
#include "m3dpim/error.hpp"
#include "m3dpim/memmodel.hpp"
#include "m3dpim/seed.hpp"

namespace m3dpim {

using Cycles = std::int64_t;

struct PuConfig {
    std::uint32_t total_pus = 32;
    std::uint32_t search_pus = 8;
    std::uint32_t compute_pus = 24;
    // PEs in each compute PU.
    std::uint32_t pes_per_pu = 16;
    // PEs in each search PU.
    std::uint32_t search_pes_per_pu = 16;
    std::uint32_t pe_lane_bits = 512;
    std::uint64_t compute_pe_buffer_bytes = 32 * 1024;
    std::uint64_t search_pe_buffer_bytes = 8 * 1024;
    std::uint64_t shared_memory_bytes = 256 * 1024;
    std::uint32_t shared_memory_bits_per_cycle = 8192;
    double ring_link_gbps = 128.0;  // GB/s per link
    std::uint32_t hop_latency_cycles = 1;
    double clock_ghz = 1.0;
    std::uint32_t queue_depth = 64;

    double ring_bytes_per_cycle() const noexcept { return ring_link_gbps / clock_ghz; }
    Picoseconds cycle_ps() const { return static_cast<Picoseconds>(std::llround(1000.0 / clock_ghz)); }

    void validate(const MemConfig& mem) const {
        if (search_pus + compute_pus != total_pus)
            throw ConfigError("search_pus + compute_pus must equal total_pus (" + std::to_string(search_pus) + " + " +
                              std::to_string(compute_pus) + " != " + std::to_string(total_pus) + ")");
        const std::uint32_t groups = mem.bank_groups();
        if (total_pus == 0 || (groups % total_pus != 0 && total_pus % groups != 0))
            throw ConfigError("total_pus=" + std::to_string(total_pus) + " must divide or be a multiple of the " +
                              std::to_string(groups) + " bank groups (channels x bank_groups_per_channel)");
        if (compute_pus == 0) throw ConfigError("compute_pus must be at least 1");
        if (pes_per_pu == 0 || search_pes_per_pu == 0) throw ConfigError("PE counts must be at least 1");
        if (pe_lane_bits == 0) throw ConfigError("pe_lane_bits must be positive");
        if (shared_memory_bits_per_cycle == 0) throw ConfigError("shared_memory_bits_per_cycle must be positive");
        if (!(ring_link_gbps > 0) || !(clock_ghz > 0)) throw ConfigError("ring bandwidth and clock must be positive");
        if (queue_depth == 0) throw ConfigError("queue_depth must be at least 1");
    }
};

struct EnergyModel {
    double dram_pj_per_bit = 0.429;
    double local_sram_nj_per_access = 0.007;
    double shared_sram_nj_per_access = 0.012;
    double ring_pj_per_byte = 0.5;
    double pe_op_pj = 0.1;

    void validate() const {
        if (dram_pj_per_bit < 0 || local_sram_nj_per_access < 0 || shared_sram_nj_per_access < 0 ||
            ring_pj_per_byte < 0 || pe_op_pj < 0)
            throw ConfigError("energy constants must be >= 0");
    }
};

// Per-kernel cost knobs and host rates.
struct KernelCosts {
    // Shared-memory traffic per min-plus op of a tile update.
    std::uint32_t apsp_shared_bits_per_op = 28;
    std::uint32_t apsp_local_accesses_per_pe_cycle = 3;
    // Cycles a compute PE spends on one DP wavefront step.
    std::uint32_t wavefront_step_cycles = 6;
    // A band fits in one lane, so each step is one lane read and one write.
    std::uint32_t align_local_accesses_per_step = 2;
    std::uint32_t align_ops_per_cell = 4;
    // Each search PU has one extractor/sorter shared by its PEs.
    std::uint32_t sorter_cycles_per_lookup = 1;
    std::uint32_t sorter_cycles_per_hit = 1;
    std::uint32_t candidate_bytes = 8;
    // Shared-memory traffic per wavefront step: the PE's lane slice in and
    // out plus the band edges and sequence slices. A compute PU's PEs share
    // the port.
    std::uint32_t align_shared_bits_per_step = 2304;
    // Host cost per read for the hybrid and CPU-only pipelines, in
    // accelerator cycles.
    std::uint64_t host_seed_cycles_per_read = 60;
    std::uint64_t host_align_cycles_per_read = 140;
    double die_area_mm2 = 105.0;
    double power_density_alarm_w_mm2 = 0.3;

    void validate() const {
        if (wavefront_step_cycles == 0) throw ConfigError("wavefront_step_cycles must be at least 1");
        if (!(die_area_mm2 > 0)) throw ConfigError("die_area_mm2 must be positive");
    }
};

struct SimConfig {
    MemConfig mem;
    PuConfig pu;
    EnergyModel energy;
    KernelCosts costs;
    PlacementPolicy policy = PlacementPolicy::TierAware;

    void validate() const {
        mem.validate();
        pu.validate(mem);
        energy.validate();
        costs.validate();
    }
};

// ---------------------------------------------------------------------------
// Primitive costs

// Pipelined cut-through broadcast around the bidirectional ring.
inline Cycles broadcast_cost(std::uint64_t bytes, const PuConfig& pu) {
    if (bytes == 0) return 0;
    const auto serial = static_cast<Cycles>(std::ceil(static_cast<double>(bytes) / pu.ring_bytes_per_cycle()));
    return serial + static_cast<Cycles>((pu.total_pus + 1) / 2) * pu.hop_latency_cycles;
}

// Point-to-point ring transfer over the average distance of a bidirectional
// ring.
inline Cycles ring_transfer_cost(std::uint64_t bytes, const PuConfig& pu) {
    if (bytes == 0) return 0;
    const auto serial = static_cast<Cycles>(std::ceil(static_cast<double>(bytes) / pu.ring_bytes_per_cycle()));
    return serial + static_cast<Cycles>((pu.total_pus + 3) / 4) * pu.hop_latency_cycles;
}

inline Cycles pe_compute_cycles(std::uint64_t ops, const PuConfig& pu, std::uint32_t element_bits = 32) {
    if (element_bits == 0 || pu.pe_lane_bits % element_bits != 0)
        throw ConfigError("element width " + std::to_string(element_bits) + " does not divide the " +
                          std::to_string(pu.pe_lane_bits) + "-bit PE lane");
    const std::uint64_t lanes = std::uint64_t{pu.pes_per_pu} * (pu.pe_lane_bits / element_bits);
    return static_cast<Cycles>((ops + lanes - 1) / lanes);
}

// ---------------------------------------------------------------------------
// Energy

struct EventCounts {
    std::uint64_t dram_bits = 0;
    std::uint64_t shared_sram_accesses = 0;
    std::uint64_t local_sram_accesses = 0;
    std::uint64_t ring_bytes = 0;
    std::uint64_t pe_ops = 0;

    EventCounts& operator+=(const EventCounts& o) {
        dram_bits += o.dram_bits;
        shared_sram_accesses += o.shared_sram_accesses;
        local_sram_accesses += o.local_sram_accesses;
        ring_bytes += o.ring_bytes;
        pe_ops += o.pe_ops;
        return *this;
    }
    friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

inline constexpr const char* kEnergyComponents[] = {"dram", "shared_sram", "local_sram", "ring", "pe_ops"};

// Component energies in integer femtojoules, so the total is an exact sum.
struct EnergyBreakdown {
    std::int64_t dram_fj = 0;
    std::int64_t shared_sram_fj = 0;
    std::int64_t local_sram_fj = 0;
    std::int64_t ring_fj = 0;
    std::int64_t pe_ops_fj = 0;

    std::int64_t total_fj() const noexcept { return dram_fj + shared_sram_fj + local_sram_fj + ring_fj + pe_ops_fj; }
    double total_pj() const noexcept { return static_cast<double>(total_fj()) / 1000.0; }
    double total_j() const noexcept { return static_cast<double>(total_fj()) * 1e-15; }

    std::map<std::string, std::int64_t> components_fj() const {
        return {{"dram", dram_fj}, {"shared_sram", shared_sram_fj}, {"local_sram", local_sram_fj},
                {"ring", ring_fj}, {"pe_ops", pe_ops_fj}};
    }
    friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

inline EnergyBreakdown accumulate_energy(const EventCounts& c, const EnergyModel& m) {
    auto fj = [](double v) { return static_cast<std::int64_t>(std::llround(v)); };
    EnergyBreakdown e;
    e.dram_fj = static_cast<std::int64_t>(c.dram_bits) * fj(m.dram_pj_per_bit * 1e3);
    e.shared_sram_fj = static_cast<std::int64_t>(c.shared_sram_accesses) * fj(m.shared_sram_nj_per_access * 1e6);
    e.local_sram_fj = static_cast<std::int64_t>(c.local_sram_accesses) * fj(m.local_sram_nj_per_access * 1e6);
    e.ring_fj = static_cast<std::int64_t>(c.ring_bytes) * fj(m.ring_pj_per_byte * 1e3);
    e.pe_ops_fj = static_cast<std::int64_t>(c.pe_ops) * fj(m.pe_op_pj * 1e3);
    return e;
}

// ---------------------------------------------------------------------------
// Reports

struct LedgerEntry {
    std::string phase;
    Cycles start = 0;
    Cycles duration = 0;
    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Busy unit-cycles of one class of units over an interval of `span` cycles.
struct BusyRecord {
    double busy = 0;  // unit-cycles
    std::uint64_t units = 0;
    Cycles span = 0;
    friend bool operator==(const BusyRecord&, const BusyRecord&) = default;
};

struct RunReport {
    std::string workload;
    nlohmann::json config;
    std::map<std::string, Cycles> phase_cycles;
    Cycles total_cycles = 0;
    EventCounts events;
    EnergyBreakdown energy;
    // Keys: "search", "compute", and "<class>.<phase>" for per-phase figures.
    std::map<std::string, BusyRecord> busy;
    std::vector<LedgerEntry> ledger;
    std::map<std::string, std::int64_t> stats;
    std::vector<std::uint64_t> tile_histogram;
    std::vector<std::string> warnings;
    double clock_ghz = 1.0;

    double runtime_s() const noexcept { return static_cast<double>(total_cycles) / (clock_ghz * 1e9); }
    double average_power_w() const noexcept {
        const double t = runtime_s();
        return t > 0 ? energy.total_j() / t : 0.0;
    }
    friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Busy fraction per record, in [0, 1].
inline std::map<std::string, double> utilization(const RunReport& r) {
    std::map<std::string, double> out;
    for (const auto& [name, b] : r.busy) {
        const double denom = static_cast<double>(b.units) * static_cast<double>(b.span);
        out[name] = denom > 0 ? std::clamp(b.busy / denom, 0.0, 1.0) : 0.0;
    }
    return out;
}

// Critical path recomputed from the ledger alone.
inline Cycles replay_ledger(const std::vector<LedgerEntry>& ledger) {
    Cycles end = 0;
    for (const auto& e : ledger) end = std::max(end, e.start + e.duration);
    return end;
}

inline void finalize_report(RunReport& r, const SimConfig& sc) {
    r.energy = accumulate_energy(r.events, sc.energy);
    r.clock_ghz = sc.pu.clock_ghz;
    const double density = r.average_power_w() / sc.costs.die_area_mm2;
    if (density > sc.costs.power_density_alarm_w_mm2) {
        r.warnings.push_back("average power density " + std::to_string(density) + " W/mm2 exceeds the " +
                             std::to_string(sc.costs.power_density_alarm_w_mm2) + " W/mm2 alarm");
    }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const MemConfig& m) {
    return {{"layers", m.layers},
            {"tiers", m.tiers},
            {"tier_capacity_bits", m.tier_capacity_bits},
            {"channels", m.channels},
            {"banks_per_channel", m.banks_per_channel},
            {"bank_groups_per_channel", m.bank_groups_per_channel},
            {"row_buffer_bits", m.row_buffer_bits},
            {"access_bits", m.access_bits},
            {"io_bits_per_pu", m.io_bits_per_pu},
            {"t_rcd_ns", m.t_rcd_ns},
            {"t_rp_ns", m.t_rp_ns},
            {"t_ras_offset_ns", m.t_ras_offset_ns},
            {"t_cas_ns", m.t_cas_ns},
            {"energy_per_bit_pj", m.energy_per_bit_pj}};
}

inline nlohmann::json to_json(const PuConfig& p) {
    return {{"total_pus", p.total_pus},
            {"search_pus", p.search_pus},
            {"compute_pus", p.compute_pus},
            {"pes_per_pu", p.pes_per_pu},
            {"search_pes_per_pu", p.search_pes_per_pu},
            {"pe_lane_bits", p.pe_lane_bits},
            {"compute_pe_buffer_bytes", p.compute_pe_buffer_bytes},
            {"search_pe_buffer_bytes", p.search_pe_buffer_bytes},
            {"shared_memory_bytes", p.shared_memory_bytes},
            {"shared_memory_bits_per_cycle", p.shared_memory_bits_per_cycle},
            {"ring_link_gbps", p.ring_link_gbps},
            {"hop_latency_cycles", p.hop_latency_cycles},
            {"clock_ghz", p.clock_ghz},
            {"queue_depth", p.queue_depth}};
}

inline nlohmann::json to_json(const EnergyModel& e) {
    return {{"dram_pj_per_bit", e.dram_pj_per_bit},
            {"local_sram_nj_per_access", e.local_sram_nj_per_access},
            {"shared_sram_nj_per_access", e.shared_sram_nj_per_access},
            {"ring_pj_per_byte", e.ring_pj_per_byte},
            {"pe_op_pj", e.pe_op_pj}};
}

inline nlohmann::json to_json(const KernelCosts& k) {
    return {{"apsp_shared_bits_per_op", k.apsp_shared_bits_per_op},
            {"apsp_local_accesses_per_pe_cycle", k.apsp_local_accesses_per_pe_cycle},
            {"wavefront_step_cycles", k.wavefront_step_cycles},
            {"align_local_accesses_per_step", k.align_local_accesses_per_step},
            {"align_ops_per_cell", k.align_ops_per_cell},
            {"sorter_cycles_per_lookup", k.sorter_cycles_per_lookup},
            {"sorter_cycles_per_hit", k.sorter_cycles_per_hit},
            {"align_shared_bits_per_step", k.align_shared_bits_per_step},
            {"candidate_bytes", k.candidate_bytes},
            {"host_seed_cycles_per_read", k.host_seed_cycles_per_read},
            {"host_align_cycles_per_read", k.host_align_cycles_per_read},
            {"die_area_mm2", k.die_area_mm2},
            {"power_density_alarm_w_mm2", k.power_density_alarm_w_mm2}};
}

inline nlohmann::json to_json(const SimConfig& s) {
    return {{"mem", to_json(s.mem)},
            {"pu", to_json(s.pu)},
            {"energy", to_json(s.energy)},
            {"costs", to_json(s.costs)},
            {"mapping_policy", to_string(s.policy)}};
}

inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json j;
    j["workload"] = r.workload;
    j["config"] = r.config;
    j["phase_cycles"] = r.phase_cycles;
    j["total_cycles"] = r.total_cycles;
    nlohmann::json pj = nlohmann::json::object(), fj = nlohmann::json::object();
    for (const auto& [k, v] : r.energy.components_fj()) {
        fj[k] = v;
        pj[k] = static_cast<double>(v) / 1000.0;
    }
    j["energy_breakdown_pj"] = pj;
    j["energy_breakdown_fj"] = fj;
    j["energy_total_pj"] = r.energy.total_pj();
    j["events"] = {{"dram_bits", r.events.dram_bits},
                   {"shared_sram_accesses", r.events.shared_sram_accesses},
                   {"local_sram_accesses", r.events.local_sram_accesses},
                   {"ring_bytes", r.events.ring_bytes},
                   {"pe_ops", r.events.pe_ops}};
    j["utilization"] = utilization(r);
    nlohmann::json busy = nlohmann::json::object();
    for (const auto& [k, b] : r.busy) busy[k] = {{"busy", b.busy}, {"units", b.units}, {"span", b.span}};
    j["busy"] = busy;
    nlohmann::json ledger = nlohmann::json::array();
    for (const auto& e : r.ledger) ledger.push_back({{"phase", e.phase}, {"start", e.start}, {"duration", e.duration}});
    j["ledger"] = ledger;
    j["stats"] = r.stats;
    j["tile_histogram"] = r.tile_histogram;
    j["warnings"] = r.warnings;
    j["clock_ghz"] = r.clock_ghz;
    j["runtime_s"] = r.runtime_s();
    j["average_power_w"] = r.average_power_w();
    return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
    RunReport r;
    r.workload = j.at("workload").get<std::string>();
    r.config = j.at("config");
    r.phase_cycles = j.at("phase_cycles").get<std::map<std::string, Cycles>>();
    r.total_cycles = j.at("total_cycles").get<Cycles>();
    const auto& fj = j.at("energy_breakdown_fj");
    r.energy.dram_fj = fj.at("dram").get<std::int64_t>();
    r.energy.shared_sram_fj = fj.at("shared_sram").get<std::int64_t>();
    r.energy.local_sram_fj = fj.at("local_sram").get<std::int64_t>();
    r.energy.ring_fj = fj.at("ring").get<std::int64_t>();
    r.energy.pe_ops_fj = fj.at("pe_ops").get<std::int64_t>();
    const auto& ev = j.at("events");
    r.events.dram_bits = ev.at("dram_bits").get<std::uint64_t>();
    r.events.shared_sram_accesses = ev.at("shared_sram_accesses").get<std::uint64_t>();
    r.events.local_sram_accesses = ev.at("local_sram_accesses").get<std::uint64_t>();
    r.events.ring_bytes = ev.at("ring_bytes").get<std::uint64_t>();
    r.events.pe_ops = ev.at("pe_ops").get<std::uint64_t>();
    for (const auto& [k, b] : j.at("busy").items())
        r.busy[k] = {b.at("busy").get<double>(), b.at("units").get<std::uint64_t>(), b.at("span").get<Cycles>()};
    for (const auto& e : j.at("ledger"))
        r.ledger.push_back({e.at("phase").get<std::string>(), e.at("start").get<Cycles>(), e.at("duration").get<Cycles>()});
    r.stats = j.at("stats").get<std::map<std::string, std::int64_t>>();
    r.tile_histogram = j.at("tile_histogram").get<std::vector<std::uint64_t>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.clock_ghz = j.at("clock_ghz").get<double>();
    return r;
}

// Flat CSV row layout shared by every report.
inline std::vector<std::string> csv_columns() {
    return {"workload",          "total_cycles",          "runtime_s",
            "average_power_w",   "energy_total_pj",       "energy_dram_pj",
            "energy_shared_sram_pj", "energy_local_sram_pj", "energy_ring_pj",
            "energy_pe_ops_pj",  "phase_pivot",           "phase_rowcol",
            "phase_internal",    "phase_seeding",         "phase_alignment",
            "phase_pipeline_overlap", "util_search",      "util_compute",
            "warnings"};
}

inline std::vector<std::string> csv_row(const RunReport& r) {
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    auto phase = [&](const char* k) {
        auto it = r.phase_cycles.find(k);
        return it == r.phase_cycles.end() ? std::string() : std::to_string(it->second);
    };
    const auto u = utilization(r);
    auto util = [&](const char* k) {
        auto it = u.find(k);
        return it == u.end() ? std::string() : num(it->second);
    };
    std::string warn;
    for (const auto& w : r.warnings) warn += (warn.empty() ? "" : "; ") + w;
    return {r.workload,
            std::to_string(r.total_cycles),
            num(r.runtime_s()),
            num(r.average_power_w()),
            num(r.energy.total_pj()),
            num(static_cast<double>(r.energy.dram_fj) / 1000.0),
            num(static_cast<double>(r.energy.shared_sram_fj) / 1000.0),
            num(static_cast<double>(r.energy.local_sram_fj) / 1000.0),
            num(static_cast<double>(r.energy.ring_fj) / 1000.0),
            num(static_cast<double>(r.energy.pe_ops_fj) / 1000.0),
            phase("pivot"),
            phase("rowcol"),
            phase("internal"),
            phase("seeding"),
            phase("alignment"),
            phase("pipeline_overlap"),
            util("search"),
            util("compute"),
            warn};
}

// ---------------------------------------------------------------------------
// Mode 1: blocked Floyd-Warshall

struct ApspTileCost {
    Cycles compute = 0;
    Cycles dram = 0;
    bool double_buffered = false;

    // Cycles for one PU to process `tiles` tiles back to back.
    Cycles load(std::uint64_t tiles) const noexcept {
        if (tiles == 0) return 0;
        const auto n = static_cast<Cycles>(tiles);
        return double_buffered ? dram + n * std::max(dram, compute) : n * (dram + compute);
    }
};

inline ApspTileCost apsp_tile_cost(std::size_t block, const SimConfig& sc, std::uint32_t timing_tier) {
    const std::uint64_t b = block;
    const std::uint64_t ops = b * b * b;
    const std::uint64_t tile_bits = b * b * 32;
    ApspTileCost c;
    const Cycles pe = pe_compute_cycles(ops, sc.pu);
    const auto shared = static_cast<Cycles>(
        (ops * sc.costs.apsp_shared_bits_per_op + sc.pu.shared_memory_bits_per_cycle - 1) /
        sc.pu.shared_memory_bits_per_cycle);
    c.compute = std::max(pe, shared);
    // Fetch the target tile and write it back: bursts at the PU's I/O width
    // plus one row cycle per activated row.
    const std::uint64_t moved = 2 * tile_bits;
    const std::uint64_t bursts = (moved + sc.mem.io_bits_per_pu - 1) / sc.mem.io_bits_per_pu;
    const std::uint64_t rows = (moved + sc.mem.row_buffer_bits - 1) / sc.mem.row_buffer_bits;
    const Picoseconds act = static_cast<Picoseconds>(rows) * t_rc_ps(sc.mem, timing_tier);
    const Cycles act_cycles = (act + sc.pu.cycle_ps() - 1) / sc.pu.cycle_ps();
    // More PUs than bank groups share the bank groups' I/O.
    const Cycles share = (sc.pu.total_pus + sc.mem.bank_groups() - 1) / sc.mem.bank_groups();
    c.dram = (static_cast<Cycles>(bursts) + act_cycles) * share;
    // Left, top and two target buffers.
    c.double_buffered = 4 * (tile_bits / 8) <= sc.pu.shared_memory_bytes;
    return c;
}

struct ApspRun {
    DistanceMatrix result;
    RunReport report;
};

inline ApspRun run_apsp_sim(const SimConfig& sc, const DistanceMatrix& m, std::size_t block) {
    sc.validate();
    if (block == 0) throw ConfigError("block size must be at least 1");
    const std::size_t size = DistanceMatrix::padded_size(m.nodes(), block);
    if (size == 0) throw InputError("empty distance matrix");
    if (size % block != 0) throw ConfigError("block size must divide the padded node count");

    const auto placement = place_segments({{Segment::DistanceMatrix, std::uint64_t{size} * size * 32}}, sc.policy, sc.mem);
    const std::uint32_t tier = placement[0].timing_tier.value_or(placement[0].pieces.front().tier);

    ApspRun run;
    run.result = blocked_fw(m, block);

    const std::uint64_t tiles = size / block;
    const std::uint32_t pus = sc.pu.compute_pus;
    const std::uint64_t tile_bytes = std::uint64_t{block} * block * 4;
    const ApspTileCost cost = apsp_tile_cost(block, sc, tier);
    const std::uint64_t ops = std::uint64_t{block} * block * block;

    RunReport& r = run.report;
    r.workload = "apsp";
    r.config = to_json(sc);
    r.config["block"] = block;
    r.config["nodes"] = m.nodes();
    r.tile_histogram.assign(pus, 0);

    double busy_pivot = 0, busy_rowcol = 0, busy_internal = 0;
    Cycles pivot_total = 0, rowcol_total = 0, internal_total = 0;
    std::uint64_t tiles_processed = 0;
    std::uint64_t broadcast_bytes = 0;
    Cycles now = 0;
    std::vector<std::uint64_t> per_pu(pus);
    for (std::uint64_t k = 0; k < tiles; ++k) {
        const Cycles pivot = cost.load(1);
        r.ledger.push_back({"pivot", now, pivot});
        now += pivot;
        pivot_total += pivot;
        busy_pivot += static_cast<double>(pivot);
        tiles_processed += 1;
        if (tiles == 1) break;

        // The pivot row and column are dealt round-robin over the compute PUs.
        std::fill(per_pu.begin(), per_pu.end(), 0);
        for (std::uint64_t q = 0; q < 2 * (tiles - 1); ++q) ++per_pu[q % pus];
        Cycles rowcol_load = 0;
        for (auto n : per_pu) {
            rowcol_load = std::max(rowcol_load, cost.load(n));
            busy_rowcol += static_cast<double>(cost.load(n));
        }
        const Cycles rowcol = broadcast_cost(tile_bytes, sc.pu) + rowcol_load;
        broadcast_bytes += tile_bytes;
        r.ledger.push_back({"rowcol", now, rowcol});
        now += rowcol;
        rowcol_total += rowcol;
        tiles_processed += 2 * (tiles - 1);

        std::fill(per_pu.begin(), per_pu.end(), 0);
        for (std::uint64_t i = 0; i < tiles; ++i) {
            if (i == k) continue;
            for (std::uint64_t j = 0; j < tiles; ++j) {
                if (j == k) continue;
                const auto pu = map_tile_mod(i, j, tiles, pus);
                ++per_pu[pu];
                ++r.tile_histogram[pu];
            }
        }
        Cycles internal_load = 0;
        for (auto n : per_pu) {
            internal_load = std::max(internal_load, cost.load(n));
            busy_internal += static_cast<double>(cost.load(n));
        }
        // Row and column tiles stream in while the first internal tiles
        // compute; the phase waits for the first pair to arrive.
        const std::uint64_t stream_bytes = 2 * (tiles - 1) * tile_bytes;
        const Cycles internal = std::max(broadcast_cost(stream_bytes, sc.pu), internal_load) +
                                broadcast_cost(2 * tile_bytes, sc.pu);
        broadcast_bytes += stream_bytes;
        r.ledger.push_back({"internal", now, internal});
        now += internal;
        internal_total += internal;
        tiles_processed += (tiles - 1) * (tiles - 1);
    }

    r.phase_cycles = {{"pivot", pivot_total}, {"rowcol", rowcol_total}, {"internal", internal_total}};
    r.total_cycles = replay_ledger(r.ledger);
    r.busy["compute"] = {busy_pivot + busy_rowcol + busy_internal, pus, r.total_cycles};
    r.busy["compute.pivot"] = {busy_pivot, pus, pivot_total};
    r.busy["compute.rowcol"] = {busy_rowcol, pus, rowcol_total};
    r.busy["compute.internal"] = {busy_internal, pus, internal_total};
    r.busy["search"] = {0, sc.pu.search_pus, r.total_cycles};

    const Cycles pe_cycles = pe_compute_cycles(ops, sc.pu);
    r.events.dram_bits = tiles_processed * 2 * tile_bytes * 8;
    r.events.shared_sram_accesses = tiles_processed * ((ops * sc.costs.apsp_shared_bits_per_op + sc.pu.pe_lane_bits - 1) / sc.pu.pe_lane_bits);
    r.events.local_sram_accesses = tiles_processed * static_cast<std::uint64_t>(pe_cycles) * sc.pu.pes_per_pu *
                                   sc.costs.apsp_local_accesses_per_pe_cycle;
    r.events.ring_bytes = broadcast_bytes * ((sc.pu.total_pus + 1) / 2);
    r.events.pe_ops = tiles_processed * ops;

    r.stats = {{"tiles_per_row", static_cast<std::int64_t>(tiles)},
               {"super_steps", static_cast<std::int64_t>(tiles)},
               {"tiles_processed", static_cast<std::int64_t>(tiles_processed)},
               {"tile_compute_cycles", cost.compute},
               {"tile_dram_cycles", cost.dram},
               {"double_buffered", cost.double_buffered ? 1 : 0},
               {"timing_tier", tier}};
    finalize_report(r, sc);
    return run;
}

// ---------------------------------------------------------------------------
// Mode 2: seeding and alignment

enum class PipelineMode { Integrated, Hybrid, CpuBaseline };

inline const char* to_string(PipelineMode m) {
    switch (m) {
    case PipelineMode::Integrated: return "integrated";
    case PipelineMode::Hybrid: return "hybrid";
    case PipelineMode::CpuBaseline: return "cpu_baseline";
    }
    return "?";
}

inline PipelineMode parse_pipeline_mode(const std::string& s) {
    if (s == "integrated") return PipelineMode::Integrated;
    if (s == "hybrid") return PipelineMode::Hybrid;
    if (s == "cpu_baseline") return PipelineMode::CpuBaseline;
    throw ConfigError("unknown pipeline mode '" + s + "'");
}

struct ReadAlignment {
    std::vector<Candidate> candidates;
    // Index into candidates of the best alignment, -1 if none.
    int best = -1;
    SatValue score = 0;
    // Reference coordinates of the best alignment's end cell, and the query end.
    std::uint64_t reference_end = 0;
    std::uint64_t query_end = 0;
    // Per candidate: window length and the DP work.
    std::vector<std::uint64_t> window_lengths;
    std::vector<std::uint64_t> wavefronts;
    std::vector<std::uint64_t> cells;

    friend bool operator==(const ReadAlignment&, const ReadAlignment&) = default;
};

// Reference window [pos, pos + read + band) clipped to the reference.
inline std::pair<std::uint64_t, std::uint64_t> candidate_window(std::uint64_t pos, std::size_t read_len,
                                                                std::size_t band, std::uint64_t ref_len) {
    const std::uint64_t end = std::min<std::uint64_t>(ref_len, pos + read_len + band);
    return {pos, end - pos};
}

// The functional pipeline: seed, then adaptive banded alignment against every
// kept candidate.
template <typename Observer = NullSeedObserver>
ReadAlignment align_read(const SeedIndex& index, std::string_view reference, std::string_view read,
                         const SeedParams& sp, const AlignmentParams& ap, Observer&& observer = Observer{}) {
    ReadAlignment out;
    out.candidates = seed_read(index, read, sp, observer);
    for (std::size_t c = 0; c < out.candidates.size(); ++c) {
        const auto [start, len] = candidate_window(out.candidates[c].reference_position, read.size(), ap.band_width,
                                                   reference.size());
        const AlignmentResult res = adaptive_banded_dp(read, reference.substr(start, len), ap);
        out.window_lengths.push_back(len);
        out.wavefronts.push_back(res.wavefronts);
        out.cells.push_back(res.cells);
        if (out.best < 0 || res.score > out.score) {
            out.best = static_cast<int>(c);
            out.score = res.score;
            out.reference_end = start + res.end_position.reference;
            out.query_end = res.end_position.query;
        }
    }
    return out;
}

struct GenomicsRun {
    std::vector<ReadAlignment> results;
    RunReport report;
};

namespace detail {

inline void check_read(std::string_view read, std::size_t k, std::size_t i) {
    if (read.size() < k)
        throw InputError("read " + std::to_string(i) + " is shorter than k=" + std::to_string(k));
    for (char c : read)
        if (encode_base(c) < 0 && c != 'N') throw InputError("read " + std::to_string(i) + " has invalid base");
}

// Event-driven model of the search -> compute pipeline.
class PipelineSim {
public:
    struct ReadWork {
        std::uint64_t read_offset = 0;  // byte offset in the read buffer
        std::uint64_t read_len = 0;
        std::vector<SeedLookupEvent> lookups;
        const ReadAlignment* result = nullptr;
    };

    PipelineSim(const SimConfig& sc, const std::vector<SegmentPlacement>& placement, std::uint32_t access_bytes)
        : sc_(sc), place_(placement), banks_(sc.mem), bank_free_(sc.mem.total_banks(), 0),
          sorter_free_(sc.pu.search_pus, 0), port_free_(sc.pu.compute_pus, 0), access_bytes_(access_bytes),
          cycle_ps_(sc.pu.cycle_ps()) {}

    struct Outcome {
        Picoseconds seeding_start = 0, seeding_end = 0;
        Picoseconds align_start = -1, align_end = 0;
        double producer_busy_ps = 0, consumer_busy_ps = 0;
        std::int64_t stalls = 0;
        Picoseconds stall_ps = 0;
        std::int64_t max_queue = 0;
        Picoseconds sorter_wait_ps = 0, port_wait_ps = 0;
        std::int64_t dram_accesses = 0;
        std::int64_t row_hits = 0, row_misses = 0, row_conflicts = 0, closed_accesses = 0;
        Picoseconds bank_wait_ps = 0;
    };

    // Integrated: producers feed the bounded queue. Hybrid: every batch is
    // staged at `host_ready` and only consumers run.
    Outcome run(const std::vector<ReadWork>& work, bool integrated, Picoseconds host_ready) {
        work_ = &work;
        out_ = Outcome{};
        const std::uint32_t producers = integrated ? sc_.pu.search_pus * sc_.pu.search_pes_per_pu : 0;
        const std::uint32_t consumers = sc_.pu.compute_pus * sc_.pu.pes_per_pu;
        agents_.assign(producers + consumers, Agent{});
        n_producers_ = producers;
        depth_ = integrated ? sc_.pu.queue_depth : static_cast<std::uint32_t>(work.size() + 1);
        queue_.clear();
        blocked_.clear();
        idle_.clear();
        remaining_ = work.size();
        for (std::uint32_t p = 0; p < producers; ++p) {
            Agent& a = agents_[p];
            a.producer = true;
            a.next_read = p;
            if (a.next_read < work.size()) schedule(0, p);
        }
        for (std::uint32_t c = 0; c < consumers; ++c) {
            agents_[producers + c].producer = false;
            idle_.push_back(producers + c);
        }
        if (!integrated) {
            for (std::size_t r = 0; r < work.size(); ++r) queue_.push_back({r, host_ready});
            out_.max_queue = static_cast<std::int64_t>(work.size());
            out_.seeding_end = host_ready;
            wake_consumers(host_ready);
        }
        while (!events_.empty()) {
            const auto [t, seq, id] = events_.top();
            events_.pop();
            (void)seq;
            if (agents_[id].producer) step_producer(id, t);
            else step_consumer(id, t);
        }
        if (remaining_ != 0) throw Error("internal_error", "pipeline finished with unprocessed reads");
        return out_;
    }

private:
    struct Step {
        // Sort runs on the PU's shared sorter; Compute overlaps PE cycles
        // with `port` cycles on the PU's shared-memory port.
        enum Kind { Dram, Sort, Compute, Emit } kind = Compute;
        int segment = 0;
        std::uint64_t offset = 0;
        bool closed = false;
        Cycles cycles = 0;
        Cycles port = 0;
    };
    struct Agent {
        bool producer = false;
        std::size_t next_read = 0;  // producers: next read index to start
        std::size_t current = 0;
        std::vector<Step> steps;
        std::size_t pc = 0;
        bool active = false;
        Picoseconds blocked_since = 0;
    };
    struct Batch {
        std::size_t read = 0;
        Picoseconds ready = 0;
    };

    void schedule(Picoseconds t, std::uint32_t id) { events_.push({t, seq_++, id}); }

    // Returns the completion time of one DRAM access issued at t.
    Picoseconds dram(int segment, std::uint64_t offset, bool closed, Picoseconds t) {
        const SegmentPlacement& p = place_[segment];
        const PhysicalAddress a = segment_address(p, offset, sc_.mem);
        const std::uint32_t bank = global_bank(a, sc_.mem);
        const Picoseconds start = std::max(t, bank_free_[bank]);
        out_.bank_wait_ps += start - t;
        const std::uint32_t tier = timing_tier_of(p, a);
        Picoseconds lat;
        if (closed) {
            lat = t_rc_ps(sc_.mem, tier);
            banks_.close(bank);
            ++out_.closed_accesses;
        } else {
            RowOutcome o;
            lat = access_latency_ps(a, banks_, sc_.mem, tier, &o);
            if (o == RowOutcome::Hit) ++out_.row_hits;
            else if (o == RowOutcome::Miss) ++out_.row_misses;
            else ++out_.row_conflicts;
        }
        bank_free_[bank] = start + lat;
        ++out_.dram_accesses;
        return start + lat;
    }

    void build_producer_steps(Agent& a, std::size_t r) {
        const ReadWork& w = (*work_)[r];
        a.steps.clear();
        a.pc = 0;
        for (std::uint64_t off = 0; off < w.read_len; off += access_bytes_)
            a.steps.push_back({Step::Dram, 3, w.read_offset + off, false, 0});
        std::uint64_t hits = 0;
        const std::uint64_t lookups = w.lookups.size();
        for (const auto& ev : w.lookups) {
            a.steps.push_back({Step::Dram, 0, ev.ptr_slot * 8, true, 0});
            if (ev.skipped || ev.hits == 0) continue;
            hits += ev.hits;
            const std::uint64_t lo = ev.cal_begin * 4, hi = (ev.cal_begin + ev.hits) * 4;
            for (std::uint64_t off = lo - lo % access_bytes_; off < hi; off += access_bytes_)
                a.steps.push_back({Step::Dram, 1, off, true, 0});
        }
        a.steps.push_back({Step::Sort, 0, 0, false,
                           static_cast<Cycles>(lookups * sc_.costs.sorter_cycles_per_lookup +
                                               hits * sc_.costs.sorter_cycles_per_hit + 1),
                           0});
        a.steps.push_back({Step::Emit, 0, 0, false, 0});
    }

    void build_consumer_steps(Agent& a, std::size_t r) {
        const ReadAlignment& res = *(*work_)[r].result;
        a.steps.clear();
        a.pc = 0;
        for (std::size_t c = 0; c < res.candidates.size(); ++c) {
            const std::uint64_t pos = res.candidates[c].reference_position;
            const std::uint64_t end = pos + res.window_lengths[c];
            for (std::uint64_t off = pos - pos % access_bytes_; off < end; off += access_bytes_)
                a.steps.push_back({Step::Dram, 2, off, false, 0});
            const std::uint64_t bits = res.wavefronts[c] * sc_.costs.align_shared_bits_per_step;
            const std::uint64_t port_bits = sc_.pu.shared_memory_bits_per_cycle;
            a.steps.push_back({Step::Compute, 0, 0, false,
                               static_cast<Cycles>(res.wavefronts[c] * sc_.costs.wavefront_step_cycles),
                               static_cast<Cycles>((bits + port_bits - 1) / port_bits)});
        }
        if (a.steps.empty()) a.steps.push_back({Step::Compute, 0, 0, false, 1, 0});
    }

    void step_producer(std::uint32_t id, Picoseconds t) {
        Agent& a = agents_[id];
        if (!a.active) {
            a.current = a.next_read;
            a.next_read += n_producers_;
            build_producer_steps(a, a.current);
            a.active = true;
        }
        const Step& s = a.steps[a.pc];
        if (s.kind == Step::Dram) {
            const Picoseconds done = dram(s.segment, s.offset, s.closed, t);
            out_.producer_busy_ps += static_cast<double>(done - t);
            ++a.pc;
            schedule(done, id);
            return;
        }
        if (s.kind == Step::Sort) {
            Picoseconds& free = sorter_free_[id % sc_.pu.search_pus];
            const Picoseconds start = std::max(t, free);
            out_.sorter_wait_ps += start - t;
            const Picoseconds done = start + s.cycles * cycle_ps_;
            free = done;
            out_.producer_busy_ps += static_cast<double>(done - t);
            ++a.pc;
            schedule(done, id);
            return;
        }
        // Emit the batch, or block on a full queue.
        if (queue_.size() >= depth_) {
            a.blocked_since = t;
            blocked_.push_back(id);
            ++out_.stalls;
            return;
        }
        emit(id, t);
    }

    void emit(std::uint32_t id, Picoseconds t) {
        Agent& a = agents_[id];
        const ReadWork& w = (*work_)[a.current];
        const std::uint64_t bytes = w.read_len + std::max<std::size_t>(1, w.result->candidates.size()) * sc_.costs.candidate_bytes;
        const Picoseconds ready = t + ring_transfer_cost(bytes, sc_.pu) * cycle_ps_;
        queue_.push_back({a.current, ready});
        out_.max_queue = std::max<std::int64_t>(out_.max_queue, static_cast<std::int64_t>(queue_.size()));
        out_.seeding_end = std::max(out_.seeding_end, t);
        a.active = false;
        if (a.next_read < work_->size()) schedule(t, id);
        wake_consumers(ready);
    }

    void wake_consumers(Picoseconds t) {
        std::size_t n = std::min(idle_.size(), queue_.size());
        while (n-- > 0) {
            const std::uint32_t c = idle_.front();
            idle_.pop_front();
            schedule(t, c);
        }
    }

    void step_consumer(std::uint32_t id, Picoseconds t) {
        Agent& a = agents_[id];
        if (!a.active) {
            if (queue_.empty()) {
                idle_.push_back(id);
                return;
            }
            const Batch b = queue_.front();
            if (b.ready > t) {
                schedule(b.ready, id);
                return;
            }
            queue_.pop_front();
            if (out_.align_start < 0) out_.align_start = t;
            // A slot opened: the oldest blocked producer emits now.
            if (!blocked_.empty()) {
                const std::uint32_t p = blocked_.front();
                blocked_.pop_front();
                out_.stall_ps += t - agents_[p].blocked_since;
                emit(p, t);
            }
            a.current = b.read;
            build_consumer_steps(a, b.read);
            a.active = true;
        }
        const Step& s = a.steps[a.pc];
        Picoseconds done;
        if (s.kind == Step::Dram) {
            done = dram(s.segment, s.offset, s.closed, t);
        } else {
            Picoseconds& free = port_free_[(id - n_producers_) % sc_.pu.compute_pus];
            const Picoseconds start = std::max(t, free);
            out_.port_wait_ps += start - t;
            free = start + s.port * cycle_ps_;
            done = std::max(t + s.cycles * cycle_ps_, free);
        }
        out_.consumer_busy_ps += static_cast<double>(done - t);
        if (++a.pc == a.steps.size()) {
            a.active = false;
            --remaining_;
            out_.align_end = std::max(out_.align_end, done);
        }
        schedule(done, id);
    }

    const SimConfig& sc_;
    const std::vector<SegmentPlacement>& place_;
    BankState banks_;
    std::vector<Picoseconds> bank_free_;
    std::vector<Picoseconds> sorter_free_;
    std::vector<Picoseconds> port_free_;
    std::uint32_t access_bytes_;
    Picoseconds cycle_ps_;
    const std::vector<ReadWork>* work_ = nullptr;
    Outcome out_;
    std::vector<Agent> agents_;
    std::uint32_t n_producers_ = 0;
    std::uint32_t depth_ = 0;
    std::deque<Batch> queue_;
    std::deque<std::uint32_t> blocked_;
    std::deque<std::uint32_t> idle_;
    std::size_t remaining_ = 0;
    std::uint64_t seq_ = 0;
    using Event = std::tuple<Picoseconds, std::uint64_t, std::uint32_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
};

inline Cycles ps_to_cycles_ceil(Picoseconds ps, Picoseconds cycle) { return (ps + cycle - 1) / cycle; }

}  // namespace detail

inline GenomicsRun run_genomics_sim(const SimConfig& sc, const SeedIndex& index, std::string_view reference,
                                    const std::vector<std::string>& reads, const SeedParams& sp,
                                    const AlignmentParams& ap, PipelineMode mode) {
    sc.validate();
    sp.validate();
    AlignmentParams checked = ap;
    checked.adaptive = true;
    checked.validate();
    if (reads.empty()) throw InputError("no reads to process");
    if (index.reference_length != reference.size()) throw InputError("index was built for a different reference");
    for (std::size_t i = 0; i < reads.size(); ++i) detail::check_read(reads[i], index.k, i);

    GenomicsRun run;
    run.results.resize(reads.size());
    std::vector<detail::PipelineSim::ReadWork> work(reads.size());
    std::uint64_t read_bytes = 0;
    EventCounts ev;
    std::uint64_t total_candidates = 0, total_cells = 0, total_wavefronts = 0, total_hits = 0, total_lookups = 0;
    for (std::size_t r = 0; r < reads.size(); ++r) {
        auto& w = work[r];
        w.read_offset = read_bytes;
        w.read_len = reads[r].size();
        read_bytes += reads[r].size();
        run.results[r] = align_read(index, reference, reads[r], sp, ap,
                                    [&w](const SeedLookupEvent& e) { w.lookups.push_back(e); });
        w.result = &run.results[r];
        total_candidates += run.results[r].candidates.size();
        for (auto c : run.results[r].cells) total_cells += c;
        for (auto w : run.results[r].wavefronts) total_wavefronts += w;
        for (const auto& e : w.lookups) {
            ++total_lookups;
            if (!e.skipped) total_hits += e.hits;
        }
    }

    RunReport& rep = run.report;
    rep.workload = std::string("genomics/") + to_string(mode);
    rep.config = to_json(sc);
    rep.config["k"] = index.k;
    rep.config["reads"] = reads.size();
    rep.config["reference_length"] = reference.size();
    rep.config["seed"] = {{"stride", sp.stride}, {"min_votes", sp.min_votes}, {"max_candidates", sp.max_candidates},
                          {"window", sp.window}, {"max_group", sp.max_group}};
    rep.config["align"] = {{"match_score", ap.match_score}, {"mismatch_penalty", ap.mismatch_penalty},
                           {"gap_penalty", ap.gap_penalty}, {"band_width", ap.band_width}, {"adaptive", ap.adaptive}};
    rep.config["pipeline_mode"] = to_string(mode);

    const Cycles n_reads = static_cast<Cycles>(reads.size());
    const std::uint32_t n_search = sc.pu.search_pus * sc.pu.search_pes_per_pu;
    const std::uint32_t n_compute = sc.pu.compute_pus * sc.pu.pes_per_pu;
    rep.stats = {{"reads", n_reads},
                 {"candidates", static_cast<std::int64_t>(total_candidates)},
                 {"dp_cells", static_cast<std::int64_t>(total_cells)},
                 {"lookups", static_cast<std::int64_t>(total_lookups)},
                 {"cal_hits", static_cast<std::int64_t>(total_hits)},
                 {"queue_depth", sc.pu.queue_depth}};

    if (mode == PipelineMode::CpuBaseline) {
        const Cycles seed = n_reads * static_cast<Cycles>(sc.costs.host_seed_cycles_per_read);
        const Cycles align_c = n_reads * static_cast<Cycles>(sc.costs.host_align_cycles_per_read);
        rep.ledger = {{"seeding", 0, seed}, {"alignment", seed, align_c}};
        rep.phase_cycles = {{"seeding", seed}, {"alignment", align_c}, {"pipeline_overlap", 0}};
        rep.total_cycles = replay_ledger(rep.ledger);
        rep.busy["search"] = {0, n_search, rep.total_cycles};
        rep.busy["compute"] = {0, n_compute, rep.total_cycles};
        finalize_report(rep, sc);
        return run;
    }

    const std::uint32_t access_bytes = sc.mem.access_bits / 8;
    const std::vector<SegmentRequest> req = {{Segment::PTR, index.ptr.size() * 64},
                                             {Segment::CAL, std::max<std::uint64_t>(1, index.cal.size()) * 32},
                                             {Segment::Reference, std::max<std::uint64_t>(1, reference.size()) * 8},
                                             {Segment::ReadBuffer, read_bytes * 8}};
    const auto placement = place_segments(req, sc.policy, sc.mem);

    const bool integrated = mode == PipelineMode::Integrated;
    const Picoseconds cycle = sc.pu.cycle_ps();
    const Picoseconds host_ready = integrated ? 0 : n_reads * static_cast<Cycles>(sc.costs.host_seed_cycles_per_read) * cycle;
    detail::PipelineSim sim(sc, placement, access_bytes);
    const auto o = sim.run(work, integrated, host_ready);

    const Cycles seed_end = detail::ps_to_cycles_ceil(o.seeding_end, cycle);
    const Cycles align_start = o.align_start / cycle;
    const Cycles align_end = detail::ps_to_cycles_ceil(o.align_end, cycle);
    rep.ledger = {{"seeding", 0, seed_end}, {"alignment", align_start, align_end - align_start}};
    const Cycles overlap = std::max<Cycles>(0, std::min(seed_end, align_end) - std::max<Cycles>(0, align_start));
    rep.phase_cycles = {{"seeding", seed_end}, {"alignment", align_end - align_start}, {"pipeline_overlap", overlap}};
    rep.total_cycles = replay_ledger(rep.ledger);
    rep.busy["search"] = {o.producer_busy_ps / static_cast<double>(cycle), integrated ? n_search : 0u, rep.total_cycles};
    rep.busy["compute"] = {o.consumer_busy_ps / static_cast<double>(cycle), n_compute, rep.total_cycles};
    rep.stats["producer_stalls"] = o.stalls;
    rep.stats["producer_stall_cycles"] = o.stall_ps / cycle;
    rep.stats["max_queue_occupancy"] = o.max_queue;
    rep.stats["dram_accesses"] = o.dram_accesses;
    rep.stats["row_hits"] = o.row_hits;
    rep.stats["row_misses"] = o.row_misses;
    rep.stats["row_conflicts"] = o.row_conflicts;
    rep.stats["closed_page_accesses"] = o.closed_accesses;
    rep.stats["bank_wait_cycles"] = o.bank_wait_ps / cycle;
    rep.stats["sorter_wait_cycles"] = o.sorter_wait_ps / cycle;
    rep.stats["shared_port_wait_cycles"] = o.port_wait_ps / cycle;

    ev.dram_bits = static_cast<std::uint64_t>(o.dram_accesses) * sc.mem.access_bits;
    std::uint64_t batch_bytes = 0;
    for (const auto& w : work)
        batch_bytes += w.read_len + std::max<std::size_t>(1, w.result->candidates.size()) * sc.costs.candidate_bytes;
    const std::uint64_t lane_bytes = sc.pu.pe_lane_bits / 8;
    // Each batch is written into and read out of the compute PU's shared
    // memory, plus the DP traffic through the shared port.
    ev.shared_sram_accesses = 2 * ((batch_bytes + lane_bytes - 1) / lane_bytes) +
                              (total_wavefronts * sc.costs.align_shared_bits_per_step + sc.pu.pe_lane_bits - 1) /
                                  sc.pu.pe_lane_bits;
    ev.local_sram_accesses = total_wavefronts * sc.costs.align_local_accesses_per_step + total_lookups;
    ev.ring_bytes = integrated ? batch_bytes * ((sc.pu.total_pus + 3) / 4) : 0;
    ev.pe_ops = total_cells * sc.costs.align_ops_per_cell + total_hits;
    rep.events = ev;
    finalize_report(rep, sc);
    return run;
}

}  // namespace m3dpim

#endif  // M3DPIM_ENGINE_HPP
