#ifndef M3DPIM_EXPERIMENT_HPP
#define M3DPIM_EXPERIMENT_HPP

// Experiment plumbing behind the m3dsim front-end: JSON configs with strict
// key checking, synthetic graphs and reads, sweeps and report files.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "m3dpim/engine.hpp"
#include "m3dpim/io.hpp"

namespace m3dpim {

struct ApspWorkload {
    std::size_t nodes = 512;
    double density = 0.02;
    int max_weight = 100;
    std::size_t block = 64;
    // SNAP edge list; replaces the random graph when set.
    std::string graph_path;
    std::size_t max_nodes = 0;
};

struct GenomicsWorkload {
    std::string reference_path;
    std::uint64_t reference_length = 1'000'000;
    std::string reads_path;
    std::string index_path;
    std::size_t read_count = 20000;
    std::size_t read_length = 100;
    double error_rate = 0.05;
    double indel_fraction = 0.1;
    std::size_t k = 12;
    // Non-overlapping k-mers by default.
    SeedParams seed = {.stride = 12};
    AlignmentParams align;
    PipelineMode mode = PipelineMode::Integrated;
};

inline constexpr const char* kSweepAxes[] = {"tier_policy", "search_compute_ratio", "total_pus",
                                             "pes_per_pu",  "pipeline_mode",        "band_width"};

struct SweepSpec {
    std::string workload = "apsp";
    std::string axis;
    std::vector<nlohmann::json> values;
    // Speedups are relative to this value; the first value if unset.
    std::optional<nlohmann::json> baseline;
};

struct ExperimentConfig {
    std::string workload = "apsp";
    std::uint64_t rng_seed = 1;
    SimConfig sim;
    ApspWorkload apsp;
    GenomicsWorkload genomics;
    std::optional<SweepSpec> sweep;
    std::string output_path;
    std::string output_format = "json";

    void validate() const {
        sim.validate();
        if (workload != "apsp" && workload != "genomics" && workload != "sweep")
            throw ConfigError("workload must be apsp, genomics or sweep, got '" + workload + "'");
        if (output_format != "json" && output_format != "csv")
            throw ConfigError("output format must be json or csv, got '" + output_format + "'");
        if (apsp.block == 0) throw ConfigError("apsp.block must be at least 1");
        if (apsp.density < 0 || apsp.density > 1) throw ConfigError("apsp.density must lie in [0, 1]");
        if (apsp.max_weight < 1) throw ConfigError("apsp.max_weight must be at least 1");
        if (genomics.error_rate < 0 || genomics.error_rate >= 1) throw ConfigError("genomics.error_rate must lie in [0, 1)");
        if (genomics.indel_fraction < 0 || genomics.indel_fraction > 1)
            throw ConfigError("genomics.indel_fraction must lie in [0, 1]");
        if (genomics.k < 4 || genomics.k > 15) throw ConfigError("genomics.k must lie in [4, 15]");
        genomics.seed.validate();
        AlignmentParams ap = genomics.align;
        ap.adaptive = true;
        ap.validate();
        if (workload == "sweep") {
            if (!sweep) throw ConfigError("workload 'sweep' needs a sweep section");
            if (sweep->workload != "apsp" && sweep->workload != "genomics")
                throw ConfigError("sweep.workload must be apsp or genomics");
            if (std::find(std::begin(kSweepAxes), std::end(kSweepAxes), sweep->axis) == std::end(kSweepAxes))
                throw ConfigError("unknown sweep axis '" + sweep->axis + "'");
            if (sweep->values.empty()) throw ConfigError("sweep.values must not be empty");
        }
    }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

// Reads fields out of one JSON object and rejects keys nobody asked for.
class StrictObject {
public:
    StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("'" + where() + "' must be a JSON object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("'" + name(key) + "' has the wrong type");
        }
    }

    std::optional<StrictObject> child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        return StrictObject(*it, name(key));
    }

    const nlohmann::json* raw(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key '" + name(k.c_str()) + "'");
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }
    std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void parse_mem(StrictObject o, MemConfig& m) {
    o.get("layers", m.layers);
    o.get("tiers", m.tiers);
    o.get("tier_capacity_bits", m.tier_capacity_bits);
    o.get("channels", m.channels);
    o.get("banks_per_channel", m.banks_per_channel);
    o.get("bank_groups_per_channel", m.bank_groups_per_channel);
    o.get("row_buffer_bits", m.row_buffer_bits);
    o.get("access_bits", m.access_bits);
    o.get("io_bits_per_pu", m.io_bits_per_pu);
    o.get("t_rcd_ns", m.t_rcd_ns);
    o.get("t_rp_ns", m.t_rp_ns);
    o.get("t_ras_offset_ns", m.t_ras_offset_ns);
    o.get("t_cas_ns", m.t_cas_ns);
    o.get("energy_per_bit_pj", m.energy_per_bit_pj);
    o.finish();
}

inline void parse_pu(StrictObject o, PuConfig& p) {
    o.get("total_pus", p.total_pus);
    o.get("search_pus", p.search_pus);
    o.get("compute_pus", p.compute_pus);
    o.get("pes_per_pu", p.pes_per_pu);
    o.get("search_pes_per_pu", p.search_pes_per_pu);
    o.get("pe_lane_bits", p.pe_lane_bits);
    o.get("compute_pe_buffer_bytes", p.compute_pe_buffer_bytes);
    o.get("search_pe_buffer_bytes", p.search_pe_buffer_bytes);
    o.get("shared_memory_bytes", p.shared_memory_bytes);
    o.get("shared_memory_bits_per_cycle", p.shared_memory_bits_per_cycle);
    o.get("ring_link_gbps", p.ring_link_gbps);
    o.get("hop_latency_cycles", p.hop_latency_cycles);
    o.get("clock_ghz", p.clock_ghz);
    o.get("queue_depth", p.queue_depth);
    o.finish();
}

inline void parse_energy(StrictObject o, EnergyModel& e) {
    o.get("dram_pj_per_bit", e.dram_pj_per_bit);
    o.get("local_sram_nj_per_access", e.local_sram_nj_per_access);
    o.get("shared_sram_nj_per_access", e.shared_sram_nj_per_access);
    o.get("ring_pj_per_byte", e.ring_pj_per_byte);
    o.get("pe_op_pj", e.pe_op_pj);
    o.finish();
}

inline void parse_costs(StrictObject o, KernelCosts& k) {
    o.get("apsp_shared_bits_per_op", k.apsp_shared_bits_per_op);
    o.get("apsp_local_accesses_per_pe_cycle", k.apsp_local_accesses_per_pe_cycle);
    o.get("wavefront_step_cycles", k.wavefront_step_cycles);
    o.get("align_local_accesses_per_step", k.align_local_accesses_per_step);
    o.get("align_ops_per_cell", k.align_ops_per_cell);
    o.get("sorter_cycles_per_lookup", k.sorter_cycles_per_lookup);
    o.get("sorter_cycles_per_hit", k.sorter_cycles_per_hit);
    o.get("align_shared_bits_per_step", k.align_shared_bits_per_step);
    o.get("candidate_bytes", k.candidate_bytes);
    o.get("host_seed_cycles_per_read", k.host_seed_cycles_per_read);
    o.get("host_align_cycles_per_read", k.host_align_cycles_per_read);
    o.get("die_area_mm2", k.die_area_mm2);
    o.get("power_density_alarm_w_mm2", k.power_density_alarm_w_mm2);
    o.finish();
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
    if (p.empty() || base.empty()) return p;
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? p : (base / fp).lexically_normal().string();
}

}  // namespace detail

// Defaults merged with `j`; relative file paths resolve against `base_dir`.
inline ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    ExperimentConfig c;
    detail::StrictObject root(j, "");
    root.get("workload", c.workload);
    root.get("rng_seed", c.rng_seed);
    std::string policy = to_string(c.sim.policy);
    root.get("mapping_policy", policy);
    c.sim.policy = parse_policy(policy);
    if (auto o = root.child("mem")) detail::parse_mem(*o, c.sim.mem);
    if (auto o = root.child("pu")) detail::parse_pu(*o, c.sim.pu);
    if (auto o = root.child("energy")) detail::parse_energy(*o, c.sim.energy);
    if (auto o = root.child("costs")) detail::parse_costs(*o, c.sim.costs);
    if (auto o = root.child("apsp")) {
        o->get("nodes", c.apsp.nodes);
        o->get("density", c.apsp.density);
        o->get("max_weight", c.apsp.max_weight);
        o->get("block", c.apsp.block);
        o->get("graph_path", c.apsp.graph_path);
        o->get("max_nodes", c.apsp.max_nodes);
        o->finish();
        c.apsp.graph_path = detail::resolve_path(c.apsp.graph_path, base_dir);
    }
    if (auto o = root.child("genomics")) {
        auto& g = c.genomics;
        o->get("reference_path", g.reference_path);
        o->get("reference_length", g.reference_length);
        o->get("reads_path", g.reads_path);
        o->get("index_path", g.index_path);
        o->get("read_count", g.read_count);
        o->get("read_length", g.read_length);
        o->get("error_rate", g.error_rate);
        o->get("indel_fraction", g.indel_fraction);
        o->get("k", g.k);
        std::string mode = to_string(g.mode);
        o->get("pipeline_mode", mode);
        g.mode = parse_pipeline_mode(mode);
        if (auto s = o->child("seed")) {
            s->get("stride", g.seed.stride);
            s->get("min_votes", g.seed.min_votes);
            s->get("max_candidates", g.seed.max_candidates);
            s->get("window", g.seed.window);
            s->get("max_group", g.seed.max_group);
            s->finish();
        }
        if (auto a = o->child("align")) {
            a->get("match_score", g.align.match_score);
            a->get("mismatch_penalty", g.align.mismatch_penalty);
            a->get("gap_penalty", g.align.gap_penalty);
            a->get("band_width", g.align.band_width);
            a->finish();
        }
        o->finish();
        g.reference_path = detail::resolve_path(g.reference_path, base_dir);
        g.reads_path = detail::resolve_path(g.reads_path, base_dir);
        g.index_path = detail::resolve_path(g.index_path, base_dir);
    }
    if (auto o = root.child("sweep")) {
        SweepSpec s;
        o->get("workload", s.workload);
        o->get("axis", s.axis);
        if (const auto* v = o->raw("values")) {
            if (!v->is_array()) throw ConfigError("'sweep.values' must be an array");
            s.values.assign(v->begin(), v->end());
        }
        if (const auto* b = o->raw("baseline")) s.baseline = *b;
        o->finish();
        c.sweep = s;
    }
    if (auto o = root.child("output")) {
        o->get("path", c.output_path);
        o->get("format", c.output_format);
        o->finish();
    }
    root.finish();
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j = to_json(c.sim);
    j["workload"] = c.workload;
    j["rng_seed"] = c.rng_seed;
    j["apsp"] = {{"nodes", c.apsp.nodes},
                 {"density", c.apsp.density},
                 {"max_weight", c.apsp.max_weight},
                 {"block", c.apsp.block},
                 {"graph_path", c.apsp.graph_path},
                 {"max_nodes", c.apsp.max_nodes}};
    const auto& g = c.genomics;
    j["genomics"] = {{"reference_path", g.reference_path},
                     {"reference_length", g.reference_length},
                     {"reads_path", g.reads_path},
                     {"index_path", g.index_path},
                     {"read_count", g.read_count},
                     {"read_length", g.read_length},
                     {"error_rate", g.error_rate},
                     {"indel_fraction", g.indel_fraction},
                     {"k", g.k},
                     {"pipeline_mode", to_string(g.mode)},
                     {"seed",
                      {{"stride", g.seed.stride},
                       {"min_votes", g.seed.min_votes},
                       {"max_candidates", g.seed.max_candidates},
                       {"window", g.seed.window},
                       {"max_group", g.seed.max_group}}},
                     {"align",
                      {{"match_score", g.align.match_score},
                       {"mismatch_penalty", g.align.mismatch_penalty},
                       {"gap_penalty", g.align.gap_penalty},
                       {"band_width", g.align.band_width}}}};
    if (c.sweep) {
        j["sweep"] = {{"workload", c.sweep->workload}, {"axis", c.sweep->axis}, {"values", c.sweep->values}};
        if (c.sweep->baseline) j["sweep"]["baseline"] = *c.sweep->baseline;
    }
    j["output"] = {{"path", c.output_path}, {"format", c.output_format}};
    return j;
}

// ---------------------------------------------------------------------------
// Synthetic inputs

inline std::string random_reference(std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::string s(length, 'A');
    for (auto& c : s) c = "ACGT"[rng() & 3];
    return s;
}

struct SimulatedReads {
    std::vector<std::string> reads;
    std::vector<std::uint64_t> truth;
    std::uint64_t bases = 0;  // reference bases consumed
    std::uint64_t substitutions = 0;
    std::uint64_t insertions = 0;
    std::uint64_t deletions = 0;
};

// Each read copies a uniform reference window and mutates it base by base.
// An error is an indel with probability indel_fraction (insertions and
// deletions equally likely), otherwise a substitution to a different base.
inline SimulatedReads simulate_reads(std::string_view reference, std::size_t count, std::size_t length,
                                     double error_rate, std::uint64_t seed, double indel_fraction = 0.1) {
    if (length == 0) throw InputError("read length must be at least 1");
    if (length > reference.size())
        throw InputError("read length " + std::to_string(length) + " exceeds reference length " +
                         std::to_string(reference.size()));
    if (error_rate < 0 || error_rate >= 1) throw InputError("error rate must lie in [0, 1)");
    if (indel_fraction < 0 || indel_fraction > 1) throw InputError("indel fraction must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> start(0, reference.size() - length);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SimulatedReads out;
    out.reads.reserve(count);
    out.truth.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t pos = start(rng);
        std::string read;
        read.reserve(length + length / 8);
        for (std::size_t i = 0; i < length; ++i) {
            const char base = reference[pos + i];
            ++out.bases;
            if (u(rng) >= error_rate) {
                read += base;
                continue;
            }
            const double kind = u(rng);
            if (kind < indel_fraction / 2) {
                read += "ACGT"[rng() & 3];
                read += base;
                ++out.insertions;
            } else if (kind < indel_fraction) {
                ++out.deletions;
            } else {
                char sub = base;
                while (sub == base) sub = "ACGT"[rng() & 3];
                read += sub;
                ++out.substitutions;
            }
        }
        if (read.empty()) read = std::string(reference.substr(pos, length));
        out.reads.push_back(std::move(read));
        out.truth.push_back(pos);
    }
    return out;
}

inline std::vector<FastqRecord> to_fastq(const SimulatedReads& s) {
    std::vector<FastqRecord> out;
    out.reserve(s.reads.size());
    for (std::size_t i = 0; i < s.reads.size(); ++i)
        out.push_back({"read" + std::to_string(i) + " pos=" + std::to_string(s.truth[i]), s.reads[i],
                       std::string(s.reads[i].size(), 'I')});
    return out;
}

inline DistanceMatrix random_graph(std::size_t n, double density, int max_weight, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> w(1, max_weight);
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && u(rng) < density) edges.push_back({a, b, w(rng)});
    return load_graph(edges, n);
}

inline DistanceMatrix make_graph(const ExperimentConfig& c) {
    if (c.apsp.graph_path.empty()) return random_graph(c.apsp.nodes, c.apsp.density, c.apsp.max_weight, c.rng_seed);
    std::ifstream in(c.apsp.graph_path);
    if (!in) throw IoError("cannot open graph '" + c.apsp.graph_path + "'");
    const EdgeList el = parse_edge_list(in, c.apsp.max_nodes);
    return load_graph(el.edges, el.nodes);
}

struct GenomicsInputs {
    std::string reference;
    SeedIndex index;
    std::vector<std::string> reads;
    std::vector<std::uint64_t> truth;  // empty for reads loaded from a file
};

inline GenomicsInputs make_genomics_inputs(const ExperimentConfig& c) {
    const auto& g = c.genomics;
    GenomicsInputs in;
    if (g.reference_path.empty()) {
        in.reference = random_reference(g.reference_length, c.rng_seed);
    } else {
        auto recs = load_fasta(g.reference_path);
        for (auto& r : recs) in.reference += r.sequence;
        if (g.reference_length > 0 && in.reference.size() > g.reference_length) in.reference.resize(g.reference_length);
    }
    if (g.index_path.empty()) {
        in.index = build_index(in.reference, g.k);
    } else {
        in.index = load_index(g.index_path);
        if (in.index.k != g.k) throw ConfigError("index k=" + std::to_string(in.index.k) + " differs from genomics.k");
        if (in.index.reference_length != in.reference.size())
            throw InputError("index was built for a reference of a different length");
    }
    if (g.reads_path.empty()) {
        auto sim = simulate_reads(in.reference, g.read_count, g.read_length, g.error_rate, c.rng_seed + 1,
                                  g.indel_fraction);
        in.reads = std::move(sim.reads);
        in.truth = std::move(sim.truth);
    } else {
        for (auto& r : load_fastq(g.reads_path)) in.reads.push_back(std::move(r.sequence));
        if (g.read_count > 0 && in.reads.size() > g.read_count) in.reads.resize(g.read_count);
    }
    return in;
}

// ---------------------------------------------------------------------------
// Runs

namespace detail {

inline void scale_warnings(const ExperimentConfig& c, const std::string& workload, RunReport& r) {
    if (workload == "apsp" && c.apsp.graph_path.empty() && c.apsp.nodes > 4096)
        r.warnings.push_back("apsp.nodes above 4096 may take a long time");
    if (workload == "genomics") {
        if (c.genomics.reference_length > 10'000'000) r.warnings.push_back("reference above 10 Mb may take a long time");
        if (c.genomics.read_count > 100'000) r.warnings.push_back("more than 100k reads may take a long time");
    }
}

}  // namespace detail

inline RunReport run_apsp(const ExperimentConfig& c, const DistanceMatrix& m) {
    RunReport r = run_apsp_sim(c.sim, m, c.apsp.block).report;
    const nlohmann::json engine_config = r.config;
    r.config = to_json(c);
    r.config["run"] = engine_config;
    detail::scale_warnings(c, "apsp", r);
    return r;
}

inline RunReport run_genomics(const ExperimentConfig& c, const GenomicsInputs& in) {
    RunReport r = run_genomics_sim(c.sim, in.index, in.reference, in.reads, c.genomics.seed, c.genomics.align,
                                   c.genomics.mode)
                      .report;
    const nlohmann::json engine_config = r.config;
    r.config = to_json(c);
    r.config["run"] = engine_config;
    detail::scale_warnings(c, "genomics", r);
    return r;
}

inline RunReport run_experiment(const ExperimentConfig& c) {
    c.validate();
    if (c.workload == "apsp") return run_apsp(c, make_graph(c));
    if (c.workload == "genomics") return run_genomics(c, make_genomics_inputs(c));
    throw UsageError("run_experiment handles apsp and genomics; use run_sweep for sweeps");
}

// Copy of `base` with the sweep axis set to `value`.
inline ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, const nlohmann::json& value) {
    ExperimentConfig c = base;
    try {
        if (axis == "tier_policy") {
            c.sim.policy = parse_policy(value.get<std::string>());
        } else if (axis == "search_compute_ratio") {
            std::uint32_t s = 0, k = 0;
            if (value.is_array() && value.size() == 2) {
                s = value[0].get<std::uint32_t>();
                k = value[1].get<std::uint32_t>();
            } else {
                const auto text = value.get<std::string>();
                const auto colon = text.find(':');
                if (colon == std::string::npos) throw ConfigError("ratio '" + text + "' is not of the form S:C");
                s = static_cast<std::uint32_t>(std::stoul(text.substr(0, colon)));
                k = static_cast<std::uint32_t>(std::stoul(text.substr(colon + 1)));
            }
            c.sim.pu.search_pus = s;
            c.sim.pu.compute_pus = k;
            c.sim.pu.total_pus = s + k;
        } else if (axis == "total_pus") {
            // Keeps the 1:3 search-to-compute split.
            const auto n = value.get<std::uint32_t>();
            c.sim.pu.total_pus = n;
            c.sim.pu.search_pus = n / 4;
            c.sim.pu.compute_pus = n - n / 4;
        } else if (axis == "pes_per_pu") {
            const auto n = value.get<std::uint32_t>();
            c.sim.pu.pes_per_pu = n;
            c.sim.pu.search_pes_per_pu = n;
        } else if (axis == "pipeline_mode") {
            c.genomics.mode = parse_pipeline_mode(value.get<std::string>());
        } else if (axis == "band_width") {
            c.genomics.align.band_width = value.get<std::size_t>();
        } else {
            throw ConfigError("unknown sweep axis '" + axis + "'");
        }
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("sweep value " + value.dump() + " has the wrong type for axis '" + axis + "'");
    } catch (const std::invalid_argument&) {
        throw ConfigError("sweep value " + value.dump() + " is not a valid " + axis);
    }
    c.workload = base.sweep ? base.sweep->workload : base.workload;
    c.sweep.reset();
    c.validate();
    return c;
}

struct SweepRow {
    nlohmann::json value;
    RunReport report;
    double speedup = 1.0;
};

struct SweepResult {
    std::string axis;
    nlohmann::json baseline;
    std::vector<SweepRow> rows;
};

// One run per axis value on shared inputs; `parallel` engine instances run
// at a time, each owning its state.
inline SweepResult run_sweep(const ExperimentConfig& base, unsigned parallel = 1) {
    base.validate();
    if (!base.sweep) throw ConfigError("config has no sweep section");
    const SweepSpec& spec = *base.sweep;
    if (spec.values.empty()) throw ConfigError("sweep.values must not be empty");

    std::vector<ExperimentConfig> configs;
    for (const auto& v : spec.values) {
        try {
            configs.push_back(apply_axis(base, spec.axis, v));
        } catch (const Error& e) {
            throw Error(e.kind(), "sweep value " + v.dump() + " is invalid: " + e.what() + "; base config: " +
                                      to_json(base).dump());
        }
    }

    SweepResult out;
    out.axis = spec.axis;
    out.baseline = spec.baseline.value_or(spec.values.front());
    const auto base_it = std::find(spec.values.begin(), spec.values.end(), out.baseline);
    if (base_it == spec.values.end()) throw ConfigError("sweep.baseline " + out.baseline.dump() + " is not among the values");

    std::optional<DistanceMatrix> graph;
    std::optional<GenomicsInputs> inputs;
    if (spec.workload == "apsp") graph = make_graph(configs.front());
    else inputs = make_genomics_inputs(configs.front());

    out.rows.resize(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::optional<std::pair<std::size_t, std::string>> failure;
    std::string failure_kind;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                out.rows[i].value = spec.values[i];
                out.rows[i].report = graph ? run_apsp(configs[i], *graph) : run_genomics(configs[i], *inputs);
            } catch (const Error& e) {
                std::lock_guard lock(err_mu);
                if (!failure || i < failure->first) {
                    failure = {i, e.what()};
                    failure_kind = e.kind();
                }
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(configs.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure)
        throw Error(failure_kind, "sweep run " + spec.values[failure->first].dump() + " failed: " + failure->second +
                                      "; config: " + to_json(configs[failure->first]).dump());

    const auto b = static_cast<std::size_t>(base_it - spec.values.begin());
    const double ref = static_cast<double>(out.rows[b].report.total_cycles);
    for (auto& row : out.rows)
        row.speedup = row.report.total_cycles > 0 ? ref / static_cast<double>(row.report.total_cycles) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Report files

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
    return line + '\n';
}

inline std::vector<std::string> sweep_csv_columns() {
    std::vector<std::string> cols = {"axis", "value", "speedup"};
    const auto rest = csv_columns();
    cols.insert(cols.end(), rest.begin(), rest.end());
    return cols;
}

inline std::string format_reports(const std::vector<RunReport>& reports, const std::string& format) {
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        return arr.dump(2) + '\n';
    }
    if (format == "csv") {
        std::string out = csv_line(csv_columns());
        for (const auto& r : reports) out += csv_line(csv_row(r));
        return out;
    }
    throw ConfigError("unknown report format '" + format + "'");
}

inline std::string format_sweep(const SweepResult& s, const std::string& format) {
    if (format == "json") {
        nlohmann::json j;
        j["axis"] = s.axis;
        j["baseline"] = s.baseline;
        j["rows"] = nlohmann::json::array();
        for (const auto& row : s.rows)
            j["rows"].push_back({{"value", row.value}, {"speedup", row.speedup}, {"report", to_json(row.report)}});
        return j.dump(2) + '\n';
    }
    if (format == "csv") {
        std::string out = csv_line(sweep_csv_columns());
        for (const auto& row : s.rows) {
            std::ostringstream sp;
            sp.precision(17);
            sp << row.speedup;
            std::vector<std::string> f = {s.axis, row.value.is_string() ? row.value.get<std::string>() : row.value.dump(),
                                          sp.str()};
            const auto rest = csv_row(row.report);
            f.insert(f.end(), rest.begin(), rest.end());
            out += csv_line(f);
        }
        return out;
    }
    throw ConfigError("unknown report format '" + format + "'");
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline void emit_report(const std::vector<RunReport>& reports, const std::string& format, const std::string& path) {
    write_text(path, format_reports(reports, format));
}

inline std::vector<RunReport> parse_reports(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<RunReport> out;
    if (j.is_array()) {
        for (const auto& r : j) out.push_back(report_from_json(r));
    } else if (j.contains("rows")) {
        for (const auto& row : j.at("rows")) out.push_back(report_from_json(row.at("report")));
    } else {
        out.push_back(report_from_json(j));
    }
    return out;
}

}  // namespace m3dpim

#endif  // M3DPIM_EXPERIMENT_HPP
