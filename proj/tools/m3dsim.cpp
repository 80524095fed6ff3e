// m3dsim: command-line front-end for the PIM simulator.
//
//   m3dsim apsp     [--config f] [--graph edges.txt] [--seed n] [--out f] [--format json|csv]
//   m3dsim genomics [--config f] [--reference r.fa] [--reads r.fq] [--index i.idx] [--mode m] ...
//   m3dsim index    --reference r.fa --k 12 --out i.idx
//   m3dsim sweep    --config f [--parallel n] [--out f] [--format json|csv]
//   m3dsim report   --in reports.json [--format json|csv] [--out f]
//
// Failures print {"error": kind, "message": text} on stderr and exit nonzero.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "m3dpim/experiment.hpp"

using namespace m3dpim;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string format;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "RNG seed (overrides rng_seed)");
    cmd->add_option("--out", c.out, "Output file (default: stdout)");
    cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

ExperimentConfig load(const Common& c, const std::string& workload, CLI::App* cmd) {
    ExperimentConfig cfg = c.config.empty() ? parse_config(nlohmann::json::object()) : load_config(c.config);
    if (!workload.empty()) cfg.workload = workload;
    if (cmd->count("--seed")) cfg.rng_seed = c.seed;
    if (!c.out.empty()) cfg.output_path = c.out;
    if (!c.format.empty()) cfg.output_format = c.format;
    cfg.validate();
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) std::cout << text;
    else write_text(path, text);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycle-approximate simulator of a monolithic-3D DRAM PIM accelerator"};
    app.require_subcommand(1);

    Common apsp_opts;
    std::string graph;
    auto* apsp = app.add_subcommand("apsp", "Blocked Floyd-Warshall on the PU array");
    add_common(apsp, apsp_opts);
    apsp->add_option("--graph", graph, "SNAP edge list (overrides apsp.graph_path)")->check(CLI::ExistingFile);

    Common gen_opts;
    std::string reference, reads, index_path, mode;
    auto* gen = app.add_subcommand("genomics", "Seeding and alignment pipeline");
    add_common(gen, gen_opts);
    gen->add_option("--reference", reference, "Reference FASTA")->check(CLI::ExistingFile);
    gen->add_option("--reads", reads, "Reads FASTQ")->check(CLI::ExistingFile);
    gen->add_option("--index", index_path, "Prebuilt seed index")->check(CLI::ExistingFile);
    gen->add_option("--mode", mode, "Pipeline mode")->check(CLI::IsMember({"integrated", "hybrid", "cpu_baseline"}));

    std::string idx_reference, idx_out;
    std::size_t idx_k = 12;
    auto* idx = app.add_subcommand("index", "Build a seed index from a FASTA reference");
    idx->add_option("--reference", idx_reference, "Reference FASTA")->required()->check(CLI::ExistingFile);
    idx->add_option("--k", idx_k, "k-mer length")->check(CLI::Range(4, 15));
    idx->add_option("--out", idx_out, "Index file")->required();

    Common sweep_opts;
    unsigned parallel = 1;
    auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config axis");
    add_common(sweep, sweep_opts);
    sweep->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);

    std::string report_in, report_format = "json", report_out;
    auto* report = app.add_subcommand("report", "Re-emit saved reports as JSON or CSV");
    report->add_option("--in", report_in, "Report JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--format", report_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    report->add_option("--out", report_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage_error", e.what(), 64);
    }

    try {
        if (*apsp) {
            auto cfg = load(apsp_opts, "apsp", apsp);
            if (!graph.empty()) cfg.apsp.graph_path = graph;
            emit(format_reports({run_experiment(cfg)}, cfg.output_format), cfg.output_path);
        } else if (*gen) {
            auto cfg = load(gen_opts, "genomics", gen);
            if (!reference.empty()) cfg.genomics.reference_path = reference;
            if (!reads.empty()) cfg.genomics.reads_path = reads;
            if (!index_path.empty()) cfg.genomics.index_path = index_path;
            if (!mode.empty()) cfg.genomics.mode = parse_pipeline_mode(mode);
            emit(format_reports({run_experiment(cfg)}, cfg.output_format), cfg.output_path);
        } else if (*idx) {
            std::string ref;
            for (const auto& r : load_fasta(idx_reference)) ref += r.sequence;
            const auto index = build_index(ref, idx_k);
            save_index(idx_out, index);
            std::cout << nlohmann::json{{"index", idx_out},
                                        {"k", index.k},
                                        {"reference_length", index.reference_length},
                                        {"cal_entries", index.cal.size()}}
                             .dump()
                      << '\n';
        } else if (*sweep) {
            auto cfg = load(sweep_opts, "", sweep);
            if (cfg.workload != "sweep" || !cfg.sweep) throw UsageError("the sweep command needs a config with workload 'sweep'");
            emit(format_sweep(run_sweep(cfg, parallel), cfg.output_format), cfg.output_path);
        } else if (*report) {
            std::vector<RunReport> reports;
            try {
                reports = parse_reports(read_file(report_in));
            } catch (const nlohmann::json::exception& e) {
                throw InputError("'" + report_in + "' is not a report file: " + e.what());
            }
            emit(format_reports(reports, report_format), report_out);
        }
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal_error", e.what(), 2);
    }
    return 0;
}
