#ifndef M3DPIM_IO_HPP
#define M3DPIM_IO_HPP

// FASTA and FASTQ ingestion. Bases are upper-cased; anything outside ACGT
// becomes N so the seeding and alignment kernels accept the sequence.

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "m3dpim/error.hpp"

namespace m3dpim {

struct FastaRecord {
    std::string name;
    std::string sequence;
};

struct FastqRecord {
    std::string name;
    std::string sequence;
    std::string quality;
};

namespace detail {

inline char normalize_base(char c) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return (c == 'A' || c == 'C' || c == 'G' || c == 'T') ? c : 'N';
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

}  // namespace detail

inline std::vector<FastaRecord> read_fasta(std::istream& in) {
    std::vector<FastaRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        if (line.empty() || line[0] == ';') continue;
        if (line[0] == '>') {
            out.push_back({line.substr(1), {}});
            continue;
        }
        if (out.empty()) throw InputError("FASTA sequence data before the first '>' header");
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) out.back().sequence += detail::normalize_base(c);
    }
    if (out.empty()) throw InputError("no FASTA records");
    return out;
}

inline std::vector<FastaRecord> load_fasta(const std::string& path) {
    auto in = detail::open_input(path);
    return read_fasta(in);
}

inline std::vector<FastqRecord> read_fastq(std::istream& in) {
    std::vector<FastqRecord> out;
    std::string header, seq, plus, qual;
    std::size_t record = 0;
    while (std::getline(in, header)) {
        detail::strip_cr(header);
        if (header.empty()) continue;
        ++record;
        if (header[0] != '@') throw InputError("FASTQ record " + std::to_string(record) + " does not start with '@'");
        if (!std::getline(in, seq) || !std::getline(in, plus) || !std::getline(in, qual))
            throw InputError("FASTQ record " + std::to_string(record) + " is truncated");
        detail::strip_cr(seq);
        detail::strip_cr(plus);
        detail::strip_cr(qual);
        if (plus.empty() || plus[0] != '+') throw InputError("FASTQ record " + std::to_string(record) + " lacks '+' line");
        if (qual.size() != seq.size())
            throw InputError("FASTQ record " + std::to_string(record) + " quality length differs from sequence length");
        for (char& c : seq) c = detail::normalize_base(c);
        out.push_back({header.substr(1), seq, qual});
    }
    return out;
}

inline std::vector<FastqRecord> load_fastq(const std::string& path) {
    auto in = detail::open_input(path);
    return read_fastq(in);
}

inline void write_fastq(std::ostream& out, const std::vector<FastqRecord>& records) {
    for (const auto& r : records) out << '@' << r.name << '\n' << r.sequence << "\n+\n" << r.quality << '\n';
}

inline void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records, std::size_t width = 80) {
    for (const auto& r : records) {
        out << '>' << r.name << '\n';
        for (std::size_t i = 0; i < r.sequence.size(); i += width) out << r.sequence.substr(i, width) << '\n';
    }
}

}  // namespace m3dpim

#endif  // M3DPIM_IO_HPP
