#ifndef M3DPIM_SEED_HPP
#define M3DPIM_SEED_HPP

// Two-stage k-mer index. PTR is a direct-address prefix-sum table with one
// slot per possible k-mer; CAL holds the reference positions of every k-mer,
// grouped by k-mer and ascending within a group.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "m3dpim/error.hpp"

namespace m3dpim {

inline constexpr std::size_t kMinK = 4;
inline constexpr std::size_t kMaxK = 15;

// A=0 C=1 G=2 T=3; anything else (N) is -1.
constexpr int encode_base(char c) noexcept {
    switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
    }
}

inline std::optional<std::uint64_t> encode_kmer(std::string_view s) {
    std::uint64_t code = 0;
    for (char c : s) {
        const int b = encode_base(c);
        if (b < 0) return std::nullopt;
        code = (code << 2) | static_cast<std::uint64_t>(b);
    }
    return code;
}

inline std::string decode_kmer(std::uint64_t code, std::size_t k) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::string s(k, 'A');
    for (std::size_t i = 0; i < k; ++i) s[k - 1 - i] = kBases[(code >> (2 * i)) & 3u];
    return s;
}

struct SeedIndex {
    std::size_t k = 0;
    std::uint64_t reference_length = 0;
    std::vector<std::uint64_t> ptr;
    std::vector<std::uint32_t> cal;

    std::uint64_t groups() const noexcept { return std::uint64_t{1} << (2 * k); }

    std::uint64_t group_size(std::uint64_t g) const noexcept { return ptr[g + 1] - ptr[g]; }

    // Structural invariants. The content check against a reference is
    // validate_against().
    void validate() const {
        if (k < kMinK || k > kMaxK) throw InputError("index k=" + std::to_string(k) + " outside [4, 15]");
        if (ptr.size() != groups() + 1) throw InputError("PTR table has the wrong number of slots");
        if (ptr.front() != 0) throw InputError("PTR table does not start at 0");
        if (ptr.back() != cal.size()) throw InputError("PTR table does not end at the CAL length");
        for (std::uint64_t g = 0; g < groups(); ++g) {
            if (ptr[g + 1] < ptr[g]) throw InputError("PTR table is not nondecreasing");
            for (std::uint64_t p = ptr[g]; p < ptr[g + 1]; ++p) {
                if (cal[p] + k > reference_length) throw InputError("CAL position past the reference end");
                if (p > ptr[g] && cal[p] <= cal[p - 1]) throw InputError("CAL group not strictly ascending");
            }
        }
    }

    void validate_against(std::string_view reference) const {
        validate();
        if (reference.size() != reference_length) throw InputError("reference length does not match the index");
        for (std::uint64_t g = 0; g < groups(); ++g)
            for (std::uint64_t p = ptr[g]; p < ptr[g + 1]; ++p)
                if (encode_kmer(reference.substr(cal[p], k)) != g)
                    throw InputError("CAL position " + std::to_string(cal[p]) + " does not hold its k-mer");
    }
};

namespace detail {

// Calls f(position, code) for every k-mer without an N, left to right.
template <typename F>
void for_each_kmer(std::string_view s, std::size_t k, F&& f) {
    if (s.size() < k) return;
    const std::uint64_t mask = (std::uint64_t{1} << (2 * k)) - 1;
    std::uint64_t code = 0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int b = encode_base(s[i]);
        if (b < 0) {
            valid = 0;
            code = 0;
            continue;
        }
        code = ((code << 2) | static_cast<std::uint64_t>(b)) & mask;
        if (++valid >= k) f(i + 1 - k, code);
    }
}

}  // namespace detail

inline SeedIndex build_index(std::string_view reference, std::size_t k) {
    if (k < kMinK || k > kMaxK)
        throw ConfigError("k-mer length " + std::to_string(k) + " outside [4, 15]");
    if (reference.size() > UINT32_MAX) throw InputError("reference longer than 2^32 bases");
    SeedIndex idx;
    idx.k = k;
    idx.reference_length = reference.size();
    idx.ptr.assign(idx.groups() + 1, 0);
    detail::for_each_kmer(reference, k, [&](std::size_t, std::uint64_t code) { ++idx.ptr[code + 1]; });
    for (std::uint64_t g = 0; g < idx.groups(); ++g) idx.ptr[g + 1] += idx.ptr[g];
    idx.cal.resize(idx.ptr.back());
    std::vector<std::uint64_t> fill(idx.ptr.begin(), idx.ptr.end() - 1);
    detail::for_each_kmer(reference, k, [&](std::size_t pos, std::uint64_t code) {
        idx.cal[fill[code]++] = static_cast<std::uint32_t>(pos);
    });
    return idx;
}

// PTR slot read, then the CAL range it points at.
inline std::span<const std::uint32_t> lookup(const SeedIndex& index, std::uint64_t kmer) {
    if (kmer >= index.groups()) return {};
    const std::uint64_t lo = index.ptr[kmer], hi = index.ptr[kmer + 1];
    return std::span<const std::uint32_t>(index.cal).subspan(lo, hi - lo);
}

inline std::vector<std::uint32_t> lookup(const SeedIndex& index, std::string_view kmer) {
    if (kmer.size() != index.k) throw InputError("k-mer length does not match the index");
    const auto code = encode_kmer(kmer);
    if (!code) return {};
    auto hits = lookup(index, *code);
    return {hits.begin(), hits.end()};
}

// Linear scan for every occurrence of `kmer`.
inline std::vector<std::uint32_t> brute_force_matches(std::string_view reference, std::string_view kmer) {
    std::vector<std::uint32_t> out;
    if (kmer.empty() || kmer.size() > reference.size()) return out;
    if (kmer.find('N') != std::string_view::npos) return out;
    for (std::size_t p = 0; p + kmer.size() <= reference.size(); ++p)
        if (reference.compare(p, kmer.size(), kmer) == 0) out.push_back(static_cast<std::uint32_t>(p));
    return out;
}

struct Candidate {
    std::uint32_t reference_position = 0;
    std::uint32_t vote_count = 0;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct SeedParams {
    std::size_t stride = 1;
    std::uint32_t min_votes = 1;
    std::size_t max_candidates = 4;
    // Projections within +-window of a bin's first position join that bin.
    std::uint32_t window = 0;
    // Groups with more hits than this are skipped.
    std::size_t max_group = 500;

    void validate() const {
        if (stride == 0) throw ConfigError("seed stride must be at least 1");
        if (max_candidates == 0) throw ConfigError("max_candidates must be at least 1");
    }
};

// Lookup events as seen by a search PE: one per sampled k-mer without an N.
struct SeedLookupEvent {
    std::uint64_t kmer = 0;
    std::uint64_t ptr_slot = 0;
    std::uint64_t cal_begin = 0;
    std::uint64_t hits = 0;
    bool skipped = false;
};

struct NullSeedObserver {
    void operator()(const SeedLookupEvent&) const noexcept {}
};

template <typename Observer = NullSeedObserver>
std::vector<Candidate> seed_read(const SeedIndex& index, std::string_view read, const SeedParams& params,
                                 Observer&& observer = Observer{}) {
    params.validate();
    if (read.size() < index.k)
        throw InputError("read of length " + std::to_string(read.size()) + " is shorter than k=" +
                         std::to_string(index.k));
    std::vector<std::uint32_t> projections;
    detail::for_each_kmer(read, index.k, [&](std::size_t offset, std::uint64_t code) {
        if (offset % params.stride != 0) return;
        const std::uint64_t lo = index.ptr[code], hi = index.ptr[code + 1];
        SeedLookupEvent ev{code, code, lo, hi - lo, hi - lo > params.max_group};
        observer(static_cast<const SeedLookupEvent&>(ev));
        if (ev.skipped) return;
        for (std::uint64_t p = lo; p < hi; ++p)
            if (index.cal[p] >= offset) projections.push_back(index.cal[p] - static_cast<std::uint32_t>(offset));
    });
    std::sort(projections.begin(), projections.end());

    std::vector<Candidate> bins;
    for (std::size_t i = 0; i < projections.size();) {
        std::size_t j = i;
        const std::uint32_t first = projections[i];
        // Within the bin, report the most supported exact position.
        std::uint32_t best_pos = first, best_votes = 0, run_votes = 0;
        std::uint32_t run_pos = first;
        while (j < projections.size() && projections[j] - first <= params.window) {
            if (projections[j] != run_pos) {
                run_pos = projections[j];
                run_votes = 0;
            }
            if (++run_votes > best_votes) {
                best_votes = run_votes;
                best_pos = run_pos;
            }
            ++j;
        }
        const auto votes = static_cast<std::uint32_t>(j - i);
        if (votes >= params.min_votes) bins.push_back({best_pos, votes});
        i = j;
    }
    std::sort(bins.begin(), bins.end(), [](const Candidate& a, const Candidate& b) {
        return a.vote_count != b.vote_count ? a.vote_count > b.vote_count
                                            : a.reference_position < b.reference_position;
    });
    if (bins.size() > params.max_candidates) bins.resize(params.max_candidates);
    return bins;
}

// Bytes needed by a direct-address index over `reference_length` bases when
// every position contributes one CAL entry.
constexpr std::uint64_t index_footprint_bytes(std::size_t k, std::uint64_t reference_length,
                                              std::uint64_t ptr_entry_bytes = 8,
                                              std::uint64_t cal_entry_bytes = 4) noexcept {
    return ((std::uint64_t{1} << (2 * k)) + 1) * ptr_entry_bytes + reference_length * cal_entry_bytes;
}

// Binary layout: 8-byte magic, k (u32), reference_length (u64), then the PTR
// table (u64 each) and the CAL array (u32 each), all little-endian.
inline constexpr std::array<char, 8> kIndexMagic = {'M', '3', 'D', 'S', 'E', 'E', 'D', '1'};

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw InputError("index file is truncated");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return static_cast<T>(v);
}

}  // namespace detail

inline void write_index(std::ostream& out, const SeedIndex& index) {
    out.write(kIndexMagic.data(), kIndexMagic.size());
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.k));
    detail::put_le<std::uint64_t>(out, index.reference_length);
    for (std::uint64_t v : index.ptr) detail::put_le<std::uint64_t>(out, v);
    for (std::uint32_t v : index.cal) detail::put_le<std::uint32_t>(out, v);
}

inline SeedIndex read_index(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kIndexMagic) throw InputError("not a seed index file");
    SeedIndex idx;
    idx.k = detail::get_le<std::uint32_t>(in);
    if (idx.k < kMinK || idx.k > kMaxK) throw InputError("index k=" + std::to_string(idx.k) + " outside [4, 15]");
    idx.reference_length = detail::get_le<std::uint64_t>(in);
    idx.ptr.resize(idx.groups() + 1);
    for (auto& v : idx.ptr) v = detail::get_le<std::uint64_t>(in);
    if (idx.ptr.back() > idx.reference_length) throw InputError("CAL length exceeds the reference length");
    idx.cal.resize(idx.ptr.back());
    for (auto& v : idx.cal) v = detail::get_le<std::uint32_t>(in);
    idx.validate();
    return idx;
}

inline void save_index(const std::string& path, const SeedIndex& index) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_index(out, index);
    if (!out) throw IoError("failed writing " + path);
}

inline SeedIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_index(in);
}

}  // namespace m3dpim

#endif  // M3DPIM_SEED_HPP
