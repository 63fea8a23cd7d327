#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/seq_core.hpp"

namespace seqforge {

// Integer scoring with a linear gap penalty per gap symbol. Residues that
// differ but share a similarity group score `similar`. When `gap_open` is
// set the kernels switch to affine gaps: a run of L gaps costs
// gap_open + L * gap.
class ScoringScheme {
public:
    ScoringScheme(int match, int mismatch, int similar, int gap, std::vector<std::string> groups = {},
                  std::optional<int> gap_open = std::nullopt);

    // +2 / +1 / -1, gap -2, groups {DE}{KRH}{ILVM}{FYW}{ST}{NQ}{AG}.
    static ScoringScheme protein();
    // +1 / -1, gap -2, no groups.
    static ScoringScheme nucleotide();
    static ScoringScheme for_alphabet(AlphabetKind kind);

    int match() const noexcept { return match_; }
    int mismatch() const noexcept { return mismatch_; }
    int similar() const noexcept { return similar_; }
    int gap() const noexcept { return gap_; }
    std::optional<int> gap_open() const noexcept { return gap_open_; }
    bool affine() const noexcept { return gap_open_.has_value(); }
    const std::vector<std::string>& groups() const noexcept { return groups_; }

    int score(char a, char b) const noexcept { return table_[slot(a) * kSlots + slot(b)]; }
    bool same_group(char a, char b) const noexcept;

    ScoringScheme scaled(int factor) const;

private:
    static constexpr std::size_t kSlots = 32;
    static std::size_t slot(char c) noexcept
    {
        return (c >= 'A' && c <= 'Z') ? std::size_t(c - 'A') : (c == '*' ? 26 : 27);
    }

    int match_, mismatch_, similar_, gap_;
    std::vector<std::string> groups_;
    std::optional<int> gap_open_;
    std::array<int, kSlots * kSlots> table_{};
    std::array<unsigned char, kSlots> group_of_{};
};

inline constexpr char kGapSymbol = '-';

struct Alignment {
    std::string query_row;
    std::string subject_row;
    int score = 0;
    // 1-based inclusive coordinates; all zero for an empty alignment.
    std::size_t query_start = 0, query_end = 0;
    std::size_t subject_start = 0, subject_end = 0;
    std::size_t identities = 0;
    std::size_t positives = 0;
    std::size_t gaps = 0;

    std::size_t length() const noexcept { return query_row.size(); }
    bool empty() const noexcept { return query_row.empty(); }
    bool operator==(const Alignment&) const = default;
};

// Fills identity/positive/gap counts from the rows.
void count_columns(Alignment& al, const ScoringScheme& scheme);

// Both kernels keep two score rows and a 2-bit traceback per cell (4 bits in
// affine mode). Traceback prefers diagonal, then up (gap in subject), then
// left (gap in query).
Alignment needleman_wunsch(const Sequence& a, const Sequence& b, const ScoringScheme& scheme);
Alignment smith_waterman(const Sequence& a, const Sequence& b, const ScoringScheme& scheme);

Alignment needleman_wunsch(std::string_view a, std::string_view b, const ScoringScheme& scheme);
Alignment smith_waterman(std::string_view a, std::string_view b, const ScoringScheme& scheme);

// -------------------------------------------------------------- k-tuple search

struct Hsp {
    long diagonal = 0; // subject offset - query offset
    std::size_t query_offset = 0;   // 0-based start of the ungapped segment
    std::size_t subject_offset = 0;
    std::size_t ungapped_length = 0;
    int ungapped_score = 0;
    Alignment alignment; // banded Smith-Waterman re-alignment
};

struct SearchHit {
    std::size_t record = 0; // index into the database
    std::string record_id;
    Hsp hsp;
};

struct KtupOptions {
    std::size_t k = 3;
    int threshold = 0;
    std::optional<int> dropoff; // default 5 * match; nullopt disables the cut
    bool unlimited_dropoff = false;
    std::size_t band_margin = 10;
    std::size_t threads = 0; // 0 = hardware concurrency
};

std::vector<SearchHit> ktup_search(const Sequence& query, const std::vector<Sequence>& db, const ScoringScheme& scheme,
                                   const KtupOptions& options = {});

// -------------------------------------------------------------- rendering

struct RenderOptions {
    std::size_t width = 60;
};

std::string render_blast(const Alignment& al, std::string_view query_id, std::string_view subject_id,
                         const ScoringScheme& scheme, const RenderOptions& options = {});

// "Identities = a/n (p%), Positives = c/n (q%), Gaps = g/n (r%)". The Gaps
// clause is left out when there are no gaps.
std::string blast_counts_line(const Alignment& al);

// -------------------------------------------------------------- trees

struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;

    std::size_t size() const noexcept { return labels.size(); }
};

DistanceMatrix distance_matrix(const std::vector<Sequence>& seqs, const ScoringScheme& scheme);
std::string render_distance_tsv(const DistanceMatrix& m);
DistanceMatrix parse_distance_tsv(std::string_view text);

struct TreeNode {
    std::string label;          // leaves only
    std::vector<std::size_t> children;
    double height = 0.0;        // distance from the leaves
    double branch_length = 0.0; // to the parent; 0 at the root
};

struct Tree {
    std::vector<TreeNode> nodes;
    std::size_t root = 0;

    std::string newick() const;
    // Root-to-leaf path lengths, one per leaf in node order.
    std::vector<double> leaf_depths() const;
};

Tree upgma(const DistanceMatrix& m);

} // namespace seqforge
