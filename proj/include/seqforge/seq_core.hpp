#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqforge/error.hpp"

namespace seqforge {

enum class AlphabetKind { DNA, RNA, Protein };

std::string_view to_string(AlphabetKind kind);

// Residue alphabet. Nucleic alphabets have 4 symbols, protein has the 20
// standard one-letter codes. The wildcard (N for nucleic, X for protein) is
// not part of the strict alphabet; it only appears in sequences validated in
// lenient mode, where every IUPAC ambiguity code collapses onto it.
class Alphabet {
public:
    static const Alphabet& dna();
    static const Alphabet& rna();
    static const Alphabet& protein();
    static const Alphabet& of(AlphabetKind kind);

    AlphabetKind kind() const noexcept { return kind_; }
    std::string_view symbols() const noexcept { return symbols_; }
    char wildcard() const noexcept { return wildcard_; }
    bool is_nucleic() const noexcept { return kind_ != AlphabetKind::Protein; }

    bool contains(char upper) const noexcept;
    bool is_ambiguity_code(char upper) const noexcept;

    bool operator==(const Alphabet& other) const noexcept { return kind_ == other.kind_; }

private:
    Alphabet(AlphabetKind kind, std::string_view symbols, char wildcard, std::string_view ambiguity)
        : kind_(kind), symbols_(symbols), wildcard_(wildcard), ambiguity_(ambiguity) {}

    AlphabetKind kind_;
    std::string_view symbols_;
    char wildcard_;
    std::string_view ambiguity_;
};

// Stop symbol emitted by run-through translation.
inline constexpr char kStopSymbol = '*';

class Sequence {
public:
    Sequence(std::string id, std::string description, AlphabetKind alphabet, std::string residues);

    const std::string& id() const noexcept { return id_; }
    const std::string& description() const noexcept { return description_; }
    AlphabetKind alphabet_kind() const noexcept { return alphabet_; }
    const Alphabet& alphabet() const noexcept { return Alphabet::of(alphabet_); }
    const std::string& residues() const noexcept { return residues_; }
    std::size_t size() const noexcept { return residues_.size(); }
    char operator[](std::size_t i) const noexcept { return residues_[i]; }

    Sequence with_id(std::string id, std::string description = {}) const;

    bool operator==(const Sequence&) const = default;

private:
    std::string id_;
    std::string description_;
    AlphabetKind alphabet_;
    std::string residues_;
};

struct ValidateOptions {
    bool strip_whitespace = true;
    // Map IUPAC ambiguity codes onto the alphabet wildcard instead of failing.
    bool lenient = false;
    std::string id = "seq";
    std::string description;
};

Sequence validate(std::string_view raw, AlphabetKind alphabet, const ValidateOptions& options = {});

// Builds a sequence from residues already known to be valid (used by library
// code that derives sequences, e.g. translation products).
Sequence make_sequence(std::string id, AlphabetKind alphabet, std::string residues, std::string description = {});

char complement_base(char base) noexcept;
Sequence complement(const Sequence& s);
Sequence reverse_complement(const Sequence& s);
std::string reverse_complement(std::string_view dna);

struct ParityStats {
    std::size_t a = 0;
    std::size_t c = 0;
    std::size_t g = 0;
    std::size_t t = 0;
    std::size_t other = 0;
    double deviation_at = 0.0;
    double deviation_gc = 0.0;
};

ParityStats parity_stats(const Sequence& s);

using SymbolCounts = std::map<char, std::size_t>;

struct CompositionWindow {
    std::size_t offset = 0;
    std::size_t length = 0;
    SymbolCounts counts;
};

struct CompositionReport {
    std::size_t window = 0;
    std::size_t step = 0;
    std::vector<CompositionWindow> windows;
    SymbolCounts totals;

    double fraction(std::string_view symbols) const;
};

CompositionReport composition_windows(const Sequence& s, std::size_t window, std::size_t step,
                                      bool include_partial = false);

struct Hairpin {
    std::size_t stem_length = 0;
    std::size_t loop_begin = 0;
    std::size_t loop_end = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // outermost first

    std::size_t begin() const noexcept { return pairs.front().first; }
    std::size_t end() const noexcept { return pairs.front().second + 1; }
    std::size_t loop_length() const noexcept { return loop_end - loop_begin; }
};

struct HairpinOptions {
    std::size_t min_stem = 4;
    std::size_t min_loop = 3;
    std::size_t max_loop = 8;
};

std::vector<Hairpin> find_hairpins(const Sequence& s, const HairpinOptions& options = {});

struct Placement {
    std::size_t fragment = 0;
    std::size_t offset = 0;
};

struct Contig {
    std::string residues;
    std::vector<Placement> layout; // ordered by fragment index
};

struct Assembly {
    std::vector<Contig> contigs;

    bool connected() const noexcept { return contigs.size() == 1; }
};

Assembly assemble_fragments(const std::vector<Sequence>& fragments, std::size_t min_overlap);

} // namespace seqforge
