#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqforge/seq_core.hpp"

namespace seqforge {

// ---------------------------------------------------------------- FASTA

struct FastaDoc {
    std::vector<Sequence> entries;

    bool operator==(const FastaDoc&) const = default;
};

struct FastaOptions {
    std::optional<AlphabetKind> alphabet; // forced; auto-detected otherwise
    bool lenient = false;
};

// A residue string made only of {A,C,G,T,N,U} is nucleic (RNA when it has U
// but no T); anything else is protein.
AlphabetKind detect_alphabet(std::string_view residues);

FastaDoc parse_fasta(std::istream& in, const FastaOptions& options = {});
FastaDoc parse_fasta(std::string_view text, const FastaOptions& options = {});
std::string render_fasta(const FastaDoc& doc, std::size_t wrap = 60);

// ---------------------------------------------------------------- GenBank

struct Citation {
    std::string header; // text after the REFERENCE keyword
    std::vector<std::string> authors;
    std::string title;
    std::string journal;
    std::vector<std::string> lines; // the whole block, verbatim

    bool operator==(const Citation&) const = default;
};

struct GenBankSection {
    std::string keyword;
    std::vector<std::string> lines; // verbatim, including the keyword line

    bool operator==(const GenBankSection&) const = default;
};

struct GenBankRecord {
    std::string locus;
    std::optional<std::size_t> declared_length;
    std::string molecule; // LOCUS tokens after the length, verbatim
    std::string accession;
    std::string definition;
    std::string source;
    std::string organism;
    std::string taxonomy;
    std::vector<Citation> references;
    std::vector<GenBankSection> extras;
    std::optional<Sequence> origin;
    // Section keywords in file order; drives rendering so unknown sections
    // keep their position. Empty means canonical order.
    std::vector<std::string> layout;

    bool operator==(const GenBankRecord&) const = default;
};

std::vector<GenBankRecord> parse_genbank(std::istream& in);
std::vector<GenBankRecord> parse_genbank(std::string_view text);
std::string render_genbank(const GenBankRecord& record);

// ---------------------------------------------------------------- PROSITE

struct MotifElement {
    enum class Kind { Literal, AnySet, NoneOf, Wildcard };

    Kind kind = Kind::Wildcard;
    std::string residues; // the literal, or the set members in source order
    std::size_t min_repeat = 1;
    std::size_t max_repeat = 1;

    bool accepts(char residue) const noexcept;
    bool operator==(const MotifElement&) const = default;
};

class MotifPattern {
public:
    MotifPattern(std::string source, std::vector<MotifElement> elements, bool anchored_start, bool anchored_end);

    const std::string& source() const noexcept { return source_; }
    const std::vector<MotifElement>& elements() const noexcept { return elements_; }
    bool anchored_start() const noexcept { return anchored_start_; }
    bool anchored_end() const noexcept { return anchored_end_; }

    std::size_t min_span() const noexcept;
    std::size_t max_span() const noexcept;
    std::string canonical() const;

    // Structural equality; the source text is not compared.
    bool operator==(const MotifPattern& other) const;

private:
    std::string source_;
    std::vector<MotifElement> elements_;
    bool anchored_start_;
    bool anchored_end_;
};

MotifPattern parse_prosite(std::string_view pattern);

struct MotifMatch {
    std::size_t begin = 0;
    std::size_t end = 0; // half-open

    bool operator==(const MotifMatch&) const = default;
};

// Every start offset with a match, ascending; overlapping matches are all
// reported. When the pattern has variable-length elements the shortest match
// at each start is given.
std::vector<MotifMatch> scan_motif(const MotifPattern& pattern, const Sequence& protein);
std::vector<MotifMatch> scan_motif(const MotifPattern& pattern, std::string_view residues);

} // namespace seqforge
