#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/seq_core.hpp"

namespace seqforge {

// The standard genetic code. Codons are read over {A,C,G,U}; T is accepted
// and read as U so DNA never needs an explicit transcription copy.
class CodonTable {
public:
    static const CodonTable& standard();

    // Amino-acid letter, or kStopSymbol; 'X' for codons with a non-ACGTU base.
    char translate(char b1, char b2, char b3) const noexcept;
    char translate(std::string_view codon) const noexcept;
    bool is_stop(std::string_view codon) const noexcept { return translate(codon) == kStopSymbol; }
    bool is_start(std::string_view codon) const noexcept;

    // All 64 codons (RNA spelling) with their product, in UCAG order.
    std::map<std::string, char> entries() const;

private:
    explicit CodonTable(std::string_view amino_acids) : amino_acids_(amino_acids) {}
    std::string_view amino_acids_;
};

enum class StopPolicy { RunThrough, HaltAtStop };

Sequence transcribe(const Sequence& dna);

Sequence translate(const Sequence& s, std::size_t frame_offset = 0, StopPolicy policy = StopPolicy::RunThrough);

// Frames +1..+3 read the input at offsets 0..2; -1..-3 read its reverse
// complement at offsets 0..2.
std::map<int, Sequence> six_frame(const Sequence& dna);

struct Orf {
    int frame = 1;
    // Half-open, forward-strand coordinates from the start codon through the
    // last sense codon; the stop codon is excluded.
    std::size_t begin = 0;
    std::size_t end = 0;
    bool has_stop = true;
    Sequence peptide;

    std::size_t length() const noexcept { return end - begin; }
};

struct OrfOptions {
    std::size_t min_length = 1; // residues, stop excluded
    bool nested = false;        // also report in-frame ATGs inside an ORF
    bool open_ended = false;    // keep ORFs running off the 3' end
};

// Sorted by frame (+1, +2, +3, -1, -2, -3) then by forward-strand begin.
std::vector<Orf> find_orfs(const Sequence& dna, const OrfOptions& options = {});

int frame_rank(int frame) noexcept;

struct SpliceCandidate {
    std::size_t donor = 0;    // index of the G of GT
    std::size_t acceptor = 0; // index of the A of AG
    std::size_t span() const noexcept { return acceptor + 2 - donor; }
};

struct SpliceOptions {
    std::size_t min_intron = 20;
    std::size_t max_intron = 10000;
};

std::vector<SpliceCandidate> splice_candidates(const Sequence& dna, const SpliceOptions& options = {});

} // namespace seqforge
