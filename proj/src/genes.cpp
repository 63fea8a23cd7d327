#include "seqforge/genes.hpp"

#include <algorithm>
#include <tuple>

namespace seqforge {

namespace {

// Index order U(T), C, A, G for each codon position.
int base_index(char b) noexcept
{
    switch (b) {
    case 'U': case 'T': return 0;
    case 'C': return 1;
    case 'A': return 2;
    case 'G': return 3;
    default: return -1;
    }
}

constexpr std::string_view kStandardCode =
    "FFLLSSSSYY**CC*W"
    "LLLLPPPPHHQQRRRR"
    "IIIMTTTTNNKKSSRR"
    "VVVVAAAADDEEGGGG";

constexpr std::string_view kBases = "UCAG";

} // namespace

const CodonTable& CodonTable::standard()
{
    static const CodonTable table(kStandardCode);
    return table;
}

char CodonTable::translate(char b1, char b2, char b3) const noexcept
{
    int i = base_index(b1), j = base_index(b2), k = base_index(b3);
    if (i < 0 || j < 0 || k < 0)
        return 'X';
    return amino_acids_[std::size_t(i * 16 + j * 4 + k)];
}

char CodonTable::translate(std::string_view codon) const noexcept
{
    return codon.size() == 3 ? translate(codon[0], codon[1], codon[2]) : 'X';
}

bool CodonTable::is_start(std::string_view codon) const noexcept
{
    return codon.size() == 3 && codon[0] == 'A' && (codon[1] == 'T' || codon[1] == 'U') && codon[2] == 'G';
}

std::map<std::string, char> CodonTable::entries() const
{
    std::map<std::string, char> out;
    for (char a : kBases)
        for (char b : kBases)
            for (char c : kBases)
                out[std::string{a, b, c}] = translate(a, b, c);
    return out;
}

Sequence transcribe(const Sequence& dna)
{
    if (dna.alphabet_kind() != AlphabetKind::DNA)
        throw Error(ErrorCode::WrongAlphabet, "transcription requires DNA");
    std::string r = dna.residues();
    std::replace(r.begin(), r.end(), 'T', 'U');
    return Sequence(dna.id(), dna.description(), AlphabetKind::RNA, std::move(r));
}

Sequence translate(const Sequence& s, std::size_t frame_offset, StopPolicy policy)
{
    if (!s.alphabet().is_nucleic())
        throw Error(ErrorCode::WrongAlphabet, "translation requires a nucleic-acid sequence");
    if (frame_offset > 2)
        throw Error(ErrorCode::InvalidArgument, "frame offset must be 0, 1 or 2");
    if (s.size() < frame_offset + 3)
        throw Error(ErrorCode::TooShort, "sequence '" + s.id() + "' is shorter than one codon at offset " +
                                             std::to_string(frame_offset));
    const CodonTable& code = CodonTable::standard();
    const std::string& r = s.residues();
    std::string peptide;
    peptide.reserve((r.size() - frame_offset) / 3);
    for (std::size_t i = frame_offset; i + 3 <= r.size(); i += 3) {
        char aa = code.translate(r[i], r[i + 1], r[i + 2]);
        if (aa == kStopSymbol && policy == StopPolicy::HaltAtStop)
            break;
        peptide.push_back(aa);
    }
    return Sequence(s.id(), s.description(), AlphabetKind::Protein, std::move(peptide));
}

std::map<int, Sequence> six_frame(const Sequence& dna)
{
    if (dna.alphabet_kind() != AlphabetKind::DNA)
        throw Error(ErrorCode::WrongAlphabet, "six-frame translation requires DNA");
    if (dna.size() < 3)
        throw Error(ErrorCode::TooShort, "sequence '" + dna.id() + "' is shorter than one codon");
    std::map<int, Sequence> frames;
    Sequence rc = reverse_complement(dna);
    for (int k = 0; k < 3; ++k) {
        if (dna.size() < std::size_t(k) + 3)
            break;
        frames.emplace(k + 1, translate(dna, std::size_t(k)).with_id(dna.id() + "_f" + std::to_string(k + 1)));
        frames.emplace(-(k + 1), translate(rc, std::size_t(k)).with_id(dna.id() + "_r" + std::to_string(k + 1)));
    }
    return frames;
}

int frame_rank(int frame) noexcept
{
    return frame > 0 ? frame : 3 - frame;
}

std::vector<Orf> find_orfs(const Sequence& dna, const OrfOptions& options)
{
    if (dna.alphabet_kind() != AlphabetKind::DNA)
        throw Error(ErrorCode::WrongAlphabet, "ORF finding requires DNA");
    if (options.min_length == 0)
        throw Error(ErrorCode::InvalidArgument, "minimum ORF length must be at least 1");

    const CodonTable& code = CodonTable::standard();
    const std::size_t n = dna.size();
    const std::string forward = dna.residues();
    const std::string reverse = reverse_complement(std::string_view(forward));
    std::vector<Orf> orfs;

    auto emit = [&](int frame, const std::string& strand, std::size_t start, std::size_t stop, bool has_stop) {
        std::size_t codons = (stop - start) / 3;
        if (codons < options.min_length)
            return;
        std::string peptide;
        peptide.reserve(codons);
        for (std::size_t i = start; i < stop; i += 3)
            peptide.push_back(code.translate(strand[i], strand[i + 1], strand[i + 2]));
        Orf orf{frame, 0, 0, has_stop,
                Sequence(dna.id() + "_orf", {}, AlphabetKind::Protein, std::move(peptide))};
        if (frame > 0) {
            orf.begin = start;
            orf.end = stop;
        } else {
            orf.begin = n - stop;
            orf.end = n - start;
        }
        orfs.push_back(std::move(orf));
    };

    for (int strand_sign : {1, -1}) {
        const std::string& s = strand_sign > 0 ? forward : reverse;
        for (std::size_t offset = 0; offset < 3; ++offset) {
            int frame = strand_sign * int(offset + 1);
            std::vector<std::size_t> open; // start-codon positions awaiting a stop
            std::size_t i = offset;
            for (; i + 3 <= n; i += 3) {
                std::string_view codon(s.data() + i, 3);
                if (code.is_stop(codon)) {
                    for (std::size_t start : open)
                        emit(frame, s, start, i, true);
                    open.clear();
                } else if (code.is_start(codon) && (open.empty() || options.nested)) {
                    open.push_back(i);
                }
            }
            if (options.open_ended)
                for (std::size_t start : open)
                    emit(frame, s, start, i, false);
        }
    }

    std::stable_sort(orfs.begin(), orfs.end(), [](const Orf& a, const Orf& b) {
        return std::tuple(frame_rank(a.frame), a.begin, b.end) < std::tuple(frame_rank(b.frame), b.begin, a.end);
    });
    return orfs;
}

std::vector<SpliceCandidate> splice_candidates(const Sequence& dna, const SpliceOptions& options)
{
    if (dna.alphabet_kind() != AlphabetKind::DNA)
        throw Error(ErrorCode::WrongAlphabet, "splice scanning requires DNA");
    if (options.min_intron < 4)
        throw Error(ErrorCode::InvalidArgument, "minimum intron length must be at least 4");
    if (options.max_intron < options.min_intron)
        throw Error(ErrorCode::InvalidArgument, "maximum intron length is below the minimum");

    const std::string& r = dna.residues();
    std::vector<std::size_t> acceptors;
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (r[i] == 'A' && r[i + 1] == 'G')
            acceptors.push_back(i);

    std::vector<SpliceCandidate> out;
    for (std::size_t d = 0; d + 1 < r.size(); ++d) {
        if (r[d] != 'G' || r[d + 1] != 'T')
            continue;
        // span = acceptor + 2 - donor
        std::size_t lo = d + options.min_intron - 2;
        auto it = std::lower_bound(acceptors.begin(), acceptors.end(), lo);
        for (; it != acceptors.end(); ++it) {
            SpliceCandidate c{d, *it};
            if (c.span() > options.max_intron)
                break;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace seqforge
