#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "seqforge/genes.hpp"

using namespace seqforge;

namespace {

Sequence dna(std::string_view s) { return validate(s, AlphabetKind::DNA); }

std::vector<oracle::OrfSpan> as_spans(const std::vector<Orf>& orfs)
{
    std::vector<oracle::OrfSpan> out;
    for (const auto& o : orfs)
        out.push_back({o.frame, o.begin, o.end, o.has_stop, o.peptide.residues()});
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("codon table")
{
    const auto& t = CodonTable::standard();
    auto entries = t.entries();
    CHECK(entries.size() == 64);

    std::set<std::string> serine, stops;
    for (auto& [codon, aa] : entries) {
        if (aa == 'S')
            serine.insert(codon);
        if (aa == kStopSymbol)
            stops.insert(codon);
    }
    CHECK(serine == std::set<std::string>{"UCU", "UCC", "UCA", "UCG", "AGU", "AGC"});
    CHECK(stops == std::set<std::string>{"UAA", "UAG", "UGA"});
    CHECK(t.translate("AUG") == 'M');
    CHECK(t.translate("ATG") == 'M');
    CHECK(t.is_start("ATG"));

    // Codons that appear in the worked translation examples.
    const std::pair<const char*, char> pinned[] = {
        {"UUU", 'F'}, {"UUC", 'F'}, {"UCA", 'S'}, {"AGC", 'S'}, {"UUA", 'L'}, {"CUC", 'L'}, {"GUU", 'V'},
        {"GUG", 'V'}, {"GGA", 'G'}, {"GGG", 'G'}, {"GAU", 'D'}, {"GAC", 'D'}, {"AAA", 'K'}, {"AAG", 'K'},
    };
    for (auto [codon, aa] : pinned)
        CHECK_MESSAGE(t.translate(codon) == aa, codon);
}

TEST_CASE("transcribe")
{
    CHECK(transcribe(dna("ACGT")).residues() == "ACGU");
    CHECK(transcribe(dna("TTTT")).residues() == "UUUU");
    CHECK(transcribe(dna("TTTTCATTAGTTGGAGATAAA")).residues() == "UUUUCAUUAGUUGGAGAUAAA");
    CHECK(transcribe(dna("ACGT")).alphabet_kind() == AlphabetKind::RNA);
}

TEST_CASE("translate")
{
    CHECK(translate(dna("TTTTCATTAGTTGGAGATAAA")).residues() == "FSLVGDK");
    CHECK(translate(dna("TTCAGCCTCGTGGGGGACAAG")).residues() == "FSLVGDK");
    CHECK(translate(dna("TTTTCATTAGTTGGAGTTAAA")).residues() == "FSLVGVK");
    CHECK(translate(transcribe(dna("TTTTCATTAGTTGGAGATAAA"))).residues() == "FSLVGDK");

    for (const char* codon : {"TCT", "TCC", "TCA", "TCG", "AGT", "AGC"})
        CHECK(translate(dna(codon)).residues() == "S");

    CHECK(translate(dna("ATGTAAGGG")).residues() == "M*G");
    CHECK(translate(dna("ATGTAAGGG"), 0, StopPolicy::HaltAtStop).residues() == "M");
    CHECK(translate(dna("AATGAAA"), 1).residues() == "MK");
    CHECK_THROWS_WITH_AS(translate(dna("ACGT"), 2), doctest::Contains("shorter than one codon"), Error);
}

TEST_CASE("six frame")
{
    auto f = six_frame(dna("ATGAAA"));
    CHECK(f.size() == 6);
    CHECK(f.at(1).residues() == "MK");
    CHECK(f.at(-1).residues() == "FH");
}

TEST_CASE("orfs")
{
    auto o = find_orfs(dna("CCATGAAATAGCC"));
    REQUIRE(o.size() == 1);
    CHECK(o[0].frame == 3);
    CHECK(o[0].begin == 2);
    CHECK(o[0].end == 8);
    CHECK(o[0].peptide.residues() == "MK");

    o = find_orfs(dna("ATGTAG"));
    REQUIRE(o.size() == 1);
    CHECK(o[0].peptide.residues() == "M");

    CHECK(find_orfs(dna("AAACCC")).empty());

    // reverse strand: revcomp of CTACAT is ATGTAG
    o = find_orfs(dna("CTACAT"));
    REQUIRE(o.size() == 1);
    CHECK(o[0].frame == -1);
    CHECK(o[0].begin == 3);
    CHECK(o[0].end == 6);

    OrfOptions open;
    open.open_ended = true;
    o = find_orfs(dna("ATGAAAAA"), open);
    REQUIRE(o.size() == 1);
    CHECK(!o[0].has_stop);
    CHECK(o[0].end == 6);

    OrfOptions nested;
    nested.nested = true;
    CHECK(find_orfs(dna("ATGATGTAG")).size() == 1);
    CHECK(find_orfs(dna("ATGATGTAG"), nested).size() == 2);
}

TEST_CASE("splice candidates")
{
    auto c = splice_candidates(dna("AAGTAAAGCC"), {4, 10000});
    REQUIRE(c.size() == 1);
    CHECK(c[0].donor == 2);
    CHECK(c[0].acceptor == 6);
    CHECK(c[0].span() == 6);

    c = splice_candidates(dna("GTAG"), {4, 10000});
    REQUIRE(c.size() == 1);
    CHECK(c[0].donor == 0);
    CHECK(c[0].acceptor == 2);

    CHECK(splice_candidates(dna("AAAA")).empty());
    CHECK(splice_candidates(dna("GTAG")).empty());
}

TEST_CASE("properties: translation")
{
    std::mt19937 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        auto s = dna(oracle::random_string(rng, "ACGT", 5 + rng() % 90));
        for (std::size_t off = 0; off < 3; ++off)
            CHECK(translate(s, off).size() == (s.size() - off) / 3);

        auto fwd = six_frame(s);
        auto rev = six_frame(reverse_complement(s));
        for (int k = 1; k <= 3; ++k)
            CHECK(fwd.at(-k).residues() == rev.at(k).residues());
    }
}

TEST_CASE("properties: orfs")
{
    std::mt19937 rng(32);
    const auto& table = CodonTable::standard();
    for (int trial = 0; trial < 300; ++trial) {
        auto s = dna(oracle::random_string(rng, "ACGT", rng() % 90 + 3));
        OrfOptions opt;
        opt.min_length = 1 + rng() % 3;
        opt.nested = rng() % 2;
        opt.open_ended = rng() % 2;
        auto orfs = find_orfs(s, opt);
        for (const auto& o : orfs) {
            CHECK(o.length() % 3 == 0);
            std::string strand = o.frame > 0 ? s.residues().substr(o.begin, o.length())
                                             : reverse_complement(std::string_view(s.residues()).substr(o.begin, o.length()));
            CHECK(strand.substr(0, 3) == "ATG");
            CHECK(translate(dna(strand)).residues() == o.peptide.residues());
            CHECK(o.peptide.residues().find(kStopSymbol) == std::string::npos);
            if (o.has_stop) {
                std::string next = o.frame > 0 ? s.residues().substr(o.end, 3)
                                               : reverse_complement(std::string_view(s.residues()).substr(o.begin - 3, 3));
                CHECK(table.is_stop(next));
            }
        }
        for (std::size_t i = 1; i < orfs.size(); ++i) {
            auto key = [](const Orf& o) { return std::make_pair(frame_rank(o.frame), o.begin); };
            CHECK(key(orfs[i - 1]) <= key(orfs[i]));
        }
        CHECK(as_spans(orfs) == oracle::orfs(s.residues(), opt.min_length, opt.nested, opt.open_ended));
    }
}

TEST_CASE("properties: splice")
{
    std::mt19937 rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = dna(oracle::random_string(rng, "ACGT", 4 + rng() % 80));
        SpliceOptions opt{4 + rng() % 20, 30 + rng() % 50};
        for (const auto& c : splice_candidates(s, opt)) {
            CHECK(s.residues().substr(c.donor, 2) == "GT");
            CHECK(s.residues().substr(c.acceptor, 2) == "AG");
            CHECK(c.acceptor > c.donor);
            CHECK(c.span() >= opt.min_intron);
            CHECK(c.span() <= opt.max_intron);
        }
    }
}
