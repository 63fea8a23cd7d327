#include <random>
#include <regex>

#include "doctest.h"
#include "oracles.hpp"
#include "seqforge/formats.hpp"

using namespace seqforge;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::Io;
}

const char* kRecord = R"(LOCUS       X1                        20 bp    DNA     linear   PLN 12-MAR-1993
DEFINITION  Synthetic test record for the parser,
            spanning two lines.
ACCESSION   X1 X0
SOURCE      thale cress
  ORGANISM  Arabidopsis thaliana
            Eukaryota; Viridiplantae.
REFERENCE   1  (bases 1 to 20)
  AUTHORS   Watson,J.D. and Crick,F.H.
  TITLE     Molecular structure of nucleic acids
  JOURNAL   Nature 171, 737-738 (1953)
FEATURES             Location/Qualifiers
     source          1..20
ORIGIN
        1 acgtacgtac gtacgtacgt
//
)";

} // namespace

TEST_CASE("fasta parse")
{
    auto d = parse_fasta(std::string_view(">x desc\nACGT\n"));
    REQUIRE(d.entries.size() == 1);
    CHECK(d.entries[0].id() == "x");
    CHECK(d.entries[0].description() == "desc");
    CHECK(d.entries[0].residues() == "ACGT");
    CHECK(d.entries[0].alphabet_kind() == AlphabetKind::DNA);

    d = parse_fasta(std::string_view(">a\nAC\nGT\n>b\nTTTT\n"));
    REQUIRE(d.entries.size() == 2);
    CHECK(d.entries[0].residues() == "ACGT");
    CHECK(d.entries[1].residues() == "TTTT");

    CHECK(code_of([] { parse_fasta(std::string_view("ACGT\n")); }) == ErrorCode::NoHeader);
    CHECK(code_of([] { parse_fasta(std::string_view(">a\nAC\n>a\nGT\n")); }) == ErrorCode::DuplicateId);
    CHECK(code_of([] { parse_fasta(std::string_view(">a\nAC1\n")); }) == ErrorCode::InvalidResidue);

    CHECK(parse_fasta(std::string_view(">p\nMKV\n")).entries[0].alphabet_kind() == AlphabetKind::Protein);
    CHECK(parse_fasta(std::string_view(">r\nACGU\n")).entries[0].alphabet_kind() == AlphabetKind::RNA);
}

TEST_CASE("fasta render")
{
    FastaDoc d{{make_sequence("x", AlphabetKind::DNA, "ACGT")}};
    CHECK(render_fasta(d, 2) == ">x\nAC\nGT\n");

    FastaDoc long_doc{{make_sequence("y", AlphabetKind::DNA, std::string(61, 'A'))}};
    CHECK(render_fasta(long_doc, 60) == ">y\n" + std::string(60, 'A') + "\nA\n");
}

TEST_CASE("genbank parse")
{
    auto recs = parse_genbank(std::string_view(kRecord));
    REQUIRE(recs.size() == 1);
    const auto& r = recs[0];
    CHECK(r.locus == "X1");
    CHECK(r.accession == "X1");
    CHECK(r.declared_length == 20);
    CHECK(r.definition == "Synthetic test record for the parser, spanning two lines.");
    CHECK(r.organism == "Arabidopsis thaliana");
    REQUIRE(r.references.size() == 1);
    CHECK(r.references[0].title == "Molecular structure of nucleic acids");
    CHECK(r.references[0].authors == std::vector<std::string>{"Watson,J.D.", "Crick,F.H."});
    REQUIRE(r.origin);
    CHECK(r.origin->residues() == "ACGTACGTACGTACGTACGT");
    CHECK(r.origin->size() == 20);

    auto minimal = parse_genbank(std::string_view("LOCUS X1\nACCESSION X1\nORIGIN\n        1 acgt\n//\n"));
    REQUIRE(minimal.size() == 1);
    CHECK(minimal[0].origin->residues() == "ACGT");

    CHECK(code_of([] { parse_genbank(std::string_view("LOCUS X1\nACCESSION X1\n")); }) ==
          ErrorCode::UnterminatedRecord);
    CHECK(code_of([] { parse_genbank(std::string_view("LOCUS X1\n//\n")); }) == ErrorCode::MissingAccession);
    CHECK(code_of([] { parse_genbank(std::string_view("LOCUS X1 5 bp\nACCESSION X1\nORIGIN\n 1 acgt\n//\n")); }) ==
          ErrorCode::LengthMismatch);
}

TEST_CASE("genbank render roundtrip")
{
    auto recs = parse_genbank(std::string_view(kRecord));
    auto again = parse_genbank(render_genbank(recs[0]));
    REQUIRE(again.size() == 1);
    CHECK(again[0] == recs[0]);
}

TEST_CASE("genbank origin length equals alphabetic characters")
{
    std::mt19937 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::string bases = oracle::random_string(rng, "acgt", 1 + rng() % 200);
        std::string body;
        for (std::size_t i = 0; i < bases.size(); i += 60) {
            body += std::string(9 - std::to_string(i + 1).size(), ' ') + std::to_string(i + 1);
            for (std::size_t j = i; j < std::min(bases.size(), i + 60); j += 10)
                body += " " + bases.substr(j, 10);
            body += "\n";
        }
        auto recs = parse_genbank("LOCUS T\nACCESSION T1\nORIGIN\n" + body + "//\n");
        std::size_t alpha = std::count_if(body.begin(), body.end(), [](char c) { return std::isalpha((unsigned char)c); });
        REQUIRE(recs[0].origin);
        CHECK(recs[0].origin->size() == alpha);
    }
}

TEST_CASE("prosite parse")
{
    auto p = parse_prosite("H-[FW]-x-[LIVM]-x-G-x(5)-[LV]-H-x(3)-[DE]");
    CHECK(p.elements().size() == 11);
    CHECK(p.min_span() == 17);
    CHECK(p.max_span() == 17);

    auto x = parse_prosite("x");
    REQUIRE(x.elements().size() == 1);
    CHECK(x.elements()[0].kind == MotifElement::Kind::Wildcard);

    try {
        parse_prosite("A-[");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.position() == 2);
    }
    CHECK(code_of([] { parse_prosite(""); }) == ErrorCode::EmptyPattern);
    CHECK(code_of([] { parse_prosite("[]"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse_prosite("A(0)"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("prosite scan")
{
    auto p = parse_prosite("H-[FW]-x(2)-G");
    CHECK(scan_motif(p, "HFAAG") == std::vector<MotifMatch>{{0, 5}});
    CHECK(scan_motif(p, "HYAAG").empty());

    std::regex re("H[FW]..G");
    CHECK(std::regex_match("HFAAG", re));
    CHECK(!std::regex_match("HYAAG", re));

    auto full = parse_prosite("H-[FW]-x-[LIVM]-x-G-x(5)-[LV]-H-x(3)-[DE]");
    CHECK(scan_motif(full, "HFALAGAAAAALHAAAD") == std::vector<MotifMatch>{{0, 17}});

    CHECK(code_of([&] { scan_motif(p, make_sequence("d", AlphabetKind::DNA, "ACGT")); }) == ErrorCode::WrongAlphabet);
}

TEST_CASE("prosite extensions")
{
    CHECK(scan_motif(parse_prosite("<A-C"), "ACAC") == std::vector<MotifMatch>{{0, 2}});
    CHECK(scan_motif(parse_prosite("A-C>"), "ACAC") == std::vector<MotifMatch>{{2, 4}});
    CHECK(scan_motif(parse_prosite("{C}-A"), "CAGA") == std::vector<MotifMatch>{{2, 4}});
    CHECK(scan_motif(parse_prosite("A-x(1,3)-C"), "AGGCC") == std::vector<MotifMatch>{{0, 4}});
}

TEST_CASE("properties: prosite roundtrip and oracle")
{
    std::mt19937 rng(22);
    const std::string alphabet = "ACDFGHW";
    for (int trial = 0; trial < 300; ++trial) {
        auto op = oracle::random_pattern(rng, alphabet);
        auto p = parse_prosite(op.text());
        CHECK(parse_prosite(p.canonical()) == p);

        auto s = oracle::random_string(rng, alphabet, rng() % 25);
        std::vector<MotifMatch> want;
        for (auto [b, e] : oracle::scan(op, s))
            want.push_back({b, e});
        CHECK_MESSAGE(scan_motif(p, s) == want, op.text() << " on " << s);
    }
}

TEST_CASE("properties: fasta roundtrip")
{
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        FastaDoc d;
        std::size_t n = 1 + rng() % 5;
        for (std::size_t i = 0; i < n; ++i) {
            bool protein = rng() % 2;
            std::string res = protein ? "M" + oracle::random_string(rng, "ACDEFGHIKLMNPQRSTVWY", rng() % 150)
                                      : oracle::random_string(rng, "ACGT", 1 + rng() % 150);
            std::string desc = rng() % 2 ? "entry " + std::to_string(i) + " of test" : "";
            d.entries.push_back(make_sequence("s" + std::to_string(i), protein ? AlphabetKind::Protein : AlphabetKind::DNA,
                                              res, desc));
        }
        std::size_t wrap = 1 + rng() % 80;
        CHECK(parse_fasta(render_fasta(d, wrap)) == d);
    }
}
