#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "seqforge/pmf.hpp"

using namespace seqforge;

namespace {

Sequence protein(std::string_view s, std::string id = "p") { return validate(s, AlphabetKind::Protein, {true, false, id, ""}); }

std::vector<std::string> residues_of(const std::vector<Sequence>& v)
{
    std::vector<std::string> out;
    for (const auto& s : v)
        out.push_back(s.residues());
    return out;
}

} // namespace

TEST_CASE("digest rules")
{
    auto t = find_digest_rule("trypsin");
    CHECK(t.cleave_after == "KR");
    CHECK(t.blocked_by_next == "P");
    CHECK(t.cleaves('K', 'A'));
    CHECK(!t.cleaves('R', 'P'));
    CHECK(bundled_digest_rules().size() == 4);
    CHECK_THROWS_AS(find_digest_rule("pepsin"), Error);
    CHECK(parse_digest_rules("x\tK\t-\n")[0].blocked_by_next.empty());
}

TEST_CASE("digest")
{
    auto trypsin = find_digest_rule("trypsin");
    CHECK(residues_of(digest(protein("AKRPGK"), trypsin)) == std::vector<std::string>{"AK", "RPGK"});
    CHECK(residues_of(digest(protein("GGGG"), trypsin)) == std::vector<std::string>{"GGGG"});
    CHECK(residues_of(digest(protein("AKRPGK"), find_digest_rule("trypsin", 1))) ==
          std::vector<std::string>{"AK", "RPGK", "AKRPGK"});
    CHECK(residues_of(digest(protein("AKCKDK"), find_digest_rule("trypsin", 2))) ==
          std::vector<std::string>{"AK", "CK", "DK", "AKCK", "CKDK", "AKCKDK"});
    CHECK(digest(protein("AKRPGK"), trypsin)[0].id() == "p_1-2");
    CHECK_THROWS_AS(digest(validate("ACGT", AlphabetKind::DNA), trypsin), Error);
}

TEST_CASE("masses")
{
    CHECK(peptide_mass("G") == doctest::Approx(75.03202).epsilon(1e-9));
    const auto& t = MassTable::monoisotopic();
    CHECK(t.water() == doctest::Approx(oracle::formula_mass({0, 2, 0, 1, 0})).epsilon(1e-6));
    for (auto [res, f] : oracle::kResidueFormula)
        CHECK_MESSAGE(t.without_modifications().residue_mass(res) == doctest::Approx(oracle::formula_mass(f)).epsilon(1e-6), res);
    CHECK(t.residue_mass('C') == doctest::Approx(103.00919 + 57.02146));
    CHECK(t.without_modifications().residue_mass('C') == doctest::Approx(103.00919));

    try {
        peptide_mass("");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySequence);
    }
    try {
        peptide_mass("GZ");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownResidue);
    }
}

TEST_CASE("mass table parsing")
{
    auto t = MassTable::parse("water\t18\nmod\tox\tM\t16\n" + [] {
        std::string s;
        for (char c : Alphabet::protein().symbols())
            s += std::string(1, c) + "\t100\n";
        return s;
    }());
    CHECK(t.residue_mass('M') == 116.0);
    CHECK(peptide_mass("GG", t) == 218.0);
    CHECK_THROWS_AS(MassTable::parse("water\t18\nG\t57\n"), Error);
}

TEST_CASE("fingerprint")
{
    Fingerprint f({300.0, 100.0, 200.0}, 0.5);
    CHECK(f.peaks() == std::vector<double>{100.0, 200.0, 300.0});
    CHECK(f.window(1000.0) == 0.5);
    Fingerprint ppm({1000.0}, 10, ToleranceUnit::Ppm);
    CHECK(ppm.window(1000.0) == doctest::Approx(0.01));
    CHECK_THROWS_AS(Fingerprint({100.0}, 0.0), Error);
    CHECK(parse_peak_list("# peaks\n100.5\n\n200.25\n") == std::vector<double>{100.5, 200.25});
    CHECK(count_matches(f, {100.2, 100.3, 250.0}) == 1);
    CHECK(count_matches(f, {100.2, 199.9, 300.4}) == 3);
}

TEST_CASE("identify")
{
    auto trypsin = find_digest_rule("trypsin");
    std::vector<PmfEntry> db{{"P1", protein("GGGG", "P1")}, {"P2", protein("KAAAK", "P2")}};
    Fingerprint f({peptide_mass("AAAK")}, 0.01);
    auto hits = identify(f, db, trypsin);
    REQUIRE(!hits.empty());
    CHECK(hits[0].accession == "P2");
    CHECK(hits[0].matched == 1);

    auto self = protein("MKWVTFISLLLLFSSAYSRGVFRRDTHK", "S");
    std::vector<double> peaks;
    for (const auto& pep : oracle::tryptic(self.residues()))
        peaks.push_back(oracle::peptide_mass(pep));
    auto h = identify(Fingerprint(peaks, 0.01), {{"S", self}, {"D", protein("GGGGGGGGGGGG", "D")}}, trypsin);
    CHECK(h[0].accession == "S");
    CHECK(h[0].score == doctest::Approx(1.0));

    auto tsv = render_pmf_tsv(hits);
    CHECK(tsv.rfind("rank\taccession\tmatched\ttotal\tscore\n1\tP2\t1\t1\t", 0) == 0);
    CHECK_THROWS_AS(identify(f, {}, trypsin), Error);
}

TEST_CASE("properties: digest and masses")
{
    std::mt19937 rng(61);
    const std::string aa = "ACDEFGHIKLMNPQRSTVWY";
    auto trypsin = find_digest_rule("trypsin");
    for (int trial = 0; trial < 300; ++trial) {
        auto p = protein(oracle::random_string(rng, aa, 1 + rng() % 80));
        auto base = digest(p, trypsin);
        std::string joined;
        for (const auto& s : base)
            joined += s.residues();
        CHECK(joined == p.residues());
        CHECK(residues_of(base) == oracle::tryptic(p.residues()));

        for (const auto& s : base)
            // table masses carry 5 decimals
            CHECK(std::abs(peptide_mass(s) - oracle::peptide_mass(s.residues())) <= 6e-6 * double(s.size() + 1));

        auto x = oracle::random_string(rng, aa, 1 + rng() % 20), y = oracle::random_string(rng, aa, 1 + rng() % 20);
        CHECK(std::abs(peptide_mass(x + y) - (peptide_mass(x) + peptide_mass(y) - MassTable::monoisotopic().water())) < 1e-6);

        std::size_t m = rng() % 3;
        auto all = digest(p, find_digest_rule("trypsin", m));
        std::size_t b = base.size(), expect = 0;
        for (std::size_t span = 1; span <= m + 1 && span <= b; ++span)
            expect += b - span + 1;
        CHECK(all.size() == expect);
    }
}

TEST_CASE("properties: tolerance monotonicity and self-identification")
{
    std::mt19937 rng(62);
    const std::string aa = "ACDEFGHIKLMNPQRSTVWY";
    auto trypsin = find_digest_rule("trypsin");
    std::vector<PmfEntry> db;
    for (int i = 0; i < 21; ++i) {
        std::string id = "R" + std::to_string(i);
        db.push_back({id, protein(oracle::random_string(rng, aa, 30 + rng() % 71), id)});
    }
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> peaks;
        for (const auto& pep : oracle::tryptic(db[trial].protein.residues()))
            peaks.push_back(oracle::peptide_mass(pep));
        std::vector<std::size_t> prev(db.size(), 0);
        for (double tol : {0.0005, 0.001, 0.01, 0.1, 1.0}) {
            auto hits = identify(Fingerprint(peaks, tol), db, trypsin, MassTable::monoisotopic(), 4);
            if (tol == 0.001)
                CHECK(hits[0].entry == std::size_t(trial));
            for (const auto& h : hits) {
                CHECK(h.matched >= prev[h.entry]);
                prev[h.entry] = h.matched;
            }
        }
    }
}

TEST_CASE("properties: identify is independent of thread count")
{
    std::mt19937 rng(63);
    const std::string aa = "ACDEFGHIKLMNPQRSTVWY";
    std::vector<PmfEntry> db;
    for (int i = 0; i < 40; ++i) {
        std::string id = "R" + std::to_string(i);
        db.push_back({id, protein(oracle::random_string(rng, aa, 30 + rng() % 71), id)});
    }
    std::vector<double> peaks;
    for (int i = 0; i < 15; ++i)
        peaks.push_back(500.0 + rng() % 2000 + 0.25);
    Fingerprint f(peaks, 0.5);
    auto trypsin = find_digest_rule("trypsin", 1);
    auto one = render_pmf_tsv(identify(f, db, trypsin, MassTable::monoisotopic(), 1));
    for (std::size_t t : {2, 3, 8})
        CHECK(render_pmf_tsv(identify(f, db, trypsin, MassTable::monoisotopic(), t)) == one);
}
