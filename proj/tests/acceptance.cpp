#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <unistd.h>

#include "corpus.hpp"
#include "oracles.hpp"
#include "seqforge/align.hpp"
#include "seqforge/formats.hpp"
#include "seqforge/genes.hpp"
#include "seqforge/pmf.hpp"
#include "seqforge/seq_core.hpp"
#include "seqforge/store.hpp"

using namespace seqforge;
namespace fs = std::filesystem;

namespace {

const std::string kAmino = "ACDEFGHIKLMNPQRSTVWY";

// Counts checks and keeps the first disagreement for the report line.
struct Tally {
    std::size_t checked = 0, failed = 0, allowed = 0;
    std::string first;

    void expect(bool ok, const std::string& what)
    {
        ++checked;
        if (!ok && failed++ == 0)
            first = what;
    }
    bool ok() const { return failed <= allowed; }
    std::string summary() const
    {
        std::ostringstream s;
        s << (checked - failed) << "/" << checked;
        if (failed)
            s << ", first: " << first;
        return s.str();
    }
};

Sequence dna(std::string_view s) { return validate(s, AlphabetKind::DNA); }
Sequence protein(std::string_view s, std::string id = "p") { return validate(s, AlphabetKind::Protein, {true, false, id, ""}); }

std::string codon_fidelity(Tally& t)
{
    const std::pair<const char*, const char*> cases[] = {
        {"TTTTCATTAGTTGGAGATAAA", "FSLVGDK"},
        {"TTCAGCCTCGTGGGGGACAAG", "FSLVGDK"},
        {"TTTTCATTAGTTGGAGTTAAA", "FSLVGVK"},
    };
    for (auto [in, want] : cases) {
        auto got = translate(dna(in)).residues();
        t.expect(got == want, std::string(in) + " -> " + got);
    }
    for (const char* codon : {"TCT", "TCC", "TCA", "TCG", "AGT", "AGC"})
        t.expect(translate(dna(codon)).residues() == "S", codon);
    return t.summary();
}

std::string complement_fidelity(Tally& t)
{
    auto s = dna("ACGATGCCGTAGCATCGT");
    auto c = complement(s).residues();
    t.expect(c == "TGCTACGGCATCGTAGCA", c);
    auto p = parity_stats(s);
    t.expect(p.a == 4 && p.t == 4 && p.c == 5 && p.g == 5, "parity counts");
    return t.summary();
}

std::string alignment_oracle(Tally& t)
{
    const ScoringScheme scheme(1, -1, -1, -2);
    std::mt19937 rng(1001);
    for (int i = 0; i < 500; ++i) {
        auto a = oracle::random_string(rng, "ACGT", 1 + rng() % 5);
        auto b = oracle::random_string(rng, "ACGT", 1 + rng() % 5);
        t.expect(needleman_wunsch(a, b, scheme).score == oracle::global_score(a, b, scheme), "NW " + a + "/" + b);
        t.expect(smith_waterman(a, b, scheme).score == oracle::local_score(a, b, scheme), "SW " + a + "/" + b);
    }
    return t.summary();
}

std::string blast_rendering(Tally& t)
{
    // 128 identical, 6 similar, 11 mismatched and 1 gap column.
    std::mt19937 rng(1004);
    std::string q, s;
    for (int i = 0; i < 128; ++i) {
        char c = kAmino[rng() % 20];
        q += c;
        s += c;
    }
    for (int i = 0; i < 6; ++i) {
        q += 'I';
        s += 'V';
    }
    for (int i = 0; i < 11; ++i) {
        q += 'W';
        s += 'G';
    }
    q += 'K';
    s += kGapSymbol;
    std::shuffle(q.begin(), q.end(), std::mt19937(7));
    std::shuffle(s.begin(), s.end(), std::mt19937(7));

    Alignment al;
    al.query_row = q;
    al.subject_row = s;
    count_columns(al, ScoringScheme::protein());
    const std::string want = "Identities = 128/146 (87%), Positives = 134/146 (91%), Gaps = 1/146 (0%)";
    auto got = blast_counts_line(al);
    t.expect(got == want, got);

    al.score = oracle::rescore(q, s, ScoringScheme::protein());
    auto doc = render_blast(al, "query", "subject", ScoringScheme::protein());
    t.expect(doc.find(want + "\n") != std::string::npos, "rendered document");
    return t.summary();
}

std::string prosite_oracle(Tally& t)
{
    std::mt19937 rng(1005);
    const std::string alphabet = "ACDFGHW";
    for (int i = 0; i < 1000; ++i) {
        auto op = oracle::random_pattern(rng, alphabet);
        auto s = oracle::random_string(rng, alphabet, rng() % 25);
        std::vector<MotifMatch> want;
        for (auto [b, e] : oracle::scan(op, s))
            want.push_back({b, e});
        t.expect(scan_motif(parse_prosite(op.text()), s) == want, op.text() + " on " + s);
    }
    auto p = parse_prosite("H-[FW]-x-[LIVM]-x-G-x(5)-[LV]-H-x(3)-[DE]");
    t.expect(scan_motif(p, "HFALAGAAAAALHAAAD") == std::vector<MotifMatch>{{0, 17}}, "positive");
    t.expect(scan_motif(p, "HFALAGAAAAALHAAAK").empty(), "negative");
    return t.summary();
}

std::string orf_oracle(Tally& t)
{
    std::mt19937 rng(1006);
    for (int i = 0; i < 500; ++i) {
        auto s = oracle::random_string(rng, "ACGT", 1 + rng() % 60);
        OrfOptions opt;
        opt.min_length = 1 + rng() % 3;
        opt.nested = rng() % 2;
        opt.open_ended = rng() % 2;
        std::vector<oracle::OrfSpan> got;
        for (const auto& o : find_orfs(dna(s), opt))
            got.push_back({o.frame, o.begin, o.end, o.has_stop, o.peptide.residues()});
        std::sort(got.begin(), got.end());
        t.expect(got == oracle::orfs(s, opt.min_length, opt.nested, opt.open_ended), s);
    }
    return t.summary();
}

std::string pmf_self_identification(Tally& t)
{
    std::mt19937 rng(1007);
    std::vector<PmfEntry> decoys;
    for (int i = 0; i < 20; ++i) {
        std::string id = "D" + std::to_string(i);
        decoys.push_back({id, protein(oracle::random_string(rng, kAmino, 30 + rng() % 71), id)});
    }
    auto trypsin = find_digest_rule("trypsin");
    for (int i = 0; i < 50; ++i) {
        std::string id = "S" + std::to_string(i);
        auto source = protein(oracle::random_string(rng, kAmino, 30 + rng() % 71), id);
        std::vector<double> peaks;
        for (const auto& pep : oracle::tryptic(source.residues()))
            peaks.push_back(oracle::peptide_mass(pep));
        auto db = decoys;
        db.push_back({id, source});
        auto hits = identify(Fingerprint(peaks, 0.001), db, trypsin);
        t.expect(!hits.empty() && hits[0].accession == id, id);
    }
    // One coincidental tie is tolerated.
    t.allowed = 1;
    return t.summary();
}

std::string query_laws(Tally& t)
{
    std::mt19937 rng(1008);
    auto store = Store::in_memory();
    std::vector<Record> recs;
    for (int i = 0; i < 100; ++i)
        recs.push_back(corpus::random_record(rng, i));
    store.ingest(recs);

    for (int i = 0; i < 200; ++i) {
        auto a = corpus::random_query(rng, 3), b = corpus::random_query(rng, 3);
        auto lhs = store.evaluate(*Query::negate(Query::disj(a, b)));
        auto rhs = store.evaluate(*Query::conj(Query::negate(a), Query::negate(b)));
        t.expect(lhs == rhs, "De Morgan on " + corpus::query_text(*a) + " / " + corpus::query_text(*b));

        lhs = store.evaluate(*Query::negate(Query::conj(a, b)));
        rhs = store.evaluate(*Query::disj(Query::negate(a), Query::negate(b)));
        t.expect(lhs == rhs, "dual De Morgan on " + corpus::query_text(*a));

        auto sa = corpus::query_text(*a), sb = corpus::query_text(*b);
        t.expect(store.evaluate(sa + " " + sb) == store.evaluate(sa + " AND " + sb), "default AND on " + sa);
    }
    return t.summary();
}

std::string roundtrips(Tally& t)
{
    std::mt19937 rng(1009);
    for (int i = 0; i < 100; ++i) {
        FastaDoc d;
        const std::size_t n = 1 + rng() % 5;
        for (std::size_t k = 0; k < n; ++k) {
            bool prot = rng() % 2;
            std::string res = prot ? "M" + oracle::random_string(rng, kAmino, rng() % 150)
                                   : oracle::random_string(rng, "ACGT", 1 + rng() % 150);
            d.entries.push_back(make_sequence("s" + std::to_string(k), prot ? AlphabetKind::Protein : AlphabetKind::DNA, res,
                                              rng() % 2 ? "entry " + std::to_string(k) : ""));
        }
        t.expect(parse_fasta(render_fasta(d, 1 + rng() % 80)) == d, "fasta doc " + std::to_string(i));
    }

    fs::path dir = fs::temp_directory_path() / ("seqforge_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    {
        std::vector<Record> recs;
        for (int i = 0; i < 30; ++i)
            recs.push_back(corpus::random_record(rng, i));
        Store::open(dir).ingest(recs);
        auto reopened = Store::open(dir);
        for (const auto& r : recs) {
            auto got = reopened.get(r.accession);
            t.expect(got && record_to_json(*got) == record_to_json(r), "store " + r.accession);
        }
    }
    fs::remove_all(dir);

    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 2 + rng() % 9;
        DistanceMatrix m;
        m.values.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t a = 0; a < n; ++a) {
            m.labels.push_back("t" + std::to_string(a));
            for (std::size_t b = 0; b < a; ++b)
                m.values[a][b] = m.values[b][a] = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
        }
        auto depths = upgma(m).leaf_depths();
        bool ultrametric = depths.size() == n;
        for (double v : depths)
            ultrametric = ultrametric && std::abs(v - depths[0]) <= 1e-9;
        t.expect(ultrametric, "matrix " + std::to_string(i));
    }
    return t.summary();
}

std::string performance(Tally& t)
{
    using clock = std::chrono::steady_clock;
    std::mt19937 rng(1010);
    auto a = protein(oracle::random_string(rng, kAmino, 10000), "a");
    auto b = protein(oracle::random_string(rng, kAmino, 10000), "b");
    auto start = clock::now();
    auto al = smith_waterman(a, b, ScoringScheme::protein());
    double sw = std::chrono::duration<double>(clock::now() - start).count();
    t.expect(sw <= 10.0 && al.score > 0, "smith_waterman");

    auto query = protein(oracle::random_string(rng, kAmino, 300), "q");
    std::vector<Sequence> db;
    for (int i = 0; i < 1000; ++i)
        db.push_back(protein(oracle::random_string(rng, kAmino, 300), "r" + std::to_string(i)));
    start = clock::now();
    ktup_search(query, db, ScoringScheme::protein());
    double kt = std::chrono::duration<double>(clock::now() - start).count();
    t.expect(kt <= 5.0, "ktup_search");

    char buf[96];
    std::snprintf(buf, sizeof buf, "sw %.2fs, ktup %.2fs; ", sw, kt);
    return buf + t.summary();
}

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    std::function<std::string(Tally&)> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "codon fidelity", 1, codon_fidelity},
        {2, "complement fidelity", 1, complement_fidelity},
        {3, "alignment oracle", 30, alignment_oracle},
        {4, "blast rendering", 1, blast_rendering},
        {5, "prosite oracle", 10, prosite_oracle},
        {6, "orf oracle", 10, orf_oracle},
        {7, "pmf self-identification", 20, pmf_self_identification},
        {8, "query laws", 10, query_laws},
        {9, "roundtrips", 10, roundtrips},
        {10, "performance floor", 15, performance},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Tally t;
        std::string detail;
        auto start = std::chrono::steady_clock::now();
        try {
            detail = c.run(t);
        } catch (const std::exception& e) {
            t.expect(false, std::string("exception: ") + e.what());
            detail = t.summary();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = t.ok() && secs <= c.limit_seconds;
        failures += !pass;
        std::printf("%s %2d %-24s %7.3fs  %s\n", pass ? "PASS" : "FAIL", c.number, c.name, secs, detail.c_str());
    }
    return failures ? 1 : 0;
}
