#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "seqforge/cli.hpp"

namespace fs = std::filesystem;
using seqforge::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args, const std::string& stdin_text = "")
{
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    int code = run(args, in, out, err);
    return {code, out.str(), err.str()};
}

struct Workdir {
    fs::path path;
    Workdir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("seqforge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Workdir() { fs::remove_all(path); }

    std::string file(const std::string& name, const std::string& content) const
    {
        std::ofstream(path / name) << content;
        return (path / name).string();
    }
    std::string at(const std::string& name) const { return (path / name).string(); }
};

const char* kKinases = ">p1 kinase alpha\nMKVLAAGIVGLLLAWHQDERTSPG\n>p2 kinase beta\nMKVLAAGIVGLLLAWHQDERTSPG\n"
                       ">p3 other\nWWWWCCCCYYYYHHHHWWWWCCCC\n";

} // namespace

TEST_CASE("translate")
{
    auto r = call({"translate", "--frame", "1"}, "TTTTCATTAGTTGGAGATAAA");
    CHECK(r.code == 0);
    CHECK(r.out == "FSLVGDK\n");
    CHECK(r.err.empty());

    r = call({"translate"}, ">x\nTTCAGCCTCGTGGGGGACAAG\n");
    CHECK(r.out == ">x\nFSLVGDK\n");

    r = call({"translate", "--six"}, "ATGAAA");
    CHECK(r.out.rfind("+1\tMK\n", 0) == 0);
    CHECK(r.out.find("-1\tFH\n") != std::string::npos);
}

TEST_CASE("seq subcommands")
{
    auto r = call({"seq", "complement"}, "ACGATGCCGTAGCATCGT\n");
    CHECK(r.out == "TGCTACGGCATCGTAGCA\n");
    CHECK(call({"seq", "revcomp"}, "ACGATGCCGTAGCATCGT").out == "ACGATGCTACGGCATCGT\n");
    CHECK(call({"seq", "validate"}, "acgt").out == "seq\tDNA\t4\n");

    r = call({"seq", "parity"}, "ACGATGCCGTAGCATCGT");
    CHECK(r.code == 0);
    CHECK(r.out.find("\t4\t5\t5\t4\t") != std::string::npos);

    r = call({"--json", "seq", "parity"}, "ACGATGCCGTAGCATCGT");
    auto j = nlohmann::json::parse(r.out);
    CHECK(j[0]["a"] == 4);
    CHECK(j[0]["gc_deviation"] == 0.0);

    CHECK(call({"seq", "composition", "--window", "4"}, "AAAACCCC").code == 0);
    r = call({"seq", "hairpin", "--min-stem", "4", "--min-loop", "3", "--max-loop", "6"}, "GCGCAAAAGCGC");
    CHECK(r.code == 0);
    CHECK(r.out == "id\tstart\tend\tstem\tloop_start\tloop_end\nseq\t1\t12\t4\t5\t8\n");

    CHECK(call({"assemble", "--min-overlap", "3"}, ">a\nACGT\n>b\nCGTA\n").out.find("ACGTA\n") != std::string::npos);
}

TEST_CASE("genes")
{
    auto r = call({"orf"}, "CCATGAAATAGCC");
    CHECK(r.code == 0);
    CHECK(r.out.find("seq\t+3\t3\t8\t2\tyes\tMK") != std::string::npos);

    r = call({"splice", "--min-intron", "4"}, "AAGTAAAGCC");
    CHECK(r.out.find("seq\t3\t7\t6") != std::string::npos);
}

TEST_CASE("align and search")
{
    Workdir w;
    auto a = w.file("a.fa", ">a\nAAAAAAAA\n");
    auto b = w.file("b.fa", ">b\nCCCCCCCC\n");
    auto r = call({"align", "--mode", "local", a, b});
    CHECK(r.code == 0);
    CHECK(r.out.find("Score = 0") != std::string::npos);
    CHECK(call({"--strict", "align", "--mode", "local", a, b}).code == 3);

    auto q = w.file("q.fa", ">q\nMKDLAAGIVG\n");
    auto s = w.file("s.fa", ">s\nMKELAAGIVG\n");
    r = call({"align", q, s});
    CHECK(r.code == 0);
    CHECK(r.out.find("Identities = 9/10 (90%), Positives = 10/10 (100%)") != std::string::npos);
    CHECK(r.out.find("MK+LAAGIVG") != std::string::npos);

    auto db = w.file("db.fa", kKinases);
    r = call({"search", db, db});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("subject\tscore", 0) == 0);
    CHECK(r.out.find("p1\t48\t") != std::string::npos);
}

TEST_CASE("scan, structure, pmf, tree")
{
    auto r = call({"scan", "H-[FW]-x(2)-G"}, "HFAAGHWAAG");
    CHECK(r.out == "id\tstart\tend\tmatch\nseq\t1\t5\tHFAAG\nseq\t6\t10\tHWAAG\n");
    CHECK(call({"scan", "A-["}, "HFAAG").code == 2);

    r = call({"predict2s", "predict", "--hydrophobic", "LIVMF"}, "LAALLAAL");
    CHECK(r.code == 0);
    CHECK(r.out.find("1\tL\tH\t1.000") != std::string::npos);

    Workdir w;
    auto p1 = w.file("p1.tsv", "1\tL\tH\t1.000\n");
    auto p2 = w.file("p2.tsv", "1\tL\tE\t1.000\n");
    auto p3 = w.file("p3.tsv", "1\tL\tE\t1.000\n");
    r = call({"predict2s", "consensus", p1, p2, p3, "--weights", "2,1,1"});
    CHECK(r.out == "1\tL\tC\t0.500\n");

    r = call({"pmf", "digest", "--missed", "1"}, "AKRPGK");
    CHECK(r.out == "peptide\tresidues\tmass\nseq_1-2\tAK\t217.14263\nseq_3-6\tRPGK\t456.28085\nseq_1-6\tAKRPGK\t655.41292\n");
    CHECK(call({"pmf", "mass", "G"}).out == "G\t75.03202\n");

    auto db = w.file("db.fa", ">P1\nGGGG\n>P2\nKAAAK\n");
    auto peaks = w.file("peaks.txt", "359.217\n");
    r = call({"pmf", "identify", peaks, db});
    CHECK(r.out.rfind("rank\taccession\tmatched\ttotal\tscore\n1\tP2\t1\t1\t1.0000\n", 0) == 0);

    auto dm = w.file("dm.tsv", "\tA\tB\tC\nA\t0\t2\t4\nB\t2\t0\t4\nC\t4\t4\t0\n");
    CHECK(call({"tree", "upgma", dm}).out == "((A:1,B:1):1,C:2);\n");
}

TEST_CASE("db")
{
    Workdir w;
    auto data = w.at("data");
    auto fa = w.file("k.fa", kKinases);
    auto r = call({"db", "--data", data, "ingest", fa});
    CHECK(r.code == 0);
    CHECK(r.out == "ingested\t3\ntotal\t3\n");
    CHECK(call({"db", "--data", data, "ingest", fa}).out == "ingested\t0\ntotal\t3\n");

    CHECK(call({"db", "--data", data, "query", "kinase NOT beta"}).out == "p1\n");
    r = call({"db", "--data", data, "query", "--explain", "kinase beta"});
    CHECK(r.out == "# And(Term(kinase,all),Term(beta,all))\np2\n");
    CHECK(call({"db", "--data", data, "query", "zebra"}).code == 0);
    CHECK(call({"--strict", "db", "--data", data, "query", "zebra"}).code == 3);
    CHECK(call({"db", "--data", data, "query", "x [zz]"}).err.rfind("ERROR:UnknownField:", 0) == 0);

    r = call({"db", "--data", data, "get", "p1"});
    CHECK(nlohmann::json::parse(r.out)["definition"] == "kinase alpha");
    CHECK(call({"--strict", "db", "--data", data, "get", "nope"}).code == 3);

    r = call({"db", "--data", data, "neighbors", "--threshold", "30"});
    CHECK(r.out == "p1\tp2\t48\tktup\np2\tp1\t48\tktup\n");
    CHECK(call({"db", "--data", data, "neighbors", "--of", "p2"}).out == "p2\tp1\t48\tktup\n");

    Workdir empty;
    r = call({"--strict", "db", "--data", empty.at("d"), "query", "dna [mh] AND crick [au]"});
    CHECK(r.code == 3);
    CHECK(r.err.rfind("ERROR:NoResult:", 0) == 0);

    ::setenv("SEQFORGE_DATA", data.c_str(), 1);
    CHECK(call({"db", "query", "other"}).out == "p3\n");
    ::unsetenv("SEQFORGE_DATA");
    CHECK(call({"db", "query", "other"}).code == 1);
}

TEST_CASE("exit codes and error format")
{
    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"translate", "--frame", "7"}, "ATG").code == 1);
    CHECK(call({"translate", "--bogus"}, "ATG").code == 1);

    auto r = call({"seq", "validate", "--alphabet", "dna"}, "ACGTX");
    CHECK(r.code == 2);
    CHECK(r.err == "ERROR:InvalidResidue:invalid residue 'X' at position 4\n");

    r = call({"seq", "validate"}, ">a\nAC\n>a\nGT\n");
    CHECK(r.code == 2);
    CHECK(r.err.rfind("ERROR:DuplicateId:", 0) == 0);
    CHECK(call({"translate", "/nonexistent/file"}).err.rfind("ERROR:Io:", 0) == 0);
    CHECK(call({"seq", "validate"}, "").code == 2);
}

TEST_CASE("help on every subcommand")
{
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> table = {
        {{}, {"--json", "--strict", "--lenient", "--config"}},
        {{"seq"}, {}},
        {{"seq", "validate"}, {"--alphabet"}},
        {{"seq", "complement"}, {"--alphabet"}},
        {{"seq", "revcomp"}, {"--alphabet"}},
        {{"seq", "parity"}, {}},
        {{"seq", "composition"}, {"--window", "--step", "--partial"}},
        {{"seq", "hairpin"}, {"--min-stem", "--min-loop", "--max-loop"}},
        {{"assemble"}, {"--min-overlap"}},
        {{"translate"}, {"--frame", "--stop", "--six"}},
        {{"orf"}, {"--min-length", "--nested", "--open-ended"}},
        {{"splice"}, {"--min-intron", "--max-intron"}},
        {{"align"}, {"--mode", "--width", "--alphabet", "--match", "--mismatch", "--similar", "--gap", "--gap-open"}},
        {{"search"}, {"--k", "--threshold", "--dropoff", "--no-dropoff", "--threads", "--max-hits", "--render"}},
        {{"scan"}, {"--canonical"}},
        {{"predict2s"}, {}},
        {{"predict2s", "predict"}, {"--hydrophobic", "--min-helix", "--min-alt", "--min-run"}},
        {{"predict2s", "profile"}, {"--window", "--scale"}},
        {{"predict2s", "consensus"}, {"--weights"}},
        {{"pmf"}, {}},
        {{"pmf", "digest"}, {"--enzyme", "--missed", "--rules", "--masses", "--no-carbamidomethyl"}},
        {{"pmf", "mass"}, {"--masses"}},
        {{"pmf", "identify"}, {"--tolerance", "--ppm", "--threads", "--enzyme", "--missed"}},
        {{"db"}, {"--data"}},
        {{"db", "ingest"}, {}},
        {{"db", "query"}, {"--explain"}},
        {{"db", "get"}, {}},
        {{"db", "neighbors"}, {"--threshold", "--of", "--threads"}},
        {{"tree"}, {}},
        {{"tree", "distmat"}, {}},
        {{"tree", "upgma"}, {}},
    };
    for (const auto& [path, flags] : table) {
        auto args = path;
        args.push_back("--help");
        auto r = call(args);
        std::string where = args.empty() ? "top" : args.front();
        CHECK_MESSAGE(r.code == 0, where);
        CHECK(r.out.find("Usage:") != std::string::npos);
        for (const auto& f : flags)
            CHECK_MESSAGE(r.out.find(f) != std::string::npos, where << " " << f);
    }
}

TEST_CASE("config file")
{
    Workdir w;
    auto section = w.file("a.ini", "[translate]\nframe = 2\n");
    auto dotted = w.file("b.ini", "translate.frame = 2\n");
    CHECK(call({"--config", section, "translate"}, "TTTTCATTAGTTGGAGATAAA").out == "FH*LEI\n");
    CHECK(call({"--config", dotted, "translate"}, "TTTTCATTAGTTGGAGATAAA").out == "FH*LEI\n");
    CHECK(call({"--config", section, "translate", "--frame", "1"}, "TTTTCATTAGTTGGAGATAAA").out == "FSLVGDK\n");
    CHECK(call({"--config", w.at("missing.ini"), "translate"}, "ATG").code == 1);
}

TEST_CASE("determinism across runs and thread counts")
{
    Workdir w;
    std::mt19937 rng(81);
    std::string db, query = ">q\n" + oracle::random_string(rng, "ACDEFGHIKLMNPQRSTVWY", 120) + "\n";
    std::string base = query.substr(3, 120);
    for (int i = 0; i < 60; ++i) {
        std::string s = i % 4 ? oracle::random_string(rng, "ACDEFGHIKLMNPQRSTVWY", 150) : base;
        for (int m = 0; m < i; ++m)
            s[rng() % s.size()] = "ACDEFGHIKLMNPQRSTVWY"[rng() % 20];
        db += ">r" + std::to_string(i) + "\n" + s + "\n";
    }
    auto dbf = w.file("db.fa", db), qf = w.file("q.fa", query);
    auto peaks = w.file("peaks.txt", "500.3\n800.4\n1200.6\n1500.7\n");

    auto s1 = call({"search", "--threads", "1", qf, dbf});
    auto s8 = call({"search", "--threads", "8", qf, dbf});
    CHECK(s1.code == 0);
    CHECK(s1.out == s8.out);
    CHECK(call({"search", "--threads", "8", qf, dbf}).out == s8.out);
    CHECK(call({"--json", "search", "--threads", "3", qf, dbf}).out == call({"--json", "search", "--threads", "5", qf, dbf}).out);

    auto p1 = call({"pmf", "identify", "--tolerance", "0.5", "--threads", "1", peaks, dbf});
    CHECK(p1.code == 0);
    CHECK(p1.out == call({"pmf", "identify", "--tolerance", "0.5", "--threads", "7", peaks, dbf}).out);

    auto data = w.at("data");
    CHECK(call({"db", "--data", data, "ingest", dbf}).code == 0);
    auto n1 = call({"db", "--data", data, "neighbors", "--threshold", "40", "--threads", "1"});
    auto n8 = call({"db", "--data", data, "neighbors", "--threshold", "40", "--threads", "8"});
    CHECK(n1.out == n8.out);
    CHECK(!n1.out.empty());
}

TEST_CASE("installed binary")
{
    const char* bin = std::getenv("SEQFORGE_CLI");
    if (!bin) {
        MESSAGE("SEQFORGE_CLI not set; skipping");
        return;
    }
    std::string cmd = "printf TTTTCATTAGTTGGAGATAAA | '" + std::string(bin) + "' translate --frame 1";
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[64] = {};
    std::string out;
    while (std::fgets(buf, sizeof buf, p))
        out += buf;
    int status = ::pclose(p);
    CHECK(out == "FSLVGDK\n");
    CHECK(WEXITSTATUS(status) == 0);

    status = std::system(("'" + std::string(bin) + "' translate --frame 7 </dev/null 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 1);
}
