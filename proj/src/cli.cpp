#include "seqforge/cli.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "seqforge/align.hpp"
#include "seqforge/formats.hpp"
#include "seqforge/genes.hpp"
#include "seqforge/pmf.hpp"
#include "seqforge/seq_core.hpp"
#include "seqforge/store.hpp"
#include "seqforge/structure.hpp"

namespace seqforge::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

class Inputs {
public:
    explicit Inputs(std::istream& in) : in_(in) {}

    std::string read(const std::string& path)
    {
        std::ostringstream buf;
        if (path == "-") {
            if (stdin_used_)
                throw UsageError("standard input can only be read once");
            stdin_used_ = true;
            buf << in_.rdbuf();
            return buf.str();
        }
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw Error(ErrorCode::Io, "cannot read " + path);
        buf << f.rdbuf();
        return buf.str();
    }

private:
    std::istream& in_;
    bool stdin_used_ = false;
};

struct Loaded {
    std::vector<Sequence> seqs;
    bool fasta = false;
};

std::optional<AlphabetKind> alphabet_option(const std::string& name)
{
    if (name == "dna")
        return AlphabetKind::DNA;
    if (name == "rna")
        return AlphabetKind::RNA;
    if (name == "protein")
        return AlphabetKind::Protein;
    return std::nullopt;
}

// FASTA when the first non-blank character is '>', otherwise one raw sequence.
Loaded load_sequences(const std::string& text, std::optional<AlphabetKind> alphabet, bool lenient)
{
    Loaded l;
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '>') {
        l.fasta = true;
        l.seqs = parse_fasta(text, FastaOptions{alphabet, lenient}).entries;
        return l;
    }
    std::string compact;
    for (char c : text)
        if (!std::isspace((unsigned char)c))
            compact += c;
    ValidateOptions vo;
    vo.lenient = lenient;
    l.seqs.push_back(validate(text, alphabet.value_or(detect_alphabet(compact)), vo));
    return l;
}

std::string alphabet_name(AlphabetKind kind)
{
    return kind == AlphabetKind::DNA ? "dna" : kind == AlphabetKind::RNA ? "rna" : "protein";
}

std::string frame_label(int frame)
{
    return (frame > 0 ? "+" : "") + std::to_string(frame);
}

void emit_json(std::ostream& out, const json& j)
{
    out << j.dump(2) << "\n";
}

json sequence_json(const Sequence& s)
{
    return {{"id", s.id()},
            {"description", s.description()},
            {"alphabet", std::string(to_string(s.alphabet_kind()))},
            {"residues", s.residues()}};
}

json alignment_json(const Alignment& a)
{
    return {{"score", a.score},
            {"query_start", a.query_start},
            {"query_end", a.query_end},
            {"subject_start", a.subject_start},
            {"subject_end", a.subject_end},
            {"length", a.length()},
            {"identities", a.identities},
            {"positives", a.positives},
            {"gaps", a.gaps},
            {"query_row", a.query_row},
            {"subject_row", a.subject_row}};
}

struct ScoreFlags {
    std::optional<int> match, mismatch, similar, gap, gap_open;

    void attach(CLI::App* app)
    {
        app->add_option("--match", match, "Score for identical residues");
        app->add_option("--mismatch", mismatch, "Score for dissimilar residues");
        app->add_option("--similar", similar, "Score for residues in one similarity group");
        app->add_option("--gap", gap, "Penalty per gap position (negative)");
        app->add_option("--gap-open", gap_open, "Extra penalty per gap run; enables affine gaps");
    }

    ScoringScheme scheme(AlphabetKind kind) const
    {
        ScoringScheme base = ScoringScheme::for_alphabet(kind);
        return ScoringScheme(match.value_or(base.match()), mismatch.value_or(base.mismatch()),
                             similar.value_or(base.similar()), gap.value_or(base.gap()), base.groups(), gap_open);
    }
};

const std::vector<std::string> kAlphabetNames{"auto", "dna", "rna", "protein"};

class Runner {
public:
    Runner(std::istream& in, std::ostream& out) : inputs_(in), out_(out) {}

    void build(CLI::App& app);
    int dispatch()
    {
        for (auto& [sub, fn] : actions_)
            if (sub->parsed()) {
                fn();
                return kOk;
            }
        throw UsageError("no subcommand given");
    }

private:
    void on(CLI::App* sub, std::function<void()> fn) { actions_.emplace_back(sub, std::move(fn)); }

    Loaded load(const std::string& path, const std::string& alphabet_name = "auto")
    {
        return load_sequences(inputs_.read(path), alphabet_option(alphabet_name), lenient_);
    }

    Sequence load_first(const std::string& path, const std::string& alphabet_name = "auto")
    {
        Loaded l = load(path, alphabet_name);
        return l.seqs.front();
    }

    void write_sequences(const std::vector<Sequence>& seqs, bool fasta)
    {
        if (fasta) {
            out_ << render_fasta(FastaDoc{seqs});
            return;
        }
        for (const auto& s : seqs)
            out_ << s.residues() << "\n";
    }

    void no_result(const std::string& what)
    {
        if (strict_)
            throw NoResult(what);
    }

    void build_seq(CLI::App& app);
    void build_genes(CLI::App& app);
    void build_align(CLI::App& app);
    void build_scan(CLI::App& app);
    void build_structure(CLI::App& app);
    void build_pmf(CLI::App& app);
    void build_db(CLI::App& app);
    void build_tree(CLI::App& app);

    Inputs inputs_;
    std::ostream& out_;
    std::vector<std::pair<CLI::App*, std::function<void()>>> actions_;

    bool json_ = false;
    bool strict_ = false;
    bool lenient_ = false;

    // Option storage; each subcommand reads only its own fields.
    std::string input_ = "-";
    std::string input2_;
    std::vector<std::string> inputs_list_;
    std::string alphabet_ = "auto";
    ScoreFlags score_;

    struct Options {
        std::size_t comp_window = 100, comp_step = 0;
        bool comp_partial = false;
        HairpinOptions hopts;
        std::size_t min_overlap = 3;

        int frame = 1;
        std::string stop = "run";
        bool six = false;
        OrfOptions oopts;
        SpliceOptions sopts;

        std::string align_mode = "global";
        std::size_t align_width = 60;
        std::optional<std::size_t> k;
        int search_threshold = 0;
        std::optional<int> dropoff;
        bool no_dropoff = false, render = false;
        std::size_t search_threads = 0, max_hits = 0;

        std::string pattern;
        bool canonical = false;

        PredictOptions popts;
        std::string scale_path;
        std::size_t profile_window = 9;
        std::vector<double> weights;

        std::string enzyme = "trypsin", rules_path, masses_path;
        std::size_t missed = 0, pmf_threads = 0;
        bool no_cam = false, ppm = false;
        double tolerance = 0.01;

        std::string data_dir, query, accession, of;
        bool explain = false;
        std::optional<int> nb_threshold;
        std::size_t nb_threads = 0;
    } o_;
};

void Runner::build(CLI::App& app)
{
    app.add_flag("--json", json_, "Emit JSON instead of text");
    app.add_flag("--strict", strict_, "Exit with status 3 when a command finds nothing");
    app.add_flag("--lenient", lenient_, "Map ambiguity codes onto N/X instead of rejecting them");
    build_seq(app);
    build_genes(app);
    build_align(app);
    build_scan(app);
    build_structure(app);
    build_pmf(app);
    build_db(app);
    build_tree(app);
}

// ---------------------------------------------------------------------- seq

void Runner::build_seq(CLI::App& app)
{
    auto* seq = app.add_subcommand("seq", "Nucleic-acid and protein sequence utilities");
    seq->require_subcommand(1);

    auto input_opts = [&](CLI::App* s) {
        s->add_option("input", input_, "Sequence file (FASTA or raw), '-' for stdin")->capture_default_str();
        s->add_option("--alphabet", alphabet_, "Alphabet: auto, dna, rna or protein")
            ->check(CLI::IsMember(kAlphabetNames))
            ->capture_default_str();
    };

    auto* val = seq->add_subcommand("validate", "Check residues and report alphabet and length");
    input_opts(val);
    on(val, [this] {
        Loaded l = load(input_, alphabet_);
        if (json_) {
            json j = json::array();
            for (const auto& s : l.seqs)
                j.push_back({{"id", s.id()}, {"alphabet", std::string(to_string(s.alphabet_kind()))}, {"length", s.size()}});
            emit_json(out_, j);
            return;
        }
        for (const auto& s : l.seqs)
            out_ << s.id() << "\t" << to_string(s.alphabet_kind()) << "\t" << s.size() << "\n";
    });

    for (bool reverse : {false, true}) {
        auto* c = seq->add_subcommand(reverse ? "revcomp" : "complement",
                                      reverse ? "Reverse complement of DNA" : "Base-wise complement of DNA");
        input_opts(c);
        on(c, [this, reverse] {
            Loaded l = load(input_, alphabet_);
            std::vector<Sequence> outs;
            for (const auto& s : l.seqs)
                outs.push_back(reverse ? reverse_complement(s) : complement(s));
            if (json_) {
                json j = json::array();
                for (const auto& s : outs)
                    j.push_back(sequence_json(s));
                emit_json(out_, j);
                return;
            }
            write_sequences(outs, l.fasta);
        });
    }

    auto* par = seq->add_subcommand("parity", "Base counts and A/T, G/C deviation on one strand");
    input_opts(par);
    on(par, [this] {
        Loaded l = load(input_, alphabet_);
        json j = json::array();
        if (!json_)
            out_ << "id\ta\tc\tg\tt\tother\tat_deviation\tgc_deviation\n";
        for (const auto& s : l.seqs) {
            ParityStats p = parity_stats(s);
            if (json_) {
                j.push_back({{"id", s.id()}, {"a", p.a}, {"c", p.c}, {"g", p.g}, {"t", p.t}, {"other", p.other},
                             {"at_deviation", p.deviation_at}, {"gc_deviation", p.deviation_gc}});
                continue;
            }
            out_ << s.id() << "\t" << p.a << "\t" << p.c << "\t" << p.g << "\t" << p.t << "\t" << p.other << "\t"
                 << fmt("%.6f", p.deviation_at) << "\t" << fmt("%.6f", p.deviation_gc) << "\n";
        }
        if (json_)
            emit_json(out_, j);
    });

    auto* comp = seq->add_subcommand("composition", "Residue counts in sliding windows");
    input_opts(comp);
    comp->add_option("--window", o_.comp_window, "Window length")->capture_default_str();
    comp->add_option("--step", o_.comp_step, "Step between windows (default: the window length)");
    comp->add_flag("--partial", o_.comp_partial, "Keep a shorter final window");
    on(comp, [this] {
        Loaded l = load(input_, alphabet_);
        json j = json::array();
        for (const auto& s : l.seqs) {
            CompositionReport r = composition_windows(s, o_.comp_window, o_.comp_step ? o_.comp_step : o_.comp_window, o_.comp_partial);
            std::string symbols(s.alphabet().symbols());
            auto other = [&](const SymbolCounts& c) {
                std::size_t n = 0;
                for (const auto& [sym, count] : c)
                    if (symbols.find(sym) == std::string::npos)
                        n += count;
                return n;
            };
            if (json_) {
                json w = json::array();
                for (const auto& win : r.windows) {
                    json counts = json::object();
                    for (const auto& [sym, count] : win.counts)
                        counts[std::string(1, sym)] = count;
                    w.push_back({{"start", win.offset + 1}, {"length", win.length}, {"counts", counts}});
                }
                j.push_back({{"id", s.id()}, {"window", r.window}, {"step", r.step}, {"windows", w}});
                continue;
            }
            out_ << "id\tstart\tlength";
            for (char c : symbols)
                out_ << "\t" << c;
            out_ << "\tother\n";
            for (const auto& win : r.windows) {
                out_ << s.id() << "\t" << win.offset + 1 << "\t" << win.length;
                for (char c : symbols) {
                    auto it = win.counts.find(c);
                    out_ << "\t" << (it == win.counts.end() ? 0 : it->second);
                }
                out_ << "\t" << other(win.counts) << "\n";
            }
        }
        if (json_)
            emit_json(out_, j);
    });

    auto* hp = seq->add_subcommand("hairpin", "Stem-loop candidates from intra-strand complementarity");
    input_opts(hp);
    hp->add_option("--min-stem", o_.hopts.min_stem, "Minimum paired stem length")->capture_default_str();
    hp->add_option("--min-loop", o_.hopts.min_loop, "Minimum loop length")->capture_default_str();
    hp->add_option("--max-loop", o_.hopts.max_loop, "Maximum loop length")->capture_default_str();
    on(hp, [this] {
        Loaded l = load(input_, alphabet_);
        json j = json::array();
        std::size_t found = 0;
        if (!json_)
            out_ << "id\tstart\tend\tstem\tloop_start\tloop_end\n";
        for (const auto& s : l.seqs)
            for (const auto& h : find_hairpins(s, o_.hopts)) {
                ++found;
                if (json_) {
                    j.push_back({{"id", s.id()}, {"start", h.begin() + 1}, {"end", h.end()}, {"stem", h.stem_length},
                                 {"loop_start", h.loop_begin + 1}, {"loop_end", h.loop_end}});
                    continue;
                }
                out_ << s.id() << "\t" << h.begin() + 1 << "\t" << h.end() << "\t" << h.stem_length << "\t"
                     << h.loop_begin + 1 << "\t" << h.loop_end << "\n";
            }
        if (json_)
            emit_json(out_, j);
        if (!found)
            no_result("no hairpins found");
    });

    auto* as = app.add_subcommand("assemble", "Greedy overlap assembly of fragments");
    as->add_option("input", input_, "FASTA fragments, '-' for stdin")->capture_default_str();
    as->add_option("--min-overlap", o_.min_overlap, "Minimum suffix/prefix overlap")->capture_default_str();
    on(as, [this] {
        Loaded l = load(input_, "auto");
        Assembly a = assemble_fragments(l.seqs, o_.min_overlap);
        if (json_) {
            json j = json::array();
            for (std::size_t c = 0; c < a.contigs.size(); ++c) {
                json layout = json::array();
                for (const auto& p : a.contigs[c].layout)
                    layout.push_back({{"fragment", l.seqs[p.fragment].id()}, {"offset", p.offset}});
                j.push_back({{"id", "contig" + std::to_string(c + 1)}, {"residues", a.contigs[c].residues}, {"layout", layout}});
            }
            emit_json(out_, j);
            return;
        }
        std::vector<Sequence> contigs;
        for (std::size_t c = 0; c < a.contigs.size(); ++c) {
            std::string members;
            for (const auto& p : a.contigs[c].layout)
                members += (members.empty() ? "" : ",") + l.seqs[p.fragment].id();
            contigs.push_back(make_sequence("contig" + std::to_string(c + 1), l.seqs.front().alphabet_kind(),
                                            a.contigs[c].residues, "fragments=" + members));
        }
        out_ << render_fasta(FastaDoc{contigs});
    });
}

// -------------------------------------------------------------------- genes

void Runner::build_genes(CLI::App& app)
{
    auto* tr = app.add_subcommand("translate", "Translate DNA/RNA with the standard genetic code");
    tr->add_option("input", input_, "Sequence file (FASTA or raw), '-' for stdin")->capture_default_str();
    tr->add_option("--frame", o_.frame, "Reading frame: 1, 2, 3 or -1, -2, -3")
        ->check(CLI::IsMember({1, 2, 3, -1, -2, -3}))
        ->capture_default_str();
    tr->add_option("--stop", o_.stop, "At stop codons: run (emit '*') or halt")
        ->check(CLI::IsMember({"run", "halt"}))
        ->capture_default_str();
    tr->add_flag("--six", o_.six, "Translate all six frames");
    on(tr, [this] {
        Loaded l = load(input_, "auto");
        StopPolicy policy = o_.stop == "halt" ? StopPolicy::HaltAtStop : StopPolicy::RunThrough;
        std::vector<std::pair<int, Sequence>> products;
        for (const auto& s : l.seqs) {
            if (o_.six) {
                auto frames = six_frame(s);
                std::vector<std::pair<int, Sequence>> ordered(frames.begin(), frames.end());
                std::sort(ordered.begin(), ordered.end(),
                          [](const auto& a, const auto& b) { return frame_rank(a.first) < frame_rank(b.first); });
                for (auto& [f, p] : ordered) {
                    if (policy == StopPolicy::HaltAtStop) {
                        std::string r = p.residues();
                        r = r.substr(0, r.find(kStopSymbol));
                        p = Sequence(p.id(), p.description(), AlphabetKind::Protein, r);
                    }
                    products.emplace_back(f, p);
                }
                continue;
            }
            if (o_.frame > 0)
                products.emplace_back(o_.frame, translate(s, std::size_t(o_.frame - 1), policy));
            else
                products.emplace_back(o_.frame, translate(reverse_complement(s), std::size_t(-o_.frame - 1), policy));
        }
        if (json_) {
            json j = json::array();
            for (const auto& [f, p] : products)
                j.push_back({{"id", p.id()}, {"frame", frame_label(f)}, {"peptide", p.residues()}});
            emit_json(out_, j);
            return;
        }
        if (l.fasta) {
            std::vector<Sequence> seqs;
            for (const auto& [f, p] : products)
                seqs.push_back(p);
            out_ << render_fasta(FastaDoc{seqs});
            return;
        }
        for (const auto& [f, p] : products) {
            if (o_.six)
                out_ << frame_label(f) << "\t";
            out_ << p.residues() << "\n";
        }
    });

    auto* orf = app.add_subcommand("orf", "Open reading frames (ATG to stop) in all six frames");
    orf->add_option("input", input_, "Sequence file (FASTA or raw), '-' for stdin")->capture_default_str();
    orf->add_option("--min-length", o_.oopts.min_length, "Minimum ORF length in codons, stop excluded")->capture_default_str();
    orf->add_flag("--nested", o_.oopts.nested, "Also report in-frame ATGs inside an ORF");
    orf->add_flag("--open-ended", o_.oopts.open_ended, "Keep ORFs that run off the end without a stop");
    on(orf, [this] {
        Loaded l = load(input_, "dna");
        json j = json::array();
        std::size_t found = 0;
        if (!json_)
            out_ << "id\tframe\tstart\tend\tlength\tstop\tpeptide\n";
        for (const auto& s : l.seqs)
            for (const auto& o : find_orfs(s, o_.oopts)) {
                ++found;
                if (json_) {
                    j.push_back({{"id", s.id()}, {"frame", frame_label(o.frame)}, {"start", o.begin + 1}, {"end", o.end},
                                 {"length", o.peptide.size()}, {"stop", o.has_stop}, {"peptide", o.peptide.residues()}});
                    continue;
                }
                out_ << s.id() << "\t" << frame_label(o.frame) << "\t" << o.begin + 1 << "\t" << o.end << "\t"
                     << o.peptide.size() << "\t" << (o.has_stop ? "yes" : "no") << "\t" << o.peptide.residues() << "\n";
            }
        if (json_)
            emit_json(out_, j);
        if (!found)
            no_result("no open reading frames");
    });

    auto* sp = app.add_subcommand("splice", "GT...AG intron candidates");
    sp->add_option("input", input_, "Sequence file (FASTA or raw), '-' for stdin")->capture_default_str();
    sp->add_option("--min-intron", o_.sopts.min_intron, "Minimum intron length")->capture_default_str();
    sp->add_option("--max-intron", o_.sopts.max_intron, "Maximum intron length")->capture_default_str();
    on(sp, [this] {
        Loaded l = load(input_, "dna");
        json j = json::array();
        std::size_t found = 0;
        if (!json_)
            out_ << "id\tdonor\tacceptor\tlength\n";
        for (const auto& s : l.seqs)
            for (const auto& c : splice_candidates(s, o_.sopts)) {
                ++found;
                if (json_) {
                    j.push_back({{"id", s.id()}, {"donor", c.donor + 1}, {"acceptor", c.acceptor + 1}, {"length", c.span()}});
                    continue;
                }
                out_ << s.id() << "\t" << c.donor + 1 << "\t" << c.acceptor + 1 << "\t" << c.span() << "\n";
            }
        if (json_)
            emit_json(out_, j);
        if (!found)
            no_result("no splice candidates");
    });
}

// -------------------------------------------------------------------- align

void Runner::build_align(CLI::App& app)
{
    auto* al = app.add_subcommand("align", "Pairwise alignment rendered in BLAST style");
    al->add_option("query", input_, "Query sequence file")->required();
    al->add_option("subject", input2_, "Subject sequence file")->required();
    al->add_option("--mode", o_.align_mode, "global (Needleman-Wunsch) or local (Smith-Waterman)")
        ->check(CLI::IsMember({"global", "local"}))
        ->capture_default_str();
    al->add_option("--width", o_.align_width, "Alignment columns per output block")->capture_default_str();
    al->add_option("--alphabet", alphabet_, "Alphabet: auto, dna, rna or protein")
        ->check(CLI::IsMember(kAlphabetNames))
        ->capture_default_str();
    score_.attach(al);
    on(al, [this] {
        Sequence a = load_first(input_, alphabet_);
        Sequence b = load_first(input2_, alphabet_);
        ScoringScheme sc = score_.scheme(a.alphabet_kind());
        Alignment r = o_.align_mode == "local" ? smith_waterman(a, b, sc) : needleman_wunsch(a, b, sc);
        if (json_) {
            json j = alignment_json(r);
            j["mode"] = o_.align_mode;
            j["query"] = a.id();
            j["subject"] = b.id();
            emit_json(out_, j);
        } else {
            out_ << render_blast(r, a.id(), b.id(), sc, RenderOptions{o_.align_width});
        }
        if (r.empty())
            no_result("empty alignment");
    });

    auto* se = app.add_subcommand("search", "k-tuple seeded search of a query against a FASTA database");
    se->add_option("query", input_, "Query sequence file")->required();
    se->add_option("database", input2_, "FASTA database")->required();
    se->add_option("--k", o_.k, "Word length (default 3 for protein, 8 for nucleotides)");
    se->add_option("--threshold", o_.search_threshold, "Minimum ungapped segment score")->capture_default_str();
    se->add_option("--dropoff", o_.dropoff, "X-drop for ungapped extension (default 5 x match)");
    se->add_flag("--no-dropoff", o_.no_dropoff, "Extend seeds without an X-drop cut");
    se->add_option("--threads", o_.search_threads, "Worker threads (0 = hardware)")->capture_default_str();
    se->add_option("--max-hits", o_.max_hits, "Report at most this many hits (0 = all)")->capture_default_str();
    se->add_flag("--render", o_.render, "Print each hit as a BLAST-style block");
    se->add_option("--alphabet", alphabet_, "Alphabet: auto, dna, rna or protein")
        ->check(CLI::IsMember(kAlphabetNames))
        ->capture_default_str();
    score_.attach(se);
    on(se, [this] {
        Sequence q = load_first(input_, alphabet_);
        Loaded db = load(input2_, alphabet_ != "auto" ? alphabet_ : alphabet_name(q.alphabet_kind()));
        ScoringScheme sc = score_.scheme(q.alphabet_kind());
        KtupOptions o;
        o.k = o_.k.value_or(q.alphabet_kind() == AlphabetKind::Protein ? 3 : 8);
        o.threshold = o_.search_threshold;
        o.dropoff = o_.dropoff;
        o.unlimited_dropoff = o_.no_dropoff;
        o.threads = o_.search_threads;
        auto hits = ktup_search(q, db.seqs, sc, o);
        if (o_.max_hits && hits.size() > o_.max_hits)
            hits.resize(o_.max_hits);
        if (json_) {
            json j = json::array();
            for (const auto& h : hits) {
                json a = alignment_json(h.hsp.alignment);
                a["subject"] = h.record_id;
                a["diagonal"] = h.hsp.diagonal;
                a["ungapped_score"] = h.hsp.ungapped_score;
                j.push_back(a);
            }
            emit_json(out_, j);
        } else if (o_.render) {
            for (std::size_t i = 0; i < hits.size(); ++i)
                out_ << (i ? "\n" : "") << render_blast(hits[i].hsp.alignment, q.id(), hits[i].record_id, sc);
        } else {
            out_ << "subject\tscore\tquery_start\tquery_end\tsubject_start\tsubject_end\tidentities\tpositives\tgaps\tlength\n";
            for (const auto& h : hits) {
                const Alignment& a = h.hsp.alignment;
                out_ << h.record_id << "\t" << a.score << "\t" << a.query_start << "\t" << a.query_end << "\t"
                     << a.subject_start << "\t" << a.subject_end << "\t" << a.identities << "\t" << a.positives << "\t"
                     << a.gaps << "\t" << a.length() << "\n";
            }
        }
        if (hits.empty())
            no_result("no hits");
    });
}

// --------------------------------------------------------------------- scan

void Runner::build_scan(CLI::App& app)
{
    auto* sc = app.add_subcommand("scan", "Scan proteins for a PROSITE-style pattern");
    sc->add_option("pattern", o_.pattern, "Pattern, e.g. C-x(2,4)-C-x(3)-[LIVMFYWC]")->required();
    sc->add_option("input", input_, "Protein file (FASTA or raw), '-' for stdin")->capture_default_str();
    sc->add_flag("--canonical", o_.canonical, "Print the parsed pattern in canonical form and exit");
    on(sc, [this] {
        MotifPattern p = parse_prosite(o_.pattern);
        if (o_.canonical) {
            if (json_)
                emit_json(out_, {{"pattern", p.canonical()}, {"elements", p.elements().size()},
                                 {"min_span", p.min_span()}, {"max_span", p.max_span()}});
            else
                out_ << p.canonical() << "\n";
            return;
        }
        Loaded l = load(input_, "protein");
        json j = json::array();
        std::size_t found = 0;
        if (!json_)
            out_ << "id\tstart\tend\tmatch\n";
        for (const auto& s : l.seqs)
            for (const auto& m : scan_motif(p, s)) {
                ++found;
                std::string text = s.residues().substr(m.begin, m.end - m.begin);
                if (json_) {
                    j.push_back({{"id", s.id()}, {"start", m.begin + 1}, {"end", m.end}, {"match", text}});
                    continue;
                }
                out_ << s.id() << "\t" << m.begin + 1 << "\t" << m.end << "\t" << text << "\n";
            }
        if (json_)
            emit_json(out_, j);
        if (!found)
            no_result("pattern not found");
    });
}

// ---------------------------------------------------------------- structure

void Runner::build_structure(CLI::App& app)
{
    auto* ss = app.add_subcommand("predict2s", "Secondary-structure heuristics from hydrophobic periodicity");
    ss->require_subcommand(1);

    auto* pr = ss->add_subcommand("predict", "Per-residue H/E/C labels");
    pr->add_option("input", input_, "Protein file (FASTA or raw), '-' for stdin")->capture_default_str();
    pr->add_option("--hydrophobic", o_.popts.hydrophobic, "Residues treated as hydrophobic")->capture_default_str();
    pr->add_option("--min-helix", o_.popts.min_helix_window, "Minimum helix range length")->capture_default_str();
    pr->add_option("--min-alt", o_.popts.strand.min_alternating, "Minimum alternating stretch for a half-buried strand")
        ->capture_default_str();
    pr->add_option("--min-run", o_.popts.strand.min_run, "Minimum hydrophobic run for a buried strand")->capture_default_str();
    on(pr, [this] {
        Loaded l = load(input_, "protein");
        json j = json::array();
        for (const auto& s : l.seqs) {
            SsPrediction p = predict_periodicity(s, o_.popts);
            if (json_) {
                j.push_back({{"id", s.id()}, {"method", p.method}, {"labels", p.labels}, {"confidence", p.confidence}});
                continue;
            }
            if (l.seqs.size() > 1)
                out_ << "# " << s.id() << "\n";
            out_ << render_prediction(s, p);
        }
        if (json_)
            emit_json(out_, j);
    });

    auto* prof = ss->add_subcommand("profile", "Hydropathy moving-average profile");
    prof->add_option("input", input_, "Protein file (FASTA or raw), '-' for stdin")->capture_default_str();
    prof->add_option("--window", o_.profile_window, "Odd window length")->capture_default_str();
    prof->add_option("--scale", o_.scale_path, "Scale file of residue<TAB>value lines (default: Kyte-Doolittle)");
    on(prof, [this] {
        Loaded l = load(input_, "protein");
        HydropathyScale scale = o_.scale_path.empty() ? HydropathyScale::kyte_doolittle() : HydropathyScale::load(o_.scale_path);
        json j = json::array();
        for (const auto& s : l.seqs) {
            auto values = hydropathy_profile(s, scale, o_.profile_window);
            if (json_) {
                j.push_back({{"id", s.id()}, {"scale", scale.name()}, {"window", o_.profile_window}, {"values", values}});
                continue;
            }
            if (l.seqs.size() > 1)
                out_ << "# " << s.id() << "\n";
            for (std::size_t i = 0; i < values.size(); ++i)
                out_ << i + 1 << "\t" << s[i] << "\t" << fmt("%.4f", values[i]) << "\n";
        }
        if (json_)
            emit_json(out_, j);
    });

    auto* co = ss->add_subcommand("consensus", "Weighted per-residue vote over exported predictions");
    co->add_option("predictions", inputs_list_, "Prediction files (index, residue, label, confidence)")->required();
    co->add_option("--weights", o_.weights, "Comma-separated weights, one per file (default: equal)")->delimiter(',');
    on(co, [this] {
        std::vector<SsPrediction> preds;
        std::string residues;
        for (const auto& path : inputs_list_) {
            std::string text = inputs_.read(path);
            preds.push_back(parse_prediction(text, path));
            if (residues.empty()) {
                std::istringstream in(text);
                std::string line;
                while (std::getline(in, line)) {
                    std::istringstream cells(line);
                    std::string idx, res;
                    if (!line.empty() && line[0] != '#' && cells >> idx >> res)
                        residues += res;
                }
            }
        }
        std::vector<double> w = o_.weights.empty() ? std::vector<double>(preds.size(), 1.0) : o_.weights;
        SsPrediction c = consensus(preds, w);
        if (json_) {
            emit_json(out_, {{"method", c.method}, {"labels", c.labels}, {"confidence", c.confidence}});
            return;
        }
        out_ << render_prediction(validate(residues, AlphabetKind::Protein, {true, true, "consensus", ""}), c);
    });
}

// ---------------------------------------------------------------------- pmf

void Runner::build_pmf(CLI::App& app)
{
    auto* pmf = app.add_subcommand("pmf", "Peptide mass fingerprinting");
    pmf->require_subcommand(1);

    auto rule = [this] {
        if (o_.rules_path.empty())
            return find_digest_rule(o_.enzyme, o_.missed);
        std::ifstream f(o_.rules_path);
        if (!f)
            throw Error(ErrorCode::Io, "cannot read " + o_.rules_path);
        std::ostringstream buf;
        buf << f.rdbuf();
        for (auto r : parse_digest_rules(buf.str()))
            if (r.name == o_.enzyme) {
                r.missed_cleavages = o_.missed;
                return r;
            }
        throw Error(ErrorCode::InvalidArgument, "enzyme '" + o_.enzyme + "' is not in " + o_.rules_path);
    };
    auto table = [this] {
        MassTable t = o_.masses_path.empty() ? MassTable::monoisotopic() : MassTable::load(o_.masses_path);
        return o_.no_cam ? t.without_modifications() : t;
    };
    auto enzyme_opts = [&](CLI::App* s) {
        s->add_option("--enzyme", o_.enzyme, "Digest rule name")->capture_default_str();
        s->add_option("--missed", o_.missed, "Missed cleavages allowed")->capture_default_str();
        s->add_option("--rules", o_.rules_path, "Rules file (name<TAB>cleave-after<TAB>blocked-by-next)");
    };
    auto mass_opts = [&](CLI::App* s) {
        s->add_option("--masses", o_.masses_path, "Mass table file (default: bundled monoisotopic)");
        s->add_flag("--no-carbamidomethyl", o_.no_cam, "Drop fixed modifications such as carbamidomethyl-C");
    };

    auto* dg = pmf->add_subcommand("digest", "In-silico digest with peptide masses");
    dg->add_option("input", input_, "Protein file (FASTA or raw), '-' for stdin")->capture_default_str();
    enzyme_opts(dg);
    mass_opts(dg);
    on(dg, [this, rule, table] {
        Loaded l = load(input_, "protein");
        DigestRule r = rule();
        MassTable t = table();
        json j = json::array();
        if (!json_)
            out_ << "peptide\tresidues\tmass\n";
        for (const auto& s : l.seqs)
            for (const auto& p : digest(s, r)) {
                double m = peptide_mass(p, t);
                if (json_) {
                    j.push_back({{"peptide", p.id()}, {"residues", p.residues()}, {"mass", m}});
                    continue;
                }
                out_ << p.id() << "\t" << p.residues() << "\t" << fmt("%.5f", m) << "\n";
            }
        if (json_)
            emit_json(out_, j);
    });

    auto* ms = pmf->add_subcommand("mass", "Monoisotopic mass of peptides");
    ms->add_option("peptides", inputs_list_, "Peptides (default: one per line on stdin)");
    mass_opts(ms);
    on(ms, [this, table] {
        std::vector<std::string> peptides = inputs_list_;
        if (peptides.empty()) {
            std::istringstream in(inputs_.read("-"));
            std::string line;
            while (std::getline(in, line)) {
                line.erase(0, line.find_first_not_of(" \t\r"));
                line.erase(line.find_last_not_of(" \t\r") + 1);
                if (!line.empty())
                    peptides.push_back(line);
            }
        }
        MassTable t = table();
        json j = json::array();
        for (const auto& p : peptides) {
            Sequence s = validate(p, AlphabetKind::Protein);
            double m = peptide_mass(s, t);
            if (json_)
                j.push_back({{"peptide", s.residues()}, {"mass", m}});
            else
                out_ << s.residues() << "\t" << fmt("%.5f", m) << "\n";
        }
        if (json_)
            emit_json(out_, j);
    });

    auto* id = pmf->add_subcommand("identify", "Rank database proteins against a peak list");
    id->add_option("peaks", input_, "Peak list, one mass per line")->required();
    id->add_option("database", input2_, "FASTA protein database")->required();
    id->add_option("--tolerance", o_.tolerance, "Match tolerance")->capture_default_str();
    id->add_flag("--ppm", o_.ppm, "Tolerance is in ppm rather than Da");
    id->add_option("--threads", o_.pmf_threads, "Worker threads (0 = hardware)")->capture_default_str();
    enzyme_opts(id);
    mass_opts(id);
    on(id, [this, rule, table] {
        Fingerprint f(parse_peak_list(inputs_.read(input_)), o_.tolerance, o_.ppm ? ToleranceUnit::Ppm : ToleranceUnit::Dalton);
        Loaded db = load(input2_, "protein");
        std::vector<PmfEntry> entries;
        for (const auto& s : db.seqs)
            entries.push_back({s.id(), s});
        auto hits = identify(f, entries, rule(), table(), o_.pmf_threads);
        if (json_) {
            json j = json::array();
            for (std::size_t i = 0; i < hits.size(); ++i)
                j.push_back({{"rank", i + 1}, {"accession", hits[i].accession}, {"matched", hits[i].matched},
                             {"total", hits[i].total}, {"score", hits[i].score}});
            emit_json(out_, j);
        } else {
            out_ << render_pmf_tsv(hits);
        }
        if (hits.empty() || hits.front().matched == 0)
            no_result("no peak matched");
    });
}

// ----------------------------------------------------------------------- db

void Runner::build_db(CLI::App& app)
{
    auto* db = app.add_subcommand("db", "Local databank: ingest, boolean query, neighbors");
    db->require_subcommand(1);
    db->add_option("--data", o_.data_dir, "Data directory")->envname("SEQFORGE_DATA")->required();

    auto* in = db->add_subcommand("ingest", "Add GenBank, FASTA or JSON records");
    in->add_option("files", inputs_list_, "Input files, '-' for stdin")->required();
    on(in, [this] {
        std::vector<Record> records;
        for (const auto& path : inputs_list_) {
            std::string text = inputs_.read(path);
            std::size_t first = text.find_first_not_of(" \t\r\n");
            if (first == std::string::npos)
                continue;
            if (text.compare(first, 5, "LOCUS") == 0) {
                for (const auto& gb : parse_genbank(text))
                    records.push_back(record_from_genbank(gb));
            } else if (text[first] == '>') {
                for (auto& r : records_from_fasta(parse_fasta(text, FastaOptions{std::nullopt, lenient_})))
                    records.push_back(std::move(r));
            } else if (text[first] == '[' || text[first] == '{') {
                for (auto& r : records_from_json(text))
                    records.push_back(std::move(r));
            } else {
                throw Error(ErrorCode::InvalidArgument, path + " is not GenBank, FASTA or JSON");
            }
        }
        Store store = Store::open(o_.data_dir);
        std::size_t added = store.ingest(records);
        if (json_)
            emit_json(out_, {{"ingested", added}, {"total", store.size()}});
        else
            out_ << "ingested\t" << added << "\ntotal\t" << store.size() << "\n";
    });

    auto* q = db->add_subcommand("query", "Boolean field query, e.g. 'dna [mh] AND crick [au]'");
    q->add_option("query", o_.query, "Query text")->required();
    q->add_flag("--explain", o_.explain, "Print the parsed query tree before the results");
    on(q, [this] {
        QueryPtr parsed = parse_query(o_.query);
        Store store = Store::open(o_.data_dir);
        auto hits = store.evaluate(*parsed);
        if (json_) {
            emit_json(out_, {{"query", parsed->to_string()}, {"count", hits.size()}, {"accessions", hits}});
        } else {
            if (o_.explain)
                out_ << "# " << parsed->to_string() << "\n";
            for (const auto& a : hits)
                out_ << a << "\n";
        }
        if (hits.empty())
            no_result("no records matched");
    });

    auto* get = db->add_subcommand("get", "Print a stored record as JSON");
    get->add_option("accession", o_.accession, "Record accession")->required();
    on(get, [this] {
        Store store = Store::open(o_.data_dir);
        auto r = store.get(o_.accession);
        if (!r) {
            no_result("no record " + o_.accession);
            return;
        }
        out_ << record_to_json(*r, 2) << "\n";
    });

    auto* nb = db->add_subcommand("neighbors", "Build or show similarity links between records");
    nb->add_option("--threshold", o_.nb_threshold, "Rebuild neighbors.tsv with this minimum alignment score");
    nb->add_option("--of", o_.of, "Only show links from this accession");
    nb->add_option("--threads", o_.nb_threads, "Worker threads (0 = hardware)")->capture_default_str();
    on(nb, [this] {
        Store store = Store::open(o_.data_dir);
        std::vector<NeighborLink> links;
        if (o_.nb_threshold) {
            links = build_neighbors(store, *o_.nb_threshold, std::nullopt, o_.nb_threads);
            store.save_neighbors(links);
        } else {
            links = store.load_neighbors();
        }
        if (!o_.of.empty())
            std::erase_if(links, [this](const NeighborLink& l) { return l.from != o_.of; });
        if (json_) {
            json j = json::array();
            for (const auto& l : links)
                j.push_back({{"from", l.from}, {"to", l.to}, {"score", l.score}, {"method", l.method}});
            emit_json(out_, j);
        } else {
            out_ << render_neighbors_tsv(links);
        }
        if (links.empty())
            no_result("no neighbor links");
    });
}

// --------------------------------------------------------------------- tree

void Runner::build_tree(CLI::App& app)
{
    auto* tree = app.add_subcommand("tree", "Distance matrices and UPGMA trees");
    tree->require_subcommand(1);

    auto* dm = tree->add_subcommand("distmat", "Pairwise 1 - identity distances from global alignments");
    dm->add_option("input", input_, "FASTA file, '-' for stdin")->capture_default_str();
    score_.attach(dm);
    on(dm, [this] {
        Loaded l = load(input_, "auto");
        DistanceMatrix m = distance_matrix(l.seqs, score_.scheme(l.seqs.front().alphabet_kind()));
        if (json_)
            emit_json(out_, {{"labels", m.labels}, {"values", m.values}});
        else
            out_ << render_distance_tsv(m);
    });

    auto* up = tree->add_subcommand("upgma", "UPGMA tree from a distance matrix TSV");
    up->add_option("matrix", input_, "Distance matrix TSV, '-' for stdin")->capture_default_str();
    on(up, [this] {
        Tree t = upgma(parse_distance_tsv(inputs_.read(input_)));
        if (json_) {
            json leaves = json::object();
            auto depths = t.leaf_depths();
            std::size_t k = 0;
            for (const auto& n : t.nodes)
                if (n.children.empty())
                    leaves[n.label] = depths[k++];
            emit_json(out_, {{"newick", t.newick()}, {"leaf_depths", leaves}});
        } else {
            out_ << t.newick() << "\n";
        }
    });
}

} // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sequence analysis toolkit", "seqforge"};
    app.set_config("--config", "", "Read option defaults from a key = value file");
    app.fallthrough();
    app.require_subcommand(1);

    Runner runner(in, out);
    runner.build(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e, out, err);
        err << "ERROR:Usage:" << e.what() << "\n";
        return kUsage;
    }

    try {
        return runner.dispatch();
    } catch (const UsageError& e) {
        err << "ERROR:Usage:" << e.what() << "\n";
        return kUsage;
    } catch (const NoResult& e) {
        out.flush();
        err << "ERROR:NoResult:" << e.what() << "\n";
        return kNoResult;
    } catch (const Error& e) {
        err << "ERROR:" << to_string(e.code()) << ":" << e.what();
        if (e.position() && std::string_view(e.what()).find("position") == std::string_view::npos)
            err << " (position " << *e.position() << ")";
        err << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "ERROR:Io:" << e.what() << "\n";
        return kDataError;
    }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"seqforge"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data(), in, out, err);
}

} // namespace seqforge::cli
