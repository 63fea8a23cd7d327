#include "seqforge/pmf.hpp"

#include "seqforge/data.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

namespace seqforge {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, '\t'))
        cells.push_back(trim(cell));
    return cells;
}

double parse_number(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v))
            return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "bad number '" + s + "' in " + what);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

bool DigestRule::cleaves(char residue, char next) const noexcept
{
    return cleave_after.find(residue) != std::string::npos && blocked_by_next.find(next) == std::string::npos;
}

std::vector<DigestRule> parse_digest_rules(std::string_view text)
{
    std::vector<DigestRule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto cells = split_tabs(t);
        if (cells.size() != 3 || cells[0].empty() || cells[1].empty() || cells[1] == "-")
            throw Error(ErrorCode::InvalidArgument, "bad digest rule line: " + t);
        DigestRule r{cells[0], cells[1], cells[2] == "-" ? "" : cells[2], 0};
        for (auto* set : {&r.cleave_after, &r.blocked_by_next})
            for (char& c : *set) {
                c = char(std::toupper((unsigned char)c));
                if (!Alphabet::protein().contains(c))
                    throw Error(ErrorCode::InvalidResidue, "digest rule '" + r.name + "' names residue " + c);
            }
        rules.push_back(std::move(r));
    }
    return rules;
}

const std::vector<DigestRule>& bundled_digest_rules()
{
    static const std::vector<DigestRule> rules = parse_digest_rules(data::digest_rules());
    return rules;
}

DigestRule find_digest_rule(std::string_view name, std::size_t missed_cleavages)
{
    for (const auto& r : bundled_digest_rules())
        if (r.name == name) {
            DigestRule out = r;
            out.missed_cleavages = missed_cleavages;
            return out;
        }
    throw Error(ErrorCode::InvalidArgument, "unknown enzyme '" + std::string(name) + "'");
}

MassTable::MassTable(double water, std::map<char, double> residues, std::vector<Modification> fixed)
    : water_(water), residues_(std::move(residues)), fixed_(std::move(fixed))
{
    if (!(water_ > 0.0))
        throw Error(ErrorCode::InvalidArgument, "water mass must be positive");
    for (char c : Alphabet::protein().symbols()) {
        auto it = residues_.find(c);
        if (it == residues_.end() || !(it->second > 0.0))
            throw Error(ErrorCode::InvalidArgument, std::string("mass table lacks a positive mass for ") + c);
    }
    modified_ = residues_;
    for (const auto& m : fixed_) {
        if (!residues_.count(m.residue))
            throw Error(ErrorCode::UnknownResidue, "modification '" + m.name + "' targets an unknown residue");
        modified_[m.residue] += m.delta;
    }
}

MassTable MassTable::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    double water = 0.0;
    std::map<char, double> residues;
    std::vector<Modification> mods;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto cells = split_tabs(t);
        if (cells.size() == 4 && cells[0] == "mod" && cells[2].size() == 1) {
            mods.push_back({cells[1], char(std::toupper((unsigned char)cells[2][0])), parse_number(cells[3], "mass table")});
        } else if (cells.size() == 2 && cells[0] == "water") {
            water = parse_number(cells[1], "mass table");
        } else if (cells.size() == 2 && cells[0].size() == 1) {
            char r = char(std::toupper((unsigned char)cells[0][0]));
            if (!Alphabet::protein().contains(r))
                throw Error(ErrorCode::InvalidResidue, "mass table names residue " + cells[0]);
            residues[r] = parse_number(cells[1], "mass table");
        } else {
            throw Error(ErrorCode::InvalidArgument, "bad mass table line: " + t);
        }
    }
    return MassTable(water, std::move(residues), std::move(mods));
}

MassTable MassTable::load(const std::string& path)
{
    return parse(read_file(path));
}

const MassTable& MassTable::monoisotopic()
{
    static const MassTable table = parse(data::monoisotopic_masses());
    return table;
}

MassTable MassTable::without_modifications() const
{
    return MassTable(water_, residues_);
}

double MassTable::residue_mass(char residue) const
{
    auto it = modified_.find(residue);
    if (it == modified_.end())
        throw Error(ErrorCode::UnknownResidue, std::string("no mass for residue '") + residue + "'");
    return it->second;
}

std::vector<Sequence> digest(const Sequence& protein, const DigestRule& rule)
{
    if (protein.alphabet_kind() != AlphabetKind::Protein)
        throw Error(ErrorCode::WrongAlphabet, "sequence '" + protein.id() + "' is not a protein");
    const std::string& r = protein.residues();
    std::vector<std::size_t> cuts{0};
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (rule.cleaves(r[i], r[i + 1]))
            cuts.push_back(i + 1);
    cuts.push_back(r.size());
    if (r.empty())
        return {};

    std::vector<Sequence> out;
    const std::size_t pieces = cuts.size() - 1;
    for (std::size_t span = 1; span <= std::min(pieces, rule.missed_cleavages + 1); ++span)
        for (std::size_t b = 0; b + span <= pieces; ++b) {
            std::size_t from = cuts[b], to = cuts[b + span];
            out.push_back(make_sequence(protein.id() + "_" + std::to_string(from + 1) + "-" + std::to_string(to),
                                        AlphabetKind::Protein, r.substr(from, to - from)));
        }
    return out;
}

double peptide_mass(std::string_view peptide, const MassTable& table)
{
    if (peptide.empty())
        throw Error(ErrorCode::EmptySequence, "empty peptide has no mass");
    double m = table.water();
    for (char c : peptide)
        m += table.residue_mass(c);
    return m;
}

double peptide_mass(const Sequence& peptide, const MassTable& table)
{
    return peptide_mass(std::string_view(peptide.residues()), table);
}

Fingerprint::Fingerprint(std::vector<double> peaks, double tolerance, ToleranceUnit unit)
    : peaks_(std::move(peaks)), tolerance_(tolerance), unit_(unit)
{
    if (!(tolerance_ > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    for (double p : peaks_)
        if (!std::isfinite(p) || p <= 0.0)
            throw Error(ErrorCode::InvalidArgument, "peak masses must be positive");
    std::sort(peaks_.begin(), peaks_.end());
}

double Fingerprint::window(double mass) const noexcept
{
    return unit_ == ToleranceUnit::Dalton ? tolerance_ : mass * tolerance_ * 1e-6;
}

std::vector<double> parse_peak_list(std::string_view text)
{
    std::vector<double> peaks;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        peaks.push_back(parse_number(t, "peak list"));
    }
    return peaks;
}

std::size_t count_matches(const Fingerprint& f, std::vector<double> theoretical)
{
    std::sort(theoretical.begin(), theoretical.end());
    // Both window edges grow with the peak mass, so the greedy sweep that
    // takes the lightest still-available mass is a maximum matching.
    std::size_t matched = 0, j = 0;
    for (double peak : f.peaks()) {
        const double w = f.window(peak);
        while (j < theoretical.size() && theoretical[j] < peak - w)
            ++j;
        if (j < theoretical.size() && theoretical[j] <= peak + w) {
            ++matched;
            ++j;
        }
    }
    return matched;
}

std::vector<PmfHit> identify(const Fingerprint& f, const std::vector<PmfEntry>& db, const DigestRule& rule,
                             const MassTable& table, std::size_t threads)
{
    if (db.empty())
        throw Error(ErrorCode::InvalidArgument, "identification needs a non-empty database");
    std::vector<PmfHit> hits(db.size());
    std::vector<std::exception_ptr> failures(db.size());
    auto work = [&](std::size_t i) {
        try {
            std::vector<double> masses;
            for (const auto& pep : digest(db[i].protein, rule))
                masses.push_back(peptide_mass(pep, table));
            PmfHit& h = hits[i];
            h.entry = i;
            h.accession = db[i].accession;
            h.total = f.peaks().size();
            h.theoretical = masses.size();
            h.matched = count_matches(f, std::move(masses));
            h.score = h.total ? double(h.matched) / double(h.total) : 0.0;
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, db.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < db.size(); ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < db.size();)
                    work(i);
            });
    }
    for (auto& e : failures)
        if (e)
            std::rethrow_exception(e);

    std::sort(hits.begin(), hits.end(), [](const PmfHit& a, const PmfHit& b) {
        return std::make_tuple(-a.score, a.theoretical, std::cref(a.accession), a.entry) <
               std::make_tuple(-b.score, b.theoretical, std::cref(b.accession), b.entry);
    });
    return hits;
}

std::string render_pmf_tsv(const std::vector<PmfHit>& hits)
{
    std::string out = "rank\taccession\tmatched\ttotal\tscore\n";
    char buf[64];
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const PmfHit& h = hits[i];
        out += std::to_string(i + 1) + "\t" + h.accession + "\t";
        std::snprintf(buf, sizeof buf, "%zu\t%zu\t%.4f\n", h.matched, h.total, h.score);
        out += buf;
    }
    return out;
}

} // namespace seqforge
