#include "seqforge/seq_core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace seqforge {

std::string_view to_string(AlphabetKind kind)
{
    switch (kind) {
    case AlphabetKind::DNA: return "DNA";
    case AlphabetKind::RNA: return "RNA";
    case AlphabetKind::Protein: return "Protein";
    }
    return "?";
}

const Alphabet& Alphabet::dna()
{
    static const Alphabet a(AlphabetKind::DNA, "ACGT", 'N', "NRYKMSWBDHV");
    return a;
}

const Alphabet& Alphabet::rna()
{
    static const Alphabet a(AlphabetKind::RNA, "ACGU", 'N', "NRYKMSWBDHV");
    return a;
}

const Alphabet& Alphabet::protein()
{
    static const Alphabet a(AlphabetKind::Protein, "ACDEFGHIKLMNPQRSTVWY", 'X', "XBZJUO");
    return a;
}

const Alphabet& Alphabet::of(AlphabetKind kind)
{
    switch (kind) {
    case AlphabetKind::DNA: return dna();
    case AlphabetKind::RNA: return rna();
    case AlphabetKind::Protein: break;
    }
    return protein();
}

bool Alphabet::contains(char upper) const noexcept
{
    return symbols_.find(upper) != std::string_view::npos;
}

bool Alphabet::is_ambiguity_code(char upper) const noexcept
{
    return ambiguity_.find(upper) != std::string_view::npos;
}

namespace {

bool residue_allowed(const Alphabet& alphabet, char c)
{
    if (alphabet.contains(c) || c == alphabet.wildcard())
        return true;
    return alphabet.kind() == AlphabetKind::Protein && c == kStopSymbol;
}

char upper(char c)
{
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

bool is_space(char c)
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

} // namespace

Sequence::Sequence(std::string id, std::string description, AlphabetKind alphabet, std::string residues)
    : id_(std::move(id)), description_(std::move(description)), alphabet_(alphabet), residues_(std::move(residues))
{
    if (id_.empty() || std::any_of(id_.begin(), id_.end(), is_space))
        throw Error(ErrorCode::InvalidArgument, "sequence id must be a non-empty token: '" + id_ + "'");
    const Alphabet& a = Alphabet::of(alphabet_);
    for (std::size_t i = 0; i < residues_.size(); ++i)
        if (!residue_allowed(a, residues_[i]))
            throw InvalidResidueError(i, residues_[i]);
}

Sequence Sequence::with_id(std::string id, std::string description) const
{
    Sequence copy = *this;
    if (id.empty() || std::any_of(id.begin(), id.end(), is_space))
        throw Error(ErrorCode::InvalidArgument, "sequence id must be a non-empty token: '" + id + "'");
    copy.id_ = std::move(id);
    copy.description_ = std::move(description);
    return copy;
}

Sequence validate(std::string_view raw, AlphabetKind kind, const ValidateOptions& options)
{
    const Alphabet& alphabet = Alphabet::of(kind);
    std::string residues;
    residues.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (options.strip_whitespace && is_space(c))
            continue;
        char u = upper(c);
        if (alphabet.contains(u)) {
            residues.push_back(u);
        } else if (options.lenient && (alphabet.is_ambiguity_code(u) || u == alphabet.wildcard())) {
            residues.push_back(alphabet.wildcard());
        } else {
            throw InvalidResidueError(i, c);
        }
    }
    if (residues.empty())
        throw Error(ErrorCode::EmptySequence, "sequence '" + options.id + "' is empty");
    return Sequence(options.id, options.description, kind, std::move(residues));
}

Sequence make_sequence(std::string id, AlphabetKind alphabet, std::string residues, std::string description)
{
    return Sequence(std::move(id), std::move(description), alphabet, std::move(residues));
}

char complement_base(char base) noexcept
{
    switch (base) {
    case 'A': return 'T';
    case 'T': return 'A';
    case 'C': return 'G';
    case 'G': return 'C';
    default: return base;
    }
}

static void require_dna(const Sequence& s, std::string_view op)
{
    if (s.alphabet_kind() != AlphabetKind::DNA)
        throw Error(ErrorCode::WrongAlphabet,
                    std::string(op) + " requires DNA, got " + std::string(to_string(s.alphabet_kind())));
}

Sequence complement(const Sequence& s)
{
    require_dna(s, "complement");
    std::string out(s.residues());
    std::transform(out.begin(), out.end(), out.begin(), complement_base);
    return Sequence(s.id(), s.description(), AlphabetKind::DNA, std::move(out));
}

std::string reverse_complement(std::string_view dna)
{
    std::string out(dna.rbegin(), dna.rend());
    std::transform(out.begin(), out.end(), out.begin(), complement_base);
    return out;
}

Sequence reverse_complement(const Sequence& s)
{
    require_dna(s, "reverse_complement");
    return Sequence(s.id(), s.description(), AlphabetKind::DNA, reverse_complement(std::string_view(s.residues())));
}

ParityStats parity_stats(const Sequence& s)
{
    require_dna(s, "parity_stats");
    ParityStats p;
    for (char c : s.residues()) {
        switch (c) {
        case 'A': ++p.a; break;
        case 'C': ++p.c; break;
        case 'G': ++p.g; break;
        case 'T': ++p.t; break;
        default: ++p.other; break;
        }
    }
    auto deviation = [](std::size_t x, std::size_t y) {
        if (x + y == 0)
            return 0.0;
        double diff = x > y ? double(x - y) : double(y - x);
        return diff / double(x + y);
    };
    p.deviation_at = deviation(p.a, p.t);
    p.deviation_gc = deviation(p.g, p.c);
    return p;
}

double CompositionReport::fraction(std::string_view symbols) const
{
    std::size_t total = 0, hit = 0;
    for (const auto& [symbol, n] : totals) {
        total += n;
        if (symbols.find(symbol) != std::string_view::npos)
            hit += n;
    }
    return total == 0 ? 0.0 : double(hit) / double(total);
}

CompositionReport composition_windows(const Sequence& s, std::size_t window, std::size_t step, bool include_partial)
{
    if (window == 0 || step == 0)
        throw Error(ErrorCode::InvalidArgument, "window and step must be positive");
    if (window > s.size())
        throw Error(ErrorCode::WindowTooLarge,
                    "window " + std::to_string(window) + " exceeds sequence length " + std::to_string(s.size()));

    CompositionReport report;
    report.window = window;
    report.step = step;
    const std::string& r = s.residues();
    for (char c : r)
        ++report.totals[c];

    for (std::size_t offset = 0; offset < r.size(); offset += step) {
        std::size_t len = std::min(window, r.size() - offset);
        if (len < window && !include_partial)
            break;
        CompositionWindow w{offset, len, {}};
        for (std::size_t i = offset; i < offset + len; ++i)
            ++w.counts[r[i]];
        report.windows.push_back(std::move(w));
        if (offset + window >= r.size())
            break;
    }
    return report;
}

std::vector<Hairpin> find_hairpins(const Sequence& s, const HairpinOptions& options)
{
    require_dna(s, "find_hairpins");
    if (options.min_stem < 2)
        throw Error(ErrorCode::InvalidArgument, "min stem must be at least 2");
    if (options.max_loop < options.min_loop)
        throw Error(ErrorCode::InvalidArgument, "max loop is smaller than min loop");

    const std::string& r = s.residues();
    const std::size_t n = r.size();
    auto pairs_with = [&](std::size_t i, std::size_t j) {
        char ci = r[i];
        return ci != 'N' && complement_base(ci) == r[j] && r[j] != 'N';
    };

    std::vector<Hairpin> found;
    if (n < 2 * options.min_stem + options.min_loop)
        return found;

    // Walk each anti-diagonal (fixed i + j) from the innermost admissible pair
    // outwards; every maximal run of complementary pairs is one hairpin.
    for (std::size_t sum = options.min_loop + 1; sum <= 2 * (n - 1); ++sum) {
        std::size_t inner = (sum - 1 - options.min_loop) / 2;
        std::size_t run_inner = 0;
        std::size_t run_len = 0;
        auto flush = [&](std::size_t outer) {
            if (run_len >= options.min_stem) {
                std::size_t loop_begin = run_inner + 1;
                std::size_t loop_end = sum - run_inner;
                if (loop_end - loop_begin <= options.max_loop) {
                    Hairpin h;
                    h.stem_length = run_len;
                    h.loop_begin = loop_begin;
                    h.loop_end = loop_end;
                    for (std::size_t p = outer; p <= run_inner; ++p)
                        h.pairs.emplace_back(p, sum - p);
                    found.push_back(std::move(h));
                }
            }
            run_len = 0;
        };
        for (std::size_t p = inner + 1; p-- > 0;) {
            std::size_t q = sum - p;
            if (q >= n)
                break;
            if (pairs_with(p, q)) {
                if (run_len == 0)
                    run_inner = p;
                ++run_len;
            } else if (run_len > 0) {
                flush(p + 1);
            }
            if (p == 0 || sum - (p - 1) >= n) {
                if (run_len > 0)
                    flush(p);
                break;
            }
        }
    }

    std::sort(found.begin(), found.end(), [](const Hairpin& a, const Hairpin& b) {
        return std::tuple(a.begin(), b.stem_length, a.loop_begin) < std::tuple(b.begin(), a.stem_length, b.loop_begin);
    });
    return found;
}

namespace {

std::size_t overlap_length(const std::string& left, const std::string& right, std::size_t min_overlap)
{
    std::size_t limit = std::min(left.size(), right.size());
    for (std::size_t o = limit; o >= min_overlap && o > 0; --o)
        if (left.compare(left.size() - o, o, right, 0, o) == 0)
            return o;
    return 0;
}

std::size_t first_fragment(const Contig& c)
{
    std::size_t m = c.layout.front().fragment;
    for (const auto& p : c.layout)
        m = std::min(m, p.fragment);
    return m;
}

void absorb(Contig& host, Contig& guest, std::size_t offset)
{
    for (auto p : guest.layout) {
        p.offset += offset;
        host.layout.push_back(p);
    }
}

} // namespace

Assembly assemble_fragments(const std::vector<Sequence>& fragments, std::size_t min_overlap)
{
    if (fragments.empty())
        throw Error(ErrorCode::InvalidArgument, "assembly needs at least one fragment");
    if (min_overlap == 0)
        throw Error(ErrorCode::InvalidArgument, "min overlap must be at least 1");

    const std::size_t n = fragments.size();
    auto contains_fragment = [&](std::size_t outer, std::size_t inner) {
        const std::string& a = fragments[outer].residues();
        const std::string& b = fragments[inner].residues();
        if (a.size() < b.size() || a.find(b) == std::string::npos)
            return false;
        return a.size() > b.size() || outer < inner;
    };

    std::vector<Contig> contigs;
    std::vector<bool> contained(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n && !contained[i]; ++j)
            if (i != j && contains_fragment(j, i))
                contained[i] = true;

    // Each contained fragment is placed inside the lowest-index maximal
    // fragment holding it.
    std::vector<std::size_t> owner(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n && contained[j] && owner[j] == n; ++k)
            if (!contained[k] && contains_fragment(k, j))
                owner[j] = k;

    for (std::size_t i = 0; i < n; ++i) {
        if (contained[i])
            continue;
        Contig c{fragments[i].residues(), {{i, 0}}};
        for (std::size_t j = 0; j < n; ++j)
            if (owner[j] == i)
                c.layout.push_back({j, c.residues.find(fragments[j].residues())});
        contigs.push_back(std::move(c));
    }

    while (contigs.size() > 1) {
        std::size_t best_overlap = 0;
        std::string best_merged;
        std::size_t best_left = 0, best_right = 0;
        for (std::size_t x = 0; x < contigs.size(); ++x) {
            for (std::size_t y = 0; y < contigs.size(); ++y) {
                if (x == y)
                    continue;
                std::size_t o = overlap_length(contigs[x].residues, contigs[y].residues, min_overlap);
                if (o == 0 || o < best_overlap)
                    continue;
                std::string merged = contigs[x].residues + contigs[y].residues.substr(o);
                if (o > best_overlap || merged < best_merged) {
                    best_overlap = o;
                    best_merged = std::move(merged);
                    best_left = x;
                    best_right = y;
                }
            }
        }
        if (best_overlap == 0)
            break;

        Contig merged{best_merged, contigs[best_left].layout};
        absorb(merged, contigs[best_right], contigs[best_left].residues.size() - best_overlap);
        std::vector<Contig> next;
        for (std::size_t k = 0; k < contigs.size(); ++k) {
            if (k == best_left || k == best_right)
                continue;
            std::size_t at = merged.residues.find(contigs[k].residues);
            if (at != std::string::npos)
                absorb(merged, contigs[k], at);
            else
                next.push_back(std::move(contigs[k]));
        }
        next.push_back(std::move(merged));
        contigs = std::move(next);
    }

    for (auto& c : contigs)
        std::sort(c.layout.begin(), c.layout.end(),
                  [](const Placement& a, const Placement& b) { return a.fragment < b.fragment; });
    std::sort(contigs.begin(), contigs.end(),
              [](const Contig& a, const Contig& b) { return first_fragment(a) < first_fragment(b); });
    return Assembly{std::move(contigs)};
}

} // namespace seqforge
