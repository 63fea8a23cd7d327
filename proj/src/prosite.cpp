#include "seqforge/formats.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>

namespace seqforge {

bool MotifElement::accepts(char residue) const noexcept
{
    switch (kind) {
    case Kind::Literal: return !residues.empty() && residues[0] == residue;
    case Kind::AnySet: return residues.find(residue) != std::string::npos;
    case Kind::NoneOf: return residues.find(residue) == std::string::npos;
    case Kind::Wildcard: return true;
    }
    return false;
}

MotifPattern::MotifPattern(std::string source, std::vector<MotifElement> elements, bool anchored_start, bool anchored_end)
    : source_(std::move(source)), elements_(std::move(elements)), anchored_start_(anchored_start), anchored_end_(anchored_end)
{
    if (elements_.empty())
        throw Error(ErrorCode::EmptyPattern, "pattern has no elements");
    for (const auto& e : elements_) {
        if (e.max_repeat == 0 || e.min_repeat > e.max_repeat)
            throw Error(ErrorCode::InvalidArgument, "bad repeat bounds in pattern");
        if (e.kind != MotifElement::Kind::Wildcard && e.residues.empty())
            throw Error(ErrorCode::InvalidArgument, "empty residue set in pattern");
    }
}

std::size_t MotifPattern::min_span() const noexcept
{
    std::size_t n = 0;
    for (const auto& e : elements_)
        n += e.min_repeat;
    return n;
}

std::size_t MotifPattern::max_span() const noexcept
{
    std::size_t n = 0;
    for (const auto& e : elements_)
        n += e.max_repeat;
    return n;
}

std::string MotifPattern::canonical() const
{
    std::string out;
    if (anchored_start_)
        out += '<';
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        const auto& e = elements_[i];
        if (i > 0)
            out += '-';
        switch (e.kind) {
        case MotifElement::Kind::Literal: out += e.residues; break;
        case MotifElement::Kind::AnySet: out += '[' + e.residues + ']'; break;
        case MotifElement::Kind::NoneOf: out += '{' + e.residues + '}'; break;
        case MotifElement::Kind::Wildcard: out += 'x'; break;
        }
        if (e.min_repeat != e.max_repeat)
            out += '(' + std::to_string(e.min_repeat) + ',' + std::to_string(e.max_repeat) + ')';
        else if (e.min_repeat != 1)
            out += '(' + std::to_string(e.min_repeat) + ')';
    }
    if (anchored_end_)
        out += '>';
    return out;
}

bool MotifPattern::operator==(const MotifPattern& other) const
{
    return elements_ == other.elements_ && anchored_start_ == other.anchored_start_ &&
           anchored_end_ == other.anchored_end_;
}

namespace {

class PrositeParser {
public:
    explicit PrositeParser(std::string_view text) : text_(text) {}

    MotifPattern parse()
    {
        skip_space();
        if (pos_ == text_.size())
            throw Error(ErrorCode::EmptyPattern, "empty PROSITE pattern");
        bool anchored_start = false, anchored_end = false;
        if (peek() == '<') {
            anchored_start = true;
            ++pos_;
        }
        std::vector<MotifElement> elements;
        elements.push_back(element());
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '-') {
                if (anchored_end)
                    fail("'>' must end the pattern");
                ++pos_;
                elements.push_back(element());
            } else if (c == '>' && !anchored_end) {
                anchored_end = true;
                ++pos_;
            } else if (c == '.' && pos_ + 1 == end_of_content()) {
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c)) && pos_ >= end_of_content()) {
                ++pos_;
            } else {
                fail("unexpected character '" + std::string(1, c) + "'");
            }
        }
        return MotifPattern(std::string(text_), std::move(elements), anchored_start, anchored_end);
    }

private:
    [[noreturn]] void fail(const std::string& reason, std::optional<std::size_t> at = std::nullopt) const
    {
        std::size_t p = at.value_or(pos_);
        throw Error(ErrorCode::SyntaxError, "PROSITE syntax error at position " + std::to_string(p) + ": " + reason, p);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::size_t end_of_content() const
    {
        std::size_t e = text_.size();
        while (e > 0 && std::isspace(static_cast<unsigned char>(text_[e - 1])))
            --e;
        return e;
    }

    static bool residue(char c) { return Alphabet::protein().contains(c); }

    MotifElement element()
    {
        MotifElement e;
        char c = peek();
        if (c == 'x' || c == 'X') {
            e.kind = MotifElement::Kind::Wildcard;
            ++pos_;
        } else if (c == '[' || c == '{') {
            std::size_t open = pos_;
            char close = c == '[' ? ']' : '}';
            e.kind = c == '[' ? MotifElement::Kind::AnySet : MotifElement::Kind::NoneOf;
            ++pos_;
            while (pos_ < text_.size() && text_[pos_] != close) {
                if (!residue(text_[pos_]))
                    fail("'" + std::string(1, text_[pos_]) + "' is not an amino-acid code");
                if (e.residues.find(text_[pos_]) == std::string::npos)
                    e.residues.push_back(text_[pos_]);
                ++pos_;
            }
            if (pos_ == text_.size())
                fail("unterminated residue set", open);
            if (e.residues.empty())
                fail("empty residue set", open);
            ++pos_;
        } else if (residue(c)) {
            e.kind = MotifElement::Kind::Literal;
            e.residues = std::string(1, c);
            ++pos_;
        } else if (c == '\0') {
            fail("expected a pattern element");
        } else {
            fail("'" + std::string(1, c) + "' cannot start a pattern element");
        }

        if (peek() == '(') {
            std::size_t open = pos_;
            ++pos_;
            std::size_t lo = number();
            std::size_t hi = lo;
            if (peek() == ',') {
                ++pos_;
                hi = number();
            }
            if (peek() != ')')
                fail("expected ')'");
            ++pos_;
            if (hi == 0 || lo > hi || (lo == 0 && hi == lo))
                fail("repeat bounds must satisfy 0 <= min <= max, max >= 1", open);
            e.min_repeat = lo;
            e.max_repeat = hi;
        }
        return e;
    }

    std::size_t number()
    {
        std::size_t start = pos_;
        std::size_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + std::size_t(text_[pos_] - '0');
            if (v > 100000)
                fail("repeat count too large", start);
            ++pos_;
        }
        if (pos_ == start)
            fail("expected a number");
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct CompiledElement {
    std::uint32_t mask;
    bool any;
    std::size_t lo, hi;
};

std::uint32_t bit(char c)
{
    return (c >= 'A' && c <= 'Z') ? (1u << (c - 'A')) : (1u << 26);
}

std::vector<CompiledElement> compile(const MotifPattern& p)
{
    std::vector<CompiledElement> out;
    for (const auto& e : p.elements()) {
        std::uint32_t set = 0;
        for (char c : e.residues)
            set |= bit(c);
        CompiledElement ce{set, false, e.min_repeat, e.max_repeat};
        switch (e.kind) {
        case MotifElement::Kind::Literal:
        case MotifElement::Kind::AnySet: break;
        case MotifElement::Kind::NoneOf: ce.mask = ~set; break;
        case MotifElement::Kind::Wildcard: ce.any = true; ce.mask = ~0u; break;
        }
        out.push_back(ce);
    }
    return out;
}

} // namespace

MotifPattern parse_prosite(std::string_view pattern)
{
    return PrositeParser(pattern).parse();
}

std::vector<MotifMatch> scan_motif(const MotifPattern& pattern, const Sequence& protein)
{
    if (protein.alphabet_kind() != AlphabetKind::Protein)
        throw Error(ErrorCode::WrongAlphabet, "motif scanning requires a protein sequence");
    return scan_motif(pattern, std::string_view(protein.residues()));
}

std::vector<MotifMatch> scan_motif(const MotifPattern& pattern, std::string_view residues)
{
    const auto elements = compile(pattern);
    const std::size_t n = residues.size();
    const std::size_t min_span = pattern.min_span();
    std::vector<MotifMatch> hits;
    if (n < min_span)
        return hits;

    std::vector<std::uint32_t> bits(n);
    for (std::size_t i = 0; i < n; ++i)
        bits[i] = bit(residues[i]);

    const bool fixed = pattern.min_span() == pattern.max_span();
    const std::size_t last_start = pattern.anchored_start() ? 0 : n - min_span;

    std::vector<char> reach, next;
    for (std::size_t start = 0; start <= last_start; ++start) {
        if (fixed) {
            if (pattern.anchored_end() && start + min_span != n)
                continue;
            std::size_t p = start;
            bool ok = true;
            for (const auto& e : elements) {
                if (!e.any)
                    for (std::size_t k = 0; k < e.lo && ok; ++k)
                        ok = (bits[p + k] & e.mask) != 0;
                if (!ok)
                    break;
                p += e.lo;
            }
            if (ok)
                hits.push_back({start, start + min_span});
            continue;
        }

        // Variable-length elements: track the set of reachable end offsets.
        const std::size_t width = std::min(n - start, pattern.max_span()) + 1;
        reach.assign(width, 0);
        reach[0] = 1;
        bool alive = true;
        for (const auto& e : elements) {
            next.assign(width, 0);
            alive = false;
            for (std::size_t p = 0; p < width; ++p) {
                if (!reach[p])
                    continue;
                for (std::size_t k = 0; k <= e.hi && p + k < width; ++k) {
                    if (k >= e.lo) {
                        next[p + k] = 1;
                        alive = true;
                    }
                    if (p + k >= n - start || !(bits[start + p + k] & e.mask))
                        break;
                }
            }
            reach.swap(next);
            if (!alive)
                break;
        }
        if (!alive)
            continue;
        for (std::size_t p = 0; p < width; ++p) {
            if (!reach[p])
                continue;
            if (pattern.anchored_end() && start + p != n)
                continue;
            hits.push_back({start, start + p});
            break;
        }
    }
    return hits;
}

} // namespace seqforge
