#include "seqforge/align.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace seqforge {

ScoringScheme::ScoringScheme(int match, int mismatch, int similar, int gap, std::vector<std::string> groups,
                             std::optional<int> gap_open)
    : match_(match), mismatch_(mismatch), similar_(similar), gap_(gap), groups_(std::move(groups)), gap_open_(gap_open)
{
    if (!(match_ >= similar_ && similar_ >= mismatch_))
        throw Error(ErrorCode::InvalidArgument, "scores must satisfy match >= similar >= mismatch");
    if (gap_ >= 0)
        throw Error(ErrorCode::InvalidArgument, "gap penalty must be negative");
    if (gap_open_ && *gap_open_ > 0)
        throw Error(ErrorCode::InvalidArgument, "gap open penalty must not be positive");

    group_of_.fill(0);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        for (char c : groups_[g]) {
            std::size_t s = slot(c);
            if (s >= 26)
                throw Error(ErrorCode::InvalidArgument, "similarity groups take residue letters only");
            if (group_of_[s] != 0)
                throw Error(ErrorCode::InvalidArgument, std::string("residue ") + c + " is in two similarity groups");
            group_of_[s] = static_cast<unsigned char>(g + 1);
        }
    }
    for (std::size_t i = 0; i < kSlots; ++i)
        for (std::size_t j = 0; j < kSlots; ++j) {
            int v = mismatch_;
            if (i == j)
                v = match_;
            else if (group_of_[i] != 0 && group_of_[i] == group_of_[j])
                v = similar_;
            table_[i * kSlots + j] = v;
        }
}

ScoringScheme ScoringScheme::protein()
{
    return ScoringScheme(2, -1, 1, -2, {"DE", "KRH", "ILVM", "FYW", "ST", "NQ", "AG"});
}

ScoringScheme ScoringScheme::nucleotide()
{
    return ScoringScheme(1, -1, -1, -2);
}

ScoringScheme ScoringScheme::for_alphabet(AlphabetKind kind)
{
    return kind == AlphabetKind::Protein ? protein() : nucleotide();
}

bool ScoringScheme::same_group(char a, char b) const noexcept
{
    unsigned char g = group_of_[slot(a)];
    return g != 0 && g == group_of_[slot(b)];
}

ScoringScheme ScoringScheme::scaled(int factor) const
{
    if (factor <= 0)
        throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
    std::optional<int> open;
    if (gap_open_)
        open = *gap_open_ * factor;
    return ScoringScheme(match_ * factor, mismatch_ * factor, similar_ * factor, gap_ * factor, groups_, open);
}

void count_columns(Alignment& al, const ScoringScheme& scheme)
{
    al.identities = al.positives = al.gaps = 0;
    for (std::size_t i = 0; i < al.query_row.size(); ++i) {
        char q = al.query_row[i], s = al.subject_row[i];
        if (q == kGapSymbol || s == kGapSymbol) {
            ++al.gaps;
        } else if (q == s) {
            ++al.identities;
            ++al.positives;
        } else if (scheme.same_group(q, s)) {
            ++al.positives;
        }
    }
}

namespace {

enum : std::uint8_t { kStop = 0, kDiag = 1, kUp = 2, kLeft = 3 };

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

// Traceback storage: `bits` per cell, rows padded to whole bytes.
class TraceMatrix {
public:
    TraceMatrix(std::size_t rows, std::size_t cols, unsigned bits)
        : cols_(cols), bits_(bits), per_byte_(8 / bits), row_bytes_((cols + per_byte_ - 1) / per_byte_),
          data_(rows * row_bytes_, 0)
    {
    }

    std::uint8_t* row(std::size_t i) { return data_.data() + i * row_bytes_; }

    std::uint8_t get(std::size_t i, std::size_t j) const
    {
        std::uint8_t byte = data_[i * row_bytes_ + j / per_byte_];
        return static_cast<std::uint8_t>((byte >> (bits_ * (j % per_byte_))) & ((1u << bits_) - 1));
    }

    unsigned per_byte() const noexcept { return per_byte_; }
    unsigned bits() const noexcept { return bits_; }

private:
    std::size_t cols_;
    unsigned bits_;
    unsigned per_byte_;
    std::size_t row_bytes_;
    std::vector<std::uint8_t> data_;
};

struct Cell {
    std::size_t i = 0, j = 0;
};

Alignment finish(std::string q, std::string s, int score, Cell start, Cell end, const ScoringScheme& scheme)
{
    std::reverse(q.begin(), q.end());
    std::reverse(s.begin(), s.end());
    Alignment al;
    al.query_row = std::move(q);
    al.subject_row = std::move(s);
    al.score = score;
    if (!al.query_row.empty()) {
        // start is the cell before the first column; end is the last cell.
        al.query_start = start.i + 1;
        al.query_end = end.i;
        al.subject_start = start.j + 1;
        al.subject_end = end.j;
    }
    count_columns(al, scheme);
    return al;
}

// Linear-gap kernel; row i indexes a, column j indexes b, both 1-based.
Alignment linear_kernel(std::string_view a, std::string_view b, const ScoringScheme& sc, bool local)
{
    const std::size_t n = a.size(), m = b.size();
    const int gap = sc.gap();
    TraceMatrix trace(n + 1, m + 1, 2);
    std::vector<int> prev(m + 1), cur(m + 1);

    for (std::size_t j = 0; j <= m; ++j)
        prev[j] = local ? 0 : int(j) * gap;

    int best = 0;
    Cell best_cell;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = local ? 0 : int(i) * gap;
        std::uint8_t* row = trace.row(i);
        const char ai = a[i - 1];
        std::uint8_t packed = 0;
        unsigned slot = 1; // column 0 occupies slot 0 of the first byte
        for (std::size_t j = 1; j <= m; ++j) {
            int diag = prev[j - 1] + sc.score(ai, b[j - 1]);
            int up = prev[j] + gap;
            int left = cur[j - 1] + gap;
            int h = diag;
            std::uint8_t dir = kDiag;
            if (up > h) {
                h = up;
                dir = kUp;
            }
            if (left > h) {
                h = left;
                dir = kLeft;
            }
            if (local && h <= 0) {
                h = 0;
                dir = kStop;
            }
            cur[j] = h;
            packed |= static_cast<std::uint8_t>(dir << (2 * slot));
            if (++slot == 4) {
                row[j / 4] = packed;
                packed = 0;
                slot = 0;
            }
            if (local && h > best) {
                best = h;
                best_cell = {i, j};
            }
        }
        if (slot != 0)
            row[m / 4] = packed;
        std::swap(prev, cur);
    }

    std::string q, s;
    Cell end = local ? best_cell : Cell{n, m};
    int score = local ? best : prev[m];
    std::size_t i = end.i, j = end.j;
    if (local && best == 0)
        return finish({}, {}, 0, {}, {}, sc);
    while (i > 0 || j > 0) {
        std::uint8_t dir;
        if (i == 0)
            dir = kLeft;
        else if (j == 0)
            dir = kUp;
        else
            dir = trace.get(i, j);
        if (local && dir == kStop)
            break;
        if (!local && dir == kStop)
            dir = kDiag;
        switch (dir) {
        case kDiag:
            q.push_back(a[--i]);
            s.push_back(b[--j]);
            break;
        case kUp:
            q.push_back(a[--i]);
            s.push_back(kGapSymbol);
            break;
        default:
            q.push_back(kGapSymbol);
            s.push_back(b[--j]);
            break;
        }
        if (local && (i == 0 || j == 0))
            break;
    }
    return finish(std::move(q), std::move(s), score, {i, j}, end, sc);
}

// Affine (Gotoh) kernel. Per cell: 2 bits for H's source, one bit each for
// whether the up/left gap state extended an existing gap.
Alignment affine_kernel(std::string_view a, std::string_view b, const ScoringScheme& sc, bool local)
{
    const std::size_t n = a.size(), m = b.size();
    const int ext = sc.gap();
    const int open = *sc.gap_open() + ext;
    TraceMatrix trace(n + 1, m + 1, 4);
    constexpr std::uint8_t kUpExt = 4, kLeftExt = 8;

    std::vector<int> h_prev(m + 1), h_cur(m + 1), up_prev(m + 1), up_cur(m + 1);
    h_prev[0] = 0;
    for (std::size_t j = 1; j <= m; ++j)
        h_prev[j] = local ? 0 : *sc.gap_open() + int(j) * ext;
    std::fill(up_prev.begin(), up_prev.end(), kNegInf);

    int best = 0;
    Cell best_cell;
    for (std::size_t i = 1; i <= n; ++i) {
        h_cur[0] = local ? 0 : *sc.gap_open() + int(i) * ext;
        up_cur[0] = h_cur[0];
        int left = kNegInf;
        std::uint8_t* row = trace.row(i);
        const char ai = a[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            std::uint8_t code = 0;
            int up_open = h_prev[j] + open, up_extend = up_prev[j] + ext;
            int up = up_open;
            if (up_extend > up_open) {
                up = up_extend;
                code |= kUpExt;
            }
            int left_open = h_cur[j - 1] + open, left_extend = left + ext;
            left = left_open;
            if (left_extend > left_open) {
                left = left_extend;
                code |= kLeftExt;
            }
            int h = h_prev[j - 1] + sc.score(ai, b[j - 1]);
            std::uint8_t dir = kDiag;
            if (up > h) {
                h = up;
                dir = kUp;
            }
            if (left > h) {
                h = left;
                dir = kLeft;
            }
            if (local && h <= 0) {
                h = 0;
                dir = kStop;
            }
            code |= dir;
            h_cur[j] = h;
            up_cur[j] = up;
            row[j / 2] |= static_cast<std::uint8_t>(code << (4 * (j % 2)));
            if (local && h > best) {
                best = h;
                best_cell = {i, j};
            }
        }
        std::swap(h_prev, h_cur);
        std::swap(up_prev, up_cur);
    }

    if (local && best == 0)
        return finish({}, {}, 0, {}, {}, sc);
    Cell end = local ? best_cell : Cell{n, m};
    int score = local ? best : h_prev[m];
    std::string q, s;
    std::size_t i = end.i, j = end.j;
    enum class State { H, Up, Left } state = State::H;
    while (i > 0 || j > 0) {
        if (state == State::H) {
            if (i == 0 || j == 0) {
                if (local)
                    break;
                if (i == 0) {
                    q.push_back(kGapSymbol);
                    s.push_back(b[--j]);
                } else {
                    q.push_back(a[--i]);
                    s.push_back(kGapSymbol);
                }
                continue;
            }
            std::uint8_t dir = trace.get(i, j) & 3;
            if (dir == kStop) {
                if (local)
                    break;
                dir = kDiag;
            }
            if (dir == kDiag) {
                q.push_back(a[--i]);
                s.push_back(b[--j]);
            } else {
                state = dir == kUp ? State::Up : State::Left;
            }
        } else if (state == State::Up) {
            bool extended = trace.get(i, j) & kUpExt;
            q.push_back(a[--i]);
            s.push_back(kGapSymbol);
            if (!extended)
                state = State::H;
        } else {
            bool extended = trace.get(i, j) & kLeftExt;
            q.push_back(kGapSymbol);
            s.push_back(b[--j]);
            if (!extended)
                state = State::H;
        }
    }
    return finish(std::move(q), std::move(s), score, {i, j}, end, sc);
}

void require_same_alphabet(const Sequence& a, const Sequence& b)
{
    if (a.alphabet_kind() != b.alphabet_kind())
        throw Error(ErrorCode::AlphabetMismatch, "cannot align " + std::string(to_string(a.alphabet_kind())) +
                                                     " with " + std::string(to_string(b.alphabet_kind())));
}

} // namespace

Alignment needleman_wunsch(std::string_view a, std::string_view b, const ScoringScheme& scheme)
{
    return scheme.affine() ? affine_kernel(a, b, scheme, false) : linear_kernel(a, b, scheme, false);
}

Alignment smith_waterman(std::string_view a, std::string_view b, const ScoringScheme& scheme)
{
    return scheme.affine() ? affine_kernel(a, b, scheme, true) : linear_kernel(a, b, scheme, true);
}

Alignment needleman_wunsch(const Sequence& a, const Sequence& b, const ScoringScheme& scheme)
{
    require_same_alphabet(a, b);
    return needleman_wunsch(std::string_view(a.residues()), std::string_view(b.residues()), scheme);
}

Alignment smith_waterman(const Sequence& a, const Sequence& b, const ScoringScheme& scheme)
{
    require_same_alphabet(a, b);
    return smith_waterman(std::string_view(a.residues()), std::string_view(b.residues()), scheme);
}

} // namespace seqforge
