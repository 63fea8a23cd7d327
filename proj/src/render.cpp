#include "seqforge/align.hpp"

#include <algorithm>

namespace seqforge {

namespace {

// Percentages are truncated, not rounded: 128/146 prints as 87%.
std::string ratio(std::size_t part, std::size_t whole)
{
    std::size_t pct = whole == 0 ? 0 : (100 * part) / whole;
    return std::to_string(part) + "/" + std::to_string(whole) + " (" + std::to_string(pct) + "%)";
}

std::string pad_right(std::string s, std::size_t width)
{
    if (s.size() < width)
        s.resize(width, ' ');
    return s;
}

} // namespace

std::string blast_counts_line(const Alignment& al)
{
    const std::size_t n = al.length();
    std::string line = "Identities = " + ratio(al.identities, n) + ", Positives = " + ratio(al.positives, n);
    if (al.gaps > 0)
        line += ", Gaps = " + ratio(al.gaps, n);
    return line;
}

std::string render_blast(const Alignment& al, std::string_view query_id, std::string_view subject_id,
                         const ScoringScheme& scheme, const RenderOptions& options)
{
    if (options.width == 0)
        throw Error(ErrorCode::InvalidArgument, "render width must be at least 1");
    std::string out;
    out += "Query= ";
    out += query_id;
    out += "\n>";
    out += subject_id;
    out += "\n\n";
    out += "Score = " + std::to_string(al.score) + "\n";
    out += blast_counts_line(al) + "\n";

    // Coordinates of the next residue in each row.
    std::size_t q_next = al.query_start, s_next = al.subject_start;
    for (std::size_t at = 0; at < al.length(); at += options.width) {
        const std::size_t len = std::min(options.width, al.length() - at);
        const std::string_view q_chunk = std::string_view(al.query_row).substr(at, len);
        const std::string_view s_chunk = std::string_view(al.subject_row).substr(at, len);

        std::string middle(len, ' ');
        for (std::size_t c = 0; c < len; ++c) {
            char x = q_chunk[c], y = s_chunk[c];
            if (x == kGapSymbol || y == kGapSymbol)
                continue;
            if (x == y)
                middle[c] = x;
            else if (scheme.same_group(x, y))
                middle[c] = '+';
        }

        auto residues = [](std::string_view chunk) {
            return std::size_t(std::count_if(chunk.begin(), chunk.end(), [](char c) { return c != kGapSymbol; }));
        };
        const std::size_t q_count = residues(q_chunk), s_count = residues(s_chunk);
        const std::string q_start = std::to_string(q_next), s_start = std::to_string(s_next);
        const std::size_t w = std::max(q_start.size(), s_start.size());

        out += "\nQuery: " + pad_right(q_start, w) + " ";
        out += q_chunk;
        out += " " + std::to_string(q_next + q_count - 1) + "\n";
        out += std::string(7 + w + 1, ' ') + middle + "\n";
        out += "Sbjct: " + pad_right(s_start, w) + " ";
        out += s_chunk;
        out += " " + std::to_string(s_next + s_count - 1) + "\n";
        q_next += q_count;
        s_next += s_count;
    }
    return out;
}

} // namespace seqforge
