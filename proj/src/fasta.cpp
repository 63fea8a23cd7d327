#include "seqforge/formats.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace seqforge {

AlphabetKind detect_alphabet(std::string_view residues)
{
    bool has_t = false, has_u = false;
    for (char c : residues) {
        switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'A': case 'C': case 'G': case 'N': break;
        case 'T': has_t = true; break;
        case 'U': has_u = true; break;
        default: return AlphabetKind::Protein;
        }
    }
    return has_u && !has_t ? AlphabetKind::RNA : AlphabetKind::DNA;
}

namespace {

struct PendingEntry {
    std::string id;
    std::string description;
    std::string residues;
    std::size_t line = 0;
};

void finish(FastaDoc& doc, std::set<std::string>& seen, PendingEntry& e, const FastaOptions& options)
{
    if (!seen.insert(e.id).second)
        throw Error(ErrorCode::DuplicateId, "duplicate FASTA id '" + e.id + "' at line " + std::to_string(e.line));
    ValidateOptions v;
    v.lenient = options.lenient;
    v.id = e.id;
    v.description = e.description;
    AlphabetKind kind = options.alphabet ? *options.alphabet : detect_alphabet(e.residues);
    try {
        doc.entries.push_back(validate(e.residues, kind, v));
    } catch (const InvalidResidueError& err) {
        throw Error(ErrorCode::InvalidResidue,
                    "entry '" + e.id + "': " + err.what(), err.position());
    }
}

} // namespace

FastaDoc parse_fasta(std::istream& in, const FastaOptions& options)
{
    FastaDoc doc;
    std::set<std::string> seen;
    std::optional<PendingEntry> current;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty() && line.front() == '>') {
            if (current)
                finish(doc, seen, *current, options);
            std::string_view header(line);
            header.remove_prefix(1);
            std::size_t start = header.find_first_not_of(" \t");
            if (start == std::string_view::npos)
                throw Error(ErrorCode::NoHeader, "empty FASTA header at line " + std::to_string(lineno));
            header.remove_prefix(start);
            std::size_t cut = header.find_first_of(" \t");
            PendingEntry e;
            e.line = lineno;
            e.id = std::string(header.substr(0, cut));
            if (cut != std::string_view::npos) {
                std::string_view rest = header.substr(cut);
                std::size_t b = rest.find_first_not_of(" \t");
                if (b != std::string_view::npos)
                    e.description = std::string(rest.substr(b));
            }
            current = std::move(e);
            continue;
        }
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (blank)
            continue;
        if (!current)
            throw Error(ErrorCode::NoHeader, "residue data before any '>' header at line " + std::to_string(lineno));
        for (char c : line)
            if (c != ' ' && c != '\t')
                current->residues.push_back(c);
    }
    if (current)
        finish(doc, seen, *current, options);
    if (doc.entries.empty())
        throw Error(ErrorCode::NoHeader, "no FASTA entries found");
    return doc;
}

FastaDoc parse_fasta(std::string_view text, const FastaOptions& options)
{
    std::istringstream in{std::string(text)};
    return parse_fasta(in, options);
}

std::string render_fasta(const FastaDoc& doc, std::size_t wrap)
{
    if (wrap == 0)
        throw Error(ErrorCode::InvalidArgument, "wrap width must be at least 1");
    std::string out;
    for (const Sequence& s : doc.entries) {
        out += '>';
        out += s.id();
        if (!s.description().empty()) {
            out += ' ';
            out += s.description();
        }
        out += '\n';
        const std::string& r = s.residues();
        for (std::size_t i = 0; i < r.size(); i += wrap) {
            out.append(r, i, wrap);
            out += '\n';
        }
    }
    return out;
}

} // namespace seqforge
