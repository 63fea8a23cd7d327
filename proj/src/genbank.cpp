#include "seqforge/formats.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace seqforge {

namespace {

constexpr std::size_t kValueColumn = 12;

std::string trim(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

bool is_subkeyword_line(const std::string& line);

// Keyword and sub-keyword lines drop their keyword; continuation lines are
// trimmed. Values usually start at column 12 but need not.
std::string value_of(const std::string& line)
{
    if (!line.empty() && (line[0] != ' ' || is_subkeyword_line(line))) {
        std::size_t b = line.find_first_not_of(" \t");
        std::size_t e = line.find_first_of(" \t", b);
        return e == std::string::npos ? std::string() : trim(std::string_view(line).substr(e));
    }
    return trim(line);
}

std::string first_token(const std::string& line)
{
    std::istringstream in(line);
    std::string tok;
    in >> tok;
    return tok;
}

// Joins the keyword line's value with its continuation lines.
std::string joined_value(const std::vector<std::string>& lines, std::size_t from, std::size_t to)
{
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        std::string v = value_of(lines[i]);
        if (v.empty())
            continue;
        if (!out.empty())
            out += ' ';
        out += v;
    }
    return out;
}

bool is_subkeyword_line(const std::string& line)
{
    return line.size() > 2 && line[0] == ' ' && line[1] == ' ' && line[2] != ' ';
}

std::vector<std::string> split_authors(const std::string& text)
{
    std::string s = text;
    for (std::size_t at; (at = s.find(" and ")) != std::string::npos;)
        s.replace(at, 5, ", ");
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t cut = s.find(", ", start);
        std::string name = trim(std::string_view(s).substr(start, cut == std::string::npos ? std::string::npos : cut - start));
        if (!name.empty())
            out.push_back(name);
        if (cut == std::string::npos)
            break;
        start = cut + 2;
    }
    return out;
}

Citation parse_reference(const std::vector<std::string>& lines)
{
    Citation c;
    c.lines = lines;
    c.header = value_of(lines.front());
    std::size_t i = 1;
    while (i < lines.size()) {
        std::size_t j = i + 1;
        while (j < lines.size() && !is_subkeyword_line(lines[j]))
            ++j;
        std::string key = first_token(lines[i]);
        std::string value = joined_value(lines, i, j);
        if (key == "AUTHORS")
            c.authors = split_authors(value);
        else if (key == "TITLE")
            c.title = value;
        else if (key == "JOURNAL")
            c.journal = value;
        i = j;
    }
    return c;
}

struct RecordBuilder {
    GenBankRecord record;
    bool has_accession = false;
    std::size_t start_line = 0;
    std::string origin_bases;
    bool has_origin = false;

    void section(const std::vector<std::string>& lines, std::size_t lineno)
    {
        const std::string key = first_token(lines.front());
        record.layout.push_back(key);
        if (key == "LOCUS") {
            std::istringstream in(value_of(lines.front()));
            in >> record.locus;
            std::string len, unit;
            if (in >> len) {
                bool numeric = !len.empty() && std::all_of(len.begin(), len.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
                if (numeric) {
                    record.declared_length = std::stoul(len);
                    in >> unit;
                    std::string rest;
                    std::getline(in, rest);
                    record.molecule = trim(rest);
                } else {
                    std::string rest;
                    std::getline(in, rest);
                    record.molecule = trim(len + rest);
                }
            }
        } else if (key == "DEFINITION") {
            record.definition = joined_value(lines, 0, lines.size());
        } else if (key == "ACCESSION") {
            std::istringstream in(value_of(lines.front()));
            in >> record.accession;
            has_accession = !record.accession.empty();
        } else if (key == "SOURCE") {
            std::size_t i = 1;
            while (i < lines.size() && !is_subkeyword_line(lines[i]))
                ++i;
            record.source = joined_value(lines, 0, i);
            while (i < lines.size()) {
                std::size_t j = i + 1;
                while (j < lines.size() && !is_subkeyword_line(lines[j]))
                    ++j;
                if (first_token(lines[i]) == "ORGANISM") {
                    record.organism = value_of(lines[i]);
                    record.taxonomy = joined_value(lines, i + 1, j);
                }
                i = j;
            }
        } else if (key == "REFERENCE") {
            record.references.push_back(parse_reference(lines));
        } else if (key == "ORIGIN") {
            has_origin = true;
            for (std::size_t i = 1; i < lines.size(); ++i) {
                for (char c : lines[i]) {
                    unsigned char u = static_cast<unsigned char>(c);
                    if (std::isalpha(u)) {
                        origin_bases.push_back(c);
                    } else if (!std::isdigit(u) && !std::isspace(u)) {
                        throw Error(ErrorCode::InvalidResidue,
                                    "unexpected character '" + std::string(1, c) + "' in ORIGIN near line " +
                                        std::to_string(lineno + i));
                    }
                }
            }
        } else {
            record.extras.push_back({key, lines});
        }
    }

    GenBankRecord finish()
    {
        if (!has_accession)
            throw Error(ErrorCode::MissingAccession,
                        "record starting at line " + std::to_string(start_line) + " has no ACCESSION");
        if (has_origin && !origin_bases.empty()) {
            ValidateOptions v;
            v.lenient = true;
            v.id = record.accession;
            record.origin = validate(origin_bases, AlphabetKind::DNA, v);
            if (record.declared_length && *record.declared_length != record.origin->size())
                throw Error(ErrorCode::LengthMismatch,
                            "record " + record.accession + ": LOCUS declares " +
                                std::to_string(*record.declared_length) + " bases, ORIGIN has " +
                                std::to_string(record.origin->size()));
        }
        return std::move(record);
    }
};

} // namespace

std::vector<GenBankRecord> parse_genbank(std::istream& in)
{
    std::vector<GenBankRecord> out;
    std::optional<RecordBuilder> current;
    std::vector<std::string> section;
    std::size_t section_line = 0;
    std::string line;
    std::size_t lineno = 0;

    auto flush_section = [&]() {
        if (!section.empty())
            current->section(section, section_line);
        section.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!current) {
            if (trim(line).empty())
                continue;
            current.emplace();
            current->start_line = lineno;
        }
        if (line.rfind("//", 0) == 0) {
            flush_section();
            out.push_back(current->finish());
            current.reset();
            continue;
        }
        if (!line.empty() && line[0] != ' ' && line[0] != '\t') {
            flush_section();
            section_line = lineno;
            section.push_back(line);
        } else if (section.empty()) {
            if (!trim(line).empty())
                throw Error(ErrorCode::SyntaxError, "continuation line without a keyword at line " + std::to_string(lineno),
                            lineno);
        } else {
            section.push_back(line);
        }
    }
    if (current)
        throw Error(ErrorCode::UnterminatedRecord,
                    "record starting at line " + std::to_string(current->start_line) + " lacks the '//' terminator");
    return out;
}

std::vector<GenBankRecord> parse_genbank(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_genbank(in);
}

namespace {

std::string keyword_prefix(std::string_view keyword, std::size_t indent = 0)
{
    std::string out(indent, ' ');
    out += keyword;
    if (out.size() < kValueColumn)
        out.resize(kValueColumn, ' ');
    else
        out += ' ';
    return out;
}

void emit_wrapped(std::string& out, const std::string& prefix, const std::string& text)
{
    constexpr std::size_t width = 79;
    std::string line = prefix;
    bool empty_line = true;
    std::istringstream words(text);
    std::string w;
    while (words >> w) {
        if (!empty_line && line.size() + 1 + w.size() > width) {
            out += line;
            out += '\n';
            line = std::string(kValueColumn, ' ');
            empty_line = true;
        }
        if (!empty_line)
            line += ' ';
        line += w;
        empty_line = false;
    }
    while (!line.empty() && line.back() == ' ')
        line.pop_back();
    out += line;
    out += '\n';
}

void emit_citation(std::string& out, const Citation& c)
{
    if (!c.lines.empty()) {
        for (const auto& l : c.lines) {
            out += l;
            out += '\n';
        }
        return;
    }
    emit_wrapped(out, keyword_prefix("REFERENCE"), c.header);
    if (!c.authors.empty()) {
        std::string a;
        for (std::size_t i = 0; i < c.authors.size(); ++i) {
            if (i > 0)
                a += (i + 1 == c.authors.size()) ? " and " : ", ";
            a += c.authors[i];
        }
        emit_wrapped(out, keyword_prefix("AUTHORS", 2), a);
    }
    if (!c.title.empty())
        emit_wrapped(out, keyword_prefix("TITLE", 2), c.title);
    if (!c.journal.empty())
        emit_wrapped(out, keyword_prefix("JOURNAL", 2), c.journal);
}

void emit_origin(std::string& out, const Sequence& s)
{
    out += "ORIGIN\n";
    const std::string& r = s.residues();
    char coord[16];
    for (std::size_t i = 0; i < r.size(); i += 60) {
        std::snprintf(coord, sizeof coord, "%9zu", i + 1);
        out += coord;
        for (std::size_t g = i; g < std::min(r.size(), i + 60); g += 10) {
            out += ' ';
            for (std::size_t k = g; k < std::min(r.size(), g + 10); ++k)
                out += static_cast<char>(std::tolower(static_cast<unsigned char>(r[k])));
        }
        out += '\n';
    }
}

} // namespace

std::string render_genbank(const GenBankRecord& record)
{
    std::vector<std::string> layout = record.layout;
    if (layout.empty()) {
        layout = {"LOCUS", "DEFINITION", "ACCESSION", "SOURCE"};
        for (std::size_t i = 0; i < record.references.size(); ++i)
            layout.push_back("REFERENCE");
        for (const auto& e : record.extras)
            layout.push_back(e.keyword);
        if (record.origin)
            layout.push_back("ORIGIN");
    }

    std::string out;
    std::size_t next_reference = 0, next_extra = 0;
    for (const auto& key : layout) {
        if (key == "LOCUS") {
            std::string v = record.locus;
            if (record.declared_length)
                v += "  " + std::to_string(*record.declared_length) + " bp";
            if (!record.molecule.empty())
                v += "    " + record.molecule;
            out += keyword_prefix("LOCUS") + v + '\n';
        } else if (key == "DEFINITION") {
            emit_wrapped(out, keyword_prefix("DEFINITION"), record.definition);
        } else if (key == "ACCESSION") {
            out += keyword_prefix("ACCESSION") + record.accession + '\n';
        } else if (key == "SOURCE") {
            emit_wrapped(out, keyword_prefix("SOURCE"), record.source);
            if (!record.organism.empty()) {
                out += keyword_prefix("ORGANISM", 2) + record.organism + '\n';
                if (!record.taxonomy.empty())
                    emit_wrapped(out, std::string(kValueColumn, ' '), record.taxonomy);
            }
        } else if (key == "REFERENCE") {
            if (next_reference < record.references.size())
                emit_citation(out, record.references[next_reference++]);
        } else if (key == "ORIGIN") {
            if (record.origin)
                emit_origin(out, *record.origin);
            else
                out += "ORIGIN\n";
        } else if (next_extra < record.extras.size()) {
            for (const auto& l : record.extras[next_extra].lines) {
                out += l;
                out += '\n';
            }
            ++next_extra;
        }
    }
    out += "//\n";
    return out;
}

} // namespace seqforge
