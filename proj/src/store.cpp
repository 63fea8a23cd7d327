#include "seqforge/store.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace seqforge {

// ------------------------------------------------------------ conversions

namespace {

std::optional<std::string> year_of(std::string_view locus_tail)
{
    // LOCUS dates look like 21-JUN-1999.
    std::istringstream in{std::string(locus_tail)};
    std::string tok;
    std::optional<std::string> year;
    while (in >> tok)
        if (tok.size() == 11 && tok[2] == '-' && tok[6] == '-' &&
            std::all_of(tok.begin() + 7, tok.end(), [](char c) { return std::isdigit((unsigned char)c); }))
            year = tok.substr(7);
    return year;
}

} // namespace

Record record_from_genbank(const GenBankRecord& gb)
{
    if (gb.accession.empty())
        throw Error(ErrorCode::MissingAccession, "record '" + gb.locus + "' has no accession");
    Record r;
    r.accession = gb.accession;
    r.definition = gb.definition;
    r.organism = gb.organism;
    for (const auto& c : gb.references) {
        if (r.title.empty())
            r.title = c.title;
        for (const auto& a : c.authors)
            if (std::find(r.authors.begin(), r.authors.end(), a) == r.authors.end())
                r.authors.push_back(a);
    }
    r.year = year_of(gb.molecule).value_or("");
    if (gb.origin)
        r.sequence = gb.origin->with_id(gb.accession, gb.definition);
    return r;
}

std::vector<Record> records_from_fasta(const FastaDoc& doc)
{
    std::vector<Record> out;
    for (const auto& s : doc.entries) {
        Record r;
        r.accession = s.id();
        r.definition = s.description();
        r.sequence = s;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

json to_json(const Record& r)
{
    json j;
    j["accession"] = r.accession;
    j["definition"] = r.definition;
    j["title"] = r.title;
    j["organism"] = r.organism;
    j["authors"] = r.authors;
    j["year"] = r.year;
    j["mesh"] = r.mesh;
    j["pub_types"] = r.pub_types;
    j["language"] = r.language;
    if (r.sequence) {
        const Sequence& s = *r.sequence;
        j["sequence"] = {{"id", s.id()},
                         {"description", s.description()},
                         {"alphabet", std::string(to_string(s.alphabet_kind()))},
                         {"residues", s.residues()}};
    } else {
        j["sequence"] = nullptr;
    }
    return j;
}

AlphabetKind alphabet_named(const std::string& name)
{
    for (auto k : {AlphabetKind::DNA, AlphabetKind::RNA, AlphabetKind::Protein})
        if (to_string(k) == name)
            return k;
    throw Error(ErrorCode::CorruptStore, "unknown alphabet '" + name + "' in record log");
}

Record from_json(const json& j)
{
    if (!j.is_object())
        throw Error(ErrorCode::InvalidArgument, "a record must be a JSON object");
    auto text = [&](const char* key) { return j.contains(key) ? j.at(key).get<std::string>() : std::string(); };
    auto list = [&](const char* key) {
        return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>();
    };
    Record r;
    r.accession = j.at("accession").get<std::string>();
    r.definition = text("definition");
    r.title = text("title");
    r.organism = text("organism");
    r.authors = list("authors");
    r.year = text("year");
    r.mesh = list("mesh");
    r.pub_types = list("pub_types");
    r.language = text("language");
    if (j.contains("sequence") && !j.at("sequence").is_null()) {
        const json& s = j.at("sequence");
        r.sequence = Sequence(s.value("id", r.accession), s.value("description", std::string()),
                              alphabet_named(s.at("alphabet").get<std::string>()), s.at("residues").get<std::string>());
    }
    return r;
}

void check_record(const Record& r)
{
    if (r.accession.empty() ||
        std::any_of(r.accession.begin(), r.accession.end(), [](char c) { return std::isspace((unsigned char)c); }))
        throw Error(ErrorCode::MissingAccession, "record accession must be a non-empty token");
    if (!r.year.empty() &&
        (r.year.size() != 4 || !std::all_of(r.year.begin(), r.year.end(), [](char c) { return std::isdigit((unsigned char)c); })))
        throw Error(ErrorCode::InvalidArgument, "year '" + r.year + "' of " + r.accession + " is not 4 digits");
}

std::string blob(const Record& r)
{
    std::string body = record_to_json(r);
    return std::to_string(body.size()) + "\n" + body + "\n";
}

} // namespace

std::string record_to_json(const Record& r, int indent)
{
    try {
        return to_json(r).dump(indent);
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, "record " + r.accession + " is not valid UTF-8");
    }
}

std::vector<Record> records_from_json(std::string_view text)
{
    std::vector<Record> out;
    try {
        json j = json::parse(text);
        if (j.is_array())
            for (const auto& e : j)
                out.push_back(from_json(e));
        else
            out.push_back(from_json(j));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SyntaxError, std::string("bad record JSON: ") + e.what());
    }
    return out;
}

namespace {

// ----------------------------------------------------------------- fields

constexpr std::size_t kFieldCount = std::size(kFieldTags);

std::size_t field_index(std::string_view tag)
{
    for (std::size_t i = 0; i < kFieldCount; ++i)
        if (kFieldTags[i] == tag)
            return i;
    throw Error(ErrorCode::UnknownField, "unknown field '" + std::string(tag) + "'");
}

// Separately tokenized text units of a field; phrases never span units.
std::vector<std::string_view> field_units(const Record& r, std::size_t field)
{
    std::vector<std::string_view> u;
    auto add = [&](const std::string& s) {
        if (!s.empty())
            u.push_back(s);
    };
    auto add_all = [&](const std::vector<std::string>& v) {
        for (const auto& s : v)
            add(s);
    };
    switch (field) {
    case 0:
        add(r.accession);
        add(r.definition);
        add(r.title);
        add(r.organism);
        add_all(r.authors);
        add(r.year);
        add_all(r.mesh);
        add_all(r.pub_types);
        add(r.language);
        break;
    case 1: add_all(r.authors); break;
    case 2: add_all(r.mesh); break;
    case 3: add(r.year); break;
    case 4: add_all(r.pub_types); break;
    case 5: add(r.language); break;
    case 6:
        add(r.title);
        add(r.definition);
        break;
    }
    return u;
}

// Tokens of a unit plus joined forms of hyphenated words.
std::vector<std::string> index_tokens(std::string_view unit)
{
    std::vector<std::string> out = tokenize(unit);
    std::size_t i = 0;
    while (i < unit.size()) {
        std::size_t j = i;
        while (j < unit.size() && !std::isspace((unsigned char)unit[j]))
            ++j;
        std::string_view word = unit.substr(i, j - i);
        if (word.find('-') != std::string_view::npos) {
            auto parts = tokenize(word);
            if (parts.size() > 1) {
                std::string joined;
                for (const auto& p : parts)
                    joined += p;
                out.push_back(std::move(joined));
            }
        }
        i = j + 1;
    }
    return out;
}

using Postings = std::map<std::string, std::vector<std::uint32_t>, std::less<>>;
using FieldIndex = std::array<Postings, kFieldCount>;

void index_record(FieldIndex& index, const Record& r, std::uint32_t id)
{
    for (std::size_t f = 0; f < kFieldCount; ++f)
        for (auto unit : field_units(r, f))
            for (auto& tok : index_tokens(unit)) {
                auto& list = index[f][tok];
                if (list.empty() || list.back() != id)
                    list.push_back(id);
            }
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_atomic(const fs::path& p, std::string_view content)
{
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), std::streamsize(content.size()));
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

class DirLock {
public:
    DirLock(const fs::path& dir, bool exclusive)
    {
        fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0)
            throw Error(ErrorCode::Io, "cannot open lock file in " + dir.string() + ": " + std::strerror(errno));
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            ::close(fd_);
            throw Error(ErrorCode::Io, "cannot lock " + dir.string());
        }
    }
    ~DirLock() { ::close(fd_); }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

} // namespace

// ------------------------------------------------------------------ store

struct Store::Impl {
    std::optional<fs::path> dir;
    std::vector<Record> records;
    std::map<std::string, std::uint32_t, std::less<>> by_accession;
    FieldIndex index;
    std::uintmax_t log_size = 0;
    bool rebuilt = false;

    fs::path log_path() const { return *dir / "records.log"; }
    fs::path index_dir() const { return *dir / "index"; }

    void add(Record r)
    {
        auto id = std::uint32_t(records.size());
        by_accession.emplace(r.accession, id);
        index_record(index, r, id);
        records.push_back(std::move(r));
    }

    void load_log()
    {
        records.clear();
        by_accession.clear();
        index = {};
        log_size = 0;
        if (!fs::exists(log_path()))
            return;
        const std::string data = read_file(log_path());
        std::size_t pos = 0;
        while (pos < data.size()) {
            std::size_t nl = data.find('\n', pos);
            if (nl == std::string::npos || nl == pos || nl - pos > 12 ||
                !std::all_of(data.begin() + long(pos), data.begin() + long(nl), [](char c) { return std::isdigit((unsigned char)c); }))
                throw Error(ErrorCode::CorruptStore, "bad length prefix at byte " + std::to_string(pos) + " of records.log");
            const std::size_t len = std::stoull(data.substr(pos, nl - pos));
            const std::size_t body = nl + 1;
            if (body + len >= data.size() || data[body + len] != '\n')
                throw Error(ErrorCode::CorruptStore, "truncated record at byte " + std::to_string(pos) + " of records.log");
            Record r;
            try {
                r = from_json(json::parse(std::string_view(data).substr(body, len)));
            } catch (const json::exception& e) {
                throw Error(ErrorCode::CorruptStore, "unreadable record at byte " + std::to_string(pos) + ": " + e.what());
            } catch (const Error& e) {
                throw Error(ErrorCode::CorruptStore, "invalid record at byte " + std::to_string(pos) + ": " + e.what());
            }
            if (by_accession.count(r.accession))
                throw Error(ErrorCode::CorruptStore, "accession " + r.accession + " appears twice in records.log");
            add(std::move(r));
            pos = body + len + 1;
        }
        log_size = data.size();
    }

    std::string field_file(std::size_t f) const
    {
        std::string out;
        for (const auto& [tok, ids] : index[f]) {
            out += tok;
            for (auto id : ids)
                out += "\t" + records[id].accession;
            out += "\n";
        }
        return out;
    }

    void write_index() const
    {
        fs::create_directories(index_dir());
        std::string manifest = "log_size\t" + std::to_string(log_size) + "\nrecords\t" + std::to_string(records.size()) + "\n";
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            std::string content = field_file(f);
            write_atomic(index_dir() / (std::string(kFieldTags[f]) + ".idx"), content);
            manifest += std::string(kFieldTags[f]) + "\t" + std::to_string(fnv1a(content)) + "\n";
        }
        write_atomic(index_dir() / "manifest", manifest);
    }

    // Replaces the in-memory index with the on-disk one if that is consistent
    // with the log; returns false otherwise.
    bool read_index()
    {
        try {
            std::map<std::string, std::string> m;
            std::istringstream in(read_file(index_dir() / "manifest"));
            std::string key, value;
            while (in >> key >> value)
                m[key] = value;
            if (m["log_size"] != std::to_string(log_size) || m["records"] != std::to_string(records.size()))
                return false;
            FieldIndex loaded;
            for (std::size_t f = 0; f < kFieldCount; ++f) {
                const std::string tag(kFieldTags[f]);
                const std::string content = read_file(index_dir() / (tag + ".idx"));
                if (m[tag] != std::to_string(fnv1a(content)))
                    return false;
                std::istringstream lines(content);
                std::string line;
                while (std::getline(lines, line)) {
                    std::istringstream cells(line);
                    std::string tok, acc;
                    if (!std::getline(cells, tok, '\t'))
                        return false;
                    auto& list = loaded[f][tok];
                    while (std::getline(cells, acc, '\t')) {
                        auto it = by_accession.find(acc);
                        if (it == by_accession.end())
                            return false;
                        list.push_back(it->second);
                    }
                    if (!std::is_sorted(list.begin(), list.end()))
                        return false;
                }
            }
            index = std::move(loaded);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }

    void refresh_if_changed()
    {
        std::uintmax_t size = fs::exists(log_path()) ? fs::file_size(log_path()) : 0;
        if (size != log_size)
            load_log();
    }
};

Store::Store(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

Store Store::open(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error(ErrorCode::Io, "cannot use data directory " + dir.string());
    auto impl = std::make_unique<Impl>();
    impl->dir = dir;
    {
        DirLock lock(dir, false);
        impl->load_log();
        if (impl->read_index())
            return Store(std::move(impl));
    }
    // Stale or damaged index: rebuild from the log.
    DirLock lock(dir, true);
    impl->load_log();
    impl->write_index();
    impl->rebuilt = true;
    return Store(std::move(impl));
}

Store Store::in_memory()
{
    return Store(std::make_unique<Impl>());
}

std::size_t Store::ingest(const std::vector<Record>& records)
{
    std::optional<DirLock> lock;
    if (impl_->dir) {
        lock.emplace(*impl_->dir, true);
        impl_->refresh_if_changed();
    }

    std::vector<const Record*> fresh;
    std::map<std::string_view, const Record*> batch;
    for (const auto& r : records) {
        check_record(r);
        const Record* existing = nullptr;
        if (auto it = impl_->by_accession.find(r.accession); it != impl_->by_accession.end())
            existing = &impl_->records[it->second];
        else if (auto b = batch.find(r.accession); b != batch.end())
            existing = b->second;
        if (existing) {
            if (!(*existing == r))
                throw Error(ErrorCode::DuplicateAccession, "accession " + r.accession + " already holds a different record");
            continue;
        }
        batch.emplace(r.accession, &r);
        fresh.push_back(&r);
    }
    if (fresh.empty())
        return 0;

    std::string out;
    for (const Record* r : fresh)
        out += blob(*r);

    if (impl_->dir) {
        int fd = ::open(impl_->log_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
        if (fd < 0)
            throw Error(ErrorCode::Io, "cannot open records.log: " + std::string(std::strerror(errno)));
        std::size_t done = 0;
        while (done < out.size()) {
            ssize_t n = ::write(fd, out.data() + done, out.size() - done);
            if (n <= 0) {
                ::close(fd);
                throw Error(ErrorCode::Io, "write to records.log failed");
            }
            done += std::size_t(n);
        }
        ::fsync(fd);
        ::close(fd);
        impl_->log_size += out.size();
    }
    for (const Record* r : fresh)
        impl_->add(*r);
    if (impl_->dir)
        impl_->write_index();
    return fresh.size();
}

std::size_t Store::size() const noexcept
{
    return impl_->records.size();
}

std::vector<std::string> Store::accessions() const
{
    std::vector<std::string> out;
    for (const auto& [acc, id] : impl_->by_accession)
        out.push_back(acc);
    return out;
}

std::optional<Record> Store::get(std::string_view accession) const
{
    auto it = impl_->by_accession.find(accession);
    if (it == impl_->by_accession.end())
        return std::nullopt;
    return impl_->records[it->second];
}

const std::vector<Record>& Store::records() const noexcept
{
    return impl_->records;
}

bool Store::index_rebuilt() const noexcept
{
    return impl_->rebuilt;
}

namespace {

using IdSet = std::vector<std::uint32_t>;

IdSet intersect(const IdSet& a, const IdSet& b)
{
    IdSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IdSet unite(const IdSet& a, const IdSet& b)
{
    IdSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool has_phrase(const Record& r, std::size_t field, const std::vector<std::string>& words)
{
    for (auto unit : field_units(r, field)) {
        auto toks = tokenize(unit);
        if (std::search(toks.begin(), toks.end(), words.begin(), words.end()) != toks.end())
            return true;
    }
    return false;
}

IdSet eval(const Query& q, const FieldIndex& index, const std::vector<Record>& records)
{
    static const IdSet none;
    switch (q.kind()) {
    case Query::Kind::Term: {
        const auto& p = index[field_index(q.field())];
        auto it = p.find(q.words().front());
        return it == p.end() ? none : it->second;
    }
    case Query::Kind::Truncated: {
        const auto& p = index[field_index(q.field())];
        const std::string& prefix = q.words().front();
        IdSet out;
        for (auto it = p.lower_bound(prefix); it != p.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it)
            out = unite(out, it->second);
        return out;
    }
    case Query::Kind::Phrase: {
        const std::size_t f = field_index(q.field());
        const auto& p = index[f];
        IdSet cand;
        for (std::size_t i = 0; i < q.words().size(); ++i) {
            auto it = p.find(q.words()[i]);
            if (it == p.end())
                return none;
            cand = i == 0 ? it->second : intersect(cand, it->second);
        }
        std::erase_if(cand, [&](std::uint32_t id) { return !has_phrase(records[id], f, q.words()); });
        return cand;
    }
    case Query::Kind::And:
        return intersect(eval(*q.left(), index, records), eval(*q.right(), index, records));
    case Query::Kind::Or:
        return unite(eval(*q.left(), index, records), eval(*q.right(), index, records));
    case Query::Kind::Not: {
        IdSet inner = eval(*q.left(), index, records), out;
        std::size_t k = 0;
        for (std::uint32_t id = 0; id < records.size(); ++id) {
            while (k < inner.size() && inner[k] < id)
                ++k;
            if (k == inner.size() || inner[k] != id)
                out.push_back(id);
        }
        return out;
    }
    }
    return none;
}

} // namespace

std::vector<std::string> Store::evaluate(const Query& q) const
{
    std::vector<std::string> out;
    for (auto id : eval(q, impl_->index, impl_->records))
        out.push_back(impl_->records[id].accession);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Store::evaluate(std::string_view query) const
{
    return evaluate(*parse_query(query));
}

std::string render_neighbors_tsv(const std::vector<NeighborLink>& links)
{
    std::string out;
    for (const auto& l : links)
        out += l.from + "\t" + l.to + "\t" + std::to_string(l.score) + "\t" + l.method + "\n";
    return out;
}

std::vector<NeighborLink> parse_neighbors_tsv(std::string_view text)
{
    std::vector<NeighborLink> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream cells(line);
        NeighborLink l;
        std::string score;
        if (!std::getline(cells, l.from, '\t') || !std::getline(cells, l.to, '\t') || !std::getline(cells, score, '\t') ||
            !std::getline(cells, l.method))
            throw Error(ErrorCode::CorruptStore, "bad neighbors line: " + line);
        try {
            std::size_t used = 0;
            l.score = std::stoi(score, &used);
            if (used != score.size())
                throw std::invalid_argument(score);
        } catch (const std::exception&) {
            throw Error(ErrorCode::CorruptStore, "bad neighbor score: " + line);
        }
        out.push_back(std::move(l));
    }
    return out;
}

void Store::save_neighbors(const std::vector<NeighborLink>& links)
{
    if (!impl_->dir)
        return;
    DirLock lock(*impl_->dir, true);
    write_atomic(*impl_->dir / "neighbors.tsv", render_neighbors_tsv(links));
}

std::vector<NeighborLink> Store::load_neighbors() const
{
    if (!impl_->dir)
        return {};
    DirLock lock(*impl_->dir, false);
    const fs::path p = *impl_->dir / "neighbors.tsv";
    if (!fs::exists(p))
        return {};
    return parse_neighbors_tsv(read_file(p));
}

std::vector<NeighborLink> build_neighbors(const Store& store, int threshold, const std::optional<ScoringScheme>& scheme,
                                          std::size_t threads)
{
    std::map<AlphabetKind, std::vector<Sequence>> groups;
    for (const auto& r : store.records())
        if (r.sequence && r.sequence->size() > 0)
            groups[r.sequence->alphabet_kind()].push_back(r.sequence->with_id(r.accession));

    std::map<std::pair<std::string, std::string>, int> best;
    for (const auto& [kind, seqs] : groups) {
        if (seqs.size() < 2)
            continue;
        const ScoringScheme sc = scheme ? *scheme : ScoringScheme::for_alphabet(kind);
        KtupOptions opts;
        opts.k = kind == AlphabetKind::Protein ? 3 : 8;
        opts.threads = threads;
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            if (seqs[i].size() < opts.k)
                continue;
            for (const auto& hit : ktup_search(seqs[i], seqs, sc, opts)) {
                if (hit.record == i)
                    continue;
                auto key = std::minmax(seqs[i].id(), hit.record_id);
                std::pair<std::string, std::string> k{key.first, key.second};
                auto [it, inserted] = best.emplace(k, hit.hsp.alignment.score);
                if (!inserted)
                    it->second = std::max(it->second, hit.hsp.alignment.score);
            }
        }
    }

    std::vector<NeighborLink> links;
    for (const auto& [pair, score] : best)
        if (score >= threshold) {
            links.push_back({pair.first, pair.second, score, "ktup"});
            links.push_back({pair.second, pair.first, score, "ktup"});
        }
    std::sort(links.begin(), links.end(),
              [](const NeighborLink& a, const NeighborLink& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    return links;
}

} // namespace seqforge
