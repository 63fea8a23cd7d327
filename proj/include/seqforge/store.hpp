#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/align.hpp"
#include "seqforge/formats.hpp"
#include "seqforge/seq_core.hpp"

namespace seqforge {

struct Record {
    std::string accession;
    std::string definition;
    std::string title;
    std::string organism;
    std::vector<std::string> authors;
    std::string year;
    std::vector<std::string> mesh;
    std::vector<std::string> pub_types;
    std::string language;
    std::optional<Sequence> sequence;

    bool operator==(const Record&) const = default;
};

Record record_from_genbank(const GenBankRecord& gb);
std::vector<Record> records_from_fasta(const FastaDoc& doc);

// One JSON object per record; absent fields read as empty.
std::string record_to_json(const Record& r, int indent = -1);
std::vector<Record> records_from_json(std::string_view text);

// Lowercased alphanumeric runs; bytes >= 0x80 count as alphanumeric.
std::vector<std::string> tokenize(std::string_view text);

// ------------------------------------------------------------------ queries

inline constexpr std::string_view kFieldTags[] = {"all", "au", "mh", "dp", "pt", "la", "ti"};

bool is_field_tag(std::string_view tag);

class Query;
using QueryPtr = std::shared_ptr<const Query>;

class Query {
public:
    enum class Kind { Term, Phrase, And, Or, Not, Truncated };

    static QueryPtr term(std::string text, std::string field = "all");
    static QueryPtr phrase(std::vector<std::string> words, std::string field = "all");
    static QueryPtr truncated(std::string prefix, std::string field = "all");
    static QueryPtr conj(QueryPtr l, QueryPtr r, bool implicit = false);
    static QueryPtr disj(QueryPtr l, QueryPtr r);
    static QueryPtr negate(QueryPtr operand);

    Kind kind() const noexcept { return kind_; }
    // Term text or Truncated prefix is words().front().
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::string& field() const noexcept { return field_; }
    const QueryPtr& left() const noexcept { return left_; }
    const QueryPtr& right() const noexcept { return right_; }
    // And nodes built from adjacent words rather than an explicit AND.
    bool implicit() const noexcept { return implicit_; }

    // e.g. And(Term(dna,mh),Phrase(single cell,all))
    std::string to_string() const;

    // Structural; whether an And came from an explicit operator is ignored.
    bool operator==(const Query& other) const;

private:
    Query(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::vector<std::string> words_;
    std::string field_;
    QueryPtr left_;
    QueryPtr right_;
    bool implicit_ = false;
};

QueryPtr parse_query(std::string_view text);

// -------------------------------------------------------------------- store

struct NeighborLink {
    std::string from;
    std::string to;
    int score = 0;
    std::string method;

    bool operator==(const NeighborLink&) const = default;
};

// A data directory holds records.log (length-prefixed JSON blobs),
// index/ (per-field token postings plus a manifest) and neighbors.tsv.
// Readers take a shared lock, ingest takes an exclusive one.
class Store {
public:
    static Store open(const std::filesystem::path& dir);
    static Store in_memory();

    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    ~Store();

    // Returns the number of records newly added.
    std::size_t ingest(const std::vector<Record>& records);

    std::size_t size() const noexcept;
    std::vector<std::string> accessions() const;
    std::optional<Record> get(std::string_view accession) const;
    const std::vector<Record>& records() const noexcept;

    // Sorted accessions.
    std::vector<std::string> evaluate(const Query& q) const;
    std::vector<std::string> evaluate(std::string_view query) const;

    void save_neighbors(const std::vector<NeighborLink>& links);
    std::vector<NeighborLink> load_neighbors() const;

    // True when the last open found the on-disk index stale and rebuilt it.
    bool index_rebuilt() const noexcept;

private:
    struct Impl;
    explicit Store(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

// All-vs-all ktup search (k=3 protein, k=8 nucleotide) between records that
// carry sequences of the same alphabet. A pair is linked when its best score
// in either direction reaches the threshold; links come in both directions.
std::vector<NeighborLink> build_neighbors(const Store& store, int threshold,
                                          const std::optional<ScoringScheme>& scheme = std::nullopt,
                                          std::size_t threads = 0);

std::string render_neighbors_tsv(const std::vector<NeighborLink>& links);
std::vector<NeighborLink> parse_neighbors_tsv(std::string_view text);

} // namespace seqforge
