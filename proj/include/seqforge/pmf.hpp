#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/seq_core.hpp"

namespace seqforge {

struct DigestRule {
    std::string name;
    std::string cleave_after;
    std::string blocked_by_next;
    std::size_t missed_cleavages = 0;

    bool cleaves(char residue, char next) const noexcept;
};

// `name<TAB>cleave-after<TAB>blocked-by-next` lines, '-' for an empty set.
std::vector<DigestRule> parse_digest_rules(std::string_view text);
const std::vector<DigestRule>& bundled_digest_rules();
DigestRule find_digest_rule(std::string_view name, std::size_t missed_cleavages = 0);

struct Modification {
    std::string name;
    char residue = 0;
    double delta = 0.0;
};

class MassTable {
public:
    MassTable(double water, std::map<char, double> residues, std::vector<Modification> fixed = {});

    // `residue<TAB>mass`, `water<TAB>mass` and `mod<TAB>name<TAB>residue<TAB>delta` lines.
    static MassTable parse(std::string_view text);
    static MassTable load(const std::string& path);
    // Bundled monoisotopic table, carbamidomethyl-C included.
    static const MassTable& monoisotopic();

    double water() const noexcept { return water_; }
    const std::map<char, double>& residues() const noexcept { return residues_; }
    const std::vector<Modification>& modifications() const noexcept { return fixed_; }
    MassTable without_modifications() const;

    // Residue mass with fixed modifications applied.
    double residue_mass(char residue) const;

private:
    double water_;
    std::map<char, double> residues_;
    std::vector<Modification> fixed_;
    std::map<char, double> modified_;
};

// Base peptides first, in sequence order; then concatenations of 2..m+1
// adjacent peptides ordered by span count and start.
std::vector<Sequence> digest(const Sequence& protein, const DigestRule& rule);

double peptide_mass(std::string_view peptide, const MassTable& table = MassTable::monoisotopic());
double peptide_mass(const Sequence& peptide, const MassTable& table = MassTable::monoisotopic());

enum class ToleranceUnit { Dalton, Ppm };

class Fingerprint {
public:
    Fingerprint(std::vector<double> peaks, double tolerance, ToleranceUnit unit = ToleranceUnit::Dalton);

    const std::vector<double>& peaks() const noexcept { return peaks_; }
    double tolerance() const noexcept { return tolerance_; }
    ToleranceUnit unit() const noexcept { return unit_; }
    // Absolute window half-width at a given mass.
    double window(double mass) const noexcept;

private:
    std::vector<double> peaks_;
    double tolerance_;
    ToleranceUnit unit_;
};

// One mass per line; blank lines and '#' comments ignored.
std::vector<double> parse_peak_list(std::string_view text);

struct PmfEntry {
    std::string accession;
    Sequence protein;
};

struct PmfHit {
    std::size_t entry = 0;
    std::string accession;
    std::size_t matched = 0;
    std::size_t total = 0;
    std::size_t theoretical = 0;
    double score = 0.0;
};

// Peaks matched against sorted theoretical masses, each consumed at most once.
std::size_t count_matches(const Fingerprint& f, std::vector<double> theoretical);

std::vector<PmfHit> identify(const Fingerprint& f, const std::vector<PmfEntry>& db, const DigestRule& rule,
                             const MassTable& table = MassTable::monoisotopic(), std::size_t threads = 0);

// rank, accession, matched, total, score
std::string render_pmf_tsv(const std::vector<PmfHit>& hits);

} // namespace seqforge
