#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqforge/seq_core.hpp"

namespace seqforge {

class HydropathyScale {
public:
    HydropathyScale(std::string name, std::map<char, double> values);

    // `residue<TAB>value` lines; '#' comments; "# name: <token>" names the scale.
    static HydropathyScale parse(std::string_view text, std::string fallback_name = "custom");
    static HydropathyScale load(const std::string& path);
    // The bundled Kyte-Doolittle table.
    static const HydropathyScale& kyte_doolittle();

    const std::string& name() const noexcept { return name_; }
    double value(char residue) const;
    const std::map<char, double>& values() const noexcept { return values_; }

private:
    std::string name_;
    std::map<char, double> values_;
};

// Centered moving average; near the ends the window shrinks to what fits.
std::vector<double> hydropathy_profile(const Sequence& protein, const HydropathyScale& scale, std::size_t window);

using ResidueSet = std::string;

// {L, I, V, M, F, W, Y, C}
const ResidueSet& default_hydrophobic_set();

// Per-position hydrophobic flag; also the form a pre-computed alignment
// column conservation mask takes.
std::vector<bool> hydrophobic_mask(const Sequence& protein, const ResidueSet& hydrophobic = default_hydrophobic_set());

struct FlaggedRange {
    std::size_t begin = 0;
    std::size_t end = 0; // half-open

    bool operator==(const FlaggedRange&) const = default;
};

// Amphipathic helix signal: hydrophobic at i, i+3, i+4, i+7 with i+1, i+2,
// i+5, i+6 polar. Overlapping windows merge; merged ranges shorter than
// min_window are dropped.
std::vector<FlaggedRange> detect_helix(const std::vector<bool>& mask, std::size_t min_window = 8);
std::vector<FlaggedRange> detect_helix(const Sequence& protein, const ResidueSet& hydrophobic = default_hydrophobic_set(),
                                       std::size_t min_window = 8);

enum class StrandKind { HalfBuried, Buried };

std::string_view to_string(StrandKind kind);

struct StrandRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    StrandKind kind = StrandKind::HalfBuried;

    bool operator==(const StrandRange&) const = default;
};

struct StrandOptions {
    std::size_t min_alternating = 4;
    std::size_t min_run = 4;
};

// Half-buried: maximal stretches alternating hydrophobic/polar. Buried:
// maximal all-hydrophobic runs.
std::vector<StrandRange> detect_strand(const std::vector<bool>& mask, const StrandOptions& options = {});
std::vector<StrandRange> detect_strand(const Sequence& protein, const ResidueSet& hydrophobic = default_hydrophobic_set(),
                                       const StrandOptions& options = {});

struct SsPrediction {
    std::string labels; // over {H, E, C}
    std::string method;
    std::vector<double> confidence;

    bool operator==(const SsPrediction&) const = default;
};

struct PredictOptions {
    ResidueSet hydrophobic = default_hydrophobic_set();
    std::size_t min_helix_window = 8;
    StrandOptions strand;
};

// Helix flags give H, strand flags give E; residues claimed by both, or by
// neither, are C. Confidence is 1 for single claims, 0.5 for conflicts.
SsPrediction predict_periodicity(const Sequence& protein, const PredictOptions& options = {});
SsPrediction predict_periodicity(const std::vector<bool>& mask, const PredictOptions& options = {});

// Weighted per-residue plurality; ties at the top resolve to C. Confidence is
// the top weight's share of the total.
SsPrediction consensus(const std::vector<SsPrediction>& predictions, const std::vector<double>& weights);

// `index<TAB>residue<TAB>label<TAB>confidence`, 1-based index.
std::string render_prediction(const Sequence& protein, const SsPrediction& p);
SsPrediction parse_prediction(std::string_view text, std::string method = "file");

} // namespace seqforge
