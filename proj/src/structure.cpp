#include "seqforge/structure.hpp"

#include "seqforge/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace seqforge {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void require_protein(const Sequence& s)
{
    if (s.alphabet_kind() != AlphabetKind::Protein)
        throw Error(ErrorCode::WrongAlphabet, "sequence '" + s.id() + "' is not a protein");
}

} // namespace

HydropathyScale::HydropathyScale(std::string name, std::map<char, double> values)
    : name_(std::move(name)), values_(std::move(values))
{
    for (char c : Alphabet::protein().symbols())
        if (!values_.count(c))
            throw Error(ErrorCode::InvalidArgument, std::string("hydropathy scale lacks residue ") + c);
}

HydropathyScale HydropathyScale::parse(std::string_view text, std::string fallback_name)
{
    std::istringstream in{std::string(text)};
    std::string line, name = std::move(fallback_name);
    std::map<char, double> values;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#') {
            std::string body = trim(std::string_view(t).substr(1));
            if (body.rfind("name:", 0) == 0)
                name = trim(std::string_view(body).substr(5));
            continue;
        }
        std::istringstream cells(t);
        std::string residue;
        double v = 0;
        if (!(cells >> residue >> v) || residue.size() != 1)
            throw Error(ErrorCode::InvalidArgument, "bad scale line " + std::to_string(lineno) + ": " + t);
        char r = char(std::toupper((unsigned char)residue[0]));
        if (!Alphabet::protein().contains(r))
            throw Error(ErrorCode::InvalidResidue, "scale line " + std::to_string(lineno) + " names residue " + residue);
        values[r] = v;
    }
    return HydropathyScale(std::move(name), std::move(values));
}

HydropathyScale HydropathyScale::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read scale file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const HydropathyScale& HydropathyScale::kyte_doolittle()
{
    static const HydropathyScale scale = parse(data::hydropathy_kyte_doolittle(), "kyte-doolittle");
    return scale;
}

double HydropathyScale::value(char residue) const
{
    auto it = values_.find(residue);
    // X and stop carry no hydropathy signal.
    return it == values_.end() ? 0.0 : it->second;
}

std::vector<double> hydropathy_profile(const Sequence& protein, const HydropathyScale& scale, std::size_t window)
{
    require_protein(protein);
    if (window == 0 || window % 2 == 0)
        throw Error(ErrorCode::InvalidArgument, "hydropathy window must be odd");
    if (window > protein.size())
        throw Error(ErrorCode::WindowTooLarge, "window " + std::to_string(window) + " exceeds sequence length " +
                                                   std::to_string(protein.size()));
    const std::size_t n = protein.size(), half = window / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + scale.value(protein[i]);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= half ? i - half : 0;
        std::size_t hi = std::min(n, i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / double(hi - lo);
    }
    return out;
}

const ResidueSet& default_hydrophobic_set()
{
    static const ResidueSet set = "LIVMFWYC";
    return set;
}

std::vector<bool> hydrophobic_mask(const Sequence& protein, const ResidueSet& hydrophobic)
{
    require_protein(protein);
    std::vector<bool> mask(protein.size());
    for (std::size_t i = 0; i < protein.size(); ++i)
        mask[i] = hydrophobic.find(protein[i]) != std::string::npos;
    return mask;
}

std::vector<FlaggedRange> detect_helix(const std::vector<bool>& mask, std::size_t min_window)
{
    if (min_window < 8)
        throw Error(ErrorCode::InvalidArgument, "helix window must be at least 8");
    static constexpr std::array<bool, 8> face{true, false, false, true, true, false, false, true};
    std::vector<FlaggedRange> out;
    if (mask.size() < 8)
        return out;
    for (std::size_t i = 0; i + 8 <= mask.size(); ++i) {
        bool hit = true;
        for (std::size_t k = 0; k < 8 && hit; ++k)
            hit = mask[i + k] == face[k];
        if (!hit)
            continue;
        if (!out.empty() && i <= out.back().end)
            out.back().end = i + 8;
        else
            out.push_back({i, i + 8});
    }
    std::erase_if(out, [&](const FlaggedRange& r) { return r.end - r.begin < min_window; });
    return out;
}

std::vector<FlaggedRange> detect_helix(const Sequence& protein, const ResidueSet& hydrophobic, std::size_t min_window)
{
    return detect_helix(hydrophobic_mask(protein, hydrophobic), min_window);
}

std::string_view to_string(StrandKind kind)
{
    return kind == StrandKind::Buried ? "buried" : "half-buried";
}

std::vector<StrandRange> detect_strand(const std::vector<bool>& mask, const StrandOptions& options)
{
    if (options.min_alternating < 4 || options.min_run < 4)
        throw Error(ErrorCode::InvalidArgument, "strand lengths must be at least 4");
    std::vector<StrandRange> out;
    const std::size_t n = mask.size();

    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && mask[i] != mask[i - 1])
            continue;
        if (i - start >= options.min_alternating)
            out.push_back({start, i, StrandKind::HalfBuried});
        start = i;
    }
    for (std::size_t i = 0; i < n;) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && mask[j])
            ++j;
        if (j - i >= options.min_run)
            out.push_back({i, j, StrandKind::Buried});
        i = j;
    }
    std::sort(out.begin(), out.end(), [](const StrandRange& a, const StrandRange& b) {
        return std::tie(a.begin, a.end) < std::tie(b.begin, b.end);
    });
    return out;
}

std::vector<StrandRange> detect_strand(const Sequence& protein, const ResidueSet& hydrophobic,
                                       const StrandOptions& options)
{
    return detect_strand(hydrophobic_mask(protein, hydrophobic), options);
}

SsPrediction predict_periodicity(const std::vector<bool>& mask, const PredictOptions& options)
{
    const std::size_t n = mask.size();
    std::vector<unsigned char> claims(n, 0);
    for (const auto& r : detect_helix(mask, options.min_helix_window))
        for (std::size_t i = r.begin; i < r.end; ++i)
            claims[i] |= 1;
    for (const auto& r : detect_strand(mask, options.strand))
        for (std::size_t i = r.begin; i < r.end; ++i)
            claims[i] |= 2;

    SsPrediction p;
    p.method = "periodicity";
    p.labels.resize(n);
    p.confidence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (claims[i]) {
        case 1: p.labels[i] = 'H'; p.confidence[i] = 1.0; break;
        case 2: p.labels[i] = 'E'; p.confidence[i] = 1.0; break;
        case 3: p.labels[i] = 'C'; p.confidence[i] = 0.5; break;
        default: p.labels[i] = 'C'; p.confidence[i] = 1.0; break;
        }
    }
    return p;
}

SsPrediction predict_periodicity(const Sequence& protein, const PredictOptions& options)
{
    return predict_periodicity(hydrophobic_mask(protein, options.hydrophobic), options);
}

SsPrediction consensus(const std::vector<SsPrediction>& predictions, const std::vector<double>& weights)
{
    if (predictions.empty())
        throw Error(ErrorCode::InvalidArgument, "consensus needs at least one prediction");
    if (weights.size() != predictions.size())
        throw Error(ErrorCode::LengthMismatch, "one weight per prediction is required");
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "weights must be non-negative");
        total += w;
    }
    if (total <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "weights must not all be zero");
    const std::size_t n = predictions.front().labels.size();
    for (const auto& p : predictions)
        if (p.labels.size() != n)
            throw Error(ErrorCode::LengthMismatch, "predictions differ in length");
    if (predictions.size() == 1)
        return predictions.front();

    SsPrediction out;
    out.method = "consensus";
    out.labels.resize(n);
    out.confidence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Order H, E, C
        std::array<double, 3> w{0, 0, 0};
        for (std::size_t k = 0; k < predictions.size(); ++k) {
            char l = predictions[k].labels[i];
            w[l == 'H' ? 0 : l == 'E' ? 1 : 2] += weights[k];
        }
        double top = *std::max_element(w.begin(), w.end());
        int winners = int(std::count(w.begin(), w.end(), top));
        if (winners > 1 || w[2] == top)
            out.labels[i] = 'C';
        else
            out.labels[i] = w[0] == top ? 'H' : 'E';
        out.confidence[i] = top / total;
    }
    return out;
}

std::string render_prediction(const Sequence& protein, const SsPrediction& p)
{
    if (p.labels.size() != protein.size() || p.confidence.size() != protein.size())
        throw Error(ErrorCode::LengthMismatch, "prediction length does not match the sequence");
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < protein.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu\t%c\t%c\t%.3f\n", i + 1, protein[i], p.labels[i], p.confidence[i]);
        out += buf;
    }
    return out;
}

SsPrediction parse_prediction(std::string_view text, std::string method)
{
    SsPrediction p;
    p.method = std::move(method);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t expect = 1;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::istringstream cells(t);
        std::size_t index = 0;
        std::string residue, label;
        double conf = 0;
        if (!(cells >> index >> residue >> label >> conf) || label.size() != 1 ||
            std::string_view("HEC").find(label[0]) == std::string_view::npos || conf < 0.0 || conf > 1.0)
            throw Error(ErrorCode::InvalidArgument, "bad prediction line: " + t);
        if (index != expect)
            throw Error(ErrorCode::InvalidArgument, "prediction index " + std::to_string(index) + " out of order");
        ++expect;
        p.labels += label[0];
        p.confidence.push_back(conf);
    }
    return p;
}

} // namespace seqforge
