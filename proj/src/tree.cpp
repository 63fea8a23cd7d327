#include "seqforge/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace seqforge {

DistanceMatrix distance_matrix(const std::vector<Sequence>& seqs, const ScoringScheme& scheme)
{
    if (seqs.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "a distance matrix needs at least two sequences");
    const std::size_t n = seqs.size();
    DistanceMatrix m;
    m.values.assign(n, std::vector<double>(n, 0.0));
    for (const auto& s : seqs) {
        if (s.alphabet_kind() != seqs.front().alphabet_kind())
            throw Error(ErrorCode::AlphabetMismatch, "sequence '" + s.id() + "' has a different alphabet");
        m.labels.push_back(s.id());
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Alignment al = needleman_wunsch(seqs[i], seqs[j], scheme);
            double d = 1.0 - double(al.identities) / double(al.length());
            m.values[i][j] = m.values[j][i] = d;
        }
    return m;
}

std::string render_distance_tsv(const DistanceMatrix& m)
{
    std::string out;
    for (const auto& l : m.labels)
        out += "\t" + l;
    out += "\n";
    char buf[32];
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += m.labels[i];
        for (double v : m.values[i]) {
            std::snprintf(buf, sizeof buf, "\t%.6f", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

DistanceMatrix parse_distance_tsv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    DistanceMatrix m;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            std::size_t tab = l.find('\t', start);
            cells.push_back(l.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos)
                break;
            start = tab + 1;
        }
        return cells;
    };
    if (!std::getline(in, line))
        throw Error(ErrorCode::MalformedMatrix, "empty distance matrix");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    auto header = split(line);
    m.labels.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != m.labels.size() + 1)
            throw Error(ErrorCode::MalformedMatrix, "row '" + cells[0] + "' has the wrong number of columns");
        if (m.values.size() >= m.labels.size())
            throw Error(ErrorCode::MalformedMatrix, "matrix has more rows than columns");
        if (cells[0] != m.labels[m.values.size()])
            throw Error(ErrorCode::MalformedMatrix, "row label '" + cells[0] + "' does not match the header order");
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cells[c], &used));
                if (used != cells[c].size())
                    throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw Error(ErrorCode::MalformedMatrix, "bad number '" + cells[c] + "'");
            }
        }
        m.values.push_back(std::move(row));
    }
    if (m.values.size() != m.labels.size())
        throw Error(ErrorCode::MalformedMatrix, "matrix is not square");
    return m;
}

namespace {

void check_matrix(const DistanceMatrix& m)
{
    const std::size_t n = m.labels.size();
    if (n == 0)
        throw Error(ErrorCode::MalformedMatrix, "matrix has no taxa");
    if (m.values.size() != n)
        throw Error(ErrorCode::MalformedMatrix, "matrix row count does not match the labels");
    std::set<std::string> unique(m.labels.begin(), m.labels.end());
    if (unique.size() != n)
        throw Error(ErrorCode::MalformedMatrix, "duplicate taxon labels");
    for (std::size_t i = 0; i < n; ++i) {
        if (m.values[i].size() != n)
            throw Error(ErrorCode::MalformedMatrix, "matrix is not square");
        if (m.values[i][i] != 0.0)
            throw Error(ErrorCode::MalformedMatrix, "diagonal entry for '" + m.labels[i] + "' is not zero");
        for (std::size_t j = 0; j < n; ++j) {
            double v = m.values[i][j];
            if (!std::isfinite(v) || v < 0.0)
                throw Error(ErrorCode::MalformedMatrix, "distances must be finite and non-negative");
            if (j < i && v != m.values[j][i])
                throw Error(ErrorCode::MalformedMatrix,
                            "matrix is not symmetric at (" + m.labels[i] + ", " + m.labels[j] + ")");
        }
    }
}

struct Cluster {
    std::size_t node;
    std::size_t size;
    std::string label; // smallest leaf label
};

} // namespace

Tree upgma(const DistanceMatrix& m)
{
    check_matrix(m);
    const std::size_t n = m.size();
    Tree tree;
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < n; ++i) {
        tree.nodes.push_back({m.labels[i], {}, 0.0, 0.0});
        active.push_back({i, 1, m.labels[i]});
    }
    std::vector<std::vector<double>> d = m.values;

    while (active.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::string, std::string> best_key;
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                auto key = std::minmax(active[i].label, active[j].label);
                std::pair<std::string, std::string> k2{key.first, key.second};
                if (d[i][j] < best || (d[i][j] == best && k2 < best_key)) {
                    best = d[i][j];
                    best_key = std::move(k2);
                    bi = i;
                    bj = j;
                }
            }

        Cluster& a = active[bi];
        Cluster& b = active[bj];
        const double height = best / 2.0;
        TreeNode parent;
        parent.height = height;
        const bool a_first = a.label < b.label;
        parent.children = a_first ? std::vector<std::size_t>{a.node, b.node} : std::vector<std::size_t>{b.node, a.node};
        for (std::size_t c : parent.children)
            tree.nodes[c].branch_length = height - tree.nodes[c].height;
        tree.nodes.push_back(parent);
        Cluster merged{tree.nodes.size() - 1, a.size + b.size, std::min(a.label, b.label)};

        // Average linkage: distances to the merged cluster are size-weighted.
        std::vector<double> row;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (k == bi || k == bj)
                continue;
            row.push_back((double(a.size) * d[bi][k] + double(b.size) * d[bj][k]) / double(a.size + b.size));
        }
        std::vector<Cluster> next_active;
        std::vector<std::vector<double>> next_d;
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < active.size(); ++k)
            if (k != bi && k != bj)
                keep.push_back(k);
        for (std::size_t x = 0; x < keep.size(); ++x) {
            next_active.push_back(active[keep[x]]);
            std::vector<double> r;
            for (std::size_t y = 0; y < keep.size(); ++y)
                r.push_back(d[keep[x]][keep[y]]);
            r.push_back(row[x]);
            next_d.push_back(std::move(r));
        }
        next_active.push_back(std::move(merged));
        row.push_back(0.0);
        next_d.push_back(std::move(row));
        active = std::move(next_active);
        d = std::move(next_d);
    }
    tree.root = active.front().node;
    return tree;
}

namespace {

std::string number(double v)
{
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

void newick_node(const Tree& t, std::size_t id, std::string& out)
{
    const TreeNode& node = t.nodes[id];
    if (node.children.empty()) {
        out += node.label;
    } else {
        out += '(';
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (i > 0)
                out += ',';
            newick_node(t, node.children[i], out);
        }
        out += ')';
    }
    if (id != t.root)
        out += ':' + number(node.branch_length);
}

void depths(const Tree& t, std::size_t id, double acc, std::vector<std::pair<std::size_t, double>>& out)
{
    const TreeNode& node = t.nodes[id];
    if (node.children.empty()) {
        out.emplace_back(id, acc);
        return;
    }
    for (std::size_t c : node.children)
        depths(t, c, acc + t.nodes[c].branch_length, out);
}

} // namespace

std::string Tree::newick() const
{
    std::string out;
    if (!nodes.empty())
        newick_node(*this, root, out);
    return out + ";";
}

std::vector<double> Tree::leaf_depths() const
{
    std::vector<std::pair<std::size_t, double>> found;
    if (!nodes.empty())
        depths(*this, root, 0.0, found);
    std::sort(found.begin(), found.end());
    std::vector<double> out;
    for (const auto& [id, depth] : found)
        out.push_back(depth);
    return out;
}

} // namespace seqforge
