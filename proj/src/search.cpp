#include "seqforge/align.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace seqforge {

namespace {

using KmerIndex = std::unordered_map<std::string_view, std::vector<std::size_t>>;

KmerIndex index_kmers(std::string_view s, std::size_t k)
{
    KmerIndex index;
    for (std::size_t i = 0; i + k <= s.size(); ++i)
        index[s.substr(i, k)].push_back(i);
    return index;
}

struct Segment {
    std::size_t q_begin, q_end; // half-open, query coordinates
    long diagonal;
    int score;

    bool operator<(const Segment& o) const { return std::tie(diagonal, q_begin, q_end) < std::tie(o.diagonal, o.q_begin, o.q_end); }
};

// Ungapped extension of a seed in both directions. The running score may fall
// at most `dropoff` below the best seen before the walk stops.
Segment extend(std::string_view q, std::string_view s, std::size_t qi, std::size_t si, std::size_t k,
               const ScoringScheme& sc, long long dropoff)
{
    int seed = 0;
    for (std::size_t t = 0; t < k; ++t)
        seed += sc.score(q[qi + t], s[si + t]);

    long long run = 0, best_right = 0;
    std::size_t right = 0;
    for (std::size_t t = 0; qi + k + t < q.size() && si + k + t < s.size(); ++t) {
        run += sc.score(q[qi + k + t], s[si + k + t]);
        if (run > best_right) {
            best_right = run;
            right = t + 1;
        } else if (best_right - run > dropoff) {
            break;
        }
    }
    run = 0;
    long long best_left = 0;
    std::size_t left = 0;
    for (std::size_t t = 1; t <= qi && t <= si; ++t) {
        run += sc.score(q[qi - t], s[si - t]);
        if (run > best_left) {
            best_left = run;
            left = t;
        } else if (best_left - run > dropoff) {
            break;
        }
    }
    return Segment{qi - left, qi + k + right, long(si) - long(qi), int(seed + best_left + best_right)};
}

std::vector<Hsp> search_one(std::string_view query, const KmerIndex& index, std::string_view subject,
                            const ScoringScheme& sc, const KtupOptions& opt, long long dropoff)
{
    std::vector<Hsp> out;
    const std::size_t k = opt.k;
    if (subject.size() < k)
        return out;

    std::vector<std::pair<long, std::size_t>> seeds; // (diagonal, query offset)
    for (std::size_t j = 0; j + k <= subject.size(); ++j) {
        auto it = index.find(subject.substr(j, k));
        if (it == index.end())
            continue;
        for (std::size_t i : it->second)
            seeds.emplace_back(long(j) - long(i), i);
    }
    std::sort(seeds.begin(), seeds.end());

    std::set<Segment> segments;
    for (const auto& [diag, qi] : seeds) {
        Segment seg = extend(query, subject, qi, std::size_t(long(qi) + diag), k, sc, dropoff);
        if (seg.score >= opt.threshold)
            segments.insert(seg);
    }

    // Strongest segments first, so a re-alignment shared by several seeds is
    // reported with the best ungapped segment behind it.
    std::vector<Segment> ordered(segments.begin(), segments.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const Segment& a, const Segment& b) { return a.score > b.score; });

    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
    for (const Segment& seg : ordered) {
        std::size_t s_begin = std::size_t(long(seg.q_begin) + seg.diagonal);
        std::size_t s_end = std::size_t(long(seg.q_end) + seg.diagonal);
        std::size_t qw0 = seg.q_begin > opt.band_margin ? seg.q_begin - opt.band_margin : 0;
        std::size_t qw1 = std::min(query.size(), seg.q_end + opt.band_margin);
        std::size_t sw0 = s_begin > opt.band_margin ? s_begin - opt.band_margin : 0;
        std::size_t sw1 = std::min(subject.size(), s_end + opt.band_margin);
        Alignment al = smith_waterman(query.substr(qw0, qw1 - qw0), subject.substr(sw0, sw1 - sw0), sc);
        if (al.empty())
            continue;
        al.query_start += qw0;
        al.query_end += qw0;
        al.subject_start += sw0;
        al.subject_end += sw0;
        if (!seen.emplace(al.query_start, al.query_end, al.subject_start, al.subject_end).second)
            continue;
        Hsp h;
        h.diagonal = seg.diagonal;
        h.query_offset = seg.q_begin;
        h.subject_offset = s_begin;
        h.ungapped_length = seg.q_end - seg.q_begin;
        h.ungapped_score = seg.score;
        h.alignment = std::move(al);
        out.push_back(std::move(h));
    }
    return out;
}

} // namespace

std::vector<SearchHit> ktup_search(const Sequence& query, const std::vector<Sequence>& db, const ScoringScheme& scheme,
                                   const KtupOptions& options)
{
    if (options.k == 0)
        throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (options.threshold < 0)
        throw Error(ErrorCode::InvalidArgument, "threshold must be non-negative");
    std::vector<SearchHit> hits;
    if (query.size() < options.k)
        return hits;

    long long dropoff = options.dropoff.value_or(5 * scheme.match());
    if (options.unlimited_dropoff)
        dropoff = std::numeric_limits<long long>::max() / 4;

    const std::string_view q(query.residues());
    const KmerIndex index = index_kmers(q, options.k);

    std::vector<std::vector<Hsp>> per_record(db.size());
    auto work = [&](std::size_t r) {
        if (db[r].alphabet_kind() != query.alphabet_kind())
            return;
        per_record[r] = search_one(q, index, std::string_view(db[r].residues()), scheme, options, dropoff);
    };

    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, db.size());
    if (threads <= 1) {
        for (std::size_t r = 0; r < db.size(); ++r)
            work(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t r; (r = next.fetch_add(1)) < db.size();)
                    work(r);
            });
    }

    for (std::size_t r = 0; r < db.size(); ++r)
        for (auto& h : per_record[r])
            hits.push_back({r, db[r].id(), std::move(h)});

    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        const Alignment& x = a.hsp.alignment;
        const Alignment& y = b.hsp.alignment;
        return std::make_tuple(-x.score, std::cref(a.record_id), a.record, x.query_start, x.subject_start) <
               std::make_tuple(-y.score, std::cref(b.record_id), b.record, y.query_start, y.subject_start);
    });
    return hits;
}

} // namespace seqforge
