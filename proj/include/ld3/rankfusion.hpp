#pragma once

// Ranking mathematics behind the label-dependency detector: pairwise label
// co-occurrence, per-label (local) rankings, fusion of local rankings into a
// global ranking, and the weighted-similarity (WS) rank coefficient.
//
// Label indices are zero-based throughout. Ranks are one-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"

namespace ld3 {

/// n x n symmetric count matrix; entry (i, j) is the number of window
/// instances in which labels i and j are both set. The diagonal is zero.
class CooccurrenceMatrix {
  public:
    CooccurrenceMatrix() = default;
    explicit CooccurrenceMatrix(std::size_t n) : n_(n), counts_(n * n, 0) {}

    std::size_t labels() const noexcept { return n_; }

    std::uint32_t operator()(std::size_t i, std::size_t j) const { return counts_[i * n_ + j]; }

    /// Count one more instance.
    void add(const LabelVector& v) { apply(v, +1); }

    /// Remove a previously counted instance.
    void remove(const LabelVector& v) { apply(v, -1); }

    void clear() { std::fill(counts_.begin(), counts_.end(), 0u); }

    std::vector<std::vector<std::uint32_t>> to_rows() const {
        std::vector<std::vector<std::uint32_t>> rows(n_);
        for (std::size_t i = 0; i < n_; ++i)
            rows[i].assign(counts_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                           counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
        return rows;
    }

    friend bool operator==(const CooccurrenceMatrix&, const CooccurrenceMatrix&) = default;

  private:
    void apply(const LabelVector& v, int delta) {
        require_length(v, n_, "cooccurrence");
        thread_local std::vector<std::size_t> on;
        on.clear();
        for (std::size_t i = 0; i < n_; ++i)
            if (v[i]) on.push_back(i);
        for (std::size_t a = 0; a < on.size(); ++a)
            for (std::size_t b = a + 1; b < on.size(); ++b) {
                counts_[on[a] * n_ + on[b]] += static_cast<std::uint32_t>(delta);
                counts_[on[b] * n_ + on[a]] += static_cast<std::uint32_t>(delta);
            }
    }

    std::size_t n_ = 0;
    std::vector<std::uint32_t> counts_;
};

/// Co-occurrence counts over every vector of `window`.
template <std::ranges::input_range Window>
    requires std::same_as<std::ranges::range_value_t<Window>, LabelVector>
CooccurrenceMatrix cooccurrence(const Window& window, std::size_t n) {
    CooccurrenceMatrix m(n);
    for (const LabelVector& v : window) m.add(v);
    return m;
}

/// For each label i, the competition rank (1 = most co-occurring) of every
/// other label j by descending count (i, j). Tied counts share the smallest
/// rank of the tie group; zero counts are ranked like any other value.
class LocalRankings {
  public:
    LocalRankings() = default;
    explicit LocalRankings(std::size_t n) : n_(n), ranks_(n * n, 0) {}

    std::size_t labels() const noexcept { return n_; }

    /// Rank of `label` in the ranking owned by `row`; 0 when label == row.
    std::uint32_t rank(std::size_t row, std::size_t label) const { return ranks_[row * n_ + label]; }
    void set_rank(std::size_t row, std::size_t label, std::uint32_t r) { ranks_[row * n_ + label] = r; }

    friend bool operator==(const LocalRankings&, const LocalRankings&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> ranks_;
};

inline LocalRankings local_rankings(const CooccurrenceMatrix& m) {
    const std::size_t n = m.labels();
    LocalRankings lr(n);
    std::vector<std::pair<std::uint32_t, std::size_t>> row;
    row.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.emplace_back(m(i, j), j);
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::uint32_t rank = 1;
        for (std::size_t p = 0; p < row.size(); ++p) {
            if (p > 0 && row[p].first != row[p - 1].first) rank = static_cast<std::uint32_t>(p + 1);
            lr.set_rank(i, row[p].second, rank);
        }
    }
    return lr;
}

/// A fused ordering of all labels. `order[k]` is the label at zero-based
/// position k; `scores[i]` is the fusion method's score for label i.
struct GlobalRanking {
    std::vector<std::size_t> order;
    std::vector<double> scores;
    /// False only when an iterative fusion (MC4) hit its iteration cap.
    bool converged = true;

    std::size_t size() const noexcept { return order.size(); }

    /// Zero-based position of each label, indexed by label.
    std::vector<std::size_t> positions() const {
        std::vector<std::size_t> pos(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
        return pos;
    }
};

enum class FusionMethod { reciprocal, borda, condorcet, mc4 };

inline std::string_view to_string(FusionMethod f) {
    switch (f) {
        case FusionMethod::reciprocal: return "reciprocal";
        case FusionMethod::borda: return "borda";
        case FusionMethod::condorcet: return "condorcet";
        case FusionMethod::mc4: return "mc4";
    }
    return "?";
}

inline std::optional<FusionMethod> parse_fusion(std::string_view s) {
    if (s == "reciprocal") return FusionMethod::reciprocal;
    if (s == "borda") return FusionMethod::borda;
    if (s == "condorcet") return FusionMethod::condorcet;
    if (s == "mc4") return FusionMethod::mc4;
    return std::nullopt;
}

namespace detail {

__extension__ typedef unsigned __int128 u128;

/// lcm(1..m) when m * lcm(1..m) fits in 128 bits.
inline std::optional<u128> harmonic_denominator(std::size_t m) {
    u128 l = 1;
    const u128 max = ~u128{0};
    for (std::size_t k = 2; k <= m; ++k) {
        u128 a = l, b = k;
        while (b != 0) {
            u128 t = a % b;
            a = b;
            b = t;
        }
        const u128 step = k / a;
        if (l > max / step) return std::nullopt;
        l *= step;
    }
    if (m > 0 && l > max / m) return std::nullopt;
    return l;
}

inline std::vector<std::size_t> sort_labels(std::size_t n, auto&& before) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (before(a, b)) return true;
        if (before(b, a)) return false;
        return a < b;
    });
    return order;
}

inline void require_fusable(const LocalRankings& lr) {
    if (lr.labels() < 2) throw input_error("rank fusion needs at least 2 labels");
}

/// Number of rankings placing a strictly above b, and the number of rankings
/// that contain both (every row except a's and b's own).
inline std::size_t pairwise_wins(const LocalRankings& lr, std::size_t a, std::size_t b) {
    std::size_t wins = 0;
    for (std::size_t row = 0; row < lr.labels(); ++row) {
        if (row == a || row == b) continue;
        if (lr.rank(row, a) < lr.rank(row, b)) ++wins;
    }
    return wins;
}

inline bool majority_prefers(const LocalRankings& lr, std::size_t a, std::size_t b) {
    const std::size_t containing = lr.labels() - 2;
    return 2 * pairwise_wins(lr, a, b) > containing;
}

}  // namespace detail

/// Reciprocal rank fusion: label i scores 1 / sum_j (1 / rank_j(i)) over
/// every ranking except i's own. Lower scores come first; equal scores are
/// ordered by label index. Sums are compared exactly (rational arithmetic)
/// so mathematically tied labels always fall back to the index tie-break.
inline GlobalRanking reciprocal_fuse(const LocalRankings& lr) {
    detail::require_fusable(lr);
    const std::size_t n = lr.labels();
    GlobalRanking g;
    g.scores.resize(n);

    if (auto denom = detail::harmonic_denominator(n - 1)) {
        std::vector<detail::u128> sums(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t row = 0; row < n; ++row)
                if (row != i) sums[i] += *denom / lr.rank(row, i);
            g.scores[i] = static_cast<double>(static_cast<long double>(*denom) / static_cast<long double>(sums[i]));
        }
        g.order = detail::sort_labels(n, [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });
        return g;
    }

    // Too many labels for exact sums: add terms grouped by rank value so that
    // labels with the same rank multiset get bit-identical sums.
    std::vector<long double> sums(n, 0.0L);
    std::vector<std::size_t> hist(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::size_t row = 0; row < n; ++row)
            if (row != i) ++hist[lr.rank(row, i)];
        for (std::size_t r = 1; r < n; ++r)
            if (hist[r]) sums[i] += static_cast<long double>(hist[r]) / static_cast<long double>(r);
        g.scores[i] = static_cast<double>(1.0L / sums[i]);
    }
    g.order = detail::sort_labels(n, [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });
    return g;
}

/// Borda count: every ranking awards (n - 1) - rank + 1 points, tied labels
/// sharing the points of their shared rank. Highest total first.
inline GlobalRanking borda_fuse(const LocalRankings& lr) {
    detail::require_fusable(lr);
    const std::size_t n = lr.labels();
    std::vector<std::uint64_t> points(n, 0);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t j = 0; j < n; ++j)
            if (j != row) points[j] += n - lr.rank(row, j);
    GlobalRanking g;
    g.scores.assign(points.begin(), points.end());
    g.order = detail::sort_labels(n, [&](std::size_t a, std::size_t b) { return points[a] > points[b]; });
    return g;
}

/// Condorcet fuse: labels sorted with the pairwise-majority comparator using
/// a stable insertion sort over index order (well defined even when the
/// majority relation has cycles). Scores are pairwise-win counts.
inline GlobalRanking condorcet_fuse(const LocalRankings& lr) {
    detail::require_fusable(lr);
    const std::size_t n = lr.labels();
    std::vector<std::vector<char>> beats(n, std::vector<char>(n, 0));
    GlobalRanking g;
    g.scores.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && detail::majority_prefers(lr, a, b)) {
                beats[a][b] = 1;
                g.scores[a] += 1.0;
            }

    g.order.reserve(n);
    for (std::size_t label = 0; label < n; ++label) {
        g.order.push_back(label);
        for (std::size_t k = g.order.size() - 1; k > 0 && beats[g.order[k]][g.order[k - 1]]; --k)
            std::swap(g.order[k], g.order[k - 1]);
    }
    return g;
}

struct Mc4Options {
    double perturbation = 1e-6;
    double tolerance = 1e-9;
    std::size_t max_iterations = 10'000;
};

/// Transition matrix of the MC4 chain: from label i, propose j uniformly
/// among all n labels and move when a majority of rankings prefers j to i.
/// Mixed with the uniform matrix by `perturbation`. Row-major n x n.
inline std::vector<double> mc4_transition(const LocalRankings& lr, double perturbation) {
    const std::size_t n = lr.labels();
    const double dn = static_cast<double>(n);
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double stay = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !detail::majority_prefers(lr, j, i)) continue;
            p[i * n + j] = 1.0 / dn;
            stay -= 1.0 / dn;
        }
        p[i * n + i] = stay;
        for (std::size_t j = 0; j < n; ++j) p[i * n + j] = (1.0 - perturbation) * p[i * n + j] + perturbation / dn;
    }
    return p;
}

/// MC4 (Markov chain) rank aggregation. Scores are stationary masses,
/// highest first. Masses are compared on a 1e-12 grid so that symmetric
/// labels tie and fall back to index order.
inline GlobalRanking mc4_fuse(const LocalRankings& lr, const Mc4Options& opt = {}) {
    detail::require_fusable(lr);
    const std::size_t n = lr.labels();
    const auto p = mc4_transition(lr, opt.perturbation);

    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    GlobalRanking g;
    g.converged = false;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * p[i * n + j];
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j) change += std::abs(next[j] - pi[j]);
        pi.swap(next);
        if (change < opt.tolerance) {
            g.converged = true;
            break;
        }
    }

    std::vector<long long> key(n);
    for (std::size_t j = 0; j < n; ++j) key[j] = std::llround(pi[j] * 1e12);
    g.scores = pi;
    g.order = detail::sort_labels(n, [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return g;
}

inline GlobalRanking fuse(const LocalRankings& lr, FusionMethod method) {
    switch (method) {
        case FusionMethod::reciprocal: return reciprocal_fuse(lr);
        case FusionMethod::borda: return borda_fuse(lr);
        case FusionMethod::condorcet: return condorcet_fuse(lr);
        case FusionMethod::mc4: return mc4_fuse(lr);
    }
    throw input_error("unknown fusion method");
}

/// WS rank similarity of `now` against `before`, with zero-based positions
/// taken from `now`:
///
///   C = 1 - sum_i 2^-p(i) * |p(i) - q(i)| / max(|1 - p(i)|, |n - p(i)|)
///
/// where p is the position in `now` and q the position in `before`.
/// C == 1 iff the orders are identical; C > -1 for every n >= 2.
inline double ws_coefficient(const GlobalRanking& now, const GlobalRanking& before) {
    const std::size_t n = now.size();
    if (before.size() != n) throw input_error("ws_coefficient: rankings differ in length");
    if (n == 0) throw input_error("ws_coefficient: empty ranking");

    std::vector<std::size_t> p(n, n), q(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = now.order[k], b = before.order[k];
        if (a >= n || p[a] != n) throw input_error("ws_coefficient: first ranking is not a permutation of 0..n-1");
        if (b >= n || q[b] != n) throw input_error("ws_coefficient: rankings are over different label sets");
        p[a] = k;
        q[b] = k;
    }

    const double dn = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t label = 0; label < n; ++label) {
        const double pos = static_cast<double>(p[label]);
        const double dist = std::abs(pos - static_cast<double>(q[label]));
        if (dist == 0.0) continue;
        const double scale = std::max(std::abs(1.0 - pos), std::abs(dn - pos));
        sum += std::ldexp(1.0, -static_cast<int>(p[label])) * dist / scale;
    }
    return 1.0 - sum;
}

}  // namespace ld3
