#pragma once

// Instance sources: a reader/writer for delimited multi-label datasets and a
// seeded synthetic stream generator with sigmoid-blended concept drifts.
//
// Dataset text format
// -------------------
//   # comment lines and blank lines are ignored anywhere
//   N D n                      optional header, whitespace separated
//   y1,...,yn,x1,...,xD        one instance per line (labels first), or
//   x1,...,xD,y1,...,yn        with labels last
//
// Labels must be exactly 0 or 1. Features are decimal reals. When the header
// is present the row count must equal N; without it the label count must be
// supplied by the caller and D is taken from the first row.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"

namespace ld3 {

struct Instance {
    std::vector<double> features;
    LabelVector labels;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct DatasetMeta {
    std::size_t instances = 0;  // N
    std::size_t features = 0;   // D
    std::size_t labels = 0;     // n
    double cardinality = 0.0;   // LC: mean number of set labels per instance
    double density = 0.0;       // LD: LC / n

    friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Accumulates N, LC and LD over a pass of instances.
class MetaAccumulator {
  public:
    MetaAccumulator(std::size_t features, std::size_t labels) : features_(features), labels_(labels) {}

    void add(const Instance& inst) {
        ++count_;
        active_ += inst.labels.cardinality();
    }

    DatasetMeta meta() const {
        DatasetMeta m;
        m.instances = count_;
        m.features = features_;
        m.labels = labels_;
        m.cardinality = count_ ? static_cast<double>(active_) / static_cast<double>(count_) : 0.0;
        m.density = labels_ ? m.cardinality / static_cast<double>(labels_) : 0.0;
        return m;
    }

  private:
    std::size_t features_;
    std::size_t labels_;
    std::size_t count_ = 0;
    std::size_t active_ = 0;
};

struct DatasetFormat {
    /// Required when the text has no header; checked against it otherwise.
    std::optional<std::size_t> labels;
    bool labels_first = true;
};

/// A fully parsed dataset.
struct Dataset {
    DatasetMeta meta;
    std::vector<Instance> instances;
};

/// Single-pass source over a dataset held in memory.
class DatasetStream {
  public:
    explicit DatasetStream(const Dataset& data) : data_(&data) {}

    std::optional<Instance> next() {
        if (pos_ >= data_->instances.size()) return std::nullopt;
        return data_->instances[pos_++];
    }

    std::size_t features() const noexcept { return data_->meta.features; }
    std::size_t labels() const noexcept { return data_->meta.labels; }

  private:
    const Dataset* data_;
    std::size_t pos_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<std::size_t> parse_count(std::string_view tok) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_real(std::string_view tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Shortest text that parses back to exactly `v`.
inline void append_real(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace detail

inline Dataset parse_dataset(std::istream& in, const DatasetFormat& format = {}) {
    Dataset data;
    std::optional<std::size_t> declared_n, features, labels = format.labels;
    bool seen_content = false;
    std::size_t line_no = 0, last_line = 0;
    std::string line;
    std::vector<std::string_view> tokens;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        last_line = line_no;

        if (!seen_content && text.find(',') == std::string_view::npos) {
            seen_content = true;
            std::istringstream hs{std::string(text)};
            std::string a, b, c, extra;
            hs >> a >> b >> c;
            auto hn = detail::parse_count(a), hd = detail::parse_count(b), hl = detail::parse_count(c);
            if (!hn || !hd || !hl || (hs >> extra)) throw parse_error(line_no, "header must be three integers 'N D n'");
            if (labels && *labels != *hl)
                throw parse_error(line_no, "header declares " + std::to_string(*hl) + " labels, expected " +
                                               std::to_string(*labels));
            if (*hl == 0) throw parse_error(line_no, "label count must be positive");
            declared_n = hn;
            features = hd;
            labels = hl;
            continue;
        }
        seen_content = true;

        tokens.clear();
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            tokens.push_back(detail::trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }

        if (!labels) throw parse_error(line_no, "no header and no label count given");
        if (!features) {
            if (tokens.size() <= *labels)
                throw parse_error(line_no, "row has " + std::to_string(tokens.size()) + " fields, need more than " +
                                               std::to_string(*labels));
            features = tokens.size() - *labels;
        }
        const std::size_t n = *labels, d = *features;
        if (tokens.size() != n + d)
            throw parse_error(line_no, "expected " + std::to_string(n + d) + " fields, got " + std::to_string(tokens.size()));

        Instance inst;
        inst.labels = LabelVector(n);
        inst.features.resize(d);
        const std::size_t label_off = format.labels_first ? 0 : d;
        const std::size_t feature_off = format.labels_first ? n : 0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto tok = tokens[label_off + j];
            if (tok != "0" && tok != "1")
                throw parse_error(line_no, "label " + std::to_string(j + 1) + " is not 0/1: '" + std::string(tok) + "'");
            inst.labels.set(j, tok == "1");
        }
        for (std::size_t f = 0; f < d; ++f) {
            auto v = detail::parse_real(tokens[feature_off + f]);
            if (!v)
                throw parse_error(line_no, "feature " + std::to_string(f + 1) + " is not a number: '" +
                                               std::string(tokens[feature_off + f]) + "'");
            inst.features[f] = *v;
        }
        data.instances.push_back(std::move(inst));
    }
    if (in.bad()) throw io_error("read failed");

    if (declared_n && *declared_n != data.instances.size())
        throw parse_error(last_line, "header declares " + std::to_string(*declared_n) + " instances, found " +
                                         std::to_string(data.instances.size()));

    MetaAccumulator acc(features.value_or(0), labels.value_or(0));
    for (const auto& inst : data.instances) acc.add(inst);
    data.meta = acc.meta();
    return data;
}

inline Dataset read_dataset(const std::string& path, const DatasetFormat& format = {}) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset '" + path + "'");
    return parse_dataset(in, format);
}

/// Serialise one instance as a dataset row (no trailing newline).
inline void append_row(std::string& out, const Instance& inst, bool labels_first = true) {
    auto labels = [&] {
        for (std::size_t j = 0; j < inst.labels.size(); ++j) {
            if (j) out.push_back(',');
            out.push_back(inst.labels[j] ? '1' : '0');
        }
    };
    auto features = [&] {
        for (std::size_t f = 0; f < inst.features.size(); ++f) {
            if (f) out.push_back(',');
            detail::append_real(out, inst.features[f]);
        }
    };
    if (labels_first) {
        labels();
        if (!inst.features.empty()) out.push_back(',');
        features();
    } else {
        features();
        if (!inst.features.empty()) out.push_back(',');
        labels();
    }
}

inline void write_header(std::ostream& out, std::size_t instances, std::size_t features, std::size_t labels) {
    out << instances << ' ' << features << ' ' << labels << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic drift streams
// ---------------------------------------------------------------------------

enum class DriftKind { sudden, incremental, reoccurring };

inline std::string_view to_string(DriftKind k) {
    switch (k) {
        case DriftKind::sudden: return "sudden";
        case DriftKind::incremental: return "incremental";
        case DriftKind::reoccurring: return "reoccurring";
    }
    return "?";
}

inline std::optional<DriftKind> parse_drift_kind(std::string_view s) {
    if (s == "sudden") return DriftKind::sudden;
    if (s == "incremental") return DriftKind::incremental;
    if (s == "reoccurring") return DriftKind::reoccurring;
    return std::nullopt;
}

/// Parameters of a synthetic stream. A stream with k drift positions blends
/// k + 1 concepts; for `reoccurring` every other concept repeats the first
/// (A, B, A, ...).
struct DriftStreamSpec {
    std::size_t samples = 20'000;
    std::size_t labels = 50;
    std::size_t features = 200;
    std::vector<std::size_t> drift_positions{4'000, 10'000};
    std::vector<std::size_t> drift_widths{1, 1};
    DriftKind kind = DriftKind::sudden;
    std::uint64_t seed = 1;

    std::size_t labelsets = 30;         // distinct labelsets per concept
    double extra_labels_mean = 0.6;     // cardinality = 1 + Poisson(mean), clipped
    std::size_t max_cardinality = 5;
    double spread = 0.1;                // isotropic feature noise around each center

    /// 20,000 x 200 features x 50 labels, drifts at 4,000 and 10,000; sudden
    /// drifts switch over one sample, the others over 500.
    static DriftStreamSpec preset(DriftKind kind, std::uint64_t seed = 1) {
        DriftStreamSpec s;
        s.kind = kind;
        s.seed = seed;
        const std::size_t w = kind == DriftKind::sudden ? 1 : 500;
        s.drift_widths = {w, w};
        return s;
    }

    std::size_t concepts() const noexcept { return drift_positions.size() + 1; }

    /// Index of the distinct concept used for blend slot `slot`.
    std::size_t base_concept(std::size_t slot) const noexcept {
        return kind == DriftKind::reoccurring ? slot % 2 : slot;
    }

    void validate() const {
        if (labels < 2) throw config_error("synthetic stream needs at least 2 labels");
        if (features < 1) throw config_error("synthetic stream needs at least 1 feature");
        if (labelsets < 1) throw config_error("labelsets per concept must be positive");
        if (max_cardinality < 1 || max_cardinality > labels)
            throw config_error("max cardinality must be in [1, labels]");
        if (!(extra_labels_mean >= 0.0) || !(spread >= 0.0)) throw config_error("negative generator parameter");
        if (drift_widths.size() != drift_positions.size())
            throw config_error("need one drift width per drift position");
        for (std::size_t k = 0; k < drift_positions.size(); ++k) {
            const std::size_t p = drift_positions[k];
            if (p == 0 || p >= samples) throw config_error("drift position " + std::to_string(p) + " outside (0, N)");
            if (k > 0 && p <= drift_positions[k - 1]) throw config_error("drift positions must be strictly increasing");
            if (drift_widths[k] < 1) throw config_error("drift widths must be >= 1");
        }
        if (kind == DriftKind::reoccurring && drift_positions.size() < 2)
            throw config_error("a reoccurring stream needs at least two drift positions");
    }
};

/// Probability that sample `i` comes from the concept after a drift at
/// `position` of the given width: 1 / (1 + exp(-4 (i - p) / W)). Width 1 is
/// a hard switch at p.
inline double drift_probability(std::size_t i, std::size_t position, std::size_t width) {
    if (width <= 1) return i >= position ? 1.0 : 0.0;
    const double x = -4.0 * (static_cast<double>(i) - static_cast<double>(position)) / static_cast<double>(width);
    return 1.0 / (1.0 + std::exp(x));
}

/// One concept: labelsets, each with a Gaussian feature cluster.
struct Concept {
    std::vector<LabelVector> labelsets;
    std::vector<std::vector<double>> centers;
};

inline Concept make_concept(const DriftStreamSpec& spec, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32), 0x636f6e63u,
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    std::poisson_distribution<int> extra(spec.extra_labels_mean);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Concept c;
    std::vector<std::size_t> pool(spec.labels);
    for (std::size_t k = 0; k < spec.labelsets; ++k) {
        const std::size_t card =
            std::min<std::size_t>(1 + static_cast<std::size_t>(spec.extra_labels_mean > 0.0 ? extra(rng) : 0),
                                  spec.max_cardinality);
        for (std::size_t j = 0; j < spec.labels; ++j) pool[j] = j;
        LabelVector ls(spec.labels);
        for (std::size_t m = 0; m < card; ++m) {
            std::uniform_int_distribution<std::size_t> pick(m, spec.labels - 1);
            std::swap(pool[m], pool[pick(rng)]);
            ls.set(pool[m], true);
        }
        c.labelsets.push_back(std::move(ls));

        std::vector<double> center(spec.features);
        for (auto& v : center) v = unit(rng);
        c.centers.push_back(std::move(center));
    }
    return c;
}

/// Deterministic synthetic stream. Each sample first picks its concept (one
/// uniform draw per drift, nested: the sample passes drift k only if it
/// passed drifts 0..k-1), then a labelset uniformly within that concept,
/// then features from the labelset's cluster.
class SyntheticStream {
  public:
    explicit SyntheticStream(DriftStreamSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        std::seed_seq seq{static_cast<std::uint32_t>(spec_.seed), static_cast<std::uint32_t>(spec_.seed >> 32),
                          0x73616d70u};
        rng_.seed(seq);
        const std::size_t distinct = spec_.kind == DriftKind::reoccurring ? 2 : spec_.concepts();
        for (std::size_t b = 0; b < distinct; ++b) concepts_.push_back(make_concept(spec_, b));
    }

    std::optional<Instance> next() {
        if (index_ >= spec_.samples) return std::nullopt;

        std::size_t slot = 0;
        bool passed = true;
        for (std::size_t k = 0; k < spec_.drift_positions.size(); ++k) {
            const double u = unit_(rng_);
            if (passed && u < drift_probability(index_, spec_.drift_positions[k], spec_.drift_widths[k]))
                slot = k + 1;
            else
                passed = false;
        }
        last_slot_ = slot;
        const Concept& c = concepts_[spec_.base_concept(slot)];

        std::uniform_int_distribution<std::size_t> pick(0, c.labelsets.size() - 1);
        const std::size_t which = pick(rng_);
        Instance inst;
        inst.labels = c.labelsets[which];
        inst.features.resize(spec_.features);
        for (std::size_t f = 0; f < spec_.features; ++f) inst.features[f] = c.centers[which][f] + spec_.spread * normal_(rng_);
        ++index_;
        return inst;
    }

    const DriftStreamSpec& spec() const noexcept { return spec_; }
    std::size_t features() const noexcept { return spec_.features; }
    std::size_t labels() const noexcept { return spec_.labels; }
    /// Blend slot (0 = first concept) of the most recent instance.
    std::size_t last_slot() const noexcept { return last_slot_; }
    const Concept& concept_for_slot(std::size_t slot) const { return concepts_.at(spec_.base_concept(slot)); }

  private:
    DriftStreamSpec spec_;
    std::vector<Concept> concepts_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::size_t index_ = 0;
    std::size_t last_slot_ = 0;
};

/// Materialise a synthetic stream into memory.
inline Dataset generate_dataset(const DriftStreamSpec& spec) {
    SyntheticStream stream(spec);
    Dataset data;
    data.instances.reserve(spec.samples);
    MetaAccumulator acc(spec.features, spec.labels);
    while (auto inst = stream.next()) {
        acc.add(*inst);
        data.instances.push_back(std::move(*inst));
    }
    data.meta = acc.meta();
    return data;
}

}  // namespace ld3
