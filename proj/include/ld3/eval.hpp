#pragma once

// Prequential (test-then-train) evaluation with drift-triggered classifier
// resets, the multi-label effectiveness metrics, and cross-detector rank
// statistics (tied-average ranks, Nemenyi critical distance).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ld3/baselines.hpp"
#include "ld3/classifier.hpp"
#include "ld3/detector.hpp"
#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"
#include "ld3/streams.hpp"

namespace ld3 {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Running sums behind the four metrics. Per-instance 0/0 conventions:
///   accuracy   empty prediction and empty truth scores 1
///   precision  empty prediction scores 1 if the truth is empty, else 0
///   recall     empty truth scores 1 if the prediction is empty, else 0
///   micro F1   an empty TP/FP/FN pool scores 0
class MetricAccumulator {
  public:
    /// Adds one instance and returns its example-based accuracy.
    double add(const LabelVector& predicted, const LabelVector& truth) {
        if (predicted.size() != truth.size()) throw input_error("metrics: prediction and truth differ in length");
        if (truth.empty()) throw input_error("metrics: empty label vector");
        std::size_t inter = 0, uni = 0, pred = 0, real = 0;
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const bool p = predicted[j] != 0, y = truth[j] != 0;
            inter += p && y;
            uni += p || y;
            pred += p;
            real += y;
        }
        const double acc = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
        ++count_;
        accuracy_ += acc;
        hamming_loss_ += static_cast<double>(uni - inter) / static_cast<double>(truth.size());
        precision_ += pred ? static_cast<double>(inter) / static_cast<double>(pred) : (real ? 0.0 : 1.0);
        recall_ += real ? static_cast<double>(inter) / static_cast<double>(real) : (pred ? 0.0 : 1.0);
        tp_ += inter;
        fp_ += pred - inter;
        fn_ += real - inter;
        return acc;
    }

    std::size_t count() const noexcept { return count_; }

    double example_accuracy() const { return mean(accuracy_); }
    double hamming_score() const { return count_ ? 1.0 - hamming_loss_ / static_cast<double>(count_) : 0.0; }
    double example_precision() const { return mean(precision_); }
    double example_recall() const { return mean(recall_); }

    double example_f1() const {
        const double p = example_precision(), r = example_recall();
        return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }

    double micro_f1() const {
        const std::size_t denom = 2 * tp_ + fn_ + fp_;
        return denom ? 2.0 * static_cast<double>(tp_) / static_cast<double>(denom) : 0.0;
    }

  private:
    double mean(double sum) const { return count_ ? sum / static_cast<double>(count_) : 0.0; }

    std::size_t count_ = 0;
    double accuracy_ = 0.0;
    double hamming_loss_ = 0.0;
    double precision_ = 0.0;
    double recall_ = 0.0;
    std::size_t tp_ = 0, fp_ = 0, fn_ = 0;
};

namespace detail {
inline MetricAccumulator accumulate(std::span<const LabelVector> preds, std::span<const LabelVector> truths) {
    if (preds.size() != truths.size()) throw input_error("metrics: prediction and truth sequences differ in length");
    MetricAccumulator acc;
    for (std::size_t i = 0; i < preds.size(); ++i) acc.add(preds[i], truths[i]);
    return acc;
}
}  // namespace detail

inline double example_accuracy(std::span<const LabelVector> preds, std::span<const LabelVector> truths) {
    return detail::accumulate(preds, truths).example_accuracy();
}
inline double hamming_score(std::span<const LabelVector> preds, std::span<const LabelVector> truths) {
    return detail::accumulate(preds, truths).hamming_score();
}
inline double example_f1(std::span<const LabelVector> preds, std::span<const LabelVector> truths) {
    return detail::accumulate(preds, truths).example_f1();
}
inline double micro_f1(std::span<const LabelVector> preds, std::span<const LabelVector> truths) {
    return detail::accumulate(preds, truths).micro_f1();
}

/// Mean of `values` over `segments` consecutive equal slices; the last slice
/// absorbs the remainder. Empty slices report 0.
inline std::vector<double> segment_means(std::span<const double> values, std::size_t segments) {
    std::vector<double> out(segments, 0.0);
    if (segments == 0) return out;
    const std::size_t base = values.size() / segments;
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t begin = s * base;
        const std::size_t end = s + 1 == segments ? values.size() : begin + base;
        if (end > begin)
            out[s] = std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(begin),
                                     values.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                     static_cast<double>(end - begin);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prequential run
// ---------------------------------------------------------------------------

enum class DetectorKind { none, ld3, ddm, eddm };

inline std::string_view to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::none: return "none";
        case DetectorKind::ld3: return "ld3";
        case DetectorKind::ddm: return "ddm";
        case DetectorKind::eddm: return "eddm";
    }
    return "?";
}

inline std::optional<DetectorKind> parse_detector(std::string_view s) {
    if (s == "none") return DetectorKind::none;
    if (s == "ld3") return DetectorKind::ld3;
    if (s == "ddm") return DetectorKind::ddm;
    if (s == "eddm") return DetectorKind::eddm;
    return std::nullopt;
}

struct DetectorConfig {
    DetectorKind kind = DetectorKind::none;
    LD3Config ld3{};
    DDM::Params ddm{};
    EDDM::Params eddm{};
};

struct MetricReport {
    std::string detector;
    std::size_t samples = 0;
    double example_accuracy = 0.0;
    double hamming_score = 0.0;
    double example_f1 = 0.0;
    double micro_f1 = 0.0;
    std::vector<double> segment_series;
    /// Zero-based indices of the instances at which drift was signalled.
    std::vector<std::size_t> drift_positions;
};

/// What the loop saw and did for one instance; handed to the run observer.
struct StepRecord {
    std::size_t index;
    const LabelVector& predicted;
    const LabelVector& truth;
    /// Exact-match bit, set when the detector consumes it.
    std::optional<ErrorSignal> error;
    /// LD3 correlation for this step, when computed.
    std::optional<double> correlation;
    bool drift;
};

struct RunOptions {
    std::size_t segments = 25;
    std::function<void(const StepRecord&)> observer;
};

namespace detail {

using AnyDetector = std::variant<std::monostate, LD3Detector, DDM, EDDM>;

inline AnyDetector make_detector(const DetectorConfig& cfg, std::size_t labels) {
    switch (cfg.kind) {
        case DetectorKind::none: return std::monostate{};
        case DetectorKind::ld3: return LD3Detector(cfg.ld3, labels);
        case DetectorKind::ddm: return DDM(cfg.ddm);
        case DetectorKind::eddm: return EDDM(cfg.eddm);
    }
    throw config_error("unknown detector");
}

}  // namespace detail

/// Test-then-train over `stream`. Per instance: predict, score, feed the
/// detector (LD3 gets the predicted vector, DDM/EDDM the exact-match bit),
/// reset the classifier on drift, then train on the instance.
///
/// `Source` is any type with `std::optional<Instance> next()`.
template <class Source>
MetricReport prequential_run(Source& stream, ClassifierChain& model, const DetectorConfig& cfg,
                             const RunOptions& options = {}) {
    auto detector = detail::make_detector(cfg, model.labels());
    MetricAccumulator metrics;
    std::vector<double> per_instance;
    MetricReport report;
    report.detector = std::string(to_string(cfg.kind));

    std::size_t index = 0;
    while (auto inst = stream.next()) {
        if (inst->features.size() != model.features() || inst->labels.size() != model.labels())
            throw input_error("instance " + std::to_string(index) + ": expected " + std::to_string(model.features()) +
                              " features and " + std::to_string(model.labels()) + " labels, got " +
                              std::to_string(inst->features.size()) + " and " + std::to_string(inst->labels.size()));

        const LabelVector predicted = model.predict(inst->features);
        per_instance.push_back(metrics.add(predicted, inst->labels));

        bool drift = false;
        std::optional<ErrorSignal> error;
        std::optional<double> correlation;
        std::visit(
            [&](auto& det) {
                using D = std::decay_t<decltype(det)>;
                if constexpr (std::is_same_v<D, LD3Detector>) {
                    const DriftSignal s = det.update(predicted);
                    drift = s.drift;
                    correlation = s.correlation;
                } else if constexpr (std::is_same_v<D, DDM> || std::is_same_v<D, EDDM>) {
                    error = exact_match(predicted, inst->labels);
                    drift = det.update(*error) == Phase::drift;
                }
            },
            detector);

        if (drift) {
            report.drift_positions.push_back(index);
            model.reset();
        }
        if (options.observer) options.observer(StepRecord{index, predicted, inst->labels, error, correlation, drift});

        model.partial_fit(inst->features, inst->labels);
        ++index;
    }

    report.samples = index;
    report.example_accuracy = metrics.example_accuracy();
    report.hamming_score = metrics.hamming_score();
    report.example_f1 = metrics.example_f1();
    report.micro_f1 = metrics.micro_f1();
    report.segment_series = segment_means(per_instance, options.segments);
    return report;
}

// ---------------------------------------------------------------------------
// Rank statistics
// ---------------------------------------------------------------------------

/// Ranks of `values` (1 = best); tied values share the mean of the ranks
/// they would occupy.
inline std::vector<double> tied_average_ranks(std::span<const double> values, bool higher_is_better) {
    const std::size_t k = values.size();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return higher_is_better ? values[a] > values[b] : values[a] < values[b];
    });
    std::vector<double> ranks(k);
    for (std::size_t start = 0; start < k;) {
        std::size_t end = start + 1;
        while (end < k && values[idx[end]] == values[idx[start]]) ++end;
        const double avg = static_cast<double>(start + 1 + end) / 2.0;
        for (std::size_t p = start; p < end; ++p) ranks[idx[p]] = avg;
        start = end;
    }
    return ranks;
}

struct RankTable {
    /// ranks[d][s]: rank of detector d on dataset s.
    std::vector<std::vector<double>> ranks;
    /// Mean rank of each detector across datasets.
    std::vector<double> average;
};

/// `values[d][s]` is the metric of detector d on dataset s.
inline RankTable average_ranks(const std::vector<std::vector<double>>& values, bool higher_is_better) {
    const std::size_t k = values.size();
    if (k == 0) throw input_error("average_ranks: no detectors");
    const std::size_t datasets = values.front().size();
    for (const auto& row : values)
        if (row.size() != datasets) throw input_error("average_ranks: ragged value table");

    RankTable t;
    t.ranks.assign(k, std::vector<double>(datasets, 0.0));
    t.average.assign(k, 0.0);
    std::vector<double> column(k);
    for (std::size_t s = 0; s < datasets; ++s) {
        for (std::size_t d = 0; d < k; ++d) column[d] = values[d][s];
        const auto r = tied_average_ranks(column, higher_is_better);
        for (std::size_t d = 0; d < k; ++d) t.ranks[d][s] = r[d];
    }
    if (datasets > 0)
        for (std::size_t d = 0; d < k; ++d)
            t.average[d] = std::accumulate(t.ranks[d].begin(), t.ranks[d].end(), 0.0) / static_cast<double>(datasets);
    return t;
}

/// Two-tailed Nemenyi critical values q_alpha (studentized range / sqrt 2)
/// for k = 2..20 algorithms.
inline double nemenyi_q(double alpha, std::size_t k) {
    static constexpr std::array<double, 19> q05{1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
                                                3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
    static constexpr std::array<double, 19> q10{1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
                                                3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319};
    if (k < 2 || k > 20) throw unsupported_error("Nemenyi table covers 2..20 algorithms, got " + std::to_string(k));
    if (std::abs(alpha - 0.05) < 1e-12) return q05[k - 2];
    if (std::abs(alpha - 0.10) < 1e-12) return q10[k - 2];
    throw unsupported_error("Nemenyi table covers alpha 0.05 and 0.10 only");
}

/// Critical distance between average ranks of k algorithms over K datasets:
/// q_alpha * sqrt(k (k + 1) / (6 K)).
inline double nemenyi_cd(double alpha, std::size_t k, std::size_t datasets) {
    if (datasets == 0) throw input_error("nemenyi_cd: need at least one dataset");
    const double q = nemenyi_q(alpha, k);
    const double kk = static_cast<double>(k);
    return q * std::sqrt(kk * (kk + 1.0) / (6.0 * static_cast<double>(datasets)));
}

}  // namespace ld3
