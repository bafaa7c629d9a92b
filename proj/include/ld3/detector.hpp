#pragma once

// Label-dependency drift detector (LD3). Consumes the predicted label vector
// of each instance, tracks how labels co-occur in two consecutive windows,
// and signals drift when the rank similarity of the two windows' label
// rankings falls into the left tail of its recent history.

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <ranges>
#include <string>
#include <utility>

#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"
#include "ld3/rankfusion.hpp"

namespace ld3 {

/// FIFO holding at most `capacity` elements. Pushing into a full buffer
/// evicts and returns the oldest element.
template <class T>
class BoundedFifo {
  public:
    BoundedFifo() = default;
    explicit BoundedFifo(std::size_t capacity) : capacity_(capacity) {}

    std::optional<T> push(T value) {
        items_.push_back(std::move(value));
        if (items_.size() <= capacity_) return std::nullopt;
        std::optional<T> out(std::move(items_.front()));
        items_.pop_front();
        return out;
    }

    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool full() const noexcept { return items_.size() == capacity_; }
    bool empty() const noexcept { return items_.empty(); }
    void clear() noexcept { items_.clear(); }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const T& front() const { return items_.front(); }
    const T& back() const { return items_.back(); }

    friend bool operator==(const BoundedFifo&, const BoundedFifo&) = default;

  private:
    std::size_t capacity_ = 0;
    std::deque<T> items_;
};

struct LD3Config {
    /// Samples per label window; also the capacity of the correlation window.
    std::size_t window = 500;
    /// Standard-deviation multiplier of the anomaly rule.
    double sigma_multiplier = 4.0;
    /// Drift when the anomaly count exceeds this.
    std::size_t anomaly_threshold = 0;
    FusionMethod fusion = FusionMethod::reciprocal;

    void validate() const {
        if (window < 2) throw config_error("LD3 window must be >= 2, got " + std::to_string(window));
        if (!(sigma_multiplier > 0.0) || !std::isfinite(sigma_multiplier))
            throw config_error("LD3 sigma multiplier must be a positive finite number");
    }

    friend bool operator==(const LD3Config&, const LD3Config&) = default;
};

/// Outcome of one detector update. `correlation` is set iff both label
/// windows were full this step; `anomaly_count` iff the correlation window
/// was full.
struct DriftSignal {
    bool drift = false;
    std::optional<double> correlation;
    std::optional<std::size_t> anomaly_count;
};

/// Count of values strictly below mean - t * stddev (population stddev).
/// A window of identical values has no anomalies.
template <std::ranges::forward_range R>
std::size_t sigma_rule(const R& values, double t) {
    std::size_t count = 0;
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (double c : values) {
        if (count == 0) lo = hi = c;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        sum += c;
        ++count;
    }
    if (count == 0) throw input_error("sigma_rule: empty correlation window");
    if (lo == hi) return 0;

    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (double c : values) ss += (c - mean) * (c - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(count));
    const double threshold = mean - t * sigma;

    std::size_t anomalies = 0;
    for (double c : values)
        if (c < threshold) ++anomalies;
    return anomalies;
}

class LD3Detector {
  public:
    LD3Detector(LD3Config config, std::size_t labels)
        : config_(config), labels_(labels), new_(config.window), old_(config.window), corr_(config.window),
          m_new_(labels), m_old_(labels) {
        config_.validate();
        if (labels < 2) throw config_error("LD3 needs at least 2 labels, got " + std::to_string(labels));
    }

    /// Feed one predicted label vector. On drift all three windows are cleared.
    DriftSignal update(const LabelVector& predicted) {
        require_length(predicted, labels_, "LD3 update");

        m_new_.add(predicted);
        if (auto evicted = new_.push(predicted)) {
            m_new_.remove(*evicted);
            m_old_.add(*evicted);
            if (auto gone = old_.push(std::move(*evicted))) m_old_.remove(*gone);
        }

        DriftSignal signal;
        if (!new_.full() || !old_.full()) return signal;

        const GlobalRanking r_new = fuse(local_rankings(m_new_), config_.fusion);
        const GlobalRanking r_old = fuse(local_rankings(m_old_), config_.fusion);
        const double c = ws_coefficient(r_new, r_old);
        corr_.push(c);
        signal.correlation = c;
        if (!corr_.full()) return signal;

        const std::size_t anomalies = sigma_rule(corr_, config_.sigma_multiplier);
        signal.anomaly_count = anomalies;
        if (anomalies > config_.anomaly_threshold) {
            signal.drift = true;
            reset();
        }
        return signal;
    }

    void reset() {
        new_.clear();
        old_.clear();
        corr_.clear();
        m_new_.clear();
        m_old_.clear();
    }

    const LD3Config& config() const noexcept { return config_; }
    std::size_t labels() const noexcept { return labels_; }
    const BoundedFifo<LabelVector>& new_window() const noexcept { return new_; }
    const BoundedFifo<LabelVector>& old_window() const noexcept { return old_; }
    const BoundedFifo<double>& correlations() const noexcept { return corr_; }
    const CooccurrenceMatrix& new_counts() const noexcept { return m_new_; }
    const CooccurrenceMatrix& old_counts() const noexcept { return m_old_; }

    friend bool operator==(const LD3Detector&, const LD3Detector&) = default;

  private:
    LD3Config config_;
    std::size_t labels_;
    BoundedFifo<LabelVector> new_;
    BoundedFifo<LabelVector> old_;
    BoundedFifo<double> corr_;
    CooccurrenceMatrix m_new_;
    CooccurrenceMatrix m_old_;
};

}  // namespace ld3
