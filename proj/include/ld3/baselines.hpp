#pragma once

// Supervised error-rate drift detectors. Both consume one correctness bit
// per instance: 1 when the predicted label vector matches the truth exactly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"

namespace ld3 {

struct ErrorSignal {
    bool correct = false;
    friend bool operator==(const ErrorSignal&, const ErrorSignal&) = default;
};

inline ErrorSignal exact_match(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.size() != truth.size()) throw input_error("exact_match: label vectors differ in length");
    return ErrorSignal{predicted == truth};
}

enum class Phase { stable, warning, drift };

inline std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::stable: return "stable";
        case Phase::warning: return "warning";
        case Phase::drift: return "drift";
    }
    return "?";
}

/// Drift Detection Method. Tracks the running error rate p and its binomial
/// deviation s = sqrt(p (1 - p) / i), remembers the (p, s) pair minimising
/// p + s, and flags warning / drift when p + s exceeds p_min + 2 s_min /
/// p_min + 3 s_min. Silent for the first `min_samples` inputs after a reset.
class DDM {
  public:
    struct Params {
        std::size_t min_samples = 30;
        double warning_level = 2.0;
        double drift_level = 3.0;
        friend bool operator==(const Params&, const Params&) = default;
    };

    DDM() = default;
    explicit DDM(Params params) : params_(params) {}

    Phase update(ErrorSignal e) {
        ++samples_;
        if (!e.correct) ++errors_;
        const double i = static_cast<double>(samples_);
        p_ = static_cast<double>(errors_) / i;
        s_ = std::sqrt(p_ * (1.0 - p_) / i);

        if (samples_ < params_.min_samples) return phase_ = Phase::stable;

        if (p_ + s_ <= p_min_ + s_min_) {
            p_min_ = p_;
            s_min_ = s_;
        }
        if (p_ + s_ > p_min_ + params_.drift_level * s_min_) {
            reset();
            return Phase::drift;
        }
        phase_ = p_ + s_ > p_min_ + params_.warning_level * s_min_ ? Phase::warning : Phase::stable;
        return phase_;
    }

    void reset() {
        samples_ = errors_ = 0;
        p_ = s_ = 0.0;
        p_min_ = s_min_ = std::numeric_limits<double>::infinity();
        phase_ = Phase::stable;
    }

    std::size_t samples() const noexcept { return samples_; }
    double error_rate() const noexcept { return p_; }
    double deviation() const noexcept { return s_; }
    double min_error_rate() const noexcept { return p_min_; }
    double min_deviation() const noexcept { return s_min_; }
    Phase phase() const noexcept { return phase_; }

    friend bool operator==(const DDM&, const DDM&) = default;

  private:
    Params params_{};
    std::size_t samples_ = 0;
    std::size_t errors_ = 0;
    double p_ = 0.0;
    double s_ = 0.0;
    double p_min_ = std::numeric_limits<double>::infinity();
    double s_min_ = std::numeric_limits<double>::infinity();
    Phase phase_ = Phase::stable;
};

/// Early Drift Detection Method. Tracks mean p' and standard deviation s'
/// of the distance (in samples) between consecutive errors and the maximum
/// of p' + 2 s'. Drift when (p' + 2 s') / max falls below `drift_ratio`,
/// warning below `warning_ratio`; no decision before `min_errors` errors.
class EDDM {
  public:
    struct Params {
        std::size_t min_errors = 30;
        double warning_ratio = 0.95;
        double drift_ratio = 0.90;
        friend bool operator==(const Params&, const Params&) = default;
    };

    EDDM() = default;
    explicit EDDM(Params params) : params_(params) {}

    Phase update(ErrorSignal e) {
        ++samples_;
        if (e.correct) return phase_;

        ++errors_;
        const double gap = static_cast<double>(samples_ - last_error_);
        last_error_ = samples_;
        const double old_mean = mean_;
        mean_ += (gap - mean_) / static_cast<double>(errors_);
        m2_ += (gap - mean_) * (gap - old_mean);
        std_ = std::sqrt(m2_ / static_cast<double>(errors_));

        const double level = mean_ + 2.0 * std_;
        if (level > max_level_) max_level_ = level;

        if (errors_ < params_.min_errors) return phase_ = Phase::stable;

        const double ratio = level / max_level_;
        if (ratio < params_.drift_ratio) {
            reset();
            return Phase::drift;
        }
        phase_ = ratio < params_.warning_ratio ? Phase::warning : Phase::stable;
        return phase_;
    }

    void reset() {
        samples_ = errors_ = last_error_ = 0;
        mean_ = m2_ = std_ = 0.0;
        max_level_ = 0.0;
        phase_ = Phase::stable;
    }

    std::size_t samples() const noexcept { return samples_; }
    std::size_t errors() const noexcept { return errors_; }
    double mean_gap() const noexcept { return mean_; }
    double gap_deviation() const noexcept { return std_; }
    double max_level() const noexcept { return max_level_; }
    Phase phase() const noexcept { return phase_; }

    friend bool operator==(const EDDM&, const EDDM&) = default;

  private:
    Params params_{};
    std::size_t samples_ = 0;
    std::size_t errors_ = 0;
    std::size_t last_error_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double std_ = 0.0;
    double max_level_ = 0.0;
    Phase phase_ = Phase::stable;
};

}  // namespace ld3
