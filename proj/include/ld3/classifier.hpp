#pragma once

// Incremental multi-label classifier: a chain of binary Gaussian naive Bayes
// links. Link j sees the D input features followed by labels 0..j-1 (true
// labels while training, its predecessors' predictions while predicting).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ld3/errors.hpp"
#include "ld3/label_vector.hpp"

namespace ld3 {

/// Running per-feature mean and sum of squared deviations (Welford) for the
/// samples of one class.
class GaussianClassStats {
  public:
    GaussianClassStats() = default;
    explicit GaussianClassStats(std::size_t dims) : mean_(dims, 0.0), m2_(dims, 0.0) {}

    void add(std::span<const double> x) {
        ++count_;
        const double n = static_cast<double>(count_);
        for (std::size_t f = 0; f < mean_.size(); ++f) {
            const double delta = x[f] - mean_[f];
            mean_[f] += delta / n;
            m2_[f] += delta * (x[f] - mean_[f]);
        }
    }

    void clear() {
        count_ = 0;
        std::fill(mean_.begin(), mean_.end(), 0.0);
        std::fill(m2_.begin(), m2_.end(), 0.0);
    }

    std::size_t count() const noexcept { return count_; }
    std::size_t dims() const noexcept { return mean_.size(); }
    double mean(std::size_t f) const { return mean_[f]; }
    double sum_sq_dev(std::size_t f) const { return m2_[f]; }
    /// Population variance; 0 before any sample.
    double variance(std::size_t f) const { return count_ ? m2_[f] / static_cast<double>(count_) : 0.0; }

  private:
    std::size_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Binary Gaussian naive Bayes over a fixed number of inputs.
class GaussianLink {
  public:
    static constexpr double kVarianceFloor = 1e-9;

    GaussianLink() = default;
    explicit GaussianLink(std::size_t inputs) : inputs_(inputs), stats_{GaussianClassStats(inputs), GaussianClassStats(inputs)} {
        for (auto& c : cache_) c.inv_var.assign(inputs, 0.0);
    }

    std::size_t inputs() const noexcept { return inputs_; }
    const GaussianClassStats& stats(bool label) const { return stats_[label ? 1 : 0]; }

    void fit(std::span<const double> z, bool label) {
        const std::size_t c = label ? 1 : 0;
        stats_[c].add(z.first(inputs_));
        cache_[c].valid = false;
    }

    /// Class with the larger log posterior; 0 on ties and when untrained. A
    /// link that has seen only one class always predicts it.
    bool predict(std::span<const double> z) const {
        const std::size_t n0 = stats_[0].count(), n1 = stats_[1].count();
        if (n0 == 0 && n1 == 0) return false;
        if (n0 == 0) return true;
        if (n1 == 0) return false;

        const double floor = variance_floor();
        const double total = static_cast<double>(n0 + n1);
        std::array<double, 2> score{};
        for (std::size_t c = 0; c < 2; ++c) {
            refresh(c, floor);
            const auto& mean_of = stats_[c];
            const auto& cache = cache_[c];
            double quad = 0.0;
            for (std::size_t f = 0; f < inputs_; ++f) {
                const double d = z[f] - mean_of.mean(f);
                quad += d * d * cache.inv_var[f];
            }
            const double prior = std::log((static_cast<double>(stats_[c].count()) + 1.0) / (total + 2.0));
            score[c] = prior - 0.5 * (cache.log_var_sum + quad);
        }
        return score[1] > score[0];
    }

    /// Lower bound applied to every per-feature variance.
    double variance_floor() const {
        double max_var = 0.0;
        for (const auto& s : stats_)
            for (std::size_t f = 0; f < inputs_; ++f) max_var = std::max(max_var, s.variance(f));
        return kVarianceFloor * (max_var > 0.0 ? max_var : 1.0);
    }

    void clear() {
        for (auto& s : stats_) s.clear();
        for (auto& c : cache_) c.valid = false;
    }

  private:
    struct Cache {
        bool valid = false;
        double floor = 0.0;
        double log_var_sum = 0.0;
        std::vector<double> inv_var;
    };

    void refresh(std::size_t c, double floor) const {
        Cache& cache = cache_[c];
        if (cache.valid && cache.floor == floor) return;
        cache.log_var_sum = 0.0;
        for (std::size_t f = 0; f < inputs_; ++f) {
            const double var = std::max(stats_[c].variance(f), floor);
            cache.inv_var[f] = 1.0 / var;
            cache.log_var_sum += std::log(var);
        }
        cache.floor = floor;
        cache.valid = true;
    }

    std::size_t inputs_ = 0;
    std::array<GaussianClassStats, 2> stats_;
    mutable std::array<Cache, 2> cache_;
};

/// Classifier chain in natural label order 0..n-1.
class ClassifierChain {
  public:
    ClassifierChain(std::size_t features, std::size_t labels) : features_(features), labels_(labels) {
        if (labels == 0) throw config_error("classifier chain needs at least one label");
        links_.reserve(labels);
        for (std::size_t j = 0; j < labels; ++j) links_.emplace_back(features + j);
        buffer_.resize(features + labels);
    }

    std::size_t features() const noexcept { return features_; }
    std::size_t labels() const noexcept { return labels_; }
    const GaussianLink& link(std::size_t j) const { return links_.at(j); }

    LabelVector predict(std::span<const double> x) const {
        check_features(x);
        std::copy(x.begin(), x.end(), buffer_.begin());
        LabelVector out(labels_);
        for (std::size_t j = 0; j < labels_; ++j) {
            const bool bit = links_[j].predict(std::span<const double>(buffer_).first(features_ + j));
            out.set(j, bit);
            buffer_[features_ + j] = bit ? 1.0 : 0.0;
        }
        return out;
    }

    /// Update every link with x and the true labels preceding it.
    void partial_fit(std::span<const double> x, const LabelVector& y) {
        check_features(x);
        require_length(y, labels_, "classifier chain fit");
        std::copy(x.begin(), x.end(), buffer_.begin());
        for (std::size_t j = 0; j < labels_; ++j) buffer_[features_ + j] = y[j];
        for (std::size_t j = 0; j < labels_; ++j) links_[j].fit(buffer_, y[j] != 0);
    }

    /// Forget all statistics; dimensions are kept.
    void reset() {
        for (auto& l : links_) l.clear();
    }

  private:
    void check_features(std::span<const double> x) const {
        if (x.size() != features_)
            throw input_error("classifier chain: expected " + std::to_string(features_) + " features, got " +
                              std::to_string(x.size()));
    }

    std::size_t features_;
    std::size_t labels_;
    std::vector<GaussianLink> links_;
    mutable std::vector<double> buffer_;
};

}  // namespace ld3
