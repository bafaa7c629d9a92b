#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "ld3/errors.hpp"

namespace ld3 {

/// Binary label assignment for one instance: bit i is 1 when label i is
/// present. Elements are validated to be exactly 0 or 1 on construction.
class LabelVector {
  public:
    LabelVector() = default;

    explicit LabelVector(std::size_t n) : bits_(n, 0) {}

    LabelVector(std::initializer_list<int> bits) {
        bits_.reserve(bits.size());
        for (int b : bits) push_checked(b);
    }

    explicit LabelVector(const std::vector<int>& bits) {
        bits_.reserve(bits.size());
        for (int b : bits) push_checked(b);
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }

    void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }

    /// Number of labels set to 1.
    std::size_t cardinality() const noexcept {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    /// Indices of the labels set to 1, ascending.
    std::vector<std::size_t> active() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(i);
        return out;
    }

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

  private:
    void push_checked(int b) {
        if (b != 0 && b != 1) throw input_error("label bits must be 0 or 1, got " + std::to_string(b));
        bits_.push_back(static_cast<std::uint8_t>(b));
    }

    std::vector<std::uint8_t> bits_;
};

inline void require_length(const LabelVector& v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw input_error(std::string(what) + ": expected " + std::to_string(n) + " labels, got " +
                          std::to_string(v.size()));
}

}  // namespace ld3
