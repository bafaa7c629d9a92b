#pragma once

// Straight-line simulations of DDM and EDDM. Statistics are recomputed from
// the full history since the last drift at every step (no running sums).

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

enum class Decision { stable, warning, drift };

/// `errors[i]` is 1 when instance i was misclassified.
inline std::vector<Decision> ddm(const std::vector<int>& errors) {
    std::vector<Decision> out;
    std::vector<int> seen;
    double p_min = std::numeric_limits<double>::infinity(), s_min = p_min;
    for (int e : errors) {
        seen.push_back(e);
        int wrong = 0;
        for (int x : seen) wrong += x;
        const double i = static_cast<double>(seen.size());
        const double p = wrong / i;
        const double s = std::sqrt(p * (1 - p) / i);
        if (seen.size() < 30) {
            out.push_back(Decision::stable);
            continue;
        }
        if (p + s <= p_min + s_min) {
            p_min = p;
            s_min = s;
        }
        if (p + s > p_min + 3 * s_min) {
            out.push_back(Decision::drift);
            seen.clear();
            p_min = s_min = std::numeric_limits<double>::infinity();
        } else if (p + s > p_min + 2 * s_min) {
            out.push_back(Decision::warning);
        } else {
            out.push_back(Decision::stable);
        }
    }
    return out;
}

inline std::vector<Decision> eddm(const std::vector<int>& errors) {
    std::vector<Decision> out;
    std::vector<double> gaps;
    std::size_t since_reset = 0, last_error = 0;
    double max_level = 0.0;
    Decision current = Decision::stable;
    for (int e : errors) {
        ++since_reset;
        if (!e) {
            out.push_back(current);
            continue;
        }
        gaps.push_back(static_cast<double>(since_reset - last_error));
        last_error = since_reset;
        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= static_cast<double>(gaps.size());
        double ss = 0.0;
        for (double g : gaps) ss += (g - mean) * (g - mean);
        const double sd = std::sqrt(ss / static_cast<double>(gaps.size()));
        const double level = mean + 2 * sd;
        if (level > max_level) max_level = level;
        if (gaps.size() < 30) {
            current = Decision::stable;
        } else if (level / max_level < 0.90) {
            out.push_back(Decision::drift);
            gaps.clear();
            since_reset = last_error = 0;
            max_level = 0.0;
            current = Decision::stable;
            continue;
        } else {
            current = level / max_level < 0.95 ? Decision::warning : Decision::stable;
        }
        out.push_back(current);
    }
    return out;
}

}  // namespace oracle
