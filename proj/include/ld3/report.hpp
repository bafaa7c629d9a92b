#pragma once

// Machine-readable outputs. Reports are JSON objects with a fixed key order
// (see README for the schema); segment series are also emitted as CSV rows
// for plotting. Files are written to a temporary sibling and renamed into
// place so a failed run never leaves a partial report behind.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ld3/errors.hpp"
#include "ld3/eval.hpp"
#include "ld3/streams.hpp"

namespace ld3 {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kReportFormat = "ld3-report/1";
inline constexpr const char* kCompareFormat = "ld3-compare/1";

inline ordered_json to_json(const DatasetMeta& m) {
    ordered_json j;
    j["instances"] = m.instances;
    j["features"] = m.features;
    j["labels"] = m.labels;
    j["label_cardinality"] = m.cardinality;
    j["label_density"] = m.density;
    return j;
}

inline ordered_json to_json(const DetectorConfig& cfg) {
    ordered_json j;
    j["kind"] = std::string(to_string(cfg.kind));
    switch (cfg.kind) {
        case DetectorKind::ld3:
            j["w"] = cfg.ld3.window;
            j["t"] = cfg.ld3.sigma_multiplier;
            j["L"] = cfg.ld3.anomaly_threshold;
            j["fusion"] = std::string(to_string(cfg.ld3.fusion));
            break;
        case DetectorKind::ddm:
            j["min_samples"] = cfg.ddm.min_samples;
            j["warning_level"] = cfg.ddm.warning_level;
            j["drift_level"] = cfg.ddm.drift_level;
            break;
        case DetectorKind::eddm:
            j["min_errors"] = cfg.eddm.min_errors;
            j["warning_ratio"] = cfg.eddm.warning_ratio;
            j["drift_ratio"] = cfg.eddm.drift_ratio;
            break;
        case DetectorKind::none: break;
    }
    return j;
}

/// `source` describes where the instances came from (path or synthetic spec).
inline ordered_json to_json(const MetricReport& r, const ordered_json& source = ordered_json::object(),
                            const ordered_json& detector = ordered_json::object()) {
    ordered_json j;
    j["format"] = kReportFormat;
    j["source"] = source;
    j["detector"] = detector.empty() ? ordered_json{{"kind", r.detector}} : detector;
    j["samples"] = r.samples;
    j["metrics"] = {{"example_accuracy", r.example_accuracy},
                    {"hamming_score", r.hamming_score},
                    {"example_f1", r.example_f1},
                    {"micro_f1", r.micro_f1}};
    j["drift_positions"] = r.drift_positions;
    j["segments"] = {{"count", r.segment_series.size()}, {"example_accuracy", r.segment_series}};
    return j;
}

inline ordered_json to_json(const RankTable& t) {
    ordered_json j;
    j["ranks"] = t.ranks;
    j["average_rank"] = t.average;
    return j;
}

/// `segment,first,last,example_accuracy` rows; indices are zero-based and
/// inclusive. Segments are equal slices of `samples`, the last taking the
/// remainder.
inline std::string segments_csv(const MetricReport& r) {
    std::string out = "segment,first,last,example_accuracy\n";
    const std::size_t k = r.segment_series.size();
    const std::size_t base = k ? r.samples / k : 0;
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t first = s * base;
        const std::size_t end = s + 1 == k ? r.samples : first + base;
        out += std::to_string(s) + ',' + std::to_string(first) + ',' +
               (end > first ? std::to_string(end - 1) : std::string("-")) + ',';
        detail::append_real(out, r.segment_series[s]);
        out += '\n';
    }
    return out;
}

/// Write `content` to `path` through a temporary file and rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw io_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_error("cannot move report into '" + path.string() + "': " + ec.message());
    }
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace ld3
