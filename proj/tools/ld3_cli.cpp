// ld3: command-line driver for drift-detection experiments on multi-label
// streams.
//
//   ld3 generate --synthetic sudden --seed 7 --out stream.csv
//   ld3 run      --stream stream.csv --detector ld3 --w 500 --t 4 --L 0 --out report.json
//   ld3 compare  --synthetic sudden --synthetic incremental --detectors ld3,ddm,eddm,none --out cmp.json
//   ld3 compare  --table values.csv --out cmp.json
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ld3/ld3.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct StreamOptions {
    std::vector<std::string> paths;
    std::vector<std::string> synthetic;
    std::optional<std::size_t> labels;
    bool labels_last = false;

    std::size_t samples = 20'000;
    std::size_t features = 200;
    std::vector<std::size_t> drift_positions{4'000, 10'000};
    std::vector<std::size_t> drift_widths;
    std::size_t labelsets = 30;
    double spread = 0.1;
    std::uint64_t seed = 1;
};

struct DetectorOptions {
    std::string detector = "none";
    std::vector<std::string> detectors;
    std::size_t w = 500;
    double t = 4.0;
    std::size_t L = 0;
    std::string fusion = "reciprocal";
};

struct OutputOptions {
    std::string out;
    std::string segments_csv;
    std::string trace;
    std::size_t segments = 25;
};

/// One stream to evaluate: either a parsed file or a synthetic spec.
struct Source {
    std::string name;
    ld3::ordered_json description;
    std::optional<ld3::Dataset> data;
    std::optional<ld3::DriftStreamSpec> spec;

    std::size_t features() const { return data ? data->meta.features : spec->features; }
    std::size_t labels() const { return data ? data->meta.labels : spec->labels; }
};

void add_stream_flags(CLI::App* cmd, StreamOptions& s, bool many) {
    auto* stream = cmd->add_option("--stream", s.paths, "Dataset file ('N D n' header, comma-separated rows)");
    auto* synth = cmd->add_option("--synthetic", s.synthetic, "Synthetic stream kind: sudden, incremental, reoccurring")
                      ->check(CLI::IsMember({"sudden", "incremental", "reoccurring"}));
    if (!many) {
        stream->expected(1);
        synth->expected(1);
        stream->excludes(synth);
    }
    cmd->add_option("--labels", s.labels, "Label count n (synthetic size, or label count of a headerless file)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1'000'000}));
    cmd->add_flag("--labels-last", s.labels_last, "Dataset rows hold labels after the features");
    cmd->add_option("--samples", s.samples, "Synthetic stream length N")->capture_default_str();
    cmd->add_option("--features", s.features, "Synthetic feature count D")->capture_default_str();
    cmd->add_option("--drift-positions", s.drift_positions, "Synthetic drift positions (zero-based sample index)")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--drift-width", s.drift_widths,
                    "Samples over which each drift is blended (one value for all drifts, or one per drift; "
                    "default 1 for sudden, 500 otherwise)")
        ->delimiter(',');
    cmd->add_option("--labelsets", s.labelsets, "Labelsets per synthetic concept")->capture_default_str();
    cmd->add_option("--spread", s.spread, "Feature noise around each synthetic cluster center")->capture_default_str();
    cmd->add_option("--seed", s.seed, "Seed for all randomness")->capture_default_str();
}

void add_detector_flags(CLI::App* cmd, DetectorOptions& d) {
    cmd->add_option("--w", d.w, "LD3 window size")->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}))->capture_default_str();
    cmd->add_option("--t", d.t, "LD3 standard-deviation multiplier")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--L", d.L, "LD3 anomaly-count threshold")->capture_default_str();
    cmd->add_option("--fusion", d.fusion, "LD3 rank fusion")
        ->check(CLI::IsMember({"reciprocal", "borda", "condorcet", "mc4"}))
        ->capture_default_str();
}

ld3::DriftStreamSpec make_spec(const StreamOptions& s, const std::string& kind_name) {
    const auto kind = *ld3::parse_drift_kind(kind_name);
    auto spec = ld3::DriftStreamSpec::preset(kind, s.seed);
    spec.samples = s.samples;
    spec.features = s.features;
    spec.labels = s.labels.value_or(50);
    spec.drift_positions = s.drift_positions;
    spec.labelsets = s.labelsets;
    spec.spread = s.spread;
    std::vector<std::size_t> widths = s.drift_widths;
    if (widths.empty()) widths = {kind == ld3::DriftKind::sudden ? std::size_t{1} : std::size_t{500}};
    if (widths.size() == 1) widths.assign(spec.drift_positions.size(), widths.front());
    spec.drift_widths = widths;
    spec.validate();
    return spec;
}

ld3::ordered_json describe(const ld3::DriftStreamSpec& spec) {
    ld3::ordered_json j;
    j["type"] = "synthetic";
    j["kind"] = std::string(ld3::to_string(spec.kind));
    j["samples"] = spec.samples;
    j["features"] = spec.features;
    j["labels"] = spec.labels;
    j["drift_positions"] = spec.drift_positions;
    j["drift_widths"] = spec.drift_widths;
    j["labelsets"] = spec.labelsets;
    j["spread"] = spec.spread;
    j["seed"] = spec.seed;
    return j;
}

std::vector<Source> load_sources(const StreamOptions& s) {
    std::vector<Source> out;
    for (const auto& path : s.paths) {
        Source src;
        src.name = std::filesystem::path(path).stem().string();
        ld3::DatasetFormat fmt;
        fmt.labels = s.labels;
        fmt.labels_first = !s.labels_last;
        src.data = ld3::read_dataset(path, fmt);
        src.description = {{"type", "file"}, {"path", path}, {"labels_first", !s.labels_last},
                           {"meta", ld3::to_json(src.data->meta)}};
        out.push_back(std::move(src));
    }
    for (const auto& kind : s.synthetic) {
        Source src;
        src.name = "synthetic-" + kind;
        src.spec = make_spec(s, kind);
        src.description = describe(*src.spec);
        out.push_back(std::move(src));
    }
    return out;
}

ld3::DetectorConfig make_detector(const std::string& name, const DetectorOptions& d) {
    ld3::DetectorConfig cfg;
    auto kind = ld3::parse_detector(name);
    if (!kind) throw ld3::config_error("unknown detector '" + name + "' (expected ld3, ddm, eddm, none)");
    cfg.kind = *kind;
    cfg.ld3.window = d.w;
    cfg.ld3.sigma_multiplier = d.t;
    cfg.ld3.anomaly_threshold = d.L;
    cfg.ld3.fusion = *ld3::parse_fusion(d.fusion);
    if (cfg.kind == ld3::DetectorKind::ld3) cfg.ld3.validate();
    return cfg;
}

ld3::MetricReport run_cell(const Source& src, const ld3::DetectorConfig& cfg, const ld3::RunOptions& opts) {
    ld3::ClassifierChain model(src.features(), src.labels());
    if (src.data) {
        ld3::DatasetStream stream(*src.data);
        return ld3::prequential_run(stream, model, cfg, opts);
    }
    ld3::SyntheticStream stream(*src.spec);
    return ld3::prequential_run(stream, model, cfg, opts);
}

std::string default_segments_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".segments.csv");
    return p.string();
}

int cmd_generate(const StreamOptions& s, const OutputOptions& o) {
    if (s.synthetic.size() != 1) throw ld3::config_error("generate needs exactly one --synthetic kind");
    const auto spec = make_spec(s, s.synthetic.front());
    ld3::SyntheticStream stream(spec);
    ld3::MetaAccumulator acc(spec.features, spec.labels);

    std::string text;
    {
        std::ostringstream header;
        ld3::write_header(header, spec.samples, spec.features, spec.labels);
        text = header.str();
    }
    while (auto inst = stream.next()) {
        acc.add(*inst);
        ld3::append_row(text, *inst, !s.labels_last);
        text += '\n';
    }
    ld3::write_file_atomic(o.out, text);
    std::cout << ld3::dump(ld3::to_json(acc.meta()));
    return 0;
}

int cmd_run(const StreamOptions& s, const DetectorOptions& d, const OutputOptions& o) {
    const auto sources = load_sources(s);
    if (sources.size() != 1) throw ld3::config_error("run needs exactly one of --stream or --synthetic");
    const auto cfg = make_detector(d.detector, d);

    ld3::RunOptions opts;
    opts.segments = o.segments;
    std::string trace;
    if (!o.trace.empty()) {
        trace = "index,predicted,truth,detector_input,drift\n";
        opts.observer = [&](const ld3::StepRecord& r) {
            std::string input = "-";
            if (r.error) input = r.error->correct ? "1" : "0";
            else if (cfg.kind == ld3::DetectorKind::ld3) input = r.predicted.to_string();
            trace += std::to_string(r.index) + ',' + r.predicted.to_string() + ',' + r.truth.to_string() + ',' + input +
                     ',' + (r.drift ? "1" : "0") + '\n';
        };
    }

    const auto report = run_cell(sources.front(), cfg, opts);
    const auto json = ld3::to_json(report, sources.front().description, ld3::to_json(cfg));
    const std::string csv_path = o.segments_csv.empty() ? default_segments_path(o.out) : o.segments_csv;
    ld3::write_file_atomic(o.out, ld3::dump(json));
    ld3::write_file_atomic(csv_path, ld3::segments_csv(report));
    if (!o.trace.empty()) ld3::write_file_atomic(o.trace, trace);

    std::cout << report.detector << ": accuracy " << report.example_accuracy << ", " << report.drift_positions.size()
              << " drift(s)\n";
    return 0;
}

struct ValueTable {
    std::vector<std::string> detectors;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> values;  // [detector][dataset]
};

/// CSV: header `detector,<dataset>,...`, then one row per detector.
ValueTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ld3::io_error("cannot open table '" + path + "'");
    ValueTable t;
    std::string line;
    std::size_t line_no = 0;
    auto split = [](const std::string& text) {
        std::vector<std::string> cells;
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.emplace_back(ld3::detail::trim(cell));
        return cells;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (ld3::detail::trim(line).empty()) continue;
        auto cells = split(line);
        if (t.datasets.empty()) {
            if (cells.size() < 2) throw ld3::parse_error(line_no, "table header needs at least one dataset column");
            t.datasets.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (cells.size() != t.datasets.size() + 1)
            throw ld3::parse_error(line_no, "expected " + std::to_string(t.datasets.size() + 1) + " cells");
        t.detectors.push_back(cells.front());
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto v = ld3::detail::parse_real(cells[c]);
            if (!v) throw ld3::parse_error(line_no, "not a number: '" + cells[c] + "'");
            row.push_back(*v);
        }
        t.values.push_back(std::move(row));
    }
    if (t.values.empty()) throw ld3::parse_error(line_no, "table has no detector rows");
    return t;
}

ld3::ordered_json critical_distance(double alpha, std::size_t k, std::size_t datasets) {
    try {
        return ld3::nemenyi_cd(alpha, k, datasets);
    } catch (const ld3::unsupported_error& e) {
        std::cerr << "warning: no critical distance: " << e.what() << "\n";
        return nullptr;
    }
}

int cmd_compare(const StreamOptions& s, const DetectorOptions& d, const OutputOptions& o, const std::string& table,
                double alpha, bool lower_is_better) {
    ld3::ordered_json out;
    out["format"] = ld3::kCompareFormat;
    out["alpha"] = alpha;

    if (!table.empty()) {
        const auto t = read_table(table);
        out["detectors"] = t.detectors;
        out["datasets"] = t.datasets;
        auto ranks = ld3::to_json(ld3::average_ranks(t.values, !lower_is_better));
        out["metrics"]["value"] = {{"higher_is_better", !lower_is_better}, {"values", t.values}};
        out["metrics"]["value"].update(ranks);
        out["critical_distance"] = critical_distance(alpha, t.detectors.size(), t.datasets.size());
        ld3::write_file_atomic(o.out, ld3::dump(out));
        std::cout << ld3::dump(out["critical_distance"]);
        return 0;
    }

    const auto sources = load_sources(s);
    if (sources.empty()) throw ld3::config_error("compare needs --stream, --synthetic or --table");
    std::vector<std::string> names = d.detectors.empty() ? std::vector<std::string>{"ld3", "ddm", "eddm", "none"} : d.detectors;
    std::vector<ld3::DetectorConfig> configs;
    for (const auto& n : names) configs.push_back(make_detector(n, d));

    static constexpr const char* metric_names[] = {"example_accuracy", "hamming_score", "example_f1", "micro_f1"};
    std::map<std::string, std::vector<std::vector<double>>> values;
    for (const char* m : metric_names) values[m].assign(configs.size(), std::vector<double>(sources.size(), 0.0));

    ld3::ordered_json cells = ld3::ordered_json::array();
    ld3::RunOptions opts;
    opts.segments = o.segments;
    for (std::size_t di = 0; di < configs.size(); ++di)
        for (std::size_t si = 0; si < sources.size(); ++si) {
            const auto r = run_cell(sources[si], configs[di], opts);
            values["example_accuracy"][di][si] = r.example_accuracy;
            values["hamming_score"][di][si] = r.hamming_score;
            values["example_f1"][di][si] = r.example_f1;
            values["micro_f1"][di][si] = r.micro_f1;
            cells.push_back({{"detector", names[di]}, {"dataset", sources[si].name}, {"drift_positions", r.drift_positions}});
        }

    out["detectors"] = names;
    ld3::ordered_json datasets = ld3::ordered_json::array(), descriptions = ld3::ordered_json::array();
    for (const auto& src : sources) {
        datasets.push_back(src.name);
        descriptions.push_back(src.description);
    }
    out["datasets"] = datasets;
    out["sources"] = descriptions;
    for (const char* m : metric_names) {
        ld3::ordered_json entry = {{"higher_is_better", true}, {"values", values[m]}};
        entry.update(ld3::to_json(ld3::average_ranks(values[m], true)));
        out["metrics"][m] = entry;
    }
    out["runs"] = cells;
    out["critical_distance"] = critical_distance(alpha, configs.size(), sources.size());
    ld3::write_file_atomic(o.out, ld3::dump(out));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label-dependency drift detection experiments on multi-label streams"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value file supplying any flag; command-line flags take precedence");

    StreamOptions stream;
    DetectorOptions detector;
    OutputOptions output;
    std::string table;
    double alpha = 0.05;
    bool lower_is_better = false;

    auto* gen = app.add_subcommand("generate", "Write a synthetic drift stream in the dataset format");
    add_stream_flags(gen, stream, false);
    gen->add_option("--out", output.out, "Output dataset path")->required();

    auto* run = app.add_subcommand("run", "Prequential run of one detector on one stream");
    add_stream_flags(run, stream, false);
    add_detector_flags(run, detector);
    run->add_option("--detector", detector.detector, "Detector")
        ->check(CLI::IsMember({"ld3", "ddm", "eddm", "none"}))
        ->capture_default_str();
    run->add_option("--out", output.out, "Report path (JSON)")->required();
    run->add_option("--segments", output.segments, "Number of evaluation segments")->capture_default_str();
    run->add_option("--segments-csv", output.segments_csv, "Segment series CSV path (default: the report path with extension .segments.csv)");
    run->add_option("--trace", output.trace, "Write per-instance detector inputs to this CSV");

    auto* cmp = app.add_subcommand("compare", "Rank several detectors over several streams");
    add_stream_flags(cmp, stream, true);
    add_detector_flags(cmp, detector);
    cmp->add_option("--detectors", detector.detectors, "Detectors to compare (default ld3,ddm,eddm,none)")
        ->delimiter(',')
        ->check(CLI::IsMember({"ld3", "ddm", "eddm", "none"}));
    cmp->add_option("--table", table, "Precomputed metric table (CSV: detector,<dataset>...) instead of running");
    cmp->add_flag("--lower-is-better", lower_is_better, "Table values: rank 1 goes to the smallest value");
    cmp->add_option("--alpha", alpha, "Nemenyi significance level (0.05 or 0.10)")
        ->check(CLI::IsMember({0.05, 0.10}))
        ->capture_default_str();
    cmp->add_option("--segments", output.segments, "Number of evaluation segments")->capture_default_str();
    cmp->add_option("--out", output.out, "Comparison output path (JSON)")->required();

    for (auto* sub : {gen, run, cmp}) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(stream, output);
        if (*run) return cmd_run(stream, detector, output);
        if (*cmp) return cmd_compare(stream, detector, output, table, alpha, lower_is_better);
    } catch (const ld3::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
