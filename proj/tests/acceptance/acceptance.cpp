// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ld3/ld3.hpp"
#include "oracles/baseline_oracle.hpp"
#include "oracles/ld3_oracle.hpp"

using namespace ld3;

namespace {

struct Check {
    std::string detail;
    bool ok = true;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Check&)>& body) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (c.ok ? "PASS" : "FAIL") << " [" << id << "] " << name << " (" << std::fixed;
    line.precision(2);
    line << secs << " s)";
    if (!c.ok) line << ": " << c.detail;
    std::cout << line.str() << std::endl;
    failures += !c.ok;
}

GlobalRanking ranking(std::vector<std::size_t> order) {
    GlobalRanking g;
    g.order = std::move(order);
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void worked_example(Check& c) {
    const std::vector<LabelVector> old_w{{0, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const std::vector<LabelVector> new_w{{1, 0, 1}, {1, 1, 0}, {1, 0, 1}};
    using Rows = std::vector<std::vector<std::uint32_t>>;
    c.expect(cooccurrence(old_w, 3).to_rows() == Rows{{0, 1, 1}, {1, 0, 2}, {1, 2, 0}}, "M_old");
    c.expect(cooccurrence(new_w, 3).to_rows() == Rows{{0, 1, 2}, {1, 0, 0}, {2, 0, 0}}, "M_new");
    const auto lr_old = local_rankings(cooccurrence(old_w, 3));
    const auto lr_new = local_rankings(cooccurrence(new_w, 3));
    c.expect(lr_old.rank(0, 1) == 1 && lr_old.rank(0, 2) == 1 && lr_old.rank(1, 2) == 1 && lr_old.rank(1, 0) == 2 &&
                 lr_old.rank(2, 1) == 1 && lr_old.rank(2, 0) == 2,
             "old local rankings");
    c.expect(lr_new.rank(0, 2) == 1 && lr_new.rank(0, 1) == 2 && lr_new.rank(1, 0) == 1 && lr_new.rank(1, 2) == 2 &&
                 lr_new.rank(2, 0) == 1 && lr_new.rank(2, 1) == 2,
             "new local rankings");
    const auto g_old = reciprocal_fuse(lr_old), g_new = reciprocal_fuse(lr_new);
    c.expect(g_old.scores == std::vector<double>{1.0, 0.5, 0.5}, "old reciprocal scores");
    c.expect(g_new.scores[0] == 0.5 && g_new.scores[1] == 1.0 && std::abs(g_new.scores[2] - 2.0 / 3.0) < 1e-15,
             "new reciprocal scores");
    c.expect(g_old.order == std::vector<std::size_t>{1, 2, 0}, "R_old");
    c.expect(g_new.order == std::vector<std::size_t>{0, 2, 1}, "R_new");
    const double corr = ws_coefficient(g_new, g_old);
    c.expect(std::abs(corr - (-1.0 / 6.0)) <= 1e-6, "C = " + std::to_string(corr));

    LD3Detector det(LD3Config{3, 4.0, 0, FusionMethod::reciprocal}, 3);
    DriftSignal s;
    for (const auto& v : old_w) s = det.update(v);
    for (const auto& v : new_w) s = det.update(v);
    c.expect(s.correlation && std::abs(*s.correlation - (-1.0 / 6.0)) <= 1e-6, "detector correlation");
}

void ws_properties(Check& c) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 2 + rng() % 49;
        std::vector<std::size_t> a(n), b(n);
        std::iota(a.begin(), a.end(), std::size_t{0});
        std::iota(b.begin(), b.end(), std::size_t{0});
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        c.expect(ws_coefficient(ranking(a), ranking(a)) == 1.0, "C(R,R) != 1 for n=" + std::to_string(n));
        const double v = ws_coefficient(ranking(a), ranking(b));
        c.expect(v > -1.0 && v <= 1.0, "C out of (-1,1]: " + std::to_string(v));
        const double r = ws_coefficient(ranking(a), ranking(std::vector<std::size_t>(a.rbegin(), a.rend())));
        c.expect(r > -1.0 && r <= 1.0, "reversal C out of (-1,1]: " + std::to_string(r));
    }
}

void nemenyi(Check& c) {
    const double cd = nemenyi_cd(0.05, 16, 12);
    c.expect(std::abs(cd - 6.659) <= 0.01, "CD = " + std::to_string(cd));
    const std::vector<double> v{1, 2, 3, 3, 4};
    c.expect(tied_average_ranks(v, false) == std::vector<double>{1, 2, 3.5, 3.5, 5}, "tied ranks");
}

void stream_shape(Check& c) {
    const auto data = generate_dataset(DriftStreamSpec::preset(DriftKind::sudden, 1));
    c.expect(data.meta.instances == 20000, "N");
    c.expect(data.meta.features == 200, "D");
    c.expect(data.meta.labels == 50, "n");
    c.expect(data.meta.cardinality >= 1.4 && data.meta.cardinality <= 1.8,
             "LC = " + std::to_string(data.meta.cardinality));
}

void drift_detection(Check& c) {
    const auto spec = DriftStreamSpec::preset(DriftKind::sudden, 1);
    const std::size_t w = 500;
    DetectorConfig cfg;
    cfg.kind = DetectorKind::ld3;
    cfg.ld3 = LD3Config{w, 4.0, 0, FusionMethod::reciprocal};

    std::vector<oracle::Bits> predicted;
    RunOptions opt;
    opt.observer = [&](const StepRecord& r) {
        oracle::Bits b(r.predicted.size());
        for (std::size_t j = 0; j < b.size(); ++j) b[j] = r.predicted[j];
        predicted.push_back(std::move(b));
    };
    SyntheticStream s1(spec);
    ClassifierChain m1(spec.features, spec.labels);
    const auto with = prequential_run(s1, m1, cfg, opt);

    SyntheticStream s2(spec);
    ClassifierChain m2(spec.features, spec.labels);
    const auto without = prequential_run(s2, m2, DetectorConfig{});

    const auto replay = oracle::replay(predicted, spec.labels, w, 4.0, 0);
    std::vector<std::size_t> oracle_drifts;
    for (std::size_t k = 0; k < replay.size(); ++k)
        if (replay[k].drift) oracle_drifts.push_back(k);
    c.expect(oracle_drifts == with.drift_positions, "detector and oracle disagree on drift positions");

    for (std::size_t p : spec.drift_positions) {
        const bool hit = std::any_of(with.drift_positions.begin(), with.drift_positions.end(),
                                     [&](std::size_t d) { return d > p && d <= p + 3 * w; });
        c.expect(hit, "no drift in (" + std::to_string(p) + ", " + std::to_string(p + 3 * w) + "]");
    }
    c.expect(with.example_accuracy > without.example_accuracy,
             "LD3 accuracy " + std::to_string(with.example_accuracy) + " <= no-detector " +
                 std::to_string(without.example_accuracy));
    std::cout << "  ld3 accuracy " << with.example_accuracy << ", no-detector " << without.example_accuracy
              << ", drifts at";
    for (auto d : with.drift_positions) std::cout << ' ' << d;
    std::cout << '\n';
}

void warm_up(Check& c) {
    std::mt19937_64 rng(99);
    for (std::size_t w : {3u, 50u, 500u}) {
        const std::size_t n = 8;
        const std::size_t total = w == 500 ? 8000 : 60 * w;
        for (int trial = 0; trial < (w == 500 ? 2 : 10); ++trial) {
            LD3Detector det(LD3Config{w, 0.5 + (rng() % 30) / 10.0, rng() % 2, FusionMethod::reciprocal}, n);
            std::bernoulli_distribution coin(0.1 + (rng() % 80) / 100.0);
            std::size_t since_clear = 0;
            for (std::size_t k = 0; k < total; ++k) {
                LabelVector v(n);
                for (std::size_t j = 0; j < n; ++j) v.set(j, coin(rng));
                ++since_clear;
                if (det.update(v).drift) {
                    c.expect(since_clear > 2 * w, "drift " + std::to_string(since_clear) + " updates after clear, w=" +
                                                      std::to_string(w));
                    since_clear = 0;
                }
            }
        }
    }
}

void classifier_stats(Check& c) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + rng() % 6;
        const double offset = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
        const double scale = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
        std::vector<std::vector<double>> batch(100, std::vector<double>(d));
        GaussianClassStats stats(d);
        for (auto& x : batch) {
            for (auto& v : x) v = offset + scale * noise(rng);
            stats.add(x);
        }
        for (std::size_t f = 0; f < d; ++f) {
            long double sum = 0;
            for (const auto& x : batch) sum += x[f];
            const long double mean = sum / 100;
            long double ss = 0;
            for (const auto& x : batch) ss += (x[f] - mean) * (x[f] - mean);
            const double var = static_cast<double>(ss / 100);
            c.expect(std::abs(stats.mean(f) - static_cast<double>(mean)) <= 1e-9 * std::abs(static_cast<double>(mean)),
                     "mean");
            c.expect(std::abs(stats.variance(f) - var) <= 1e-9 * var, "variance");
        }
    }
    ClassifierChain chain(5, 7);
    c.expect(chain.predict(std::vector<double>(5, 0.3)) == LabelVector(7), "untrained prediction not all zeros");
}

void metric_suite(Check& c) {
    using V = std::vector<LabelVector>;
    c.expect(example_accuracy(V{{1, 1, 1}}, V{{1, 0, 1}}) == 2.0 / 3.0, "accuracy 2/3");
    c.expect(example_accuracy(V{{1, 0, 0}}, V{{0, 1, 1}}) == 0.0, "accuracy disjoint");
    c.expect(hamming_score(V{{1, 1, 1}}, V{{1, 0, 1}}) == 1.0 - 1.0 / 3.0, "hamming 2/3");
    c.expect(hamming_score(V{{0, 1, 0}}, V{{1, 0, 1}}) == 0.0, "hamming all wrong");
    MetricAccumulator acc;
    acc.add(LabelVector{1, 1, 1}, LabelVector{1, 0, 1});
    c.expect(acc.example_precision() == 2.0 / 3.0 && acc.example_recall() == 1.0 && acc.example_f1() == 0.8,
             "example F1 0.8");
    c.expect(example_f1(V{{1, 0, 0}}, V{{0, 1, 1}}) == 0.0, "F1 disjoint");
    c.expect(micro_f1(V{{1, 1}}, V{{1, 0}}) == 2.0 / 3.0, "micro F1 2/3");
    c.expect(micro_f1(V{{0, 0}}, V{{0, 0}}) == 0.0, "micro F1 empty pool");
    std::mt19937_64 rng(13);
    std::bernoulli_distribution coin(0.3);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + rng() % 20, m = 1 + rng() % 10;
        V truth;
        for (std::size_t i = 0; i < m; ++i) {
            LabelVector y(n);
            for (std::size_t j = 0; j < n; ++j) y.set(j, coin(rng));
            y.set(rng() % n, true);
            truth.push_back(y);
        }
        c.expect(example_accuracy(truth, truth) == 1.0 && hamming_score(truth, truth) == 1.0 &&
                     example_f1(truth, truth) == 1.0 && micro_f1(truth, truth) == 1.0,
                 "perfect prediction");
    }
}

void baseline_oracles(Check& c) {
    std::mt19937_64 rng(31);
    auto as_decision = [](Phase p) {
        return p == Phase::drift ? oracle::Decision::drift
                                 : p == Phase::warning ? oracle::Decision::warning : oracle::Decision::stable;
    };
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_real_distribution<double> rate(0.0, 0.6);
        const double before = rate(rng), after = rate(rng);
        const std::size_t change = rng() % 5000;
        std::vector<int> errors(5000);
        for (std::size_t i = 0; i < errors.size(); ++i)
            errors[i] = std::bernoulli_distribution(i < change ? before : after)(rng);
        const auto want_ddm = oracle::ddm(errors), want_eddm = oracle::eddm(errors);
        DDM ddm;
        EDDM eddm;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            const ErrorSignal e{errors[i] == 0};
            c.expect(as_decision(ddm.update(e)) == want_ddm[i], "DDM trial " + std::to_string(trial));
            c.expect(as_decision(eddm.update(e)) == want_eddm[i], "EDDM trial " + std::to_string(trial));
        }
    }
}

void determinism(Check& c) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("ld3-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string base = std::string(LD3_CLI) +
                             " run --synthetic sudden --samples 4000 --features 20 --labels 10"
                             " --drift-positions 1500,3000 --seed 7 --detector ld3 --w 200 --t 4 --L 0 --out ";
    for (const char* name : {"a.json", "b.json"}) {
        const int status = std::system((base + (dir / name).string() + " >/dev/null 2>&1").c_str());
        c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "cmd_run failed");
    }
    const auto a = slurp((dir / "a.json").string()), b = slurp((dir / "b.json").string());
    c.expect(!a.empty() && a == b, "reports differ");
    const auto seg = slurp((dir / "a.segments.csv").string());
    c.expect(!seg.empty() && seg == slurp((dir / "b.segments.csv").string()), "segment CSVs differ");
    fs::remove_all(dir);
}

}  // namespace

int main() {
    criterion(1, "worked example: matrices, rankings, reciprocal scores, orders, C = -1/6", worked_example);
    criterion(2, "WS coefficient: C(R,R) = 1 and C in (-1, 1]", ws_properties);
    criterion(3, "Nemenyi CD(0.05, 16, 12) = 6.659 and tied-average ranks", nemenyi);
    criterion(4, "synthetic stream: 20000 x 200 x 50, LC in [1.4, 1.8]", stream_shape);
    criterion(5, "sudden stream: drift within (p, p + 3w] of each p, oracle agreement, LD3 beats no-detector",
              drift_detection);
    criterion(6, "warm-up: no drift within 2w updates of construction or clear", warm_up);
    criterion(7, "classifier: incremental vs batch statistics, untrained prediction all zeros", classifier_stats);
    criterion(8, "metrics: hand-derived cases and perfect prediction", metric_suite);
    criterion(9, "DDM/EDDM agree with straight-line simulations", baseline_oracles);
    criterion(10, "determinism: identical run flags give byte-identical reports", determinism);
    std::cout << (failures ? "FAILED: " : "all passed: ") << (10 - failures) << "/10\n";
    return failures ? 1 : 0;
}
