// Feed a synthetic sudden-drift stream through a classifier chain with the
// LD3 detector attached and print where drift was signalled.

#include <iostream>

#include "ld3/ld3.hpp"

int main() {
    auto spec = ld3::DriftStreamSpec::preset(ld3::DriftKind::sudden, /*seed=*/7);
    spec.samples = 8'000;
    spec.drift_positions = {4'000};
    spec.drift_widths = {1};

    ld3::SyntheticStream stream(spec);
    ld3::ClassifierChain model(spec.features, spec.labels);
    ld3::DetectorConfig detector;
    detector.kind = ld3::DetectorKind::ld3;

    const auto report = ld3::prequential_run(stream, model, detector);
    std::cout << "example accuracy " << report.example_accuracy << "\n";
    for (auto p : report.drift_positions) std::cout << "drift at " << p << "\n";
}
