#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ld3/classifier.hpp"

using namespace ld3;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("incremental statistics agree with batch formulas", "[classifier][property]") {
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
        REQUIRE(stats.count() == 100);
        for (std::size_t f = 0; f < d; ++f) {
            long double sum = 0;
            for (const auto& x : batch) sum += x[f];
            const long double mean = sum / 100;
            long double ss = 0;
            for (const auto& x : batch) ss += (x[f] - mean) * (x[f] - mean);
            REQUIRE_THAT(stats.mean(f), WithinRel(static_cast<double>(mean), 1e-9));
            REQUIRE_THAT(stats.variance(f), WithinRel(static_cast<double>(ss / 100), 1e-9));
        }
    }
}

TEST_CASE("untrained chain predicts all zeros", "[classifier]") {
    ClassifierChain chain(4, 6);
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(chain.predict(x) == LabelVector(6));
    CHECK_THROWS_AS(chain.predict(std::vector<double>{1, 2}), input_error);
    CHECK_THROWS_AS(ClassifierChain(3, 0), config_error);
}

TEST_CASE("one-feature Gaussian link", "[classifier]") {
    GaussianLink link(1);
    link.fit(std::vector<double>{0.0}, false);
    link.fit(std::vector<double>{10.0}, true);
    CHECK(link.predict(std::vector<double>{9.0}));
    CHECK_FALSE(link.predict(std::vector<double>{1.0}));
    // Zero variance in both classes falls back to the absolute floor.
    CHECK(link.variance_floor() == GaussianLink::kVarianceFloor);
}

TEST_CASE("a link that has seen one class predicts it", "[classifier]") {
    GaussianLink link(2);
    link.fit(std::vector<double>{0.0, 0.0}, true);
    CHECK(link.predict(std::vector<double>{100.0, -100.0}));
    link.clear();
    CHECK_FALSE(link.predict(std::vector<double>{0.0, 0.0}));
}

TEST_CASE("chain learns label dependencies from earlier labels", "[classifier]") {
    // Label 1 copies label 0; label 0 follows the sign of the single feature.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.3);
    ClassifierChain chain(1, 2);
    for (int i = 0; i < 400; ++i) {
        const int y = i % 2;
        const std::vector<double> x{(y ? 2.0 : -2.0) + noise(rng)};
        chain.partial_fit(x, LabelVector{y, y});
    }
    CHECK(chain.predict(std::vector<double>{2.0}) == LabelVector{1, 1});
    CHECK(chain.predict(std::vector<double>{-2.0}) == LabelVector{0, 0});
    CHECK(chain.link(1).inputs() == 2);
    chain.reset();
    CHECK(chain.predict(std::vector<double>{2.0}) == LabelVector{0, 0});
}

TEST_CASE("partial_fit validates dimensions", "[classifier]") {
    ClassifierChain chain(2, 3);
    CHECK_THROWS_AS(chain.partial_fit(std::vector<double>{1, 2}, LabelVector{1, 0}), input_error);
    CHECK_THROWS_AS(chain.partial_fit(std::vector<double>{1}, LabelVector{1, 0, 1}), input_error);
}
