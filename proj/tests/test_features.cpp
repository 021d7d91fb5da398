#include <doctest.h>

#include <cmath>
#include <numbers>

#include "edgenilm/error.hpp"
#include "edgenilm/features.hpp"

using namespace edgenilm;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> tone(std::size_t n, double rms, double cycles_per_n, double phase,
                         int order = 1) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = std::sqrt(2.0) * rms *
               std::sin(2.0 * kPi * order * cycles_per_n * static_cast<double>(k) / n + phase);
    }
    return x;
}

}  // namespace

TEST_CASE("active power closed forms") {
    const auto v = tone(512, 230.0, 4, 0.0);
    CHECK(active_power(v, tone(512, 1.0, 4, 0.0)) == doctest::Approx(230.0).epsilon(1e-9));
    CHECK(active_power(v, tone(512, 1.0, 4, -kPi / 3)) == doctest::Approx(115.0).epsilon(1e-9));
    CHECK(active_power(v, std::vector<double>(512, 0.0)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(active_power(std::vector<double>{}, std::vector<double>{}), DomainError);
}

TEST_CASE("apparent power") {
    const auto v = tone(512, 230.0, 4, 0.0);
    CHECK(apparent_power(v, tone(512, 1.0, 4, 1.1)) == doctest::Approx(230.0).epsilon(1e-9));
    CHECK(apparent_power(std::vector<double>(512, 0.0), tone(512, 1.0, 4, 0.0)) == 0.0);
    auto i = tone(512, 1.0, 4, 0.0);
    const auto h3 = tone(512, 0.4, 4, 0.0, 3);
    for (std::size_t k = 0; k < i.size(); ++k) i[k] += h3[k];
    CHECK(apparent_power(v, i) == doctest::Approx(230.0 * std::sqrt(1.16)).epsilon(1e-9));
}

TEST_CASE("reactive power") {
    CHECK(reactive_power(230.0, 230.0) == 0.0);
    CHECK(reactive_power(115.0, 230.0) == doctest::Approx(199.186).epsilon(1e-6));
    CHECK_THROWS_AS(reactive_power(231.0, 230.0), InconsistencyError);
    CHECK(reactive_power(230.0 * (1.0 + 1e-9), 230.0) == 0.0);
}

TEST_CASE("power_features in current-only mode") {
    const auto pf = power_features(std::vector<double>{}, tone(128, 2.0, 1, 0.0));
    CHECK_FALSE(pf.has_power);
    CHECK(pf.irms == doctest::Approx(2.0));
}

TEST_CASE("odd harmonic extraction") {
    SUBCASE("pure fundamental") {
        const auto h = window_harmonics(tone(512, 1.0, 4, 0.0));
        CHECK(h.orders == std::vector<int>{1, 3, 5, 7, 9, 11, 13, 15});
        CHECK(h.magnitudes[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        for (std::size_t k = 1; k < 8; ++k) CHECK(h.magnitudes[k] < 1e-9);
    }
    SUBCASE("third harmonic ratio and relative phase") {
        auto x = tone(512, 1.0, 4, 0.5);
        const auto h3 = tone(512, 0.4, 4, 1.5 + 0.7, 3);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += h3[k];
        const auto h = window_harmonics(x);
        CHECK(h.magnitudes[1] / h.magnitudes[0] == doctest::Approx(0.4).epsilon(1e-6));
        // sin-referenced inputs shift the cosine-referenced phase by (h - 1) * pi / 2.
        CHECK(h.phases[1] == doctest::Approx(0.7 - kPi).epsilon(1e-6));
        const auto full = window_harmonics(x, 50.0, true);
        for (std::size_t k = 0; k < 8; ++k) CHECK(full.magnitudes[k] == h.magnitudes[k]);
    }
    SUBCASE("zero input") {
        const auto h = window_harmonics(std::vector<double>(512, 0.0));
        for (const double m : h.magnitudes) CHECK(m == 0.0);
    }
    CHECK(odd_harmonic_bins(4) == std::vector<std::size_t>{4, 12, 20, 28, 36, 44, 52, 60});
    CHECK_THROWS_AS(window_harmonics(std::vector<double>(500, 0.0)), DomainError);
}
