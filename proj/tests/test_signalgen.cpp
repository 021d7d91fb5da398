#include <doctest.h>

#include <cmath>
#include <numbers>

#include "edgenilm/error.hpp"
#include "edgenilm/features.hpp"
#include "edgenilm/signalgen.hpp"
#include "oracles.hpp"

using namespace edgenilm;

namespace {

ApplianceModel quiet_resistive(double watts) {
    return {"r", LoadKind::resistive, watts, 1.0, {}, 1.0, 0.0, 0.0};
}

}  // namespace

TEST_CASE("resistive load draws an in-phase sine of the rated power") {
    const double fs = 6400.0;
    const auto w = synth_appliance(quiet_resistive(60.0), 0.2, fs, 1);
    const double amp = std::sqrt(2.0) * 60.0 / 230.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double t = static_cast<double>(k) / fs;
        CHECK(w.i[k] == doctest::Approx(amp * std::sin(2.0 * std::numbers::pi * 50.0 * t)).epsilon(1e-12));
    }
    const std::span<const double> v(w.v.data() + 256, 128), i(w.i.data() + 256, 128);
    CHECK(active_power(v, i) == doctest::Approx(60.0).epsilon(1e-9));
}

TEST_CASE("same seed gives a bit-identical series") {
    const auto& lamp = find_model(default_presets(), "refrigerator");
    const auto a = synth_appliance(lamp, 0.5, 6400.0, 7);
    const auto b = synth_appliance(lamp, 0.5, 6400.0, 7);
    CHECK(a.i == b.i);
    CHECK(a.v == b.v);
    const auto c = synth_appliance(lamp, 0.5, 6400.0, 8);
    CHECK(a.i != c.i);
}

TEST_CASE("third harmonic amplitude matches the generator setting") {
    ApplianceModel m{"s", LoadKind::smps, 100.0, 1.0, {{3, 0.4, 0.0}}, 1.0, 0.0, 0.0};
    const auto w = synth_appliance(m, 0.2, 6400.0, 3);
    const std::span<const double> win(w.i.data() + 128, 512);
    const auto X = oracle::naive_dft(win);
    CHECK(std::abs(X[12]) / std::abs(X[4]) == doctest::Approx(0.4).epsilon(0.01 / 0.4));
    const auto h = window_harmonics(win);
    CHECK(h.magnitudes[1] / h.magnitudes[0] == doctest::Approx(0.4).epsilon(0.025));
}

TEST_CASE("scenario superposition") {
    const auto presets = default_presets();
    SUBCASE("empty schedule leaves noise only and no labels") {
        Schedule s;
        s.duration = 0.5;
        s.sensor_noise_sigma = 0.001;
        const auto w = synth_scenario(presets, s, 6400.0, 5);
        for (const auto l : w.labels) CHECK(l == 0u);
        double peak = 0.0;
        for (const double x : w.i) peak = std::max(peak, std::abs(x));
        CHECK(peak < 0.01);
    }
    SUBCASE("one appliance on for the whole record equals synth_appliance") {
        Schedule s;
        s.duration = 0.6;
        s.entries = {{"washing_machine", 0.0, 0.6, false}};
        const auto w = synth_scenario(presets, s, 6400.0, 11);
        const auto ref = synth_appliance(find_model(presets, "washing_machine"), 0.6, 6400.0, 11);
        CHECK(w.i == ref.i);
    }
    SUBCASE("active power adds up while loads overlap") {
        std::vector<ApplianceModel> m{quiet_resistive(60.0), quiet_resistive(1200.0)};
        m[0].id = "lamp";
        m[1].id = "hairdryer";
        Schedule s;
        s.duration = 1.0;
        s.entries = {{"lamp", 0.1, 0.9, false}, {"hairdryer", 0.3, 0.7, false}};
        const auto w = synth_scenario(m, s, 6400.0, 2);
        const std::size_t start = 3200;  // 0.5 s
        const std::span<const double> v(w.v.data() + start, 640), i(w.i.data() + start, 640);
        CHECK(active_power(v, i) == doctest::Approx(1260.0).epsilon(0.02));
        CHECK(w.active_ids(start) == std::vector<std::string>{"lamp", "hairdryer"});
        CHECK(w.active_ids(100).empty());
    }
}

TEST_CASE("switch times snap to rising zero crossings") {
    CHECK(snap_to_zero_crossing(1.004, 50.0) == doctest::Approx(1.0));
    CHECK(snap_to_zero_crossing(1.011, 50.0) == doctest::Approx(1.02));
}

TEST_CASE("invalid models and rates are rejected") {
    auto m = quiet_resistive(60.0);
    m.power_factor = 1.5;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    ApplianceModel h{"h", LoadKind::smps, 50.0, 1.0, {{15, 0.1, 0.0}}, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(synth_appliance(h, 0.1, 1000.0, 1), ConfigError);
    Schedule s;
    s.duration = 1.0;
    s.entries = {{"nope", 0.1, 0.5, false}};
    CHECK_THROWS_AS(synth_scenario({quiet_resistive(1.0)}, s, 6400.0, 1), ConfigError);
}
