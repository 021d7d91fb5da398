#include <doctest.h>

#include <json.hpp>

#include "edgenilm/config.hpp"
#include "edgenilm/error.hpp"
#include "edgenilm/io.hpp"

using namespace edgenilm;

TEST_CASE("shipped default config matches the built-in defaults") {
    const auto shipped = nlohmann::json::parse(read_text_file(EDGENILM_DEFAULT_CONFIG));
    const auto builtin = nlohmann::json::parse(config_to_json(default_config()));
    CHECK(shipped == builtin);
    CHECK(config_to_json(load_config(EDGENILM_DEFAULT_CONFIG)) == config_to_json(default_config()));
}

TEST_CASE("partial configs keep defaults for missing keys") {
    const auto cfg = config_from_json(R"({"seed": 11, "mode": "current", "dtw": {"band": 8}})");
    CHECK(cfg.seed == 11);
    CHECK(cfg.pipeline.mode == Mode::current);
    CHECK(cfg.pipeline.detector.threshold == doctest::Approx(5.0 / 230.0));
    CHECK(cfg.pipeline.dtw.band == 8u);
    CHECK(cfg.appliances.size() == 5);
    CHECK(cfg.pipeline.fs() == doctest::Approx(6400.0));
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(config_from_json("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"mode": "both"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"acquisition": {"adc_prescaler": 0}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"train": {"learning_rate": -1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"schedule": {"entries": [{"id": "lamp", "t_on": 4, "t_off": 9}]}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("waveform CSV round trip") {
    const auto cfg = default_config();
    const auto w = synth_scenario(cfg.appliances, cfg.schedule, cfg.pipeline.fs(), cfg.seed);
    const auto text = waveform_to_csv(w);
    CHECK(text.rfind("t_s,v_V,i_A,labels\n", 0) == 0);
    const auto back = waveform_from_csv(text);
    CHECK(back.fs == doctest::Approx(w.fs));
    CHECK(back.v == w.v);
    CHECK(back.i == w.i);
    CHECK(waveform_to_csv(back) == text);
    CHECK(back.active_ids(7000) == std::vector<std::string>{"lamp"});
    CHECK_THROWS_AS(waveform_from_csv("time,v\n"), ConfigError);
}

TEST_CASE("raw and feature CSV layouts") {
    const auto cfg = default_config();
    const auto w = synth_scenario(cfg.appliances, cfg.schedule, cfg.pipeline.fs(), cfg.seed);
    const auto raw = quantize(w, cfg.pipeline.acquisition).raw;
    const auto rtext = raw_to_csv(raw);
    CHECK(rtext.rfind("t_s,counts_v,counts_i\n0,", 0) == 0);

    const auto table = CycleTable::build(calibrate(w, cfg.pipeline.acquisition), 50.0);
    const auto rows = frame_features(table, 0.1, 50.0);
    CHECK(rows.size() == table.size() / 5);
    const auto csv = frame_features_to_csv(rows);
    const auto header = csv.substr(0, csv.find('\n'));
    CHECK(header.rfind("frame_idx,P_W,S_VA,Q_var,h1_mag,h3_mag", 0) == 0);
    CHECK(header.find("h2_") == std::string::npos);
    CHECK(header.find("h15_phase") != std::string::npos);
    // Lamp on between 1.0 s and 3.5 s.
    CHECK(rows[20].power.p == doctest::Approx(60.0).epsilon(0.02));
    CHECK(std::abs(rows[2].power.p) < 0.5);

    const auto ci = CycleTable::build(calibrate(w, cfg.pipeline.acquisition, Mode::current), 50.0);
    const auto ccsv = frame_features_to_csv(frame_features(ci, 0.1, 50.0));
    CHECK(ccsv.find("\n0,,,,") != std::string::npos);
}

TEST_CASE("number formatting round trips") {
    for (const double x : {0.1, 1.0 / 3.0, 6400.0, -2.5e-7}) {
        CHECK(std::stod(format_number(x)) == x);
    }
}
