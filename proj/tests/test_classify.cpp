#include <doctest.h>

#include <cmath>
#include <set>

#include "edgenilm/classify.hpp"
#include "edgenilm/error.hpp"
#include "edgenilm/signalgen.hpp"

using namespace edgenilm;

TEST_CASE("stratified split sizes and determinism") {
    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < 5; ++c) labels.insert(labels.end(), 10000, c);
    const auto s = split_dataset(labels, {0.7, 0.1, 0.2}, 3);
    CHECK(s.train.size() == 35000);
    CHECK(s.val.size() == 5000);
    CHECK(s.test.size() == 10000);
    std::vector<std::size_t> per_class(5, 0);
    for (const auto k : s.train) ++per_class[labels[k]];
    for (const auto n : per_class) CHECK(n == 7000);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == labels.size());

    const auto again = split_dataset(labels, {0.7, 0.1, 0.2}, 3);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);

    std::vector<std::size_t> tiny(12, 0);
    tiny.insert(tiny.end(), 9, 1);
    CHECK_THROWS_AS(split_dataset(tiny, {0.7, 0.1, 0.2}, 1), StratificationError);
    CHECK_THROWS_AS(split_dataset(labels, {0.7, 0.2, 0.2}, 1), ConfigError);
}

TEST_CASE("k-NN over DTW") {
    TemplateLibrary lib;
    lib.add(0, {0, 1, 2, 1, 0});
    lib.add(0, {0, 1, 2, 2, 0});
    lib.add(1, {3, 3, 3, 3, 3});
    lib.add(1, {3, 4, 3, 4, 3});
    const std::vector<double> q{3, 4, 3, 4, 3};
    const auto r = knn_dtw_classify(q, lib, 1, 2);
    CHECK(r.label == 1);
    CHECK(r.neighbor_distances[0] == 0.0);
    const auto r2 = knn_dtw_classify(std::vector<double>{0, 1, 2, 1.5, 0}, lib, 2, 2);
    CHECK(r2.label == 0);
    CHECK(r2.votes[0] == 1.0);
    CHECK_THROWS_AS(knn_dtw_classify(q, lib, 3, 2), DomainError);
    CHECK_THROWS_AS(knn_dtw_classify(q, TemplateLibrary{}, 1, 2), DomainError);
}

TEST_CASE("metrics") {
    SUBCASE("perfect predictions") {
        const std::vector<std::size_t> y{0, 1, 2, 2};
        const auto m = evaluate(y, y, 3);
        CHECK(m.accuracy == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.f1 == 1.0);
    }
    SUBCASE("binary confusion [[8,2],[3,7]]") {
        std::vector<std::size_t> truth, pred;
        auto add = [&](std::size_t t, std::size_t p, int n) {
            for (int k = 0; k < n; ++k) {
                truth.push_back(t);
                pred.push_back(p);
            }
        };
        add(0, 0, 8);
        add(0, 1, 2);
        add(1, 0, 3);
        add(1, 1, 7);
        const auto m = evaluate(pred, truth, 2);
        CHECK(m.accuracy == doctest::Approx(0.75));
        const double p0 = 8.0 / 11.0, p1 = 7.0 / 9.0, r0 = 0.8, r1 = 0.7;
        CHECK(m.precision == doctest::Approx((p0 + p1) / 2.0));
        CHECK(m.precision == doctest::Approx(0.753).epsilon(1e-3));
        CHECK(m.recall == doctest::Approx(0.75));
        const double f0 = 2 * p0 * r0 / (p0 + r0), f1 = 2 * p1 * r1 / (p1 + r1);
        CHECK(m.f1 == doctest::Approx((f0 + f1) / 2.0));
        CHECK(m.f1 == doctest::Approx(0.749).epsilon(1e-3));
        CHECK(m.confusion == std::vector<std::vector<std::size_t>>{{8, 2}, {3, 7}});
    }
    SUBCASE("one constant prediction over five balanced classes") {
        std::vector<std::size_t> truth;
        for (std::size_t c = 0; c < 5; ++c) truth.insert(truth.end(), 4, c);
        const std::vector<std::size_t> pred(truth.size(), 2);
        CHECK(evaluate(pred, truth, 5).accuracy == doctest::Approx(0.2));
    }
    const auto json = metrics_to_json(evaluate(std::vector<std::size_t>{0}, std::vector<std::size_t>{0}, 1));
    CHECK(json.find("\"f1_macro\"") != std::string::npos);
}

TEST_CASE("pipeline on a silent recording yields no predictions") {
    Schedule s;
    s.duration = 2.0;
    PipelineConfig cfg;
    cfg.set_mode(Mode::power);
    const auto w = synth_scenario(default_presets(), s, cfg.fs(), 1);
    const auto model = MobileMiniModel::create(ArchSpec::mobile_mini(20, 5), 1);
    CHECK(run_pipeline(w, cfg, model).empty());
}

TEST_CASE("pipeline errors carry the failing stage") {
    PipelineConfig cfg;
    cfg.set_mode(Mode::power);
    WaveformPair w;
    w.fs = cfg.fs();
    w.i.assign(6400, 0.0);
    w.labels.assign(6400, 0u);
    try {
        extract_events(w, cfg);
        FAIL("expected a PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "acquisition");
    }
}
