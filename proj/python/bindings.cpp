#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "edgenilm/bench.hpp"
#include "edgenilm/classify.hpp"
#include "edgenilm/config.hpp"
#include "edgenilm/dataset.hpp"
#include "edgenilm/error.hpp"
#include "edgenilm/io.hpp"

namespace py = pybind11;
using namespace edgenilm;

namespace {

PipelineConfig pipeline_for(const std::string& mode) {
    PipelineConfig p = default_config().pipeline;
    p.set_mode(mode_from_string(mode));
    return p;
}

WaveformPair make_wave(std::vector<double> v, std::vector<double> i, double fs) {
    WaveformPair w;
    w.fs = fs;
    w.v = std::move(v);
    w.i = std::move(i);
    w.labels.assign(w.i.size(), 0u);
    return w;
}

py::dict event_dict(const EventRecord& e) {
    py::dict d;
    d["j"] = e.mark.j;
    d["dir"] = to_string(e.mark.direction);
    d["delta"] = e.mark.delta;
    d["feature"] = e.feature.values;
    d["signature"] = std::vector<double>(e.signature.begin(), e.signature.end());
    d["load_cycle"] = e.load_cycle;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Edge NILM pipeline core";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("sampling_rate",
          [](double clock, double prescaler, double cycles) {
              AcquisitionConfig c;
              c.f_adc_clock = clock;
              c.adc_prescaler = prescaler;
              c.sampling_cycles = cycles;
              return sampling_rate(c);
          },
          py::arg("f_adc_clock"), py::arg("prescaler"), py::arg("sampling_cycles"));

    m.def("default_config_json", [] { return config_to_json(default_config()); });

    m.def("synth_scenario",
          [](const std::string& config_json) {
              const auto cfg = config_json.empty() ? default_config() : config_from_json(config_json);
              const auto w = synth_scenario(cfg.appliances, cfg.schedule, cfg.pipeline.fs(), cfg.seed);
              return py::make_tuple(w.v, w.i, w.fs);
          },
          py::arg("config_json") = "", "Returns (v, i, fs) for the configured schedule.");

    m.def("fft",
          [](const std::vector<double>& x) {
              const auto s = fft(x, x.size());
              return std::vector<std::complex<double>>(s.bins.begin(), s.bins.end());
          },
          py::arg("x"), "One-sided spectrum (bins 0..n/2) of a power-of-two-length input.");

    m.def("fft_skip_reorder",
          [](const std::vector<double>& x, const std::vector<std::size_t>& bins) {
              std::vector<std::complex<double>> out;
              for (const auto& b : fft_skip_reorder(x, x.size(), bins)) out.push_back(b.value);
              return out;
          },
          py::arg("x"), py::arg("bins"));

    m.def("power_features",
          [](const std::vector<double>& v, const std::vector<double>& i) {
              const auto p = power_features(v, i);
              py::dict d;
              d["P"] = p.p;
              d["S"] = p.s;
              d["Q"] = p.q;
              d["vrms"] = p.vrms;
              d["irms"] = p.irms;
              return d;
          },
          py::arg("v"), py::arg("i"));

    m.def("odd_harmonics",
          [](const std::vector<double>& window) {
              const auto h = window_harmonics(window);
              return py::make_tuple(h.orders, h.magnitudes, h.phases);
          },
          py::arg("window"), "Magnitudes and relative phases of orders 1..15 over a 4-cycle, 512-point window.");

    m.def("dtw",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              const auto r = dtw_distance(x, y);
              return py::make_tuple(r.distance, r.path);
          },
          py::arg("x"), py::arg("y"));

    m.def("detect_events",
          [](const std::vector<double>& levels, const std::string& mode) {
              std::vector<py::tuple> out;
              for (const auto& e : detect_events(levels, pipeline_for(mode).detector)) {
                  out.push_back(py::make_tuple(e.j, to_string(e.direction), e.delta));
              }
              return out;
          },
          py::arg("levels"), py::arg("mode") = "power");

    m.def("extract_events",
          [](std::vector<double> v, std::vector<double> i, double fs, const std::string& mode) {
              auto p = pipeline_for(mode);
              if (std::abs(fs - p.fs()) > 1e-6 * fs) {
                  p.acquisition.f_adc_clock = fs * p.acquisition.adc_prescaler * p.acquisition.sampling_cycles;
              }
              const auto ex = extract_events(make_wave(std::move(v), std::move(i), fs), p);
              std::vector<py::dict> out;
              for (const auto& e : ex.events) out.push_back(event_dict(e));
              return out;
          },
          py::arg("v"), py::arg("i"), py::arg("fs"), py::arg("mode") = "power");

    m.def("evaluate",
          [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth, std::size_t classes) {
              const auto mt = evaluate(pred, truth, classes);
              py::dict d;
              d["accuracy"] = mt.accuracy;
              d["precision_macro"] = mt.precision;
              d["recall_macro"] = mt.recall;
              d["f1_macro"] = mt.f1;
              d["confusion"] = mt.confusion;
              return d;
          },
          py::arg("predictions"), py::arg("truth"), py::arg("classes"));

    m.def("split_dataset",
          [](const std::vector<std::size_t>& labels, std::array<double, 3> ratios, std::uint64_t seed) {
              const auto s = split_dataset(labels, ratios, seed);
              return py::make_tuple(s.train, s.val, s.test);
          },
          py::arg("labels"), py::arg("ratios") = std::array<double, 3>{0.7, 0.1, 0.2}, py::arg("seed") = 0);

    py::class_<MobileMiniModel>(m, "MobileMini")
        .def(py::init([](std::size_t input_length, std::size_t classes, std::uint64_t seed) {
                 return MobileMiniModel::create(ArchSpec::mobile_mini(input_length, classes), seed);
             }),
             py::arg("input_length") = 20, py::arg("classes") = 5, py::arg("seed") = 1)
        .def_static("from_json", &load_model_json)
        .def("to_json", &save_model_json)
        .def_property_readonly("parameter_count", &MobileMiniModel::parameter_count)
        .def("predict_proba", [](const MobileMiniModel& mm, const std::vector<double>& x) { return forward(mm, x); })
        .def("fit",
             [](MobileMiniModel& mm, const std::vector<std::vector<double>>& xs,
                const std::vector<std::size_t>& ys, std::size_t epochs, double lr, std::uint64_t seed) {
                 if (xs.size() != ys.size()) throw DomainError("features and labels differ in length");
                 std::vector<Example> data;
                 for (std::size_t k = 0; k < xs.size(); ++k) data.push_back({xs[k], ys[k]});
                 fit_standardization(mm, data);
                 TrainConfig cfg;
                 cfg.epochs = epochs;
                 cfg.learning_rate = lr;
                 cfg.seed = seed;
                 auto r = train(mm, data, cfg);
                 mm = std::move(r.model);
                 return r.loss_history;
             },
             py::arg("x"), py::arg("y"), py::arg("epochs") = 300, py::arg("learning_rate") = 0.05,
             py::arg("seed") = 1);

    m.def("bench",
          [](std::size_t reps) { return bench_to_json(run_bench(default_config().pipeline.acquisition, reps)); },
          py::arg("reps") = 10000, "BenchReport as JSON text.");
}
