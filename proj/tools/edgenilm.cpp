// edgenilm command-line front end.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgenilm/bench.hpp"
#include "edgenilm/classify.hpp"
#include "edgenilm/config.hpp"
#include "edgenilm/dataset.hpp"
#include "edgenilm/error.hpp"
#include "edgenilm/io.hpp"

using namespace edgenilm;

namespace {

constexpr const char* kSchemas = R"(File formats:
  config      JSON; see config/default.json for every key. Missing keys keep defaults.
  waveform    CSV  t_s,v_V,i_A,labels   (labels: '|'-separated active ids; v_V empty
                                         for current-only captures)
  raw         CSV  t_s,counts_v,counts_i
  features    CSV  frame_idx,P_W,S_VA,Q_var,h1_mag..h15_mag,h1_phase..h15_phase
                   (odd orders only; P/S/Q empty in current mode)
  events      JSONL {"j","dir","delta","feature"} per detected event
  dataset     JSONL {"j","dir","delta","feature","label","load_cycle"} per event
  model       JSON  {"format":"edgenilm.mobilemini","version","arch","normalization","layers"}
  predictions JSON  {"classes":[...],"predictions":[{"j","dir","delta","label",
                     "probabilities","feature_length"}]}
  metrics     JSON  {"accuracy","precision_macro","recall_macro","f1_macro","confusion"}
  bench       JSON  per-stage median ns per frame and analytic table bytes; the human
                    table goes to stderr
Exit status: 0 success, 1 usage error, 2 data or configuration error.)";

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string mode;
    std::string out;
};

Config resolve(const Globals& g) {
    Config cfg = g.config.empty() ? default_config() : load_config(g.config);
    if (g.seed) cfg.seed = *g.seed;
    if (!g.mode.empty()) cfg.pipeline.set_mode(mode_from_string(g.mode));
    return cfg;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(g.out, text);
    }
}

WaveformPair recording(const Config& cfg, const std::string& input) {
    if (!input.empty()) return waveform_from_csv(read_text_file(input));
    return synth_scenario(cfg.appliances, cfg.schedule, cfg.pipeline.fs(), cfg.seed);
}

EventDataset dataset(const Config& cfg, const std::string& path) {
    EventDataset data;
    if (path.empty()) {
        data = make_event_dataset(cfg.appliances, cfg.dataset, cfg.pipeline, cfg.seed);
    } else {
        data = dataset_from_jsonl(read_text_file(path), cfg.class_names());
    }
    const std::size_t want = feature_size(cfg.pipeline.mode);
    for (const auto& e : data.events) {
        if (e.feature.values.size() != want) {
            throw ConfigError("dataset holds " + std::to_string(e.feature.values.size()) +
                              "-value features but " + to_string(cfg.pipeline.mode) +
                              " mode needs " + std::to_string(want));
        }
    }
    return data;
}

Split split_of(const Config& cfg, const EventDataset& data) {
    const auto labels = data.labels();
    return split_dataset(labels, cfg.dataset.split, cfg.seed);
}

MobileMiniModel read_model(const std::string& path, const Config& cfg) {
    auto model = load_model_json(read_text_file(path));
    if (model.arch.input_length != feature_size(cfg.pipeline.mode)) {
        throw ConfigError("model expects " + std::to_string(model.arch.input_length) +
                          " features but " + to_string(cfg.pipeline.mode) + " mode produces " +
                          std::to_string(feature_size(cfg.pipeline.mode)));
    }
    return model;
}

TemplateLibrary knn_library(const Config& cfg, const EventDataset& data, const Split& split) {
    return build_library(data.events, split.train, cfg.knn.templates_per_class);
}

std::vector<std::size_t> truth_of(const EventDataset& data, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> y;
    y.reserve(idx.size());
    for (const auto k : idx) y.push_back(data.events[k].label);
    return y;
}

void cmd_gen(const Globals& g, bool as_dataset, const std::string& raw_path) {
    const auto cfg = resolve(g);
    if (as_dataset) {
        emit(g, dataset_to_jsonl(dataset(cfg, "")));
        return;
    }
    const auto w = recording(cfg, "");
    if (!raw_path.empty()) {
        write_text_file(raw_path, raw_to_csv(quantize(w, cfg.pipeline.acquisition, cfg.pipeline.mode).raw));
    }
    emit(g, waveform_to_csv(w));
}

void cmd_features(const Globals& g, const std::string& input) {
    const auto cfg = resolve(g);
    const auto w = recording(cfg, input);
    const auto table = CycleTable::build(calibrate(w, cfg.pipeline.acquisition, cfg.pipeline.mode),
                                         cfg.pipeline.mains_frequency);
    emit(g, frame_features_to_csv(frame_features(table, cfg.pipeline.acquisition.frame_span,
                                                 cfg.pipeline.mains_frequency)));
}

void cmd_events(const Globals& g, const std::string& input, const std::string& table_path) {
    const auto cfg = resolve(g);
    const auto ex = extract_events(recording(cfg, input), cfg.pipeline);
    for (const auto& d : ex.dropped) {
        std::cerr << "dropped event at cycle " << d.j << ": " << d.message << '\n';
    }
    if (!table_path.empty()) {
        if (ex.events.empty()) throw DomainError("no event to dump a DTW table for");
        const auto& cs = ex.events.front().cycles;
        std::ostringstream os;
        dtw_table(cs.post(0), cs.pre(0), cfg.pipeline.dtw).write_csv(os);
        write_text_file(table_path, os.str());
    }
    emit(g, events_to_jsonl(ex.events));
}

void cmd_train(const Globals& g, const std::string& data_path) {
    const auto cfg = resolve(g);
    const auto data = dataset(cfg, data_path);
    const auto split = split_of(cfg, data);
    const auto train_set = to_examples(data.events, split.train);
    auto model = MobileMiniModel::create(
        ArchSpec::mobile_mini(feature_size(cfg.pipeline.mode), data.class_names.size()), cfg.train.seed);
    fit_standardization(model, train_set);
    const auto result = train(model, train_set, cfg.train);
    const auto val = evaluate(predict_labels(result.model, data.events, split.val),
                              truth_of(data, split.val), data.class_names.size());
    std::cerr << "final training loss " << result.loss_history.back() << ", validation accuracy "
              << val.accuracy << '\n';
    emit(g, save_model_json(result.model));
}

void cmd_classify(const Globals& g, const std::string& model_path, bool knn,
                  const std::string& input, const std::string& data_path) {
    const auto cfg = resolve(g);
    const auto w = recording(cfg, input);
    std::vector<Prediction> preds;
    if (knn) {
        const auto data = dataset(cfg, data_path);
        const auto lib = knn_library(cfg, data, split_of(cfg, data));
        preds = run_pipeline(w, cfg.pipeline, lib, cfg.knn.k, data.class_names.size(), cfg.knn.dtw);
    } else {
        preds = run_pipeline(w, cfg.pipeline, read_model(model_path, cfg));
    }
    emit(g, predictions_to_json(preds, cfg.class_names()));
}

void cmd_eval(const Globals& g, const std::string& model_path, bool knn, const std::string& data_path) {
    const auto cfg = resolve(g);
    const auto data = dataset(cfg, data_path);
    const auto split = split_of(cfg, data);
    const auto truth = truth_of(data, split.test);
    std::vector<std::size_t> pred;
    if (knn) {
        const auto lib = knn_library(cfg, data, split);
        for (const auto k : split.test) {
            pred.push_back(knn_dtw_classify(data.events[k].load_cycle, lib, cfg.knn.k,
                                            data.class_names.size(), cfg.knn.dtw)
                               .label);
        }
    } else {
        pred = predict_labels(read_model(model_path, cfg), data.events, split.test);
    }
    emit(g, metrics_to_json(evaluate(pred, truth, data.class_names.size())));
}

void cmd_bench(const Globals& g, std::size_t reps) {
    const auto cfg = resolve(g);
    const auto report = run_bench(cfg.pipeline.acquisition, reps);
    std::cerr << bench_table(report);
    emit(g, bench_to_json(report));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge NILM reference pipeline: synthesis, features, events, training, evaluation"};
    app.footer(kSchemas);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Override the configuration seed");
    app.add_option("--mode", g.mode, "Detection and feature mode")
        ->check(CLI::IsMember({"power", "current"}));
    app.add_option("--out", g.out, "Output file (default: stdout)");

    auto* gen = app.add_subcommand("gen", "Synthesize the configured recording as waveform CSV");
    bool gen_dataset = false;
    std::string raw_path;
    gen->add_flag("--dataset", gen_dataset, "Write the labeled event dataset (JSONL) instead");
    gen->add_option("--raw", raw_path, "Also write the quantized ADC counts as CSV");

    std::string input, table_path, data_path, model_path;
    bool knn = false;
    std::size_t reps = 10000;

    auto* features = app.add_subcommand("features", "Per-frame power and harmonic features (CSV)");
    features->add_option("--input", input, "Waveform CSV (default: synthesize from config)");

    auto* events = app.add_subcommand("events", "Detected events with composite features (JSONL)");
    events->add_option("--input", input, "Waveform CSV (default: synthesize from config)");
    events->add_option("--dtw-table", table_path,
                       "Dump the DTW cost table of the first event's j+1 vs j cycles as CSV");

    auto* train_cmd = app.add_subcommand("train", "Train the MobileMini classifier (model JSON)");
    train_cmd->add_option("--data", data_path, "Dataset JSONL (default: generate from config)");

    auto* classify = app.add_subcommand("classify", "Classify the events of a recording (JSON)");
    auto* classify_model = classify->add_option("--model", model_path, "Model JSON");
    auto* classify_knn = classify->add_flag("--knn", knn, "Use DTW k-NN instead of the network");
    classify_model->excludes(classify_knn);
    classify->add_option("--input", input, "Waveform CSV (default: synthesize from config)");
    classify->add_option("--data", data_path, "Dataset JSONL for the k-NN templates");

    auto* eval = app.add_subcommand("eval", "Held-out metrics on the dataset's test split (JSON)");
    auto* eval_model = eval->add_option("--model", model_path, "Model JSON");
    auto* eval_knn = eval->add_flag("--knn", knn, "Evaluate DTW k-NN instead of the network");
    eval_model->excludes(eval_knn);
    eval->add_option("--data", data_path, "Dataset JSONL (default: generate from config)");

    auto* bench = app.add_subcommand("bench", "Per-frame timing and table-memory report");
    bench->add_option("--reps", reps, "Timed repetitions per stage")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if ((classify->parsed() || eval->parsed()) && model_path.empty() && !knn) {
        std::cerr << "either --model or --knn is required\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed()) cmd_gen(g, gen_dataset, raw_path);
        else if (features->parsed()) cmd_features(g, input);
        else if (events->parsed()) cmd_events(g, input, table_path);
        else if (train_cmd->parsed()) cmd_train(g, data_path);
        else if (classify->parsed()) cmd_classify(g, model_path, knn, input, data_path);
        else if (eval->parsed()) cmd_eval(g, model_path, knn, data_path);
        else if (bench->parsed()) cmd_bench(g, reps);
    } catch (const PipelineError& e) {
        std::cerr << "error in " << e.stage() << " stage: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
