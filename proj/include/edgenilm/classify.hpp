#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgenilm/config.hpp"
#include "edgenilm/dtw.hpp"
#include "edgenilm/events.hpp"
#include "edgenilm/neuralnet.hpp"

namespace edgenilm {

/// One classified training/test example: an event's composite feature and
/// the steady-state current cycle of the switched load.
struct LabeledEvent {
    FeatureVector feature;
    std::vector<double> load_cycle;
    std::size_t label = 0;
};

/// Index partition of a dataset.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Stratified, seeded split. Per class, round(r_train * n) go to train,
/// round(r_val * n) to validation and the rest to test. Throws
/// StratificationError for a class with fewer than 10 examples.
Split split_dataset(std::span<const std::size_t> labels, std::array<double, 3> ratios,
                    std::uint64_t seed);

/// Labeled reference cycles for DTW nearest-neighbour matching.
class TemplateLibrary {
public:
    void add(std::size_t label, std::vector<double> cycle);
    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t class_count() const;
    /// Templates of the sparsest label that has any.
    std::size_t min_class_size() const;
    std::span<const double> cycle(std::size_t k) const { return cycles_[k]; }
    std::size_t label(std::size_t k) const { return labels_[k]; }

private:
    std::vector<std::vector<double>> cycles_;
    std::vector<std::size_t> labels_;
};

/// Up to `per_class` templates of each label, taken in index order.
TemplateLibrary build_library(std::span<const LabeledEvent> data,
                              std::span<const std::size_t> indices, std::size_t per_class);

struct KnnResult {
    std::size_t label = 0;
    std::vector<double> neighbor_distances;  // ascending
    std::vector<std::size_t> neighbor_labels;
    std::vector<double> votes;               // vote fraction per class
};

/// Majority vote over the k nearest templates by DTW distance; a tie goes
/// to the label whose tied neighbours have the smaller mean distance.
KnnResult knn_dtw_classify(std::span<const double> query, const TemplateLibrary& lib,
                           std::size_t k, std::size_t classes, const DtwOptions& dtw = {});

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;  // macro
    double recall = 0.0;     // macro
    double f1 = 0.0;         // macro over per-class F1
    std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
    std::vector<double> class_precision, class_recall, class_f1;
};

Metrics evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> truth,
                 std::size_t classes);

/// `{accuracy, precision_macro, recall_macro, f1_macro, confusion}`.
std::string metrics_to_json(const Metrics& m);

/// Events dropped while cutting windows, with the reason.
struct Diagnostic {
    std::size_t j = 0;
    std::string message;
};

struct EventExtraction {
    std::vector<EventRecord> events;
    std::vector<Diagnostic> dropped;
    std::size_t cycles = 0;
};

/// acquisition -> cycles -> detection -> windows/features/DTW.
EventExtraction extract_events(const WaveformPair& wave, const PipelineConfig& cfg);

struct Prediction {
    EventMark mark;
    std::size_t label = 0;
    std::vector<double> probabilities;
    std::vector<double> feature;
};

/// End to end: one prediction per detected event with a full window.
/// Errors are rethrown as PipelineError tagged with the failing stage.
std::vector<Prediction> run_pipeline(const WaveformPair& wave, const PipelineConfig& cfg,
                                     const MobileMiniModel& model);
std::vector<Prediction> run_pipeline(const WaveformPair& wave, const PipelineConfig& cfg,
                                     const TemplateLibrary& lib, std::size_t k,
                                     std::size_t classes, const DtwOptions& dtw = {});

/// Model input rows for a subset of a dataset.
std::vector<Example> to_examples(std::span<const LabeledEvent> data,
                                 std::span<const std::size_t> indices);

std::vector<std::size_t> predict_labels(const MobileMiniModel& model,
                                        std::span<const LabeledEvent> data,
                                        std::span<const std::size_t> indices);

}  // namespace edgenilm
