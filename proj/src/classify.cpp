#include "edgenilm/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

#include "edgenilm/error.hpp"

namespace edgenilm {

Split split_dataset(std::span<const std::size_t> labels, std::array<double, 3> ratios,
                    std::uint64_t seed) {
    if (labels.empty()) throw DomainError("cannot split an empty dataset");
    for (const double r : ratios) {
        if (r < 0.0) throw ConfigError("split ratios must be non-negative");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw ConfigError("split ratios must sum to 1");
    }

    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t k = 0; k < labels.size(); ++k) by_class[labels[k]].push_back(k);

    std::mt19937_64 rng(seed);
    Split s;
    for (auto& [label, idx] : by_class) {
        if (idx.size() < 10) {
            throw StratificationError("class " + std::to_string(label) + " has only " +
                                      std::to_string(idx.size()) + " examples (need >= 10)");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n = static_cast<double>(idx.size());
        const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * n));
        const auto n_val = std::min(idx.size() - n_train,
                                    static_cast<std::size_t>(std::llround(ratios[1] * n)));
        s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.val.insert(s.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                     idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    }
    return s;
}

void TemplateLibrary::add(std::size_t label, std::vector<double> cycle) {
    if (cycle.empty()) throw DomainError("template cycle must not be empty");
    labels_.push_back(label);
    cycles_.push_back(std::move(cycle));
}

std::size_t TemplateLibrary::class_count() const {
    std::size_t top = 0;
    for (const auto l : labels_) top = std::max(top, l + 1);
    return top;
}

std::size_t TemplateLibrary::min_class_size() const {
    std::map<std::size_t, std::size_t> counts;
    for (const auto l : labels_) ++counts[l];
    std::size_t smallest = 0;
    for (const auto& [label, n] : counts) smallest = smallest == 0 ? n : std::min(smallest, n);
    return smallest;
}

TemplateLibrary build_library(std::span<const LabeledEvent> data,
                              std::span<const std::size_t> indices, std::size_t per_class) {
    TemplateLibrary lib;
    std::map<std::size_t, std::size_t> taken;
    for (const auto k : indices) {
        const auto& e = data[k];
        if (taken[e.label] >= per_class) continue;
        ++taken[e.label];
        lib.add(e.label, e.load_cycle);
    }
    return lib;
}

KnnResult knn_dtw_classify(std::span<const double> query, const TemplateLibrary& lib,
                           std::size_t k, std::size_t classes, const DtwOptions& dtw) {
    if (lib.empty()) throw DomainError("template library is empty");
    if (k == 0 || k > lib.min_class_size()) {
        throw DomainError("k must lie in [1, smallest class template count]");
    }
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(lib.size());
    for (std::size_t t = 0; t < lib.size(); ++t) {
        scored.emplace_back(dtw_cost(query, lib.cycle(t), dtw), t);
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());

    KnnResult r;
    const std::size_t width = std::max(classes, lib.class_count());
    std::vector<std::size_t> count(width, 0);
    std::vector<double> dist_sum(width, 0.0);
    for (std::size_t n = 0; n < k; ++n) {
        const auto [d, t] = scored[n];
        const std::size_t label = lib.label(t);
        r.neighbor_distances.push_back(d);
        r.neighbor_labels.push_back(label);
        ++count[label];
        dist_sum[label] += d;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < width; ++c) {
        if (count[c] > count[best] ||
            (count[c] == count[best] && count[c] > 0 &&
             dist_sum[c] / count[c] < dist_sum[best] / count[best])) {
            best = c;
        }
    }
    r.label = best;
    r.votes.resize(width);
    for (std::size_t c = 0; c < width; ++c) r.votes[c] = static_cast<double>(count[c]) / k;
    return r;
}

Metrics evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> truth,
                 std::size_t classes) {
    if (predictions.empty()) throw DomainError("nothing to evaluate");
    if (predictions.size() != truth.size()) throw DomainError("prediction and truth lengths differ");
    Metrics m;
    m.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k] >= classes || predictions[k] >= classes) {
            throw DomainError("label outside [0, classes)");
        }
        ++m.confusion[truth[k]][predictions[k]];
    }
    std::size_t diag = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        diag += m.confusion[c][c];
        std::size_t predicted = 0, actual = 0;
        for (std::size_t o = 0; o < classes; ++o) {
            predicted += m.confusion[o][c];
            actual += m.confusion[c][o];
        }
        const double tp = static_cast<double>(m.confusion[c][c]);
        const double p = predicted ? tp / static_cast<double>(predicted) : 0.0;
        const double r = actual ? tp / static_cast<double>(actual) : 0.0;
        m.class_precision.push_back(p);
        m.class_recall.push_back(r);
        m.class_f1.push_back(p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0);
    }
    const double n = static_cast<double>(classes);
    m.accuracy = static_cast<double>(diag) / static_cast<double>(truth.size());
    m.precision = std::accumulate(m.class_precision.begin(), m.class_precision.end(), 0.0) / n;
    m.recall = std::accumulate(m.class_recall.begin(), m.class_recall.end(), 0.0) / n;
    m.f1 = std::accumulate(m.class_f1.begin(), m.class_f1.end(), 0.0) / n;
    return m;
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["precision_macro"] = m.precision;
    j["recall_macro"] = m.recall;
    j["f1_macro"] = m.f1;
    j["confusion"] = m.confusion;
    return j.dump(2) + "\n";
}

EventExtraction extract_events(const WaveformPair& wave, const PipelineConfig& cfg) {
    EventExtraction out;
    CycleTable table;
    try {
        table = CycleTable::build(calibrate(wave, cfg.acquisition, cfg.mode), cfg.mains_frequency);
    } catch (const Error& e) {
        throw PipelineError("acquisition", e.what());
    }
    out.cycles = table.size();

    std::vector<EventMark> marks;
    try {
        DetectorConfig det = cfg.detector;
        det.mode = cfg.mode;
        const auto levels = cfg.mode == Mode::power ? table.power_series() : table.irms_series();
        marks = detect_events(levels, det);
    } catch (const Error& e) {
        throw PipelineError("events", e.what());
    }

    for (const auto& mark : marks) {
        try {
            out.events.push_back(analyze_event(table, mark, cfg.mode, cfg.dtw, cfg.mains_frequency));
        } catch (const WindowError& e) {
            out.dropped.push_back({mark.j, e.what()});
        } catch (const Error& e) {
            throw PipelineError("features", e.what());
        }
    }
    return out;
}

std::vector<Prediction> run_pipeline(const WaveformPair& wave, const PipelineConfig& cfg,
                                     const MobileMiniModel& model) {
    const auto extraction = extract_events(wave, cfg);
    std::vector<Prediction> preds;
    for (const auto& ev : extraction.events) {
        Prediction p;
        p.mark = ev.mark;
        p.feature = ev.feature.values;
        try {
            p.probabilities = forward(model, ev.feature.values);
        } catch (const Error& e) {
            throw PipelineError("classify", e.what());
        }
        p.label = static_cast<std::size_t>(
            std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
        preds.push_back(std::move(p));
    }
    return preds;
}

std::vector<Prediction> run_pipeline(const WaveformPair& wave, const PipelineConfig& cfg,
                                     const TemplateLibrary& lib, std::size_t k,
                                     std::size_t classes, const DtwOptions& dtw) {
    const auto extraction = extract_events(wave, cfg);
    std::vector<Prediction> preds;
    for (const auto& ev : extraction.events) {
        Prediction p;
        p.mark = ev.mark;
        p.feature = ev.feature.values;
        try {
            const auto r = knn_dtw_classify(ev.load_cycle, lib, k, classes, dtw);
            p.label = r.label;
            p.probabilities = r.votes;
        } catch (const Error& e) {
            throw PipelineError("classify", e.what());
        }
        preds.push_back(std::move(p));
    }
    return preds;
}

std::vector<Example> to_examples(std::span<const LabeledEvent> data,
                                 std::span<const std::size_t> indices) {
    std::vector<Example> out;
    out.reserve(indices.size());
    for (const auto k : indices) out.push_back({data[k].feature.values, data[k].label});
    return out;
}

std::vector<std::size_t> predict_labels(const MobileMiniModel& model,
                                        std::span<const LabeledEvent> data,
                                        std::span<const std::size_t> indices) {
    std::vector<std::size_t> out;
    out.reserve(indices.size());
    for (const auto k : indices) {
        const auto p = forward(model, data[k].feature.values);
        out.push_back(static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()));
    }
    return out;
}

}  // namespace edgenilm
