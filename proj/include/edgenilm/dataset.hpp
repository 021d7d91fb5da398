#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edgenilm/classify.hpp"
#include "edgenilm/config.hpp"

namespace edgenilm {

/// A scheduled switch expressed on the cycle grid: `cycle` is the first
/// whole cycle drawing the new load, i.e. the detector should report
/// j = cycle - 1.
struct SwitchTruth {
    std::size_t cycle = 0;
    std::string id;
    Direction direction = Direction::on;
};

std::vector<SwitchTruth> schedule_switches(const Schedule& schedule);

struct EventMatch {
    /// (event index, truth index) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> matched;
    std::vector<std::size_t> spurious;  // unmatched events
    std::vector<std::size_t> missed;    // unmatched truths
};

/// Greedy one-to-one matching of detected marks to scheduled switches with
/// |(j + 1) - cycle| <= tolerance and the same direction.
EventMatch match_events(const std::vector<EventMark>& marks,
                        const std::vector<SwitchTruth>& truths, std::size_t tolerance = 1);

/// Copy of `model` with rated power, power factor, harmonic content and
/// inrush scaled by independent factors drawn from 1 +- `amount`.
ApplianceModel jitter_model(const ApplianceModel& model, double amount, std::mt19937_64& rng);

struct EventDataset {
    std::vector<std::string> class_names;
    std::vector<LabeledEvent> events;

    std::vector<std::size_t> labels() const;
};

/// `events_per_class` labeled events per appliance, each recording holding
/// one on and one off switch of a jittered preset (plus, with probability
/// `background_probability`, another appliance running steadily).
EventDataset make_event_dataset(const std::vector<ApplianceModel>& appliances,
                                const DatasetConfig& dataset, const PipelineConfig& pipeline,
                                std::uint64_t seed);

struct OverlapScenario {
    std::vector<ApplianceModel> models;  // the two appliances, jittered
    Schedule schedule;
    std::string first;
    std::string second;
};

/// Two-appliance scenarios with overlapping on-periods, cycling through
/// every unordered pair of `appliances`. Switches are at least 1 s apart.
std::vector<OverlapScenario> make_overlap_scenarios(const std::vector<ApplianceModel>& appliances,
                                                    std::size_t count, double jitter, bool noise,
                                                    std::uint64_t seed);

/// Writes and reads the JSON-lines event dataset (one object per event:
/// j, dir, delta, feature, label, load_cycle).
std::string dataset_to_jsonl(const EventDataset& data);
EventDataset dataset_from_jsonl(const std::string& text, std::vector<std::string> class_names);

}  // namespace edgenilm
