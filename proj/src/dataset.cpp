#include "edgenilm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "edgenilm/error.hpp"

namespace edgenilm {

std::vector<SwitchTruth> schedule_switches(const Schedule& schedule) {
    const double f0 = schedule.mains.frequency;
    std::vector<SwitchTruth> out;
    for (const auto& e : schedule.entries) {
        const auto on = static_cast<std::size_t>(std::llround(snap_to_zero_crossing(e.t_on, f0) * f0));
        if (on > 0) out.push_back({on, e.id, Direction::on});
        if (e.t_off < schedule.duration) {
            const auto off =
                static_cast<std::size_t>(std::llround(snap_to_zero_crossing(e.t_off, f0) * f0));
            out.push_back({off, e.id, Direction::off});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const SwitchTruth& a, const SwitchTruth& b) { return a.cycle < b.cycle; });
    return out;
}

EventMatch match_events(const std::vector<EventMark>& marks,
                        const std::vector<SwitchTruth>& truths, std::size_t tolerance) {
    EventMatch m;
    std::vector<bool> used(truths.size(), false);
    for (std::size_t e = 0; e < marks.size(); ++e) {
        const auto first_new = static_cast<long>(marks[e].j) + 1;
        std::size_t best = truths.size();
        long best_gap = 0;
        for (std::size_t t = 0; t < truths.size(); ++t) {
            if (used[t] || truths[t].direction != marks[e].direction) continue;
            const long gap = std::labs(first_new - static_cast<long>(truths[t].cycle));
            if (gap > static_cast<long>(tolerance)) continue;
            if (best == truths.size() || gap < best_gap) {
                best = t;
                best_gap = gap;
            }
        }
        if (best == truths.size()) {
            m.spurious.push_back(e);
        } else {
            used[best] = true;
            m.matched.emplace_back(e, best);
        }
    }
    for (std::size_t t = 0; t < truths.size(); ++t) {
        if (!used[t]) m.missed.push_back(t);
    }
    return m;
}

ApplianceModel jitter_model(const ApplianceModel& model, double amount, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> spread(1.0 - amount, 1.0 + amount);
    std::uniform_real_distribution<double> shift(-amount, amount);
    ApplianceModel m = model;
    m.rated_power *= spread(rng);
    m.power_factor = std::clamp(m.power_factor * (1.0 + 0.25 * shift(rng)), 0.05, 1.0);
    for (auto& h : m.harmonics) {
        h.rel_amplitude = std::clamp(h.rel_amplitude * spread(rng), 0.0, 1.0);
        h.phase += shift(rng);
    }
    m.inrush_ratio = 1.0 + (m.inrush_ratio - 1.0) * spread(rng);
    m.inrush_decay *= spread(rng);
    return m;
}

std::vector<std::size_t> EventDataset::labels() const {
    std::vector<std::size_t> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.label);
    return out;
}

EventDataset make_event_dataset(const std::vector<ApplianceModel>& appliances,
                                const DatasetConfig& dataset, const PipelineConfig& pipeline,
                                std::uint64_t seed) {
    if (appliances.size() < 2) throw ConfigError("need at least two appliance classes");
    EventDataset out;
    for (const auto& a : appliances) out.class_names.push_back(a.id);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double fs = pipeline.fs();

    for (std::size_t cls = 0; cls < appliances.size(); ++cls) {
        std::size_t collected = 0;
        std::size_t attempts = 0;
        while (collected < dataset.events_per_class) {
            if (++attempts > 4 * dataset.events_per_class + 16) {
                throw ConfigError("dataset generation for '" + appliances[cls].id +
                                  "' keeps failing to detect its switches");
            }
            ApplianceModel target = jitter_model(appliances[cls], dataset.jitter, rng);
            if (!dataset.noise) target.current_noise_sigma = 0.0;
            std::vector<ApplianceModel> models{target};

            Schedule s;
            s.mains.frequency = pipeline.mains_frequency;
            const double t_on = 0.55 + 0.2 * unit(rng);
            const double t_off = t_on + 0.95 + 0.3 * unit(rng);
            s.duration = t_off + 0.65;
            s.entries.push_back({target.id, t_on, t_off, false});

            if (unit(rng) < dataset.background_probability) {
                std::size_t other = static_cast<std::size_t>(unit(rng) * (appliances.size() - 1));
                if (other >= cls) ++other;
                ApplianceModel bg = jitter_model(appliances[other], dataset.jitter, rng);
                if (!dataset.noise) bg.current_noise_sigma = 0.0;
                models.push_back(bg);
                s.entries.push_back({bg.id, 0.0, s.duration, true});
            }

            const auto wave = synth_scenario(models, s, fs, rng());
            const auto extraction = extract_events(wave, pipeline);
            std::vector<EventMark> marks;
            for (const auto& ev : extraction.events) marks.push_back(ev.mark);
            const auto truths = schedule_switches(s);
            const auto match = match_events(marks, truths);
            for (const auto& [e, t] : match.matched) {
                if (collected == dataset.events_per_class) break;
                if (truths[t].id != target.id) continue;
                const auto& ev = extraction.events[e];
                out.events.push_back({ev.feature, ev.load_cycle, cls});
                ++collected;
            }
        }
    }
    return out;
}

std::vector<OverlapScenario> make_overlap_scenarios(const std::vector<ApplianceModel>& appliances,
                                                    std::size_t count, double jitter, bool noise,
                                                    std::uint64_t seed) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < appliances.size(); ++a) {
        for (std::size_t b = a + 1; b < appliances.size(); ++b) pairs.emplace_back(a, b);
    }
    if (pairs.empty()) throw ConfigError("need at least two appliances for overlap scenarios");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto gap = [&] { return 1.0 + 0.3 * unit(rng); };

    std::vector<OverlapScenario> out;
    for (std::size_t s = 0; s < count; ++s) {
        auto [a, b] = pairs[s % pairs.size()];
        if (unit(rng) < 0.5) std::swap(a, b);
        OverlapScenario sc;
        sc.first = appliances[a].id;
        sc.second = appliances[b].id;
        for (const auto idx : {a, b}) {
            ApplianceModel m = jitter_model(appliances[idx], jitter, rng);
            if (!noise) m.current_noise_sigma = 0.0;
            sc.models.push_back(m);
        }
        const double t1 = 0.6 + 0.2 * unit(rng);
        const double t2 = t1 + gap();
        const double t3 = t2 + gap();
        const double t4 = t3 + gap();
        const bool nested = unit(rng) < 0.5;
        sc.schedule.entries.push_back({sc.first, t1, nested ? t4 : t3, false});
        sc.schedule.entries.push_back({sc.second, t2, nested ? t3 : t4, false});
        sc.schedule.duration = t4 + 0.7;
        out.push_back(std::move(sc));
    }
    return out;
}

std::string dataset_to_jsonl(const EventDataset& data) {
    std::ostringstream os;
    for (const auto& e : data.events) {
        nlohmann::ordered_json j;
        j["j"] = e.feature.mark.j;
        j["dir"] = to_string(e.feature.mark.direction);
        j["delta"] = e.feature.mark.delta;
        j["feature"] = e.feature.values;
        j["label"] = data.class_names.at(e.label);
        j["load_cycle"] = e.load_cycle;
        os << j.dump() << '\n';
    }
    return os.str();
}

EventDataset dataset_from_jsonl(const std::string& text, std::vector<std::string> class_names) {
    EventDataset data;
    data.class_names = std::move(class_names);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledEvent e;
            e.feature.mark.j = j.at("j").get<std::size_t>();
            e.feature.mark.direction = direction_from_string(j.at("dir").get<std::string>());
            e.feature.mark.delta = j.at("delta").get<double>();
            e.feature.values = j.at("feature").get<std::vector<double>>();
            e.feature.mode = e.feature.values.size() == kCurrentFeatureSize ? Mode::current : Mode::power;
            if (j.contains("load_cycle")) e.load_cycle = j.at("load_cycle").get<std::vector<double>>();
            const auto name = j.at("label").get<std::string>();
            const auto it = std::find(data.class_names.begin(), data.class_names.end(), name);
            if (it == data.class_names.end()) throw ConfigError("unknown label '" + name + "'");
            e.label = static_cast<std::size_t>(it - data.class_names.begin());
            data.events.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("dataset line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return data;
}

}  // namespace edgenilm
