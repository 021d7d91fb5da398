#include "edgenilm/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edgenilm/error.hpp"

namespace edgenilm {

using nlohmann::json;

void PipelineConfig::set_mode(Mode m) {
    mode = m;
    detector.mode = m;
    detector.threshold = m == Mode::power ? power_threshold : current_threshold;
}

std::vector<std::string> Config::class_names() const {
    std::vector<std::string> names;
    for (const auto& a : appliances) names.push_back(a.id);
    return names;
}

Config default_config() {
    Config cfg;
    cfg.appliances = default_presets();
    cfg.schedule.duration = 5.0;
    cfg.schedule.entries = {{"lamp", 1.0, 3.5, false}};
    cfg.pipeline.set_mode(Mode::power);
    return cfg;
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_dtw(const json& j, DtwOptions& d) {
    if (j.contains("cost")) {
        const auto c = j.at("cost").get<std::string>();
        if (c == "absolute") d.cost = LocalCost::absolute;
        else if (c == "squared") d.cost = LocalCost::squared;
        else throw ConfigError("unknown DTW cost '" + c + "'");
    }
    if (j.contains("band")) {
        if (j.at("band").is_null()) d.band.reset();
        else d.band = j.at("band").get<std::size_t>();
    }
}

json write_dtw(const DtwOptions& d) {
    json j = {{"cost", d.cost == LocalCost::absolute ? "absolute" : "squared"}};
    j["band"] = d.band ? json(*d.band) : json(nullptr);
    return j;
}

ApplianceModel read_appliance(const json& j) {
    ApplianceModel m;
    m.id = j.at("id").get<std::string>();
    m.kind = load_kind_from_string(j.value("kind", std::string("resistive")));
    m.rated_power = j.at("rated_power").get<double>();
    maybe(j, "power_factor", m.power_factor);
    if (j.contains("harmonics")) {
        for (const auto& h : j.at("harmonics")) {
            m.harmonics.push_back({h.at("order").get<int>(), h.at("amplitude").get<double>(),
                                   h.value("phase", 0.0)});
        }
    }
    maybe(j, "inrush_ratio", m.inrush_ratio);
    maybe(j, "inrush_decay", m.inrush_decay);
    maybe(j, "current_noise_sigma", m.current_noise_sigma);
    m.validate();
    return m;
}

json write_appliance(const ApplianceModel& m) {
    json h = json::array();
    for (const auto& x : m.harmonics) {
        h.push_back({{"order", x.order}, {"amplitude", x.rel_amplitude}, {"phase", x.phase}});
    }
    return {{"id", m.id},
            {"kind", to_string(m.kind)},
            {"rated_power", m.rated_power},
            {"power_factor", m.power_factor},
            {"harmonics", h},
            {"inrush_ratio", m.inrush_ratio},
            {"inrush_decay", m.inrush_decay},
            {"current_noise_sigma", m.current_noise_sigma}};
}

}  // namespace

Config config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config does not parse: ") + e.what());
    }
    Config cfg = default_config();
    try {
        maybe(doc, "seed", cfg.seed);
        if (doc.contains("mains")) {
            maybe(doc["mains"], "frequency", cfg.schedule.mains.frequency);
            maybe(doc["mains"], "rms_voltage", cfg.schedule.mains.rms_voltage);
            cfg.pipeline.mains_frequency = cfg.schedule.mains.frequency;
        }
        if (doc.contains("appliances")) {
            cfg.appliances.clear();
            for (const auto& a : doc.at("appliances")) cfg.appliances.push_back(read_appliance(a));
        }
        if (doc.contains("schedule")) {
            const auto& s = doc.at("schedule");
            maybe(s, "duration", cfg.schedule.duration);
            maybe(s, "sensor_noise_sigma", cfg.schedule.sensor_noise_sigma);
            if (s.contains("entries")) {
                cfg.schedule.entries.clear();
                for (const auto& e : s.at("entries")) {
                    cfg.schedule.entries.push_back({e.at("id").get<std::string>(),
                                                    e.at("t_on").get<double>(),
                                                    e.at("t_off").get<double>(),
                                                    e.value("steady", false)});
                }
            }
        }
        if (doc.contains("acquisition")) {
            const auto& a = doc.at("acquisition");
            auto& q = cfg.pipeline.acquisition;
            maybe(a, "f_adc_clock", q.f_adc_clock);
            maybe(a, "adc_prescaler", q.adc_prescaler);
            maybe(a, "sampling_cycles", q.sampling_cycles);
            maybe(a, "adc_bits", q.adc_bits);
            maybe(a, "full_scale_v", q.full_scale_v);
            maybe(a, "full_scale_i", q.full_scale_i);
            q.set_ideal_calibration();
            maybe(a, "gain_v", q.gain_v);
            maybe(a, "offset_v", q.offset_v);
            maybe(a, "gain_i", q.gain_i);
            maybe(a, "offset_i", q.offset_i);
            maybe(a, "frame_span", q.frame_span);
            q.validate();
        }
        Mode mode = Mode::power;
        if (doc.contains("mode")) mode = mode_from_string(doc.at("mode").get<std::string>());
        if (doc.contains("detector")) {
            const auto& d = doc.at("detector");
            maybe(d, "power_threshold", cfg.pipeline.power_threshold);
            maybe(d, "current_threshold", cfg.pipeline.current_threshold);
            maybe(d, "refractory", cfg.pipeline.detector.refractory);
            maybe(d, "debounce", cfg.pipeline.detector.debounce);
        }
        cfg.pipeline.set_mode(mode);
        cfg.pipeline.detector.validate();
        if (doc.contains("dtw")) read_dtw(doc.at("dtw"), cfg.pipeline.dtw);
        if (doc.contains("dataset")) {
            const auto& d = doc.at("dataset");
            maybe(d, "events_per_class", cfg.dataset.events_per_class);
            maybe(d, "jitter", cfg.dataset.jitter);
            maybe(d, "split", cfg.dataset.split);
            maybe(d, "background_probability", cfg.dataset.background_probability);
            maybe(d, "noise", cfg.dataset.noise);
        }
        if (doc.contains("train")) {
            const auto& t = doc.at("train");
            maybe(t, "learning_rate", cfg.train.learning_rate);
            maybe(t, "epochs", cfg.train.epochs);
            maybe(t, "batch_size", cfg.train.batch_size);
            maybe(t, "seed", cfg.train.seed);
            maybe(t, "weight_init", cfg.train.weight_init);
            cfg.train.validate();
        }
        if (doc.contains("knn")) {
            const auto& k = doc.at("knn");
            maybe(k, "k", cfg.knn.k);
            maybe(k, "templates_per_class", cfg.knn.templates_per_class);
            if (k.contains("dtw")) read_dtw(k.at("dtw"), cfg.knn.dtw);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.schedule.validate();
    return cfg;
}

std::string config_to_json(const Config& cfg) {
    json apps = json::array();
    for (const auto& a : cfg.appliances) apps.push_back(write_appliance(a));
    json entries = json::array();
    for (const auto& e : cfg.schedule.entries) {
        entries.push_back({{"id", e.id}, {"t_on", e.t_on}, {"t_off", e.t_off}, {"steady", e.steady}});
    }
    const auto& q = cfg.pipeline.acquisition;
    json doc = {
        {"seed", cfg.seed},
        {"mode", to_string(cfg.pipeline.mode)},
        {"mains", {{"frequency", cfg.schedule.mains.frequency}, {"rms_voltage", cfg.schedule.mains.rms_voltage}}},
        {"appliances", apps},
        {"schedule", {{"duration", cfg.schedule.duration},
                      {"sensor_noise_sigma", cfg.schedule.sensor_noise_sigma},
                      {"entries", entries}}},
        {"acquisition", {{"f_adc_clock", q.f_adc_clock}, {"adc_prescaler", q.adc_prescaler},
                         {"sampling_cycles", q.sampling_cycles}, {"adc_bits", q.adc_bits},
                         {"full_scale_v", q.full_scale_v}, {"full_scale_i", q.full_scale_i},
                         {"gain_v", q.gain_v}, {"offset_v", q.offset_v},
                         {"gain_i", q.gain_i}, {"offset_i", q.offset_i},
                         {"frame_span", q.frame_span}}},
        {"detector", {{"power_threshold", cfg.pipeline.power_threshold},
                      {"current_threshold", cfg.pipeline.current_threshold},
                      {"refractory", cfg.pipeline.detector.refractory},
                      {"debounce", cfg.pipeline.detector.debounce}}},
        {"dtw", write_dtw(cfg.pipeline.dtw)},
        {"dataset", {{"events_per_class", cfg.dataset.events_per_class},
                     {"jitter", cfg.dataset.jitter},
                     {"split", cfg.dataset.split},
                     {"background_probability", cfg.dataset.background_probability},
                     {"noise", cfg.dataset.noise}}},
        {"train", {{"learning_rate", cfg.train.learning_rate}, {"epochs", cfg.train.epochs},
                   {"batch_size", cfg.train.batch_size}, {"seed", cfg.train.seed},
                   {"weight_init", cfg.train.weight_init}}},
        {"knn", {{"k", cfg.knn.k}, {"templates_per_class", cfg.knn.templates_per_class},
                 {"dtw", write_dtw(cfg.knn.dtw)}}},
    };
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

Config load_config(const std::string& path) { return config_from_json(read_text_file(path)); }

}  // namespace edgenilm
