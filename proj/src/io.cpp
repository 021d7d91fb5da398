#include "edgenilm/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "edgenilm/error.hpp"
#include "edgenilm/features.hpp"

namespace edgenilm {

std::string format_number(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string waveform_to_csv(const WaveformPair& wave) {
    std::string out = "t_s,v_V,i_A,labels\n";
    out.reserve(wave.size() * 40);
    const bool dual = !wave.v.empty();
    for (std::size_t k = 0; k < wave.size(); ++k) {
        out += format_number(static_cast<double>(k) / wave.fs);
        out += ',';
        if (dual) out += format_number(wave.v[k]);
        out += ',';
        out += format_number(wave.i[k]);
        out += ',';
        if (k < wave.labels.size()) {
            bool first = true;
            for (const auto& id : wave.active_ids(k)) {
                if (!first) out += '|';
                out += id;
                first = false;
            }
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return f;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("waveform line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return x;
}

}  // namespace

WaveformPair waveform_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("waveform CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,v_V,i_A,labels") throw ConfigError("unexpected waveform CSV header '" + line + "'");

    WaveformPair w;
    std::vector<double> t;
    std::vector<std::vector<std::string>> active;
    std::size_t line_no = 1;
    bool any_v = false, any_missing_v = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_fields(line);
        if (f.size() == 3) f.emplace_back();
        if (f.size() != 4) throw ConfigError("waveform line " + std::to_string(line_no) + ": expected 4 fields");
        t.push_back(parse_double(f[0], line_no));
        if (f[1].empty()) {
            any_missing_v = true;
        } else {
            any_v = true;
            w.v.push_back(parse_double(f[1], line_no));
        }
        w.i.push_back(parse_double(f[2], line_no));
        std::vector<std::string> ids;
        std::size_t start = 0;
        while (start < f[3].size()) {
            const auto bar = f[3].find('|', start);
            ids.push_back(f[3].substr(start, bar == std::string::npos ? std::string::npos : bar - start));
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        active.push_back(std::move(ids));
    }
    if (any_v && any_missing_v) throw ConfigError("waveform CSV mixes rows with and without voltage");
    if (t.size() < 2) throw ConfigError("waveform CSV needs at least two samples");
    w.fs = static_cast<double>(t.size() - 1) / (t.back() - t.front());
    if (!std::isfinite(w.fs) || w.fs <= 0.0) throw ConfigError("waveform time column is not increasing");
    // Snap to the rate implied by the first step when the two agree.
    const double first = 1.0 / (t[1] - t[0]);
    if (std::abs(first - w.fs) < 1e-6 * w.fs) w.fs = std::round(w.fs * 1e6) / 1e6;

    for (const auto& ids : active) {
        std::uint32_t mask = 0;
        for (const auto& id : ids) {
            std::size_t k = 0;
            while (k < w.label_names.size() && w.label_names[k] != id) ++k;
            if (k == w.label_names.size()) {
                if (k >= 32) throw ConfigError("waveform CSV names more than 32 appliances");
                w.label_names.push_back(id);
            }
            mask |= 1u << k;
        }
        w.labels.push_back(mask);
    }
    return w;
}

std::string raw_to_csv(const RawFrame& raw) {
    std::string out = "t_s,counts_v,counts_i\n";
    const bool dual = !raw.counts_v.empty();
    for (std::size_t k = 0; k < raw.counts_i.size(); ++k) {
        out += format_number(static_cast<double>(k) / raw.fs);
        out += ',';
        if (dual) out += std::to_string(raw.counts_v[k]);
        out += ',';
        out += std::to_string(raw.counts_i[k]);
        out += '\n';
    }
    return out;
}

std::vector<FrameFeatures> frame_features(const CycleTable& table, double frame_span, double f0) {
    const auto per_frame = static_cast<std::size_t>(std::llround(frame_span * f0));
    if (per_frame < kWindowCycles) throw ConfigError("frame span must cover at least four mains cycles");
    std::vector<FrameFeatures> rows;
    for (std::size_t f = 0; (f + 1) * per_frame <= table.size(); ++f) {
        const std::size_t c0 = f * per_frame;
        FrameFeatures row;
        row.frame = f;
        const auto i = table.current_run(c0, per_frame);
        if (table.has_voltage()) {
            row.power = power_features(table.voltage_run(c0, per_frame), i);
        } else {
            row.power = power_features({}, i);
        }
        row.harmonics = window_harmonics(table.current_run(c0, kWindowCycles), f0);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string frame_features_to_csv(const std::vector<FrameFeatures>& rows) {
    std::ostringstream os;
    os << "frame_idx,P_W,S_VA,Q_var";
    for (const int h : kOddOrders) os << ",h" << h << "_mag";
    for (const int h : kOddOrders) os << ",h" << h << "_phase";
    os << '\n';
    for (const auto& r : rows) {
        os << r.frame;
        if (r.power.has_power) {
            os << ',' << format_number(r.power.p) << ',' << format_number(r.power.s) << ','
               << format_number(r.power.q);
        } else {
            os << ",,,";
        }
        for (const double m : r.harmonics.magnitudes) os << ',' << format_number(m);
        for (const double p : r.harmonics.phases) os << ',' << format_number(p);
        os << '\n';
    }
    return os.str();
}

std::string events_to_jsonl(const std::vector<EventRecord>& events) {
    std::ostringstream os;
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["j"] = e.mark.j;
        j["dir"] = to_string(e.mark.direction);
        j["delta"] = e.mark.delta;
        j["feature"] = e.feature.values;
        os << j.dump() << '\n';
    }
    return os.str();
}

std::string predictions_to_json(const std::vector<Prediction>& preds,
                                const std::vector<std::string>& class_names) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : preds) {
        nlohmann::ordered_json j;
        j["j"] = p.mark.j;
        j["dir"] = to_string(p.mark.direction);
        j["delta"] = p.mark.delta;
        j["label"] = p.label < class_names.size() ? class_names[p.label] : std::to_string(p.label);
        j["probabilities"] = p.probabilities;
        j["feature_length"] = p.feature.size();
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["classes"] = class_names;
    doc["predictions"] = arr;
    return doc.dump(2) + "\n";
}

}  // namespace edgenilm
