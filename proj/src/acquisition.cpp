#include "edgenilm/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgenilm/error.hpp"

namespace edgenilm {

const char* to_string(Mode mode) { return mode == Mode::power ? "power" : "current"; }

Mode mode_from_string(const std::string& name) {
    if (name == "power") return Mode::power;
    if (name == "current") return Mode::current;
    throw ConfigError("unknown mode '" + name + "' (expected power|current)");
}

void AcquisitionConfig::validate() const {
    if (!(f_adc_clock > 0.0)) throw ConfigError("f_adc_clock must be positive");
    if (!(adc_prescaler >= 1.0)) throw ConfigError("adc_prescaler must be >= 1");
    if (!(sampling_cycles > 0.0)) throw ConfigError("sampling_cycles must be positive");
    if (adc_bits < 8 || adc_bits > 16) throw ConfigError("adc_bits must lie in [8, 16]");
    if (!(full_scale_v > 0.0) || !(full_scale_i > 0.0)) {
        throw ConfigError("full scales must be positive");
    }
    if (!(frame_span > 0.0)) throw ConfigError("frame_span must be positive");
}

void AcquisitionConfig::set_ideal_calibration() {
    const double half = static_cast<double>(mid_count());
    gain_v = full_scale_v / half;
    gain_i = full_scale_i / half;
    offset_v = half;
    offset_i = half;
}

double sampling_rate(const AcquisitionConfig& cfg) {
    if (!(cfg.f_adc_clock > 0.0)) throw ConfigError("f_adc_clock must be positive");
    if (!(cfg.adc_prescaler > 0.0) || !(cfg.sampling_cycles > 0.0)) {
        throw ConfigError("prescaler and sampling cycles must be positive");
    }
    return cfg.f_adc_clock / (cfg.adc_prescaler * cfg.sampling_cycles);
}

namespace {

std::vector<std::int32_t> quantize_channel(std::span<const double> x, double full_scale,
                                           const AcquisitionConfig& cfg, std::size_t& clipped) {
    const double half = static_cast<double>(cfg.mid_count());
    const std::int32_t top = cfg.max_count();
    std::vector<std::int32_t> counts(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto code = std::llround(x[k] / full_scale * half + half);
        if (code < 0 || code > top) ++clipped;
        counts[k] = static_cast<std::int32_t>(std::clamp<long long>(code, 0, top));
    }
    return counts;
}

std::vector<double> convert_channel(std::span<const std::int32_t> counts, double gain,
                                    double offset) {
    std::vector<double> out(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        out[k] = gain * (static_cast<double>(counts[k]) - offset);
    }
    return out;
}

}  // namespace

QuantizeResult quantize(const WaveformPair& wave, const AcquisitionConfig& cfg, Mode mode) {
    cfg.validate();
    if (!(wave.fs > 0.0)) throw DomainError("record has no sample rate");
    if (mode == Mode::power && wave.v.size() != wave.i.size()) {
        throw DomainError(wave.v.empty() ? "power mode needs the voltage channel"
                                         : "voltage and current lengths differ");
    }
    QuantizeResult r;
    r.raw.fs = wave.fs;
    r.raw.counts_i = quantize_channel(wave.i, cfg.full_scale_i, cfg, r.clipped_i);
    if (mode == Mode::power) {
        r.raw.counts_v = quantize_channel(wave.v, cfg.full_scale_v, cfg, r.clipped_v);
    }
    return r;
}

CalibratedFrame raw_conv(const RawFrame& raw, const AcquisitionConfig& cfg) {
    if (!raw.counts_v.empty() && raw.counts_v.size() != raw.counts_i.size()) {
        throw DomainError("voltage and current count lengths differ");
    }
    CalibratedFrame f;
    f.fs = raw.fs;
    f.frame_span = cfg.frame_span;
    f.i = convert_channel(raw.counts_i, cfg.gain_i, cfg.offset_i);
    if (!raw.counts_v.empty()) f.v = convert_channel(raw.counts_v, cfg.gain_v, cfg.offset_v);
    return f;
}

std::size_t frame_length(double fs, const AcquisitionConfig& cfg) {
    return static_cast<std::size_t>(std::llround(fs * cfg.frame_span));
}

CalibratedFrame calibrate(const WaveformPair& wave, const AcquisitionConfig& cfg, Mode mode) {
    return raw_conv(quantize(wave, cfg, mode).raw, cfg);
}

std::vector<CalibratedFrame> frame_stream(const WaveformPair& wave, const AcquisitionConfig& cfg,
                                          Mode mode) {
    const CalibratedFrame all = calibrate(wave, cfg, mode);
    const std::size_t len = frame_length(wave.fs, cfg);
    std::vector<CalibratedFrame> frames;
    if (len == 0) return frames;
    const std::size_t count = all.size() / len;
    frames.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
        CalibratedFrame frame;
        frame.fs = all.fs;
        frame.frame_span = cfg.frame_span;
        const auto b = static_cast<std::ptrdiff_t>(f * len);
        const auto e = b + static_cast<std::ptrdiff_t>(len);
        frame.i.assign(all.i.begin() + b, all.i.begin() + e);
        if (all.has_voltage()) frame.v.assign(all.v.begin() + b, all.v.begin() + e);
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace edgenilm
