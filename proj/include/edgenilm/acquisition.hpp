#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edgenilm/signalgen.hpp"

namespace edgenilm {

/// Which channels feed the pipeline. In current-only mode the voltage
/// channel is never converted and power features are unavailable.
enum class Mode { power, current };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// ADC front end and RawConv calibration.
///
/// The sample rate follows the STM32 relation
///   f_sample = f_adc_clock / (adc_prescaler * sampling_cycles)
/// and the defaults give 6400 Hz, i.e. 128 samples per 50 Hz cycle.
struct AcquisitionConfig {
    double f_adc_clock = 25.6e6;  // Hz
    double adc_prescaler = 4.0;
    double sampling_cycles = 1000.0;  // may be fractional, e.g. 810.5
    int adc_bits = 12;
    double full_scale_v = 400.0;  // V, peak
    double full_scale_i = 70.0;   // A, peak
    double gain_v = 400.0 / 2048.0;
    double offset_v = 2048.0;
    double gain_i = 70.0 / 2048.0;
    double offset_i = 2048.0;
    double frame_span = 0.1;  // s

    void validate() const;
    std::int32_t max_count() const { return (1 << adc_bits) - 1; }
    std::int32_t mid_count() const { return 1 << (adc_bits - 1); }

    /// Calibration that exactly inverts quantize() for the current full scales.
    void set_ideal_calibration();
};

double sampling_rate(const AcquisitionConfig& cfg);

struct RawFrame {
    std::vector<std::int32_t> counts_v;  // empty in current-only mode
    std::vector<std::int32_t> counts_i;
    double fs = 0.0;
};

struct QuantizeResult {
    RawFrame raw;
    std::size_t clipped_v = 0;
    std::size_t clipped_i = 0;
};

struct CalibratedFrame {
    std::vector<double> v;  // empty in current-only mode
    std::vector<double> i;
    double fs = 0.0;
    double frame_span = 0.1;

    bool has_voltage() const { return !v.empty(); }
    std::size_t size() const { return i.size(); }
};

/// Mid-scale-offset linear ADC model with saturation. The record's own
/// sample rate is kept; the config only supplies resolution and full scale.
QuantizeResult quantize(const WaveformPair& wave, const AcquisitionConfig& cfg,
                        Mode mode = Mode::power);

/// RawConv: engineering = gain * (counts - offset), per channel.
CalibratedFrame raw_conv(const RawFrame& raw, const AcquisitionConfig& cfg);

/// Samples per analysis frame, round(fs * frame_span).
std::size_t frame_length(double fs, const AcquisitionConfig& cfg);

/// Whole-record calibration without framing; the trailing partial frame is kept.
CalibratedFrame calibrate(const WaveformPair& wave, const AcquisitionConfig& cfg,
                          Mode mode = Mode::power);

/// Consecutive non-overlapping frames; the trailing partial frame is dropped.
std::vector<CalibratedFrame> frame_stream(const WaveformPair& wave, const AcquisitionConfig& cfg,
                                          Mode mode = Mode::power);

}  // namespace edgenilm
