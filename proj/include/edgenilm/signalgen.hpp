#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgenilm {

enum class LoadKind { resistive, smps, motor };

const char* to_string(LoadKind kind);
LoadKind load_kind_from_string(const std::string& name);

/// One odd harmonic of the current, relative to the fundamental peak.
struct Harmonic {
    int order = 3;
    double rel_amplitude = 0.0;
    double phase = 0.0;  // radians
};

/// Electrical archetype of a single appliance.
///
/// The fundamental current is sized so that the active power drawn from a
/// clean sine supply equals `rated_power`; `power_factor` is the displacement
/// factor cos(phi) of that fundamental. Harmonics ride on the same delayed
/// time base, so they add distortion but no active power.
struct ApplianceModel {
    std::string id;
    LoadKind kind = LoadKind::resistive;
    double rated_power = 0.0;   // W
    double power_factor = 1.0;  // (0, 1]
    std::vector<Harmonic> harmonics;
    double inrush_ratio = 1.0;         // peak envelope at switch-on, >= 1
    double inrush_decay = 0.0;         // s, envelope is exactly 1 afterwards
    double current_noise_sigma = 0.0;  // A

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
    int highest_order() const;
};

struct Mains {
    double frequency = 50.0;     // Hz
    double rms_voltage = 230.0;  // V
};

struct ScheduleEntry {
    std::string id;
    double t_on = 0.0;
    double t_off = 0.0;
    // Appliance already running when the recording starts: no inrush.
    bool steady = false;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;
    double duration = 0.0;  // s
    Mains mains;
    double sensor_noise_sigma = 0.0;  // A, present on every sample

    void validate() const;
};

/// Synchronized voltage/current record with per-sample ground truth.
///
/// `labels[k]` is a bit mask over `label_names`: bit b set means
/// `label_names[b]` is drawing current at sample k.
struct WaveformPair {
    double fs = 0.0;
    std::vector<double> v;
    std::vector<double> i;
    std::vector<std::uint32_t> labels;
    std::vector<std::string> label_names;

    std::size_t size() const { return i.size(); }
    std::vector<std::string> active_ids(std::size_t k) const;
};

/// Snap a switching time to the nearest rising voltage zero crossing.
double snap_to_zero_crossing(double t, double mains_frequency);

WaveformPair synth_appliance(const ApplianceModel& model, double duration, double fs,
                             std::uint64_t seed, const Mains& mains = {});

WaveformPair synth_scenario(const std::vector<ApplianceModel>& models, const Schedule& schedule,
                            double fs, std::uint64_t seed);

/// The five bundled archetypes, in class-index order:
/// laptop, refrigerator, washing_machine, hairdryer, lamp.
const std::vector<ApplianceModel>& default_presets();

const ApplianceModel& find_model(const std::vector<ApplianceModel>& models, const std::string& id);

}  // namespace edgenilm
