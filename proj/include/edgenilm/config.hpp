#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edgenilm/acquisition.hpp"
#include "edgenilm/dtw.hpp"
#include "edgenilm/events.hpp"
#include "edgenilm/neuralnet.hpp"
#include "edgenilm/signalgen.hpp"

namespace edgenilm {

/// Settings shared by every stage between raw samples and the classifier.
struct PipelineConfig {
    AcquisitionConfig acquisition;
    DetectorConfig detector;
    DtwOptions dtw;
    Mode mode = Mode::power;
    double mains_frequency = 50.0;
    double power_threshold = 5.0;            // W
    double current_threshold = 5.0 / 230.0;  // A rms

    /// Sample rate implied by the ADC clock settings.
    double fs() const { return sampling_rate(acquisition); }
    /// Switches mode and the detector threshold that goes with it.
    void set_mode(Mode m);
};

/// Synthetic event-dataset generation.
struct DatasetConfig {
    std::size_t events_per_class = 1000;
    double jitter = 0.1;  // relative spread of preset parameters per recording
    std::array<double, 3> split{0.7, 0.1, 0.2};
    /// Chance that a recording has another appliance running throughout.
    double background_probability = 0.0;
    bool noise = true;
};

struct KnnConfig {
    std::size_t k = 3;
    std::size_t templates_per_class = 40;
    DtwOptions dtw;
};

struct Config {
    std::uint64_t seed = 7;
    std::vector<ApplianceModel> appliances;
    Schedule schedule;
    PipelineConfig pipeline;
    DatasetConfig dataset;
    TrainConfig train;
    KnnConfig knn;

    std::vector<std::string> class_names() const;
};

/// Bundled presets, a 5 s lamp on/off schedule and default settings.
Config default_config();

/// Missing keys keep their defaults. Throws ConfigError on bad values.
Config config_from_json(const std::string& text);
Config load_config(const std::string& path);
std::string config_to_json(const Config& cfg);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace edgenilm
