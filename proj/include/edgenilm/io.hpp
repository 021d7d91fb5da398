#pragma once

#include <string>
#include <vector>

#include "edgenilm/acquisition.hpp"
#include "edgenilm/classify.hpp"
#include "edgenilm/cycles.hpp"
#include "edgenilm/signalgen.hpp"

namespace edgenilm {

/// `t_s,v_V,i_A,labels` with labels a `|`-separated list of active ids.
std::string waveform_to_csv(const WaveformPair& wave);
/// Inverse of waveform_to_csv. An empty v_V column gives a current-only
/// record. fs is recovered from the time column.
WaveformPair waveform_from_csv(const std::string& text);

/// `t_s,counts_v,counts_i`; counts_v is empty in current-only mode.
std::string raw_to_csv(const RawFrame& raw);

/// One row of the per-frame feature export.
struct FrameFeatures {
    std::size_t frame = 0;
    PowerFeatures power;
    HarmonicVector harmonics;
};

/// Per-frame P, S, Q over the frame's whole cycles and odd harmonics over
/// its first four cycles. Frames lacking four cycles are skipped.
std::vector<FrameFeatures> frame_features(const CycleTable& table, double frame_span, double f0);

/// `frame_idx,P_W,S_VA,Q_var,h1_mag..h15_mag,h1_phase..h15_phase`; the power
/// columns are left empty for current-only rows.
std::string frame_features_to_csv(const std::vector<FrameFeatures>& rows);

/// One JSON object per line: `{"j","dir","delta","feature"}`.
std::string events_to_jsonl(const std::vector<EventRecord>& events);

std::string predictions_to_json(const std::vector<Prediction>& preds,
                                const std::vector<std::string>& class_names);

/// Shortest round-tripping decimal form of x.
std::string format_number(double x);

}  // namespace edgenilm
