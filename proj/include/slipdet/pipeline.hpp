#pragma once

#include <vector>

#include "slipdet/event_detector.hpp"
#include "slipdet/strain_pipeline.hpp"

namespace slipdet {

struct DetectionResult {
  std::vector<SlipMap> maps;
  std::vector<detect::Event> events;
  std::vector<strain::CStrainRateField> rates;  // filled when requested
};

// Per-frame contact cue: normal force when present, then the contact mask, then |u_z|.
std::vector<Grid<unsigned char>> contact_cue(const std::vector<DeformationFrame>& frames, double fraction);

DetectionResult run_detection(const std::vector<DeformationFrame>& frames, const detect::PeakDetectorConfig& cfg,
                              bool keep_rates = false);

}  // namespace slipdet
