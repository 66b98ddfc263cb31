#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "slipdet/common.hpp"
#include "slipdet/strain_pipeline.hpp"

namespace slipdet::detect {

struct PeakDetectorConfig {
  std::size_t lag = 5;
  double z_threshold = 3.0;
  double influence = 0.3;
  double positive_floor_coeff = 0.1;
  // Strain increments below this are treated as noise.
  double noise_floor = 1e-6;
  double contact_fraction = 0.02;

  void validate() const;
};

enum class EventType : std::uint8_t { None, PosExtreme, NegExtreme, ContactOn, ContactOff };

const char* to_string(EventType e);
EventType event_from_string(const std::string& s);

struct Event {
  std::size_t frame = 0;
  double t = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  EventType type = EventType::None;
  double value = 0.0;
  double delta = 0.0;
};

struct Sample {
  std::size_t frame = 0;
  double t = 0.0;
  double dt = 1.0;
  double signed_rate = 0.0;
  double delta = 0.0;
  double magnitude = 0.0;  // |(e1*, e2*)| at this frame
  bool valid = true;
  bool contact = true;
};

struct NodeDetectorState {
  std::deque<double> window;
  NodeState state = NodeState::NonContact;
  EventType last_event = EventType::None;
  std::size_t last_event_frame = 0;
  std::size_t samples = 0;
  double last_t = -std::numeric_limits<double>::infinity();
  bool contact = false;
  std::size_t contact_change_frame = 0;
  int armed = 0;
  double extreme = 0.0;
  double extreme_delta = 0.0;
  double extreme_magnitude = 0.0;
};

struct UpdateResult {
  EventType event = EventType::None;
  double value = 0.0;
  double delta = 0.0;
};

UpdateResult update(NodeDetectorState& state, const PeakDetectorConfig& cfg, const Sample& sample);

struct FrameInput {
  std::size_t frame = 0;
  double t = 0.0;
  double dt = 1.0;
  const strain::CStrainRateField* rate = nullptr;
  const Grid<unsigned char>* contact = nullptr;
};

class Detector {
 public:
  Detector(std::size_t rows, std::size_t cols, PeakDetectorConfig cfg);

  // Applies one frame to every node; events are appended to `events`.
  SlipMap step_frame(const FrameInput& in, std::vector<Event>& events);

  const Grid<NodeDetectorState>& states() const { return states_; }
  const PeakDetectorConfig& config() const { return cfg_; }

 private:
  Grid<NodeDetectorState> states_;
  PeakDetectorConfig cfg_;
};

}  // namespace slipdet::detect
