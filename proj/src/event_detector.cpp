#include "slipdet/event_detector.hpp"

#include <cmath>
#include <numeric>

#include "slipdet/slip_map.hpp"

namespace slipdet::detect {

void PeakDetectorConfig::validate() const {
  if (lag < 2) throw ConfigError("lag must be at least 2");
  if (!(z_threshold > 0.0)) throw ConfigError("z_threshold must be positive");
  if (!(influence >= 0.0 && influence <= 1.0)) throw ConfigError("influence must lie in [0, 1]");
  if (!(positive_floor_coeff >= 0.0)) throw ConfigError("positive_floor_coeff must be non-negative");
  if (!(noise_floor > 0.0)) throw ConfigError("noise_floor must be positive");
  if (!(contact_fraction > 0.0 && contact_fraction < 1.0)) throw ConfigError("contact_fraction must lie in (0, 1)");
}

const char* to_string(EventType e) {
  switch (e) {
    case EventType::None: return "none";
    case EventType::PosExtreme: return "pos_extreme";
    case EventType::NegExtreme: return "neg_extreme";
    case EventType::ContactOn: return "contact_on";
    case EventType::ContactOff: return "contact_off";
  }
  return "none";
}

EventType event_from_string(const std::string& s) {
  for (EventType e : {EventType::None, EventType::PosExtreme, EventType::NegExtreme, EventType::ContactOn,
                      EventType::ContactOff})
    if (s == to_string(e)) return e;
  throw FormatError("unknown event type '" + s + "'");
}

namespace {

void push_window(NodeDetectorState& st, std::size_t lag, double v) {
  st.window.push_back(v);
  while (st.window.size() > lag) st.window.pop_front();
}

UpdateResult transition(NodeDetectorState& st, EventType ev, const Sample& s, double value, double delta) {
  UpdateResult r;
  if (ev == EventType::PosExtreme && st.state == NodeState::Stick) st.state = NodeState::Slip;
  else if (ev == EventType::NegExtreme && st.state == NodeState::Slip) st.state = NodeState::Stick;
  else return r;
  r.event = ev;
  r.value = value;
  r.delta = delta;
  st.last_event = ev;
  st.last_event_frame = s.frame;
  return r;
}

}  // namespace

UpdateResult update(NodeDetectorState& st, const PeakDetectorConfig& cfg, const Sample& s) {
  if (st.samples > 0 && !(s.t > st.last_t)) throw SequencingError("samples out of time order");
  if (!(s.dt > 0.0)) throw DomainError("sampling period must be positive");
  st.last_t = s.t;
  const double y = s.valid ? s.signed_rate : 0.0;
  const double noise = cfg.noise_floor / s.dt;

  // Z-score flag against the lag window of filtered samples.
  int flag = 0;
  double filtered = y;
  if (st.window.size() >= cfg.lag) {
    const double n = static_cast<double>(st.window.size());
    const double mean = std::accumulate(st.window.begin(), st.window.end(), 0.0) / n;
    double var = 0.0;
    for (double w : st.window) var += (w - mean) * (w - mean);
    const double sd = std::max(std::sqrt(var / n), noise);
    if (std::abs(y - mean) > cfg.z_threshold * sd) {
      flag = y > mean ? 1 : -1;
      filtered = cfg.influence * y + (1.0 - cfg.influence) * st.window.back();
    }
  }
  push_window(st, cfg.lag, filtered);
  const bool warm = st.samples >= cfg.lag;
  ++st.samples;

  UpdateResult out;
  if (s.contact != st.contact) {
    st.contact = s.contact;
    st.contact_change_frame = s.frame;
    st.armed = 0;
    st.state = s.contact ? NodeState::Stick : NodeState::NonContact;
    out.event = s.contact ? EventType::ContactOn : EventType::ContactOff;
    st.last_event = out.event;
    st.last_event_frame = s.frame;
    return out;
  }
  if (!s.contact || !s.valid || !warm) {
    st.armed = 0;
    return out;
  }

  EventType candidate = EventType::None;
  if (st.armed > 0) {
    if (y > st.extreme) {
      st.extreme = y;
      st.extreme_delta = s.delta;
      st.extreme_magnitude = s.magnitude;
    } else if (y < st.extreme - noise) {
      st.armed = 0;
      if (st.extreme >= cfg.positive_floor_coeff * st.extreme_magnitude / s.dt) candidate = EventType::PosExtreme;
    }
  } else if (st.armed < 0) {
    if (y < st.extreme) {
      st.extreme = y;
      st.extreme_delta = s.delta;
      st.extreme_magnitude = s.magnitude;
    } else if (y > st.extreme + noise) {
      st.armed = 0;
      candidate = EventType::NegExtreme;
    }
  }
  if (candidate == EventType::None && st.armed == 0) {
    if ((flag > 0 && y > noise) || (flag < 0 && y < -noise)) {
      st.armed = flag;
      st.extreme = y;
      st.extreme_delta = s.delta;
      st.extreme_magnitude = s.magnitude;
    }
  }
  if (candidate == EventType::None) return out;
  // Extremes riding on a contact change belong to that change.
  if (s.frame <= st.contact_change_frame + 1) return out;
  return transition(st, candidate, s, st.extreme, st.extreme_delta);
}

Detector::Detector(std::size_t rows, std::size_t cols, PeakDetectorConfig cfg)
    : states_(rows, cols), cfg_(cfg) {
  cfg_.validate();
}

SlipMap Detector::step_frame(const FrameInput& in, std::vector<Event>& events) {
  if (!in.rate || !in.rate->valid.same_shape(states_.rows, states_.cols))
    throw DomainError("strain-rate field does not match the detector grid");
  if (in.contact && !in.contact->same_shape(states_.rows, states_.cols))
    throw DomainError("contact field does not match the detector grid");
  Grid<NodeState> out(states_.rows, states_.cols);
  for (std::size_t i = 0; i < states_.rows; ++i) {
    for (std::size_t j = 0; j < states_.cols; ++j) {
      const std::size_t k = i * states_.cols + j;
      Sample s;
      s.frame = in.frame;
      s.t = in.t;
      s.dt = in.dt;
      s.signed_rate = in.rate->signed_rate.data[k];
      s.delta = in.rate->delta.data[k];
      s.magnitude = in.rate->magnitude.data[k];
      s.valid = in.rate->valid.data[k] != 0;
      s.contact = in.contact ? in.contact->data[k] != 0 : true;
      const UpdateResult r = update(states_.data[k], cfg_, s);
      if (r.event != EventType::None) events.push_back({in.frame, in.t, i, j, r.event, r.value, r.delta});
      out(i, j) = states_.data[k].state;
    }
  }
  return make_slip_map(in.frame, std::move(out));
}

}  // namespace slipdet::detect
