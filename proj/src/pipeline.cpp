#include "slipdet/pipeline.hpp"

#include <cmath>

#include "slipdet/slip_map.hpp"

namespace slipdet {

std::vector<Grid<unsigned char>> contact_cue(const std::vector<DeformationFrame>& frames, double fraction) {
  std::vector<Grid<unsigned char>> cue;
  if (frames.empty()) return cue;
  const bool forces = frames.front().has_forces();
  const bool mask = frames.front().has_contact_mask();

  std::vector<Grid<double>> level;
  double peak = 0.0;
  if (forces || !mask) {
    for (const auto& f : frames) {
      Grid<double> lv(f.rows(), f.cols(), 0.0);
      if (forces) {
        const auto normals = strain::surface_normals(f);
        for (std::size_t k = 0; k < lv.size(); ++k) lv.data[k] = micro_forces(f.forces.data[k], normals.normal.data[k]).normal;
      } else {
        for (std::size_t k = 0; k < lv.size(); ++k) lv.data[k] = std::abs(f.displacements.data[k][2]);
      }
      for (double v : lv.data) peak = std::max(peak, v);
      level.push_back(std::move(lv));
    }
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& f = frames[t];
    Grid<unsigned char> c(f.rows(), f.cols(), 1);
    if (forces || !mask) {
      if (peak > 0.0) {
        const double thr = forces ? std::max(fraction * peak, kForceFloor) : fraction * peak;
        for (std::size_t k = 0; k < c.size(); ++k) c.data[k] = level[t].data[k] > thr;
      }
    } else {
      c = f.contact;
    }
    cue.push_back(std::move(c));
  }
  return cue;
}

DetectionResult run_detection(const std::vector<DeformationFrame>& frames, const detect::PeakDetectorConfig& cfg,
                              bool keep_rates) {
  cfg.validate();
  DetectionResult out;
  if (frames.empty()) return out;
  const std::size_t rows = frames.front().rows(), cols = frames.front().cols();
  const auto cue = contact_cue(frames, cfg.contact_fraction);
  detect::Detector det(rows, cols, cfg);
  strain::StrainField prev = strain::strain_field(frames.front());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (!frames[t].positions.same_shape(rows, cols)) throw DomainError("frame grids differ within the sequence");
    strain::StrainField cur = t == 0 ? prev : strain::strain_field(frames[t]);
    double dt = 1.0;
    if (t > 0) {
      dt = frames[t].t - frames[t - 1].t;
      if (!(dt > 0.0)) throw SequencingError("frame timestamps are not increasing");
    } else if (frames.size() > 1) {
      dt = frames[1].t - frames[0].t;
    }
    strain::CStrainRateField rate = strain::cstrain_rate(prev, cur, dt > 0.0 ? dt : 1.0);
    detect::FrameInput in{t, frames[t].t, dt > 0.0 ? dt : 1.0, &rate, &cue[t]};
    out.maps.push_back(det.step_frame(in, out.events));
    if (keep_rates) out.rates.push_back(std::move(rate));
    prev = std::move(cur);
  }
  return out;
}

}  // namespace slipdet
