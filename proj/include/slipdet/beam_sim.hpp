#pragma once

#include <vector>

#include "slipdet/common.hpp"

namespace slipdet::beam {

enum class LoadProfile { Hertz, Uniform };

struct ChainParams {
  std::size_t nodes = 21;
  double coupling = 1.0;  // k
  double spacing = 1.0;   // Delta
  double bending = 0.1;   // b_i, uniform unless bending_per_node is set
  std::vector<double> bending_per_node;
  double mu = 0.4;
  double normal_load = 0.1;  // peak per-node normal load
  LoadProfile profile = LoadProfile::Hertz;
  std::vector<double> normal_per_node;  // overrides profile when set
  // Inward anchor shift per unit increase of normal_scale, scaled by the node's radial position.
  double normal_coupling = 0.0;
};

struct BeamChain {
  std::size_t n = 0;
  double k = 1.0;
  double spacing = 1.0;
  double mu = 0.4;
  double normal_coupling = 0.0;
  std::vector<double> b;
  std::vector<double> fn;      // normal load at normal_scale = 1
  std::vector<double> radial;  // 1 at the contact edge, 0 at the center

  double u = 0.0;
  double normal_scale = 1.0;
  std::vector<double> slip;      // s_i = u - u_i
  std::vector<double> friction;  // f_i^s
  std::vector<NodeState> state;

  double position(std::size_t i) const { return u - slip[i]; }
  double bound(std::size_t i) const { return mu * fn[i] * normal_scale; }
  double anchor(std::size_t i) const { return normal_coupling * (normal_scale - 1.0) * radial[i]; }
  double elastic_energy() const;
};

BeamChain make_chain(const ChainParams& p);

struct SolverOptions {
  std::size_t max_sweeps = 200000;
  double tolerance = 1e-10;  // relative to k * spacing
};

BeamChain quasi_static_step(const BeamChain& chain, double du, double normal_scale, const SolverOptions& opt = {});

struct ScheduleStep {
  std::size_t duration = 1;
  double velocity = 0.0;      // object displacement per step
  double normal_scale = 1.0;  // reached linearly at the end of the segment
};

using LoadSchedule = std::vector<ScheduleStep>;

struct BeamTrace {
  std::size_t n = 0;
  double spacing = 1.0;
  std::vector<double> u;
  std::vector<double> normal_scale;
  std::vector<double> total_force;
  std::vector<std::vector<double>> position;
  std::vector<std::vector<double>> strain;
  std::vector<std::vector<double>> strain_rate;
  std::vector<std::vector<double>> friction;
  std::vector<std::vector<double>> normal;
  std::vector<std::vector<NodeState>> state;
  std::vector<double> drive_work;     // per step, sum_i f_i du
  std::vector<double> elastic_energy; // after each step

  std::size_t steps() const { return u.size(); }
};

// ε_i = (u_i - u_{i-1})/Δ, one-sided at the contact edge.
std::vector<double> chain_strain(const std::vector<double>& position, double spacing);

BeamTrace run_case(const BeamChain& chain, const LoadSchedule& schedule, const SolverOptions& opt = {});

std::vector<DeformationFrame> trace_frames(const BeamTrace& trace, double frame_rate_hz);
std::vector<SlipMap> trace_truth(const BeamTrace& trace);

struct LatticeParams {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double coupling = 1.0;
  double pitch = 1.0;
  double bending = 0.1;
  double mu = 0.4;
  double normal_load = 0.1;
  LoadProfile profile = LoadProfile::Hertz;
  double contact_radius = 0.0;  // 0 selects half the smaller grid extent plus half a pitch
};

struct LatticeStep {
  std::size_t duration = 1;
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;  // rad per step about the grid center
  double normal_scale = 1.0;
};

struct LatticeRun {
  std::vector<DeformationFrame> frames;
  std::vector<SlipMap> truth;
  std::vector<std::vector<double>> friction_magnitude;
};

LatticeRun lattice_run(const LatticeParams& p, const std::vector<LatticeStep>& schedule, double frame_rate_hz,
                       const SolverOptions& opt = {});

}  // namespace slipdet::beam
