#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "slipdet/analytic_contact.hpp"
#include "slipdet/beam_sim.hpp"
#include "slipdet/event_detector.hpp"

namespace slipdet::io {

enum class ModelKind { Analytic, BeamChain, BeamLattice };

struct Scenario {
  ModelKind model = ModelKind::BeamChain;
  double frame_rate_hz = 30.0;
  double noise_sigma = 0.0;  // Gaussian displacement noise on contact nodes
  analytic::SyntheticSequenceSpec analytic;
  beam::ChainParams chain;
  beam::LoadSchedule schedule;
  beam::LatticeParams lattice;
  std::vector<beam::LatticeStep> lattice_schedule;
  beam::SolverOptions solver;
  detect::PeakDetectorConfig detector;
  std::string output;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
detect::PeakDetectorConfig parse_detector_config(const std::string& text);

struct Simulation {
  std::vector<DeformationFrame> frames;
  std::vector<SlipMap> truth;
  double frame_rate_hz = 30.0;
};

Simulation simulate(const Scenario& sc, std::uint64_t seed);

}  // namespace slipdet::io
