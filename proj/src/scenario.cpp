#include "slipdet/scenario.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace slipdet::io {

namespace {

using json = nlohmann::json;

beam::LoadProfile profile_from(const std::string& s) {
  if (s == "hertz") return beam::LoadProfile::Hertz;
  if (s == "uniform") return beam::LoadProfile::Uniform;
  throw FormatError("unknown load profile '" + s + "'");
}

void read_detector(const json& j, detect::PeakDetectorConfig& c) {
  if (!j.is_object()) throw FormatError("detector config must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k == "lag") c.lag = it->get<std::size_t>();
    else if (k == "z_threshold") c.z_threshold = it->get<double>();
    else if (k == "influence") c.influence = it->get<double>();
    else if (k == "positive_floor_coeff") c.positive_floor_coeff = it->get<double>();
    else if (k == "noise_floor") c.noise_floor = it->get<double>();
    else if (k == "contact_fraction") c.contact_fraction = it->get<double>();
    else throw ConfigError("unknown detector setting '" + k + "'");
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const json j = parse_json(text);
  Scenario sc;
  try {
    const std::string model = j.at("model").get<std::string>();
    if (model == "analytic") sc.model = ModelKind::Analytic;
    else if (model == "beam_chain") sc.model = ModelKind::BeamChain;
    else if (model == "beam_lattice") sc.model = ModelKind::BeamLattice;
    else throw FormatError("unknown model '" + model + "'");
    sc.frame_rate_hz = j.value("frame_rate_hz", sc.frame_rate_hz);
    sc.noise_sigma = j.value("noise_sigma", 0.0);
    sc.output = j.value("output", std::string());
    const json params = j.value("params", json::object());
    const json sched = j.value("schedule", json::array());

    switch (sc.model) {
      case ModelKind::Analytic: {
        auto& a = sc.analytic;
        a.params.normal_force = params.value("normal_force", a.params.normal_force);
        a.params.contact_radius = params.value("contact_radius", a.params.contact_radius);
        a.params.mu = params.value("mu", a.params.mu);
        a.params.shear_modulus = params.value("shear_modulus", a.params.shear_modulus);
        a.params.poisson = params.value("poisson", a.params.poisson);
        a.rows = params.value("rows", a.rows);
        a.cols = params.value("cols", a.cols);
        a.pitch = params.value("pitch", a.pitch);
        if (sched.is_object()) {
          // {"from": F0, "to": F1, "frames": n, "hold": h}; h rest frames at F0 come first
          const double f0 = sched.at("from").get<double>(), f1 = sched.at("to").get<double>();
          const std::size_t n = sched.at("frames").get<std::size_t>();
          a.tangential_force.assign(sched.value("hold", std::size_t{0}), f0);
          for (std::size_t k = 0; k < n; ++k)
            a.tangential_force.push_back(n > 1 ? f0 + (f1 - f0) * static_cast<double>(k) / static_cast<double>(n - 1) : f0);
        } else {
          a.tangential_force = sched.get<std::vector<double>>();
        }
        break;
      }
      case ModelKind::BeamChain: {
        auto& c = sc.chain;
        c.nodes = params.value("nodes", c.nodes);
        c.coupling = params.value("coupling", c.coupling);
        c.spacing = params.value("spacing", c.spacing);
        c.bending = params.value("bending", c.bending);
        c.mu = params.value("mu", c.mu);
        c.normal_load = params.value("normal_load", c.normal_load);
        c.profile = profile_from(params.value("profile", std::string("hertz")));
        c.normal_coupling = params.value("normal_coupling", c.normal_coupling);
        for (const auto& s : sched)
          sc.schedule.push_back({s.at("duration").get<std::size_t>(), s.value("velocity", 0.0),
                                 s.value("normal_scale", 1.0)});
        break;
      }
      case ModelKind::BeamLattice: {
        auto& l = sc.lattice;
        l.rows = params.value("rows", l.rows);
        l.cols = params.value("cols", l.cols);
        l.coupling = params.value("coupling", l.coupling);
        l.pitch = params.value("pitch", l.pitch);
        l.bending = params.value("bending", l.bending);
        l.mu = params.value("mu", l.mu);
        l.normal_load = params.value("normal_load", l.normal_load);
        l.profile = profile_from(params.value("profile", std::string("hertz")));
        l.contact_radius = params.value("contact_radius", l.contact_radius);
        for (const auto& s : sched)
          sc.lattice_schedule.push_back({s.at("duration").get<std::size_t>(), s.value("vx", 0.0), s.value("vy", 0.0),
                                         s.value("omega", 0.0), s.value("normal_scale", 1.0)});
        break;
      }
    }
    if (j.contains("solver")) {
      const json& sv = j["solver"];
      sc.solver.max_sweeps = sv.value("max_sweeps", sc.solver.max_sweeps);
      sc.solver.tolerance = sv.value("tolerance", sc.solver.tolerance);
    }
    if (j.contains("detector")) read_detector(j["detector"], sc.detector);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario field error: ") + e.what());
  }
  if (!(sc.frame_rate_hz > 0.0)) throw FormatError("frame_rate_hz must be positive");
  if (sc.noise_sigma < 0.0) throw FormatError("noise_sigma must be non-negative");
  sc.analytic.frame_rate_hz = sc.frame_rate_hz;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

detect::PeakDetectorConfig parse_detector_config(const std::string& text) {
  const json j = parse_json(text);
  detect::PeakDetectorConfig c;
  try {
    read_detector(j.contains("detector") ? j["detector"] : j, c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("detector config error: ") + e.what());
  }
  c.validate();
  return c;
}

Simulation simulate(const Scenario& sc, std::uint64_t seed) {
  Simulation sim;
  sim.frame_rate_hz = sc.frame_rate_hz;
  switch (sc.model) {
    case ModelKind::Analytic: {
      auto seq = analytic::synthesize_sequence(sc.analytic);
      sim.frames = std::move(seq.frames);
      sim.truth = std::move(seq.truth);
      break;
    }
    case ModelKind::BeamChain: {
      const auto trace = beam::run_case(beam::make_chain(sc.chain), sc.schedule, sc.solver);
      sim.frames = beam::trace_frames(trace, sc.frame_rate_hz);
      sim.truth = beam::trace_truth(trace);
      break;
    }
    case ModelKind::BeamLattice: {
      auto run = beam::lattice_run(sc.lattice, sc.lattice_schedule, sc.frame_rate_hz, sc.solver);
      sim.frames = std::move(run.frames);
      sim.truth = std::move(run.truth);
      break;
    }
  }
  if (sc.noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sc.noise_sigma);
    for (std::size_t t = 0; t < sim.frames.size(); ++t) {
      auto& f = sim.frames[t];
      for (std::size_t k = 0; k < f.displacements.size(); ++k) {
        if (sim.truth[t].states.data[k] == NodeState::NonContact) continue;
        f.displacements.data[k][0] += noise(rng);
        f.displacements.data[k][1] += noise(rng);
      }
    }
  }
  return sim;
}

}  // namespace slipdet::io
