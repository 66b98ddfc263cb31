// slipdet: simulate, detect, evaluate, fit-friction, profiles.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "slipdet/analytic_contact.hpp"
#include "slipdet/friction_fit.hpp"
#include "slipdet/pipeline.hpp"
#include "slipdet/report_io.hpp"
#include "slipdet/scenario.hpp"
#include "slipdet/sequence_io.hpp"

namespace fs = std::filesystem;
using namespace slipdet;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kUsage = 2, kInput = 3, kSolver = 4, kDetectorConfig = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outputs {
  fs::path dir;
  bool force = false;
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string body) { files.emplace_back(std::move(name), std::move(body)); }

  void check(const std::vector<std::string>& extra = {}) const {
    if (force) return;
    std::vector<std::string> names = extra;
    for (const auto& f : files) names.push_back(f.first);
    for (const auto& n : names)
      if (fs::exists(dir / n)) throw UsageError("refusing to overwrite " + (dir / n).string() + " (use --force)");
  }

  void write() const {
    fs::create_directories(dir);
    for (const auto& [name, body] : files) {
      const fs::path tmp = dir / (name + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << body;
      }
      fs::rename(tmp, dir / name);
    }
  }
};

std::vector<double> times_of(const std::vector<DeformationFrame>& frames) {
  std::vector<double> t;
  for (const auto& f : frames) t.push_back(f.t);
  return t;
}

int cmd_simulate(const std::string& config, const fs::path& out, std::uint64_t seed, bool force) {
  const io::Scenario sc = io::load_scenario(config);
  const io::Simulation sim = io::simulate(sc, seed);
  const std::size_t rows = sim.frames.empty() ? 0 : sim.frames.front().rows();
  const std::size_t cols = sim.frames.empty() ? 0 : sim.frames.front().cols();
  io::Sequence seq{io::make_header(sim.frames, rows, cols, sim.frame_rate_hz), sim.frames};
  seq.header.payload = "frames.bin";

  Outputs o{out, force, {}};
  o.add("slipmap.csv", io::slipmap_csv(sim.truth, times_of(sim.frames)));
  o.add("states.csv", io::states_csv(sim.truth));
  o.check({"frames.json", "frames.bin"});
  o.write();
  io::write_sequence(out / "frames.json", seq);
  std::cout << "simulated " << sim.frames.size() << " frames on a " << rows << "x" << cols << " grid -> " << out.string()
            << "\n";
  return kOk;
}

int cmd_detect(const std::string& sequence, const std::string& config, const fs::path& out, bool force) {
  detect::PeakDetectorConfig cfg;
  if (!config.empty()) cfg = io::parse_detector_config(io::read_text(config));
  cfg.validate();
  const io::Sequence seq = io::read_sequence(sequence);
  const DetectionResult res = run_detection(seq.frames, cfg);

  Outputs o{out, force, {}};
  o.add("slipmap.csv", io::slipmap_csv(res.maps, times_of(seq.frames)));
  o.add("states.csv", io::states_csv(res.maps));
  o.add("events.csv", io::events_csv(res.events));
  o.check();
  o.write();
  std::size_t pos = 0, neg = 0;
  for (const auto& e : res.events) {
    pos += e.type == detect::EventType::PosExtreme;
    neg += e.type == detect::EventType::NegExtreme;
  }
  std::cout << "detected " << pos << " pos_extreme and " << neg << " neg_extreme events over " << res.maps.size()
            << " frames\n";
  return kOk;
}

int cmd_evaluate(const std::string& estimated, const std::string& truth, const fs::path& out, bool force) {
  const auto est = io::parse_states_csv(io::read_text(estimated));
  const auto tru = io::parse_states_csv(io::read_text(truth));
  const EvaluationReport rep = evaluate(est, tru);
  Outputs o{out, force, {}};
  o.add("report.csv", io::report_csv(rep));
  o.add("summary.csv", io::summary_csv(rep));
  o.check();
  o.write();
  std::cout << "accuracy " << io::num(rep.accuracy()) << ", sr rmse " << io::num(rep.sr_rmse) << ", |lag|<=1 on "
            << rep.lag_within_one << "/" << rep.lag_nodes << " nodes\n";
  return kOk;
}

int cmd_fit(const std::string& sequence, const std::string& events, const fs::path& out, bool force) {
  const io::Sequence seq = io::read_sequence(sequence);
  const auto ev = io::parse_events_csv(io::read_text(events));
  const auto samples = friction::collect_samples(ev, seq.frames);
  Outputs o{out, force, {}};
  o.add("samples.csv", io::samples_csv(samples));
  if (samples.size() >= friction::kMinSamples) {
    const auto m = friction::fit_linear(samples);
    o.add("model.csv", io::model_csv(m));
    o.check();
    o.write();
    std::cout << "mu = " << io::num(m.beta[0]) << " + " << io::num(m.beta[1]) << " v + " << io::num(m.beta[2])
              << " f_n, sigma " << io::num(m.sigma) << " (" << m.sample_count << " samples)\n";
  } else {
    o.check();
    o.write();
    std::cout << samples.size() << " samples; model needs at least " << friction::kMinSamples << "\n";
  }
  return kOk;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad number in list: '" + item + "'");
    }
  }
  return v;
}

int cmd_profiles(const analytic::ContactParams& p, const std::string& rc_list, std::size_t samples, const fs::path& out,
                 bool svg, bool force) {
  const std::vector<double> rcs = parse_list(rc_list);
  if (rcs.empty()) throw UsageError("no stick radii given");
  if (samples < 2) throw UsageError("need at least two samples");
  const double ra = p.contact_radius;
  const double beta_max = 5.0;

  std::ostringstream table;
  table << "beta,phi1,phi2\n";
  io::Series s1{"phi1", {}, {}}, s2{"phi2", {}, {}};
  for (std::size_t k = 0; k < samples; ++k) {
    const double b = beta_max * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double f1 = analytic::phi1(b), f2 = analytic::phi2(b);
    table << io::num(b) << ',' << io::num(f1) << ',' << io::num(f2) << '\n';
    s1.x.push_back(b), s1.y.push_back(f1), s2.x.push_back(b), s2.y.push_back(f2);
  }

  std::ostringstream curves, peaks;
  curves << "rc,r,s,ds_dr\n";
  peaks << "rc,r_peak,beta_peak,step\n";
  std::vector<io::Series> slip_series, deriv_series;
  const double step = ra / static_cast<double>(samples - 1);
  for (double rc : rcs) {
    io::Series ss{"rc=" + io::num(rc), {}, {}}, sd{"rc=" + io::num(rc), {}, {}};
    double best = -1.0, rbest = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double r = ra * static_cast<double>(k) / static_cast<double>(samples - 1);
      const auto pt = analytic::slip_profile(p, rc, r);
      curves << io::num(rc) << ',' << io::num(r) << ',' << io::num(pt.s) << ',' << io::num(pt.ds_dr) << '\n';
      ss.x.push_back(r), ss.y.push_back(pt.s), sd.x.push_back(r), sd.y.push_back(pt.ds_dr);
      if (pt.ds_dr > best) best = pt.ds_dr, rbest = r;
    }
    peaks << io::num(rc) << ',' << io::num(rbest) << ',' << io::num(rbest / rc) << ',' << io::num(step) << '\n';
    slip_series.push_back(std::move(ss));
    deriv_series.push_back(std::move(sd));
  }

  Outputs o{out, force, {}};
  o.add("profiles.csv", table.str());
  o.add("slip_profiles.csv", curves.str());
  o.add("peaks.csv", peaks.str());
  if (svg) {
    o.add("phi.svg", io::line_plot_svg("Dimensionless slip and derivative", "beta", "value", {s1, s2}));
    o.add("slip.svg", io::line_plot_svg("Slip s(r)", "r", "s", slip_series));
    o.add("slip_derivative.svg", io::line_plot_svg("Slip derivative ds/dr", "r", "ds/dr", deriv_series));
  }
  o.check();
  o.write();
  std::cout << peaks.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-slip contact simulation and incipient-slip detection"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  bool force = false;
  std::string out;

  auto common = [&](CLI::App* c) {
    c->add_option("--out", out, "Output directory")->required();
    c->add_option("--seed", seed, "Random seed");
    c->add_flag("--force", force, "Overwrite existing outputs");
  };

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write frames plus ground truth");
  sim->add_option("--config", sim_config, "Scenario file")->required()->check(CLI::ExistingFile);
  common(sim);

  std::string det_seq, det_config;
  auto* det = app.add_subcommand("detect", "Detect slip events in a frame sequence");
  det->add_option("--sequence", det_seq, "Sequence header")->required();
  det->add_option("--config", det_config, "Detector settings");
  common(det);

  std::string ev_est, ev_truth;
  auto* ev = app.add_subcommand("evaluate", "Compare estimated and true states");
  ev->add_option("--estimated", ev_est, "Estimated states.csv")->required();
  ev->add_option("--truth", ev_truth, "True states.csv")->required();
  common(ev);

  std::string fit_seq, fit_events;
  auto* fit = app.add_subcommand("fit-friction", "Harvest friction samples at slip onsets and fit the linear model");
  fit->add_option("--sequence", fit_seq, "Sequence header with force fields")->required();
  fit->add_option("--events", fit_events, "events.csv")->required();
  common(fit);

  analytic::ContactParams prof;
  std::string rc_list = "1.5,1.25,1.0,0.75,0.5";
  std::size_t samples = 601;
  bool svg = false;
  auto* pr = app.add_subcommand("profiles", "Tabulate slip profiles for a set of stick radii");
  pr->add_option("--ra", prof.contact_radius, "Contact radius");
  pr->add_option("--rc", rc_list, "Comma-separated stick radii");
  pr->add_option("--normal-force", prof.normal_force);
  pr->add_option("--mu", prof.mu);
  pr->add_option("--shear-modulus", prof.shear_modulus);
  pr->add_option("--poisson", prof.poisson);
  pr->add_option("--samples", samples, "Samples per curve");
  pr->add_flag("--svg", svg, "Also write SVG plots");
  common(pr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim) return cmd_simulate(sim_config, out, seed, force);
    if (*det) return cmd_detect(det_seq, det_config, out, force);
    if (*ev) return cmd_evaluate(ev_est, ev_truth, out, force);
    if (*fit) return cmd_fit(fit_seq, fit_events, out, force);
    if (*pr) return cmd_profiles(prof, rc_list, samples, out, svg, force);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "detector config error: " << e.what() << "\n";
    return kDetectorConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (residual " << e.residual << ")\n";
    return kSolver;
  } catch (const FormatError& e) {
    std::cerr << "input format error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "input format error: " << e.what() << "\n";
    return kInput;
  } catch (const UnsupportedInputError& e) {
    std::cerr << "input format error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
