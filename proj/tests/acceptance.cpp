// Acceptance run: one PASS/FAIL line per criterion with its runtime.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "slipdet/analytic_contact.hpp"
#include "slipdet/beam_sim.hpp"
#include "slipdet/friction_fit.hpp"
#include "slipdet/pipeline.hpp"
#include "slipdet/sequence_io.hpp"
#include "slipdet/slip_map.hpp"
#include "slipdet/strain_pipeline.hpp"

using namespace slipdet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s > limit_s) {
    o.pass = false;
    o.detail += " (over time limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%-4s %s  %-34s %8.3f s / %4.0f s  %s\n", id, o.pass ? "PASS" : "FAIL", name, s, limit_s,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SLIPDET_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- 1, 2: shape functions and field consistency

Outcome phi2_extremum() {
  double best = -1.0, arg = 0.0;
  for (int k = 1; k <= 400000; ++k) {
    const double b = 1.0 + 4.0 * k / 400000.0;
    if (const double v = analytic::phi2(b); v > best) {
      best = v;
      arg = b;
    }
  }
  return {std::abs(arg - 1.17) <= 0.005, fmt("argmax = %.5f", arg)};
}

Outcome analytic_consistency() {
  double worst_rel = 0.0;
  const double h = 1e-5;
  for (int k = 0; k <= 395; ++k) {
    const double b = 1.05 + 0.01 * k;
    const double fd = (analytic::phi1(b + h) - analytic::phi1(b - h)) / (2.0 * h);
    const double an = 2.0 / std::numbers::pi * analytic::phi2(b);
    worst_rel = std::max(worst_rel, std::abs(fd - an) / std::abs(an));
  }
  analytic::ContactParams p;
  double worst_abs = 0.0;
  for (double rc : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const double rigid = analytic::stick_displacement(p, rc);
    for (int k = 1; k <= 200; ++k) {
      const double r = rc + (p.contact_radius - rc) * k / 200.0;
      const double ux = analytic::displacement_field(p, rc, r, 0.0).first;
      worst_abs = std::max(worst_abs, std::abs((rigid - ux) - analytic::slip_profile(p, rc, r).s));
    }
  }
  const bool a = worst_rel <= 1e-5, b = worst_abs <= 1e-9;
  return {a && b, fmt("phi2 vs FD of phi1 rel %.2e; field vs slip_profile abs %.2e", worst_rel, worst_abs)};
}

// ---- 3: profiles command

Outcome profiles_reproduction(const fs::path& work) {
  const fs::path out = work / "profiles";
  if (run_cli("profiles --ra 3 --rc 1.5,1.25,1.0,0.75,0.5 --out " + out.string(), work / "profiles.log") != 0)
    return {false, "profiles command failed"};
  double worst = 0.0;
  for (const auto& row : read_csv(out / "peaks.csv")) {
    const double rc = std::stod(row[0]), rp = std::stod(row[1]), step = std::stod(row[3]);
    worst = std::max(worst, std::abs(rp - 1.17 * rc) / step);
  }
  std::size_t nonzero = 0;
  for (const auto& row : read_csv(out / "slip_profiles.csv"))
    if (std::stod(row[1]) <= std::stod(row[0]) && std::stod(row[2]) != 0.0) ++nonzero;
  return {worst <= 1.0 && nonzero == 0,
          fmt("worst |r_peak - 1.17 rc| = %.2f steps; nonzero slip inside rc: %.0f", worst, double(nonzero))};
}

// ---- 4, 5, 7: beam chain cases

beam::ChainParams chain_params() {
  beam::ChainParams p;
  p.nodes = 31;
  p.normal_load = 0.1;
  return p;
}

Outcome case1_timing() {
  const auto tr = beam::run_case(beam::make_chain(chain_params()), {{6, 0.0, 1.0}, {120, 0.01, 1.0}});
  const auto res = run_detection(beam::trace_frames(tr, 30.0), {});
  const auto rep = evaluate(res.maps, beam::trace_truth(tr));
  const double frac = rep.fraction_within_one();
  return {rep.lag_nodes >= 21 && frac >= 0.95,
          fmt("%.0f nodes, within one step %.3f", double(rep.lag_nodes), frac)};
}

constexpr std::size_t kRamp1 = 25, kNormal = 10, kHold = 5;
const beam::LoadSchedule kCase2 = {
    {6, 0.0, 1.0}, {kRamp1, 0.01, 1.0}, {kNormal, 0.0, 2.0}, {kHold, 0.0, 2.0}, {80, 0.01, 2.0}};
constexpr std::size_t kNormalStart = 6 + kRamp1, kSecondRamp = kNormalStart + kNormal + kHold;

Outcome case_signatures() {
  std::string detail;
  bool ok2 = true;
  {
    const auto tr = beam::run_case(beam::make_chain(chain_params()), kCase2);
    const auto res = run_detection(beam::trace_frames(tr, 30.0), {});
    std::size_t checked = 0, with_neg = 0, lower_secondary = 0;
    for (std::size_t j = 0; j < tr.n; ++j) {
      if (tr.state[kNormalStart - 1][j] != NodeState::Slip) continue;
      std::size_t tt = kNormalStart;
      while (tt < kSecondRamp && tr.state[tt][j] == NodeState::Slip) ++tt;
      if (tt == kSecondRamp) continue;
      ++checked;
      double main_peak = 0.0, after = 0.0;
      bool neg = false;
      for (const auto& e : res.events) {
        if (e.j != j) continue;
        if (e.type == detect::EventType::PosExtreme) {
          double& peak = e.frame < tt ? main_peak : after;
          peak = std::max(peak, e.value);
        }
        if (e.type == detect::EventType::NegExtreme && e.frame + 1 >= tt && e.frame <= tt + 1) neg = true;
      }
      with_neg += neg;
      lower_secondary += after < main_peak;
    }
    ok2 = checked > 0 && with_neg == checked && lower_secondary == checked;
    detail += fmt("case 2: %.0f/%.0f nodes with neg at slip->stick, %.0f secondary lower", double(with_neg),
                  double(checked), double(lower_secondary));
  }
  bool ok3 = true;
  {
    const beam::LoadSchedule sched = {{6, 0.0, 1.0}, {25, 0.01, 1.0}, {60, -0.01, 1.0}};
    const std::size_t reverse = 31;
    const auto tr = beam::run_case(beam::make_chain(chain_params()), sched);
    const auto res = run_detection(beam::trace_frames(tr, 30.0), {});
    std::size_t checked = 0, ordered = 0;
    for (std::size_t j = 0; j < tr.n; ++j) {
      bool forward = false, again = false;
      for (std::size_t t = 0; t < reverse; ++t) forward |= tr.state[t][j] == NodeState::Slip;
      for (std::size_t t = reverse + 1; t < tr.steps(); ++t)
        again |= tr.state[t - 1][j] == NodeState::Stick && tr.state[t][j] == NodeState::Slip;
      if (!forward || !again) continue;
      ++checked;
      int stage = 0;
      for (const auto& e : res.events) {
        if (e.j != j) continue;
        if (stage == 0 && e.type == detect::EventType::PosExtreme && e.frame < reverse) stage = 1;
        else if (stage == 1 && e.type == detect::EventType::NegExtreme) stage = 2;
        else if (stage == 2 && e.type == detect::EventType::PosExtreme) stage = 3;
      }
      ordered += stage == 3;
    }
    ok3 = checked > 0 && ordered == checked;
    detail += fmt("; case 3: %.0f/%.0f re-slipping nodes show pos, neg, pos", double(ordered), double(checked));
  }
  return {ok2 && ok3, detail};
}

Outcome repeated_loading() {
  const auto tr = beam::run_case(beam::make_chain(chain_params()), kCase2);
  const auto res = run_detection(beam::trace_frames(tr, 30.0), {});
  const auto rep = evaluate(res.maps, beam::trace_truth(tr));
  const double acc = rep.accuracy(kSecondRamp);
  std::size_t slipping = 0, returned = 0;
  for (std::size_t j = 0; j < tr.n; ++j) {
    if (res.maps[kNormalStart - 1].states(0, j) != NodeState::Slip) continue;
    ++slipping;
    returned += res.maps[kSecondRamp - 1].states(0, j) == NodeState::Stick;
  }
  std::size_t truth_returned = 0;
  for (std::size_t j = 0; j < tr.n; ++j)
    truth_returned += tr.state[kNormalStart - 1][j] == NodeState::Slip && tr.state[kSecondRamp - 1][j] == NodeState::Stick;
  return {acc >= 0.90 && slipping > 0 && returned == slipping,
          fmt("second ramp accuracy %.3f; estimated return to stick %.0f/%.0f", acc, double(returned),
              double(slipping)) +
              fmt(" (truth %.0f)", double(truth_returned))};
}

// ---- 6: analytic ramp end to end

Outcome spatial_fidelity() {
  analytic::SyntheticSequenceSpec spec;
  spec.rows = spec.cols = 40;
  spec.pitch = 0.2;
  const double top = 0.9 * spec.params.mu * spec.params.normal_force;
  spec.tangential_force.assign(6, 0.0);
  for (int k = 0; k < 24; ++k) spec.tangential_force.push_back(top * k / 23.0);
  const auto seq = analytic::synthesize_sequence(spec);
  const auto res = run_detection(seq.frames, {});
  double se = 0.0, worst_rise = 0.0, prev = 1.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < res.maps.size(); ++t) {
    const auto est = stick_slip_ratio(res.maps[t]);
    if (!est) continue;
    const double truth = std::pow(seq.stick_radii[t] / spec.params.contact_radius, 2);
    se += (*est - truth) * (*est - truth);
    ++n;
    worst_rise = std::max(worst_rise, *est - prev);
    prev = *est;
  }
  const double rmse = n ? std::sqrt(se / double(n)) : 1.0;
  return {n == res.maps.size() && rmse < 0.10 && worst_rise <= 0.02,
          fmt("%.0f frames, RMSE %.4f, worst step increase %.4f", double(res.maps.size()), rmse, worst_rise)};
}

// ---- 8: exhaustive oracle

bool oracle_step(const beam::BeamChain& prev, double du, double scale, std::vector<NodeState>& state) {
  const std::size_t n = prev.n;
  const double u = prev.u + du;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = prev.b[i];
    if (i > 0) K(i, i) += prev.k, K(i, i - 1) = -prev.k;
    if (i + 1 < n) K(i, i) += prev.k, K(i, i + 1) = -prev.k;
  }
  Eigen::VectorXd drive(n), g(n), s0(n);
  for (std::size_t i = 0; i < n; ++i) {
    drive[i] = prev.b[i] * u;
    g[i] = prev.mu * prev.fn[i] * scale;
    s0[i] = prev.slip[i];
  }
  int solutions = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = s0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) {
        A.row(i) = K.row(i);
        rhs[i] = drive[i] - g[i];
      }
    const Eigen::VectorXd s = A.partialPivLu().solve(rhs);
    const Eigen::VectorXd f = drive - K * s;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      ok = (mask >> i & 1u) ? s[i] - s0[i] >= -1e-12 : std::abs(f[i]) < g[i] * (1.0 - 1e-9);
    if (!ok) continue;
    ++solutions;
    state.assign(n, NodeState::Stick);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) state[i] = NodeState::Slip;
  }
  return solutions == 1;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> nodes(3, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t steps = 0, mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    beam::ChainParams p;
    p.nodes = static_cast<std::size_t>(nodes(rng));
    p.bending = 0.05 + 0.5 * unit(rng);
    p.normal_load = 0.05 + 0.2 * unit(rng);
    auto c = beam::make_chain(p);
    double scale = 1.0;
    for (int step = 0; step < 25; ++step) {
      double du = 0.0;
      if (unit(rng) < 0.2)
        scale *= 1.0 + 0.3 * unit(rng);
      else
        du = 0.002 + 0.03 * unit(rng);
      std::vector<NodeState> ref;
      const bool unique = oracle_step(c, du, scale, ref);
      c = beam::quasi_static_step(c, du, scale);
      ++steps;
      if (!unique || ref != c.state) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%.0f steps, %.0f mismatches", double(steps), double(mismatches))};
}

// ---- 9: strain invariants

using Field = std::function<Vec3(double, double)>;

DeformationFrame grid_frame(std::size_t n, double h, const Field& disp, const Field& height = nullptr) {
  DeformationFrame f;
  f.positions = Grid<Vec3>(n, n);
  f.displacements = Grid<Vec3>(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = double(j) * h, y = double(i) * h;
      f.positions(i, j) = {x, y, height ? height(x, y)[2] : 0.0};
      f.displacements(i, j) = disp(x, y);
    }
  return f;
}

Outcome strain_invariants() {
  double worst_rot = 0.0;
  for (double th : {0.3, 1.2, 2.7, -0.8}) {
    const double c = std::cos(th), s = std::sin(th);
    const Field rigid = [&](double x, double y) { return Vec3{c * x - s * y - x, s * x + c * y - y, 0.0}; };
    const auto sf = strain::strain_field(grid_frame(15, 0.2, rigid));
    for (std::size_t k = 0; k < sf.valid.data.size(); ++k)
      if (sf.valid.data[k])
        worst_rot = std::max({worst_rot, std::abs(sf.exx.data[k]), std::abs(sf.eyy.data[k]), std::abs(sf.exy.data[k])});
  }

  const Field u = [](double x, double y) {
    return Vec3{0.05 * std::sin(x) * std::cos(y), 0.04 * std::cos(x + 0.5 * y), 0.0};
  };
  const double exact_grad = 0.05 * std::cos(1.0) * std::cos(1.0);
  const Field zero = [](double, double) { return Vec3{0, 0, 0}; };
  const Field surf = [](double x, double y) { return Vec3{0, 0, 0.3 * std::sin(x) * std::sin(y)}; };
  const double fx = 0.3 * std::cos(1.0) * std::sin(1.0), fy = fx;
  const double len = std::sqrt(fx * fx + fy * fy + 1.0);
  const Vec3 exact_n{-fx / len, -fy / len, 1.0 / len};
  std::vector<double> eg, en;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const std::size_t n = static_cast<std::size_t>(std::lround(2.0 / h)) + 1, mid = (n - 1) / 2;
    eg.push_back(std::abs(strain::deformation_gradient(grid_frame(n, h, u)).grad(mid, mid)[0] - exact_grad));
    const Vec3 v = strain::surface_normals(grid_frame(n, h, zero, surf)).normal(mid, mid);
    en.push_back(std::sqrt(std::pow(v[0] - exact_n[0], 2) + std::pow(v[1] - exact_n[1], 2) +
                           std::pow(v[2] - exact_n[2], 2)));
  }
  double order = 10.0;
  for (std::size_t k = 1; k < eg.size(); ++k)
    order = std::min({order, std::log2(eg[k - 1] / eg[k]), std::log2(en[k - 1] / en[k])});
  return {worst_rot < 1e-12 && order >= 1.8, fmt("rotation residual %.2e, minimum observed order %.3f", worst_rot, order)};
}

// ---- 10: friction regression

Outcome friction_round_trip() {
  const double b0 = 0.35, b1 = 0.02, b2 = -0.04, sigma = 0.01;
  const std::size_t side = 25;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> vel(0.0, 5.0), load(0.5, 3.0);
  std::normal_distribution<double> noise(0.0, sigma);
  const double dt = 1.0 / 30.0;
  std::vector<DeformationFrame> frames(3);
  for (int k = 0; k < 3; ++k) {
    frames[k].t = k * dt;
    frames[k].positions = Grid<Vec3>(side, side);
    frames[k].displacements = Grid<Vec3>(side, side, Vec3{0, 0, 0});
    frames[k].forces = Grid<Vec3>(side, side, Vec3{0, 0, 0});
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) frames[k].positions(i, j) = {double(j), double(i), 0.0};
  }
  std::vector<detect::Event> events;
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) {
      const double v = vel(rng), fn = load(rng), mu = b0 + b1 * v + b2 * fn + noise(rng);
      const double ang = 0.7 * double(i + j);
      frames[1].displacements(i, j) = {dt * v * std::cos(ang), dt * v * std::sin(ang), 0.0};
      frames[2].displacements(i, j) = {2.0 * dt * v * std::cos(ang), 2.0 * dt * v * std::sin(ang), 0.0};
      frames[1].forces(i, j) = {mu * fn * std::cos(ang), mu * fn * std::sin(ang), -fn};
      events.push_back({1, dt, i, j, detect::EventType::PosExtreme, 1.0, 1.0});
    }
  const auto samples = friction::collect_samples(events, frames);
  const auto fit = friction::fit_linear(samples);
  const double truth[3] = {b0, b1, b2};
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(fit.beta[c] - truth[c]) / fit.std_error[c]);
  const double srel = std::abs(fit.sigma - sigma) / sigma;
  return {samples.size() >= 500 && worst <= 3.0 && srel <= 0.2,
          fmt("%.0f samples, worst |error|/SE %.2f, sigma error %.1f%%", double(samples.size()), worst, 100.0 * srel)};
}

// ---- 11: format and CLI determinism

Outcome plumbing(const fs::path& work) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> d(-5.0f, 5.0f);
  std::vector<DeformationFrame> frames(5);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    frames[t].t = double(t) / 30.0;
    frames[t].positions = Grid<Vec3>(7, 6);
    frames[t].displacements = Grid<Vec3>(7, 6);
    frames[t].forces = Grid<Vec3>(7, 6);
    frames[t].contact = Grid<unsigned char>(7, 6);
    for (std::size_t k = 0; k < 42; ++k) {
      frames[t].positions.data[k] = {d(rng), d(rng), d(rng)};
      frames[t].displacements.data[k] = {d(rng), d(rng), d(rng)};
      frames[t].forces.data[k] = {d(rng), d(rng), d(rng)};
      frames[t].contact.data[k] = d(rng) > 0.0f;
    }
  }
  io::Sequence seq;
  seq.header = io::make_header(frames, 7, 6, 30.0);
  seq.frames = frames;
  io::write_sequence(work / "rt.json", seq);
  const auto back = io::read_sequence(work / "rt.json");
  bool exact = back.frames.size() == frames.size();
  for (std::size_t t = 0; exact && t < frames.size(); ++t)
    exact = back.frames[t].t == frames[t].t && back.frames[t].positions.data == frames[t].positions.data &&
            back.frames[t].displacements.data == frames[t].displacements.data &&
            back.frames[t].forces.data == frames[t].forces.data && back.frames[t].contact.data == frames[t].contact.data;

  std::ofstream(work / "scenario.json") << R"({
    "model": "beam_chain", "frame_rate_hz": 30, "noise_sigma": 1e-7,
    "params": {"nodes": 31, "normal_load": 0.1},
    "schedule": [{"duration": 6}, {"duration": 60, "velocity": 0.01}]
  })";
  for (const char* tag : {"a", "b"}) {
    const fs::path r = work / tag;
    if (run_cli("simulate --seed 42 --config " + (work / "scenario.json").string() + " --out " + (r / "sim").string(),
                work / "sim.log") != 0 ||
        run_cli("detect --sequence " + (r / "sim/frames.json").string() + " --out " + (r / "det").string(),
                work / "det.log") != 0 ||
        run_cli("evaluate --estimated " + (r / "det/states.csv").string() + " --truth " +
                    (r / "sim/states.csv").string() + " --out " + (r / "eval").string(),
                work / "eval.log") != 0)
      return {false, "CLI pipeline failed"};
  }
  std::size_t compared = 0, differ = 0;
  for (const auto& entry : fs::recursive_directory_iterator(work / "a")) {
    if (!entry.is_regular_file()) continue;
    ++compared;
    differ += slurp(entry.path()) != slurp(work / "b" / fs::relative(entry.path(), work / "a"));
  }
  return {exact && compared > 0 && differ == 0,
          std::string(exact ? "bit-exact round trip" : "round trip differs") +
              fmt("; %.0f output files, %.0f differ", double(compared), double(differ))};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("slipdet_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  report("1", "phi2 extremum", 1, phi2_extremum);
  report("2", "analytic consistency", 5, analytic_consistency);
  report("3", "slip profile peaks", 1, [&] { return profiles_reproduction(work); });
  report("4", "case 1 onset timing", 10, case1_timing);
  report("5", "case 2/3 signatures", 10, case_signatures);
  report("6", "analytic ramp stick-slip ratio", 30, spatial_fidelity);
  report("7", "repeated loading", 30, repeated_loading);
  report("8", "exhaustive oracle equivalence", 60, oracle_equivalence);
  report("9", "strain invariants", 10, strain_invariants);
  report("10", "friction round trip", 30, friction_round_trip);
  report("11", "plumbing determinism", 10, [&] { return plumbing(work); });

  fs::remove_all(work);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
