#include "slipdet/slip_map.hpp"

#include <cmath>
#include <limits>

namespace slipdet {

const char* to_string(NodeState s) {
  switch (s) {
    case NodeState::NonContact: return "non_contact";
    case NodeState::Stick: return "stick";
    case NodeState::Slip: return "slip";
  }
  return "?";
}

ContactFactor contact_factor(double f_t, double f_n, double mu) {
  if (!(mu > 0.0)) throw DomainError("friction coefficient must be positive");
  if (!(f_n > 0.0)) return {};
  const double ft = std::abs(f_t) < kForceFloor ? 0.0 : std::abs(f_t);
  ContactFactor out;
  out.cf = ft / (mu * f_n);
  out.state = out.cf >= 1.0 ? NodeState::Slip : NodeState::Stick;
  return out;
}

MicroForces micro_forces(const Vec3& f, const Vec3& n) {
  if (std::abs(std::sqrt(dot(n, n)) - 1.0) > 1e-9) throw DomainError("normal is not a unit vector");
  const double fn = dot(f, n);
  MicroForces out;
  for (int k = 0; k < 3; ++k) {
    out.normal_vec[k] = -fn * n[k];
    out.tangential_vec[k] = -f[k] + fn * n[k];
  }
  out.normal = std::sqrt(dot(out.normal_vec, out.normal_vec));
  out.tangential = std::sqrt(dot(out.tangential_vec, out.tangential_vec));
  return out;
}

SlipMap make_slip_map(std::size_t frame, Grid<NodeState> states) {
  SlipMap m;
  m.frame = frame;
  m.states = std::move(states);
  for (NodeState s : m.states.data) {
    if (s == NodeState::Stick) ++m.stick_count;
    if (s == NodeState::Slip) ++m.slip_count;
  }
  m.contact_count = m.stick_count + m.slip_count;
  m.ratio_defined = m.contact_count > 0;
  m.ratio = m.ratio_defined ? static_cast<double>(m.stick_count) / static_cast<double>(m.contact_count) : 0.0;
  return m;
}

std::optional<double> stick_slip_ratio(const SlipMap& map) {
  std::size_t stick = 0, contact = 0;
  for (NodeState s : map.states.data) {
    if (s == NodeState::NonContact) continue;
    ++contact;
    if (s == NodeState::Stick) ++stick;
  }
  if (contact == 0) return std::nullopt;
  return static_cast<double>(stick) / static_cast<double>(contact);
}

namespace {

double span(const Grid<Vec3>& p, std::size_t i, std::size_t j, int axis) {
  // Half distance to the neighbors on each side, one-sided at the border.
  const std::size_t n = axis == 0 ? p.cols : p.rows;
  const std::size_t k = axis == 0 ? j : i;
  if (n < 2) return 1.0;
  auto at = [&](std::size_t kk) { return axis == 0 ? p(i, kk)[0] : p(kk, j)[1]; };
  const double lo = k > 0 ? at(k) - at(k - 1) : at(k + 1) - at(k);
  const double hi = k + 1 < n ? at(k + 1) - at(k) : at(k) - at(k - 1);
  return 0.5 * (std::abs(lo) + std::abs(hi));
}

}  // namespace

std::optional<double> stick_slip_ratio_weighted(const SlipMap& map, const Grid<Vec3>& positions) {
  if (!map.states.same_shape(positions)) throw DomainError("grid mismatch");
  double stick = 0.0, contact = 0.0;
  for (std::size_t i = 0; i < positions.rows; ++i) {
    for (std::size_t j = 0; j < positions.cols; ++j) {
      const NodeState s = map.states(i, j);
      if (s == NodeState::NonContact) continue;
      const double a = span(positions, i, j, 0) * span(positions, i, j, 1);
      contact += a;
      if (s == NodeState::Stick) stick += a;
    }
  }
  if (!(contact > 0.0)) return std::nullopt;
  return stick / contact;
}

double Confusion::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 1.0 : static_cast<double>(stick_as_stick + slip_as_slip) / static_cast<double>(n);
}

double EvaluationReport::fraction_within_one() const {
  return lag_nodes == 0 ? 1.0 : static_cast<double>(lag_within_one) / static_cast<double>(lag_nodes);
}

double EvaluationReport::accuracy(std::size_t first_frame, std::size_t last_frame) const {
  std::size_t hit = 0, n = 0;
  for (std::size_t t = first_frame; t < confusion.size() && t <= last_frame; ++t) {
    hit += confusion[t].stick_as_stick + confusion[t].slip_as_slip;
    n += confusion[t].total();
  }
  return n == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(n);
}

EvaluationReport evaluate(const std::vector<SlipMap>& estimated, const std::vector<SlipMap>& truth) {
  if (estimated.size() != truth.size()) throw DomainError("sequences have different lengths");
  EvaluationReport rep;
  if (truth.empty()) return rep;
  const std::size_t rows = truth.front().states.rows, cols = truth.front().states.cols;
  constexpr int kNone = std::numeric_limits<int>::max();
  Grid<int> first_true(rows, cols, kNone), first_est(rows, cols, kNone);
  double se = 0.0;
  std::size_t sr_frames = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t t = 0; t < truth.size(); ++t) {
    const auto& tm = truth[t];
    const auto& em = estimated[t];
    if (!tm.states.same_shape(rows, cols) || !em.states.same_shape(rows, cols))
      throw DomainError("grid mismatch between sequences");
    if (tm.frame != em.frame) throw DomainError("frame indices are not aligned");
    Confusion c;
    for (std::size_t k = 0; k < tm.states.size(); ++k) {
      const NodeState ts = tm.states.data[k];
      const NodeState es = em.states.data[k];
      if (es == NodeState::Slip && first_est.data[k] == kNone) first_est.data[k] = static_cast<int>(t);
      if (ts == NodeState::NonContact) continue;
      if (ts == NodeState::Slip && first_true.data[k] == kNone) first_true.data[k] = static_cast<int>(t);
      const bool est_slip = es == NodeState::Slip;
      if (ts == NodeState::Stick) (est_slip ? c.stick_as_slip : c.stick_as_stick)++;
      else (est_slip ? c.slip_as_slip : c.slip_as_stick)++;
    }
    rep.confusion.push_back(c);
    const auto sre = stick_slip_ratio(em);
    const auto srt = stick_slip_ratio(tm);
    rep.sr_estimated.push_back(sre ? *sre : nan);
    rep.sr_truth.push_back(srt ? *srt : nan);
    if (sre && srt) {
      se += (*sre - *srt) * (*sre - *srt);
      ++sr_frames;
    }
  }
  rep.sr_rmse = sr_frames ? std::sqrt(se / static_cast<double>(sr_frames)) : 0.0;

  rep.lag = Grid<int>(rows, cols, 0);
  rep.lag_defined = Grid<unsigned char>(rows, cols, 0);
  rep.detected = Grid<unsigned char>(rows, cols, 0);
  for (std::size_t k = 0; k < first_true.size(); ++k) {
    rep.detected.data[k] = first_est.data[k] != kNone;
    if (first_true.data[k] == kNone) continue;
    rep.lag_defined.data[k] = 1;
    ++rep.lag_nodes;
    if (first_est.data[k] == kNone) {
      ++rep.missed;
      continue;
    }
    const int lag = first_est.data[k] - first_true.data[k];
    rep.lag.data[k] = lag;
    rep.lag_histogram[lag]++;
    if (std::abs(lag) <= 1) ++rep.lag_within_one;
  }
  return rep;
}

}  // namespace slipdet
