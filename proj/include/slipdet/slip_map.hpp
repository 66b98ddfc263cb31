#pragma once

#include <map>
#include <optional>
#include <vector>

#include "slipdet/common.hpp"

namespace slipdet {

inline constexpr double kForceFloor = 1e-3;

struct ContactFactor {
  double cf = 0.0;
  NodeState state = NodeState::NonContact;
};

// f_n <= 0 gives a non-contact node with cf = 0.
ContactFactor contact_factor(double f_t, double f_n, double mu);

struct MicroForces {
  double normal = 0.0;
  double tangential = 0.0;
  Vec3 normal_vec{};
  Vec3 tangential_vec{};
};

MicroForces micro_forces(const Vec3& f, const Vec3& n);

SlipMap make_slip_map(std::size_t frame, Grid<NodeState> states);

// Undefined (nullopt) when the map has no contact nodes.
std::optional<double> stick_slip_ratio(const SlipMap& map);
std::optional<double> stick_slip_ratio_weighted(const SlipMap& map, const Grid<Vec3>& positions);

struct Confusion {
  std::size_t stick_as_stick = 0;
  std::size_t stick_as_slip = 0;
  std::size_t slip_as_stick = 0;
  std::size_t slip_as_slip = 0;
  std::size_t total() const { return stick_as_stick + stick_as_slip + slip_as_stick + slip_as_slip; }
  double accuracy() const;
};

struct EvaluationReport {
  std::vector<Confusion> confusion;        // per frame, truth contact nodes only
  std::vector<double> sr_estimated;        // NaN when undefined
  std::vector<double> sr_truth;
  Grid<int> lag;                           // first estimated slip - first true slip
  Grid<unsigned char> lag_defined;         // node slips in truth
  Grid<unsigned char> detected;            // node slips in estimate
  double sr_rmse = 0.0;
  std::size_t lag_nodes = 0;
  std::size_t lag_within_one = 0;
  std::map<int, std::size_t> lag_histogram;  // missing detections are not counted here
  std::size_t missed = 0;

  double fraction_within_one() const;
  double accuracy(std::size_t first_frame = 0, std::size_t last_frame = ~std::size_t{0}) const;
};

EvaluationReport evaluate(const std::vector<SlipMap>& estimated, const std::vector<SlipMap>& truth);

}  // namespace slipdet
