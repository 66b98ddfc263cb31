#include "slipdet/friction_fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "slipdet/slip_map.hpp"
#include "slipdet/strain_pipeline.hpp"

namespace slipdet::friction {

std::vector<FrictionSample> collect_samples(const std::vector<detect::Event>& events,
                                            const std::vector<DeformationFrame>& frames) {
  std::vector<FrictionSample> out;
  bool any = false;
  for (const auto& e : events) any = any || e.type == detect::EventType::PosExtreme;
  if (!any) return out;
  for (const auto& f : frames)
    if (!f.has_forces()) throw UnsupportedInputError("friction samples need force fields");

  std::vector<strain::NormalField> normals(frames.size());
  std::vector<char> have(frames.size(), 0);
  for (const auto& e : events) {
    if (e.type != detect::EventType::PosExtreme) continue;
    if (e.frame >= frames.size()) throw DomainError("event frame outside the sequence");
    const std::size_t t = e.frame;
    if (!have[t]) {
      normals[t] = strain::surface_normals(frames[t]);
      have[t] = 1;
    }
    const auto& cur = frames[t];
    if (e.i >= cur.rows() || e.j >= cur.cols()) throw DomainError("event node outside the grid");
    const Vec3 n = normals[t].normal(e.i, e.j);

    // Central difference over adjacent frames, one-sided at the ends.
    const std::size_t a = t > 0 ? t - 1 : t;
    const std::size_t b = t + 1 < frames.size() ? t + 1 : t;
    if (a == b) continue;
    const double dt = frames[b].t - frames[a].t;
    Vec3 vel;
    for (int k = 0; k < 3; ++k)
      vel[k] = (frames[b].displacements(e.i, e.j)[k] - frames[a].displacements(e.i, e.j)[k]) / dt;
    const double vn = dot(vel, n);
    for (int k = 0; k < 3; ++k) vel[k] -= vn * n[k];

    const MicroForces mf = micro_forces(cur.forces(e.i, e.j), n);
    if (!(mf.normal > kForceFloor)) continue;
    FrictionSample s;
    s.v = std::sqrt(dot(vel, vel));
    s.f_n = mf.normal;
    s.mu = mf.tangential / mf.normal;
    s.i = e.i;
    s.j = e.j;
    s.frame = t;
    out.push_back(s);
  }
  return out;
}

FrictionModel fit_linear(const std::vector<FrictionSample>& samples) {
  const std::size_t n = samples.size();
  if (n < kMinSamples)
    throw DomainError("friction fit needs at least " + std::to_string(kMinSamples) + " samples");
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t k = 0; k < n; ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = samples[k].v;
    X(k, 2) = samples[k].f_n;
    y(k) = samples[k].mu;
  }
  const char* names[] = {"intercept", "velocity", "normal_force"};
  // Columns are centered before the rank test so a constant regressor is caught by name.
  for (int c = 1; c < 3; ++c) {
    const Eigen::VectorXd col = X.col(c);
    const double mean = col.mean();
    const double spread = (col.array() - mean).abs().maxCoeff();
    if (!(spread > 1e-12 * std::max(1.0, std::abs(mean))))
      throw DegenerateDesignError(std::string("regressor '") + names[c] + "' is constant", names[c]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) {
    const int worst = qr.colsPermutation().indices()(2);
    throw DegenerateDesignError(std::string("regressor '") + names[worst] + "' is collinear with the others",
                                names[worst]);
  }
  const Eigen::Vector3d beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  const double dof = static_cast<double>(n) - 3.0;
  const double s2 = resid.squaredNorm() / dof;
  const Eigen::Matrix3d cov = (X.transpose() * X).inverse() * s2;

  FrictionModel m;
  for (int c = 0; c < 3; ++c) {
    m.beta[c] = beta(c);
    m.std_error[c] = std::sqrt(std::max(0.0, cov(c, c)));
  }
  m.sigma = std::sqrt(s2);
  m.sample_count = n;
  return m;
}

}  // namespace slipdet::friction
