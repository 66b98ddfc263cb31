#include "slipdet/strain_pipeline.hpp"

#include <cmath>

namespace slipdet::strain {

namespace {

constexpr double kDegenerate = 1e-12;

void check_frame(const DeformationFrame& f) {
  if (!f.displacements.same_shape(f.positions)) throw DomainError("displacement grid differs from position grid");
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

GradientField deformation_gradient(const DeformationFrame& frame) {
  check_frame(frame);
  const std::size_t n = frame.rows(), m = frame.cols();
  GradientField out{Grid<Gradient>(n, m, Gradient{0, 0, 0, 0}), Grid<unsigned char>(n, m, 0)};
  const auto& P = frame.positions;
  const auto& U = frame.displacements;

  if (n == 1) {
    if (m < 2) return out;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t a = j == 0 ? 0 : j - 1;
      const std::size_t b = j == 0 ? 1 : j;
      const double dx = P(0, b)[0] - P(0, a)[0];
      if (std::abs(dx) <= kDegenerate) continue;
      out.grad(0, j) = {(U(0, b)[0] - U(0, a)[0]) / dx, 0.0, (U(0, b)[1] - U(0, a)[1]) / dx, 0.0};
      out.valid(0, j) = 1;
    }
    return out;
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = 1; j + 1 < m; ++j) {
      // Central tangents along the row and the column, solved for the in-plane Jacobian.
      const double ax = P(i, j + 1)[0] - P(i, j - 1)[0], ay = P(i, j + 1)[1] - P(i, j - 1)[1];
      const double cx = P(i + 1, j)[0] - P(i - 1, j)[0], cy = P(i + 1, j)[1] - P(i - 1, j)[1];
      const double det = ax * cy - ay * cx;
      const double scale = std::max(ax * ax + ay * ay, cx * cx + cy * cy);
      if (!(std::abs(det) > kDegenerate * scale) || !(scale > 0.0)) continue;
      const double dua_x = U(i, j + 1)[0] - U(i, j - 1)[0], dua_y = U(i, j + 1)[1] - U(i, j - 1)[1];
      const double duc_x = U(i + 1, j)[0] - U(i - 1, j)[0], duc_y = U(i + 1, j)[1] - U(i - 1, j)[1];
      // [a c]^{-1} = 1/det [cy -cx; -ay ax]
      const double i00 = cy / det, i01 = -cx / det, i10 = -ay / det, i11 = ax / det;
      out.grad(i, j) = {dua_x * i00 + duc_x * i10, dua_x * i01 + duc_x * i11, dua_y * i00 + duc_y * i10,
                        dua_y * i01 + duc_y * i11};
      out.valid(i, j) = 1;
    }
  }
  return out;
}

GreenLagrange green_lagrange(const Gradient& g) {
  const double uxx = g[0], uxy = g[1], uyx = g[2], uyy = g[3];
  GreenLagrange e;
  e.xx = uxx + 0.5 * (uxx * uxx + uyx * uyx);
  e.yy = uyy + 0.5 * (uxy * uxy + uyy * uyy);
  e.xy = 0.5 * (uxy + uyx) + 0.5 * (uxx * uxy + uyx * uyy);
  return e;
}

std::pair<double, double> principal_strains(double exx, double eyy, double exy) {
  const double mean = 0.5 * (exx + eyy);
  const double rad = std::hypot(0.5 * (exx - eyy), exy);
  return {mean + rad, mean - rad};
}

NormalField surface_normals(const DeformationFrame& frame) {
  const std::size_t n = frame.rows(), m = frame.cols();
  NormalField out{Grid<Vec3>(n, m, Vec3{0, 0, 1}), Grid<unsigned char>(n, m, 0)};
  const auto& P = frame.positions;
  if (n == 1) {
    for (auto& v : out.valid.data) v = 1;
    return out;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = 1; j + 1 < m; ++j) {
      const Vec3 tx = sub(P(i, j + 1), P(i, j - 1));
      const Vec3 ty = sub(P(i + 1, j), P(i - 1, j));
      Vec3 nv = cross(tx, ty);
      const double len = std::sqrt(dot(nv, nv));
      const double scale = std::sqrt(dot(tx, tx) * dot(ty, ty));
      if (!(len > kDegenerate * scale) || !(scale > 0.0)) continue;
      const double sgn = nv[2] < 0.0 ? -1.0 : 1.0;
      for (auto& c : nv) c *= sgn / len;
      out.normal(i, j) = nv;
      out.valid(i, j) = 1;
    }
  }
  return out;
}

Corrected correct_principal(double e1, double e2, const Vec3& n, double clamp) {
  if (!(clamp >= 1.0)) throw DomainError("clamp must be at least 1");
  Corrected c;
  const double nz = n[2];
  if (nz <= 1.0 / clamp) {
    c.factor = clamp;
    c.low_confidence = true;
  } else {
    c.factor = 1.0 / nz;
  }
  c.e1 = e1 * c.factor;
  c.e2 = e2 * c.factor;
  return c;
}

StrainField strain_field(const DeformationFrame& frame, double clamp) {
  const std::size_t n = frame.rows(), m = frame.cols();
  const GradientField grad = deformation_gradient(frame);
  const NormalField normals = surface_normals(frame);
  StrainField s;
  s.exx = s.eyy = s.exy = s.e1 = s.e2 = s.e1c = s.e2c = Grid<double>(n, m, 0.0);
  s.normal = normals.normal;
  s.valid = Grid<unsigned char>(n, m, 0);
  s.low_confidence = Grid<unsigned char>(n, m, 0);
  for (std::size_t k = 0; k < n * m; ++k) {
    if (!grad.valid.data[k] || !normals.valid.data[k]) continue;
    const GreenLagrange e = green_lagrange(grad.grad.data[k]);
    const auto [p1, p2] = principal_strains(e.xx, e.yy, e.xy);
    const Corrected c = correct_principal(p1, p2, normals.normal.data[k], clamp);
    s.exx.data[k] = e.xx;
    s.eyy.data[k] = e.yy;
    s.exy.data[k] = e.xy;
    s.e1.data[k] = p1;
    s.e2.data[k] = p2;
    s.e1c.data[k] = c.e1;
    s.e2c.data[k] = c.e2;
    s.low_confidence.data[k] = c.low_confidence;
    s.valid.data[k] = 1;
  }
  return s;
}

CStrainRateField cstrain_rate(const StrainField& prev, const StrainField& curr, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!prev.valid.same_shape(curr.valid)) throw DomainError("strain fields have different grids");
  const std::size_t n = curr.valid.rows, m = curr.valid.cols;
  CStrainRateField r;
  r.e1 = r.e2 = r.delta = r.magnitude = r.signed_rate = r.e_sum = Grid<double>(n, m, 0.0);
  r.valid = Grid<unsigned char>(n, m, 0);
  for (std::size_t k = 0; k < n * m; ++k) {
    if (!prev.valid.data[k] || !curr.valid.data[k]) continue;
    const double e1 = (curr.e1c.data[k] - prev.e1c.data[k]) / dt;
    const double e2 = (curr.e2c.data[k] - prev.e2c.data[k]) / dt;
    const double d = std::hypot(e1, e2);
    const double c1 = std::hypot(curr.e1c.data[k], curr.e2c.data[k]);
    const double c0 = std::hypot(prev.e1c.data[k], prev.e2c.data[k]);
    r.e1.data[k] = e1;
    r.e2.data[k] = e2;
    r.delta.data[k] = d;
    r.magnitude.data[k] = c1;
    r.signed_rate.data[k] = c1 > c0 ? d : (c1 < c0 ? -d : 0.0);
    r.e_sum.data[k] = e1 + e2;
    r.valid.data[k] = 1;
  }
  return r;
}

}  // namespace slipdet::strain
