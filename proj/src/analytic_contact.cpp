#include "slipdet/analytic_contact.hpp"

#include <cmath>
#include <numbers>

#include "slipdet/slip_map.hpp"

namespace slipdet::analytic {

namespace {

constexpr double kPi = std::numbers::pi;

void check_params(const ContactParams& p) {
  if (!(p.normal_force > 0.0) || !(p.contact_radius > 0.0) || !(p.mu > 0.0) || !(p.shear_modulus > 0.0))
    throw DomainError("contact parameters must be positive");
  if (!(p.poisson >= 0.0 && p.poisson < 0.5)) throw DomainError("poisson ratio outside [0, 0.5)");
}

}  // namespace

double peak_pressure(const ContactParams& p) {
  return 3.0 * p.normal_force / (2.0 * kPi * p.contact_radius * p.contact_radius);
}

double hertz_pressure(const ContactParams& p, double r) {
  if (r < 0.0 || r > p.contact_radius) throw DomainError("radius outside contact disk");
  const double q = r / p.contact_radius;
  return peak_pressure(p) * std::sqrt(std::max(0.0, 1.0 - q * q));
}

double stick_radius(const ContactParams& p, double tangential_force) {
  check_params(p);
  if (tangential_force < 0.0) throw DomainError("negative tangential force");
  const double limit = p.mu * p.normal_force;
  if (tangential_force >= limit) throw MacroSlipError("tangential force reaches the friction limit");
  return p.contact_radius * std::cbrt(1.0 - tangential_force / limit);
}

double phi1(double beta) {
  if (beta < 0.0) throw DomainError("beta must be non-negative");
  if (beta <= 1.0) return 0.0;
  const double ib = 1.0 / beta;
  const double ib2 = ib * ib;
  return (1.0 - 2.0 / kPi * std::asin(ib)) * (1.0 - 2.0 * ib2) + 2.0 / kPi * ib * std::sqrt(1.0 - ib2);
}

double phi2(double beta) {
  if (beta < 0.0) throw DomainError("beta must be non-negative");
  if (beta <= 1.0) return 0.0;
  return 4.0 / (beta * beta * beta) * (kPi / 2.0 - std::asin(1.0 / beta));
}

double slip_scale_h1(const ContactParams& p) {
  return 3.0 * (2.0 - p.poisson) * p.mu * p.normal_force / (16.0 * p.shear_modulus * p.contact_radius);
}

double slip_scale_h2(const ContactParams& p, double rc) { return 2.0 * slip_scale_h1(p) / (kPi * rc); }

SlipProfilePoint slip_profile(const ContactParams& p, double rc, double r) {
  check_params(p);
  if (rc > p.contact_radius) throw DomainError("stick radius exceeds contact radius");
  if (!(rc > 0.0)) throw DomainError("stick radius must be positive");
  if (r < 0.0) throw DomainError("negative radius");
  SlipProfilePoint out;
  out.in_stick_region = r <= rc;
  if (out.in_stick_region) return out;
  const double beta = r / rc;
  out.s = slip_scale_h1(p) * phi1(beta);
  out.ds_dr = slip_scale_h2(p, rc) * phi2(beta);
  return out;
}

std::pair<double, double> hertz_traction_displacement(double q0, double a, double G, double nu, double x,
                                                      double y, DisplacementTerms terms) {
  const double r2 = x * x + y * y;
  if (r2 <= a * a) {
    const double c = kPi * q0 / (32.0 * G * a);
    const double lead = c * (2.0 - nu) * (4.0 * a * a - 2.0 * r2);
    if (terms == DisplacementTerms::Leading) return {lead, 0.0};
    const double ux = lead + c * nu * (x * x - y * y);
    return {ux, c * 2.0 * nu * x * y};
  }
  const double r = std::sqrt(r2);
  const double t = a / r;
  const double as = std::asin(t);
  const double S = std::sqrt(1.0 - t * t);
  const double c = q0 / (8.0 * G * a);
  const double lead = (2.0 - nu) * ((2.0 * a * a - r2) * as + a * r * S);
  if (terms == DisplacementTerms::Leading) return {c * lead, 0.0};
  const double w = r2 * as + (2.0 * a * a - r2) * S * t;
  const double ux = c * (lead + 0.5 * nu * w * (x * x - y * y) / r2);
  const double uy = c * nu * w * x * y / r2;
  return {ux, uy};
}

double stick_displacement(const ContactParams& p, double rc) {
  const double ra = p.contact_radius;
  return (2.0 - p.poisson) * kPi * p.mu * peak_pressure(p) * (ra * ra - rc * rc) / (8.0 * p.shear_modulus * ra);
}

std::pair<double, double> displacement_field(const ContactParams& p, double rc, double x, double y,
                                             DisplacementTerms terms) {
  check_params(p);
  const double ra = p.contact_radius;
  if (!(rc > 0.0) || rc > ra) throw DomainError("stick radius outside (0, r_a]");
  const double r2 = x * x + y * y;
  if (r2 > ra * ra) throw DomainError("point outside contact disk");
  if (r2 <= rc * rc) return {stick_displacement(p, rc), 0.0};
  const double ft1 = p.mu * peak_pressure(p);
  const double ft2 = ft1 * rc / ra;
  const auto [u1x, u1y] = hertz_traction_displacement(ft1, ra, p.shear_modulus, p.poisson, x, y, terms);
  const auto [u2x, u2y] = hertz_traction_displacement(ft2, rc, p.shear_modulus, p.poisson, x, y, terms);
  return {u1x - u2x, u1y - u2y};
}

SyntheticSequence synthesize_sequence(const SyntheticSequenceSpec& spec) {
  check_params(spec.params);
  if (spec.rows == 0 || spec.cols == 0 || !(spec.pitch > 0.0)) throw DomainError("empty grid");
  if (!(spec.frame_rate_hz > 0.0)) throw DomainError("frame rate must be positive");
  const auto& p = spec.params;
  const double limit = p.mu * p.normal_force;
  for (double ft : spec.tangential_force) {
    if (ft < 0.0) throw DomainError("negative tangential force in schedule");
    if (ft >= limit) throw MacroSlipError("schedule reaches macro slip");
  }

  const double ra = p.contact_radius;
  const double fn = peak_pressure(p);
  const double area = spec.pitch * spec.pitch;
  const double x0 = -0.5 * static_cast<double>(spec.cols - 1) * spec.pitch;
  const double y0 = -0.5 * static_cast<double>(spec.rows - 1) * spec.pitch;

  SyntheticSequence out;
  for (std::size_t k = 0; k < spec.tangential_force.size(); ++k) {
    const double rc = stick_radius(p, spec.tangential_force[k]);
    out.stick_radii.push_back(rc);
    DeformationFrame f;
    f.t = static_cast<double>(k) / spec.frame_rate_hz;
    f.positions = Grid<Vec3>(spec.rows, spec.cols);
    f.displacements = Grid<Vec3>(spec.rows, spec.cols, Vec3{0, 0, 0});
    f.forces = Grid<Vec3>(spec.rows, spec.cols, Vec3{0, 0, 0});
    f.contact = Grid<unsigned char>(spec.rows, spec.cols, 0);
    Grid<NodeState> states(spec.rows, spec.cols, NodeState::NonContact);
    for (std::size_t i = 0; i < spec.rows; ++i) {
      for (std::size_t j = 0; j < spec.cols; ++j) {
        const double x = x0 + static_cast<double>(j) * spec.pitch;
        const double y = y0 + static_cast<double>(i) * spec.pitch;
        f.positions(i, j) = {x, y, 0.0};
        const double r = std::hypot(x, y);
        if (r > ra) continue;
        const auto [ux, uy] = displacement_field(p, rc, x, y);
        f.displacements(i, j) = {ux, uy, 0.0};
        const double press = hertz_pressure(p, r);
        double tx = p.mu * press;
        if (r <= rc) tx -= p.mu * fn * (rc / ra) * std::sqrt(std::max(0.0, 1.0 - (r / rc) * (r / rc)));
        f.forces(i, j) = {tx * area, 0.0, -press * area};
        f.contact(i, j) = 1;
        states(i, j) = r <= rc ? NodeState::Stick : NodeState::Slip;
      }
    }
    out.frames.push_back(std::move(f));
    out.truth.push_back(make_slip_map(k, std::move(states)));
  }
  return out;
}

}  // namespace slipdet::analytic
