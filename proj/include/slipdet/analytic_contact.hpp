#pragma once

#include <utility>
#include <vector>

#include "slipdet/common.hpp"

namespace slipdet::analytic {

struct ContactParams {
  double normal_force = 10.0;  // F_N
  double contact_radius = 3.0; // r_a
  double mu = 0.4;
  double shear_modulus = 1.0;  // G
  double poisson = 0.3;        // nu
};

struct SlipProfilePoint {
  double s = 0.0;
  double ds_dr = 0.0;
  bool in_stick_region = true;
};

enum class DisplacementTerms { Full, Leading };

double peak_pressure(const ContactParams& p);
double hertz_pressure(const ContactParams& p, double r);
double stick_radius(const ContactParams& p, double tangential_force);

double phi1(double beta);
double phi2(double beta);

double slip_scale_h1(const ContactParams& p);
double slip_scale_h2(const ContactParams& p, double rc);

SlipProfilePoint slip_profile(const ContactParams& p, double rc, double r);

// Tangential surface displacement of a Hertzian-form traction q0*sqrt(1-r^2/a^2) along x.
std::pair<double, double> hertz_traction_displacement(double q0, double a, double G, double nu, double x,
                                                      double y, DisplacementTerms terms = DisplacementTerms::Full);

std::pair<double, double> displacement_field(const ContactParams& p, double rc, double x, double y,
                                             DisplacementTerms terms = DisplacementTerms::Full);
double stick_displacement(const ContactParams& p, double rc);

struct SyntheticSequenceSpec {
  ContactParams params;
  std::size_t rows = 40;
  std::size_t cols = 40;
  double pitch = 0.2;
  std::vector<double> tangential_force;  // one entry per frame
  double frame_rate_hz = 30.0;
};

struct SyntheticSequence {
  std::vector<DeformationFrame> frames;
  std::vector<SlipMap> truth;
  std::vector<double> stick_radii;
};

SyntheticSequence synthesize_sequence(const SyntheticSequenceSpec& spec);

}  // namespace slipdet::analytic
