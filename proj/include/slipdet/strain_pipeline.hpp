#pragma once

#include <array>
#include <utility>

#include "slipdet/common.hpp"

namespace slipdet::strain {

// du_x/dx, du_x/dy, du_y/dx, du_y/dy
using Gradient = std::array<double, 4>;

struct GradientField {
  Grid<Gradient> grad;
  Grid<unsigned char> valid;
};

struct GreenLagrange {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

struct NormalField {
  Grid<Vec3> normal;
  Grid<unsigned char> valid;
};

struct Corrected {
  double e1 = 0.0;
  double e2 = 0.0;
  double factor = 1.0;
  bool low_confidence = false;
};

struct StrainField {
  Grid<double> exx, eyy, exy;
  Grid<double> e1, e2;    // principal, e1 >= e2
  Grid<double> e1c, e2c;  // corrected
  Grid<Vec3> normal;
  Grid<unsigned char> valid;
  Grid<unsigned char> low_confidence;
};

struct CStrainRateField {
  Grid<double> e1, e2;      // principal increments per second
  Grid<double> delta;       // sqrt(e1^2 + e2^2)
  Grid<double> magnitude;   // |(e1*, e2*)| at the later frame
  Grid<double> signed_rate; // delta carrying the sign of the magnitude change
  Grid<double> e_sum;       // e1 + e2
  Grid<unsigned char> valid;
};

inline constexpr double kDefaultClamp = 5.0;

// Grids with a single row are treated as a beam chain: backward difference, forward at the first node.
GradientField deformation_gradient(const DeformationFrame& frame);
GreenLagrange green_lagrange(const Gradient& g);
std::pair<double, double> principal_strains(double exx, double eyy, double exy);
NormalField surface_normals(const DeformationFrame& frame);
Corrected correct_principal(double e1, double e2, const Vec3& n, double clamp = kDefaultClamp);

StrainField strain_field(const DeformationFrame& frame, double clamp = kDefaultClamp);
CStrainRateField cstrain_rate(const StrainField& prev, const StrainField& curr, double dt);

}  // namespace slipdet::strain
