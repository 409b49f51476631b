#pragma once

// Numeric checks of the analytic rf-null conditions: angular moments of
// cross-sectional charge distributions, discrete charge nullspaces for rod
// and surface layouts, the four-fold potential antisymmetry condition, and
// direct Coulomb quadrature of the on-axis field of a charge distribution.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "trapkit/geometry.hpp"

namespace trapkit {
namespace symmetry {

struct CrossSectionCharges {
  struct Site {
    double theta = 0;  // rad
    double r = 0;      // um
    double q = 0;      // arbitrary charge units
  };
  std::vector<Site> discrete;
  // alternatively rho(theta) sampled on a uniform periodic grid at fixed r
  std::vector<double> rho_samples;
  double sample_radius = 0;
};

struct MomentReport {
  double m_cos = 0, m_sin = 0, m_0 = 0;
  double scale = 0;  // sum of |q| (or |rho| dtheta), for relative tests
  bool satisfied = false;
  double tol = 1e-10;
};

MomentReport angular_moments(const CrossSectionCharges& cs, double tol = 1e-10);

// site layouts on a circle
std::vector<double> four_rod_angles(double alpha_rad);
// two intersections of a plane electrode at ion height h with a circle r > h
std::vector<double> surface_pair_angles(double h_over_r);

// 3xN matrix of the three angular moment conditions
Eigen::MatrixXd moment_matrix(const std::vector<double>& angles);

// columns span the nullspace at the given relative singular-value tolerance
Eigen::MatrixXd charge_nullspace(const std::vector<double>& angles, double tol = 1e-10);

// Potential condition phi(r,th,z) = -phi(r,pi-th,z) = phi(r,th-pi,z)
// = -phi(r,-th,z), checked on the sample product grid.
struct PotentialConditionReport {
  double max_violation = 0;  // absolute
  double max_abs_phi = 0;
  double relative() const { return max_abs_phi > 0 ? max_violation / max_abs_phi : 0.0; }
};

PotentialConditionReport potential_condition_check(
    const std::function<double(double r, double theta, double z)>& phi,
    const std::vector<double>& r_samples, const std::vector<double>& theta_samples,
    const std::vector<double>& z_samples);

// discrete charge cloud for direct Coulomb sums
struct ChargeCloud {
  std::vector<Vec3> pos;  // um
  std::vector<double> q;  // C
};

// cell-centred sampling of rho(r,theta,z) [C/um^3] on a cylindrical grid
ChargeCloud sample_cylindrical(const std::function<double(double, double, double)>& rho,
                               double r0, double r1, int nr, int ntheta, double z0, double z1,
                               int nz);

// E at (0,0,z0) in V/m; samples closer than exclusion_um are skipped and
// counted in *excluded
Vec3 axis_field_from_charges(const ChargeCloud& cloud, double z0, double exclusion_um = 1e-6,
                             int* excluded = nullptr);

} // namespace symmetry
} // namespace trapkit
