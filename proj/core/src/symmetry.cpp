#include "trapkit/symmetry.hpp"

#include <cmath>

#include "trapkit/constants.hpp"

namespace trapkit {
namespace symmetry {

MomentReport angular_moments(const CrossSectionCharges& cs, double tol) {
  MomentReport rep;
  rep.tol = tol;
  if (!cs.discrete.empty()) {
    for (const auto& s : cs.discrete) {
      rep.m_cos += s.q * std::cos(s.theta);
      rep.m_sin += s.q * std::sin(s.theta);
      rep.m_0 += s.q;
      rep.scale += std::abs(s.q);
    }
  } else {
    // periodic trapezoid rule == midpoint sum on a uniform grid
    const size_t n = cs.rho_samples.size();
    const double dth = 2.0 * kPi / double(n);
    for (size_t k = 0; k < n; ++k) {
      const double th = dth * double(k);
      const double w = cs.rho_samples[k] * dth;
      rep.m_cos += w * std::cos(th);
      rep.m_sin += w * std::sin(th);
      rep.m_0 += w;
      rep.scale += std::abs(w);
    }
  }
  const double bar = tol * std::max(rep.scale, 1e-300);
  rep.satisfied = std::abs(rep.m_cos) <= bar && std::abs(rep.m_sin) <= bar && std::abs(rep.m_0) <= bar;
  return rep;
}

std::vector<double> four_rod_angles(double a) { return {a, kPi - a, kPi + a, -a}; }

std::vector<double> surface_pair_angles(double h_over_r) {
  const double phi = std::asin(h_over_r);
  return {-phi, phi - kPi};
}

Eigen::MatrixXd moment_matrix(const std::vector<double>& angles) {
  Eigen::MatrixXd M(3, Eigen::Index(angles.size()));
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    M(0, j) = std::cos(angles[size_t(j)]);
    M(1, j) = std::sin(angles[size_t(j)]);
    M(2, j) = 1.0;
  }
  return M;
}

Eigen::MatrixXd charge_nullspace(const std::vector<double>& angles, double tol) {
  const Eigen::MatrixXd M = moment_matrix(angles);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * (sv.size() > 0 ? sv(0) : 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++rank;
  const Eigen::Index dim = M.cols() - rank;
  return svd.matrixV().rightCols(dim);
}

PotentialConditionReport potential_condition_check(
    const std::function<double(double, double, double)>& phi, const std::vector<double>& rs,
    const std::vector<double>& ths, const std::vector<double>& zs) {
  PotentialConditionReport rep;
  for (double r : rs)
    for (double th : ths)
      for (double z : zs) {
        const double p0 = phi(r, th, z);
        const double p1 = phi(r, kPi - th, z);
        const double p2 = phi(r, th - kPi, z);
        const double p3 = phi(r, -th, z);
        rep.max_abs_phi = std::max({rep.max_abs_phi, std::abs(p0), std::abs(p1), std::abs(p2),
                                    std::abs(p3)});
        rep.max_violation = std::max({rep.max_violation, std::abs(p0 + p1), std::abs(p0 - p2),
                                      std::abs(p0 + p3)});
      }
  return rep;
}

ChargeCloud sample_cylindrical(const std::function<double(double, double, double)>& rho,
                               double r0, double r1, int nr, int ntheta, double z0, double z1,
                               int nz) {
  ChargeCloud cloud;
  const double dr = (r1 - r0) / nr, dth = 2.0 * kPi / ntheta, dz = (z1 - z0) / nz;
  for (int i = 0; i < nr; ++i) {
    const double r = r0 + (i + 0.5) * dr;
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dth;
      for (int k = 0; k < nz; ++k) {
        const double z = z0 + (k + 0.5) * dz;
        const double q = rho(r, th, z) * r * dr * dth * dz;
        if (q == 0.0) continue;
        cloud.pos.emplace_back(r * std::cos(th), r * std::sin(th), z);
        cloud.q.push_back(q);
      }
    }
  }
  return cloud;
}

Vec3 axis_field_from_charges(const ChargeCloud& cloud, double z0, double exclusion_um,
                             int* excluded) {
  Vec3 e = Vec3::Zero();
  const Vec3 p(0, 0, z0);
  int skipped = 0;
  for (size_t k = 0; k < cloud.pos.size(); ++k) {
    const Vec3 d = p - cloud.pos[k];
    const double r = d.norm();
    if (r < exclusion_um) {
      ++skipped;
      continue;
    }
    e += cloud.q[k] * kCoulomb_um / (r * r * r) * d;
  }
  if (excluded) *excluded = skipped;
  return e * Vum_to_Vm;
}

} // namespace symmetry
} // namespace trapkit
