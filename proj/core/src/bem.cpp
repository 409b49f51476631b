#include "trapkit/bem.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdio>

namespace trapkit {

// ---------------------------------------------------------------------------
// Panel kernels

namespace {

constexpr double kFarFactor = 6.0;  // centroid distance beyond which a panel
                                    // is a point source (error < ~0.2%)

// exact potential/gradient of a unit constant density over a flat triangle
PanelKernel analytic_integral(const Panel& P, const Vec3& p) {
  const Vec3* v[3] = {&P.v0, &P.v1, &P.v2};
  const Vec3 n = P.normal;
  const double h = (p - P.v0).dot(n);

  double pot = 0.0;
  Vec3 grad = Vec3::Zero();
  for (int e = 0; e < 3; ++e) {
    const Vec3& a = *v[e];
    const Vec3& b = *v[(e + 1) % 3];
    const Vec3 u = (b - a).normalized();
    const Vec3 m = u.cross(n);  // outward in-plane edge normal
    const double sa = (a - p).dot(u), sb = (b - p).dot(u);
    const double ra = (a - p).norm(), rb = (b - p).norm();
    const double t0 = (a - p).dot(m);
    const double guard = 1e-14 * P.diameter;
    const double q = std::log(std::max(rb + sb, guard) / std::max(ra + sa, guard));
    pot += t0 * q;
    grad -= m * q;
  }
  // solid angle (van Oosterom-Strackee)
  const Vec3 r1 = P.v0 - p, r2 = P.v1 - p, r3 = P.v2 - p;
  const double R1 = r1.norm(), R2 = r2.norm(), R3 = r3.norm();
  const double num = r1.dot(r2.cross(r3));
  const double den = R1 * R2 * R3 + r1.dot(r2) * R3 + r2.dot(r3) * R1 + r3.dot(r1) * R2;
  const double omega = std::abs(2.0 * std::atan2(num, den));
  pot -= std::abs(h) * omega;
  const double sh = h > 0 ? 1.0 : (h < 0 ? -1.0 : 0.0);
  grad -= n * (sh * omega);
  return {pot, grad};
}

} // namespace

PanelKernel panel_integral(const Panel& P, const Vec3& p, bool need_grad, bool allow_far) {
  const Vec3 d = p - P.centroid;
  const double r2 = d.squaredNorm();
  const double far = kFarFactor * P.diameter;
  if (allow_far && r2 > far * far) {
    const double inv_r = 1.0 / std::sqrt(r2);
    PanelKernel k;
    k.pot = P.area * inv_r;
    k.grad = need_grad ? Vec3(-P.area * inv_r * inv_r * inv_r * d) : Vec3::Zero();
    return k;
  }
  return analytic_integral(P, p);
}

// ---------------------------------------------------------------------------
// Boundary conditions

double BoundaryConditionSet::voltage_for(Role role, const std::string& label) const {
  if (!label.empty()) {
    auto it = label_voltages.find(label);
    if (it != label_voltages.end()) return it->second;
  }
  auto it = role_voltages.find(role);
  return it == role_voltages.end() ? 0.0 : it->second;
}

BoundaryConditionSet BoundaryConditionSet::rf_snapshot(const DriveConfig& drive) {
  BoundaryConditionSet bc;
  bc.role_voltages[Role::RfA] = drive.rf_a_amplitude();
  bc.role_voltages[Role::RfB] = drive.rf_b_amplitude();
  return bc;
}

BoundaryConditionSet BoundaryConditionSet::dc(const DriveConfig& drive, bool with_patches) {
  BoundaryConditionSet bc;
  bc.label_voltages["endcap"] = drive.endcap_voltage;
  for (const auto& [label, v] : drive.dc_overrides) bc.label_voltages[label] = v;
  bc.include_scene_patches = with_patches;
  return bc;
}

BoundaryConditionSet BoundaryConditionSet::grounded_with_charge(const Vec3& pos, double q_C) {
  BoundaryConditionSet bc;
  bc.point_charges.push_back({pos, q_C});
  return bc;
}

BoundaryConditionSet BoundaryConditionSet::unit_voltage(const std::string& label) {
  BoundaryConditionSet bc;
  bc.label_voltages[label] = 1.0;
  return bc;
}

// ---------------------------------------------------------------------------
// System assembly and factorization

BemSystem::BemSystem(std::shared_ptr<const Scene> scene, std::shared_ptr<const PanelMesh> mesh)
    : scene_(std::move(scene)), mesh_(std::move(mesh)) {
  const auto& panels = mesh_->panels;
  n_ = int(panels.size());
  if (n_ == 0) throw solver_error("empty mesh");

  for (int b = 0; b < int(scene_->solids.size()); ++b) {
    const double area = mesh_->body_area(b);
    if (area <= 0) continue;
    const double defect = mesh_->closure_defect(b).norm();
    if (defect > 1e-6 * area)
      throw solver_error("solid " + scene_->solids[size_t(b)].name +
                         " is not watertight (closure defect " + std::to_string(defect) + " um^2)");
  }

  lu_.resize(n_, n_);
  std::vector<char> row_diel(size_t(n_));
  for (int i = 0; i < n_; ++i) row_diel[size_t(i)] = panels[size_t(i)].dielectric ? 1 : 0;

  for (int j = 0; j < n_; ++j) {
    const Panel& Pj = panels[size_t(j)];
    double* col = lu_.data() + size_t(j) * size_t(n_);
    for (int i = 0; i < n_; ++i) {
      const Panel& Pi = panels[size_t(i)];
      const PanelKernel k = panel_integral(Pj, Pi.centroid, row_diel[size_t(i)] != 0);
      if (row_diel[size_t(i)]) {
        // normal-D continuity row: (1-eps)/4pi * E.n, diagonal added below
        col[i] = (1.0 - Pi.eps_in) / (4.0 * kPi) * (-k.grad.dot(Pi.normal));
      } else {
        col[i] = k.pot;
      }
    }
  }
  for (int i = 0; i < n_; ++i)
    if (row_diel[size_t(i)]) lu_(i, i) += 0.5 * (1.0 + panels[size_t(i)].eps_in);

  const double anorm = LAPACKE_dlange(LAPACK_COL_MAJOR, '1', n_, n_, lu_.data(), n_);
  ipiv_.resize(size_t(n_));
  const int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n_, n_, lu_.data(), n_, ipiv_.data());
  if (info != 0) throw solver_error("LU factorization failed (dgetrf info=" + std::to_string(info) + ")");
  double rc = 0.0;
  LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n_, lu_.data(), n_, anorm, &rc);
  rcond_ = rc;
  if (rcond_ > 0 && 1.0 / rcond_ > 1e12)
    throw solver_error("collocation system ill-conditioned (cond ~ " +
                       std::to_string(1.0 / rcond_) + "); refine the mesh");
}

Eigen::VectorXd BemSystem::rhs_for(const BoundaryConditionSet& bc) const {
  const auto& panels = mesh_->panels;
  Eigen::VectorXd b(n_);

  // free surface charge per panel, C/um^2
  std::vector<double> sigma_free(size_t(n_), 0.0);
  if (bc.include_scene_patches) {
    for (const auto& patch : scene_->patches) {
      const Solid* solid = scene_->find(patch.solid);
      if (!solid) throw solver_error("charge patch references unknown solid " + patch.solid);
      const int body = int(solid - scene_->solids.data());
      if (solid->material.conductor)
        throw solver_error("charge patch must lie on a dielectric surface: " + patch.solid);
      for (int i = 0; i < n_; ++i) {
        const Panel& p = panels[size_t(i)];
        if (p.body != body) continue;
        if (patch.region == PatchRegion::FrontFacet && p.face != face_tag::kCylFront) continue;
        sigma_free[size_t(i)] += patch.density_e_per_um2 * kElementaryCharge * bc.patch_scale;
      }
    }
  }

  for (int i = 0; i < n_; ++i) {
    const Panel& p = panels[size_t(i)];
    double phi_src = 0.0;
    Vec3 e_src = Vec3::Zero();
    for (const auto& s : bc.point_charges) {
      const Vec3 d = p.centroid - s.pos;
      const double r = d.norm();
      if (r < 1e-9) throw solver_error("point charge coincides with a panel centroid");
      const double c = s.q * kCoulomb_um;
      phi_src += c / r;
      e_src += c / (r * r * r) * d;
    }
    if (p.dielectric) {
      b[i] = sigma_free[size_t(i)] / (4.0 * kPi * kEpsilon0_um) -
             (1.0 - p.eps_in) / (4.0 * kPi) * e_src.dot(p.normal);
    } else {
      const Solid& solid = scene_->solids[size_t(p.body)];
      b[i] = bc.voltage_for(solid.role, solid.label) - phi_src;
    }
  }
  return b;
}

FieldSolution BemSystem::solve(const BoundaryConditionSet& bc) const {
  Eigen::VectorXd b = rhs_for(bc);
  Eigen::VectorXd x = b;
  const int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n_, 1, lu_.data(), n_,
                                  const_cast<int*>(ipiv_.data()), x.data(), n_);
  if (info != 0) throw solver_error("triangular solve failed (dgetrs)");

  FieldSolution sol;
  sol.mesh = mesh_;
  sol.scene = scene_;
  sol.x = std::move(x);
  sol.sources = bc.point_charges;
  if (verified_residual_ < 0) verified_residual_ = verify_residual(sol, bc);
  sol.solve_residual = verified_residual_;
  if (sol.solve_residual > 1e-8)
    throw solver_error("collocation residual " + std::to_string(sol.solve_residual) +
                       " exceeds 1e-8; refine the mesh");
  return sol;
}

double BemSystem::verify_residual(const FieldSolution& sol, const BoundaryConditionSet& bc) const {
  const Eigen::VectorXd b = rhs_for(bc);
  const auto& panels = mesh_->panels;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n_; ++i) {
    const Panel& pi = panels[size_t(i)];
    double ax = 0.0;
    if (pi.dielectric) {
      for (int j = 0; j < n_; ++j) {
        const PanelKernel k = panel_integral(panels[size_t(j)], pi.centroid, true);
        ax += (1.0 - pi.eps_in) / (4.0 * kPi) * (-k.grad.dot(pi.normal)) * sol.x[j];
      }
      ax += 0.5 * (1.0 + pi.eps_in) * sol.x[i];
    } else {
      for (int j = 0; j < n_; ++j)
        ax += panel_integral(panels[size_t(j)], pi.centroid, false).pot * sol.x[j];
    }
    num += (ax - b[i]) * (ax - b[i]);
    den += b[i] * b[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

Eigen::MatrixXd BemSystem::capacitance_matrix(const std::vector<int>& bodies) const {
  const int m = int(bodies.size());
  Eigen::MatrixXd C(m, m);
  for (int col = 0; col < m; ++col) {
    BoundaryConditionSet bc;
    Eigen::VectorXd b(n_);
    for (int i = 0; i < n_; ++i) {
      const Panel& p = mesh_->panels[size_t(i)];
      if (p.dielectric) {
        b[i] = 0.0;
      } else {
        b[i] = (p.body == bodies[size_t(col)]) ? 1.0 : 0.0;
      }
    }
    Eigen::VectorXd x = b;
    LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n_, 1, lu_.data(), n_,
                   const_cast<int*>(ipiv_.data()), x.data(), n_);
    FieldSolution sol;
    sol.mesh = mesh_;
    sol.scene = scene_;
    sol.x = std::move(x);
    for (int row = 0; row < m; ++row) C(row, col) = sol.total_charge_of_body(bodies[size_t(row)]);
  }
  return C;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void accumulate_sources(const std::vector<PointCharge>& sources, const Vec3& p, double* phi,
                        Vec3* e) {
  for (const auto& s : sources) {
    const Vec3 d = p - s.pos;
    const double r = d.norm();
    const double c = s.q * kCoulomb_um;
    if (phi) *phi += c / r;
    if (e) *e += c / (r * r * r) * d;
  }
}

} // namespace

double FieldSolution::phi(const Vec3& p) const {
  if (scene && scene->point_inside_conductor(p)) throw solver_error("evaluation point inside a conductor");
  double v = 0.0;
  const auto& panels = mesh->panels;
  for (size_t j = 0; j < panels.size(); ++j)
    v += x[Eigen::Index(j)] * panel_integral(panels[j], p, false).pot;
  accumulate_sources(sources, p, &v, nullptr);
  return v;
}

Vec3 FieldSolution::efield(const Vec3& p) const {
  if (scene && scene->point_inside_conductor(p)) throw solver_error("evaluation point inside a conductor");
  Vec3 e = Vec3::Zero();
  const auto& panels = mesh->panels;
  for (size_t j = 0; j < panels.size(); ++j)
    e -= x[Eigen::Index(j)] * panel_integral(panels[j], p, true).grad;
  accumulate_sources(sources, p, nullptr, &e);
  return e * Vum_to_Vm;
}

Vec3 FieldSolution::surface_field_out(int panel) const {
  const auto& panels = mesh->panels;
  const Panel& pi = panels[size_t(panel)];
  const Vec3 p = pi.centroid;
  Vec3 e = Vec3::Zero();
  for (size_t j = 0; j < panels.size(); ++j) {
    const PanelKernel k = panel_integral(panels[j], p, true);
    e -= x[Eigen::Index(j)] * k.grad;  // own panel: tangential principal value
  }
  accumulate_sources(sources, p, nullptr, &e);
  e += 2.0 * kPi * x[panel] * pi.normal;  // vacuum-side jump sigma/2eps0
  return e * Vum_to_Vm;
}

double FieldSolution::sigma(int panel) const {
  return 4.0 * kPi * kEpsilon0_um * x[panel];
}

double FieldSolution::total_charge_of_body(int body) const {
  double q = 0.0;
  const auto& panels = mesh->panels;
  for (size_t j = 0; j < panels.size(); ++j)
    if (panels[j].body == body) q += sigma(int(j)) * panels[j].area;
  return q;
}

FieldSolution FieldSolution::scaled(double w) const {
  FieldSolution out = *this;
  out.x *= w;
  for (auto& s : out.sources) s.q *= w;
  return out;
}

FieldSolution superpose(const std::vector<FieldSolution>& sols, const std::vector<double>& weights) {
  if (sols.empty() || sols.size() != weights.size())
    throw solver_error("superpose requires matching solutions and weights");
  for (const auto& s : sols)
    if (s.mesh != sols.front().mesh) throw solver_error("superpose requires a common mesh");
  FieldSolution out = sols.front().scaled(weights.front());
  for (size_t k = 1; k < sols.size(); ++k) {
    out.x += weights[k] * sols[k].x;
    for (auto s : sols[k].sources) {
      s.q *= weights[k];
      out.sources.push_back(s);
    }
    out.solve_residual = std::max(out.solve_residual, sols[k].solve_residual);
  }
  return out;
}

std::vector<double> eval_potential(const FieldSolution& sol, const std::vector<Vec3>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(sol.phi(p));
  return out;
}

std::vector<Vec3> eval_field(const FieldSolution& sol, const std::vector<Vec3>& pts) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(sol.efield(p));
  return out;
}

} // namespace trapkit
