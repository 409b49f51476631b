#pragma once

// Collocation boundary-element Laplace solver.
//
// One unknown per panel: the total surface charge density sigma (free +
// bound), stored scaled as x = sigma/(4 pi eps0) in V/um. Conductor panels
// collocate the potential at their centroid; dielectric interface panels
// collocate normal-D continuity, with prescribed free surface charge and
// point-charge sources entering the right-hand side. The dense system is
// factorized once per mesh (LAPACK dgetrf) and solved per boundary-condition
// set, so unit-voltage bases, displaced-ion solves and compensation searches
// reuse the factorization.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "trapkit/geometry.hpp"
#include "trapkit/mesh.hpp"

namespace trapkit {

class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PointCharge {
  Vec3 pos;       // um
  double q = 0.0; // C
};

struct BoundaryConditionSet {
  std::map<Role, double> role_voltages;          // volts; missing role = 0 V
  std::map<std::string, double> label_voltages;  // per-label overrides (endcap, shield_L, ...)
  std::vector<PointCharge> point_charges;
  bool include_scene_patches = false;
  double patch_scale = 1.0;

  double voltage_for(Role role, const std::string& label) const;

  static BoundaryConditionSet rf_snapshot(const DriveConfig& drive);
  static BoundaryConditionSet dc(const DriveConfig& drive, bool with_patches = true);
  static BoundaryConditionSet grounded_with_charge(const Vec3& ion_pos_um, double q_C);
  static BoundaryConditionSet unit_voltage(const std::string& label);
};

struct FieldSolution {
  std::shared_ptr<const PanelMesh> mesh;
  std::shared_ptr<const Scene> scene;
  Eigen::VectorXd x;  // sigma/(4 pi eps0) per panel, V/um
  std::vector<PointCharge> sources;
  double solve_residual = 0.0;

  double phi(const Vec3& p_um) const;    // V
  Vec3 efield(const Vec3& p_um) const;   // V/m
  // vacuum-side field at a dielectric/conductor panel centroid (includes the
  // sigma/2eps0 jump), V/m
  Vec3 surface_field_out(int panel) const;
  double sigma(int panel) const;         // C/um^2
  double total_charge_of_body(int body) const;  // C

  FieldSolution scaled(double w) const;
};

// weighted sum of solutions on the same mesh; exact by linearity
FieldSolution superpose(const std::vector<FieldSolution>& sols,
                        const std::vector<double>& weights);

std::vector<double> eval_potential(const FieldSolution& sol, const std::vector<Vec3>& pts);
std::vector<Vec3> eval_field(const FieldSolution& sol, const std::vector<Vec3>& pts);  // V/m

class BemSystem {
 public:
  // assembles and factorizes; throws solver_error on non-watertight solids,
  // empty meshes or condition estimate > 1e12
  BemSystem(std::shared_ptr<const Scene> scene, std::shared_ptr<const PanelMesh> mesh);

  FieldSolution solve(const BoundaryConditionSet& bc) const;

  // exact relative residual ||Ax-b||/||b|| recomputed from the kernels (the
  // factored matrix is overwritten in place, so this is an O(n^2) pass)
  double verify_residual(const FieldSolution& sol, const BoundaryConditionSet& bc) const;

  const PanelMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PanelMesh> mesh_ptr() const { return mesh_; }
  std::shared_ptr<const Scene> scene_ptr() const { return scene_; }
  int size() const { return n_; }
  double rcond() const { return rcond_; }

  // capacitance matrix over conductor bodies: charge on body i with body j
  // at 1 V, others grounded
  Eigen::MatrixXd capacitance_matrix(const std::vector<int>& conductor_bodies) const;

 private:
  std::shared_ptr<const Scene> scene_;
  std::shared_ptr<const PanelMesh> mesh_;
  int n_ = 0;
  Eigen::MatrixXd lu_;           // factorized in place
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
  mutable double verified_residual_ = -1.0;  // measured on the first solve
  Eigen::VectorXd rhs_for(const BoundaryConditionSet& bc) const;
};

// ---------------------------------------------------------------------------
// Panel kernels (exposed for tests and benchmarks)

// Potential integral I(p) = \int_T dA'/|p-r'| of a unit constant density and
// its gradient with respect to p. Exact for any p; far points use a
// single-point approximation when allow_far is set.
struct PanelKernel {
  double pot;  // um
  Vec3 grad;   // dimensionless
};
PanelKernel panel_integral(const Panel& panel, const Vec3& p, bool need_grad,
                           bool allow_far = true);

} // namespace trapkit
