#pragma once

// Trap scenes: parametric solids with materials, electrode roles and poses.
// Builders for the blade trap with fibre cavity, the four-rod trap and the
// planar surface trap live here, together with overlap checking and the
// ASCII scene listing used for debugging and round-trip serialization.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapkit/constants.hpp"

namespace trapkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class geometry_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Material {
  bool conductor = true;
  double eps_r = 1.0;      // dielectric only, >= 1
  double tan_delta = 0.0;  // dielectric only, >= 0

  static Material Conductor() { return Material{true, 1.0, 0.0}; }
  static Material Dielectric(double eps, double tand = 0.0) {
    if (eps < 1.0 || tand < 0.0)
      throw geometry_error("dielectric requires eps_r >= 1 and tan_delta >= 0");
    return Material{false, eps, tand};
  }
};

enum class ShapeKind { Box, Cylinder, Tube, Plate, Sphere, Wedge };

// Shape parameters, all lengths in um. Local frames:
//   Box:      half extents (a,b,c) along local x,y,z
//   Cylinder: radius a, length b along local z; caps at z = +-b/2
//   Tube:     inner radius a, outer radius b, length c along local z
//   Plate:    width a (x), thickness b (y), length c (z)
//   Sphere:   radius a
//   Wedge:    tapered prism; tip width a at local x=0, depth b along +x,
//             length c along z, taper half-angle d in degrees
struct Shape {
  ShapeKind kind = ShapeKind::Box;
  double a = 0, b = 0, c = 0, d = 0;

  void validate() const;
  double volume() const;
  double surface_area() const;
};

struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 to_world(const Vec3& local) const { return R * local + t; }
  Vec3 to_local(const Vec3& world) const { return R.transpose() * (world - t); }
  Vec3 dir_to_world(const Vec3& local) const { return R * local; }
};

// Rotation taking local +z onto the given world direction.
Mat3 rotation_z_to(const Vec3& dir);
// Rotation about world z by angle (radians).
Mat3 rotation_about_z(double angle);

enum class Role { RfA, RfB, Dc, Ground, Shield, DielectricBody };

std::string role_name(Role r);
Role role_from_name(const std::string& s);

struct Solid {
  std::string name;
  Shape shape;
  Pose pose;
  Material material;
  Role role = Role::Ground;
  std::string label;  // Dc/Shield electrode label, empty otherwise

  bool contains(const Vec3& world_point, double margin = 0.0) const;
};

enum class PatchRegion { FrontFacet, All };

struct SurfaceChargePatch {
  std::string solid;  // must reference a dielectric solid
  PatchRegion region = PatchRegion::FrontFacet;
  double density_e_per_um2 = 0.0;
};

enum class RfScheme { SingleRf, DualRf };

// Drive amplitudes at the cosine peak: SingleRf puts 2*v0 on RfA and 0 on
// RfB; DualRf puts +v0 on RfA and -v0 on RfB.
struct DriveConfig {
  RfScheme scheme = RfScheme::DualRf;
  double v0 = 30.0;                  // volts
  double omega_rf = 2 * kPi * 20e6;  // rad/s
  double endcap_voltage = 0.0;       // volts on Dc("endcap")
  std::map<std::string, double> dc_overrides;  // label -> volts

  double rf_a_amplitude() const { return scheme == RfScheme::SingleRf ? 2.0 * v0 : v0; }
  double rf_b_amplitude() const { return scheme == RfScheme::SingleRf ? 0.0 : -v0; }
};

struct Scene {
  std::vector<Solid> solids;
  std::vector<SurfaceChargePatch> patches;
  std::map<std::string, double> meta;  // builder parameters worth keeping

  const Solid* find(const std::string& name) const;
  Solid* find(const std::string& name);
  bool point_inside_conductor(const Vec3& p, double margin = 0.0) const;
};

// ---------------------------------------------------------------------------
// Builders

struct BladeTrapParams {
  double tip_radius = 170.0;    // axis to blade tip face, um
  double tip_width = 22.0;      // flat tip width, um
  double taper_deg = 12.7;      // half-angle of the blade flanks
  double blade_depth = 2000.0;  // radial extent of the blades
  double rf_length = 1400.0;    // axial length of the central rf blades
  double endcap_length = 700.0;
  double endcap_gap = 50.0;     // axial gap endcap-rf
  double fibre_diameter = 125.0;
  double fibre_length = 1000.0;
  double shield_inner_diameter = 150.0;
  double shield_outer_diameter = 190.0;
  double shield_length = 800.0;
};

Scene build_blade_trap(const BladeTrapParams& params, double cavity_length,
                       bool with_fibres, bool with_shields,
                       double shield_protrusion = 0.0);

struct FourRodTrapParams {
  double rod_angle_deg = 45.0;  // rods at +-alpha and pi -+ alpha from x
  double fibre_diameter = 125.0;
  double fibre_length = 1000.0;
  double shield_inner_diameter = 150.0;
  double shield_outer_diameter = 190.0;
  double shield_length = 800.0;
  double cavity_length = 300.0;  // used when with_shields
  bool with_fibres = false;      // fibres inside the shields
};

Scene build_four_rod_trap(double rod_radius, double rod_distance, double length,
                          bool with_shields,
                          const FourRodTrapParams& params = {});

struct SurfaceTrapParams {
  double rf_inner_edge = 60.0;   // |x| of the rf rail inner edge, um
  double rf_width = 175.0;       // rf rail width
  double rail_thickness = 10.0;
  double rail_length = 3000.0;
  double plane_width = 2400.0;   // ground plane extent in x
  double gap = 10.0;             // rf rail to ground gap
  double fibre_diameter = 125.0;
  double fibre_length = 800.0;
  double shield_inner_diameter = 150.0;
  double shield_outer_diameter = 190.0;
  double shield_length = 600.0;
};

// ion_height <= 0 selects the analytic five-wire null height sqrt(a*c).
Scene build_surface_trap(const SurfaceTrapParams& params, double ion_height,
                         double cavity_length, bool with_shields);

// Rigidly translates one fibre+shield pair; re-checks overlaps.
Scene apply_misalignment(const Scene& scene, char target_side /* 'L' or 'R' */,
                         const Vec3& offset_um);

// Throws geometry_error naming the two solids if any pair interpenetrates
// deeper than tol_um.
void check_overlaps(const Scene& scene, double tol_um = 0.1);

// ---------------------------------------------------------------------------
// Serialization: one solid per line, %.17g floats; read(write(s)) == s.

std::string scene_to_text(const Scene& scene);
Scene scene_from_text(const std::string& text);

} // namespace trapkit
