#pragma once

// Surface discretization into flat triangular panels for collocation BEM.
//
// All structured quads are split union-jack (four triangles through the quad
// centre) and 1-D grids are graded symmetrically from both ends, so a scene
// with a mirror symmetry meshes into an exactly mirror-symmetric panel set.
// That property is what makes the dual-rf field cancellations exact at the
// discrete level instead of only up to mesh error.

#include <functional>
#include <string>
#include <vector>

#include "trapkit/geometry.hpp"

namespace trapkit {

class mesh_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Panel {
  Vec3 v0, v1, v2;
  Vec3 centroid;
  Vec3 normal;        // unit, outward from the solid (dielectric -> vacuum)
  double area = 0;    // um^2
  double diameter = 0;  // longest edge, um
  int body = -1;      // index into Scene::solids
  int face = -1;      // face tag within the shape (mesher-defined)
  bool dielectric = false;
  double eps_in = 1.0;  // relative permittivity behind a dielectric panel
};

// Face tags, per shape kind.
namespace face_tag {
inline constexpr int kCylSide = 0, kCylFront = 1, kCylBack = 2;
inline constexpr int kTubeOuter = 0, kTubeBore = 1, kTubeFront = 2, kTubeBack = 3;
inline constexpr int kWedgeTip = 0, kWedgeBack = 1;
}  // namespace face_tag

struct RefineRule {
  Vec3 center = Vec3::Zero();
  double radius = 0;  // um; target applies inside, grows with distance outside
  double edge = 0;    // um
};

struct MeshOptions {
  double base_edge = 40.0;  // um, default panel edge target
  double max_edge = 0.0;    // 0 -> base_edge; >base_edge allows far coarsening
  double grade = 0.4;       // edge growth per um beyond a rule radius
  std::vector<RefineRule> rules;
};

struct MeshQuality {
  double min_aspect = 0, max_aspect = 0;
  double min_area = 0, max_area = 0;
};

struct PanelMesh {
  std::vector<Panel> panels;
  MeshOptions options;

  MeshQuality quality() const;
  std::vector<int> panels_of_body(int body) const;
  std::vector<int> panels_of_face(int body, int face) const;
  // sum of area-weighted normals for one solid; ~0 for closed surfaces
  Vec3 closure_defect(int body) const;
  double body_area(int body) const;
  // divergence-theorem volume of one closed solid
  double body_volume(int body) const;
};

double target_edge(const MeshOptions& opt, const Vec3& world_point);

PanelMesh mesh_scene(const Scene& scene, const MeshOptions& opt);

// Split panels intersecting the region (ball) until their longest edge is
// below target; other panels untouched. Midpoint 4-way splits keep the
// surface geometrically closed.
PanelMesh refine_where(const PanelMesh& mesh, const Vec3& center, double radius,
                       double target);

// ASCII dump/load: one panel per line, 9 vertex coordinates, body id, kind.
std::string mesh_to_text(const PanelMesh& mesh);
PanelMesh mesh_from_text(const std::string& text, const Scene& scene);

} // namespace trapkit
