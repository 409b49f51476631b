#include <doctest.h>

#include "trapkit/mesh.hpp"

using namespace trapkit;

namespace {

Scene single_solid_scene(Shape shape, Material mat = Material::Conductor()) {
  Scene sc;
  Solid s;
  s.name = "solid";
  s.shape = shape;
  s.material = mat;
  sc.solids.push_back(s);
  return sc;
}

void check_closed_and_accurate(const Scene& sc, const PanelMesh& mesh, double area_tol = 0.01,
                               double vol_tol = 0.01) {
  for (int b = 0; b < int(sc.solids.size()); ++b) {
    const double area = mesh.body_area(b);
    REQUIRE(area > 0);
    CHECK(mesh.closure_defect(b).norm() <= 1e-6 * area);
    const double a_ref = sc.solids[size_t(b)].shape.surface_area();
    CHECK(std::abs(area - a_ref) / a_ref < area_tol);
    const double v_ref = sc.solids[size_t(b)].shape.volume();
    CHECK(std::abs(mesh.body_volume(b) - v_ref) / v_ref < vol_tol);
  }
}

} // namespace

TEST_CASE("sphere mesh: watertight, ~4000 panels at radius/edge = 10") {
  Scene sc = single_solid_scene(Shape{ShapeKind::Sphere, 100, 0, 0, 0});
  MeshOptions opt;
  opt.base_edge = 10;
  PanelMesh mesh = mesh_scene(sc, opt);
  CHECK(mesh.panels.size() >= 4000);
  CHECK(mesh.panels.size() <= 30000);
  check_closed_and_accurate(sc, mesh, 0.01, 0.01);
}

TEST_CASE("box, cylinder, tube, plate, wedge: closed surfaces and 1% metrics") {
  MeshOptions opt;
  opt.base_edge = 12;
  for (Shape s : {Shape{ShapeKind::Box, 40, 60, 80, 0}, Shape{ShapeKind::Cylinder, 62.5, 200, 0, 0},
                  Shape{ShapeKind::Tube, 75, 95, 300, 0}, Shape{ShapeKind::Plate, 120, 10, 260, 0},
                  Shape{ShapeKind::Wedge, 22, 300, 200, 12.7}}) {
    Scene sc = single_solid_scene(s);
    PanelMesh mesh = mesh_scene(sc, opt);
    check_closed_and_accurate(sc, mesh);
  }
}

TEST_CASE("tube: all faces present with outward normals") {
  Scene sc = single_solid_scene(Shape{ShapeKind::Tube, 75, 95, 300, 0});
  MeshOptions opt;
  opt.base_edge = 15;
  PanelMesh mesh = mesh_scene(sc, opt);
  for (int tag : {face_tag::kTubeOuter, face_tag::kTubeBore, face_tag::kTubeFront, face_tag::kTubeBack})
    CHECK(!mesh.panels_of_face(0, tag).empty());
  for (const auto& p : mesh.panels) {
    CHECK(p.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Vec3 c = p.centroid;
    const double r = std::hypot(c.x(), c.y());
    if (p.face == face_tag::kTubeBore) CHECK(p.normal.head<2>().dot(c.head<2>()) / r < -0.9);
    if (p.face == face_tag::kTubeOuter) CHECK(p.normal.head<2>().dot(c.head<2>()) / r > 0.9);
    // centroid is the vertex mean
    CHECK(((p.v0 + p.v1 + p.v2) / 3.0 - p.centroid).norm() < 1e-12 * p.diameter);
  }
}

TEST_CASE("refinement rules honored within 2x") {
  Scene sc = single_solid_scene(Shape{ShapeKind::Cylinder, 62.5, 400, 0, 0});
  MeshOptions opt;
  opt.base_edge = 30;
  opt.rules.push_back({Vec3(0, 0, 200), 40, 5});  // ball around the +z cap
  PanelMesh mesh = mesh_scene(sc, opt);
  int fine = 0;
  for (const auto& p : mesh.panels) {
    if ((p.centroid - Vec3(0, 0, 200)).norm() < 35) {
      CHECK(p.diameter <= 2.0 * 5.0 + 1e-9);
      ++fine;
    }
  }
  CHECK(fine > 50);
}

TEST_CASE("refine_where") {
  Scene sc = single_solid_scene(Shape{ShapeKind::Box, 100, 100, 100, 0});
  MeshOptions opt;
  opt.base_edge = 50;
  PanelMesh mesh = mesh_scene(sc, opt);

  SUBCASE("empty region is the identity") {
    PanelMesh same = refine_where(mesh, Vec3(1e6, 0, 0), 1.0, 5.0);
    CHECK(same.panels.size() == mesh.panels.size());
  }
  SUBCASE("ball region: edges meet the target, closure preserved") {
    PanelMesh fine = refine_where(mesh, Vec3(100, 0, 0), 60, 10.0);
    CHECK(fine.panels.size() > mesh.panels.size());
    for (const auto& p : fine.panels)
      if ((p.centroid - Vec3(100, 0, 0)).norm() < 50) CHECK(p.diameter <= 10.0 + 1e-9);
    CHECK(fine.closure_defect(0).norm() <= 1e-6 * fine.body_area(0));
    const double v_ref = sc.solids[0].shape.volume();
    CHECK(std::abs(fine.body_volume(0) - v_ref) / v_ref < 1e-9);
  }
  SUBCASE("region covering all ~ global refinement") {
    PanelMesh fine = refine_where(mesh, Vec3::Zero(), 1e9, 12.0);
    MeshOptions direct;
    direct.base_edge = 12;
    PanelMesh ref = mesh_scene(sc, direct);
    for (const auto& p : fine.panels) CHECK(p.diameter <= 2.0 * 12.0);
    for (const auto& p : ref.panels) CHECK(p.diameter <= 2.0 * 12.0);
  }
}

TEST_CASE("meshing is deterministic") {
  BladeTrapParams bp;
  Scene sc = build_blade_trap(bp, 300.0, true, true);
  MeshOptions opt;
  opt.base_edge = 60;
  opt.max_edge = 400;
  opt.rules.push_back({Vec3::Zero(), 250, 25});
  PanelMesh m1 = mesh_scene(sc, opt);
  PanelMesh m2 = mesh_scene(sc, opt);
  CHECK(mesh_to_text(m1) == mesh_to_text(m2));
}

TEST_CASE("mesh dump/load round trip") {
  Scene sc = single_solid_scene(Shape{ShapeKind::Cylinder, 62.5, 100, 0, 0},
                                Material::Dielectric(3.75));
  MeshOptions opt;
  opt.base_edge = 25;
  PanelMesh mesh = mesh_scene(sc, opt);
  PanelMesh back = mesh_from_text(mesh_to_text(mesh), sc);
  REQUIRE(back.panels.size() == mesh.panels.size());
  for (size_t i = 0; i < mesh.panels.size(); ++i) {
    CHECK((back.panels[i].centroid - mesh.panels[i].centroid).norm() == 0.0);
    CHECK(back.panels[i].area == doctest::Approx(mesh.panels[i].area).epsilon(1e-15));
    CHECK(back.panels[i].dielectric == mesh.panels[i].dielectric);
    CHECK(back.panels[i].eps_in == doctest::Approx(3.75));
  }
}

TEST_CASE("blade trap scene meshes into a sane panel budget") {
  BladeTrapParams bp;
  Scene sc = build_blade_trap(bp, 300.0, true, true);
  MeshOptions opt;
  opt.base_edge = 40;
  opt.max_edge = 320;
  opt.rules.push_back({Vec3::Zero(), 200, 12});
  opt.rules.push_back({Vec3(150, 0, 0), 80, 6});
  opt.rules.push_back({Vec3(-150, 0, 0), 80, 6});
  PanelMesh mesh = mesh_scene(sc, opt);
  MESSAGE("blade trap panels: ", mesh.panels.size());
  CHECK(mesh.panels.size() >= 5000);
  CHECK(mesh.panels.size() <= 50000);
  for (int b = 0; b < int(sc.solids.size()); ++b)
    CHECK(mesh.closure_defect(b).norm() <= 1e-6 * mesh.body_area(b));
}
