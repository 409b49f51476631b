#include <doctest.h>

#include <set>

#include "trapkit/geometry.hpp"

using namespace trapkit;

namespace {

// signature of a solid that survives rigid maps: dims + material + role
struct Sig {
  double a, b, c, d;
  int role;
  Vec3 axis;  // world image of the local symmetry axis (z for cyl/tube, x for wedge)
  Vec3 center;
};

Sig signature(const Solid& s) {
  Vec3 axis = s.shape.kind == ShapeKind::Wedge ? s.pose.dir_to_world(Vec3::UnitX())
                                               : s.pose.dir_to_world(Vec3::UnitZ());
  return {s.shape.a, s.shape.b, s.shape.c, s.shape.d, int(s.role), axis, s.pose.t};
}

bool matches_under(const Scene& scene, const Vec3& mirror, bool check_roles) {
  auto reflect = [&](const Vec3& v) { return v - 2.0 * mirror.dot(v) * mirror; };
  for (const auto& s : scene.solids) {
    const Sig sig = signature(s);
    bool found = false;
    for (const auto& t : scene.solids) {
      const Sig other = signature(t);
      if (std::abs(sig.a - other.a) > 1e-12 || std::abs(sig.b - other.b) > 1e-12 ||
          std::abs(sig.c - other.c) > 1e-12)
        continue;
      if (check_roles && sig.role != other.role) continue;
      const Vec3 ra = reflect(sig.axis);
      // axis direction is defined up to sign for these shapes
      if ((reflect(sig.center) - other.center).norm() > 1e-9) continue;
      if (std::min((ra - other.axis).norm(), (ra + other.axis).norm()) > 1e-12) continue;
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

} // namespace

TEST_CASE("bare blade trap: counts and mirror symmetry") {
  BladeTrapParams p;
  Scene sc = build_blade_trap(p, 300.0, false, false);
  CHECK(sc.solids.size() == 12);  // four rf blades + eight endcaps
  for (const Vec3& m : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()})
    CHECK(matches_under(sc, m, false));
  // z-mirror keeps the rf pairing; x/y mirrors exchange the diagonal pairs
  CHECK(matches_under(sc, Vec3::UnitZ(), true));
}

TEST_CASE("blade trap with cavity: facet and shield placement") {
  BladeTrapParams p;
  Scene sc = build_blade_trap(p, 300.0, true, true, 0.0);
  CHECK(sc.solids.size() == 16);
  const Solid* fr = sc.find("fibre_R");
  REQUIRE(fr != nullptr);
  // facet (local +z cap) sits at x = +150
  const Vec3 facet = fr->pose.to_world(Vec3(0, 0, 0.5 * fr->shape.b));
  CHECK(facet.x() == doctest::Approx(150.0).epsilon(1e-12));
  CHECK(facet.norm() == doctest::Approx(150.0).epsilon(1e-12));

  // protrusion 25 um: shield fronts at +-125, facets still at +-150
  Scene sp = build_blade_trap(p, 300.0, true, true, 25.0);
  const Solid* sh = sp.find("shield_R");
  REQUIRE(sh != nullptr);
  const Vec3 front = sh->pose.to_world(Vec3(0, 0, 0.5 * sh->shape.c));
  CHECK(front.x() == doctest::Approx(125.0).epsilon(1e-12));
  const Vec3 facet2 = sp.find("fibre_R")->pose.to_world(Vec3(0, 0, 0.5 * fr->shape.b));
  CHECK(facet2.x() == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("four rod trap") {
  Scene sc = build_four_rod_trap(50, 250, 4000, false);
  CHECK(sc.solids.size() == 4);
  // D4-symmetric cross-section: mirrors map the rod set onto itself
  for (const Vec3& m : {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()})
    CHECK(matches_under(sc, m, false));
  Scene sh = build_four_rod_trap(50, 250, 4000, true);
  CHECK(sh.solids.size() == 6);
  CHECK_THROWS_AS(build_four_rod_trap(250, 50, 4000, false), geometry_error);
}

TEST_CASE("surface trap: coplanar conductors") {
  SurfaceTrapParams p;
  Scene sc = build_surface_trap(p, 0.0, 300.0, true);
  const double h = sc.meta.at("ion_height");
  CHECK(h == doctest::Approx(std::sqrt(p.rf_inner_edge * (p.rf_inner_edge + p.rf_width))));
  int conductors_on_plane = 0;
  for (const auto& s : sc.solids) {
    if (!s.material.conductor || s.shape.kind != ShapeKind::Plate) continue;
    // top face at y = 0
    CHECK(s.pose.t.y() + 0.5 * s.shape.b == doctest::Approx(0.0).epsilon(1e-12));
    ++conductors_on_plane;
  }
  CHECK(conductors_on_plane == 5);
  Scene bare = build_surface_trap(p, 0.0, 0.0, false);
  CHECK(bare.solids.size() == 5);
}

TEST_CASE("misalignment") {
  BladeTrapParams p;
  Scene sc = build_blade_trap(p, 300.0, true, true);
  SUBCASE("zero offset is the identity") {
    Scene moved = apply_misalignment(sc, 'R', Vec3(0, 0, 0));
    CHECK(scene_to_text(moved) == scene_to_text(sc));
  }
  SUBCASE("z offset moves fibre and shield together") {
    Scene moved = apply_misalignment(sc, 'R', Vec3(0, 0, 5));
    CHECK((moved.find("fibre_R")->pose.t - sc.find("fibre_R")->pose.t - Vec3(0, 0, 5)).norm() ==
          doctest::Approx(0.0));
    CHECK((moved.find("shield_R")->pose.t - sc.find("shield_R")->pose.t - Vec3(0, 0, 5)).norm() ==
          doctest::Approx(0.0));
    CHECK(moved.find("fibre_L")->pose.t == sc.find("fibre_L")->pose.t);
  }
  SUBCASE("x offset toward centre per the misalignment study") {
    Scene moved = apply_misalignment(sc, 'R', Vec3(-5, 0, 0));
    CHECK(moved.find("fibre_R")->pose.t.x() == doctest::Approx(sc.find("fibre_R")->pose.t.x() - 5));
  }
  SUBCASE("fibre-shield collision is detected") {
    CHECK_THROWS_AS(apply_misalignment(sc, 'R', Vec3(0, 14, 0)), geometry_error);
  }
  SUBCASE("unknown target") {
    Scene bare = build_blade_trap(p, 300.0, false, false);
    CHECK_THROWS_AS(apply_misalignment(bare, 'R', Vec3(0, 0, 5)), geometry_error);
  }
}

TEST_CASE("scene serialization round-trips bit-exactly") {
  BladeTrapParams p;
  Scene sc = build_blade_trap(p, 300.0, true, true, 25.0);
  sc.patches.push_back({"fibre_R", PatchRegion::FrontFacet, 10.0});
  const std::string once = scene_to_text(sc);
  Scene back = scene_from_text(once);
  CHECK(scene_to_text(back) == once);
  CHECK(back.solids.size() == sc.solids.size());
  CHECK(back.patches.size() == 1);
}

TEST_CASE("overlap detection names the solids") {
  Scene sc;
  Solid a, b;
  a.name = "box_a";
  a.shape = Shape{ShapeKind::Box, 50, 50, 50, 0};
  a.material = Material::Conductor();
  b = a;
  b.name = "box_b";
  b.pose.t = Vec3(60, 0, 0);  // 40 um interpenetration
  sc.solids = {a, b};
  try {
    check_overlaps(sc);
    CHECK(false);
  } catch (const geometry_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("box_a") != std::string::npos);
    CHECK(msg.find("box_b") != std::string::npos);
  }
}

TEST_CASE("material and shape validation") {
  CHECK_THROWS_AS(Material::Dielectric(0.5), geometry_error);
  CHECK_THROWS_AS(Material::Dielectric(3.75, -1.0), geometry_error);
  Shape bad{ShapeKind::Tube, 10, 5, 100, 0};
  CHECK_THROWS_AS(bad.validate(), geometry_error);
}
