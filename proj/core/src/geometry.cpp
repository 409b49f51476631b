#include "trapkit/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace trapkit {

void Shape::validate() const {
  auto positive = [](double v) { return v > 0.0; };
  switch (kind) {
    case ShapeKind::Box:
    case ShapeKind::Plate:
      if (!positive(a) || !positive(b) || !positive(c))
        throw geometry_error("box/plate requires positive extents");
      break;
    case ShapeKind::Cylinder:
      if (!positive(a) || !positive(b)) throw geometry_error("cylinder requires positive radius/length");
      break;
    case ShapeKind::Tube:
      if (!positive(a) || !positive(b) || !positive(c) || a >= b)
        throw geometry_error("tube requires 0 < inner_radius < outer_radius and length > 0");
      break;
    case ShapeKind::Sphere:
      if (!positive(a)) throw geometry_error("sphere requires positive radius");
      break;
    case ShapeKind::Wedge:
      if (!positive(a) || !positive(b) || !positive(c) || d < 0.0 || d >= 90.0)
        throw geometry_error("wedge requires positive tip width/depth/length, taper in [0,90)");
      break;
  }
}

double Shape::volume() const {
  switch (kind) {
    case ShapeKind::Box: return 8.0 * a * b * c;
    case ShapeKind::Plate: return a * b * c;
    case ShapeKind::Cylinder: return kPi * a * a * b;
    case ShapeKind::Tube: return kPi * (b * b - a * a) * c;
    case ShapeKind::Sphere: return 4.0 / 3.0 * kPi * a * a * a;
    case ShapeKind::Wedge: {
      const double w1 = a + 2.0 * b * std::tan(d * kPi / 180.0);
      return 0.5 * (a + w1) * b * c;
    }
  }
  return 0.0;
}

double Shape::surface_area() const {
  switch (kind) {
    case ShapeKind::Box: return 8.0 * (a * b + b * c + c * a);
    case ShapeKind::Plate: return 2.0 * (a * b + b * c + c * a);
    case ShapeKind::Cylinder: return 2.0 * kPi * a * a + 2.0 * kPi * a * b;
    case ShapeKind::Tube: return 2.0 * kPi * (b * b - a * a) + 2.0 * kPi * (a + b) * c;
    case ShapeKind::Sphere: return 4.0 * kPi * a * a;
    case ShapeKind::Wedge: {
      const double t = std::tan(d * kPi / 180.0);
      const double w1 = a + 2.0 * b * t;
      const double cs = 0.5 * (a + w1) * b;       // trapezoid cross-section
      const double slant = b / std::cos(d * kPi / 180.0);
      return 2.0 * cs + (a + w1) * c + 2.0 * slant * c;
    }
  }
  return 0.0;
}

Mat3 rotation_z_to(const Vec3& dir) {
  const Vec3 z = dir.normalized();
  Vec3 ref = std::abs(z.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 x = (ref - ref.dot(z) * z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x; R.col(1) = y; R.col(2) = z;
  return R;
}

Mat3 rotation_about_z(double angle) {
  Mat3 R = Mat3::Identity();
  const double c = std::cos(angle), s = std::sin(angle);
  R(0, 0) = c; R(0, 1) = -s;
  R(1, 0) = s; R(1, 1) = c;
  return R;
}

std::string role_name(Role r) {
  switch (r) {
    case Role::RfA: return "rf_a";
    case Role::RfB: return "rf_b";
    case Role::Dc: return "dc";
    case Role::Ground: return "ground";
    case Role::Shield: return "shield";
    case Role::DielectricBody: return "dielectric";
  }
  return "?";
}

Role role_from_name(const std::string& s) {
  if (s == "rf_a") return Role::RfA;
  if (s == "rf_b") return Role::RfB;
  if (s == "dc") return Role::Dc;
  if (s == "ground") return Role::Ground;
  if (s == "shield") return Role::Shield;
  if (s == "dielectric") return Role::DielectricBody;
  throw geometry_error("unknown role: " + s);
}

bool Solid::contains(const Vec3& world_point, double m) const {
  const Vec3 p = pose.to_local(world_point);
  const auto& s = shape;
  switch (s.kind) {
    case ShapeKind::Box:
      return std::abs(p.x()) <= s.a - m && std::abs(p.y()) <= s.b - m && std::abs(p.z()) <= s.c - m;
    case ShapeKind::Plate:
      return std::abs(p.x()) <= 0.5 * s.a - m && std::abs(p.y()) <= 0.5 * s.b - m &&
             std::abs(p.z()) <= 0.5 * s.c - m;
    case ShapeKind::Cylinder:
      return p.head<2>().norm() <= s.a - m && std::abs(p.z()) <= 0.5 * s.b - m;
    case ShapeKind::Tube: {
      const double r = p.head<2>().norm();
      return r >= s.a + m && r <= s.b - m && std::abs(p.z()) <= 0.5 * s.c - m;
    }
    case ShapeKind::Sphere:
      return p.norm() <= s.a - m;
    case ShapeKind::Wedge: {
      if (p.x() < m || p.x() > s.b - m || std::abs(p.z()) > 0.5 * s.c - m) return false;
      const double half_w = 0.5 * s.a + p.x() * std::tan(s.d * kPi / 180.0);
      return std::abs(p.y()) <= half_w - m;
    }
  }
  return false;
}

const Solid* Scene::find(const std::string& name) const {
  for (const auto& s : solids)
    if (s.name == name) return &s;
  return nullptr;
}

Solid* Scene::find(const std::string& name) {
  for (auto& s : solids)
    if (s.name == name) return &s;
  return nullptr;
}

bool Scene::point_inside_conductor(const Vec3& p, double margin) const {
  for (const auto& s : solids)
    if (s.material.conductor && s.contains(p, margin)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Overlap detection: sample each solid surface and probe the others.

namespace {

std::vector<Vec3> sample_surface_local(const Shape& s, int n) {
  std::vector<Vec3> pts;
  auto lin = [n](double lo, double hi, int i) { return lo + (hi - lo) * i / double(n); };
  switch (s.kind) {
    case ShapeKind::Box:
    case ShapeKind::Plate: {
      double hx = s.kind == ShapeKind::Box ? s.a : 0.5 * s.a;
      double hy = s.kind == ShapeKind::Box ? s.b : 0.5 * s.b;
      double hz = s.kind == ShapeKind::Box ? s.c : 0.5 * s.c;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          double u = lin(-1, 1, i), v = lin(-1, 1, j);
          pts.push_back({hx * u, hy * v, hz});
          pts.push_back({hx * u, hy * v, -hz});
          pts.push_back({hx * u, hy, hz * v});
          pts.push_back({hx * u, -hy, hz * v});
          pts.push_back({hx, hy * u, hz * v});
          pts.push_back({-hx, hy * u, hz * v});
        }
      break;
    }
    case ShapeKind::Cylinder: {
      for (int i = 0; i < 2 * n; ++i) {
        double th = 2 * kPi * i / (2 * n);
        double x = s.a * std::cos(th), y = s.a * std::sin(th);
        for (int j = 0; j <= n; ++j) pts.push_back({x, y, lin(-0.5 * s.b, 0.5 * s.b, j)});
        for (int j = 0; j <= n; ++j) {
          double r = s.a * j / double(n);
          pts.push_back({r * std::cos(th), r * std::sin(th), 0.5 * s.b});
          pts.push_back({r * std::cos(th), r * std::sin(th), -0.5 * s.b});
        }
      }
      break;
    }
    case ShapeKind::Tube: {
      for (int i = 0; i < 2 * n; ++i) {
        double th = 2 * kPi * i / (2 * n);
        double cx = std::cos(th), sy = std::sin(th);
        for (int j = 0; j <= n; ++j) {
          double z = lin(-0.5 * s.c, 0.5 * s.c, j);
          pts.push_back({s.a * cx, s.a * sy, z});
          pts.push_back({s.b * cx, s.b * sy, z});
        }
        for (int j = 0; j <= n; ++j) {
          double r = lin(s.a, s.b, j);
          pts.push_back({r * cx, r * sy, 0.5 * s.c});
          pts.push_back({r * cx, r * sy, -0.5 * s.c});
        }
      }
      break;
    }
    case ShapeKind::Sphere: {
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
          double ph = kPi * i / double(n), th = 2 * kPi * j / (2 * n);
          pts.push_back({s.a * std::sin(ph) * std::cos(th), s.a * std::sin(ph) * std::sin(th),
                         s.a * std::cos(ph)});
        }
      break;
    }
    case ShapeKind::Wedge: {
      const double t = std::tan(s.d * kPi / 180.0);
      for (int i = 0; i <= n; ++i) {
        double x = s.b * i / double(n);
        double hw = 0.5 * s.a + x * t;
        for (int j = 0; j <= n; ++j) {
          double z = lin(-0.5 * s.c, 0.5 * s.c, j);
          pts.push_back({x, hw, z});
          pts.push_back({x, -hw, z});
          if (i == 0 || i == n)
            pts.push_back({x, lin(-hw, hw, j), z});
        }
        for (int j = 0; j <= n; ++j) {
          pts.push_back({x, lin(-hw, hw, j), 0.5 * s.c});
          pts.push_back({x, lin(-hw, hw, j), -0.5 * s.c});
        }
      }
      break;
    }
  }
  return pts;
}

} // namespace

void check_overlaps(const Scene& scene, double tol_um) {
  const int n = 12;
  std::vector<std::vector<Vec3>> world_samples(scene.solids.size());
  for (size_t i = 0; i < scene.solids.size(); ++i) {
    auto pts = sample_surface_local(scene.solids[i].shape, n);
    world_samples[i].reserve(pts.size());
    for (const auto& p : pts) world_samples[i].push_back(scene.solids[i].pose.to_world(p));
  }
  for (size_t i = 0; i < scene.solids.size(); ++i)
    for (size_t j = 0; j < scene.solids.size(); ++j) {
      if (i == j) continue;
      for (const auto& p : world_samples[i])
        if (scene.solids[j].contains(p, tol_um))
          throw geometry_error("solids overlap: " + scene.solids[i].name + " and " +
                               scene.solids[j].name);
    }
}

// ---------------------------------------------------------------------------
// Builders

namespace {

Solid make_blade(const std::string& name, const BladeTrapParams& p, double angle_rad,
                 double length, double z_center, Role role, const std::string& label) {
  Solid s;
  s.name = name;
  s.shape = Shape{ShapeKind::Wedge, p.tip_width, p.blade_depth, length, p.taper_deg};
  const Vec3 radial(std::cos(angle_rad), std::sin(angle_rad), 0.0);
  Mat3 R;
  R.col(0) = radial;
  R.col(1) = Vec3(-radial.y(), radial.x(), 0.0);
  R.col(2) = Vec3::UnitZ();
  s.pose.R = R;
  s.pose.t = p.tip_radius * radial + Vec3(0, 0, z_center);
  s.material = Material::Conductor();
  s.role = role;
  s.label = label;
  return s;
}

// Fibre/shield pair along the cavity (x) axis; side = +1 for right (x > 0).
// Local +z of each cylinder/tube points toward the trap centre, so the
// FrontFacet face tag is the +z cap for both.
Solid make_fibre(const std::string& name, double facet_x, double diameter, double length,
                 int side) {
  Solid s;
  s.name = name;
  s.shape = Shape{ShapeKind::Cylinder, 0.5 * diameter, length, 0, 0};
  s.pose.R = rotation_z_to(Vec3(-double(side), 0, 0));
  s.pose.t = Vec3(facet_x + side * 0.5 * length, 0, 0);
  s.material = Material::Dielectric(3.75, 0.0);  // fused silica bulk
  s.role = Role::DielectricBody;
  return s;
}

Solid make_shield(const std::string& name, double front_x, double inner_d, double outer_d,
                  double length, int side, const std::string& label) {
  Solid s;
  s.name = name;
  s.shape = Shape{ShapeKind::Tube, 0.5 * inner_d, 0.5 * outer_d, length, 0};
  s.pose.R = rotation_z_to(Vec3(-double(side), 0, 0));
  s.pose.t = Vec3(front_x + side * 0.5 * length, 0, 0);
  s.material = Material::Conductor();
  s.role = Role::Shield;
  s.label = label;
  return s;
}

} // namespace

Scene build_blade_trap(const BladeTrapParams& p, double cavity_length, bool with_fibres,
                       bool with_shields, double shield_protrusion) {
  if (cavity_length <= 0) throw geometry_error("cavity_length must be positive");
  if (shield_protrusion < 0) throw geometry_error("shield_protrusion must be >= 0");
  Scene sc;
  const double angles[4] = {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};
  const Role pair_role[4] = {Role::RfA, Role::RfB, Role::RfA, Role::RfB};
  for (int k = 0; k < 4; ++k)
    sc.solids.push_back(make_blade("rf_blade_" + std::to_string(k), p, angles[k], p.rf_length,
                                   0.0, pair_role[k], ""));
  const double zc = 0.5 * p.rf_length + p.endcap_gap + 0.5 * p.endcap_length;
  for (int k = 0; k < 4; ++k) {
    sc.solids.push_back(make_blade("endcap_p" + std::to_string(k), p, angles[k],
                                   p.endcap_length, zc, Role::Dc, "endcap"));
    sc.solids.push_back(make_blade("endcap_m" + std::to_string(k), p, angles[k],
                                   p.endcap_length, -zc, Role::Dc, "endcap"));
  }
  if (with_fibres) {
    sc.solids.push_back(make_fibre("fibre_R", 0.5 * cavity_length, p.fibre_diameter,
                                   p.fibre_length, +1));
    sc.solids.push_back(make_fibre("fibre_L", -0.5 * cavity_length, p.fibre_diameter,
                                   p.fibre_length, -1));
  }
  if (with_shields) {
    const double front = 0.5 * cavity_length - shield_protrusion;
    sc.solids.push_back(make_shield("shield_R", front, p.shield_inner_diameter,
                                    p.shield_outer_diameter, p.shield_length, +1, "shield_R"));
    sc.solids.push_back(make_shield("shield_L", -front, p.shield_inner_diameter,
                                    p.shield_outer_diameter, p.shield_length, -1, "shield_L"));
  }
  sc.meta["cavity_length"] = cavity_length;
  sc.meta["tip_radius"] = p.tip_radius;
  sc.meta["rf_length"] = p.rf_length;
  sc.meta["shield_protrusion"] = shield_protrusion;
  sc.meta["trap_kind"] = 0;  // 0 = blade, 1 = four-rod, 2 = surface
  for (auto& s : sc.solids) s.shape.validate();
  check_overlaps(sc);
  return sc;
}

Scene build_four_rod_trap(double rod_radius, double rod_distance, double length,
                          bool with_shields, const FourRodTrapParams& p) {
  if (rod_distance <= rod_radius)
    throw geometry_error("rod distance must exceed rod radius");
  Scene sc;
  const double a = p.rod_angle_deg * kPi / 180.0;
  const double angles[4] = {a, kPi - a, kPi + a, -a};
  const Role pair_role[4] = {Role::RfA, Role::RfB, Role::RfA, Role::RfB};
  for (int k = 0; k < 4; ++k) {
    Solid s;
    s.name = "rod_" + std::to_string(k);
    s.shape = Shape{ShapeKind::Cylinder, rod_radius, length, 0, 0};
    s.pose.R = Mat3::Identity();  // rods along z
    s.pose.t = Vec3(rod_distance * std::cos(angles[k]), rod_distance * std::sin(angles[k]), 0);
    s.material = Material::Conductor();
    s.role = pair_role[k];
    sc.solids.push_back(s);
  }
  if (with_shields) {
    const double front = 0.5 * p.cavity_length;
    sc.solids.push_back(make_shield("shield_R", front, p.shield_inner_diameter,
                                    p.shield_outer_diameter, p.shield_length, +1, "shield_R"));
    sc.solids.push_back(make_shield("shield_L", -front, p.shield_inner_diameter,
                                    p.shield_outer_diameter, p.shield_length, -1, "shield_L"));
    if (p.with_fibres) {
      sc.solids.push_back(make_fibre("fibre_R", front, p.fibre_diameter, p.fibre_length, +1));
      sc.solids.push_back(make_fibre("fibre_L", -front, p.fibre_diameter, p.fibre_length, -1));
    }
  }
  sc.meta["rod_distance"] = rod_distance;
  sc.meta["rod_radius"] = rod_radius;
  sc.meta["rod_length"] = length;
  sc.meta["trap_kind"] = 1;
  for (auto& s : sc.solids) s.shape.validate();
  check_overlaps(sc);
  return sc;
}

Scene build_surface_trap(const SurfaceTrapParams& p, double ion_height, double cavity_length,
                         bool with_shields) {
  Scene sc;
  const double a = p.rf_inner_edge;
  const double c = p.rf_inner_edge + p.rf_width;
  const double h = ion_height > 0 ? ion_height : std::sqrt(a * c);
  if (h <= 0) throw geometry_error("ion height must be positive");
  auto rail = [&](const std::string& name, double x0, double x1, Role role,
                  const std::string& label) {
    Solid s;
    s.name = name;
    s.shape = Shape{ShapeKind::Plate, x1 - x0, p.rail_thickness, p.rail_length, 0};
    s.pose.t = Vec3(0.5 * (x0 + x1), -0.5 * p.rail_thickness, 0);  // top face at y = 0
    s.material = Material::Conductor();
    s.role = role;
    s.label = label;
    return s;
  };
  sc.solids.push_back(rail("ground_rail", -(a - p.gap), a - p.gap, Role::Ground, ""));
  sc.solids.push_back(rail("rf_rail_p", a, c, Role::RfA, ""));
  sc.solids.push_back(rail("rf_rail_m", -c, -a, Role::RfA, ""));
  sc.solids.push_back(rail("ground_outer_p", c + p.gap, 0.5 * p.plane_width, Role::Ground, ""));
  sc.solids.push_back(rail("ground_outer_m", -0.5 * p.plane_width, -(c + p.gap), Role::Ground, ""));
  if (cavity_length > 0) {
    auto lift = [&](Solid s) {
      s.pose.t.y() += h;
      return s;
    };
    sc.solids.push_back(lift(make_fibre("fibre_R", 0.5 * cavity_length, p.fibre_diameter,
                                        p.fibre_length, +1)));
    sc.solids.push_back(lift(make_fibre("fibre_L", -0.5 * cavity_length, p.fibre_diameter,
                                        p.fibre_length, -1)));
    if (with_shields) {
      sc.solids.push_back(lift(make_shield("shield_R", 0.5 * cavity_length,
                                           p.shield_inner_diameter, p.shield_outer_diameter,
                                           p.shield_length, +1, "shield_R")));
      sc.solids.push_back(lift(make_shield("shield_L", -0.5 * cavity_length,
                                           p.shield_inner_diameter, p.shield_outer_diameter,
                                           p.shield_length, -1, "shield_L")));
    }
  }
  sc.meta["ion_height"] = h;
  sc.meta["cavity_length"] = cavity_length;
  sc.meta["rf_inner_edge"] = a;
  sc.meta["rf_outer_edge"] = c;
  sc.meta["trap_kind"] = 2;
  for (auto& s : sc.solids) s.shape.validate();
  check_overlaps(sc);
  return sc;
}

Scene apply_misalignment(const Scene& scene, char target_side, const Vec3& offset_um) {
  const std::string suffix = target_side == 'L' ? "_L" : "_R";
  Scene out = scene;
  bool found = false;
  for (auto& s : out.solids) {
    if (s.name == "fibre" + suffix || s.name == "shield" + suffix) {
      s.pose.t += offset_um;
      found = true;
    }
  }
  if (!found) throw geometry_error("misalignment target fibre" + suffix + " not in scene");
  check_overlaps(out);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace

std::string scene_to_text(const Scene& scene) {
  std::ostringstream os;
  os << "trapkit-scene 1\n";
  for (const auto& s : scene.solids) {
    os << "solid " << s.name << " ";
    switch (s.shape.kind) {
      case ShapeKind::Box: os << "box"; break;
      case ShapeKind::Cylinder: os << "cylinder"; break;
      case ShapeKind::Tube: os << "tube"; break;
      case ShapeKind::Plate: os << "plate"; break;
      case ShapeKind::Sphere: os << "sphere"; break;
      case ShapeKind::Wedge: os << "wedge"; break;
    }
    for (double v : {s.shape.a, s.shape.b, s.shape.c, s.shape.d}) os << " " << fmt_g17(v);
    os << " pose";
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) os << " " << fmt_g17(s.pose.R(r, col));
    for (int k = 0; k < 3; ++k) os << " " << fmt_g17(s.pose.t[k]);
    os << " material " << (s.material.conductor ? "conductor" : "dielectric") << " "
       << fmt_g17(s.material.eps_r) << " " << fmt_g17(s.material.tan_delta);
    os << " role " << role_name(s.role) << " label " << (s.label.empty() ? "-" : s.label)
       << "\n";
  }
  for (const auto& p : scene.patches)
    os << "patch " << p.solid << " " << (p.region == PatchRegion::FrontFacet ? "facet" : "all")
       << " " << fmt_g17(p.density_e_per_um2) << "\n";
  for (const auto& [k, v] : scene.meta) os << "meta " << k << " " << fmt_g17(v) << "\n";
  return os.str();
}

Scene scene_from_text(const std::string& text) {
  Scene sc;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("trapkit-scene", 0) != 0)
    throw geometry_error("not a trapkit scene listing");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "solid") {
      Solid s;
      std::string kind, word;
      ls >> s.name >> kind;
      if (kind == "box") s.shape.kind = ShapeKind::Box;
      else if (kind == "cylinder") s.shape.kind = ShapeKind::Cylinder;
      else if (kind == "tube") s.shape.kind = ShapeKind::Tube;
      else if (kind == "plate") s.shape.kind = ShapeKind::Plate;
      else if (kind == "sphere") s.shape.kind = ShapeKind::Sphere;
      else if (kind == "wedge") s.shape.kind = ShapeKind::Wedge;
      else throw geometry_error("unknown shape kind: " + kind);
      ls >> s.shape.a >> s.shape.b >> s.shape.c >> s.shape.d;
      ls >> word;  // "pose"
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) ls >> s.pose.R(r, col);
      ls >> s.pose.t[0] >> s.pose.t[1] >> s.pose.t[2];
      ls >> word;  // "material"
      std::string mat;
      ls >> mat >> s.material.eps_r >> s.material.tan_delta;
      s.material.conductor = (mat == "conductor");
      ls >> word;  // "role"
      std::string role;
      ls >> role;
      s.role = role_from_name(role);
      ls >> word >> s.label;  // "label"
      if (s.label == "-") s.label.clear();
      if (!ls) throw geometry_error("malformed solid line: " + line);
      sc.solids.push_back(s);
    } else if (tag == "patch") {
      SurfaceChargePatch p;
      std::string region;
      ls >> p.solid >> region >> p.density_e_per_um2;
      p.region = region == "facet" ? PatchRegion::FrontFacet : PatchRegion::All;
      sc.patches.push_back(p);
    } else if (tag == "meta") {
      std::string k;
      double v;
      ls >> k >> v;
      sc.meta[k] = v;
    } else {
      throw geometry_error("unknown scene line tag: " + tag);
    }
  }
  return sc;
}

} // namespace trapkit
