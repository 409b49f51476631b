#include "trapkit/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace trapkit {

double target_edge(const MeshOptions& opt, const Vec3& p) {
  const double cap = std::max(opt.base_edge, opt.max_edge);
  double t = opt.rules.empty() ? opt.base_edge : cap;
  for (const auto& r : opt.rules) {
    const double d = (p - r.center).norm();
    t = std::min(t, r.edge + opt.grade * std::max(0.0, d - r.radius));
  }
  return std::max(t, 0.05);
}

namespace {

constexpr double kDegenerateArea = 1e-6;  // um^2

struct Emitter {
  const Solid* solid = nullptr;
  int body = -1;
  int face = -1;
  std::vector<Panel>* out = nullptr;

  // outward_hint: rough outward direction at the triangle location (world)
  void tri(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& outward_hint) {
    Panel p;
    p.v0 = a; p.v1 = b; p.v2 = c;
    Vec3 n = (b - a).cross(c - a);
    const double n2 = n.norm();
    if (0.5 * n2 < kDegenerateArea) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "degenerate panel (area %.3g um^2) on %s near (%.1f,%.1f,%.1f)",
                    0.5 * n2, solid->name.c_str(), a.x(), a.y(), a.z());
      throw mesh_error(buf);
    }
    if (n.dot(outward_hint) < 0) {
      std::swap(p.v1, p.v2);
      n = -n;
    }
    p.area = 0.5 * n2;
    p.normal = n / n2;
    p.centroid = (p.v0 + p.v1 + p.v2) / 3.0;
    p.diameter = std::max({(p.v1 - p.v0).norm(), (p.v2 - p.v1).norm(), (p.v0 - p.v2).norm()});
    p.body = body;
    p.face = face;
    p.dielectric = !solid->material.conductor;
    p.eps_in = solid->material.conductor ? 1.0 : solid->material.eps_r;
    out->push_back(p);
  }

  // union-jack split: 4 triangles through the quad centre
  void quad(const Vec3& p00, const Vec3& p10, const Vec3& p11, const Vec3& p01,
            const Vec3& outward_hint) {
    const Vec3 c = 0.25 * (p00 + p10 + p11 + p01);
    tri(p00, p10, c, outward_hint);
    tri(p10, p11, c, outward_hint);
    tri(p11, p01, c, outward_hint);
    tri(p01, p00, c, outward_hint);
  }
};

// Bidirectionally graded 1-D grid from s0 to s1 (s0 < s1). The step callback
// gives the local target size; mirrored targets produce exactly mirrored
// grids.
std::vector<double> graded_grid(double s0, double s1, const std::function<double(double)>& t) {
  std::vector<double> lo{s0}, hi{s1};
  const double len = s1 - s0;
  for (int guard = 0; guard < 100000; ++guard) {
    const double a = lo.back(), b = hi.back();
    const double gap = b - a;
    const double ta = std::min(std::max(t(a), 0.05), len);
    const double tb = std::min(std::max(t(b), 0.05), len);
    if (gap <= 1.45 * std::min(ta, tb)) {
      if (gap > 0.75 * std::min(ta, tb)) {
        // two closing cells through the exact midpoint
        lo.push_back(a + 0.5 * gap);
      }
      break;
    }
    lo.push_back(a + ta);
    hi.push_back(b - tb);
    if (lo.back() >= hi.back()) {  // crossed; drop and close
      lo.pop_back();
      hi.pop_back();
      lo.push_back(0.5 * (lo.back() + hi.back()));
      break;
    }
  }
  for (auto it = hi.rbegin(); it != hi.rend(); ++it) lo.push_back(*it);
  lo.erase(std::unique(lo.begin(), lo.end()), lo.end());
  return lo;
}

int ring_count(double radius, double target, int minimum = 16) {
  int n = int(std::ceil(2.0 * kPi * radius / std::max(target, 0.05)));
  n = std::max(n, minimum);
  return ((n + 3) / 4) * 4;  // multiple of 4 keeps the x/y mirrors exact
}

struct ShapeMesher {
  const Scene* scene;
  const MeshOptions* opt;
  std::vector<Panel>* out;

  double t_world(const Vec3& p) const { return target_edge(*opt, p); }

  // target along a local line, taking the min over a few probe points
  std::function<double(double)> line_target(const Pose& pose,
                                            std::vector<std::function<Vec3(double)>> probes) const {
    return [this, pose, probes](double s) {
      double t = 1e30;
      for (const auto& pr : probes) t = std::min(t, t_world(pose.to_world(pr(s))));
      return t;
    };
  }

  void mesh_solid(int body) {
    const Solid& s = scene->solids[size_t(body)];
    Emitter em{&s, body, 0, out};
    switch (s.shape.kind) {
      case ShapeKind::Box: mesh_box(s, em, s.shape.a, s.shape.b, s.shape.c); break;
      case ShapeKind::Plate: mesh_box(s, em, 0.5 * s.shape.a, 0.5 * s.shape.b, 0.5 * s.shape.c); break;
      case ShapeKind::Cylinder: mesh_cylinder(s, em); break;
      case ShapeKind::Tube: mesh_tube(s, em); break;
      case ShapeKind::Sphere: mesh_sphere(s, em); break;
      case ShapeKind::Wedge: mesh_wedge(s, em); break;
    }
  }

  void mesh_box(const Solid& s, Emitter& em, double hx, double hy, double hz) {
    auto gx = graded_grid(-hx, hx, line_target(s.pose, {[=](double u) { return Vec3(u, 0, 0); },
                                                        [=](double u) { return Vec3(u, hy, hz); },
                                                        [=](double u) { return Vec3(u, -hy, -hz); }}));
    auto gy = graded_grid(-hy, hy, line_target(s.pose, {[=](double u) { return Vec3(0, u, 0); },
                                                        [=](double u) { return Vec3(hx, u, hz); },
                                                        [=](double u) { return Vec3(-hx, u, -hz); }}));
    auto gz = graded_grid(-hz, hz, line_target(s.pose, {[=](double u) { return Vec3(0, 0, u); },
                                                        [=](double u) { return Vec3(hx, hy, u); },
                                                        [=](double u) { return Vec3(-hx, -hy, u); }}));
    auto face = [&](int tag, auto corner, const Vec3& hint_local,
                    const std::vector<double>& ga, const std::vector<double>& gb) {
      em.face = tag;
      const Vec3 hint = s.pose.dir_to_world(hint_local);
      for (size_t i = 0; i + 1 < ga.size(); ++i)
        for (size_t j = 0; j + 1 < gb.size(); ++j)
          em.quad(s.pose.to_world(corner(ga[i], gb[j])), s.pose.to_world(corner(ga[i + 1], gb[j])),
                  s.pose.to_world(corner(ga[i + 1], gb[j + 1])), s.pose.to_world(corner(ga[i], gb[j + 1])),
                  hint);
    };
    face(0, [&](double u, double v) { return Vec3(hx, u, v); }, Vec3(1, 0, 0), gy, gz);
    face(1, [&](double u, double v) { return Vec3(-hx, u, v); }, Vec3(-1, 0, 0), gy, gz);
    face(2, [&](double u, double v) { return Vec3(u, hy, v); }, Vec3(0, 1, 0), gx, gz);
    face(3, [&](double u, double v) { return Vec3(u, -hy, v); }, Vec3(0, -1, 0), gx, gz);
    face(4, [&](double u, double v) { return Vec3(u, v, hz); }, Vec3(0, 0, 1), gx, gy);
    face(5, [&](double u, double v) { return Vec3(u, v, -hz); }, Vec3(0, 0, -1), gx, gy);
  }

  // polar cap at local z = zc spanning radii [r_in, r_out]; r_in = 0 closes
  // with a centre fan
  void cap(const Solid& s, Emitter& em, int tag, double zc, double r_in, double r_out, int n,
           int z_sign) {
    em.face = tag;
    const Vec3 hint = s.pose.dir_to_world(Vec3(0, 0, z_sign));
    auto radial = graded_grid(r_in, r_out, line_target(s.pose, {[=](double r) { return Vec3(r, 0, zc); },
                                                                [=](double r) { return Vec3(0, r, zc); }}));
    std::vector<double> cth(static_cast<size_t>(n)), sth(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      cth[size_t(k)] = std::cos(2 * kPi * k / n);
      sth[size_t(k)] = std::sin(2 * kPi * k / n);
    }
    auto at = [&](double r, int k) {
      return s.pose.to_world(Vec3(r * cth[size_t(k % n)], r * sth[size_t(k % n)], zc));
    };
    size_t first = 0;
    if (r_in == 0.0) {
      first = 1;
      if (radial.size() < 2) return;
      for (int k = 0; k < n; ++k)
        em.tri(s.pose.to_world(Vec3(0, 0, zc)), at(radial[1], k), at(radial[1], k + 1), hint);
    }
    for (size_t i = first; i + 1 < radial.size(); ++i)
      for (int k = 0; k < n; ++k)
        em.quad(at(radial[i], k), at(radial[i + 1], k), at(radial[i + 1], k + 1), at(radial[i], k + 1),
                hint);
  }

  // lateral surface of radius r between z0 < z1; sign +1 normals outward
  void side(const Solid& s, Emitter& em, int tag, double r, double z0, double z1, int n, int sign) {
    em.face = tag;
    auto axial = graded_grid(z0, z1, line_target(s.pose, {[=](double z) { return Vec3(r, 0, z); },
                                                          [=](double z) { return Vec3(-r, 0, z); },
                                                          [=](double z) { return Vec3(0, r, z); },
                                                          [=](double z) { return Vec3(0, -r, z); }}));
    for (int k = 0; k < n; ++k) {
      const double th0 = 2 * kPi * k / n, th1 = 2 * kPi * (k + 1) / n;
      const Vec3 d0(std::cos(th0), std::sin(th0), 0), d1(std::cos(th1), std::sin(th1), 0);
      const Vec3 hint = s.pose.dir_to_world(sign * 0.5 * (d0 + d1));
      for (size_t i = 0; i + 1 < axial.size(); ++i)
        em.quad(s.pose.to_world(r * d0 + Vec3(0, 0, axial[i])),
                s.pose.to_world(r * d1 + Vec3(0, 0, axial[i])),
                s.pose.to_world(r * d1 + Vec3(0, 0, axial[i + 1])),
                s.pose.to_world(r * d0 + Vec3(0, 0, axial[i + 1])), hint);
    }
  }

  double circle_target(const Solid& s, double r, double z) const {
    double t = 1e30;
    for (int k = 0; k < 8; ++k) {
      const double th = 2 * kPi * k / 8;
      t = std::min(t, t_world(s.pose.to_world(Vec3(r * std::cos(th), r * std::sin(th), z))));
    }
    return t;
  }

  void mesh_cylinder(const Solid& s, Emitter& em) {
    const double R = s.shape.a, hz = 0.5 * s.shape.b;
    const int n = ring_count(R, std::min(circle_target(s, R, hz), circle_target(s, R, -hz)));
    side(s, em, face_tag::kCylSide, R, -hz, hz, n, +1);
    cap(s, em, face_tag::kCylFront, hz, 0, R, n, +1);
    cap(s, em, face_tag::kCylBack, -hz, 0, R, n, -1);
  }

  void mesh_tube(const Solid& s, Emitter& em) {
    const double ri = s.shape.a, ro = s.shape.b, hz = 0.5 * s.shape.c;
    const int n = ring_count(ro, std::min(circle_target(s, ro, hz), circle_target(s, ri, hz)));
    side(s, em, face_tag::kTubeOuter, ro, -hz, hz, n, +1);
    side(s, em, face_tag::kTubeBore, ri, -hz, hz, n, -1);
    cap(s, em, face_tag::kTubeFront, hz, ri, ro, n, +1);
    cap(s, em, face_tag::kTubeBack, -hz, ri, ro, n, -1);
  }

  void mesh_sphere(const Solid& s, Emitter& em) {
    em.face = 0;
    const double R = s.shape.a;
    // icosphere; subdivision level from the equatorial target edge
    const double t = circle_target(s, R, 0);
    int level = 0;
    double edge = R / std::sin(2.0 * kPi / 5.0);  // icosahedron edge for circumradius R
    while (edge > t && level < 7) {
      edge *= 0.5;
      ++level;
    }
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p = p.normalized() * R;
    std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
                                         {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                         {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
                                         {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
      std::vector<std::array<int, 3>> f2;
      std::map<std::pair<int, int>, int> midpoint;
      auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        v.push_back(((v[size_t(a)] + v[size_t(b)]) * 0.5).normalized() * R);
        midpoint[key] = int(v.size()) - 1;
        return int(v.size()) - 1;
      };
      for (auto& tr : f) {
        int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
        f2.push_back({tr[0], ab, ca});
        f2.push_back({tr[1], bc, ab});
        f2.push_back({tr[2], ca, bc});
        f2.push_back({ab, bc, ca});
      }
      f = std::move(f2);
    }
    for (auto& tr : f) {
      const Vec3 a = s.pose.to_world(v[size_t(tr[0])]), b = s.pose.to_world(v[size_t(tr[1])]),
                 c = s.pose.to_world(v[size_t(tr[2])]);
      em.tri(a, b, c, (a + b + c) / 3.0 - s.pose.t);
    }
  }

  void mesh_wedge(const Solid& s, Emitter& em) {
    const double w0 = s.shape.a, depth = s.shape.b, hz = 0.5 * s.shape.c;
    const double tanq = std::tan(s.shape.d * kPi / 180.0);
    auto half_w = [&](double x) { return 0.5 * w0 + x * tanq; };
    auto gx = graded_grid(0, depth, line_target(s.pose, {[=](double x) { return Vec3(x, 0, 0); },
                                                         [=](double x) { return Vec3(x, 0, hz); },
                                                         [=](double x) { return Vec3(x, 0, -hz); }}));
    auto gz = graded_grid(-hz, hz, line_target(s.pose, {[=](double z) { return Vec3(0, 0, z); },
                                                        [=](double z) { return Vec3(depth, 0, z); }}));
    // normalized width coordinate; count set by the worst (widest) station
    int neta = 2;
    for (double x : gx) {
      const double w = 2 * half_w(x);
      const double t = std::min(t_world(s.pose.to_world(Vec3(x, -half_w(x), 0))),
                                t_world(s.pose.to_world(Vec3(x, half_w(x), 0))));
      neta = std::max(neta, int(std::ceil(w / t)));
    }
    neta = std::min(neta + (neta & 1), 64);  // even, capped
    std::vector<double> geta(size_t(neta) + 1);
    for (int i = 0; i <= neta; ++i) geta[size_t(i)] = -1.0 + 2.0 * i / neta;

    auto P = [&](double x, double eta, double z) {
      return s.pose.to_world(Vec3(x, eta * half_w(x), z));
    };
    // tip and back faces: (eta, z)
    for (int which = 0; which < 2; ++which) {
      const double x = which == 0 ? 0.0 : depth;
      em.face = which == 0 ? face_tag::kWedgeTip : face_tag::kWedgeBack;
      const Vec3 hint = s.pose.dir_to_world(Vec3(which == 0 ? -1 : 1, 0, 0));
      for (int i = 0; i < neta; ++i)
        for (size_t j = 0; j + 1 < gz.size(); ++j)
          em.quad(P(x, geta[size_t(i)], gz[j]), P(x, geta[size_t(i) + 1], gz[j]),
                  P(x, geta[size_t(i) + 1], gz[j + 1]), P(x, geta[size_t(i)], gz[j + 1]), hint);
    }
    // flank faces at eta = +-1: (x, z)
    for (int sgn : {+1, -1}) {
      em.face = sgn > 0 ? 2 : 3;
      const Vec3 hint = s.pose.dir_to_world(Vec3(-tanq * sgn, double(sgn), 0).normalized());
      for (size_t i = 0; i + 1 < gx.size(); ++i)
        for (size_t j = 0; j + 1 < gz.size(); ++j)
          em.quad(P(gx[i], sgn, gz[j]), P(gx[i + 1], sgn, gz[j]), P(gx[i + 1], sgn, gz[j + 1]),
                  P(gx[i], sgn, gz[j + 1]), hint);
    }
    // z end faces: (x, eta)
    for (int sgn : {+1, -1}) {
      em.face = sgn > 0 ? 4 : 5;
      const double z = sgn * hz;
      const Vec3 hint = s.pose.dir_to_world(Vec3(0, 0, double(sgn)));
      for (size_t i = 0; i + 1 < gx.size(); ++i)
        for (int j = 0; j < neta; ++j)
          em.quad(P(gx[i], geta[size_t(j)], z), P(gx[i + 1], geta[size_t(j)], z),
                  P(gx[i + 1], geta[size_t(j) + 1], z), P(gx[i], geta[size_t(j) + 1], z), hint);
    }
  }
};

} // namespace

PanelMesh mesh_scene(const Scene& scene, const MeshOptions& opt) {
  if (opt.base_edge <= 0) throw mesh_error("base_edge must be positive");
  PanelMesh mesh;
  mesh.options = opt;
  ShapeMesher m{&scene, &opt, &mesh.panels};
  for (int b = 0; b < int(scene.solids.size()); ++b) m.mesh_solid(b);
  return mesh;
}

PanelMesh refine_where(const PanelMesh& mesh, const Vec3& center, double radius, double target) {
  PanelMesh out;
  out.options = mesh.options;
  std::vector<Panel> work(mesh.panels.begin(), mesh.panels.end());
  auto touches = [&](const Panel& p) {
    const double r = radius + p.diameter;
    return (p.centroid - center).norm() <= r;
  };
  auto rebuild = [](Panel p, const Vec3& a, const Vec3& b, const Vec3& c) {
    p.v0 = a; p.v1 = b; p.v2 = c;
    const Vec3 n = (b - a).cross(c - a);
    p.area = 0.5 * n.norm();
    p.normal = n.normalized();
    p.centroid = (a + b + c) / 3.0;
    p.diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    return p;
  };
  while (!work.empty()) {
    Panel p = work.back();
    work.pop_back();
    if (p.diameter > target && touches(p)) {
      const Vec3 m01 = 0.5 * (p.v0 + p.v1), m12 = 0.5 * (p.v1 + p.v2), m20 = 0.5 * (p.v2 + p.v0);
      work.push_back(rebuild(p, p.v0, m01, m20));
      work.push_back(rebuild(p, m01, p.v1, m12));
      work.push_back(rebuild(p, m20, m12, p.v2));
      work.push_back(rebuild(p, m01, m12, m20));
    } else {
      out.panels.push_back(p);
    }
  }
  return out;
}

MeshQuality PanelMesh::quality() const {
  MeshQuality q;
  if (panels.empty()) return q;
  q.min_aspect = 1e30; q.min_area = 1e30;
  for (const auto& p : panels) {
    const double shortest = std::min({(p.v1 - p.v0).norm(), (p.v2 - p.v1).norm(), (p.v0 - p.v2).norm()});
    const double aspect = p.diameter / std::max(shortest, 1e-12);
    q.min_aspect = std::min(q.min_aspect, aspect);
    q.max_aspect = std::max(q.max_aspect, aspect);
    q.min_area = std::min(q.min_area, p.area);
    q.max_area = std::max(q.max_area, p.area);
  }
  return q;
}

std::vector<int> PanelMesh::panels_of_body(int body) const {
  std::vector<int> idx;
  for (int i = 0; i < int(panels.size()); ++i)
    if (panels[size_t(i)].body == body) idx.push_back(i);
  return idx;
}

std::vector<int> PanelMesh::panels_of_face(int body, int face) const {
  std::vector<int> idx;
  for (int i = 0; i < int(panels.size()); ++i)
    if (panels[size_t(i)].body == body && panels[size_t(i)].face == face) idx.push_back(i);
  return idx;
}

Vec3 PanelMesh::closure_defect(int body) const {
  Vec3 s = Vec3::Zero();
  for (const auto& p : panels)
    if (p.body == body) s += p.area * p.normal;
  return s;
}

double PanelMesh::body_area(int body) const {
  double a = 0;
  for (const auto& p : panels)
    if (p.body == body) a += p.area;
  return a;
}

double PanelMesh::body_volume(int body) const {
  double v = 0;
  for (const auto& p : panels)
    if (p.body == body) v += p.centroid.dot(p.normal) * p.area / 3.0;
  return v;
}

std::string mesh_to_text(const PanelMesh& mesh) {
  std::ostringstream os;
  char buf[512];
  for (const auto& p : mesh.panels) {
    std::snprintf(buf, sizeof buf,
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %s\n",
                  p.v0.x(), p.v0.y(), p.v0.z(), p.v1.x(), p.v1.y(), p.v1.z(),
                  p.v2.x(), p.v2.y(), p.v2.z(), p.body,
                  p.dielectric ? "dielectric" : "conductor");
    os << buf;
  }
  return os.str();
}

PanelMesh mesh_from_text(const std::string& text, const Scene& scene) {
  PanelMesh mesh;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 a, b, c;
    int body;
    std::string kind;
    ls >> a.x() >> a.y() >> a.z() >> b.x() >> b.y() >> b.z() >> c.x() >> c.y() >> c.z() >> body >> kind;
    if (!ls) throw mesh_error("malformed mesh line: " + line);
    if (body < 0 || body >= int(scene.solids.size())) throw mesh_error("mesh body id out of range");
    Panel p;
    p.v0 = a; p.v1 = b; p.v2 = c;
    const Vec3 n = (b - a).cross(c - a);
    p.area = 0.5 * n.norm();
    p.normal = n.normalized();
    p.centroid = (a + b + c) / 3.0;
    p.diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    p.body = body;
    p.face = -1;
    const auto& solid = scene.solids[size_t(body)];
    p.dielectric = !solid.material.conductor;
    p.eps_in = solid.material.conductor ? 1.0 : solid.material.eps_r;
    mesh.panels.push_back(p);
  }
  return mesh;
}

} // namespace trapkit
