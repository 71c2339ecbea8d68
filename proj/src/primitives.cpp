// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/map/primitives.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdfloc/errors.hpp"

namespace sdfloc {
namespace {

double sphere_sdf(const Sphere& s, const Eigen::Vector3d& p) {
  return (p - s.center).norm() - s.radius;
}

double box_sdf(const Box& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d q = (p - b.center).cwiseAbs() - 0.5 * b.size;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double plane_sdf(const Plane& pl, const Eigen::Vector3d& p) {
  return pl.normal.dot(p) - pl.offset;
}

std::optional<double> sphere_ray(const Sphere& s, const Eigen::Vector3d& o,
                                 const Eigen::Vector3d& d) {
  const Eigen::Vector3d oc = o - s.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double sq = std::sqrt(disc);
  const double t0 = -b - sq;
  if (t0 >= 0.0) {
    return t0;
  }
  const double t1 = -b + sq;
  if (t1 >= 0.0) {
    return t1;  // origin inside the sphere
  }
  return std::nullopt;
}

std::optional<double> box_ray(const Box& b, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
  // Slab method.
  const Eigen::Vector3d lo = b.center - 0.5 * b.size;
  const Eigen::Vector3d hi = b.center + 0.5 * b.size;
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(d[axis]) < 1e-15) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) {
        return std::nullopt;
      }
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) {
      return std::nullopt;
    }
  }
  if (t_far < 0.0) {
    return std::nullopt;
  }
  return t_near >= 0.0 ? t_near : t_far;
}

std::optional<double> plane_ray(const Plane& pl, const Eigen::Vector3d& o,
                                const Eigen::Vector3d& d) {
  const double denom = pl.normal.dot(d);
  if (std::abs(denom) < 1e-15) {
    return std::nullopt;
  }
  const double t = (pl.offset - pl.normal.dot(o)) / denom;
  if (t < 0.0) {
    return std::nullopt;
  }
  return t;
}

}  // namespace

double signed_distance(const Primitive& primitive, const Eigen::Vector3d& p) {
  return std::visit(
      [&p](const auto& prim) -> double {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return sphere_sdf(prim, p);
        } else if constexpr (std::is_same_v<T, Box>) {
          return box_sdf(prim, p);
        } else {
          return plane_sdf(prim, p);
        }
      },
      primitive);
}

Eigen::Vector3d signed_distance_gradient(const Primitive& primitive, const Eigen::Vector3d& p) {
  // Central differences on the exact SDF; step small enough for 1e-9
  // accuracy, large enough to stay well clear of cancellation.
  constexpr double h = 1e-6;
  Eigen::Vector3d g;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d dp = Eigen::Vector3d::Zero();
    dp[axis] = h;
    g[axis] = (signed_distance(primitive, p + dp) - signed_distance(primitive, p - dp)) / (2 * h);
  }
  return g;
}

double scene_signed_distance(const std::vector<Primitive>& primitives, const Eigen::Vector3d& p) {
  double d = std::numeric_limits<double>::infinity();
  for (const Primitive& prim : primitives) {
    d = std::min(d, signed_distance(prim, p));
  }
  return d;
}

Eigen::Vector3d scene_signed_distance_gradient(const std::vector<Primitive>& primitives,
                                               const Eigen::Vector3d& p) {
  double best = std::numeric_limits<double>::infinity();
  const Primitive* nearest = nullptr;
  for (const Primitive& prim : primitives) {
    const double d = signed_distance(prim, p);
    if (d < best) {
      best = d;
      nearest = &prim;
    }
  }
  return nearest != nullptr ? signed_distance_gradient(*nearest, p) : Eigen::Vector3d::Zero();
}

std::optional<double> ray_intersect(const Primitive& primitive, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction) {
  return std::visit(
      [&](const auto& prim) -> std::optional<double> {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return sphere_ray(prim, origin, direction);
        } else if constexpr (std::is_same_v<T, Box>) {
          return box_ray(prim, origin, direction);
        } else {
          return plane_ray(prim, origin, direction);
        }
      },
      primitive);
}

std::optional<double> scene_ray_intersect(const std::vector<Primitive>& primitives,
                                          const Eigen::Vector3d& origin,
                                          const Eigen::Vector3d& direction) {
  std::optional<double> best;
  for (const Primitive& prim : primitives) {
    const std::optional<double> t = ray_intersect(prim, origin, direction);
    if (t && (!best || *t < *best)) {
      best = t;
    }
  }
  return best;
}

std::vector<Primitive> parse_scene_text(const std::string& text) {
  std::vector<Primitive> primitives;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) {
      continue;  // blank or comment-only line
    }
    const auto fail = [&](const char* what) -> void {
      throw IoError("scene line " + std::to_string(line_no) + ": " + what);
    };
    if (kind == "sphere") {
      Sphere s;
      if (!(ls >> s.center.x() >> s.center.y() >> s.center.z() >> s.radius)) {
        fail("expected 'sphere cx cy cz r'");
      }
      if (s.radius <= 0.0) {
        fail("sphere radius must be positive");
      }
      primitives.emplace_back(s);
    } else if (kind == "box") {
      Box b;
      if (!(ls >> b.center.x() >> b.center.y() >> b.center.z() >> b.size.x() >> b.size.y() >>
            b.size.z())) {
        fail("expected 'box cx cy cz sx sy sz'");
      }
      if ((b.size.array() <= 0.0).any()) {
        fail("box sizes must be positive");
      }
      primitives.emplace_back(b);
    } else if (kind == "plane") {
      Plane pl;
      if (!(ls >> pl.normal.x() >> pl.normal.y() >> pl.normal.z() >> pl.offset)) {
        fail("expected 'plane nx ny nz d'");
      }
      const double n = pl.normal.norm();
      if (n < 1e-12) {
        fail("plane normal must be nonzero");
      }
      pl.normal /= n;
      pl.offset /= n;
      primitives.emplace_back(pl);
    } else {
      fail("unknown primitive kind");
    }
  }
  return primitives;
}

std::vector<Primitive> load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open scene file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene_text(buf.str());
}

void save_scene_file(const std::string& path, const std::vector<Primitive>& primitives) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write scene file: " + path);
  }
  out.precision(17);
  for (const Primitive& prim : primitives) {
    std::visit(
        [&out](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            out << "sphere " << p.center.x() << ' ' << p.center.y() << ' ' << p.center.z() << ' '
                << p.radius << '\n';
          } else if constexpr (std::is_same_v<T, Box>) {
            out << "box " << p.center.x() << ' ' << p.center.y() << ' ' << p.center.z() << ' '
                << p.size.x() << ' ' << p.size.y() << ' ' << p.size.z() << '\n';
          } else {
            out << "plane " << p.normal.x() << ' ' << p.normal.y() << ' ' << p.normal.z() << ' '
                << p.offset << '\n';
          }
        },
        prim);
  }
}

}  // namespace sdfloc
