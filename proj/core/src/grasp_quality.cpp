#include "fcso/grasp_quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <set>

#include "fcso/convex_hull.hpp"

namespace fcso {

ContactPatch extract_contact(const TriMesh& pad_mesh, const RigidTransform& placement,
                             const TriangleBvh& object_surface, double epsilon) {
  ContactPatch patch;
  for (std::size_t f = 0; f < pad_mesh.faces.size(); ++f) {
    const double area = pad_mesh.face_area(f);
    if (area <= 0.0) continue;
    const Vec3 centroid = placement.apply(pad_mesh.face_centroid(f));
    if (object_surface.distance(centroid) > epsilon) continue;
    patch.faces.push_back(static_cast<int>(f));
    patch.normals.push_back(placement.apply_vector(pad_mesh.face_normal(f)));
    patch.areas.push_back(area);
    patch.area += area;
  }
  return patch;
}

std::array<ContactPatch, 2> extract_contact_pair(const TriMesh& pad_mesh,
                                                 const std::array<GridSpec, 2>& side_frames,
                                                 const TriangleBvh& object_surface,
                                                 double epsilon) {
  return {extract_contact(pad_mesh, side_frames[0].frame, object_surface, epsilon),
          extract_contact(pad_mesh, side_frames[1].frame, object_surface, epsilon)};
}

namespace {

double min_chord_to(const std::vector<Vec3>& points, const Vec3& center) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::min(best, (p - center).squaredNorm());
  return std::sqrt(best);
}

double grid_search_rles(const std::vector<Vec3>& points, double step_deg) {
  double best = 0.0;
  const double step = step_deg * M_PI / 180.0;
  const int n_theta = static_cast<int>(std::round(M_PI / step));
  for (int it = 0; it <= n_theta; ++it) {
    const double theta = it * step;
    const double st = std::sin(theta), ct = std::cos(theta);
    const int n_phi = std::max(1, static_cast<int>(std::round(2.0 * M_PI * std::max(st, 1e-9) / step)));
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = ip * (2.0 * M_PI / n_phi);
      const Vec3 dir(st * std::cos(phi), st * std::sin(phi), ct);
      best = std::max(best, min_chord_to(points, dir));
    }
  }
  return best;
}

}  // namespace

double rles(const std::vector<Vec3>& normals) {
  if (normals.empty()) throw std::invalid_argument("rles: no normals");

  // dedup within a 1e-3 chord via spatial bins; contact sets can be large
  struct BinKey {
    int x, y, z;
    bool operator==(const BinKey&) const = default;
  };
  struct BinHash {
    std::size_t operator()(const BinKey& k) const {
      return static_cast<std::size_t>(k.x) * 73856093u ^ static_cast<std::size_t>(k.y) * 19349663u ^
             static_cast<std::size_t>(k.z) * 83492791u;
    }
  };
  std::unordered_map<BinKey, std::vector<int>, BinHash> bins;
  std::vector<Vec3> points;
  points.reserve(256);
  for (const auto& n : normals) {
    const double len = n.norm();
    if (std::abs(len - 1.0) > 1e-6)
      throw std::invalid_argument("rles: normals must be unit length");
    const Vec3 p = n / len;
    const BinKey base{static_cast<int>(std::floor(p.x() * 1e3)),
                      static_cast<int>(std::floor(p.y() * 1e3)),
                      static_cast<int>(std::floor(p.z() * 1e3))};
    bool duplicate = false;
    for (int dx = -1; dx <= 1 && !duplicate; ++dx)
      for (int dy = -1; dy <= 1 && !duplicate; ++dy)
        for (int dz = -1; dz <= 1 && !duplicate; ++dz) {
          auto it = bins.find({base.x + dx, base.y + dy, base.z + dz});
          if (it == bins.end()) continue;
          for (int idx : it->second) {
            if ((points[idx] - p).squaredNorm() <= 1e-6) {
              duplicate = true;
              break;
            }
          }
        }
    if (!duplicate) {
      bins[base].push_back(static_cast<int>(points.size()));
      points.push_back(p);
    }
  }

  if (points.size() == 1) return 2.0;  // empty cap at the antipode

  // degeneracy probes: single direction or a great circle within one degree
  const double one_deg = std::sin(M_PI / 180.0);
  bool single_direction = true;
  for (const auto& p : points) {
    if ((p - points.front()).norm() > 2.0 * one_deg) {
      single_direction = false;
      break;
    }
  }
  bool coplanar = false;
  if (points.size() >= 3) {
    Mat3 cov = Mat3::Zero();
    for (const auto& p : points) cov += p * p.transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 axis = eig.eigenvectors().col(0);
    coplanar = true;
    for (const auto& p : points) {
      if (std::abs(p.dot(axis)) > one_deg) {
        coplanar = false;
        break;
      }
    }
  }

  if (points.size() < 4 || single_direction || coplanar)
    return grid_search_rles(points, 2.0);

  TriMesh hull;
  try {
    hull = convex_hull(points);
  } catch (const std::exception&) {
    return grid_search_rles(points, 2.0);
  }

  // candidate centers: spherical Voronoi vertices (normalized circumcenters
  // of the Delaunay/hull triangles), their antipodes, and the antipodes of
  // the inputs for open-hemisphere configurations
  double best = 0.0;
  for (std::size_t f = 0; f < hull.faces.size(); ++f) {
    const Vec3& a = hull.v(static_cast<int>(f), 0);
    const Vec3& b = hull.v(static_cast<int>(f), 1);
    const Vec3& c = hull.v(static_cast<int>(f), 2);
    const Vec3 ab = b - a, ac = c - a;
    const Vec3 n = ab.cross(ac);
    const double n2 = n.squaredNorm();
    if (n2 <= 1e-20) continue;
    // planar circumcenter of the Delaunay triangle
    const Vec3 center =
        a + (ab.squaredNorm() * ac - ac.squaredNorm() * ab).cross(n) / (2.0 * n2);
    if (center.squaredNorm() <= 1e-20) continue;
    const Vec3 v = center.normalized();
    best = std::max(best, min_chord_to(points, v));
    best = std::max(best, min_chord_to(points, Vec3(-v)));
  }
  for (const auto& p : points) best = std::max(best, min_chord_to(points, Vec3(-p)));
  return best;
}

double effective_area(double rles_value, double contact_area) {
  if (!(rles_value > 0.0))
    throw std::invalid_argument("effective_area: RLES must be positive");
  return contact_area / rles_value;
}

SelectionResult select_best(const std::vector<QualityRecord>& records) {
  if (records.empty()) throw std::invalid_argument("select_best: no records");

  std::set<int> pose_universe;
  for (const auto& r : records) pose_universe.insert(r.pose);

  std::map<int, std::map<int, double>> per_combination;  // i -> pose -> E
  for (const auto& r : records) {
    auto [it, inserted] = per_combination[r.combination].emplace(r.pose, r.effective);
    if (!inserted)
      throw std::invalid_argument("select_best: duplicate record for combination " +
                                  std::to_string(r.combination) + ", pose " +
                                  std::to_string(r.pose));
  }

  SelectionResult out;
  out.best_quality = -std::numeric_limits<double>::infinity();
  for (const auto& [i, poses] : per_combination) {
    for (int m : pose_universe) {
      if (!poses.count(m))
        throw std::invalid_argument("select_best: combination " + std::to_string(i) +
                                    " missing pose " + std::to_string(m));
    }
    double q = std::numeric_limits<double>::infinity();
    for (const auto& [m, e] : poses) q = std::min(q, e);
    out.combination_ids.push_back(i);
    out.quality.push_back(q);
    if (q > out.best_quality) {  // strict: ties keep the lowest id
      out.best_quality = q;
      out.best_combination = i;
    }
  }
  return out;
}

}  // namespace fcso
