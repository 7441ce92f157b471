#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace fcso {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid motion: p -> rotation * p + translation. Units are millimeters.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  /// Rotation about a unit axis by angle (radians).
  static RigidTransform about_axis(const Vec3& axis, double angle,
                                   const Vec3& translation = Vec3::Zero()) {
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    t.translation = translation;
    return t;
  }

  static RigidTransform translate(const Vec3& offset) {
    RigidTransform t;
    t.translation = offset;
    return t;
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

  RigidTransform then(const RigidTransform& outer) const {
    RigidTransform t;
    t.rotation = outer.rotation * rotation;
    t.translation = outer.rotation * translation + outer.translation;
    return t;
  }

  RigidTransform inverse() const {
    RigidTransform t;
    t.rotation = rotation.transpose();
    t.translation = -(rotation.transpose() * translation);
    return t;
  }

  /// True when the rotation block is orthonormal with determinant +1
  /// within `tol`.
  bool is_valid(double tol = 1e-9) const {
    const Mat3 should_be_id = rotation.transpose() * rotation;
    if ((should_be_id - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return b.then(a);
}

/// Axis-aligned box, min <= max componentwise.
struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }

  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }

  void expand(const Aabb& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }

  Vec3 extents() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }

  double volume() const {
    if (empty()) return 0.0;
    const Vec3 e = extents();
    return e.x() * e.y() * e.z();
  }

  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= min.array() - tol).all() &&
           (p.array() <= max.array() + tol).all();
  }

  bool intersects(const Aabb& other) const {
    return (min.array() <= other.max.array()).all() &&
           (max.array() >= other.min.array()).all();
  }
};

}  // namespace fcso
