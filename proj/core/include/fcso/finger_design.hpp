#pragma once

#include "fcso/grasp_sampler.hpp"
#include "fcso/trimesh.hpp"

namespace fcso {

enum class FusionMode { shell, remesh };

struct FingerAssembly {
  TriMesh finger;
  TriMesh pad;
  RigidTransform mount;  // pad frame -> finger frame
  TriMesh fused;
};

/// Mount for a pad in its canonical frame onto the finger's pad face.
/// Convention: the pad face of the flat finger is its +X face; the pad's
/// outer face (w = 0) embeds `embed` mm into it, and the pad footprint is
/// centered on the face.
RigidTransform pad_mount_transform(const TriMesh& finger, const SampleBoxSpec& box,
                                   double embed = 0.2);

/// Fuse the pad onto the flat finger. Shell mode concatenates the two
/// closed shells with the embed overlap, which powder-bed printers accept
/// as one body; remesh mode rebuilds a single watertight surface from the
/// voxel union at resolution `voxel_h`. Throws "floating pad" when the
/// mount leaves a gap, and rejects embeds beyond 0.5 mm.
TriMesh fuse_pad(const TriMesh& finger, const TriMesh& pad, const RigidTransform& mount,
                 FusionMode mode, double voxel_h = 0.25);

FingerAssembly assemble_finger(const TriMesh& finger, const TriMesh& pad,
                               const SampleBoxSpec& box, FusionMode mode, double voxel_h = 0.25,
                               double embed = 0.2);

}  // namespace fcso
