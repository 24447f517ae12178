#pragma once

#include <vector>

#include "cutplate/geometry.hpp"
#include "cutplate/mesh.hpp"

namespace cutplate {

/// One cubic segment per cut cell, chained into a closed counterclockwise loop.
DiscreteBoundary build_discrete_boundary(const Domain& domain, const ActiveMesh& mesh,
                                         BoundaryMode mode);

/// Everything the forms need to integrate over the discrete domain.
struct CutGeometry {
  DiscreteBoundary boundary;
  /// Per active cell: index into boundary.segments, or -1 for uncut cells.
  std::vector<int> segment_of_cell;
  /// Parallel to boundary.segments: decompositions with the curved boundary
  /// (used by the method) and with the straight chord (used for error norms).
  std::vector<CutCellDecomposition> curved;
  std::vector<CutCellDecomposition> straight;
};

CutGeometry build_cut_geometry(const Domain& domain, const ActiveMesh& mesh, BoundaryMode mode);

/// Area quadrature over the part of an active cell inside the discrete domain.
AreaQuadrature active_cell_quadrature(const ActiveMesh& mesh, const CutGeometry& geometry, int cell,
                                      int degree, bool straight = false);

}  // namespace cutplate
