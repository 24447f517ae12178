#include "cutplate/cut_geometry.hpp"

#include "cutplate/errors.hpp"

namespace cutplate {

DiscreteBoundary build_discrete_boundary(const Domain& domain, const ActiveMesh& mesh,
                                         BoundaryMode mode) {
  std::vector<BoundarySegment> segments;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    if (cell.kind != CellKind::cut) continue;
    if (!cell.intersection) {
      throw GeometryError(ErrorCode::AmbiguousCut,
                          "cut cell without a two-point boundary intersection; refine h");
    }
    segments.push_back(make_segment(domain, cell.box, *cell.intersection, mode, static_cast<int>(c)));
  }
  return assemble_boundary(std::move(segments), mode, mesh.h);
}

CutGeometry build_cut_geometry(const Domain& domain, const ActiveMesh& mesh, BoundaryMode mode) {
  CutGeometry geo;
  geo.boundary = build_discrete_boundary(domain, mesh, mode);
  geo.segment_of_cell.assign(mesh.cells.size(), -1);
  for (std::size_t s = 0; s < geo.boundary.segments.size(); ++s) {
    const auto& seg = geo.boundary.segments[s];
    const auto& cut = *mesh.cells[seg.cell].intersection;
    geo.segment_of_cell[seg.cell] = static_cast<int>(s);
    geo.curved.push_back(decompose_cut_cell(cut, seg, mesh.h, true));
    geo.straight.push_back(decompose_cut_cell(cut, seg, mesh.h, false));
  }
  return geo;
}

AreaQuadrature active_cell_quadrature(const ActiveMesh& mesh, const CutGeometry& geometry, int cell,
                                      int degree, bool straight) {
  const int s = geometry.segment_of_cell[cell];
  if (s < 0) return cell_quadrature(mesh.cells[cell].box, degree);
  return area_quadrature(straight ? geometry.straight[s] : geometry.curved[s], degree);
}

}  // namespace cutplate
