#pragma once

#include <array>
#include <vector>

#include "cutplate/core.hpp"
#include "cutplate/geometry.hpp"

namespace cutplate {

struct ActiveCell {
  int i = 0;  // grid indices; the cell covers origin + [i, i+1] x [j, j+1] * h
  int j = 0;
  CellKind kind = CellKind::inside;
  bool interior = false;  // T subset of the exact domain
  CellBox box;
  std::optional<CellIntersection> intersection;  // cut cells only
};

enum class FaceNormal { x, y };

/// Face shared by two active cells. `first` has the smaller active-cell index;
/// jumps are taken as (value from first) - (value from second).
struct Face {
  int first = -1;
  int second = -1;
  FaceNormal normal = FaceNormal::x;
  Vec2 p0;
  Vec2 p1;
  bool stabilized = false;
};

/// Active part of a structured square grid: cells meeting the domain, their
/// nodes, the interior faces, and the ghost-penalty face set.
class ActiveMesh {
 public:
  double h = 0.0;
  Vec2 origin{0.0, 0.0};
  int i_begin = 0, i_end = 0;  // cell index range [begin, end)
  int j_begin = 0, j_end = 0;

  std::vector<ActiveCell> cells;
  std::vector<std::array<int, 2>> nodes;  // grid node indices, lexicographic in (i, j)
  std::vector<Face> faces;
  std::vector<int> stab_faces;  // indices into faces

  /// Active-cell index of grid cell (i, j), or -1.
  int cell_at(int i, int j) const;
  /// Active-node index of grid node (i, j), or -1.
  int node_at(int i, int j) const;
  /// Node indices in local corner order SW, SE, NW, NE.
  std::array<int, 4> cell_nodes(int cell) const;
  Vec2 node_position(int node) const;

  std::size_t count(CellKind kind) const;
  std::size_t interior_count() const;

  /// True if every cut cell is linked to an interior cell by a chain of
  /// stabilized faces.
  bool stabilization_reaches_cut_cells() const;

  CellBox grid_cell(int i, int j) const;

 private:
  friend ActiveMesh build_active_mesh(const Domain&, double, const Box&);
  std::vector<int> cell_lookup_;  // dense over the grid range
  std::vector<int> node_lookup_;
};

/// Builds the active mesh on the grid {origin + h Z^2} restricted to cells
/// overlapping `bbox`. The grid origin is (0, 0).
ActiveMesh build_active_mesh(const Domain& domain, double h, const Box& bbox);

/// Global Hermite numbering: four DOFs (v, v_x, v_y, v_xy) per active node.
struct DofMap {
  int n_dofs = 0;
  std::vector<std::array<int, 4>> node_dofs;
  /// Per cell, 16 global indices in local order (SW, SE, NW, NE) x (v, v_x, v_y, v_xy).
  std::vector<std::array<int, 16>> cell_dofs;
};

DofMap build_dof_map(const ActiveMesh& mesh);

}  // namespace cutplate
