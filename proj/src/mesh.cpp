#include "cutplate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "cutplate/errors.hpp"

namespace cutplate {

int ActiveMesh::cell_at(int i, int j) const {
  if (i < i_begin || i >= i_end || j < j_begin || j >= j_end) return -1;
  return cell_lookup_[static_cast<std::size_t>(j - j_begin) * (i_end - i_begin) + (i - i_begin)];
}

int ActiveMesh::node_at(int i, int j) const {
  if (i < i_begin || i > i_end || j < j_begin || j > j_end) return -1;
  return node_lookup_[static_cast<std::size_t>(j - j_begin) * (i_end - i_begin + 1) +
                      (i - i_begin)];
}

std::array<int, 4> ActiveMesh::cell_nodes(int cell) const {
  const auto& c = cells[cell];
  return {node_at(c.i, c.j), node_at(c.i + 1, c.j), node_at(c.i, c.j + 1),
          node_at(c.i + 1, c.j + 1)};
}

Vec2 ActiveMesh::node_position(int node) const {
  return origin + Vec2(nodes[node][0] * h, nodes[node][1] * h);
}

CellBox ActiveMesh::grid_cell(int i, int j) const {
  return {origin + Vec2(i * h, j * h), origin + Vec2((i + 1) * h, (j + 1) * h)};
}

std::size_t ActiveMesh::count(CellKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [&](const ActiveCell& c) { return c.kind == kind; }));
}

std::size_t ActiveMesh::interior_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const ActiveCell& c) { return c.interior; }));
}

bool ActiveMesh::stabilization_reaches_cut_cells() const {
  std::vector<std::vector<int>> adjacency(cells.size());
  for (int f : stab_faces) {
    adjacency[faces[f].first].push_back(faces[f].second);
    adjacency[faces[f].second].push_back(faces[f].first);
  }
  std::vector<bool> seen(cells.size(), false);
  std::queue<int> frontier;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].interior) {
      seen[c] = true;
      frontier.push(static_cast<int>(c));
    }
  }
  while (!frontier.empty()) {
    const int c = frontier.front();
    frontier.pop();
    for (int n : adjacency[c]) {
      if (!seen[n]) {
        seen[n] = true;
        frontier.push(n);
      }
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].kind == CellKind::cut && !seen[c]) return false;
  }
  return true;
}

ActiveMesh build_active_mesh(const Domain& domain, double h, const Box& bbox) {
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!bbox.contains(domain.bounding_box(), 1e-12 * h)) {
    throw ConfigError("bounding box does not contain the domain");
  }

  ActiveMesh mesh;
  mesh.h = h;
  mesh.i_begin = static_cast<int>(std::floor(bbox.lo.x() / h + 1e-9));
  mesh.j_begin = static_cast<int>(std::floor(bbox.lo.y() / h + 1e-9));
  mesh.i_end = static_cast<int>(std::ceil(bbox.hi.x() / h - 1e-9));
  mesh.j_end = static_cast<int>(std::ceil(bbox.hi.y() / h - 1e-9));
  const int nx = mesh.i_end - mesh.i_begin;
  const int ny = mesh.j_end - mesh.j_begin;
  mesh.cell_lookup_.assign(static_cast<std::size_t>(nx) * ny, -1);
  mesh.node_lookup_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);

  // Cells in lexicographic (i, j) order.
  for (int i = mesh.i_begin; i < mesh.i_end; ++i) {
    for (int j = mesh.j_begin; j < mesh.j_end; ++j) {
      const CellBox box = mesh.grid_cell(i, j);
      CellAnalysis analysis = analyze_cell(domain, box);
      if (analysis.kind == CellKind::outside) continue;
      mesh.cell_lookup_[static_cast<std::size_t>(j - mesh.j_begin) * nx + (i - mesh.i_begin)] =
          static_cast<int>(mesh.cells.size());
      mesh.cells.push_back(
          {i, j, analysis.kind, analysis.strictly_inside, box, std::move(analysis.intersection)});
    }
  }

  for (const auto& c : mesh.cells) {
    for (int di = 0; di <= 1; ++di) {
      for (int dj = 0; dj <= 1; ++dj) {
        mesh.node_lookup_[static_cast<std::size_t>(c.j + dj - mesh.j_begin) * (nx + 1) +
                          (c.i + di - mesh.i_begin)] = 0;
      }
    }
  }
  for (int i = mesh.i_begin; i <= mesh.i_end; ++i) {
    for (int j = mesh.j_begin; j <= mesh.j_end; ++j) {
      auto& slot =
          mesh.node_lookup_[static_cast<std::size_t>(j - mesh.j_begin) * (nx + 1) + (i - mesh.i_begin)];
      if (slot == 0) {
        slot = static_cast<int>(mesh.nodes.size()) + 1;
        mesh.nodes.push_back({i, j});
      }
    }
  }
  for (auto& slot : mesh.node_lookup_) slot -= 1;  // -1 for inactive nodes

  // Interior faces: right and top neighbour of every active cell.
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    const int right = mesh.cell_at(cell.i + 1, cell.j);
    const int top = mesh.cell_at(cell.i, cell.j + 1);
    const int self = static_cast<int>(c);
    if (right >= 0) {
      mesh.faces.push_back({std::min(self, right), std::max(self, right), FaceNormal::x,
                            cell.box.corner(1), cell.box.corner(2), false});
    }
    if (top >= 0) {
      mesh.faces.push_back({std::min(self, top), std::max(self, top), FaceNormal::y,
                            cell.box.corner(3), cell.box.corner(2), false});
    }
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    auto& face = mesh.faces[f];
    face.stabilized = !(mesh.cells[face.first].interior && mesh.cells[face.second].interior);
    if (face.stabilized) mesh.stab_faces.push_back(static_cast<int>(f));
  }
  return mesh;
}

DofMap build_dof_map(const ActiveMesh& mesh) {
  DofMap map;
  map.node_dofs.resize(mesh.nodes.size());
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    for (int k = 0; k < 4; ++k) map.node_dofs[n][k] = static_cast<int>(4 * n + k);
  }
  map.n_dofs = static_cast<int>(4 * mesh.nodes.size());
  map.cell_dofs.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto corners = mesh.cell_nodes(static_cast<int>(c));
    for (int k = 0; k < 4; ++k) {
      if (corners[k] < 0) throw std::logic_error("active cell with inactive corner node");
      for (int d = 0; d < 4; ++d) map.cell_dofs[c][4 * k + d] = map.node_dofs[corners[k]][d];
    }
  }
  return map;
}

}  // namespace cutplate
