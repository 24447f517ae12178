#include "cutplate/plate_forms.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cutplate/errors.hpp"
#include "cutplate/quadrature.hpp"

namespace cutplate {

void Material::validate() const {
  if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(t > 0.0)) throw ConfigError("thickness must be positive");
  if (!(nu >= 0.0 && nu <= 0.5)) throw ConfigError("Poisson ratio must lie in [0, 0.5]");
}

NitscheParams NitscheParams::standard(const Material& mat, double beta, double gamma_scale) {
  const double k = mat.kappa();
  return {beta, gamma_scale * (2.0 * k + 2.0 * k * mat.nu_factor()), true};
}

PointState PointState::from_basis(const BasisEval& basis, int k) {
  PointState s;
  s.value = basis(0, 0)[k];
  s.grad = {basis(1, 0)[k], basis(0, 1)[k]};
  s.xx = basis(2, 0)[k];
  s.xy = basis(1, 1)[k];
  s.yy = basis(0, 2)[k];
  s.xxx = basis(3, 0)[k];
  s.xxy = basis(2, 1)[k];
  s.xyy = basis(1, 2)[k];
  s.yyy = basis(0, 3)[k];
  return s;
}

Eigen::Matrix2d stress(const PointState& s, const Material& mat) {
  const double k = mat.kappa();
  const double trace = s.xx + s.yy;
  Eigen::Matrix2d m;
  m << s.xx, s.xy, s.xy, s.yy;
  m.diagonal().array() += mat.nu_factor() * trace;
  return k * m;
}

double traction(const PointState& s, const Vec2& n, const Vec2& t, double curvature,
                const Material& mat) {
  const double k = mat.kappa();
  const std::array<double, 4> third{s.xxx, s.xxy, s.xyy, s.yyy};  // indexed by number of y's

  // (M . grad)_n = kappa (1 + nu/(1-nu)) d_n (Laplacian v)
  const Vec2 grad_lap(s.xxx + s.xyy, s.xxy + s.yyy);
  const double div_m_n = k * (1.0 + mat.nu_factor()) * n.dot(grad_lap);

  // d/ds (n . M . t) with the frame frozen: kappa D^3 v [n, t, t] (the trace part drops since n.t = 0).
  double d3 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int l = 0; l < 2; ++l) d3 += n[i] * t[j] * t[l] * third[i + j + l];
    }
  }
  // Moving frame: dn/ds = curvature t, dt/ds = -curvature n.
  const Eigen::Matrix2d m = stress(s, mat);
  const double m_nn = n.dot(m * n);
  const double m_tt = t.dot(m * t);
  return div_m_n + k * d3 + curvature * (m_tt - m_nn);
}

unsigned worker_count() {
  if (const char* env = std::getenv("CUTPLATE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ChunkOutput {
  Triplets interior, nitsche, penalty, stabilization;
  std::vector<std::pair<int, double>> load;
};

// Runs fn(chunk_index) for every chunk; chunk results are merged in index order
// by the caller, so the outcome does not depend on the thread count.
template <class Fn>
void for_each_chunk(std::size_t n_chunks, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n_chunks, 1));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < n_chunks; c += workers) fn(c);
    });
  }
  for (auto& th : pool) th.join();
}

void add_block(Triplets& out, const std::array<int, 16>& idx, const Eigen::Matrix<double, 16, 16>& k) {
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      if (k(i, j) != 0.0) out.emplace_back(idx[i], idx[j], k(i, j));
    }
  }
}

constexpr std::size_t kChunk = 64;

}  // namespace

AssembledSystem assemble(const ActiveMesh& mesh, const DofMap& dofs, const CutGeometry& geometry,
                         const Material& mat, const NitscheParams& params, const ScalarField& load,
                         int quad_degree, AssemblyTerms terms) {
  const double k = mat.kappa();
  const double nf = mat.nu_factor();
  const double h = mesh.h;
  const double penalty = params.gamma / (h * h * h);
  const double stab = params.stabilization_weight(mat);

  const std::size_t n_cells = mesh.cells.size();
  const std::size_t n_faces = mesh.stab_faces.size();
  const std::size_t cell_chunks = (n_cells + kChunk - 1) / kChunk;
  const std::size_t face_chunks = (n_faces + kChunk - 1) / kChunk;
  std::vector<ChunkOutput> out(cell_chunks + face_chunks);

  using Mat16 = Eigen::Matrix<double, 16, 16>;
  using Vec16 = Eigen::Matrix<double, 16, 1>;

  auto cell_work = [&](std::size_t chunk) {
    ChunkOutput& o = out[chunk];
    const std::size_t end = std::min(n_cells, (chunk + 1) * kChunk);
    for (std::size_t c = chunk * kChunk; c < end; ++c) {
      const int cell = static_cast<int>(c);
      const CellBox& box = mesh.cells[c].box;
      const auto& idx = dofs.cell_dofs[c];
      Mat16 ke = Mat16::Zero();
      Vec16 fe = Vec16::Zero();
      for (const auto& qp : active_cell_quadrature(mesh, geometry, cell, quad_degree)) {
        const BasisEval basis(box, qp.x);
        const auto& phi = basis(0, 0);
        const auto& pxx = basis(2, 0);
        const auto& pxy = basis(1, 1);
        const auto& pyy = basis(0, 2);
        if (terms.interior) {
          for (int i = 0; i < 16; ++i) {
            const double tri = pxx[i] + pyy[i];
            for (int j = 0; j < 16; ++j) {
              const double hh = pxx[i] * pxx[j] + 2.0 * pxy[i] * pxy[j] + pyy[i] * pyy[j];
              ke(i, j) += qp.weight * k * (hh + nf * tri * (pxx[j] + pyy[j]));
            }
          }
        }
        const double f = load ? load(qp.x) : 0.0;
        if (f != 0.0) {
          for (int i = 0; i < 16; ++i) fe[i] += qp.weight * f * phi[i];
        }
      }
      add_block(o.interior, idx, ke);
      for (int i = 0; i < 16; ++i) {
        if (fe[i] != 0.0) o.load.emplace_back(idx[i], fe[i]);
      }

      const int s = geometry.segment_of_cell[c];
      if (s < 0 || !(terms.nitsche || terms.penalty)) continue;
      Mat16 kn = Mat16::Zero();
      Mat16 kp = Mat16::Zero();
      for (const auto& bp : boundary_quadrature(geometry.boundary.segments[s], quad_degree)) {
        const BasisEval basis(box, bp.x);
        const auto& phi = basis(0, 0);
        Vec16 tv;
        for (int i = 0; i < 16; ++i) {
          tv[i] = traction(PointState::from_basis(basis, i), bp.normal, bp.tangent, bp.curvature, mat);
        }
        const Eigen::Map<const Vec16> pv(phi.data());
        if (terms.nitsche) kn += bp.weight * (tv * pv.transpose() + pv * tv.transpose());
        if (terms.penalty) kp += bp.weight * penalty * (pv * pv.transpose());
      }
      add_block(o.nitsche, idx, kn);
      add_block(o.penalty, idx, kp);
    }
  };

  const auto& gauss = quadrature::gauss_legendre(kFaceQuadraturePoints);
  auto face_work = [&](std::size_t chunk) {
    ChunkOutput& o = out[cell_chunks + chunk];
    const std::size_t end = std::min(n_faces, (chunk + 1) * kChunk);
    for (std::size_t fi = chunk * kChunk; fi < end; ++fi) {
      const Face& face = mesh.faces[mesh.stab_faces[fi]];
      const bool xn = face.normal == FaceNormal::x;
      const double length = (face.p1 - face.p0).norm();
      Eigen::Matrix<double, 32, 32> ks = Eigen::Matrix<double, 32, 32>::Zero();
      std::array<int, 32> idx;
      for (int i = 0; i < 16; ++i) {
        idx[i] = dofs.cell_dofs[face.first][i];
        idx[16 + i] = dofs.cell_dofs[face.second][i];
      }
      for (std::size_t q = 0; q < gauss.points.size(); ++q) {
        const Vec2 x = face.p0 + gauss.points[q] * (face.p1 - face.p0);
        const double w = gauss.weights[q] * length;
        const BasisEval b1(mesh.cells[face.first].box, x);
        const BasisEval b2(mesh.cells[face.second].box, x);
        Eigen::Matrix<double, 32, 1> j2, j3;
        const auto& d2a = xn ? b1(2, 0) : b1(0, 2);
        const auto& d2b = xn ? b2(2, 0) : b2(0, 2);
        const auto& d3a = xn ? b1(3, 0) : b1(0, 3);
        const auto& d3b = xn ? b2(3, 0) : b2(0, 3);
        for (int i = 0; i < 16; ++i) {
          j2[i] = d2a[i];
          j2[16 + i] = -d2b[i];
          j3[i] = d3a[i];
          j3[16 + i] = -d3b[i];
        }
        ks += w * stab * (h * (j2 * j2.transpose()) + h * h * h * (j3 * j3.transpose()));
      }
      for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
          if (ks(i, j) != 0.0) o.stabilization.emplace_back(idx[i], idx[j], ks(i, j));
        }
      }
    }
  };

  for_each_chunk(cell_chunks + (terms.stabilization ? face_chunks : 0), [&](std::size_t c) {
    if (c < cell_chunks) {
      cell_work(c);
    } else {
      face_work(c - cell_chunks);
    }
  });

  const int n = dofs.n_dofs;
  AssembledSystem sys;
  sys.b = Eigen::VectorXd::Zero(n);
  Triplets ti, tn, tp, ts;
  for (const auto& o : out) {
    ti.insert(ti.end(), o.interior.begin(), o.interior.end());
    tn.insert(tn.end(), o.nitsche.begin(), o.nitsche.end());
    tp.insert(tp.end(), o.penalty.begin(), o.penalty.end());
    ts.insert(ts.end(), o.stabilization.begin(), o.stabilization.end());
    for (const auto& [i, v] : o.load) sys.b[i] += v;
  }
  auto build = [n](const Triplets& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  sys.interior = build(ti);
  sys.nitsche = build(tn);
  sys.penalty = build(tp);
  sys.stabilization = build(ts);
  Triplets all;
  all.reserve(ti.size() + tn.size() + tp.size() + ts.size());
  for (const Triplets* t : {&ti, &tn, &tp, &ts}) all.insert(all.end(), t->begin(), t->end());
  sys.A = build(all);
  return sys;
}

QuadraticForm apply_operator(const AssembledSystem& system, const Eigen::VectorXd& v) {
  QuadraticForm q;
  q.Av = system.A * v;
  q.total = v.dot(q.Av);
  q.interior = v.dot(system.interior * v);
  q.nitsche = v.dot(system.nitsche * v);
  q.penalty = v.dot(system.penalty * v);
  q.stabilization = v.dot(system.stabilization * v);
  return q;
}

}  // namespace cutplate
