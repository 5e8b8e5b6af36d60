#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "grushinlab/field.hpp"
#include "grushinlab/geometry.hpp"
#include "grushinlab/grid.hpp"
#include "grushinlab/parallel.hpp"
#include "grushinlab/params.hpp"

namespace grushinlab {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using BoundaryFn = std::function<double(const HalfSpacePoint&)>;
/// Marks nodes that belong to an excluded region and carry Dirichlet data.
using RegionFn = std::function<bool(const HalfSpacePoint&)>;

/// Discretized -L with Dirichlet rows.
struct SparseSystem {
  SparseRowMatrix matrix;
  Eigen::VectorXd rhs;
  /// true = identity row, rhs holds the boundary value.
  std::vector<bool> dirichlet_mask;
  /// Interior rows where the cross-difference stencil produced a positive off-diagonal entry.
  std::vector<std::size_t> mesh_ratio_failures;

  std::size_t size() const noexcept { return dirichlet_mask.size(); }
};

namespace detail {

struct RowBuilder {
  std::vector<std::pair<std::size_t, double>> entries;
  void add(std::size_t col, double v) { entries.emplace_back(col, v); }
  void merge() {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& e : entries) {
      if (!out.empty() && out.back().first == e.first) {
        out.back().second += e.second;
      } else {
        out.push_back(e);
      }
    }
    entries = std::move(out);
  }
};

}  // namespace detail

/// Assembles -L on the grid. Pure second derivatives use the non-uniform
/// three-point formula; each cross derivative uses the quadrant pair matching
/// the sign of its coefficient ((+,+)/(-,-) for positive, (+,-)/(-,+) for
/// negative) so the diagonal neighbours carry nonpositive entries.
///
/// Box faces, the flat face {x_n = 0} and nodes in the optional excluded
/// region are Dirichlet rows with rhs = bc(x).
inline SparseSystem assemble(const CoefficientField& field, const AnisotropicGrid& grid, const GrushinParams& p,
                             const BoundaryFn& bc, const RegionFn& excluded = {}) {
  const int n = grid.dim();
  if (n != p.n() || field.n() != p.n()) throw std::invalid_argument("assemble: dimension mismatch");
  const int m = n - 1;
  const std::size_t N = grid.size();

  std::vector<detail::RowBuilder> rows(N);
  std::vector<char> dirichlet(N, 0);
  std::vector<char> ratio_fail(N, 0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));

  parallel_for(N, [&](std::size_t idx) {
    const std::vector<double> c = grid.coords(idx);
    const HalfSpacePoint x = HalfSpacePoint::from_coords(c);
    const bool is_bc = grid.on_box_boundary(idx) || (excluded && excluded(x));
    auto& row = rows[idx];
    if (is_bc) {
      dirichlet[idx] = 1;
      row.add(idx, 1.0);
      rhs[static_cast<Eigen::Index>(idx)] = bc(x);
      return;
    }
    const std::vector<std::size_t> mi = grid.multi_index(idx);
    const Eigen::MatrixXd a = field.a_tangential(x);
    const Eigen::VectorXd b = field.a_mixed(x);
    const double xa = std::pow(x.normal(), p.alpha());

    // Second-order coefficient matrix of L at this node.
    Eigen::MatrixXd A(n, n);
    A.topLeftCorner(m, m) = a * (xa * xa);
    A.topRightCorner(m, 1) = b * xa;
    A.bottomLeftCorner(1, m) = (b * xa).transpose();
    A(m, m) = 1.0;

    auto hplus = [&](int k) {
      const auto& ax = grid.axis(k);
      const auto i = mi[static_cast<std::size_t>(k)];
      return ax[i + 1] - ax[i];
    };
    auto hminus = [&](int k) {
      const auto& ax = grid.axis(k);
      const auto i = mi[static_cast<std::size_t>(k)];
      return ax[i] - ax[i - 1];
    };
    auto shifted = [&](int k1, int s1, int k2, int s2) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx);
      j += s1 * static_cast<std::ptrdiff_t>(grid.stride(k1));
      if (k2 >= 0) j += s2 * static_cast<std::ptrdiff_t>(grid.stride(k2));
      return static_cast<std::size_t>(j);
    };

    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      const double hp = hplus(k);
      const double hm = hminus(k);
      const double ckk = A(k, k);
      const double wp = 2.0 * ckk / (hp * (hp + hm));
      const double wm = 2.0 * ckk / (hm * (hp + hm));
      row.add(shifted(k, +1, -1, 0), -wp);
      row.add(shifted(k, -1, -1, 0), -wm);
      diag += wp + wm;
    }
    for (int k1 = 0; k1 < n; ++k1) {
      for (int k2 = k1 + 1; k2 < n; ++k2) {
        const double coef = 2.0 * A(k1, k2);  // L carries both (k1,k2) and (k2,k1)
        if (coef == 0.0) continue;
        // Quadrant (s1, s2): u_{k1 k2} ~ s1 s2 (u_{s1 s2} - u_{s1 0} - u_{0 s2} + u_0) / (h1 h2)
        auto quadrant = [&](int s1, int s2) {
          const double h1 = s1 > 0 ? hplus(k1) : hminus(k1);
          const double h2 = s2 > 0 ? hplus(k2) : hminus(k2);
          const double w = std::abs(coef) / (2.0 * h1 * h2);
          row.add(shifted(k1, s1, k2, s2), -w);
          row.add(shifted(k1, s1, -1, 0), w);
          row.add(shifted(k2, s2, -1, 0), w);
          diag -= w;
        };
        if (coef > 0.0) {
          quadrant(+1, +1);
          quadrant(-1, -1);
        } else {
          quadrant(+1, -1);
          quadrant(-1, +1);
        }
      }
    }
    row.add(idx, diag);
    row.merge();
    for (const auto& [col, v] : row.entries) {
      if (col != idx && v > 0.0) {
        ratio_fail[idx] = 1;
        break;
      }
    }
  });

  SparseSystem sys;
  sys.rhs = std::move(rhs);
  sys.dirichlet_mask.resize(N);
  std::vector<Eigen::Triplet<double>> trips;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.entries.size();
  trips.reserve(nnz);
  for (std::size_t i = 0; i < N; ++i) {
    sys.dirichlet_mask[i] = dirichlet[i] != 0;
    if (ratio_fail[i]) sys.mesh_ratio_failures.push_back(i);
    for (const auto& [col, v] : rows[i].entries) {
      trips.emplace_back(static_cast<int>(i), static_cast<int>(col), v);
    }
  }
  sys.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.matrix.makeCompressed();
  return sys;
}

struct DmpDiagnostics {
  bool ok = true;
  std::vector<std::size_t> nonpositive_diagonal;
  std::vector<std::size_t> positive_off_diagonal;
  std::vector<std::size_t> negative_row_sum;

  std::size_t offender_count() const noexcept {
    return nonpositive_diagonal.size() + positive_off_diagonal.size() + negative_row_sum.size();
  }
};

/// Structural M-matrix test on interior rows: positive diagonal, nonpositive
/// off-diagonals, nonnegative row sums.
inline DmpDiagnostics check_dmp(const SparseSystem& sys) {
  DmpDiagnostics diag;
  const SparseRowMatrix& A = sys.matrix;
  for (Eigen::Index i = 0; i < A.outerSize(); ++i) {
    if (sys.dirichlet_mask[static_cast<std::size_t>(i)]) continue;
    double d = 0.0;
    double sum = 0.0;
    double scale = 0.0;
    bool positive_off = false;
    for (SparseRowMatrix::InnerIterator it(A, i); it; ++it) {
      sum += it.value();
      scale = std::max(scale, std::abs(it.value()));
      if (it.col() == i) {
        d = it.value();
      } else if (it.value() > 0.0) {
        positive_off = true;
      }
    }
    const auto row = static_cast<std::size_t>(i);
    if (!(d > 0.0)) diag.nonpositive_diagonal.push_back(row);
    if (positive_off) diag.positive_off_diagonal.push_back(row);
    if (sum < -1e-10 * std::max(1.0, scale)) diag.negative_row_sum.push_back(row);
  }
  diag.ok = diag.offender_count() == 0;
  return diag;
}

}  // namespace grushinlab
