#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "grushinlab/fd_system.hpp"

namespace grushinlab {

struct SolveReport {
  long iterations = 0;
  /// ||rhs - A u|| / ||rhs|| on the full system (absolute when rhs = 0).
  double final_residual = 0.0;
  bool dmp_ok = false;
  bool converged = false;
  std::chrono::duration<double, std::milli> wall_time{0.0};
  /// "trivial", "bicgstab-ilut" or "lu-refinement".
  std::string method;
};

struct SolveResult {
  Eigen::VectorXd u;
  SolveReport report;
};

/// Relative residual of a candidate solution on the full system.
inline double relative_residual(const SparseSystem& sys, const Eigen::VectorXd& u) {
  const double bnorm = sys.rhs.norm();
  const double r = (sys.rhs - sys.matrix * u).norm();
  return bnorm > 0.0 ? r / bnorm : r;
}

/// Solves the assembled system. Dirichlet unknowns are eliminated, the
/// remaining interior block goes to ILUT-preconditioned BiCGSTAB, and an
/// LU-preconditioned refinement loop takes over if BiCGSTAB stalls. Never
/// throws on non-convergence; the best iterate is returned with converged = false.
inline SolveResult solve(const SparseSystem& sys, double tol = 1e-10, long max_iter = 5000) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t N = sys.size();
  SolveResult out;
  out.report.dmp_ok = check_dmp(sys).ok;
  out.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));

  std::vector<Eigen::Index> interior_of(N, -1);
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < N; ++i) {
    if (sys.dirichlet_mask[i]) {
      out.u[static_cast<Eigen::Index>(i)] = sys.rhs[static_cast<Eigen::Index>(i)];
    } else {
      interior_of[i] = static_cast<Eigen::Index>(interior.size());
      interior.push_back(i);
    }
  }

  auto finish = [&](const std::string& method) {
    out.report.method = method;
    out.report.final_residual = relative_residual(sys, out.u);
    out.report.converged = out.report.final_residual <= tol;
    out.report.wall_time = std::chrono::steady_clock::now() - t0;
    return out;
  };
  if (interior.empty()) return finish("trivial");

  // Interior block and the rhs with Dirichlet columns moved across.
  const auto M = static_cast<Eigen::Index>(interior.size());
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b(M);
  for (Eigen::Index r = 0; r < M; ++r) {
    const auto row = static_cast<Eigen::Index>(interior[static_cast<std::size_t>(r)]);
    double br = sys.rhs[row];
    for (SparseRowMatrix::InnerIterator it(sys.matrix, row); it; ++it) {
      const Eigen::Index c = interior_of[static_cast<std::size_t>(it.col())];
      if (c >= 0) {
        trips.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
      } else {
        br -= it.value() * out.u[it.col()];
      }
    }
    b[r] = br;
  }
  if (b.norm() == 0.0) return finish("trivial");

  Eigen::SparseMatrix<double> A(M, M);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  auto scatter = [&](const Eigen::VectorXd& ui) {
    for (Eigen::Index r = 0; r < M; ++r) out.u[static_cast<Eigen::Index>(interior[static_cast<std::size_t>(r)])] = ui[r];
  };

  // The reduced residual equals the full one; rescale tol to the reduced rhs norm.
  const double reduced_tol = std::min(0.5, 0.5 * tol * sys.rhs.norm() / b.norm());
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> bicg;
  bicg.preconditioner().setDroptol(1e-6);
  bicg.preconditioner().setFillfactor(20);
  bicg.setTolerance(reduced_tol);
  bicg.setMaxIterations(max_iter);
  bicg.compute(A);
  Eigen::VectorXd ui = Eigen::VectorXd::Zero(M);
  if (bicg.info() == Eigen::Success) {
    ui = bicg.solve(b);
    out.report.iterations = bicg.iterations();
    scatter(ui);
    if (bicg.info() == Eigen::Success && relative_residual(sys, out.u) <= tol) return finish("bicgstab-ilut");
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) return finish("bicgstab-ilut");
  Eigen::VectorXd best = ui;
  double best_res = (b - A * ui).norm();
  if (!std::isfinite(best_res)) {
    ui.setZero();
    best = ui;
    best_res = b.norm();
  }
  for (long k = 0; k < 10; ++k) {
    ui += lu.solve(b - A * ui);
    ++out.report.iterations;
    const double res = (b - A * ui).norm();
    if (res < best_res) {
      best_res = res;
      best = ui;
    }
    scatter(best);
    if (relative_residual(sys, out.u) <= tol) break;
  }
  scatter(best);
  return finish("lu-refinement");
}

}  // namespace grushinlab
