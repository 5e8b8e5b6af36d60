#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "grushinlab/fit.hpp"
#include "grushinlab/grid.hpp"
#include "grushinlab/solver.hpp"

namespace grushinlab {

/// One line per node: "x_1 ... x_n u", 17 significant digits.
inline void write_grid_function(std::ostream& os, const AnisotropicGrid& grid, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != grid.size()) throw std::invalid_argument("write_grid_function: size mismatch");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double c : grid.coords(i)) os << c << ' ';
    os << u[static_cast<Eigen::Index>(i)] << '\n';
  }
}

inline nlohmann::json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"dmp_ok", r.dmp_ok},
          {"wall_time_ms", r.wall_time.count()}};
}

inline nlohmann::json to_json(const FitResult& f) {
  return {{"exponent", f.exponent},
          {"intercept", f.intercept},
          {"residual_norm", f.residual_norm},
          {"sample_count", f.sample_count},
          {"range", {f.range.first, f.range.second}}};
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace grushinlab
