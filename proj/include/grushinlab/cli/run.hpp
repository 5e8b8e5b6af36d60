#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "grushinlab/cli/config.hpp"
#include "grushinlab/closed_forms.hpp"
#include "grushinlab/coefficients.hpp"
#include "grushinlab/experiments/boundary.hpp"
#include "grushinlab/experiments/decay.hpp"
#include "grushinlab/experiments/oscillation.hpp"
#include "grushinlab/experiments/supersolution.hpp"
#include "grushinlab/identities.hpp"
#include "grushinlab/io.hpp"

namespace grushinlab::cli {

enum ExitCode : int { kPass = 0, kExperimentFailed = 1, kError = 2 };

/// Hex SHA-1 of "blob <size>\0<content>", the object id git would assign.
inline std::string git_blob_sha1(const std::string& content) {
  const std::string framed = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(framed.data(), framed.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

/// Hash of everything that determines the numbers: the effective config minus the output location.
inline std::string input_hash(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("output_dir");
  return git_blob_sha1(j.dump());
}

/// What a command hands back to the driver.
struct Outcome {
  bool pass = false;
  std::string summary;
  nlohmann::json result;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
};

namespace detail {

inline CoefficientField make_field(const RunConfig& c, const GrushinParams& p) {
  if (c.field.family == "decaying-perturbation") {
    return make_decaying_perturbation(p, c.field.s, c.field.amplitude, c.field.seed);
  }
  return make_identity_field(p);
}

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

/// JSON has no infinity; non-finite values become null.
inline nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline std::vector<std::string> coord_names(int n) {
  std::vector<std::string> out;
  for (int k = 1; k <= n; ++k) out.push_back("x_" + std::to_string(k));
  return out;
}

inline experiments::BoxProblem default_box(const RunConfig& c, double tangential_lo, double tangential_hi,
                                           double height, std::size_t count2d, std::size_t count_nd) {
  experiments::BoxProblem prob;
  const auto m = static_cast<std::size_t>(c.n - 1);
  if (!c.grid.counts.empty()) {
    prob.box_lo = c.grid.box_lo;
    prob.box_hi = c.grid.box_hi;
    prob.counts = c.grid.counts;
  } else {
    prob.box_lo.assign(m, tangential_lo);
    prob.box_lo.push_back(0.0);
    prob.box_hi.assign(m, tangential_hi);
    prob.box_hi.push_back(height);
    prob.counts.assign(m + 1, c.n == 2 ? count2d : count_nd);
  }
  prob.grading = c.grid.grading;
  prob.tol = c.tolerances.solver;
  prob.max_iter = c.tolerances.max_iter;
  return prob;
}

inline BoundaryFn make_bc(const std::string& kind, double constant, const GrushinParams& p) {
  if (kind == "w-trace") {
    return [p](const HalfSpacePoint& x) { return x.normal() == 0.0 ? 0.0 : eval_w(x, p).value(); };
  }
  if (kind == "normal-coordinate") return [](const HalfSpacePoint& x) { return x.normal(); };
  if (kind == "zero") return [](const HalfSpacePoint&) { return 0.0; };
  return [constant](const HalfSpacePoint& x) { return x.normal() == 0.0 ? 0.0 : constant; };
}

inline Outcome verify_closed_forms(const RunConfig& c, const GrushinParams& p) {
  const auto& e = c.experiment;
  const auto pts = sample_gauge_shell(p, e.points, e.gauge_min, e.gauge_max, c.seed);
  Outcome o;
  o.csv_header = {"gauge", "x_n", "residual_w", "residual_gauge_Q", "residual_gauge_2mQ"};
  IdentityResiduals worst;
  for (const auto& x : pts) {
    const IdentityResiduals r = identity_residuals(x, p);
    worst.w = std::max(worst.w, r.w);
    worst.gauge_Q = std::max(worst.gauge_Q, r.gauge_Q);
    worst.gauge_2mQ = std::max(worst.gauge_2mQ, r.gauge_2mQ);
    o.csv_rows.push_back({gauge(x, p), x.normal(), r.w, r.gauge_Q, r.gauge_2mQ});
  }
  const double tol = c.tolerances.identity;
  o.pass = worst.w <= tol && worst.gauge_2mQ <= tol;
  o.result = {{"points", pts.size()},
              {"tolerance", tol},
              {"max_residual_w", worst.w},
              {"max_residual_gauge_power_2_minus_Q", worst.gauge_2mQ},
              {"max_residual_gauge_power_Q", worst.gauge_Q},
              {"gauge_power_Q_gated", false},
              {"note", "residuals are |model operator| / sum of absolute terms; d^Q is reported, d^{2-Q} is the gated harmonic power"}};
  o.summary = "max residual w " + fmt(worst.w) + ", d^(2-Q) " + fmt(worst.gauge_2mQ) + ", d^Q " + fmt(worst.gauge_Q);
  return o;
}

inline Outcome audit(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  const auto pts = sample_unit_half_box(p, c.experiment.points, c.seed);
  const EllipticityReport r = audit_ellipticity(field, p, c.experiment.epsilon0, pts);
  Outcome o;
  o.pass = r.passed();
  auto violation_json = [](const std::vector<AuditViolation>& vs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : vs) {
      std::vector<double> pt = v.point.tangential();
      pt.push_back(v.point.normal());
      arr.push_back({{"point", pt}, {"what", v.what}, {"measured", v.measured}, {"bound", v.bound}});
    }
    return arr;
  };
  o.result = {{"family", field.family()},
              {"lower_bound_formula", r.lower_bound_formula},
              {"lower_bound_numeric", num(r.lower_bound_numeric)},
              {"upper_bound_numeric", r.upper_bound_numeric},
              {"min_eigenvalue_below_strip", num(r.min_eigenvalue_below_strip)},
              {"epsilon0", r.epsilon0},
              {"tau", r.tau},
              {"strip_points", r.strip_points},
              {"boundary_points", r.boundary_points},
              {"mixed_condition", r.mixed_condition},
              {"violations", violation_json(r.violations)},
              {"invariant_failures", violation_json(r.invariant_failures)}};
  o.csv_header = coord_names(p.n());
  o.csv_header.push_back("min_eigenvalue");
  for (const auto& x : pts) {
    const Eigen::MatrixXd A = degenerate_matrix(field, x, p);
    std::vector<double> row = x.tangential();
    row.push_back(x.normal());
    row.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()(0));
    o.csv_rows.push_back(std::move(row));
  }
  o.summary = "numeric lower bound " + fmt(r.lower_bound_numeric) + " vs formula " + fmt(r.lower_bound_formula) + ", " +
              std::to_string(r.violations.size() + r.invariant_failures.size()) + " violations";
  return o;
}

inline Outcome solve_cmd(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  experiments::BoxProblem prob = default_box(c, 1.0, 3.0, 2.0, 65, 17);
  prob.bc = make_bc(c.experiment.bc, c.experiment.bc_constant, p);
  const experiments::BoxSolution sol = experiments::solve_box(field, p, prob);
  const bool manufactured = c.experiment.bc == "w-trace" || c.experiment.bc == "normal-coordinate";
  Outcome o;
  o.csv_header = coord_names(p.n());
  o.csv_header.push_back("u");
  if (manufactured) o.csv_header.push_back("exact");
  double err = 0.0;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    std::vector<double> row = sol.grid.coords(i);
    const double u = sol.u[static_cast<Eigen::Index>(i)];
    row.push_back(u);
    if (manufactured) {
      const double exact = prob.bc(sol.grid.point(i));
      err = std::max(err, std::abs(u - exact));
      row.push_back(exact);
    }
    o.csv_rows.push_back(std::move(row));
  }
  o.pass = sol.report.converged;
  o.result = {{"solve", to_json(sol.report)},
              {"converged", sol.report.converged},
              {"method", sol.report.method},
              {"nodes", sol.grid.size()},
              {"bc", c.experiment.bc}};
  if (manufactured && c.field.family == "identity") o.result["max_error"] = err;
  o.summary = "residual " + fmt(sol.report.final_residual) + ", dmp_ok " + (sol.report.dmp_ok ? "true" : "false") +
              (manufactured && c.field.family == "identity" ? ", max error " + fmt(err) : "");
  return o;
}

inline Outcome boundary_growth(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  experiments::BoxProblem prob = default_box(c, 1.0, 3.0, 2.0, 65, 17);
  prob.bc = make_bc(c.experiment.bc, c.experiment.bc_constant, p);
  std::vector<double> anchor;
  for (int k = 0; k < p.n() - 1; ++k) {
    anchor.push_back(0.5 * (prob.box_lo[static_cast<std::size_t>(k)] + prob.box_hi[static_cast<std::size_t>(k)]));
  }
  const auto coarse = experiments::run_boundary_growth(field, p, prob, anchor);
  const auto fine = experiments::run_boundary_growth(field, p, experiments::refined(prob), anchor);
  const double change = fine.bound_constant > 0.0 ? std::abs(fine.bound_constant - coarse.bound_constant) / fine.bound_constant : 0.0;
  Outcome o;
  const double band = c.tolerances.exponent_band;
  const bool exponent_ok = fine.fit && std::abs(fine.fit->exponent - 1.0) <= band;
  o.pass = exponent_ok && change <= 0.1 && std::isfinite(fine.bound_constant);
  auto level = [](const experiments::BoundaryGrowthResult& r) {
    nlohmann::json j = {{"bound_constant", r.bound_constant}, {"solve", to_json(r.solve)}};
    if (r.fit) {
      j["fit"] = to_json(*r.fit);
    } else {
      j["fit"] = nullptr;
      j["fit_refused"] = r.fit_refused;
    }
    return j;
  };
  o.result = {{"levels", {level(coarse), level(fine)}},
              {"bound_constant_relative_change", change},
              {"expected_exponent", 1.0},
              {"exponent_band", band},
              {"anchor_tangential", anchor}};
  o.csv_header = {"x_n", "abs_u"};
  for (const auto& [t, u] : fine.ray) o.csv_rows.push_back({t, u});
  o.summary = "C " + fmt(coarse.bound_constant) + " -> " + fmt(fine.bound_constant) + ", exponent " +
              (fine.fit ? fmt(fine.fit->exponent) : std::string("refused (") + fine.fit_refused + ")");
  return o;
}

inline Outcome holder(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  const double exponent = c.experiment.exponent > 0.0 ? c.experiment.exponent : 1.0 / (1.0 + p.alpha());
  const auto m = static_cast<std::size_t>(p.n() - 1);
  experiments::HolderConfig hc;
  hc.problem = default_box(c, -1.0, 1.0, 1.0, 33, 17);
  hc.problem.bc = [](const HalfSpacePoint& x) { return x.normal() == 0.0 ? 0.0 : 1.0; };
  hc.levels = c.experiment.levels;
  hc.pairs = c.experiment.pairs;
  hc.seed = c.seed;
  for (std::size_t k = 0; k <= m; ++k) {
    const double lo = hc.problem.box_lo[k], hi = hc.problem.box_hi[k];
    hc.inner_lo.push_back(k == m ? 0.0 : 0.75 * lo + 0.25 * hi);
    hc.inner_hi.push_back(k == m ? 0.5 * hi : 0.25 * lo + 0.75 * hi);
  }
  const auto res = experiments::run_holder_modulus(field, p, hc, exponent);

  // Sharpness probe: a larger exponent near the corner of the w-trace box; reported only.
  experiments::HolderConfig probe;
  RunConfig probe_cfg = c;
  probe_cfg.grid = GridConfig{};
  probe_cfg.grid.grading = c.grid.grading;
  probe.problem = default_box(probe_cfg, 1.0, 3.0, 2.0, 33, 9);
  probe.problem.bc = make_bc("w-trace", 0.0, p);
  probe.levels = c.experiment.levels;
  probe.pairs = std::min<std::size_t>(c.experiment.pairs, 20000);
  probe.seed = c.seed;
  for (std::size_t k = 0; k <= m; ++k) {
    probe.inner_lo.push_back(k == m ? 0.0 : 1.0);
    probe.inner_hi.push_back(k == m ? 1.0 : 2.0);
  }
  const auto sharp = experiments::run_holder_modulus(field, p, probe, exponent + 0.2);

  Outcome o;
  const auto& L = res.levels;
  const double last = L.back().max_quotient;
  const double prev = L[L.size() - 2].max_quotient;
  const double change = last > 0.0 ? std::abs(last - prev) / last : 0.0;
  o.pass = change < c.tolerances.holder_stability;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : L) {
    levels.push_back({{"counts", lv.counts},
                      {"max_quotient", lv.max_quotient},
                      {"pairs", lv.pairs},
                      {"argmax_y", lv.argmax_y},
                      {"argmax_z", lv.argmax_z},
                      {"solve", to_json(lv.solve)}});
  }
  nlohmann::json probe_levels = nlohmann::json::array();
  for (const auto& lv : sharp.levels) probe_levels.push_back({{"counts", lv.counts}, {"max_quotient", lv.max_quotient}});
  o.result = {{"exponent", exponent},
              {"levels", levels},
              {"finest_relative_change", change},
              {"stability_tolerance", c.tolerances.holder_stability},
              {"sharpness_probe", {{"exponent", exponent + 0.2}, {"levels", probe_levels}, {"asserted", false}}}};
  o.csv_header = {"level", "cells_axis0", "max_quotient", "pairs", "probe_max_quotient"};
  for (std::size_t k = 0; k < L.size(); ++k) {
    o.csv_rows.push_back({static_cast<double>(k), static_cast<double>(L[k].counts[0] - 1), L[k].max_quotient,
                          static_cast<double>(L[k].pairs), sharp.levels[k].max_quotient});
  }
  o.summary = "max quotient " + fmt(prev) + " -> " + fmt(last) + " (change " + fmt(100.0 * change, 3) + "%)";
  return o;
}

inline Outcome oscillation(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  experiments::OscillationConfig oc;
  if (!c.grid.counts.empty()) {
    oc.tangential_count = c.grid.counts.front();
    oc.normal_count = c.grid.counts.back();
  } else if (p.n() > 2) {
    oc.tangential_count = 33;
    oc.normal_count = 33;
  }
  oc.grading = c.grid.grading;
  oc.tol = c.tolerances.solver;
  oc.max_iter = c.tolerances.max_iter;
  Outcome o;
  o.csv_header = {"R", "sup_inner", "c0_empirical", "shell_nodes"};
  nlohmann::json runs = nlohmann::json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool positive = true;
  for (double R : c.experiment.radii) {
    const auto r = experiments::run_oscillation_decay(field, p, R, oc);
    positive = positive && r.c0_empirical > 0.0;
    lo = std::min(lo, r.c0_empirical);
    hi = std::max(hi, r.c0_empirical);
    runs.push_back({{"R", R},
                    {"shells", r.shells},
                    {"sup_inner", r.sup_inner},
                    {"c0_empirical", r.c0_empirical},
                    {"shell_nodes", r.shell_nodes},
                    {"solve", to_json(r.solve)}});
    o.csv_rows.push_back({R, r.sup_inner, r.c0_empirical, static_cast<double>(r.shell_nodes)});
  }
  const double variation = hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
  const bool identity = field.family() == "identity";
  o.pass = positive && (!identity || variation <= 0.2);
  o.result = {{"runs", runs}, {"cross_scale_variation", num(variation)}, {"variation_gated", identity}};
  o.summary = "c0 in [" + fmt(lo) + ", " + fmt(hi) + "], variation " + fmt(100.0 * variation, 3) + "%";
  return o;
}

inline Outcome supersolution(const RunConfig& c, const GrushinParams& p) {
  const auto& e = c.experiment;
  const auto shells = experiments::doubling_shells(e.first_shell, e.shell_count);
  const auto scan = experiments::run_supersolution_scan(p, e.rho, e.s, e.amplitude, shells, e.samples_per_shell, c.seed);
  Outcome o;
  o.pass = scan.finite_R0();
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& v : scan.violations) viol.push_back({{"point", v.point}, {"value", v.value}, {"shell", v.shell}});
  o.result = {{"rho", scan.rho},
              {"s", scan.s},
              {"amplitude", scan.amplitude},
              {"R0_empirical", num(scan.R0_empirical)},
              {"shells_tested", scan.shells_tested},
              {"samples_per_shell", scan.samples_per_shell},
              {"worst_per_shell", scan.worst_per_shell},
              {"violation_count", scan.violations.size()},
              {"violations", viol}};
  o.csv_header = {"shell", "samples", "worst_value", "violations"};
  for (std::size_t k = 0; k < shells.size(); ++k) {
    const auto count = std::count_if(scan.violations.begin(), scan.violations.end(),
                                     [&](const auto& v) { return v.shell == shells[k]; });
    o.csv_rows.push_back({shells[k], static_cast<double>(scan.samples_per_shell[k]), scan.worst_per_shell[k],
                          static_cast<double>(count)});
  }
  o.summary = "R0 " + (scan.finite_R0() ? fmt(scan.R0_empirical) : std::string("not reached")) + ", " +
              std::to_string(scan.violations.size()) + " violations";
  return o;
}

inline experiments::ExteriorDomainConfig exterior(const RunConfig& c) {
  const auto& e = c.experiment;
  const auto [inner, outer] = exterior_radii(c);
  return {inner, outer, e.tangential_count, e.normal_count, e.core_factor, c.grid.grading};
}

inline Outcome decay(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  experiments::DecayFitConfig dc;
  dc.domain = exterior(c);
  dc.tol = c.tolerances.solver;
  dc.max_iter = c.tolerances.max_iter;
  const auto oracle = experiments::decay_fit_oracle(p, dc);
  const auto r = experiments::run_decay_fit(field, p, dc);
  Outcome o;
  const double rel = std::abs(r.fit.exponent - r.expected_slope) / std::abs(r.expected_slope);
  o.pass = rel <= c.tolerances.slope_band;
  o.result = {{"fit", to_json(r.fit)},
              {"expected_slope", r.expected_slope},
              {"relative_deviation", rel},
              {"slope_band", c.tolerances.slope_band},
              {"oracle_fit", to_json(oracle.fit)},
              {"solve", to_json(r.solve)}};
  o.csv_header = {"gauge", "x_n", "u", "w"};
  for (const auto& s : r.samples) o.csv_rows.push_back({s.gauge, s.normal, s.u, s.w});
  o.summary = "slope " + fmt(r.fit.exponent) + " vs " + fmt(r.expected_slope) + " (" + fmt(100.0 * rel, 3) + "% off)";
  return o;
}

inline Outcome global_bound(const RunConfig& c, const GrushinParams& p) {
  const CoefficientField field = make_field(c, p);
  experiments::GlobalBoundConfig gc;
  gc.domain = exterior(c);
  gc.R0 = c.experiment.R0;
  gc.C_scale = c.experiment.C_scale;
  gc.oracle_C0 = c.experiment.oracle_C0;
  gc.tol = c.tolerances.solver;
  gc.max_iter = c.tolerances.max_iter;
  const auto r = experiments::run_global_bound_check(field, p, c.experiment.rho, gc);
  Outcome o;
  o.pass = r.pass;
  o.result = {{"pass", r.pass},
              {"margin", num(r.margin)},
              {"C", r.C},
              {"epsilon", r.epsilon},
              {"worst_node", r.worst_node},
              {"checked_nodes", r.checked_nodes},
              {"max_w", r.max_w},
              {"diagnostics", r.diagnostics},
              {"solve", to_json(r.solve)}};
  o.csv_header = {"C", "epsilon", "margin", "max_w", "checked_nodes"};
  o.csv_rows.push_back({r.C, r.epsilon, r.margin, r.max_w, static_cast<double>(r.checked_nodes)});
  o.summary = r.diagnostics.empty() ? "margin " + fmt(r.margin) + ", C " + fmt(r.C) + ", epsilon " + fmt(r.epsilon)
                                    : r.diagnostics;
  return o;
}

inline std::string render_csv(const Outcome& o) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < o.csv_header.size(); ++k) os << (k ? "," : "") << o.csv_header[k];
  os << '\n';
  for (const auto& row : o.csv_rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace detail

inline Outcome execute(const RunConfig& c) {
  const GrushinParams p(c.n, c.alpha);
  const std::string& cmd = c.command;
  if (cmd == "verify-closed-forms") return detail::verify_closed_forms(c, p);
  if (cmd == "audit-ellipticity") return detail::audit(c, p);
  if (cmd == "solve") return detail::solve_cmd(c, p);
  if (cmd == "boundary-growth") return detail::boundary_growth(c, p);
  if (cmd == "holder-modulus") return detail::holder(c, p);
  if (cmd == "oscillation-decay") return detail::oscillation(c, p);
  if (cmd == "supersolution-scan") return detail::supersolution(c, p);
  if (cmd == "decay-fit") return detail::decay(c, p);
  if (cmd == "global-bound") return detail::global_bound(c, p);
  throw ConfigError("command: unknown command '" + cmd + "'");
}

/// Runs a validated config, writes <output_dir>/<command>.json and .csv, and
/// returns the exit code. Nothing is written when the run errors out.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    o = execute(c);
  } catch (const std::exception& e) {
    err << "grushinlab: " << c.command << ": " << e.what() << '\n';
    return kError;
  }
  const int code = o.pass ? kPass : kExperimentFailed;
  nlohmann::json report = {{"command", c.command},
                           {"status", o.pass ? "pass" : "fail"},
                           {"exit_code", code},
                           {"summary", o.summary},
                           {"config", to_json(c)},
                           {"input_hash", input_hash(c)},
                           {"result", o.result},
                           {"csv", c.command + ".csv"}};
  try {
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    write_file_atomically(dir / (c.command + ".csv"), detail::render_csv(o));
    write_file_atomically(dir / (c.command + ".json"), report.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "grushinlab: cannot write report: " << e.what() << '\n';
    return kError;
  }
  out << c.command << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.summary << '\n';
  return code;
}

}  // namespace grushinlab::cli
