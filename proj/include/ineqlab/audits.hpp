#pragma once

// Trajectory audits: Wasserstein contraction with its entropy-difference
// improvement, entropy smoothing bounds, and the improved convergence rate
// for small initial second moment.

#include "ineqlab/dynamics.hpp"
#include "ineqlab/evaluation.hpp"

namespace ineqlab {

struct ContractionRow {
  double t = 0;
  double w2_squared = 0;
  double classical_rhs = 0;    // e^{-2Rt} W2^2(0)
  double dimensional_rhs = 0;  // classical minus the accumulated entropy-difference integral
  double entropy_gap = 0;      // Ent_dx(v_t) - Ent_dx(u_t)
};

struct ContractionAudit {
  std::vector<ContractionRow> rows;
  double worst_classical = 0;    // min_t (classical_rhs - W2^2)
  double worst_dimensional = 0;  // min_t (dimensional_rhs - W2^2)
  InequalityEvaluation evaluation;
};

// W2^2(u_t, v_t) <= e^{-2Rt} W2^2(u_0, v_0)
//                   - 8n int_0^t e^{-2R(t-s)} sinh^2( (Ent_dx v_s - Ent_dx u_s) / 2n ) ds,
// the time integral evaluated by the trapezoid rule on the trajectory grid.
inline ContractionAudit audit_contraction(const Trajectory& u, const Trajectory& v, double R,
                                          int min_nodes_per_unit = 200,
                                          double tol_override = 1e-6) {
  require(u.times.size() == v.times.size() && u.times.size() >= 2,
          "audit_contraction: trajectories must share a time grid with >= 2 nodes");
  for (std::size_t k = 0; k < u.times.size(); ++k)
    require(u.times[k] == v.times[k], "audit_contraction: trajectories must share a time grid");
  require(R > 0.0, "audit_contraction: need a positive convexity constant");
  const double n = u.states.front().dim();
  require(v.states.front().dim() == n, "audit_contraction: dimension mismatch");
  const double t_span = u.times.back() - u.times.front();
  require((static_cast<double>(u.times.size()) - 1.0) / std::max(t_span, 1e-12) >=
              min_nodes_per_unit,
          "audit_contraction: time grid too coarse for the quadrature budget");

  ContractionAudit out;
  const std::size_t K = u.times.size();
  std::vector<double> phi(K);  // e^{2Rs} * 8n sinh^2(gap/2n)
  std::vector<double> gap(K);
  for (std::size_t k = 0; k < K; ++k) {
    gap[k] = entropy_dx(v.states[k]) - entropy_dx(u.states[k]);
    phi[k] = std::exp(2.0 * R * (u.times[k] - u.times.front())) * 8.0 * n *
             sqr(std::sinh(gap[k] / (2.0 * n)));
  }

  const double w2sq0 = wasserstein2_squared(u.states.front(), v.states.front());
  double cum = 0.0;
  out.worst_classical = std::numeric_limits<double>::infinity();
  out.worst_dimensional = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) cum += 0.5 * (phi[k] + phi[k - 1]) * (u.times[k] - u.times[k - 1]);
    ContractionRow row;
    row.t = u.times[k];
    row.entropy_gap = gap[k];
    row.w2_squared = k == 0 ? w2sq0 : wasserstein2_squared(u.states[k], v.states[k]);
    const double decay = std::exp(-2.0 * R * (u.times[k] - u.times.front()));
    row.classical_rhs = decay * w2sq0;
    row.dimensional_rhs = decay * (w2sq0 - cum);
    out.worst_classical = std::min(out.worst_classical, row.classical_rhs - row.w2_squared);
    out.worst_dimensional = std::min(out.worst_dimensional, row.dimensional_rhs - row.w2_squared);
    out.rows.push_back(row);
  }

  NumericsMeta meta;
  for (const auto& s : u.states) meta.absorb(s);
  for (const auto& s : v.states) meta.absorb(s);
  auto& ev = out.evaluation;
  ev.id = "audit.contraction";
  ev.lhs = 0.0;
  ev.rhs = out.worst_dimensional;
  ev.intermediates["slack_classical"] = out.worst_classical;
  // the improved bound never exceeds the classical one
  double vs_classical = std::numeric_limits<double>::infinity();
  for (const auto& row : out.rows)
    vs_classical = std::min(vs_classical, row.classical_rhs - row.dimensional_rhs);
  ev.intermediates["slack_vs_classical"] = vs_classical;
  ev.intermediates["w2_squared_initial"] = w2sq0;
  ev.finalize(meta, tol_override);
  return out;
}

struct SmoothingRow {
  double t = 0;
  double entropy = 0;         // H(u_t | target)
  double gaussian_bound = 0;  // -(n/2) log(1 - e^{-2t}), when applicable
  double fitted_constant = 0; // t * e^{2 H_t / n}
};

struct SmoothingAudit {
  std::vector<SmoothingRow> rows;
  bool gaussian_bound_applicable = false;  // initial second moment <= n
  double worst_gaussian_slack = 0;         // min_t (bound - H_t)
  double fitted_constant = 0;              // sup over the early window H_t >= 1
  double max_grad_v_energy = 0;            // sup_t int |grad V|^2 du_t
  InequalityEvaluation evaluation;
};

// Entropy smoothing along the flow. Against the standard Gaussian target and
// an initial second moment at most n, H(u_t) <= -(n/2) log(1 - e^{-2t}); the
// short-time constant c with H_t <= c n / (2t) ... is fitted as
// sup { t e^{2 H_t / n} : H_t >= 1 }.
inline SmoothingAudit audit_entropy_smoothing(const Trajectory& traj,
                                              double declared_grad_energy_bound = 0.0,
                                              double tol_override = 1e-6) {
  require(traj.times.size() >= 2, "audit_entropy_smoothing: need at least two states");
  const double n = traj.states.front().dim();
  SmoothingAudit out;
  out.gaussian_bound_applicable = detail::is_standard_gaussian(traj.target) &&
                                  traj.records.front().second_moment <= n + 1e-9;
  out.worst_gaussian_slack = std::numeric_limits<double>::infinity();
  out.fitted_constant = 0.0;
  out.max_grad_v_energy = 0.0;

  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k] - traj.times.front();
    SmoothingRow row;
    row.t = t;
    row.entropy = traj.records[k].entropy;
    if (t > 0.0) {
      row.gaussian_bound = -0.5 * n * std::log1p(-std::exp(-2.0 * t));
      if (out.gaussian_bound_applicable)
        out.worst_gaussian_slack = std::min(out.worst_gaussian_slack, row.gaussian_bound - row.entropy);
      if (row.entropy >= 1.0) {
        row.fitted_constant = t * std::exp(2.0 * row.entropy / n);
        out.fitted_constant = std::max(out.fitted_constant, row.fitted_constant);
      }
    }
    if (traj.potential && !traj.states[k].cloud()) {
      const auto& V = *traj.potential;
      const double e = integrate(
          ScalarField{[&V](const Vec& x) { return V.grad(x).squaredNorm(); }, nullptr},
          traj.states[k]);
      out.max_grad_v_energy = std::max(out.max_grad_v_energy, e);
    }
    out.rows.push_back(row);
  }

  NumericsMeta meta;
  for (const auto& s : traj.states) meta.absorb(s);
  auto& ev = out.evaluation;
  ev.id = "audit.smoothing";
  ev.lhs = 0.0;
  ev.rhs = out.gaussian_bound_applicable ? out.worst_gaussian_slack : 0.0;
  if (!out.gaussian_bound_applicable) ev.flags.push_back("gaussian_bound_not_applicable");
  ev.intermediates["fitted_constant"] = out.fitted_constant;
  ev.intermediates["max_grad_v_energy"] = out.max_grad_v_energy;
  if (declared_grad_energy_bound > 0.0) {
    ev.intermediates["slack_grad_energy"] = declared_grad_energy_bound - out.max_grad_v_energy;
  }
  ev.finalize(meta, tol_override);
  return out;
}

struct ImprovedRateRow {
  double t = 0;
  double x = 0;              // W2^2(u_t, gamma) / (2n)
  double improved_bound = 0; // 1 - sqrt(1 - (2 x0 - x0^2) e^{-2t})
  double classical_bound = 0;// x0 e^{-2t}
};

struct ImprovedRateAudit {
  std::vector<ImprovedRateRow> rows;
  double worst_improved = 0;      // min_t (improved_bound - x)
  double worst_vs_classical = 0;  // min_t (classical_bound - improved_bound)
  InequalityEvaluation evaluation;
};

// Improved Wasserstein convergence rate toward the standard Gaussian when the
// initial second moment is at most n:
//   x(t) <= 1 - sqrt(1 - (2 x0 - x0^2) e^{-2t}),  x(t) = W2^2(u_t, gamma)/(2n).
inline ImprovedRateAudit audit_improved_rate(const Trajectory& traj, double tol_override = 1e-9) {
  require(traj.times.size() >= 2, "audit_improved_rate: need at least two states");
  require(detail::is_standard_gaussian(traj.target),
          "audit_improved_rate: target must be the standard Gaussian");
  const double n = traj.states.front().dim();
  require(traj.records.front().second_moment <= n + 1e-9,
          "audit_improved_rate: initial second moment must be at most n");

  ImprovedRateAudit out;
  const double x0 = sqr(traj.records.front().w2) / (2.0 * n);
  require(x0 < 1.0, "audit_improved_rate: initial normalized distance must be below 1");
  out.worst_improved = std::numeric_limits<double>::infinity();
  out.worst_vs_classical = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    ImprovedRateRow row;
    row.t = traj.times[k] - traj.times.front();
    row.x = sqr(traj.records[k].w2) / (2.0 * n);
    const double decayed = (2.0 * x0 - x0 * x0) * std::exp(-2.0 * row.t);
    row.improved_bound = 1.0 - std::sqrt(std::max(0.0, 1.0 - decayed));
    row.classical_bound = x0 * std::exp(-2.0 * row.t);
    out.worst_improved = std::min(out.worst_improved, row.improved_bound - row.x);
    out.worst_vs_classical = std::min(out.worst_vs_classical, row.classical_bound - row.improved_bound);
    out.rows.push_back(row);
  }

  NumericsMeta meta;
  for (const auto& s : traj.states) meta.absorb(s);
  auto& ev = out.evaluation;
  ev.id = "audit.improved_rate";
  ev.lhs = 0.0;
  ev.rhs = out.worst_improved;
  ev.intermediates["x0"] = x0;
  ev.intermediates["slack_vs_classical"] = out.worst_vs_classical;
  ev.finalize(meta, tol_override);
  return out;
}

}  // namespace ineqlab
