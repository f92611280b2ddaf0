#pragma once

// JSON scenario and sweep engine: builds potentials, measures and fields from
// declarative descriptions, dispatches every item to its evaluator, and
// collects report rows.

#include <atomic>
#include <chrono>
#include <thread>

#include <json.hpp>

#include "ineqlab/audits.hpp"
#include "ineqlab/brascamp_lieb.hpp"
#include "ineqlab/concentration.hpp"
#include "ineqlab/convexity.hpp"
#include "ineqlab/dynamics.hpp"
#include "ineqlab/lsi.hpp"
#include "ineqlab/report.hpp"
#include "ineqlab/talagrand.hpp"

namespace ineqlab {

using json = nlohmann::json;

struct RunOptions {
  std::string out_dir = ".";
  double tol_scale = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
};

namespace detail {

inline Vec vec_from_json(const json& j) {
  require(j.is_array(), "expected a number array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

inline Mat mat_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "expected an array of rows");
  Mat m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_array() && j[i].size() == j[0].size(), "expected a rectangular matrix");
    for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

inline std::vector<double> list_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& e : j) out.push_back(e.get<double>());
    return out;
  }
  require(j.is_object(), "expected an array or a range object");
  const double start = j.at("start").get<double>();
  const double stop = j.at("stop").get<double>();
  const int count = j.at("count").get<int>();
  require(count >= 0, "range count must be nonnegative");
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  return out;
}

}  // namespace detail

inline Potential potential_from_json(const json& j) {
  const std::string id = j.at("id").get<std::string>();
  if (id == "gaussian") {
    if (j.contains("mean") || j.contains("cov")) {
      Vec mean = j.contains("mean") ? detail::vec_from_json(j.at("mean")) : Vec();
      Mat cov = j.contains("cov") ? detail::mat_from_json(j.at("cov")) : Mat();
      if (mean.size() == 0) mean = Vec::Zero(cov.rows());
      if (cov.size() == 0) cov = Mat::Identity(mean.size(), mean.size());
      return make_gaussian_potential(mean, cov);
    }
    return make_gaussian_potential(j.value("dim", 1));
  }
  if (id == "quartic") return make_quartic_potential();
  if (id == "gaussian_plus_power")
    return make_gaussian_plus_power_potential(j.value("dim", 1), j.at("p").get<double>());
  if (id == "quadratic_quartic")
    return make_quadratic_quartic_potential(j.at("c2").get<double>(), j.at("c4").get<double>());
  if (id == "tabulated") {
    std::optional<double> R, S;
    if (j.contains("convexity_lower")) R = j.at("convexity_lower").get<double>();
    if (j.contains("convexity_upper")) S = j.at("convexity_upper").get<double>();
    return make_tabulated_potential(detail::list_from_json(j.at("x")),
                                    detail::list_from_json(j.at("v")), R, S);
  }
  fail("unknown potential id: " + id);
}

inline ScalarField field_from_json(const json& j);

inline Measure measure_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") {
    Vec mean = j.contains("mean") ? detail::vec_from_json(j.at("mean")) : Vec();
    Mat cov = j.contains("cov") ? detail::mat_from_json(j.at("cov")) : Mat();
    if (mean.size() == 0 && cov.size() == 0) return build_standard_gaussian(j.value("dim", 1));
    if (mean.size() == 0) mean = Vec::Zero(cov.rows());
    if (cov.size() == 0) cov = Mat::Identity(mean.size(), mean.size());
    return build_gaussian(mean, cov);
  }
  if (type == "grid_from_potential") {
    const auto pot = potential_from_json(j.at("potential"));
    return build_from_potential(pot, GridSpec::line(j.at("lo").get<double>(),
                                                    j.at("hi").get<double>(),
                                                    j.value("points", 2049)));
  }
  if (type == "grid2d_from_potential") {
    const auto pot = potential_from_json(j.at("potential"));
    const auto lo = detail::vec_from_json(j.at("lo"));
    const auto hi = detail::vec_from_json(j.at("hi"));
    const int nx = j.value("points_x", 129), ny = j.value("points_y", 129);
    return build_from_potential(pot, GridSpec::plane(lo[0], hi[0], nx, lo[1], hi[1], ny));
  }
  if (type == "discretized_gaussian") {
    Measure g = measure_from_json({{"type", "gaussian"},
                                   {"mean", j.value("mean", json::array({0.0}))},
                                   {"cov", j.value("cov", json::array({json::array({1.0})}))}});
    const GridSpec spec = GridSpec::line(j.at("lo").get<double>(), j.at("hi").get<double>(),
                                         j.value("points", 2049));
    GridDensity gd;
    gd.grid = spec;
    gd.w = grid_masses(g, spec);
    Measure m;
    m.rep = std::move(gd);
    m.potential = g.potential;
    return m;
  }
  if (type == "perturb") {
    Measure base = measure_from_json(j.at("base"));
    return perturb_density(base, field_from_json(j.at("field")), j.value("eps", 0.1));
  }
  if (type == "tensor") {
    Measure base = measure_from_json(j.at("base"));
    return tensor_power(base, j.at("copies").get<int>(), j.value("materialize", false));
  }
  fail("unknown measure type: " + type);
}

inline ScalarField field_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return field_linear(detail::vec_from_json(j.at("a")));
  if (kind == "norm_squared") return field_norm_squared();
  if (kind == "hermite") return hermite_field(j.at("k").get<int>());
  if (kind == "damped_hermite") return damped_hermite_field(j.at("k").get<int>());
  if (kind == "poly") return polynomial_field(detail::list_from_json(j.at("coeffs")));
  fail("unknown field kind: " + kind);
}

inline std::function<double(double)> scalar_function_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "exp_potential") {
    const auto pot = std::make_shared<Potential>(potential_from_json(j.at("potential")));
    require(pot->dim == 1, "convexity functional inputs are one-dimensional");
    return [pot](double x) {
      Vec v(1);
      v[0] = x;
      return std::exp(pot->value(v));
    };
  }
  if (form == "one_plus_sq") return [](double x) { return M_PI * (1.0 + x * x); };
  if (form == "dilated") {
    const auto base = scalar_function_from_json(j.at("base"));
    const double lam = j.at("lambda").get<double>();
    require(lam > 0.0, "dilation factor must be positive");
    return [base, lam](double x) { return base(lam * x) / lam; };
  }
  if (form == "shifted") {
    const auto base = scalar_function_from_json(j.at("base"));
    const double a = j.at("shift").get<double>();
    return [base, a](double x) { return base(x - a); };
  }
  fail("unknown scalar function form: " + form);
}

namespace detail {

inline std::vector<double> uniform_times(double t_max, int nodes, double t_min = 0.0) {
  require(t_max > t_min && nodes >= 2, "need t_max > t_min and at least two time nodes");
  std::vector<double> t(nodes);
  for (int i = 0; i < nodes; ++i) t[i] = t_min + (t_max - t_min) * i / (nodes - 1);
  return t;
}

inline Trajectory trajectory_from_json(const json& j, const RunOptions& opt) {
  const std::string solver = j.value("solver", "mehler");
  const Measure init = measure_from_json(j.at("init"));
  const auto times = uniform_times(j.at("t_max").get<double>(), j.value("nodes", 41),
                                   j.value("t_min", 0.0));
  SolverConfig cfg;
  cfg.dt = j.value("dt", 0.0);
  cfg.particles = j.value("particles", 1000);
  cfg.seed = j.value("seed", opt.seed == 0 ? 1 : opt.seed);
  if (solver == "mehler") return ou_evolve_trajectory(init, times);
  if (solver == "grid_fv")
    return fp_solve(potential_from_json(j.at("potential")), init, times, cfg);
  if (solver == "langevin_em")
    return langevin_simulate(potential_from_json(j.at("potential")), init, times, cfg);
  fail("unknown solver: " + solver);
}

}  // namespace detail

// Executes one scenario item; may emit several rows (e.g. one per radius).
inline std::vector<InequalityEvaluation> run_item(const json& j, const RunOptions& opt) {
  const std::string kind = j.at("kind").get<std::string>();
  const double tol = j.value("tolerance", -1.0);
  std::vector<InequalityEvaluation> out;

  if (kind == "inequality") {
    const std::string id = j.at("id").get<std::string>();
    if (id == "lsi.lp_euclidean") {
      out.push_back(evaluate_lp_euclidean_lsi(measure_from_json(j.at("nu")),
                                              potential_from_json(j.at("cost")), tol));
    } else {
      const Measure nu = measure_from_json(j.at("nu"));
      const Measure mu = measure_from_json(j.at("mu"));
      if (id == "lsi.gaussian_bl")
        out.push_back(evaluate_lsi_dimensional(nu, mu, LsiVariant::gaussian_bl, tol));
      else if (id == "lsi.gamma2_s")
        out.push_back(evaluate_lsi_dimensional(nu, mu, LsiVariant::gamma2_s, tol));
      else if (id == "lsi.lp_homogeneous")
        out.push_back(evaluate_lsi_dimensional(nu, mu, LsiVariant::lp_homogeneous, tol));
      else if (id == "lsi.transport_defLSI")
        out.push_back(evaluate_lsi_dimensional(nu, mu, LsiVariant::transport_defLSI, tol));
      else if (id == "lsi.combined")
        out.push_back(evaluate_lsi_dimensional(nu, mu, LsiVariant::combined, tol));
      else if (id == "talagrand.dimensional")
        out.push_back(evaluate_talagrand_dimensional(nu, mu, tol));
      else if (id == "hwi.dimensional") {
        if (j.contains("g"))
          out.push_back(evaluate_hwi(nu, measure_from_json(j.at("g")), mu, false, tol));
        else
          out.push_back(evaluate_hwi(nu, mu, tol));
      } else
        fail("unknown inequality id: " + id);
    }
  } else if (kind == "bl") {
    const std::string id = j.at("id").get<std::string>();
    static const std::map<std::string, BLVariant> variants = {
        {"bl.classical", BLVariant::classical},
        {"bl.transport_I", BLVariant::transport_I},
        {"bl.bbl_II", BLVariant::bbl_II},
        {"bl.gaussian_dim", BLVariant::gaussian_dim},
        {"bl.gaussian_spectral", BLVariant::gaussian_spectral},
        {"bl.harge", BLVariant::harge},
        {"bl.bobkov_ledoux", BLVariant::bobkov_ledoux}};
    const auto it = variants.find(id);
    require(it != variants.end(), "unknown Brascamp-Lieb id: " + id);
    out.push_back(evaluate_brascamp_lieb(field_from_json(j.at("f")),
                                         measure_from_json(j.at("mu")), it->second, tol));
  } else if (kind == "concentration") {
    const Measure mu = measure_from_json(j.at("mu"));
    SetDescriptor set;
    const json& js = j.at("set");
    const std::string sk = js.at("kind").get<std::string>();
    if (sk == "ball") {
      set.kind = SetDescriptor::Kind::ball;
      set.center = detail::vec_from_json(js.at("center"));
      set.radius = js.at("radius").get<double>();
    } else if (sk == "halfline") {
      set.kind = SetDescriptor::Kind::halfline;
      set.upper = js.at("upper").get<double>();
    } else {
      fail("unknown set kind: " + sk);
    }
    const auto radii = detail::list_from_json(j.at("radii"));
    const auto profile = concentration_profile(mu, set, radii);
    NumericsMeta meta;
    meta.absorb(mu);
    if (mu.gaussian()) {
      meta.grid = true;  // the profile is evaluated on the default grid
      meta.h = detail::default_gaussian_grid(*mu.gaussian()).max_step();
    }
    for (const auto& row : profile.rows)
      out.push_back(concentration_row_evaluation(profile, row, meta, tol));
  } else if (kind == "trace") {
    out.push_back(
        check_trace_bound(measure_from_json(j.at("source")), measure_from_json(j.at("target")), tol));
  } else if (kind == "geodesic") {
    out.push_back(check_geodesic_convexity(measure_from_json(j.at("m0")),
                                           measure_from_json(j.at("m1")), j.value("s_count", 33),
                                           tol >= 0.0 ? tol : 1e-4)
                      .evaluation);
  } else if (kind == "convexity") {
    out.push_back(check_convexity_functional(scalar_function_from_json(j.at("g")),
                                             scalar_function_from_json(j.at("w")),
                                             j.at("lo").get<double>(), j.at("hi").get<double>(),
                                             j.value("points", 8193), tol >= 0.0 ? tol : 1e-5)
                      .evaluation);
  } else if (kind == "audit_contraction") {
    json ju = j, jv = j;
    ju["init"] = j.at("u0");
    jv["init"] = j.at("v0");
    const double t_max = j.at("t_max").get<double>();
    const int npu = j.value("nodes_per_unit", 400);
    ju["nodes"] = jv["nodes"] = static_cast<int>(std::lround(t_max * npu)) + 1;
    const Trajectory u = detail::trajectory_from_json(ju, opt);
    const Trajectory v = detail::trajectory_from_json(jv, opt);
    out.push_back(audit_contraction(u, v, j.value("R", 1.0), std::min(npu, 200),
                                    tol >= 0.0 ? tol : 1e-6)
                      .evaluation);
  } else if (kind == "audit_smoothing") {
    const Trajectory traj = detail::trajectory_from_json(j, opt);
    out.push_back(
        audit_entropy_smoothing(traj, j.value("grad_energy_bound", 0.0), tol >= 0.0 ? tol : 1e-6)
            .evaluation);
  } else if (kind == "audit_improved_rate") {
    const Trajectory traj = detail::trajectory_from_json(j, opt);
    out.push_back(audit_improved_rate(traj, tol >= 0.0 ? tol : 1e-9).evaluation);
  } else if (kind == "trajectory") {
    const Trajectory traj = detail::trajectory_from_json(j, opt);
    if (j.contains("csv")) {
      const std::string path = opt.out_dir + "/" + j.at("csv").get<std::string>();
      std::FILE* f = std::fopen(path.c_str(), "wb");
      require(f != nullptr, "cannot open for writing: " + path);
      traj.write_csv(f);
      std::fclose(f);
    }
    InequalityEvaluation ev;
    ev.id = "dynamics.trajectory";
    const auto& last = traj.records.back();
    ev.intermediates["t_final"] = last.t;
    ev.intermediates["entropy_final"] = last.entropy;
    ev.intermediates["w2_final"] = last.w2;
    ev.intermediates["second_moment_final"] = last.second_moment;
    NumericsMeta meta;
    for (const auto& s : traj.states) meta.absorb(s);
    ev.finalize(meta, tol);
    out.push_back(std::move(ev));
  } else {
    fail("unknown scenario item kind: " + kind);
  }

  if (opt.tol_scale != 1.0)
    for (auto& ev : out) ev.rescale_tolerance(opt.tol_scale);
  return out;
}

struct Scenario {
  std::string name;
  std::vector<json> items;
};

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = j.value("name", "scenario");
  require(j.contains("items") && j.at("items").is_array(), "scenario needs an items array");
  for (const auto& it : j.at("items")) s.items.push_back(it);
  return s;
}

// Runs all items (in parallel when opt.jobs > 1) and returns ordered rows.
// Build or evaluation errors abort the run with the offending item's index.
inline std::vector<ReportRow> run_scenario(const Scenario& s, const RunOptions& opt) {
  std::vector<std::vector<ReportRow>> slots(s.items.size());
  std::vector<std::string> errors(s.items.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= s.items.size()) return;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto evals = run_item(s.items[i], opt);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t k = 0; k < evals.size(); ++k) {
          ReportRow row;
          row.scenario = s.name;
          row.item = static_cast<int>(i);
          row.subrow = static_cast<int>(k);
          row.ev = evals[k];
          row.wall_time_ms = ms / evals.size();
          slots[i].push_back(std::move(row));
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || s.items.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(s.items.size())); ++t)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      fail("item " + std::to_string(i) + ": " + errors[i]);

  std::vector<ReportRow> rows;
  for (auto& slot : slots)
    for (auto& row : slot) rows.push_back(std::move(row));
  return rows;
}

// ---------------------------------------------------------------------------
// Parameter sweeps in long format: family,dim,parameter,series,value.

struct SweepRowLimit {
  std::size_t max_rows = 100000;
};

inline std::string sweep_csv(const json& j, std::size_t max_rows = 100000) {
  const std::string family = j.at("family").get<std::string>();
  std::ostringstream out;
  out << "family,dim,parameter,series,value\n";
  std::size_t emitted = 0;
  const auto emit = [&](int dim, double param, const std::string& series, double value) {
    ++emitted;
    require(emitted <= max_rows, "sweep exceeds the row cap of " + std::to_string(max_rows));
    out << family << ',' << dim << ',' << format_double(param) << ',' << series << ','
        << format_double(value) << '\n';
  };

  if (family == "gaussian_translation" || family == "gaussian_variance") {
    const int dim = j.value("dim", 1);
    const auto params = detail::list_from_json(
        j.contains("shifts") ? j.at("shifts") : j.at("sigmas"));
    std::vector<std::string> ids = {"lsi.gaussian_bl", "talagrand.dimensional", "hwi.dimensional"};
    if (j.contains("ids")) {
      ids.clear();
      for (const auto& id : j.at("ids")) ids.push_back(id.get<std::string>());
    }
    const Measure mu = build_standard_gaussian(dim);
    for (const double p : params) {
      Measure nu;
      if (family == "gaussian_translation") {
        Vec mean = Vec::Zero(dim);
        mean[0] = p;
        nu = build_gaussian(mean, Mat::Identity(dim, dim));
      } else {
        require(p > 0.0, "gaussian_variance: sigma must be positive");
        nu = build_gaussian(Vec::Zero(dim), Mat(p * p * Mat::Identity(dim, dim)));
      }
      for (const auto& id : ids) {
        InequalityEvaluation ev;
        if (id == "lsi.gaussian_bl")
          ev = evaluate_lsi_dimensional(nu, mu, LsiVariant::gaussian_bl);
        else if (id == "lsi.gamma2_s")
          ev = evaluate_lsi_dimensional(nu, mu, LsiVariant::gamma2_s);
        else if (id == "lsi.transport_defLSI")
          ev = evaluate_lsi_dimensional(nu, mu, LsiVariant::transport_defLSI);
        else if (id == "lsi.combined")
          ev = evaluate_lsi_dimensional(nu, mu, LsiVariant::combined);
        else if (id == "talagrand.dimensional")
          ev = evaluate_talagrand_dimensional(nu, mu);
        else if (id == "hwi.dimensional")
          ev = evaluate_hwi(nu, mu);
        else
          fail("sweep family does not support id: " + id);
        emit(dim, p, id + ".lhs", ev.lhs);
        emit(dim, p, id + ".rhs", ev.rhs);
        emit(dim, p, id + ".slack", ev.slack);
      }
    }
  } else if (family == "fundamental_entropy") {
    std::vector<int> dims = {1};
    if (j.contains("dims")) {
      dims.clear();
      for (const auto& d : j.at("dims")) dims.push_back(d.get<int>());
    }
    const auto times = detail::list_from_json(j.at("times"));
    for (const int n : dims) {
      for (const double t : times) {
        const auto fe = fundamental_entropy(n, t);
        emit(n, t, "value", fe.value);
        emit(n, t, "log_bound", fe.log_bound);
        emit(n, t, "short_time_bound", fe.short_time_bound);
      }
    }
  } else {
    fail("unknown sweep family: " + family);
  }
  return out.str();
}

}  // namespace ineqlab
