#pragma once

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rcsc/complex.hpp"
#include "rcsc/config.hpp"
#include "rcsc/functional.hpp"
#include "rcsc/moments.hpp"
#include "rcsc/normapprox.hpp"
#include "rcsc/render.hpp"
#include "rcsc/report.hpp"
#include "rcsc/space.hpp"

namespace rcsc {

/// Process exit codes of the command-line runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitHypothesis = 4,
};

/// Named artifacts produced by one task, in emission order.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void add(const Table& t) { add(t.name + ".csv", to_csv(t)); }
};

namespace detail {

inline constexpr double kNotEstimated = std::numeric_limits<double>::quiet_NaN();

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

inline void add_estimate(Table& t, const std::string& quantity, std::int64_t i, std::int64_t j, const MonteCarloEstimate& e) {
  t.add({quantity, i, j, e.value, e.standard_error});
}

/// One realization for the sample and render tasks.
inline ComplexSample sample_realization(const RunConfig& c, const Window& window, const ConnectionSystem& system) {
  auto gen = make_generator(c.seed, streams::kPoints);
  auto pts = sample_poisson(window, c.beta, gen);
  return build_complex(std::move(pts), system, stream_seed(c.seed, streams::kMarks));
}

inline Table points_table(const ComplexSample& s, const Window& window) {
  Table t{"points", {"index", "id"}, {}};
  const int d = window.dimension();
  if (window.is_hyperbolic()) {
    for (const char* c : {"t", "phi", "x", "y"}) t.columns.emplace_back(c);
  } else {
    for (int k = 0; k < d; ++k) t.columns.push_back("x" + std::to_string(k));
  }
  t.columns.emplace_back("mark");
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    const auto& p = s.vertices[i];
    std::vector<Cell> row{as_int(i), std::to_string(p.id)};
    if (window.is_hyperbolic()) {
      const auto z = to_poincare(p);
      row.insert(row.end(), {p.location[0], p.location[1], z[0], z[1]});
    } else {
      for (int k = 0; k < d; ++k) row.emplace_back(p.location[static_cast<std::size_t>(k)]);
    }
    row.emplace_back(p.mark);
    t.add(std::move(row));
  }
  return t;
}

inline Table counts_table(const ComplexSample& s, const CoefficientVector& a) {
  Table t{"counts", {"quantity", "dimension", "value"}, {}};
  const auto f = simplex_counts(s);
  for (std::size_t j = 0; j < f.size(); ++j) t.add({"f", as_int(j), f[j]});
  t.add({"chi", std::int64_t{-1}, euler_characteristic(f, a)});
  return t;
}

inline Artifacts task_sample(const RunConfig& c, const Window& window, const ConnectionSystem& system) {
  Artifacts out;
  const auto s = sample_realization(c, window, system);
  out.add(points_table(s, window));
  out.add(counts_table(s, c.a));
  std::ostringstream simplices;
  write_simplices(simplices, s);
  out.add("simplices.txt", simplices.str());
  if (window.is_hyperbolic()) out.add("complex.svg", render_disk(s.vertices, s));
  return out;
}

inline Artifacts task_render(const RunConfig& c, const Window& window, const ConnectionSystem& system) {
  Artifacts out;
  const auto s = sample_realization(c, window, system);
  if (c.system.name == "hyperbolic_line") out.add("lines.svg", render_lines(s.vertices));
  out.add("complex.svg", render_disk(s.vertices, s));
  return out;
}

inline Artifacts task_moments(const RunConfig& c, const Window& window, const ConnectionSystem& system) {
  Artifacts out;
  const auto m = euler_moments(c.a, c.beta, window, system, c.integration);

  Table z{"zeta", {"m", "l", "r", "value", "standard_error", "samples"}, {}};
  for (const auto& e : m.zetas)
    z.add({std::int64_t{e.m}, std::int64_t{e.l}, std::int64_t{e.r}, e.value.value, e.value.standard_error, as_int(e.value.samples)});
  out.add(z);

  Table t{"moments", {"quantity", "i", "j", "value", "standard_error"}, {}};
  const auto n = m.count_means.size();
  for (std::size_t i = 0; i < n; ++i) add_estimate(t, "count_mean", as_int(i), -1, m.count_means[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) add_estimate(t, "count_covariance", as_int(i), as_int(j), m.covariance[i][j]);
  add_estimate(t, "euler_mean", -1, -1, m.euler_mean);
  add_estimate(t, "euler_variance", -1, -1, m.euler_variance);
  add_estimate(t, "variance_lower_bound", -1, -1, m.lower_bound);
  for (std::size_t k = 0; k < m.fock_terms.size(); ++k) add_estimate(t, "fock_term", as_int(k + 1), -1, m.fock_terms[k]);
  out.add(t);

  if (c.moment_replicates >= 2) {
    const auto e = empirical_moments(c.a, c.beta, window, system, c.moment_replicates, c.seed, c.threads);
    Table cmp{"empirical",
              {"quantity", "i", "j", "closed_form", "closed_form_se", "empirical", "empirical_se", "z"},
              {}};
    auto row = [&](const std::string& q, std::int64_t i, std::int64_t j, const MonteCarloEstimate& cf, double v, double se) {
      const double s = std::hypot(cf.standard_error, se);
      cmp.add({q, i, j, cf.value, cf.standard_error, v, se, s > 0.0 ? (v - cf.value) / s : kNotEstimated});
    };
    for (std::size_t i = 0; i < n; ++i)
      row("count_mean", as_int(i), -1, m.count_means[i], e.count_means[i].value, e.count_means[i].standard_error);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        row("count_covariance", as_int(i), as_int(j), m.covariance[i][j], e.covariance[i][j].value,
            e.covariance[i][j].standard_error);
    row("euler_mean", -1, -1, m.euler_mean, e.euler_mean.value, e.euler_mean.standard_error);
    row("euler_variance", -1, -1, m.euler_variance, e.euler_variance.value, e.euler_variance.standard_error);
    out.add(cmp);
  }
  return out;
}

inline void add_gamma_rows(Table& t, const GammaReport& g) {
  for (std::size_t k = 0; k < 6; ++k) add_estimate(t, "gamma", as_int(k + 1), -1, g.gamma[k]);
  add_estimate(t, "wasserstein_bound", -1, -1, g.wasserstein_bound);
  add_estimate(t, "kolmogorov_bound", -1, -1, g.kolmogorov_bound);
  add_estimate(t, "fourth_moment", -1, -1, g.fourth_moment);
  t.add({"fourth_moment_bound", std::int64_t{-1}, std::int64_t{-1}, g.fourth_moment_bound, kNotEstimated});
}

inline Artifacts task_gamma(const RunConfig& c, const Window& window, const ConnectionSystem& system) {
  Artifacts out;
  GammaOptions o;
  o.seed = c.seed;
  o.threads = c.threads;
  o.fourth_moment_replicates = c.fourth_moment_replicates;
  o.integration = c.integration;
  const auto g = gamma_quantities(c.beta, window, system, c.a, c.gamma_outer, c.gamma_inner, o);
  Table t{"gamma", {"quantity", "i", "j", "value", "standard_error"}, {}};
  t.add({"mean", std::int64_t{-1}, std::int64_t{-1}, g.standardization.mean, kNotEstimated});
  t.add({"variance", std::int64_t{-1}, std::int64_t{-1}, g.standardization.variance, kNotEstimated});
  add_gamma_rows(t, g);
  if (c.moment_replicates >= 1000 && !c.a.is_zero()) {
    const auto e = empirical_moments(c.a, c.beta, window, system, c.moment_replicates, c.seed, c.threads);
    const double ks = empirical_kolmogorov(standardize(e.chi, g.standardization));
    t.add({"empirical_kolmogorov", std::int64_t{-1}, std::int64_t{-1}, ks, kolmogorov_standard_error(c.moment_replicates)});
  }
  out.add(t);
  return out;
}

inline Artifacts task_clt(const RunConfig& c, const Window& window) {
  Artifacts out;
  CltExperiment e;
  e.regime = c.regime;
  e.ladder = c.ladder;
  e.window = window;
  e.beta = c.beta;
  const SystemSpec spec = c.system;
  e.system = [spec](const Window& w) { return make_system(spec, w); };
  e.a = c.a;
  e.replicates = c.clt_replicates;
  e.standardization = c.standardization;
  e.gamma_outer = c.clt_gamma_outer;
  e.gamma_inner = c.gamma_inner;
  e.fourth_moment_replicates = c.fourth_moment_replicates;
  e.integration = c.integration;
  e.stationary.integration = c.integration;
  e.seed = c.seed;
  e.threads = c.threads;
  const auto r = run_clt_experiment(e);

  Table rungs{"clt",
              {"rung", "parameter", "beta", "window_measure", "replicates", "mean", "variance", "euler_mean",
               "euler_mean_se", "ks", "ks_se", "top_count_ratio", "top_count_ratio_se"},
              {}};
  for (int k = 1; k <= 6; ++k) {
    rungs.columns.push_back("gamma_" + std::to_string(k));
    rungs.columns.push_back("gamma_" + std::to_string(k) + "_se");
  }
  rungs.columns.insert(rungs.columns.end(), {"kolmogorov_bound", "kolmogorov_bound_se"});
  for (std::size_t k = 0; k < r.rungs.size(); ++k) {
    const auto& g = r.rungs[k];
    std::vector<Cell> row{as_int(k),           g.parameter,           g.beta,
                          g.window_measure,    as_int(g.replicates),  g.standardization.mean,
                          g.standardization.variance, g.euler_mean.value, g.euler_mean.standard_error,
                          g.ks,                g.ks_standard_error,   g.top_count_ratio.value,
                          g.top_count_ratio.standard_error};
    for (std::size_t j = 0; j < 6; ++j) {
      row.emplace_back(g.gamma ? g.gamma->gamma[j].value : kNotEstimated);
      row.emplace_back(g.gamma ? g.gamma->gamma[j].standard_error : kNotEstimated);
    }
    row.emplace_back(g.gamma ? g.gamma->kolmogorov_bound.value : kNotEstimated);
    row.emplace_back(g.gamma ? g.gamma->kolmogorov_bound.standard_error : kNotEstimated);
    rungs.add(std::move(row));
  }
  out.add(rungs);

  Table s{"clt_summary", {"quantity", "i", "value", "standard_error"}, {}};
  s.add({"ks_decreasing", std::int64_t{-1}, r.ks_decreasing ? 1.0 : 0.0, kNotEstimated});
  s.add({"ks_slope", std::int64_t{-1}, r.ks_slope.value_or(kNotEstimated), kNotEstimated});
  for (std::size_t j = 0; j < 6; ++j)
    s.add({"gamma_slope", as_int(j + 1), r.gamma_slopes[j].value_or(kNotEstimated), kNotEstimated});
  s.add({"min_top_count_ratio", std::int64_t{-1}, r.min_top_count_ratio, kNotEstimated});
  if (r.nu) s.add({"nu", std::int64_t{-1}, r.nu->value, r.nu->standard_error});
  if (r.limits) {
    s.add({"sigma_min_eigenvalue", std::int64_t{-1}, r.limits->min_eigenvalue, r.limits->min_eigenvalue_se});
    s.add({"sigma_positive_definite", std::int64_t{-1}, r.limits->positive_definite ? 1.0 : 0.0, kNotEstimated});
  }
  out.add(s);

  if (r.limits) {
    Table cov{"covariance", {"rung", "i", "j", "empirical", "empirical_se", "sigma", "sigma_se", "z"}, {}};
    Table ks{"coordinate_ks", {"rung", "dimension", "ks", "ks_se"}, {}};
    for (std::size_t k = 0; k < r.rungs.size(); ++k) {
      const auto& g = r.rungs[k];
      for (std::size_t i = 0; i < g.scaled_covariance.size(); ++i) {
        for (std::size_t j = 0; j < g.scaled_covariance.size(); ++j) {
          const auto& e = g.scaled_covariance[i][j];
          const auto& sg = r.limits->sigma[i][j];
          const double se = std::hypot(e.standard_error, sg.standard_error);
          cov.add({as_int(k), as_int(i), as_int(j), e.value, e.standard_error, sg.value, sg.standard_error,
                   se > 0.0 ? (e.value - sg.value) / se : kNotEstimated});
        }
        ks.add({as_int(k), as_int(i), g.coordinate_ks[i], g.ks_standard_error});
      }
    }
    out.add(cov);
    out.add(ks);
  }
  return out;
}

}  // namespace detail

/// Runs the configured task and returns its artifacts without touching disk.
inline Artifacts run_task(const RunConfig& c) {
  const Window window = c.window();
  const auto system = make_system(c.system, window);
  switch (c.task) {
    case Task::Sample: return detail::task_sample(c, window, system);
    case Task::Moments: return detail::task_moments(c, window, system);
    case Task::Gamma: return detail::task_gamma(c, window, system);
    case Task::Clt: return detail::task_clt(c, window);
    case Task::Render: return detail::task_render(c, window, system);
  }
  throw std::logic_error("unhandled task");
}

/// Writes the artifacts and manifest.txt into c.out.
inline void write_artifacts(const RunConfig& c, const Artifacts& a) {
  Manifest m{c.text, c.seed, task_name(c.task), {}};
  for (const auto& [name, content] : a.files) {
    write_file(c.out, name, content);
    m.artifacts.push_back(name + " " + git_blob_hash(content));
  }
  write_file(c.out, "manifest.txt", to_text(m));
}

}  // namespace rcsc
