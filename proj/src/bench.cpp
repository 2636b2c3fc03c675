#include "mlsa/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mlsa {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Stable replication key: cell index in the high word, replication in the low.
RngState make_state(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep) {
  return RngState(seed).with_replication((cell << 32) | rep);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: empty estimate set");
  double s = 0.0;
  for (double e : estimates) {
    double d = e - truth;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(estimates.size()));
}

SlopeFit fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("fit_loglog_slope: need >= 3 paired points");
  std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; i++) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: inputs must be positive");
    double lx = std::log(xs[i]);
    double ly = std::log(ys[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
  }
  double dn = static_cast<double>(n);
  double vxx = sxx - sx * sx / dn;
  double vxy = sxy - sx * sy / dn;
  double vyy = syy - sy * sy / dn;
  SlopeFit f;
  f.slope = vxy / vxx;
  f.intercept = (sy - f.slope * sx) / dn;
  f.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return f;
}

std::string target_name(Target t) { return t == Target::Var ? "var" : "es"; }

const CellSpec* TargetSpec::cell_for(double eps) const {
  for (const CellSpec& c : cells)
    if (c.eps == eps) return &c;
  return nullptr;
}

const TargetSpec& ExperimentConfig::spec_for(const std::string& algo, Target t) const {
  auto a = algorithms.find(algo);
  if (a == algorithms.end())
    throw ConfigError("config: no section for algorithm '" + algo + "'");
  auto s = a->second.find(target_name(t));
  if (s == a->second.end())
    throw ConfigError("config: algorithm '" + algo + "' has no '" +
                      target_name(t) + "' target");
  return s->second;
}

namespace {

ScheduleSpec parse_schedule(const json& j, const ScheduleSpec& defaults) {
  ScheduleSpec s = defaults;
  if (j.contains("gamma1")) s.gamma1 = j.at("gamma1").get<double>();
  if (j.contains("beta")) s.beta = j.at("beta").get<double>();
  if (j.contains("offset")) s.offset = j.at("offset").get<double>();
  return s;
}

EstimatePair parse_init(const json& j, EstimatePair defaults) {
  if (!j.contains("init")) return defaults;
  const json& ij = j.at("init");
  if (!ij.is_array() || ij.size() != 2)
    throw ConfigError("config: init must be a two-element [xi, chi] array");
  EstimatePair p{ij[0].get<double>(), ij[1].get<double>()};
  if (!p.finite()) throw ConfigError("config: init must be finite");
  return p;
}

TargetSpec parse_target(const json& j) {
  TargetSpec t;
  t.sched = parse_schedule(j, ScheduleSpec{});
  if (j.contains("calibration")) t.calibration = j.at("calibration").get<double>();
  if (j.contains("k0")) t.k0 = j.at("k0").get<std::int64_t>();
  t.init = parse_init(j, EstimatePair{});
  if (j.contains("cells")) {
    for (const json& cj : j.at("cells")) {
      CellSpec c;
      c.eps = cj.at("eps").get<double>();
      c.k0 = cj.contains("k0") ? cj.at("k0").get<std::int64_t>() : t.k0;
      c.sched = parse_schedule(cj, t.sched);
      if (cj.contains("calibration"))
        c.calibration = cj.at("calibration").get<double>();
      c.init = parse_init(cj, t.init);
      t.cells.push_back(c);
    }
  }
  return t;
}

std::shared_ptr<const LossModel> parse_model(const json& j) {
  std::string name = j.at("name").get<std::string>();
  RiskLevel level(j.at("alpha").get<double>());
  if (name == "option")
    return std::make_shared<OptionModel>(OptionParams(j.at("delta").get<double>(), level));
  if (name == "swap")
    return std::make_shared<SwapModel>(SwapParams(
        j.at("r").get<double>(), j.at("s0").get<double>(),
        j.at("kappa").get<double>(), j.at("sigma").get<double>(),
        j.at("coupon_interval").get<double>(), j.at("maturity").get<double>(),
        j.at("horizon").get<double>(), level));
  throw ConfigError("config: unknown model '" + name + "'");
}

Scenario parse_scenario(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite_moment")
    return Scenario::finite_moment(j.at("p_star").get<double>());
  if (kind == "gaussian") return Scenario::gaussian();
  if (kind == "lipschitz") return Scenario::lipschitz();
  throw ConfigError("config: unknown scenario kind '" + kind + "'");
}

std::int64_t resolve_k0(const TargetSpec& ts, double eps) {
  const CellSpec* cell = ts.cell_for(eps);
  std::int64_t k0 = cell && cell->k0 > 0 ? cell->k0 : ts.k0;
  if (k0 < 1)
    throw ConfigError("config: MLSA needs a ladder base k0 for eps=" + fmt(eps));
  return k0;
}

std::uint64_t cell_index(const ExperimentConfig& cfg, const std::string& algo,
                         Target t, double eps) {
  std::uint64_t algo_id = algo == "sa" ? 1 : algo == "nsa" ? 2 : 3;
  auto it = std::find(cfg.epsilons.begin(), cfg.epsilons.end(), eps);
  if (it == cfg.epsilons.end())
    throw ConfigError("config: eps=" + fmt(eps) + " is not on the accuracy grid");
  std::uint64_t eps_id =
      static_cast<std::uint64_t>(it - cfg.epsilons.begin());
  return (algo_id * 2 + (t == Target::Es ? 1 : 0)) * 64 + eps_id;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    ExperimentConfig cfg;
    cfg.model = parse_model(j.at("model"));
    auto truth = cfg.model->analytic_truth();
    if (!truth) throw ConfigError(origin + ": model lacks analytic benchmarks");
    cfg.truth = *truth;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replications"))
      cfg.replications = j.at("replications").get<int>();
    if (cfg.replications < 1)
      throw ConfigError(origin + ": replications must be >= 1");
    if (j.contains("m")) cfg.m = j.at("m").get<int>();
    if (cfg.m < 2) throw ConfigError(origin + ": geometric factor m must be >= 2");
    if (j.contains("scenario")) cfg.scenario = parse_scenario(j.at("scenario"));
    cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (cfg.epsilons.empty())
      throw ConfigError(origin + ": accuracy grid is empty");
    for (std::size_t i = 1; i < cfg.epsilons.size(); i++)
      if (!(cfg.epsilons[i] < cfg.epsilons[i - 1]))
        throw ConfigError(origin + ": accuracy grid must be strictly decreasing");
    for (auto& [algo, targets] : j.at("algorithms").items()) {
      if (algo != "sa" && algo != "nsa" && algo != "mlsa")
        throw ConfigError(origin + ": unknown algorithm '" + algo + "'");
      for (auto& [tname, tj] : targets.items()) {
        if (tname != "var" && tname != "es")
          throw ConfigError(origin + ": unknown target '" + tname + "'");
        cfg.algorithms[algo][tname] = parse_target(tj);
      }
    }
    if (cfg.algorithms.empty())
      throw ConfigError(origin + ": no algorithms configured");
    // MLSA rows must start above the prescribed accuracy.
    if (auto it = cfg.algorithms.find("mlsa"); it != cfg.algorithms.end()) {
      for (auto& [tname, ts] : it->second)
        for (double eps : cfg.epsilons)
          if (1.0 / static_cast<double>(resolve_k0(ts, eps)) <= eps)
            throw ConfigError(origin + ": MLSA h0 must exceed eps=" + fmt(eps) +
                              " for target '" + tname + "'");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

CellResult run_replications(const ExperimentConfig& cfg, const std::string& algo,
                            Target t, double eps) {
  const TargetSpec& ts = cfg.spec_for(algo, t);
  const CellSpec* cell = ts.cell_for(eps);
  ScheduleSpec ss = cell ? cell->sched : ts.sched;
  EstimatePair init = cell ? cell->init : ts.init;
  StepSchedule sched = ss.make();
  std::uint64_t cell_id = cell_index(cfg, algo, t, eps);

  CellResult out;
  const LossModel& model = *cfg.model;

  if (algo == "sa") {
    if (!model.has_exact_loss())
      throw ConfigError("config: model '" + model.name() +
                        "' has no direct loss simulator for SA");
    auto n = static_cast<std::int64_t>(std::ceil(std::pow(eps, -2.0 / ss.beta)));
    out.analytic_cost = n;
    LossGenerator gen = [&model](RngStream& r) { return model.draw_exact_loss(r); };
    for (int rep = 0; rep < cfg.replications; rep++) {
      try {
        out.runs.push_back(run_sa(gen, n, sched, init, model.risk_level(),
                                  make_state(cfg.seed, cell_id, static_cast<std::uint64_t>(rep))));
      } catch (const DivergedError&) {
        out.diverged++;
      }
    }
  } else if (algo == "nsa") {
    auto [bias, n] = nsa_tuning(eps, ss.beta);
    out.analytic_cost = n * bias.k;
    for (int rep = 0; rep < cfg.replications; rep++) {
      try {
        out.runs.push_back(run_nested_sa(model, bias, n, sched, init,
                                         make_state(cfg.seed, cell_id, static_cast<std::uint64_t>(rep))));
      } catch (const DivergedError&) {
        out.diverged++;
      }
    }
  } else if (algo == "mlsa") {
    std::int64_t k0 = resolve_k0(ts, eps);
    double cal = cell && cell->calibration ? *cell->calibration : ts.calibration;
    int levels;
    try {
      levels = level_count(BiasParam(k0), cfg.m, eps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    LevelLadder ladder(BiasParam(k0), cfg.m, levels);
    Allocation alloc = t == Target::Var
                           ? var_allocation(eps, ss.beta, ladder, cfg.scenario,
                                            ss.gamma1, cal)
                           : es_allocation(eps, ladder, cal);
    out.analytic_cost = alloc.cost();
    std::vector<EstimatePair> inits(alloc.budgets.size(), init);
    for (int rep = 0; rep < cfg.replications; rep++) {
      try {
        out.runs.push_back(run_mlsa(model, ladder, alloc.budgets, sched, inits,
                                    make_state(cfg.seed, cell_id, static_cast<std::uint64_t>(rep))));
      } catch (const DivergedError&) {
        out.diverged++;
      }
    }
  } else {
    throw ConfigError("unknown algorithm '" + algo + "'");
  }
  return out;
}

std::vector<BiasRow> bias_study(const LossModel& model,
                                const std::vector<std::int64_t>& inner_counts,
                                std::int64_t n, const ScheduleSpec& sched,
                                int reps, std::uint64_t seed) {
  auto truth = model.analytic_truth();
  if (!truth)
    throw ConfigError("bias_study: model lacks analytic benchmarks");
  if (inner_counts.empty())
    throw ConfigError("bias_study: empty bias grid");
  StepSchedule schedule = sched.make();
  std::vector<BiasRow> rows;
  for (std::size_t i = 0; i < inner_counts.size(); i++) {
    BiasParam bias(inner_counts[i]);
    std::vector<double> xis, chis;
    int diverged = 0;
    for (int rep = 0; rep < reps; rep++) {
      // Separate cell index space from compare cells.
      RngState st = make_state(seed, 1024 + i, static_cast<std::uint64_t>(rep));
      try {
        SARunResult r = run_nested_sa(model, bias, n, schedule, {}, st);
        xis.push_back(r.estimate.xi);
        chis.push_back(r.estimate.chi);
      } catch (const DivergedError&) {
        diverged++;
      }
    }
    BiasRow row;
    row.h = bias.h();
    row.diverged = diverged;
    if (!xis.empty()) {
      row.var_err = mean_of(xis) - truth->xi;
      row.es_err = mean_of(chis) - truth->chi;
      row.var_rescaled = row.var_err / row.h;
      row.es_rescaled = row.es_err / row.h;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bias_table_csv(const std::vector<BiasRow>& rows) {
  std::string out = "h,var_err,es_err,var_err_over_h,es_err_over_h,diverged\n";
  for (const BiasRow& r : rows) {
    out += fmt(r.h) + "," + fmt(r.var_err) + "," + fmt(r.es_err) + "," +
           fmt(r.var_rescaled) + "," + fmt(r.es_rescaled) + "," +
           std::to_string(r.diverged) + "\n";
  }
  return out;
}

CompareOutput compare_command(const ExperimentConfig& cfg, bool timing) {
  CompareOutput out;
  out.csv = "algorithm,target,epsilon,rmse,mean_runtime_s,mean_cost,replications\n";
  std::ostringstream report;
  report << "model: " << cfg.model->name() << "  seed: " << cfg.seed
         << "  replications: " << cfg.replications << "\n";

  for (const auto& [algo, targets] : cfg.algorithms) {
    for (const auto& [tname, ts] : targets) {
      (void)ts;
      Target t = tname == "var" ? Target::Var : Target::Es;
      std::vector<double> grid_eps, grid_rmse, grid_runtime, grid_cost;
      for (double eps : cfg.epsilons) {
        CellResult cell = run_replications(cfg, algo, t, eps);
        BenchRecord rec;
        rec.algorithm = algo;
        rec.target = tname;
        rec.epsilon = eps;
        rec.replications = static_cast<int>(cell.runs.size());
        rec.diverged = cell.diverged;
        rec.mean_cost = static_cast<double>(cell.analytic_cost);
        if (cell.runs.empty()) {
          rec.empty = true;
          out.any_cell_empty = true;
          report << "warning: cell (" << algo << ", " << tname << ", eps="
                 << fmt(eps) << ") lost every replication to divergence\n";
        } else {
          std::vector<double> est;
          est.reserve(cell.runs.size());
          double rt = 0.0;
          for (const SARunResult& r : cell.runs) {
            est.push_back(t == Target::Var ? r.estimate.xi : r.estimate.chi);
            rt += r.wall_time_s;
          }
          rec.rmse_value =
              rmse(est, t == Target::Var ? cfg.truth.xi : cfg.truth.chi);
          rec.mean_runtime_s =
              timing ? rt / static_cast<double>(cell.runs.size()) : 0.0;
          grid_eps.push_back(eps);
          grid_rmse.push_back(rec.rmse_value);
          grid_runtime.push_back(rec.mean_runtime_s);
          grid_cost.push_back(rec.mean_cost);
          if (cell.diverged > 0)
            report << "warning: " << cell.diverged << " divergent replication(s) in cell ("
                   << algo << ", " << tname << ", eps=" << fmt(eps) << ")\n";
        }
        out.records.push_back(rec);
        out.csv += rec.algorithm + "," + rec.target + "," + fmt(rec.epsilon) +
                   "," + fmt(rec.rmse_value) + "," + fmt(rec.mean_runtime_s) +
                   "," + fmt(rec.mean_cost) + "," +
                   std::to_string(rec.replications) + "\n";
      }
      report << algo << "/" << tname << ":";
      if (grid_eps.size() >= 3) {
        SlopeFit cost_eps = fit_loglog_slope(grid_eps, grid_cost);
        SlopeFit rmse_eps = fit_loglog_slope(grid_eps, grid_rmse);
        report << "  cost-vs-eps slope " << fmt(cost_eps.slope)
               << "  rmse-vs-eps slope " << fmt(rmse_eps.slope);
        if (timing) {
          SlopeFit rt_eps = fit_loglog_slope(grid_eps, grid_runtime);
          SlopeFit rt_rmse = fit_loglog_slope(grid_rmse, grid_runtime);
          report << "  runtime-vs-eps slope " << fmt(rt_eps.slope)
                 << "  runtime-vs-rmse slope " << fmt(rt_rmse.slope);
        }
      } else {
        report << "  (fewer than 3 usable cells; slope fits skipped)";
      }
      report << "\n";
    }
  }
  out.report = report.str();
  return out;
}

}  // namespace mlsa
