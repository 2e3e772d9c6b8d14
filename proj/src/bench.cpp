#include "subzero/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace subzero::bench {
namespace {

using nlohmann::json;

const std::vector<std::string> kSolvers{"dp", "comparator", "value", "regret-nv"};

bool is_regret(const std::string& solver) { return solver == "regret-nv"; }

std::string parameter_label(const ExperimentConfig& cfg) {
  if (is_regret(cfg.solver)) return "T=" + std::to_string(*cfg.horizon);
  return "eps=" + format_double(*cfg.eps);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename T>
std::vector<T> json_list(const json& j, const std::string& field) {
  if (!j.is_array()) {
    try {
      return {j.get<T>()};
    } catch (const json::exception&) {
      throw ConfigError(field, "expected a value or a list of values");
    }
  }
  std::vector<T> out;
  try {
    for (const auto& v : j) out.push_back(v.get<T>());
  } catch (const json::exception&) {
    throw ConfigError(field, "list has entries of the wrong type");
  }
  if (out.empty()) throw ConfigError(field, "list must not be empty");
  return out;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void validate(const ExperimentConfig& cfg) {
  if (!cfg.problem.is_object()) throw ConfigError("problem", "expected an object");
  if (std::find(kSolvers.begin(), kSolvers.end(), cfg.solver) == kSolvers.end()) {
    throw ConfigError("solver", "expected one of dp, comparator, value, regret-nv");
  }
  if (is_regret(cfg.solver)) {
    if (!cfg.horizon) throw ConfigError("T", "required for solver regret-nv");
    if (*cfg.horizon < 1) throw ConfigError("T", "must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("delta", "must lie in (0, 1]");
    if (!(cfg.sigma >= 0.0)) throw ConfigError("sigma", "must be >= 0");
  } else {
    if (!cfg.eps) throw ConfigError("eps", "required for solver " + cfg.solver);
    if (!(*cfg.eps > 0.0)) throw ConfigError("eps", "must be > 0");
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds", "must not be empty");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format", "expected csv or json");
  if (cfg.max_queries && *cfg.max_queries < 0) throw ConfigError("max_queries", "must be >= 0");
}

ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "experiment config must be a JSON object");
  ExperimentConfig cfg;
  if (!j.contains("problem")) throw ConfigError("problem", "missing problem spec");
  cfg.problem = j["problem"];
  if (!j.contains("solver") || !j["solver"].is_string()) throw ConfigError("solver", "missing solver name");
  cfg.solver = j["solver"].get<std::string>();
  auto number = [&j](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number()) throw ConfigError(key, "expected a number");
    return j[key].get<double>();
  };
  cfg.eps = number("eps");
  if (j.contains("T")) {
    if (!j["T"].is_number_integer()) throw ConfigError("T", "expected an integer");
    cfg.horizon = j["T"].get<long long>();
  }
  cfg.delta = number("delta").value_or(cfg.delta);
  cfg.sigma = number("sigma").value_or(cfg.sigma);
  if (j.contains("seeds")) cfg.seeds = json_list<std::uint64_t>(j["seeds"], "seeds");
  if (j.contains("seed")) cfg.seeds = json_list<std::uint64_t>(j["seed"], "seed");
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("format")) cfg.format = j["format"].get<std::string>();
  if (j.contains("max_queries")) {
    if (!j["max_queries"].is_number_integer()) throw ConfigError("max_queries", "expected an integer");
    cfg.max_queries = j["max_queries"].get<long long>();
  }
  validate(cfg);
  return cfg;
}

RunReport run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  json spec = cfg.problem;
  if (!spec.contains("seed")) spec["seed"] = seed;
  const ProblemPtr problem = problem_from_json(spec);
  const int n = problem->dimension;

  RunReport rep;
  rep.solver = cfg.solver;
  rep.problem_kind = problem->kind;
  rep.n = n;
  rep.seed = seed;
  rep.run_id = problem->kind + "-" + cfg.solver + "-n" + std::to_string(n) + "-" + parameter_label(cfg) + "-s" +
               std::to_string(seed);

  const auto start = std::chrono::steady_clock::now();
  if (is_regret(cfg.solver)) {
    check_interior(*problem, std::pow(static_cast<double>(*cfg.horizon), -0.25));
    RegretConfig rc;
    rc.horizon = *cfg.horizon;
    rc.delta = cfg.delta;
    rc.sigma = cfg.sigma;
    OracleHandle oracle(OracleKind::NoisyValue, problem, cfg.sigma, seed, cfg.max_queries);
    RegretResult res = regret_nv(*problem, oracle, rc);
    rep.point = res.point;
    rep.trace = std::move(res.trace);
    rep.cumulative_regret = res.cumulative_regret;
    rep.theorem_bound = theorem3_bound(*problem, rc);
    rep.query_bound = static_cast<double>(rc.horizon);
    rep.total_queries = oracle.query_count();
    rep.accuracy_ok = rep.cumulative_regret <= rep.theorem_bound;
  } else {
    const double eps = *cfg.eps;
    check_interior(*problem, eps);
    SolverConfig sc;
    sc.eps = eps;
    SolveResult res;
    if (cfg.solver == "dp") {
      OracleHandle oracle(OracleKind::DirectionalPreference, problem, 0.0, seed, cfg.max_queries);
      res = optimize_dp(*problem, oracle, sc);
      rep.total_queries = oracle.query_count();
      rep.query_bound =
          query_bound_dp(n, problem->radius, problem->lipschitz, eps, res.trace.planned_iterations);
    } else if (cfg.solver == "comparator") {
      OracleHandle oracle(OracleKind::Comparator, problem, 0.0, seed, cfg.max_queries);
      res = optimize_c(*problem, oracle, sc);
      rep.total_queries = oracle.query_count();
      rep.query_bound = query_bound_c(n, res.trace.planned_iterations);
    } else {
      OracleHandle oracle(OracleKind::Value, problem, 0.0, seed, cfg.max_queries);
      res = optimize_v(*problem, oracle, sc);
      rep.total_queries = oracle.query_count();
      rep.query_bound = query_bound_v(n, res.trace.planned_iterations);
    }
    rep.point = res.point;
    rep.trace = std::move(res.trace);
    rep.theorem_bound = eps;
    rep.accuracy_ok = problem->value(rep.point) - problem->optimum_value <= eps;
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.suboptimality = problem->value(rep.point) - problem->optimum_value;
  rep.queries_ok = static_cast<double>(rep.total_queries) <= rep.query_bound;
  rep.bound_satisfied = rep.accuracy_ok && rep.queries_ok;
  return rep;
}

std::vector<RunReport> run(const ExperimentConfig& cfg) {
  std::vector<RunReport> out;
  for (const auto seed : cfg.seeds) out.push_back(run_one(cfg, seed));
  return out;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"run_id",        "solver",     "n",
                                             "k",             "phase",      "queries_cumulative",
                                             "f_center",      "suboptimality", "log_volume",
                                             "cone_angle",    "instantaneous_regret", "cumulative_regret"};
  return cols;
}

std::string to_csv(const std::vector<RunReport>& reports, bool header) {
  std::ostringstream os;
  if (header) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
  }
  for (const auto& rep : reports) {
    for (const auto& r : rep.trace.records) {
      os << rep.run_id << ',' << rep.solver << ',' << rep.n << ',' << r.k << ',' << r.phase << ','
         << r.queries_cumulative << ',' << format_double(r.f_center) << ','
         << format_double(r.f_center - rep.trace.optimum_value) << ',' << format_double(r.log_volume) << ','
         << optional_field(r.cone_angle) << ',' << optional_field(r.instantaneous_regret) << ','
         << optional_field(r.cumulative_regret) << '\n';
    }
  }
  return os.str();
}

std::string to_json(const std::vector<RunReport>& reports) {
  // Numbers are emitted through format_double so both formats share digits.
  std::ostringstream os;
  os << '[';
  bool first = true;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("null"); };
  for (const auto& rep : reports) {
    for (const auto& r : rep.trace.records) {
      os << (first ? "\n" : ",\n");
      first = false;
      os << "{\"run_id\":" << json(rep.run_id).dump() << ",\"solver\":" << json(rep.solver).dump()
         << ",\"n\":" << rep.n << ",\"k\":" << r.k << ",\"phase\":" << json(r.phase).dump()
         << ",\"queries_cumulative\":" << r.queries_cumulative << ",\"f_center\":" << format_double(r.f_center)
         << ",\"suboptimality\":" << format_double(r.f_center - rep.trace.optimum_value)
         << ",\"log_volume\":" << format_double(r.log_volume) << ",\"cone_angle\":" << opt(r.cone_angle)
         << ",\"instantaneous_regret\":" << opt(r.instantaneous_regret)
         << ",\"cumulative_regret\":" << opt(r.cumulative_regret) << '}';
    }
  }
  os << (first ? "]\n" : "\n]\n");
  return os.str();
}

std::string render(const std::vector<RunReport>& reports, const std::string& format) {
  if (format == "json") return to_json(reports);
  if (format == "csv") return to_csv(reports);
  throw ConfigError("format", "expected csv or json");
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

SweepGrid sweep_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "sweep config must be a JSON object");
  SweepGrid g;
  if (j.contains("problems")) g.problems = json_list<std::string>(j["problems"], "problems");
  if (j.contains("solvers")) g.solvers = json_list<std::string>(j["solvers"], "solvers");
  if (j.contains("n")) g.dims = json_list<int>(j["n"], "n");
  if (j.contains("eps")) g.eps = json_list<double>(j["eps"], "eps");
  if (j.contains("T")) g.horizons = json_list<long long>(j["T"], "T");
  if (j.contains("delta")) g.delta = j["delta"].get<double>();
  if (j.contains("sigma")) g.sigma = j["sigma"].get<double>();
  if (j.contains("seeds")) g.seeds = json_list<std::uint64_t>(j["seeds"], "seeds");
  if (j.contains("max_queries")) g.max_queries = j["max_queries"].get<long long>();
  return g;
}

std::vector<ExperimentConfig> expand(const SweepGrid& grid) {
  std::vector<ExperimentConfig> out;
  for (const auto& problem : grid.problems) {
    for (const auto& solver : grid.solvers) {
      for (const int n : grid.dims) {
        const std::size_t params = is_regret(solver) ? grid.horizons.size() : grid.eps.size();
        for (std::size_t p = 0; p < params; ++p) {
          for (const auto seed : grid.seeds) {
            ExperimentConfig cfg;
            cfg.problem = json{{"kind", problem}, {"n", n}};
            cfg.solver = solver;
            if (is_regret(solver)) {
              cfg.horizon = grid.horizons[p];
            } else {
              cfg.eps = grid.eps[p];
            }
            cfg.delta = grid.delta;
            cfg.sigma = grid.sigma;
            cfg.seeds = {seed};
            cfg.max_queries = grid.max_queries;
            validate(cfg);
            out.push_back(std::move(cfg));
          }
        }
      }
    }
  }
  return out;
}

SweepResult sweep(const SweepGrid& grid, int jobs, const std::string& cell_dir, const std::string& format) {
  const std::vector<ExperimentConfig> configs = expand(grid);
  std::vector<std::optional<RunReport>> slots(configs.size());
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        RunReport rep = run_one(configs[i], configs[i].seeds.front());
        if (!cell_dir.empty()) {
          write_atomic((std::filesystem::path(cell_dir) / (rep.run_id + "." + format)).string(),
                       render({rep}, format));
        }
        slots[i] = std::move(rep);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult res;
  res.all_ok = true;
  std::size_t i = 0;
  while (i < configs.size()) {
    const ExperimentConfig& head = configs[i];
    const std::string kind = head.problem["kind"].get<std::string>();
    const int n = head.problem["n"].get<int>();
    const std::string label = parameter_label(head);
    SweepCell cell;
    cell.problem = kind;
    cell.solver = head.solver;
    cell.n = n;
    cell.parameter = label;
    std::vector<double> queries;
    std::vector<double> subopt;
    std::vector<double> regret;
    bool failed_run = false;
    for (; i < configs.size(); ++i) {
      const ExperimentConfig& c = configs[i];
      if (c.problem["kind"].get<std::string>() != kind || c.solver != head.solver ||
          c.problem["n"].get<int>() != n || parameter_label(c) != label) {
        break;
      }
      ++cell.runs;
      if (!slots[i]) {
        failed_run = true;
        res.errors.push_back(errors[i]);
        continue;
      }
      const RunReport& rep = *slots[i];
      if (rep.bound_satisfied) ++cell.passed;
      queries.push_back(static_cast<double>(rep.total_queries));
      subopt.push_back(rep.suboptimality);
      regret.push_back(rep.cumulative_regret);
      res.reports.push_back(rep);
    }
    cell.median_queries = median(queries);
    cell.median_suboptimality = median(subopt);
    cell.median_regret = median(regret);
    if (is_regret(cell.solver)) {
      cell.ok = !failed_run && cell.passed >= static_cast<int>(std::ceil((1.0 - grid.delta) * cell.runs - 1e-9));
    } else {
      cell.ok = !failed_run && cell.passed == cell.runs;
    }
    res.all_ok = res.all_ok && cell.ok;
    res.cells.push_back(cell);
  }
  return res;
}

std::string summary_table(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "problem,solver,n,parameter,runs,passed,median_queries,median_suboptimality,median_regret,ok\n";
  for (const auto& c : cells) {
    os << c.problem << ',' << c.solver << ',' << c.n << ',' << c.parameter << ',' << c.runs << ',' << c.passed
       << ',' << format_double(c.median_queries) << ',' << format_double(c.median_suboptimality) << ','
       << format_double(c.median_regret) << ',' << (c.ok ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace subzero::bench
