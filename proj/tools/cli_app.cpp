#include "cli_app.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spde/estimators.hpp"
#include "spde/fisher.hpp"
#include "spde/mc.hpp"
#include "spde/model.hpp"
#include "spde/series.hpp"
#include "spde/simulate.hpp"
#include "spde/stats.hpp"

namespace spde::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
    if (in.eof()) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const json& options, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["schema"] = 1;
  m["artifact_version"] = kVersion;
  m["command"] = command;
  m["options"] = options;
  m["timestamp"] = iso_timestamp();
  json in_d = json::object(), out_d = json::object();
  for (const auto& p : inputs) in_d[p] = fnv1a_digest(p);
  for (const auto& p : outputs) out_d[p] = fnv1a_digest(p);
  m["inputs"] = in_d;
  m["outputs"] = out_d;
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot write manifest " + out_path);
  f << m.dump(2) << "\n";
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell == "inf") out.push_back(series::kInf);
    else out.push_back(std::stod(cell));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

/// "lo..hi,lo..hi,lo..hi" for (sigma2, theta2, kappa)
est::BoxH parse_box(const std::string& s) {
  est::BoxH box;
  std::stringstream ss(s);
  std::string cell;
  int c = 0;
  while (std::getline(ss, cell, ',') && c < 3) {
    const auto dots = cell.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("box component must look like lo..hi: " + cell);
    box.lo[c] = std::stod(cell.substr(0, dots));
    box.hi[c] = std::stod(cell.substr(dots + 2));
    ++c;
  }
  if (c != 3) throw std::invalid_argument("box needs three lo..hi ranges");
  box.validate();
  return box;
}

std::map<std::string, double> parse_known(const std::string& s) {
  std::map<std::string, double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto eq = cell.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("known parameter must look like name=value: " + cell);
    out[cell.substr(0, eq)] = std::stod(cell.substr(eq + 1));
  }
  return out;
}

double known_or_throw(const std::map<std::string, double>& known, const std::string& key) {
  const auto it = known.find(key);
  if (it == known.end())
    throw std::invalid_argument("method requires --known " + key + "=<value>");
  return it->second;
}

json result_to_json(const est::EstimateResult& res) {
  json j;
  j["schema"] = 1;
  j["method"] = res.method;
  j["estimate"] = res.estimate;
  json se = json::array();
  for (double v : res.se) se.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  j["se"] = se;
  j["converged"] = res.converged;
  j["diagnostics"] = res.diagnostics;
  return j;
}

/// Config-file lookup: section key first, then top level.
class ConfigDoc {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    in >> doc_;
  }
  template <typename T>
  void apply(const std::string& section, const std::string& key, T& value) const {
    if (doc_.is_null()) return;
    if (doc_.contains(section) && doc_[section].contains(key))
      value = doc_[section][key].get<T>();
    else if (doc_.contains(key))
      value = doc_[key].get<T>();
  }

 private:
  json doc_;
};

struct SimulateOpts {
  int N = 16, M = 16, K = 0;
  double T = 1.0, b = 0.1;
  double sigma2 = 1.0, theta2 = 1.0, theta1 = 0.0, theta0 = 0.0;
  std::uint64_t seed = 1;
  std::string scheme = "spectral";
  std::string output;

  json to_json() const {
    return {{"N", N}, {"M", M}, {"K", K}, {"T", T}, {"b", b},
            {"sigma2", sigma2}, {"theta2", theta2}, {"theta1", theta1},
            {"theta0", theta0}, {"seed", seed}, {"scheme", scheme}, {"output", output}};
  }
};

int cmd_simulate(const SimulateOpts& o) {
  if (o.output.empty()) throw std::invalid_argument("simulate requires -o <output>");
  const model::Params p{o.sigma2, o.theta2, o.theta1, o.theta0};
  const model::GridSpec g(o.N, o.M, o.T, o.b);
  sim::SimConfig sc;
  sc.K = o.K;
  sc.seed = o.seed;
  Field f;
  if (o.scheme == "spectral") {
    sc.scheme = sim::SimConfig::Scheme::spectral;
    f = sim::simulate_spectral(p, g, sc);
  } else if (o.scheme == "exact") {
    sc.scheme = sim::SimConfig::Scheme::exact;
    f = sim::simulate_exact(p, g, sc);
  } else {
    throw std::invalid_argument("scheme must be spectral or exact");
  }
  write_field(f, o.output);
  json opts = o.to_json();
  opts["K_effective"] = f.K;
  write_manifest(o.output + ".manifest.json", "simulate", opts, {}, {o.output});
  std::printf("wrote %s (N=%d M=%d K=%d seed=%llu)\n", o.output.c_str(), o.N, o.M, f.K,
              static_cast<unsigned long long>(o.seed));
  return 0;
}

struct QvOpts {
  std::string input, output;
  double theta2 = 0.0;  // required
  double kappa = 0.0;
};

int cmd_qv(const QvOpts& o) {
  if (!(o.theta2 > 0.0))
    throw std::invalid_argument("qv requires --theta2 > 0 for the space-time normalizer");
  const Field f = read_field(o.input);
  json j;
  j["schema"] = 1;
  j["grid"] = {{"N", f.grid.N}, {"M", f.grid.M}, {"T", f.grid.T}, {"b", f.grid.b},
               {"r", f.grid.ratio()}};
  const auto put = [&](const char* key, stats::QvKind kind, std::optional<double> t2) {
    const stats::QvStatistic s = stats::realized_qv(f, kind, o.kappa, t2);
    j[key] = s.value;
    j["normalizations"][key] = s.normalization;
  };
  put("vt", stats::QvKind::vt, std::nullopt);
  put("vsp", stats::QvKind::vsp, std::nullopt);
  put("vdouble", stats::QvKind::vdouble, o.theta2);
  put("vr", stats::QvKind::vr, std::nullopt);
  const std::string text = j.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.output);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + o.output);
    write_manifest(o.output + ".manifest.json", "qv",
                   {{"input", o.input}, {"theta2", o.theta2}, {"kappa", o.kappa}},
                   {o.input}, {o.output});
  }
  return 0;
}

struct EstimateOpts {
  std::string method, input, output;
  std::string known, box = "1e-4..10,1e-3..20,-10..10";
  double ridge = -1.0;
  int v = 0, w = 0;
};

int cmd_estimate(const EstimateOpts& o) {
  const est::Method m = est::parse_method(o.method);
  const Field f = read_field(o.input);
  const auto known = parse_known(o.known);
  const est::BoxH box = parse_box(o.box);
  est::EstimateResult res;
  switch (m) {
    case est::Method::sigma2_sp:
      res = est::estimate_sigma2(f, "sp", known_or_throw(known, "theta2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::sigma2_t:
      res = est::estimate_sigma2(f, "t", known_or_throw(known, "theta2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::sigma2_double:
      res = est::estimate_sigma2(f, "double", known_or_throw(known, "theta2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::theta2_sp:
      res = est::estimate_theta2(f, "sp", known_or_throw(known, "sigma2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::theta2_t:
      res = est::estimate_theta2(f, "t", known_or_throw(known, "sigma2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::theta2_r:
      res = est::estimate_theta2(f, "r", known_or_throw(known, "sigma2"),
                                 known_or_throw(known, "kappa"));
      break;
    case est::Method::rho_kappa:
      res = est::estimate_rho_kappa(f);
      break;
    case est::Method::eta_ls:
      res = est::estimate_eta_ls(f, box, o.ridge);
      break;
    case est::Method::eta_avg: {
      std::optional<int> v = o.v > 0 ? std::optional<int>(o.v) : std::nullopt;
      std::optional<int> w = o.w > 0 ? std::optional<int>(o.w) : std::nullopt;
      res = est::estimate_eta_avg(f, box, o.ridge, v, w);
      break;
    }
  }
  json j = result_to_json(res);
  const std::string text = j.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.output);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + o.output);
    write_manifest(o.output + ".manifest.json", "estimate",
                   {{"method", o.method}, {"input", o.input}, {"known", o.known},
                    {"box", o.box}, {"ridge", o.ridge}},
                   {o.input}, {o.output});
  }
  return 0;
}

struct McOpts {
  std::string grids = "256x16";  // NxM pairs, comma separated
  double T = 1.0, b = 0.1;
  double sigma2 = 0.1, theta2 = 0.5, theta1 = -0.4, theta0 = 0.3;
  int K = 0, reps = 100, threads = 0;
  std::string methods = "sigma2-double";
  std::uint64_t seed = 1;
  std::string box = "1e-4..10,1e-3..20,-10..10";
  double ridge_ls = -1.0, ridge_avg = -1.0;
  std::string output_prefix;

  json to_json() const {
    return {{"grids", grids}, {"T", T}, {"b", b}, {"sigma2", sigma2},
            {"theta2", theta2}, {"theta1", theta1}, {"theta0", theta0},
            {"K", K}, {"reps", reps}, {"threads", threads}, {"methods", methods},
            {"seed", seed}, {"box", box}, {"ridge_ls", ridge_ls},
            {"ridge_avg", ridge_avg}, {"output_prefix", output_prefix}};
  }
};

int cmd_mc(const McOpts& o) {
  if (o.output_prefix.empty()) throw std::invalid_argument("mc requires -o <output prefix>");
  mc::StudyConfig c;
  c.params = {o.sigma2, o.theta2, o.theta1, o.theta0};
  {
    std::stringstream ss(o.grids);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto x = cell.find('x');
      if (x == std::string::npos)
        throw std::invalid_argument("grid must look like NxM: " + cell);
      mc::StudyGrid g;
      g.N = std::stoi(cell.substr(0, x));
      g.M = std::stoi(cell.substr(x + 1));
      g.T = o.T;
      g.b = o.b;
      c.grids.push_back(g);
    }
  }
  c.K = o.K;
  c.reps = o.reps;
  c.threads = o.threads;
  c.master_seed = o.seed;
  c.box = parse_box(o.box);
  c.ridge_ls = o.ridge_ls;
  c.ridge_avg = o.ridge_avg;
  {
    std::stringstream ss(o.methods);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.methods.push_back(cell);
  }
  const auto records = mc::run_study(c);
  const auto summary = mc::summarize(records, c);
  const std::string rec_path = o.output_prefix + "records.csv";
  const std::string sum_path = o.output_prefix + "summary.json";
  mc::write_records_csv(records, rec_path);
  mc::write_summary_json(summary, sum_path);
  write_manifest(o.output_prefix + "manifest.json", "mc", o.to_json(), {},
                 {rec_path, sum_path});
  std::printf("wrote %s and %s (%zu records)\n", rec_path.c_str(), sum_path.c_str(),
              records.size());
  for (const auto& row : summary)
    if (row.component == 0)
      std::printf("  grid %d %-14s n=%d bias=%+.3e var=%.3e z_mean=%+.2f var_norm=%.3f\n",
                  row.grid_id, row.method.c_str(), row.n, row.bias, row.variance,
                  row.z_mean, row.var_norm);
  return 0;
}

struct ConstantsOpts {
  bool print_b = false;
  std::string c_list, psi_r, psi_theta2;
  std::string output;
};

int cmd_constants(const ConstantsOpts& o) {
  std::ostringstream out;
  out << "quantity,arg1,arg2,value,tail\n";
  char buf[160];
  const bool defaults = !o.print_b && o.c_list.empty() && o.psi_r.empty();
  if (o.print_b || defaults) {
    const auto b = series::b_constant();
    std::snprintf(buf, sizeof buf, "B,,,%.12g,%.3g\n", b.value, b.tail);
    out << buf;
  }
  {
    const std::string list = !o.c_list.empty() ? o.c_list : (defaults ? "0,0.1,1,10,inf" : "");
    if (!list.empty())
      for (double h : parse_list(list)) {
        const auto c = series::c_of_h(h);
        std::snprintf(buf, sizeof buf, "C,%g,,%.12g,%.3g\n", h, c.value, c.tail);
        out << buf;
      }
  }
  if (!o.psi_r.empty()) {
    const auto rs = parse_list(o.psi_r);
    const auto t2s = parse_list(o.psi_theta2.empty() ? "0.5" : o.psi_theta2);
    for (double t2 : t2s)
      for (double r : rs) {
        std::snprintf(buf, sizeof buf, "psi,%g,%g,%.12g,0\n", r, t2, series::psi(r, t2));
        out << buf;
      }
  }
  if (o.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(o.output);
    f << out.str();
    if (!f) throw std::runtime_error("write failed: " + o.output);
  }
  return 0;
}

struct RatesOpts {
  std::string m_list = "8,16,32", n_list = "64,256,1024";
  double sigma2 = 1.0, rho2 = 1.0;
  std::string format = "csv";
  std::string output;
};

int cmd_rates(const RatesOpts& o) {
  const auto ms = parse_int_list(o.m_list);
  const auto ns = parse_int_list(o.n_list);
  std::ostringstream out;
  const bool md = o.format == "md";
  if (md) {
    out << "| M | N | rate | J_sigma2 | J_rho2 |\n|---|---|------|----------|--------|\n";
  } else {
    out << "M,N,rate,J_sigma2,J_rho2\n";
  }
  char buf[160];
  for (int M : ms)
    for (int N : ns) {
      const double r = fisher::minimax_rate(M, N);
      const auto j = fisher::spectral_fisher_diag(N, M, o.sigma2, o.rho2);
      if (md)
        std::snprintf(buf, sizeof buf, "| %d | %d | %.6g | %.6g | %.6g |\n", M, N, r,
                      j.j_sigma2, j.j_rho2);
      else
        std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%.6g,%.6g\n", M, N, r, j.j_sigma2,
                      j.j_rho2);
      out << buf;
    }
  if (o.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(o.output);
    f << out.str();
    if (!f) throw std::runtime_error("write failed: " + o.output);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"1-D parabolic SPDE simulation, realized-variation statistics and estimators"};
  app.require_subcommand(1);

  // Config document applies before flag parsing; flags then override.
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  ConfigDoc config;
  if (!config_path.empty()) {
    try {
      config.load(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  app.add_option("--config", config_path, "JSON config file (flags override its values)");

  SimulateOpts so;
  config.apply("simulate", "N", so.N);
  config.apply("simulate", "M", so.M);
  config.apply("simulate", "K", so.K);
  config.apply("simulate", "T", so.T);
  config.apply("simulate", "b", so.b);
  config.apply("simulate", "sigma2", so.sigma2);
  config.apply("simulate", "theta2", so.theta2);
  config.apply("simulate", "theta1", so.theta1);
  config.apply("simulate", "theta0", so.theta0);
  config.apply("simulate", "seed", so.seed);
  config.apply("simulate", "scheme", so.scheme);
  config.apply("simulate", "output", so.output);
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a solution field on a grid");
  sim_cmd->add_option("--N", so.N, "temporal intervals");
  sim_cmd->add_option("--M", so.M, "spatial intervals");
  sim_cmd->add_option("--T", so.T, "time horizon (time units)");
  sim_cmd->add_option("--b", so.b, "spatial margin in [0, 1/2) (domain units)");
  sim_cmd->add_option("--sigma2", so.sigma2, "volatility sigma^2 (> 0)");
  sim_cmd->add_option("--theta2", so.theta2, "diffusivity (> 0)");
  sim_cmd->add_option("--theta1", so.theta1, "advection coefficient");
  sim_cmd->add_option("--theta0", so.theta0, "reaction coefficient");
  sim_cmd->add_option("--K", so.K, "spectral cutoff (0 = auto max(4M, 1000))");
  sim_cmd->add_option("--seed", so.seed, "64-bit RNG seed");
  sim_cmd->add_option("--scheme", so.scheme, "spectral | exact");
  sim_cmd->add_option("-o,--output", so.output, "output field file (.csv or binary)");

  QvOpts qo;
  config.apply("qv", "input", qo.input);
  config.apply("qv", "theta2", qo.theta2);
  config.apply("qv", "kappa", qo.kappa);
  auto* qv_cmd = app.add_subcommand("qv", "realized quadratic variations of a field file");
  qv_cmd->add_option("-i,--input", qo.input, "field file")->required();
  qv_cmd->add_option("--theta2", qo.theta2, "diffusivity used by the space-time normalizer");
  qv_cmd->add_option("--kappa", qo.kappa, "advection/diffusivity ratio used in the weights");
  qv_cmd->add_option("-o,--output", qo.output, "output JSON (default stdout)");

  EstimateOpts eo;
  config.apply("estimate", "method", eo.method);
  config.apply("estimate", "known", eo.known);
  config.apply("estimate", "box", eo.box);
  config.apply("estimate", "ridge", eo.ridge);
  auto* est_cmd = app.add_subcommand("estimate", "run one estimator on a field file");
  est_cmd->add_option("--method", eo.method,
                      "sigma2-sp|sigma2-t|sigma2-double|theta2-sp|theta2-t|theta2-r|"
                      "rho-kappa|eta-ls|eta-avg")
      ->required();
  est_cmd->add_option("-i,--input", eo.input, "field file")->required();
  est_cmd->add_option("--known", eo.known, "known parameters, e.g. sigma2=0.1,kappa=-0.8");
  est_cmd->add_option("--box", eo.box,
                      "search box lo..hi,lo..hi,lo..hi for (sigma2, theta2, kappa)");
  est_cmd->add_option("--ridge", eo.ridge, "ridge penalty (< 0 = default)");
  est_cmd->add_option("--v", eo.v, "coarse time lag for eta-avg (0 = auto)");
  est_cmd->add_option("--w", eo.w, "coarse space lag for eta-avg (0 = auto)");
  est_cmd->add_option("-o,--output", eo.output, "output JSON (default stdout)");

  McOpts mo;
  config.apply("mc", "grids", mo.grids);
  config.apply("mc", "T", mo.T);
  config.apply("mc", "b", mo.b);
  config.apply("mc", "sigma2", mo.sigma2);
  config.apply("mc", "theta2", mo.theta2);
  config.apply("mc", "theta1", mo.theta1);
  config.apply("mc", "theta0", mo.theta0);
  config.apply("mc", "K", mo.K);
  config.apply("mc", "reps", mo.reps);
  config.apply("mc", "threads", mo.threads);
  config.apply("mc", "methods", mo.methods);
  config.apply("mc", "seed", mo.seed);
  config.apply("mc", "box", mo.box);
  config.apply("mc", "ridge_ls", mo.ridge_ls);
  config.apply("mc", "ridge_avg", mo.ridge_avg);
  config.apply("mc", "output_prefix", mo.output_prefix);
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo replication study");
  mc_cmd->add_option("--grids", mo.grids, "comma-separated NxM grids, e.g. 625x10,625x25");
  mc_cmd->add_option("--T", mo.T, "time horizon of every grid");
  mc_cmd->add_option("--b", mo.b, "spatial margin of every grid");
  mc_cmd->add_option("--sigma2", mo.sigma2, "true volatility");
  mc_cmd->add_option("--theta2", mo.theta2, "true diffusivity");
  mc_cmd->add_option("--theta1", mo.theta1, "true advection");
  mc_cmd->add_option("--theta0", mo.theta0, "true reaction");
  mc_cmd->add_option("--K", mo.K, "spectral cutoff (0 = auto)");
  mc_cmd->add_option("--reps", mo.reps, "replications per grid");
  mc_cmd->add_option("--threads", mo.threads, "worker threads (0 = hardware)");
  mc_cmd->add_option("--methods", mo.methods, "comma-separated estimator tags");
  mc_cmd->add_option("--seed", mo.seed, "master seed");
  mc_cmd->add_option("--box", mo.box, "eta search box");
  mc_cmd->add_option("--ridge-ls", mo.ridge_ls, "ridge for eta-ls (< 0 = default)");
  mc_cmd->add_option("--ridge-avg", mo.ridge_avg, "ridge for eta-avg (< 0 = default)");
  mc_cmd->add_option("-o,--output-prefix", mo.output_prefix, "output path prefix");

  ConstantsOpts co;
  auto* const_cmd = app.add_subcommand("constants", "asymptotic constants as CSV");
  const_cmd->add_flag("--B", co.print_b, "print the time-increment variance constant B");
  const_cmd->add_option("--C-list", co.c_list, "comma list of h for C(h); inf allowed");
  const_cmd->add_option("--psi-r", co.psi_r, "comma list of mesh ratios r for psi");
  const_cmd->add_option("--psi-theta2", co.psi_theta2, "comma list of theta2 for psi");
  const_cmd->add_option("-o,--output", co.output, "output CSV (default stdout)");

  RatesOpts ro;
  auto* rates_cmd = app.add_subcommand("rates", "minimax rates and Fisher diagonals");
  rates_cmd->add_option("--M-list", ro.m_list, "comma list of M");
  rates_cmd->add_option("--N-list", ro.n_list, "comma list of N");
  rates_cmd->add_option("--sigma2", ro.sigma2, "volatility for the Fisher diagonals");
  rates_cmd->add_option("--rho2", ro.rho2, "rho^2 = sigma^2/theta2 for the Fisher diagonals");
  rates_cmd->add_option("--format", ro.format, "csv | md");
  rates_cmd->add_option("-o,--output", ro.output, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(so);
    if (qv_cmd->parsed()) return cmd_qv(qo);
    if (est_cmd->parsed()) return cmd_estimate(eo);
    if (mc_cmd->parsed()) return cmd_mc(mo);
    if (const_cmd->parsed()) return cmd_constants(co);
    if (rates_cmd->parsed()) return cmd_rates(ro);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spde::cli
