#include "spde/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "spde/rng.hpp"

namespace spde::mc {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Replication seeds derive from what the grid is, not where it sits in the
/// config, so removing grids never reshuffles the remaining records.
std::uint64_t grid_key(const StudyGrid& g) {
  std::uint64_t k = rng::derive_seed(static_cast<std::uint64_t>(g.N),
                                     static_cast<std::uint64_t>(g.M));
  std::uint64_t t_bits, b_bits;
  std::memcpy(&t_bits, &g.T, 8);
  std::memcpy(&b_bits, &g.b, 8);
  return rng::derive_seed(k, t_bits, b_bits);
}
}  // namespace

void StudyConfig::validate() const {
  if (reps < 2) throw std::invalid_argument("study needs reps >= 2");
  if (grids.empty()) throw std::invalid_argument("study needs at least one grid");
  if (methods.empty()) throw std::invalid_argument("study needs at least one method");
  model::derive(params);
  for (const auto& m : methods) est::parse_method(m);
  box.validate();
}

std::vector<double> method_truth(const std::string& method, const model::Params& p) {
  const model::DerivedParams d = model::derive(p);
  switch (est::parse_method(method)) {
    case est::Method::sigma2_sp:
    case est::Method::sigma2_t:
    case est::Method::sigma2_double: return {p.sigma2};
    case est::Method::theta2_sp:
    case est::Method::theta2_t:
    case est::Method::theta2_r: return {p.theta2};
    case est::Method::rho_kappa: return {p.sigma2 / p.theta2, d.kappa};
    case est::Method::eta_ls:
    case est::Method::eta_avg: return {p.sigma2, p.theta2, d.kappa};
  }
  return {};
}

namespace {

struct MethodMeta {
  std::string tag;
  est::Method method;
  std::vector<double> truth;
  std::vector<double> avar;  ///< asymptotic variance per component (may be NaN)
  double rate = 0.0;         ///< normalization rate factor
};

std::vector<MethodMeta> grid_metadata(const StudyConfig& c, const StudyGrid& g) {
  const model::GridSpec grid(g.N, g.M, g.T, g.b);
  const model::DerivedParams d = model::derive(c.params);
  const double r = grid.ratio();
  std::vector<MethodMeta> metas;
  for (const auto& tag : c.methods) {
    MethodMeta meta;
    meta.tag = tag;
    meta.method = est::parse_method(tag);
    meta.truth = method_truth(tag, c.params);
    meta.rate = std::sqrt(static_cast<double>(g.M) * g.N);
    switch (meta.method) {
      case est::Method::rho_kappa:
        meta.avar = {kNan, kNan};
        break;
      case est::Method::eta_ls: {
        const auto ls = est::ls_covariance(c.params, r, g.b);
        meta.avar = {ls.omega[0][0], ls.omega[1][1], ls.omega[2][2]};
        break;
      }
      case est::Method::eta_avg: {
        const double n = g.N, m = g.M;
        const int v = std::max(1, static_cast<int>(std::floor(std::max(1.0, n / (4.0 * m * m)) + 0.5)));
        const int w = std::max(1, static_cast<int>(std::floor(std::max(1.0, m / std::sqrt(n)) + 0.5)));
        const double r_eff = w * grid.dx() / std::sqrt(v * grid.dt());
        const auto ls = est::ls_covariance(c.params, r_eff, g.b);
        meta.avar = {ls.omega[0][0], ls.omega[1][1], ls.omega[2][2]};
        meta.rate = std::sqrt(std::min(m * m * m, std::pow(n, 1.5)));
        break;
      }
      default:
        meta.avar = {est::asymptotic_variance_scalar(meta.method, c.params, r)};
        break;
    }
    metas.push_back(std::move(meta));
  }
  (void)d;
  return metas;
}

est::EstimateResult apply_method(const Field& f, est::Method m, const StudyConfig& c) {
  const model::DerivedParams d = model::derive(c.params);
  switch (m) {
    case est::Method::sigma2_sp: return est::estimate_sigma2(f, "sp", c.params.theta2, d.kappa);
    case est::Method::sigma2_t: return est::estimate_sigma2(f, "t", c.params.theta2, d.kappa);
    case est::Method::sigma2_double:
      return est::estimate_sigma2(f, "double", c.params.theta2, d.kappa);
    case est::Method::theta2_sp: return est::estimate_theta2(f, "sp", c.params.sigma2, d.kappa);
    case est::Method::theta2_t: return est::estimate_theta2(f, "t", c.params.sigma2, d.kappa);
    case est::Method::theta2_r: return est::estimate_theta2(f, "r", c.params.sigma2, d.kappa);
    case est::Method::rho_kappa: return est::estimate_rho_kappa(f);
    case est::Method::eta_ls: return est::estimate_eta_ls(f, c.box, c.ridge_ls);
    case est::Method::eta_avg: return est::estimate_eta_avg(f, c.box, c.ridge_avg);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<StudyRecord> run_study(const StudyConfig& c) {
  c.validate();
  const std::size_t n_grids = c.grids.size();
  std::vector<std::vector<MethodMeta>> metas(n_grids);
  for (std::size_t g = 0; g < n_grids; ++g) metas[g] = grid_metadata(c, c.grids[g]);

  std::vector<std::unique_ptr<sim::ExactFieldSampler>> samplers(n_grids);
  if (c.scheme == StudyConfig::Scheme::exact)
    for (std::size_t g = 0; g < n_grids; ++g) {
      const StudyGrid& sg = c.grids[g];
      samplers[g] = std::make_unique<sim::ExactFieldSampler>(
          c.params, model::GridSpec(sg.N, sg.M, sg.T, sg.b), c.max_exact_points);
    }

  const std::size_t n_tasks = n_grids * static_cast<std::size_t>(c.reps);
  std::vector<std::vector<StudyRecord>> slots(n_tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t gi = task / c.reps;
      const int rep = static_cast<int>(task % c.reps);
      const StudyGrid& sg = c.grids[gi];
      const model::GridSpec grid(sg.N, sg.M, sg.T, sg.b);
      const std::uint64_t seed =
          rng::derive_seed(c.master_seed, grid_key(sg), static_cast<std::uint64_t>(rep));
      Field field;
      if (c.scheme == StudyConfig::Scheme::exact) {
        field = samplers[gi]->draw(seed);
      } else {
        sim::SimConfig sc;
        sc.K = c.K;
        sc.seed = seed;
        field = sim::simulate_spectral(c.params, grid, sc);
      }

      std::vector<StudyRecord>& out = slots[task];
      for (const MethodMeta& meta : metas[gi]) {
        StudyRecord rec;
        rec.grid_id = static_cast<int>(gi);
        rec.N = sg.N;
        rec.M = sg.M;
        rec.K = field.K;
        rec.method = meta.tag;
        rec.rep = rep;
        rec.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const est::EstimateResult res = apply_method(field, meta.method, c);
          rec.estimate = res.estimate;
          rec.converged = res.converged;
          rec.norm_err.resize(res.estimate.size(), kNan);
          for (std::size_t comp = 0; comp < res.estimate.size(); ++comp) {
            const double av = meta.avar[comp];
            if (std::isfinite(av) && av > 0.0)
              rec.norm_err[comp] =
                  meta.rate * (res.estimate[comp] - meta.truth[comp]) / std::sqrt(av);
          }
        } catch (const std::exception&) {
          rec.converged = false;
          rec.estimate.assign(meta.truth.size(), kNan);
          rec.norm_err.clear();
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        out.push_back(std::move(rec));
      }
    }
  };

  int n_threads = c.threads > 0 ? c.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<StudyRecord> records;
  records.reserve(n_tasks * c.methods.size());
  for (auto& slot : slots)
    for (auto& rec : slot) records.push_back(std::move(rec));
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<StudyRecord>& records,
                                  const StudyConfig& c) {
  if (records.empty()) throw std::invalid_argument("summarize needs records");
  std::vector<SummaryRow> rows;
  for (std::size_t gi = 0; gi < c.grids.size(); ++gi) {
    for (const auto& tag : c.methods) {
      const std::vector<double> truth = method_truth(tag, c.params);
      for (std::size_t comp = 0; comp < truth.size(); ++comp) {
        SummaryRow row;
        row.grid_id = static_cast<int>(gi);
        row.method = tag;
        row.component = static_cast<int>(comp);
        row.truth = truth[comp];
        // accumulate in replication order so the summary is exactly
        // independent of how the records were stored
        std::vector<std::pair<int, const StudyRecord*>> sel;
        int failures = 0;
        for (const auto& rec : records) {
          if (rec.grid_id != static_cast<int>(gi) || rec.method != tag) continue;
          if (!rec.converged || comp >= rec.estimate.size() ||
              !std::isfinite(rec.estimate[comp])) {
            if (comp == 0) ++failures;
            continue;
          }
          sel.emplace_back(rec.rep, &rec);
        }
        std::sort(sel.begin(), sel.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double s = 0.0, s2 = 0.0, sn = 0.0, sn2 = 0.0;
        int n = 0, nn = 0;
        for (const auto& [rep, rec] : sel) {
          const double e = rec->estimate[comp];
          s += e;
          s2 += e * e;
          ++n;
          if (comp < rec->norm_err.size() && std::isfinite(rec->norm_err[comp])) {
            sn += rec->norm_err[comp];
            sn2 += rec->norm_err[comp] * rec->norm_err[comp];
            ++nn;
          }
        }
        row.n = n;
        row.failures = failures;
        if (n > 0) {
          row.mean = s / n;
          row.bias = row.mean - row.truth;
          row.variance = n > 1 ? (s2 - s * s / n) / (n - 1) : 0.0;
          row.mse = s2 / n - 2.0 * row.truth * row.mean + row.truth * row.truth;
        }
        if (nn > 1) {
          const double mean_n = sn / nn;
          row.norm_mse = sn2 / nn;
          row.z_mean = std::sqrt(static_cast<double>(nn)) * mean_n;
          row.var_norm = (sn2 - sn * sn / nn) / (nn - 1);
          row.z_var = (row.var_norm - 1.0) / std::sqrt(2.0 / (nn - 1));
        } else {
          row.norm_mse = row.z_mean = row.var_norm = row.z_var = kNan;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_records_csv(const std::vector<StudyRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "schema=1\n";
  out << "grid_id,N,M,K,method,rep,seed,estimate1,estimate2,estimate3,"
         "norm_err1,norm_err2,norm_err3,converged,wall_ms\n";
  char buf[32];
  auto cell = [&](double v) -> std::string {
    if (!std::isfinite(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const auto& r : records) {
    out << r.grid_id << ',' << r.N << ',' << r.M << ',' << r.K << ',' << r.method << ','
        << r.rep << ',' << r.seed;
    for (int c = 0; c < 3; ++c)
      out << ',' << (c < static_cast<int>(r.estimate.size()) ? cell(r.estimate[c]) : "");
    for (int c = 0; c < 3; ++c)
      out << ',' << (c < static_cast<int>(r.norm_err.size()) ? cell(r.norm_err[c]) : "");
    out << ',' << (r.converged ? 1 : 0) << ',' << cell(r.wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_json(const std::vector<SummaryRow>& rows, const std::string& path) {
  nlohmann::json doc;
  doc["schema"] = 1;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["grid_id"] = r.grid_id;
    j["method"] = r.method;
    j["component"] = r.component;
    j["n"] = r.n;
    j["failures"] = r.failures;
    j["truth"] = r.truth;
    j["mean"] = r.mean;
    j["bias"] = r.bias;
    j["variance"] = r.variance;
    j["mse"] = r.mse;
    auto put = [&](const char* key, double v) {
      if (std::isfinite(v)) j[key] = v; else j[key] = nullptr;
    };
    put("norm_mse", r.norm_mse);
    put("z_mean", r.z_mean);
    put("var_norm", r.var_norm);
    put("z_var", r.z_var);
    arr.push_back(std::move(j));
  }
  doc["rows"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace spde::mc
