#include "osgm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "json.hpp"

namespace osgm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_real(const std::string& tok, long line_no, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line_no,
                     std::string("malformed ") + what + " '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r'))
      ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r')
      ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

SparseDataset parse_libsvm(const std::string& text) {
  SparseDataset ds;
  long line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    ds.labels.push_back(parse_real(toks[0], line_no, "label"));
    std::vector<std::pair<int, double>> row;
    int prev = 0;
    for (size_t t = 1; t < toks.size(); ++t) {
      const std::string& tok = toks[t];
      const size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 >= tok.size())
        throw ParseError(line_no, "malformed feature pair '" + tok + "'");
      int idx = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || p != tok.data() + colon)
        throw ParseError(line_no, "malformed feature index '" + tok + "'");
      if (idx < 1)
        throw ParseError(line_no, "feature index must be >= 1");
      if (idx <= prev)
        throw ParseError(line_no, "feature indices must increase");
      prev = idx;
      row.emplace_back(idx,
                       parse_real(tok.substr(colon + 1), line_no, "value"));
      ds.n_features = std::max(ds.n_features, idx);
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::string serialize_libsvm(const SparseDataset& ds) {
  std::string out;
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    out += g17(ds.labels[i]);
    for (const auto& [idx, v] : ds.rows[i]) {
      out += ' ';
      out += std::to_string(idx);
      out += ':';
      out += g17(v);
    }
    out += '\n';
  }
  return out;
}

SpMat to_sparse_matrix(const SparseDataset& ds) {
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t i = 0; i < ds.rows.size(); ++i)
    for (const auto& [idx, v] : ds.rows[i])
      trips.emplace_back(static_cast<int>(i), idx - 1, v);
  SpMat A(static_cast<int>(ds.rows.size()), ds.n_features);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Vec binarized_labels(const SparseDataset& ds) {
  Vec y(static_cast<Eigen::Index>(ds.labels.size()));
  for (size_t i = 0; i < ds.labels.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = ds.labels[i] < 0 ? -1.0 : 1.0;
  return y;
}

SparseDataset generate_synthetic(const std::string& kind, int n, int m,
                                 double kappa, unsigned long long seed) {
  if (n < 1 || m < 1) throw InvalidParameter("need n >= 1 and m >= 1");
  Rng rng(seed);
  SparseDataset ds;
  ds.n_features = n;
  if (kind == "quadratic") {
    if (m < n) throw InvalidParameter("quadratic kind needs m >= n");
    if (!(kappa >= 1))
      throw InvalidParameter("condition target must be >= 1");
    Vec d(n);
    for (int i = 0; i < n; ++i)
      d[i] = n == 1 ? 1.0 : std::pow(kappa, static_cast<double>(i) / (n - 1));
    Mat G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ();
    Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (R(j, j) < 0) Q.col(j) *= -1;
    Mat Gs(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) Gs(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qs(Gs);
    Mat S = qs.householderQ() * Mat::Identity(m, n);
    Mat Rs = qs.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (Rs(j, j) < 0) S.col(j) *= -1;
    // spectrum(A'A) = d exactly, so the realized condition number is kappa
    Mat A = S * d.cwiseSqrt().asDiagonal() * Q.transpose();
    Vec xhat = rng.normal_vec(n);
    Vec y = A * xhat;
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(n);
      for (int j = 0; j < n; ++j) row.emplace_back(j + 1, A(i, j));
      ds.rows.push_back(std::move(row));
      ds.labels.push_back(y[i]);
    }
  } else if (kind == "logistic" || kind == "svm") {
    Vec wstar = rng.normal_vec(n);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      double margin = 0;
      for (int j = 0; j < n; ++j) {
        if (rng.uniform() < 0.5) continue;
        const double v = rng.normal();
        row.emplace_back(j + 1, v);
        margin += v * wstar[j];
      }
      double label = margin >= 0 ? 1.0 : -1.0;
      if (rng.uniform() < 0.1) label = -label;
      ds.rows.push_back(std::move(row));
      ds.labels.push_back(label);
    }
  } else if (kind == "lasso") {
    Mat A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        A(i, j) = rng.normal() / std::sqrt(static_cast<double>(m));
    Vec xhat = Vec::Zero(n);
    const int k = std::max(1, n / 5);
    int placed = 0;
    while (placed < k) {
      const int j = static_cast<int>(rng.index(static_cast<unsigned long long>(n)));
      if (xhat[j] != 0) continue;
      double v = rng.normal();
      if (v == 0) v = 1.0;
      xhat[j] = v;
      ++placed;
    }
    Vec y = A * xhat;
    for (int i = 0; i < m; ++i) y[i] += 0.01 * rng.normal();
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(n);
      for (int j = 0; j < n; ++j) row.emplace_back(j + 1, A(i, j));
      ds.rows.push_back(std::move(row));
      ds.labels.push_back(y[i]);
    }
  } else {
    throw InvalidParameter("unknown synthetic kind '" + kind + "'");
  }
  return ds;
}

namespace {

Objective least_squares_objective(const SparseDataset& ds) {
  auto A = std::make_shared<Mat>(Mat(to_sparse_matrix(ds)));
  auto y = std::make_shared<Vec>(
      Eigen::Map<const Vec>(ds.labels.data(),
                            static_cast<Eigen::Index>(ds.labels.size())));
  auto gram = std::make_shared<Mat>(A->transpose() * (*A));
  Eigen::SelfAdjointEigenSolver<Mat> es(*gram);
  const double L = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(L > 0)) throw InvalidInput("dataset has a zero design matrix");
  Vec xls = A->colPivHouseholderQr().solve(*y);
  const double fstar = 0.5 * ((*A) * xls - *y).squaredNorm();
  Objective::Init init;
  init.dim = ds.n_features;
  init.value = [A, y](const Vec& x) {
    return 0.5 * ((*A) * x - *y).squaredNorm();
  };
  init.gradient = [A, y](const Vec& x, Vec& out) {
    out.noalias() = A->transpose() * ((*A) * x - *y);
  };
  init.hvp = [gram](const Vec&, const Vec& v, Vec& out) {
    out.noalias() = (*gram) * v;
  };
  init.L = L;
  if (lo > 1e-12 * L) init.mu = lo;
  init.fstar = fstar;
  init.hess_lipschitz = 0.0;
  init.is_quadratic = true;
  return Objective(init);
}

}  // namespace

Objective dataset_objective(const std::string& kind,
                            const SparseDataset& ds) {
  if (ds.rows.empty()) throw InvalidInput("dataset has no samples");
  if (kind == "quadratic") return least_squares_objective(ds);
  if (kind == "logistic")
    return make_logistic(to_sparse_matrix(ds), binarized_labels(ds),
                         kDatasetReg);
  if (kind == "svm")
    return make_smooth_svm(to_sparse_matrix(ds), binarized_labels(ds),
                           kDatasetReg);
  throw InvalidConfig("no smooth objective for kind '" + kind + "'");
}

CompositeObjective dataset_composite(const SparseDataset& ds) {
  if (ds.rows.empty()) throw InvalidInput("dataset has no samples");
  Mat A = Mat(to_sparse_matrix(ds));
  Vec y = Eigen::Map<const Vec>(ds.labels.data(),
                                static_cast<Eigen::Index>(ds.labels.size()));
  const double l1 = 0.1 * (A.transpose() * y).lpNorm<Eigen::Infinity>();
  return make_lasso(A, y, l1);
}

std::vector<std::string> known_algorithms() {
  return {"gd",          "gd-hb",          "agd-cvx",
          "agd-scvx",    "adam",           "adagrad",
          "classic-hdm", "osgm-h",         "osgm-h-monotone",
          "osgm-h-lookahead", "osgm-h-nonconvex", "osgm-best",
          "osgm-hb-adagrad",  "osgm-bb",   "prox-osgm"};
}

std::vector<std::string> default_grid(const std::string& algorithm) {
  if (algorithm == "gd" || algorithm == "agd-cvx" || algorithm == "agd-scvx")
    return {"1/L"};
  if (algorithm == "gd-hb") return {"0.1", "0.5", "0.9", "0.99"};
  if (algorithm == "adam" || algorithm == "adagrad")
    return {"1/L", "1e-3", "1e-2", "1e-1", "1", "10"};
  const auto names = known_algorithms();
  if (std::find(names.begin(), names.end(), algorithm) == names.end())
    throw InvalidConfig("unknown algorithm '" + algorithm + "'");
  return {"default"};
}

double resolve_grid_token(const std::string& token, double L) {
  if (token == "1/L") return 1.0 / L;
  if (token == "default") return kNaN;
  double v = 0;
  auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || p != token.data() + token.size())
    throw InvalidConfig("bad grid token '" + token + "'");
  return v;
}

RunTrace dispatch_run(const std::string& algorithm, const Objective& obj,
                      RunConfig cfg, const std::string& grid_token) {
  const double v = resolve_grid_token(grid_token, obj.L());
  if (algorithm == "gd") {
    cfg.lr = v;
    return run_gd(obj, cfg);
  }
  if (algorithm == "gd-hb") {
    if (!std::isnan(v)) cfg.momentum = v;
    return run_gd_hb(obj, cfg);
  }
  if (algorithm == "agd-cvx") {
    cfg.lr = v;
    return run_agd_cvx(obj, cfg);
  }
  if (algorithm == "agd-scvx") {
    cfg.lr = v;
    return run_agd_scvx(obj, cfg);
  }
  if (algorithm == "adam") {
    cfg.lr = v;
    return run_adam(obj, cfg);
  }
  if (algorithm == "adagrad") {
    cfg.lr = v;
    return run_adagrad(obj, cfg);
  }
  if (algorithm == "classic-hdm") {
    cfg.eta = v;
    return run_classic_hdm(obj, cfg);
  }
  if (algorithm == "osgm-h") {
    cfg.eta = v;
    return run_osgm_h(obj, cfg, Landscape::Vanilla);
  }
  if (algorithm == "osgm-h-monotone") {
    cfg.eta = v;
    return run_osgm_h(obj, cfg, Landscape::Monotone);
  }
  if (algorithm == "osgm-h-lookahead") {
    cfg.eta = v;
    return run_osgm_h(obj, cfg, Landscape::MonotoneLookahead);
  }
  if (algorithm == "osgm-h-nonconvex") {
    cfg.eta = v;
    return run_osgm_h_nonconvex(obj, cfg);
  }
  if (algorithm == "osgm-best") {
    cfg.eta_P = v;
    return run_osgm_best(obj, cfg);
  }
  if (algorithm == "osgm-hb-adagrad") {
    cfg.eta_P = v;
    return run_osgm_hb_adagrad(obj, cfg);
  }
  if (algorithm == "osgm-bb") {
    cfg.prox_eta = v;
    return run_osgm_bb(obj, cfg);
  }
  if (algorithm == "prox-osgm")
    throw InvalidConfig("prox-osgm requires a composite instance");
  throw InvalidConfig("unknown algorithm '" + algorithm + "'");
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    cfg.budget = j.value("budget", static_cast<long>(1000));
    cfg.tol = j.value("tol", 1e-3);
    cfg.seed = j.value("seed", static_cast<unsigned long long>(1));
    cfg.out_dir = j.value("out_dir", std::string());
    if (!j.contains("instances") || !j["instances"].is_array() ||
        j["instances"].empty())
      throw InvalidConfig("config needs a nonempty instances array");
    for (const auto& ji : j["instances"]) {
      InstanceSpec s;
      s.name = ji.at("name").get<std::string>();
      s.kind = ji.at("kind").get<std::string>();
      s.path = ji.value("path", std::string());
      if (ji.contains("synthetic")) {
        const auto& js = ji["synthetic"];
        s.synthetic.n = js.value("n", 0);
        s.synthetic.m = js.value("m", 0);
        s.synthetic.kappa = js.value("kappa", 0.0);
        s.synthetic.seed =
            js.value("seed", static_cast<unsigned long long>(0));
      }
      if (s.name.empty()) throw InvalidConfig("instance name is empty");
      if (s.path.empty() && (s.synthetic.n < 1 || s.synthetic.m < 1))
        throw InvalidConfig("instance '" + s.name +
                            "' needs a path or synthetic params");
      cfg.instances.push_back(std::move(s));
    }
    if (!j.contains("algorithms") || !j["algorithms"].is_array() ||
        j["algorithms"].empty())
      throw InvalidConfig("config needs a nonempty algorithms array");
    for (const auto& ja : j["algorithms"]) {
      AlgorithmSpec a;
      a.name = ja.at("name").get<std::string>();
      if (ja.contains("grid")) {
        for (const auto& g : ja["grid"]) {
          if (g.is_string())
            a.grid.push_back(g.get<std::string>());
          else
            a.grid.push_back(g17(g.get<double>()));
        }
        if (a.grid.empty())
          throw InvalidConfig("grid for '" + a.name + "' must be nonempty");
      } else {
        a.grid = default_grid(a.name);
      }
      cfg.algorithms.push_back(std::move(a));
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config JSON: ") + e.what());
  }
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["budget"] = cfg.budget;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["instances"] = nlohmann::ordered_json::array();
  for (const auto& s : cfg.instances) {
    nlohmann::ordered_json ji;
    ji["name"] = s.name;
    ji["kind"] = s.kind;
    if (!s.path.empty()) ji["path"] = s.path;
    if (s.synthetic.n > 0) {
      ji["synthetic"] = {{"n", s.synthetic.n},
                         {"m", s.synthetic.m},
                         {"kappa", s.synthetic.kappa},
                         {"seed", s.synthetic.seed}};
    }
    j["instances"].push_back(std::move(ji));
  }
  j["algorithms"] = nlohmann::ordered_json::array();
  for (const auto& a : cfg.algorithms) {
    nlohmann::ordered_json ja;
    ja["name"] = a.name;
    ja["grid"] = a.grid;
    j["algorithms"].push_back(std::move(ja));
  }
  return j.dump(2);
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("failed writing file '" + path + "'");
}

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      c = '_';
  return s;
}

struct PreparedInstance {
  InstanceSpec spec;
  bool ok = false;
  std::string error;
  Objective obj;             // smooth kinds
  CompositeObjective comp;   // lasso
  bool composite = false;
  Vec x1;
};

struct JobResult {
  bool ran = false;
  bool solved = false;
  long oracles = 0;
  double final_f = kNaN;
  double final_gnorm_inf = kNaN;
  std::string error;
  RunTrace trace;
};

}  // namespace

std::string StatsTable::to_csv() const {
  std::string out =
      "instance,algorithm,grid,solved,oracles,final_f,final_gnorm_inf,"
      "error\n";
  for (const auto& r : records) {
    out += csv_safe(r.instance);
    out += ',';
    out += csv_safe(r.algorithm);
    out += ',';
    out += csv_safe(r.grid);
    out += ',';
    out += r.solved ? '1' : '0';
    out += ',';
    out += std::to_string(r.oracles);
    out += ',';
    out += g17(r.final_f);
    out += ',';
    out += g17(r.final_gnorm_inf);
    out += ',';
    out += csv_safe(r.error);
    out += '\n';
  }
  return out;
}

std::string StatsTable::summary_csv() const {
  std::string out = "algorithm,solved\n";
  for (const auto& [name, count] : solved_count) {
    out += csv_safe(name);
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

StatsTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.instances.empty())
    throw InvalidConfig("experiment needs at least one instance");
  if (cfg.algorithms.empty())
    throw InvalidConfig("experiment needs at least one algorithm");
  for (const auto& a : cfg.algorithms)
    if (a.grid.empty())
      throw InvalidConfig("grid for '" + a.name + "' must be nonempty");
  {
    std::vector<std::string> names;
    for (const auto& s : cfg.instances) names.push_back(s.name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
      throw InvalidConfig("instance names must be unique");
  }

  // Prepare problems and the per-instance shared start serially so the
  // parallel phase below is pure.
  std::vector<PreparedInstance> prep(cfg.instances.size());
  for (size_t i = 0; i < cfg.instances.size(); ++i) {
    PreparedInstance& p = prep[i];
    p.spec = cfg.instances[i];
    try {
      SparseDataset ds;
      if (!p.spec.path.empty()) {
        ds = parse_libsvm(load_text_file(p.spec.path));
      } else {
        ds = generate_synthetic(p.spec.kind, p.spec.synthetic.n,
                                p.spec.synthetic.m, p.spec.synthetic.kappa,
                                p.spec.synthetic.seed);
      }
      if (p.spec.kind == "lasso") {
        p.comp = dataset_composite(ds);
        p.composite = true;
      } else {
        p.obj = dataset_objective(p.spec.kind, ds);
      }
      const int dim = p.composite ? p.comp.smooth.dim() : p.obj.dim();
      Rng rng(cfg.seed ^ ((i + 1) * 0x9E3779B97F4A7C15ULL));
      p.x1 = rng.normal_vec(dim);
      const double nrm = p.x1.norm();
      if (nrm > 0)
        p.x1 /= nrm;
      else
        p.x1[0] = 1;
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  }

  struct Job {
    size_t inst = 0;
    size_t algo = 0;
    size_t gi = 0;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < prep.size(); ++i) {
    if (!prep[i].ok) continue;
    for (size_t a = 0; a < cfg.algorithms.size(); ++a)
      for (size_t g = 0; g < cfg.algorithms[a].grid.size(); ++g)
        jobs.push_back({i, a, g});
  }
  std::vector<JobResult> results(jobs.size());
  const bool keep_rows = !cfg.out_dir.empty();

  auto run_job = [&](size_t idx) {
    const Job& job = jobs[idx];
    const PreparedInstance& p = prep[job.inst];
    const AlgorithmSpec& a = cfg.algorithms[job.algo];
    JobResult& r = results[idx];
    try {
      RunConfig rc;
      rc.x1 = p.x1;
      rc.seed = cfg.seed;
      rc.tol = cfg.tol;
      rc.budget = cfg.budget;
      rc.record_trace = keep_rows;
      RunTrace trace;
      OracleStat stat;
      if (p.composite) {
        if (a.name != "prox-osgm")
          throw InvalidConfig("'" + a.name +
                              "' requires a smooth objective");
        CompositeObjective c = p.comp.with_fresh_counters();
        const double v = resolve_grid_token(a.grid[job.gi],
                                            c.smooth.L());
        if (!std::isnan(v)) rc.eta = v;
        trace = run_prox_osgm(c, rc);
        stat = c.smooth.stat();
      } else {
        Objective o = p.obj.with_fresh_counters();
        trace = dispatch_run(a.name, o, rc, a.grid[job.gi]);
        stat = o.stat();
      }
      if (trace.grad_oracles != stat.gradient)
        throw InvalidConfig("oracle audit mismatch: trace " +
                            std::to_string(trace.grad_oracles) +
                            " vs counter " + std::to_string(stat.gradient));
      r.ran = true;
      r.solved = trace.status == "solved";
      r.oracles = trace.grad_oracles;
      r.final_f = trace.final_f;
      r.final_gnorm_inf = trace.final_gnorm_inf;
      r.trace = std::move(trace);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };

  unsigned nw = std::thread::hardware_concurrency();
  if (nw == 0) nw = 1;
  nw = std::min(nw, 8u);
  nw = std::min<unsigned>(nw, static_cast<unsigned>(std::max<size_t>(
                                  jobs.size(), 1)));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      run_job(idx);
    }
  };
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  StatsTable table;
  for (const auto& a : cfg.algorithms) table.solved_count[a.name] = 0;
  std::vector<const RunTrace*> best_traces;
  std::vector<std::pair<std::string, std::string>> best_names;
  for (size_t i = 0; i < prep.size(); ++i) {
    for (size_t a = 0; a < cfg.algorithms.size(); ++a) {
      RunRecord rec;
      rec.instance = prep[i].spec.name;
      rec.algorithm = cfg.algorithms[a].name;
      if (!prep[i].ok) {
        rec.error = prep[i].error;
        table.records.push_back(std::move(rec));
        continue;
      }
      // best grid entry: fewest oracles among solved, else smallest final
      // gradient norm; ties resolve to the earliest grid entry
      long best_idx = -1;
      bool best_solved = false;
      long best_oracles = 0;
      double best_gnorm = kNaN;
      std::string first_error;
      const RunTrace* best_trace = nullptr;
      for (size_t idx = 0; idx < jobs.size(); ++idx) {
        if (jobs[idx].inst != i || jobs[idx].algo != a) continue;
        const JobResult& r = results[idx];
        if (!r.ran) {
          if (first_error.empty()) first_error = r.error;
          continue;
        }
        bool better = false;
        if (best_idx < 0) {
          better = true;
        } else if (r.solved != best_solved) {
          better = r.solved;
        } else if (r.solved) {
          better = r.oracles < best_oracles;
        } else {
          const double cur = std::isnan(r.final_gnorm_inf)
                                 ? std::numeric_limits<double>::infinity()
                                 : r.final_gnorm_inf;
          const double prev = std::isnan(best_gnorm)
                                  ? std::numeric_limits<double>::infinity()
                                  : best_gnorm;
          better = cur < prev;
        }
        if (better) {
          best_idx = static_cast<long>(jobs[idx].gi);
          best_solved = r.solved;
          best_oracles = r.oracles;
          best_gnorm = r.final_gnorm_inf;
          best_trace = &r.trace;
          rec.grid = cfg.algorithms[a].grid[jobs[idx].gi];
          rec.solved = r.solved;
          rec.oracles = r.oracles;
          rec.final_f = r.final_f;
          rec.final_gnorm_inf = r.final_gnorm_inf;
        }
      }
      if (best_idx < 0) {
        rec.error = first_error.empty() ? "no runs" : first_error;
      } else if (rec.solved) {
        ++table.solved_count[rec.algorithm];
      }
      if (best_trace && keep_rows) {
        best_traces.push_back(best_trace);
        best_names.emplace_back(rec.instance, rec.algorithm);
      }
      table.records.push_back(std::move(rec));
    }
  }
  std::sort(table.records.begin(), table.records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.instance != b.instance) return a.instance < b.instance;
              return a.algorithm < b.algorithm;
            });

  if (keep_rows) {
    std::filesystem::create_directories(cfg.out_dir);
    for (size_t i = 0; i < best_traces.size(); ++i) {
      const auto path = std::filesystem::path(cfg.out_dir) /
                        (file_safe(best_names[i].first) + "__" +
                         file_safe(best_names[i].second) + ".csv");
      save_text_file(path.string(), best_traces[i]->to_csv());
    }
  }
  return table;
}

ExperimentConfig default_suite() {
  ExperimentConfig cfg;
  cfg.budget = 1000;
  cfg.tol = 1e-3;
  cfg.seed = 1;
  const double kappas[3] = {10, 100, 1000};
  for (int i = 0; i < 3; ++i) {
    InstanceSpec s;
    s.name = "quad-k" + std::to_string(static_cast<long>(kappas[i]));
    s.kind = "quadratic";
    s.synthetic = {20, 200, kappas[i], 101ULL + static_cast<unsigned>(i)};
    cfg.instances.push_back(std::move(s));
  }
  for (int i = 0; i < 3; ++i) {
    InstanceSpec s;
    s.name = "logistic-s" + std::to_string(i + 1);
    s.kind = "logistic";
    s.synthetic = {20, 200, 0.0, 201ULL + static_cast<unsigned>(i)};
    cfg.instances.push_back(std::move(s));
  }
  for (int i = 0; i < 3; ++i) {
    InstanceSpec s;
    s.name = "svm-s" + std::to_string(i + 1);
    s.kind = "svm";
    s.synthetic = {20, 200, 0.0, 301ULL + static_cast<unsigned>(i)};
    cfg.instances.push_back(std::move(s));
  }
  for (const char* name : {"gd", "gd-hb", "agd-cvx", "agd-scvx", "adam",
                           "adagrad", "osgm-best"}) {
    AlgorithmSpec a;
    a.name = name;
    a.grid = default_grid(name);
    cfg.algorithms.push_back(std::move(a));
  }
  return cfg;
}

}  // namespace osgm
