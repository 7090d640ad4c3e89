#include "ddag/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ddag/errors.hpp"

namespace ddag {

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h_ ^= p[k];
      h_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string file_name(int r) {
  std::ostringstream os;
  os << "traj_" << std::setw(4) << std::setfill('0') << r + 1 << ".csv";
  return os.str();
}

std::string strategy_name(SamplingStrategy s) { return to_string(s); }

}  // namespace

std::string model_hash(const LdsModel& model) {
  Fnv1a h;
  h.value(static_cast<std::int64_t>(model.size()));
  for (const auto& e : model.dag.edges()) {
    h.value(static_cast<std::int32_t>(e.from));
    h.value(static_cast<std::int32_t>(e.to));
  }
  for (Eigen::Index i = 0; i < model.B.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.B.cols(); ++j) h.value(model.B(i, j));
  }
  h.value(static_cast<std::int32_t>(model.noise.kind));
  h.value(model.noise.sigma_w);
  h.value(model.noise.alpha);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h.digest();
  return os.str();
}

Json noise_to_json(const NoiseSpec& noise) {
  Json j{{"kind", to_string(noise.kind)}, {"sigma_w", noise.sigma_w}};
  if (noise.kind == NoiseKind::Ar1) j["alpha"] = noise.alpha;
  return j;
}

NoiseSpec noise_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("noise must be a JSON object");
  NoiseSpec n;
  n.kind = noise_kind_from_string(j.value("kind", std::string("iid")));
  n.sigma_w = j.value("sigma_w", 0.5);
  n.alpha = n.kind == NoiseKind::Ar1 ? j.value("alpha", 0.5) : 0.0;
  n.validate();
  return n;
}

Json model_to_json(const LdsModel& model) {
  Json edges = Json::array();
  for (const auto& e : model.dag.edges()) edges.push_back({e.from + 1, e.to + 1});
  Json order = Json::array();
  for (NodeId v : model.dag.order()) order.push_back(v + 1);
  Json B = Json::array();
  for (Eigen::Index i = 0; i < model.B.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < model.B.cols(); ++j) row.push_back(model.B(i, j));
    B.push_back(row);
  }
  const auto& c = model.constants;
  Json constants{{"M_bound", c.m_bound}, {"C_decay", c.c_decay}, {"rho", c.rho}};
  constants["beta"] = std::isfinite(c.beta) ? Json(c.beta) : Json(nullptr);
  return Json{{"p", model.size()},      {"edges", edges},
              {"order", order},         {"B", B},
              {"noise", noise_to_json(model.noise)},
              {"constants", constants}, {"hash", model_hash(model)}};
}

LdsModel model_from_json(const Json& j) {
  try {
    const int p = j.at("p").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>() - 1, e.at(1).get<int>() - 1});
    Dag dag = [&] {
      if (!j.contains("order")) return Dag(p, edges);
      std::vector<NodeId> order;
      for (const auto& v : j.at("order")) order.push_back(v.get<int>() - 1);
      return Dag(p, edges, order);
    }();
    RMatrix B(p, p);
    const auto& rows = j.at("B");
    if (rows.size() != static_cast<std::size_t>(p)) throw ConfigError("B must have p rows");
    for (int r = 0; r < p; ++r) {
      if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(p)) {
        throw ConfigError("B must have p columns");
      }
      for (int c = 0; c < p; ++c) B(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return make_model(dag, std::move(B), noise_from_json(j.at("noise")));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed model JSON: ") + e.what());
  }
}

void write_trajectories(const std::filesystem::path& dir, const TrajectorySet& traj,
                        const LdsModel& model) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  Json files = Json::array();
  for (int r = 0; r < traj.n; ++r) {
    const auto name = file_name(r);
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < traj.p; ++i) os << ",node" << i + 1;
    os << '\n' << std::setprecision(17);
    for (int t = 0; t < traj.N; ++t) {
      os << t;
      for (int i = 0; i < traj.p; ++i) os << ',' << traj.at(r, t, i);
      os << '\n';
    }
    write_text_file(dir / name, os.str());
    files.push_back(name);
  }
  Json manifest{{"strategy", strategy_name(traj.strategy)},
                {"start", traj.start == StartMode::Stationary ? "stationary" : "burn_in"},
                {"seed", traj.seed},
                {"burn_in", traj.burn_in},
                {"N", traj.N},
                {"n", traj.n},
                {"p", traj.p},
                {"model_hash", model_hash(model)},
                {"files", files}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

TrajectorySet read_trajectories(const std::filesystem::path& manifest_path) {
  const Json m = read_json_file(manifest_path);
  TrajectorySet ts;
  try {
    ts.strategy = strategy_from_string(m.at("strategy").get<std::string>());
    ts.start = m.value("start", std::string("burn_in")) == "stationary" ? StartMode::Stationary
                                                                        : StartMode::BurnIn;
    ts.seed = m.value("seed", std::uint64_t{0});
    ts.burn_in = m.value("burn_in", 0L);
    ts.N = m.at("N").get<int>();
    ts.n = m.at("n").get<int>();
    ts.p = m.at("p").get<int>();
    const auto& files = m.at("files");
    if (files.size() != static_cast<std::size_t>(ts.n)) throw IoError("manifest lists the wrong number of files");
    ts.data.reserve(static_cast<std::size_t>(ts.n) * ts.N * ts.p);
    for (const auto& f : files) {
      const auto path = manifest_path.parent_path() / f.get<std::string>();
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      std::string line;
      std::getline(in, line);  // header
      int rows = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');  // t
        for (int i = 0; i < ts.p; ++i) {
          if (!std::getline(ls, cell, ',')) throw IoError("short row in " + path.string());
          ts.data.push_back(std::stod(cell));
        }
        ++rows;
      }
      if (rows != ts.N) throw IoError("wrong number of samples in " + path.string());
    }
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw IoError(std::string("malformed number in trajectory file: ") + e.what());
  }
  return ts;
}

void write_psdm_csv(std::ostream& os, const PsdmEstimate& est) {
  os << std::setprecision(17);
  os << "# omega=" << est.omega.omega() << ",n=" << est.n << ",N=" << est.N
     << ",p=" << est.matrix.rows() << '\n';
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < est.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < est.matrix.cols(); ++j) {
      os << i + 1 << ',' << j + 1 << ',' << est.matrix(i, j).real() << ',' << est.matrix(i, j).imag() << '\n';
    }
  }
}

PsdmEstimate read_psdm_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw IoError("PSDM CSV: missing header line");
  double omega = -1.0;
  int n = 0;
  int N = 0;
  int p = 0;
  std::istringstream hs(line.substr(2));
  std::string field;
  while (std::getline(hs, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw IoError("PSDM CSV: malformed header field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto val = field.substr(eq + 1);
    try {
      if (key == "omega") omega = std::stod(val);
      else if (key == "n") n = std::stoi(val);
      else if (key == "N") N = std::stoi(val);
      else if (key == "p") p = std::stoi(val);
    } catch (const std::exception&) {
      throw IoError("PSDM CSV: malformed header value '" + field + "'");
    }
  }
  if (p < 1) throw IoError("PSDM CSV: header must carry p");
  if (!std::getline(is, line)) throw IoError("PSDM CSV: missing column header");
  CMatrix m = CMatrix::Zero(p, p);
  std::vector<char> seen(static_cast<std::size_t>(p * p), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, re, im;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, re, ',') ||
        !std::getline(ls, im, ',')) {
      throw IoError("PSDM CSV: malformed row '" + line + "'");
    }
    int i = 0;
    int j = 0;
    try {
      i = std::stoi(a) - 1;
      j = std::stoi(b) - 1;
      if (i < 0 || i >= p || j < 0 || j >= p) throw IoError("PSDM CSV: index out of range");
      m(i, j) = Complex(std::stod(re), std::stod(im));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      throw IoError("PSDM CSV: malformed row '" + line + "'");
    }
    seen[static_cast<std::size_t>(i * p + j)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw IoError("PSDM CSV: missing entries");
  return {FrequencyPoint(omega), std::move(m), n, N};
}

Json audit_to_json(const ReconstructionResult& result, const ReconstructionParams& params) {
  auto one_based = [](const NodeSet& s) {
    Json a = Json::array();
    for (NodeId v : s) a.push_back(v + 1);
    return a;
  };
  Json order = Json::array();
  for (NodeId v : result.order) order.push_back(v + 1);
  Json opt = Json::array();
  for (std::size_t k = 0; k < result.order.size(); ++k) {
    opt.push_back({{"node", result.order[k] + 1}, {"set", one_based(result.opt_sets[k])}});
  }
  Json tests = Json::array();
  for (const auto& t : result.parent_tests) {
    tests.push_back({{"child", t.child + 1}, {"candidate", t.candidate + 1}, {"drop", t.drop}, {"parent", t.accepted}});
  }
  Json f = Json::array();
  for (const auto& e : result.f_values) {
    f.push_back({{"node", e.node + 1}, {"set", one_based(e.cond)}, {"f", e.value}});
  }
  return Json{{"omega", params.omega.omega()},
              {"q", params.q},
              {"gamma", params.gamma},
              {"parent_rule", params.parent_rule == ParentRule::FullPrefix ? "full_prefix" : "optimal_set"},
              {"order", order},
              {"optimal_sets", opt},
              {"parent_tests", tests},
              {"f_values", f},
              {"ridge_applied", result.ridge_applied}};
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const std::vector<std::string> known{
      "p", "q", "noise", "strategies", "N", "n_grid", "omega_index", "trials", "seed",
      "gamma", "parent_rule", "start", "threads", "record_timing"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown experiment config key '" + key + "'");
    }
  }
  try {
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("q")) c.q = j["q"].get<int>();
    if (j.contains("noise")) {
      c.noises.clear();
      if (j["noise"].is_array()) {
        for (const auto& n : j["noise"]) c.noises.push_back(noise_from_json(n));
      } else {
        c.noises.push_back(noise_from_json(j["noise"]));
      }
    }
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j["strategies"]) c.strategies.push_back(strategy_from_string(s.get<std::string>()));
    }
    if (j.contains("N")) c.N = j["N"].get<int>();
    if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::vector<int>>();
    if (j.contains("omega_index")) c.omega_index = j["omega_index"].get<int>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma_override = j["gamma"].get<double>();
    if (j.contains("parent_rule")) {
      const auto rule = j["parent_rule"].get<std::string>();
      if (rule == "full_prefix") c.parent_rule = ParentRule::FullPrefix;
      else if (rule == "optimal_set") c.parent_rule = ParentRule::OptimalSet;
      else throw ConfigError("parent_rule must be full_prefix or optimal_set");
    }
    if (j.contains("start")) {
      const auto start = j["start"].get<std::string>();
      if (start == "stationary") c.start = StartMode::Stationary;
      else if (start == "burn_in") c.start = StartMode::BurnIn;
      else throw ConfigError("start must be stationary or burn_in");
    }
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("record_timing")) c.record_timing = j["record_timing"].get<bool>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ddag
