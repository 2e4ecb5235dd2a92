/*
 Copyright 2026 The lqtioc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "lqtioc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lqtioc/error.hpp"

namespace lqtioc {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, const std::string& what,
                    ErrorCode code = ErrorCode::kConfig) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw IocError(code, "malformed number '" + tok + "' in " + what);
  }
  return v;
}

long long parse_integer(const std::string& tok, const std::string& what,
                        ErrorCode code = ErrorCode::kConfig) {
  long long v = 0;
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IocError(code, "malformed integer '" + tok + "' in " + what);
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IocError(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IocError(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

std::string header_value(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split_ws(line);
    if (parts.size() != 2 || parts[0] != key) {
      throw IocError(ErrorCode::kIo, "expected header '" + key + " <value>', got '" + line + "'");
    }
    return parts[1];
  }
  throw IocError(ErrorCode::kIo, "trajectory file ends before header '" + key + "'");
}

void write_matrix_text(std::ostream& out, const std::string& name, const MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << '\n';
  }
}

void write_vector_text(std::ostream& out, const std::string& name, const VectorXd& v) {
  out << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_double(v(i));
  out << '\n';
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

json vector_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

void write_trajectories(std::ostream& out, const TrajectoryBatch& batch) {
  batch.validate();
  out << "# lqtioc trajectories v1\n";
  out << "n " << batch.n << "\np " << batch.p << "\nK " << batch.K << "\nM " << batch.M() << '\n';
  out << "seed " << (batch.seed ? std::to_string(*batch.seed) : std::string("none")) << '\n';
  for (int i = 0; i < batch.M(); ++i) {
    const Trajectory& t = batch.trajectories[static_cast<std::size_t>(i)];
    for (int k = 0; k <= batch.K + 1; ++k) {
      out << i << ' ' << k;
      for (int r = 0; r < batch.n; ++r) out << ' ' << format_double(t.states(r, k));
      for (int r = 0; r < batch.p; ++r) {
        out << ' ' << (k <= batch.K ? format_double(t.inputs(r, k)) : std::string("nan"));
      }
      out << '\n';
    }
  }
}

TrajectoryBatch read_trajectories(std::istream& in) {
  TrajectoryBatch batch;
  const std::string what = "trajectory file";
  batch.n = static_cast<int>(parse_integer(header_value(in, "n"), what, ErrorCode::kIo));
  batch.p = static_cast<int>(parse_integer(header_value(in, "p"), what, ErrorCode::kIo));
  batch.K = static_cast<int>(parse_integer(header_value(in, "K"), what, ErrorCode::kIo));
  const int M = static_cast<int>(parse_integer(header_value(in, "M"), what, ErrorCode::kIo));
  const std::string seed = header_value(in, "seed");
  if (seed != "none") {
    batch.seed = static_cast<std::uint64_t>(parse_integer(seed, what, ErrorCode::kIo));
  }
  if (batch.n < 1 || batch.p < 1 || batch.K < 0 || M < 0) {
    throw IocError(ErrorCode::kIo, "trajectory header has non-positive dimensions");
  }
  batch.trajectories.resize(static_cast<std::size_t>(M));
  for (auto& t : batch.trajectories) {
    t.states = MatrixXd::Constant(batch.n, batch.K + 2, std::numeric_limits<double>::quiet_NaN());
    t.inputs = MatrixXd::Constant(batch.p, batch.K + 1, std::numeric_limits<double>::quiet_NaN());
  }
  const std::size_t expected = static_cast<std::size_t>(M) * static_cast<std::size_t>(batch.K + 2);
  std::vector<char> seen(expected, 0);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != static_cast<std::size_t>(2 + batch.n + batch.p)) {
      throw IocError(ErrorCode::kIo, "trajectory row has wrong field count: '" + line + "'");
    }
    const long long i = parse_integer(tok[0], what, ErrorCode::kIo);
    const long long k = parse_integer(tok[1], what, ErrorCode::kIo);
    if (i < 0 || i >= M || k < 0 || k > batch.K + 1) {
      throw IocError(ErrorCode::kIo, "trajectory row index out of range: '" + line + "'");
    }
    const std::size_t slot = static_cast<std::size_t>(i * (batch.K + 2) + k);
    if (seen[slot]) throw IocError(ErrorCode::kIo, "duplicate trajectory row: '" + line + "'");
    seen[slot] = 1;
    ++rows;
    Trajectory& t = batch.trajectories[static_cast<std::size_t>(i)];
    for (int r = 0; r < batch.n; ++r) {
      t.states(r, k) = parse_double(tok[static_cast<std::size_t>(2 + r)], what, ErrorCode::kIo);
    }
    if (k <= batch.K) {
      for (int r = 0; r < batch.p; ++r) {
        t.inputs(r, k) =
            parse_double(tok[static_cast<std::size_t>(2 + batch.n + r)], what, ErrorCode::kIo);
      }
    }
  }
  if (rows != expected) {
    throw IocError(ErrorCode::kIo, "trajectory file has " + std::to_string(rows) +
                                       " rows, expected " + std::to_string(expected));
  }
  for (const auto& t : batch.trajectories) {
    if (!t.states.allFinite() || !t.inputs.allFinite()) {
      throw IocError(ErrorCode::kIo, "trajectory file contains non-finite values");
    }
  }
  return batch;
}

void save_trajectories(const std::string& path, const TrajectoryBatch& batch) {
  auto out = open_out(path);
  write_trajectories(out, batch);
}

TrajectoryBatch load_trajectories(const std::string& path) {
  auto in = open_in(path);
  return read_trajectories(in);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IocError(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw IocError(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": empty key");
    }
    if (cfg.values_.count(key)) {
      throw IocError(ErrorCode::kConfig, "duplicate key '" + key + "'");
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  auto in = open_in(path);
  return parse(in);
}

void KeyValueConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

void KeyValueConfig::save(const std::string& path) const {
  auto out = open_out(path);
  write(out);
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw IocError(ErrorCode::kConfig, "missing key '" + key + "'");
  return it->second;
}

int KeyValueConfig::get_int(const std::string& key) const {
  return static_cast<int>(parse_integer(get_string(key), "key '" + key + "'"));
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key) const {
  const std::string s = get_string(key);
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IocError(ErrorCode::kConfig, "malformed unsigned integer for key '" + key + "'");
  }
  return v;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(get_string(key), "key '" + key + "'");
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw IocError(ErrorCode::kConfig, "malformed boolean for key '" + key + "'");
}

VectorXd KeyValueConfig::get_vector(const std::string& key) const {
  const auto tok = split_ws(get_string(key));
  VectorXd v(static_cast<Eigen::Index>(tok.size()));
  for (std::size_t i = 0; i < tok.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = parse_double(tok[i], "key '" + key + "'");
  }
  return v;
}

MatrixXd KeyValueConfig::get_matrix(const std::string& key) const {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(get_string(key));
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> r;
    for (const auto& t : split_ws(row)) r.push_back(parse_double(t, "key '" + key + "'"));
    rows.push_back(std::move(r));
  }
  if (rows.empty() || rows.front().empty()) {
    throw IocError(ErrorCode::kConfig, "empty matrix for key '" + key + "'");
  }
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw IocError(ErrorCode::kConfig, "ragged matrix rows for key '" + key + "'");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& t : split_ws(get_string(key))) {
    out.push_back(static_cast<int>(parse_integer(t, "key '" + key + "'")));
  }
  return out;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (value.find('\n') != std::string::npos || value.find('#') != std::string::npos) {
    throw IocError(ErrorCode::kConfig, "config values cannot contain newlines or '#'");
  }
  values_[key] = trim(value);
}

void KeyValueConfig::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void KeyValueConfig::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

void KeyValueConfig::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueConfig::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

void KeyValueConfig::set(const std::string& key, const VectorXd& value) {
  std::string s;
  for (Eigen::Index i = 0; i < value.size(); ++i) s += (i ? " " : "") + format_double(value(i));
  set(key, s);
}

void KeyValueConfig::set(const std::string& key, const MatrixXd& value) {
  std::string s;
  for (Eigen::Index i = 0; i < value.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < value.cols(); ++j) s += (j ? " " : "") + format_double(value(i, j));
  }
  set(key, s);
}

void KeyValueConfig::set(const std::string& key, const std::vector<int>& value) {
  std::string s;
  for (std::size_t i = 0; i < value.size(); ++i) s += (i ? " " : "") + std::to_string(value[i]);
  set(key, s);
}

ProblemFile problem_from_config(const KeyValueConfig& cfg) {
  ProblemFile pf;
  pf.A = cfg.get_matrix("A");
  pf.B = cfg.get_matrix("B");
  if (cfg.has("Q") || cfg.has("R") || cfg.has("d") || cfg.has("K")) {
    pf.cost.emplace(cfg.get_matrix("Q"), cfg.get_matrix("R"), cfg.get_vector("d"), cfg.get_int("K"));
  }
  return pf;
}

KeyValueConfig problem_to_config(const SystemModel& model, const std::optional<CostSpec>& cost) {
  KeyValueConfig cfg;
  cfg.set("A", model.A());
  cfg.set("B", model.B());
  if (cost) {
    cfg.set("Q", cost->Q());
    cfg.set("R", cost->R());
    cfg.set("d", cost->d());
    cfg.set("K", cost->K());
  }
  return cfg;
}

void write_estimate_text(std::ostream& out, const ThetaEstimate& e) {
  out << "n " << e.n << "\np " << e.p << '\n';
  write_vector_text(out, "theta", e.theta);
  write_matrix_text(out, "Q_hat", e.Q_hat);
  write_matrix_text(out, "R_hat", e.R_hat);
  write_vector_text(out, "q_hat", e.q_hat);
  write_vector_text(out, "d_hat", e.d_hat);
  write_matrix_text(out, "kernel_projector", e.kernel_projector);
  write_vector_text(out, "q_eigenvalues", e.q_eigenvalues);
  write_vector_text(out, "r_eigenvalues", e.r_eigenvalues);
  out << "residual " << format_double(e.residual) << '\n';
  out << "q_rank " << e.q_rank << '\n';
  out << "unidentifiable_dim " << e.unidentifiable_dim << '\n';
  out << "normalization " << e.alpha_convention.normalization << '\n';
  out << "sign_flipped " << (e.alpha_convention.sign_flipped ? "true" : "false") << '\n';
}

std::string estimate_json(const ThetaEstimate& e) {
  json j;
  j["n"] = e.n;
  j["p"] = e.p;
  j["theta"] = vector_json(e.theta);
  j["Q_hat"] = matrix_json(e.Q_hat);
  j["R_hat"] = matrix_json(e.R_hat);
  j["q_hat"] = vector_json(e.q_hat);
  j["d_hat"] = vector_json(e.d_hat);
  j["kernel_projector"] = matrix_json(e.kernel_projector);
  j["q_eigenvalues"] = vector_json(e.q_eigenvalues);
  j["r_eigenvalues"] = vector_json(e.r_eigenvalues);
  j["residual"] = e.residual;
  j["q_rank"] = e.q_rank;
  j["unidentifiable_dim"] = e.unidentifiable_dim;
  j["normalization"] = e.alpha_convention.normalization;
  j["sign_flipped"] = e.alpha_convention.sign_flipped;
  return j.dump(2);
}

void write_laplacian_text(std::ostream& out, const LaplacianSpec& lap) {
  out << "N " << lap.N << "\nn0 " << lap.n0 << '\n';
  write_matrix_text(out, "L_hat", lap.L);
  write_vector_text(out, "phi_hat", lap.phi);
  for (int j = 0; j < lap.N; ++j) {
    write_vector_text(out, "d_agent_" + std::to_string(j + 1),
                      lap.per_agent_targets[static_cast<std::size_t>(j)]);
  }
  out << "edges " << lap.N * (lap.N - 1) / 2 << '\n';
  for (const Edge& e : edge_list(lap.L)) {
    out << e.i + 1 << ' ' << e.j + 1 << ' ' << format_double(e.weight) << '\n';
  }
}

std::string laplacian_json(const LaplacianSpec& lap) {
  json j;
  j["N"] = lap.N;
  j["n0"] = lap.n0;
  j["L_hat"] = matrix_json(lap.L);
  j["phi_hat"] = vector_json(lap.phi);
  json targets = json::array();
  for (const auto& d : lap.per_agent_targets) targets.push_back(vector_json(d));
  j["d_agents"] = targets;
  json edges = json::array();
  for (const Edge& e : edge_list(lap.L)) {
    edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"weight", e.weight}});
  }
  j["edges"] = edges;
  return j.dump(2);
}

void write_policy_text(std::ostream& out, const PolicySequence& policy) {
  out << "K " << policy.K() << '\n';
  for (int k = 0; k <= policy.K(); ++k) {
    write_matrix_text(out, "gain_" + std::to_string(k), policy.gain(k));
    write_vector_text(out, "offset_" + std::to_string(k), policy.offset(k));
  }
  for (int k = 1; k <= policy.K() + 1; ++k) {
    write_matrix_text(out, "P_" + std::to_string(k), policy.P(k));
    write_vector_text(out, "eta_" + std::to_string(k), policy.eta(k));
  }
}

std::string policy_json(const PolicySequence& policy) {
  json j;
  j["K"] = policy.K();
  json steps = json::array();
  for (int k = 0; k <= policy.K(); ++k) {
    steps.push_back({{"k", k},
                     {"gain", matrix_json(policy.gain(k))},
                     {"offset", vector_json(policy.offset(k))},
                     {"P_next", matrix_json(policy.P(k + 1))},
                     {"eta_next", vector_json(policy.eta(k + 1))}});
  }
  j["steps"] = steps;
  return j.dump(2);
}

void write_assumptions_text(std::ostream& out, const AssumptionReport& report) {
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value);
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    out << '\n';
  }
}

std::string assumptions_json(const AssumptionReport& report) {
  json arr = json::array();
  for (const auto& c : report.checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"detail", c.detail}});
  }
  return json{{"checks", arr}, {"all_pass", report.all_pass()}}.dump(2);
}

}  // namespace lqtioc
