#include "tpn/draws_io.hpp"

#include <charconv>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tpn {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& where) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("read_draws: unparseable value \"" + s + "\" in " + where);
  }
  return value;
}

constexpr const char* kHeader = "iteration,param_name,value";

std::ofstream open_out(const std::string& path, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("draws_io: cannot open " + path);
  if (!append) out << kHeader << '\n';
  return out;
}

void write_row(std::ofstream& out, long iteration, const std::string& name, double value) {
  out << iteration << ',' << name << ',' << format_double(value) << '\n';
}

struct ParsedFile {
  // iteration -> (name -> value); iterations stay ordered.
  std::map<long, std::map<std::string, double>> rows;
  // Param names of the first iteration encountered, in file order, so the
  // original column order survives a round trip.
  std::vector<std::string> name_order;
};

ParsedFile parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_draws: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || (line != kHeader && line != std::string(kHeader) + "\r")) {
    throw std::runtime_error("read_draws: " + path + " lacks the expected header");
  }
  ParsedFile parsed;
  long line_no = 1;
  long first_iter = 0;
  bool seen_any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Names such as sigma[1,2] embed a comma, so the row splits at the
    // first and last comma rather than at every one.
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c2 == c1) {
      throw std::runtime_error("read_draws: malformed line " + std::to_string(line_no) +
                               " in " + path);
    }
    const std::string where = path + ":" + std::to_string(line_no);
    long iteration = 0;
    const std::string it_str = line.substr(0, c1);
    const auto res = std::from_chars(it_str.data(), it_str.data() + it_str.size(), iteration);
    if (res.ec != std::errc{} || res.ptr != it_str.data() + it_str.size()) {
      throw std::runtime_error("read_draws: bad iteration \"" + it_str + "\" in " + where);
    }
    const std::string name = line.substr(c1 + 1, c2 - c1 - 1);
    if (!seen_any) {
      seen_any = true;
      first_iter = iteration;
    }
    if (iteration == first_iter) parsed.name_order.push_back(name);
    parsed.rows[iteration][name] = parse_double(line.substr(c2 + 1), where);
  }
  return parsed;
}

// "name[i]" or "name[i,j]" -> indices (1-based in the file).
std::pair<int, int> parse_indices(const std::string& name, const std::string& where) {
  const auto open = name.find('[');
  const auto close = name.find(']');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw std::runtime_error("read_draws: malformed param name \"" + name + "\" in " + where);
  }
  const std::string inner = name.substr(open + 1, close - open - 1);
  const auto comma = inner.find(',');
  const auto to_int = [&](const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 1) {
      throw std::runtime_error("read_draws: bad index in \"" + name + "\" in " + where);
    }
    return v;
  };
  if (comma == std::string::npos) return {to_int(inner), 0};
  return {to_int(inner.substr(0, comma)), to_int(inner.substr(comma + 1))};
}

void append_draw_rows(std::ofstream& mu, std::ofstream& conc, std::ofstream& sigma,
                      std::ofstream& imputed, const std::string& conc_name,
                      const std::vector<std::string>& imputed_names, long iteration,
                      const Vector& mu_v, const Vector& conc_v, const Matrix& sigma_m,
                      const Vector& imputed_v) {
  const auto d = mu_v.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    write_row(mu, iteration, "mu[" + std::to_string(j + 1) + "]", mu_v[j]);
    write_row(conc, iteration, conc_name + "[" + std::to_string(j + 1) + "]", conc_v[j]);
  }
  if (d == 1) {
    write_row(sigma, iteration, "sigma[1,1]", sigma_m(0, 0));
  } else {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = j + 1; k < d; ++k) {
        write_row(sigma, iteration,
                  "sigma[" + std::to_string(j + 1) + "," + std::to_string(k + 1) + "]",
                  sigma_m(j, k));
      }
    }
  }
  for (Eigen::Index c = 0; c < imputed_v.size(); ++c) {
    write_row(imputed, iteration, imputed_names[static_cast<std::size_t>(c)], imputed_v[c]);
  }
}

}  // namespace

void write_draws(const PosteriorDraws& draws, const std::string& dir) {
  const int m = draws.num_retained();
  if (m < 1) throw std::invalid_argument("write_draws: no retained draws");
  std::filesystem::create_directories(dir);
  const std::string conc_name = draws.concentration_name;
  auto mu = open_out(dir + "/mu.csv", false);
  auto conc = open_out(dir + "/" + conc_name + ".csv", false);
  auto sigma = open_out(dir + "/sigma.csv", false);
  std::ofstream imputed;
  if (draws.imputed.cols() > 0) imputed = open_out(dir + "/imputed.csv", false);
  for (int t = 0; t < m; ++t) {
    append_draw_rows(mu, conc, sigma, imputed, conc_name, draws.imputed_names, t + 1,
                     draws.mu.row(t).transpose(), draws.concentration.row(t).transpose(),
                     draws.sigma[static_cast<std::size_t>(t)],
                     draws.imputed.cols() > 0
                         ? Vector(draws.imputed.row(t).transpose())
                         : Vector(0));
  }
}

PosteriorDraws read_draws(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string mu_path = dir + "/mu.csv";
  if (!fs::exists(mu_path)) throw std::runtime_error("read_draws: missing " + mu_path);

  std::string conc_name = "kappa";
  if (fs::exists(dir + "/lambda.csv")) {
    if (fs::exists(dir + "/kappa.csv")) {
      throw std::runtime_error("read_draws: both kappa.csv and lambda.csv present in " + dir);
    }
    conc_name = "lambda";
  } else if (!fs::exists(dir + "/kappa.csv")) {
    throw std::runtime_error("read_draws: neither kappa.csv nor lambda.csv present in " + dir);
  }

  const ParsedFile mu_file = parse_file(mu_path);
  const ParsedFile conc_file = parse_file(dir + "/" + conc_name + ".csv");
  const ParsedFile sigma_file = parse_file(dir + "/sigma.csv");
  const bool has_imputed = fs::exists(dir + "/imputed.csv");
  const ParsedFile imp_file = has_imputed ? parse_file(dir + "/imputed.csv") : ParsedFile{};

  const auto m = static_cast<Eigen::Index>(mu_file.rows.size());
  if (m == 0) throw std::runtime_error("read_draws: " + mu_path + " has no rows");
  int d = 0;
  for (const auto& [name, value] : mu_file.rows.begin()->second) {
    (void)value;
    d = std::max(d, parse_indices(name, mu_path).first);
  }

  PosteriorDraws draws;
  draws.concentration_name = conc_name;
  draws.mu.resize(m, d);
  draws.concentration.resize(m, d);
  draws.sigma.assign(static_cast<std::size_t>(m), Matrix::Identity(d, d));

  std::vector<std::string> imputed_names;
  if (has_imputed) imputed_names = imp_file.name_order;
  draws.imputed_names = imputed_names;
  draws.imputed.resize(m, static_cast<Eigen::Index>(imputed_names.size()));

  Eigen::Index t = 0;
  for (const auto& [iteration, mu_row] : mu_file.rows) {
    const auto conc_it = conc_file.rows.find(iteration);
    const auto sigma_it = sigma_file.rows.find(iteration);
    if (conc_it == conc_file.rows.end() || sigma_it == sigma_file.rows.end()) {
      throw std::runtime_error("read_draws: iteration " + std::to_string(iteration) +
                               " missing from a parameter file in " + dir);
    }
    if (static_cast<int>(mu_row.size()) != d || static_cast<int>(conc_it->second.size()) != d) {
      throw std::runtime_error("read_draws: inconsistent parameter counts at iteration " +
                               std::to_string(iteration) + " in " + dir);
    }
    for (const auto& [name, value] : mu_row) {
      const int j = parse_indices(name, mu_path).first;
      if (j > d) throw std::runtime_error("read_draws: index out of range in " + name);
      draws.mu(t, j - 1) = value;
    }
    for (const auto& [name, value] : conc_it->second) {
      const int j = parse_indices(name, dir).first;
      if (j > d) throw std::runtime_error("read_draws: index out of range in " + name);
      draws.concentration(t, j - 1) = value;
    }
    Matrix& s = draws.sigma[static_cast<std::size_t>(t)];
    for (const auto& [name, value] : sigma_it->second) {
      const auto [j, k] = parse_indices(name, dir + "/sigma.csv");
      if (k == 0) throw std::runtime_error("read_draws: sigma name lacks a pair index");
      if (j > d || k > d) {
        throw std::runtime_error("read_draws: index out of range in " + name);
      }
      s(j - 1, k - 1) = value;
      s(k - 1, j - 1) = value;
    }
    if (has_imputed) {
      const auto imp_it = imp_file.rows.find(iteration);
      if (imp_it == imp_file.rows.end()) {
        throw std::runtime_error("read_draws: iteration " + std::to_string(iteration) +
                                 " missing from imputed.csv in " + dir);
      }
      Eigen::Index c = 0;
      for (const auto& name : imputed_names) {
        const auto found = imp_it->second.find(name);
        if (found == imp_it->second.end()) {
          throw std::runtime_error("read_draws: imputed cell " + name +
                                   " missing at iteration " + std::to_string(iteration));
        }
        draws.imputed(t, c++) = found->second;
      }
    }
    ++t;
  }
  return draws;
}

DrawsWriter::DrawsWriter(const std::string& dir, ModelKind model,
                         std::vector<std::string> imputed_names, bool append)
    : imputed_names_(std::move(imputed_names)),
      has_imputed_(!imputed_names_.empty()) {
  std::filesystem::create_directories(dir);
  mu_ = open_out(dir + "/mu.csv", append);
  concentration_ = open_out(
      dir + (model == ModelKind::kTpn ? "/kappa.csv" : "/lambda.csv"), append);
  sigma_ = open_out(dir + "/sigma.csv", append);
  if (has_imputed_) imputed_ = open_out(dir + "/imputed.csv", append);
  concentration_name_ = model == ModelKind::kTpn ? "kappa" : "lambda";
}

void DrawsWriter::add(long retained_index, const RetainedDraw& draw) {
  append_draw_rows(mu_, concentration_, sigma_, imputed_, concentration_name_,
                   imputed_names_, retained_index + 1, draw.mu, draw.concentration,
                   draw.sigma, draw.imputed);
}

void DrawsWriter::flush() {
  mu_.flush();
  concentration_.flush();
  sigma_.flush();
  if (has_imputed_) imputed_.flush();
}

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary: cannot open " + path);
  out << "name,kind,mean,q025,q975,diff_q025,diff_q975\n";
  for (const auto& row : rows) {
    out << row.name << ',' << (row.is_angle ? "angle" : "real") << ','
        << format_double(row.mean) << ',' << format_double(row.q025) << ','
        << format_double(row.q975) << ',';
    if (row.diff_q025) out << format_double(*row.diff_q025);
    out << ',';
    if (row.diff_q975) out << format_double(*row.diff_q975);
    out << '\n';
  }
}

void write_acceptance(const AcceptanceReport& report, const std::string& path) {
  nlohmann::json j;
  j["mu_rate"] = report.mu_rate;
  j["sigma_rate"] = report.sigma_rate;
  if (report.lambda_rate) j["lambda_rate"] = *report.lambda_rate;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_acceptance: cannot open " + path);
  out << j.dump(2) << '\n';
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw std::runtime_error("checkpoint: " + what + " is not an array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::runtime_error("checkpoint: ragged matrix " + what);
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return out;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw std::runtime_error("checkpoint: " + what + " is not an array");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

}  // namespace

void write_checkpoint(const Checkpoint& cp, const std::string& path) {
  nlohmann::json j;
  j["completed"] = cp.completed;
  j["retained"] = cp.retained;
  j["rng_state"] = cp.rng_state;
  j["mu_steps"] = cp.mu_steps;
  j["lambda_steps"] = cp.lambda_steps;
  j["sigma_df"] = cp.sigma_df;
  j["mu"] = vector_to_json(cp.state.mu);
  j["concentration"] = vector_to_json(cp.state.concentration);
  j["sigma"] = matrix_to_json(cp.state.sigma);
  j["r"] = matrix_to_json(cp.state.r);
  j["theta"] = matrix_to_json(cp.state.theta);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
  out << j.dump() << '\n';
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("read_checkpoint: invalid JSON: ") + e.what());
  }
  Checkpoint cp;
  try {
    cp.completed = j.at("completed").get<long>();
    cp.retained = j.at("retained").get<long>();
    cp.rng_state = j.at("rng_state").get<std::string>();
    cp.mu_steps = j.at("mu_steps").get<std::vector<double>>();
    cp.lambda_steps = j.at("lambda_steps").get<std::vector<double>>();
    cp.sigma_df = j.at("sigma_df").get<double>();
    cp.state.mu = vector_from_json(j.at("mu"), "mu");
    cp.state.concentration = vector_from_json(j.at("concentration"), "concentration");
    cp.state.sigma = matrix_from_json(j.at("sigma"), "sigma");
    cp.state.r = matrix_from_json(j.at("r"), "r");
    cp.state.theta = matrix_from_json(j.at("theta"), "theta");
    if (cp.state.r.rows() == 0) {
      // A zero-row matrix serializes as [] and loses its width.
      cp.state.r.resize(0, cp.state.mu.size());
      cp.state.theta.resize(0, cp.state.mu.size());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("read_checkpoint: ") + e.what());
  }
  return cp;
}

}  // namespace tpn
