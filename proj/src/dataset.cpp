#include "tpn/dataset.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "tpn/angles.hpp"

namespace tpn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  if (line.empty()) out.emplace_back();
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dataset::Dataset(Matrix angles_in, MissingMask mask_in,
                 std::vector<std::string> column_names_in)
    : angles(std::move(angles_in)),
      mask(std::move(mask_in)),
      column_names(std::move(column_names_in)) {
  const Eigen::Index d = angles.cols();
  if (d < 1) throw std::invalid_argument("Dataset: needs at least one column");
  if (mask.rows() != angles.rows() || mask.cols() != d ||
      static_cast<Eigen::Index>(column_names.size()) != d) {
    throw std::invalid_argument("Dataset: shape mismatch between angles, mask, names");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    bool any_observed = angles.rows() == 0;
    for (Eigen::Index i = 0; i < angles.rows(); ++i) {
      if (mask(i, j)) {
        angles(i, j) = 0.0;
      } else {
        angles(i, j) = wrap(angles(i, j)).rad();
        any_observed = true;
      }
    }
    if (!any_observed) {
      throw std::invalid_argument("Dataset: column \"" + column_names[static_cast<std::size_t>(j)] +
                                  "\" is entirely missing");
    }
  }
}

int Dataset::num_missing() const {
  int count = 0;
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      if (mask(i, j)) ++count;
    }
  }
  return count;
}

Dataset read_csv(const std::string& path, AngleUnit unit) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("read_csv: " + path + " is empty");

  std::vector<std::string> names;
  for (const auto& h : split_csv_line(lines[0])) names.push_back(trim(h));
  const auto d = static_cast<Eigen::Index>(names.size());
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);

  Matrix angles = Matrix::Zero(n, d);
  MissingMask mask = MissingMask::Constant(n, d, false);
  const double scale = unit == AngleUnit::kDegrees ? kPi / 180.0 : 1.0;

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cells = split_csv_line(lines[static_cast<std::size_t>(i + 1)]);
    if (static_cast<Eigen::Index>(cells.size()) != d) {
      throw std::runtime_error("read_csv: row " + std::to_string(i + 2) + " of " + path +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(d));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::string cell = trim(cells[static_cast<std::size_t>(j)]);
      if (cell.empty() || cell == "NA") {
        mask(i, j) = true;
        continue;
      }
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("read_csv: unparseable cell \"" + cell + "\" at row " +
                                 std::to_string(i + 2) + ", column \"" +
                                 names[static_cast<std::size_t>(j)] + "\" of " + path);
      }
      angles(i, j) = scale * value;
    }
  }

  try {
    return Dataset(std::move(angles), std::move(mask), std::move(names));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("read_csv: " + path + ": " + e.what());
  }
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t j = 0; j < dataset.column_names.size(); ++j) {
    if (j > 0) out << ',';
    out << dataset.column_names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < dataset.angles.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.angles.cols(); ++j) {
      if (j > 0) out << ',';
      if (dataset.mask(i, j)) {
        out << "NA";
      } else {
        out << format_double(dataset.angles(i, j));
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace tpn
