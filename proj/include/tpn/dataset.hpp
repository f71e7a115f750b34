#pragma once

#include <string>
#include <vector>

#include "tpn/gaussian.hpp"

namespace tpn {

enum class AngleUnit { kRadians, kDegrees };

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Angular observations with a missingness mask. Masked cells hold a
/// placeholder (zero) that is never read; observed cells are wrapped.
/// A column may not be entirely missing. Zero-row datasets are legal and
/// stand for "no data" (prior-only inference).
struct Dataset {
  Dataset(Matrix angles_in, MissingMask mask_in,
          std::vector<std::string> column_names_in);

  [[nodiscard]] int n() const { return static_cast<int>(angles.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(angles.cols()); }
  [[nodiscard]] int num_missing() const;

  Matrix angles;
  MissingMask mask;  // true = missing
  std::vector<std::string> column_names;
};

/// Parses a rectangular CSV with a header row. "NA" or an empty cell marks
/// a missing value; other cells must parse as decimal numbers. Degrees are
/// converted to radians; everything is wrapped. Throws std::runtime_error
/// on ragged rows, unparseable cells, or an all-missing column, naming the
/// offending location.
Dataset read_csv(const std::string& path, AngleUnit unit);

/// Writes radians with shortest round-trip formatting; missing cells as
/// "NA". read_csv(write_csv(ds)) reproduces the dataset bit-exactly.
void write_csv(const Dataset& dataset, const std::string& path);

}  // namespace tpn
