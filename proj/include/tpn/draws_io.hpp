#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "tpn/diagnostics.hpp"
#include "tpn/mcmc.hpp"

namespace tpn {

/// Writes one CSV per parameter block into `dir` (created if needed):
/// mu.csv, kappa.csv or lambda.csv, sigma.csv, and imputed.csv when any
/// cell was masked. Rows are "iteration,param_name,value" with 1-based
/// iterations and shortest-round-trip decimals. sigma rows carry the strict
/// upper triangle except at d = 1, where the lone diagonal entry stands in
/// so that every draw appears in the file.
void write_draws(const PosteriorDraws& draws, const std::string& dir);

/// Exact inverse of write_draws.
PosteriorDraws read_draws(const std::string& dir);

/// Incremental writer used while a chain runs; same format as write_draws.
class DrawsWriter {
 public:
  /// `append` continues existing files (resume) instead of truncating.
  DrawsWriter(const std::string& dir, ModelKind model,
              std::vector<std::string> imputed_names, bool append);

  void add(long retained_index, const RetainedDraw& draw);
  void flush();

 private:
  std::ofstream mu_, concentration_, sigma_, imputed_;
  std::vector<std::string> imputed_names_;
  std::string concentration_name_;
  bool has_imputed_;
};

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path);

void write_acceptance(const AcceptanceReport& report, const std::string& path);

void write_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace tpn
