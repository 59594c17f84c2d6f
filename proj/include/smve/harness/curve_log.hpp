#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smve/harness/config.hpp"

namespace smve::harness {

struct CurveRow {
  long step = 0;
  std::optional<double> avg_return;
  std::optional<double> expected_rollout_len;
  std::optional<double> model_loss;
  std::optional<double> r_learned;
  std::optional<double> r_ensemble;
  std::optional<double> r_combined;
};

/// Time series of logged metrics for one run.
///
/// CSV layout: '#'-prefixed "key=value" metadata lines, then the header
/// step,avg_return,expected_rollout_len,model_loss and, for correlation runs,
/// r_learned,r_ensemble,r_combined. Missing metrics are empty fields.
struct CurveLog {
  ExperimentKind kind = ExperimentKind::kControl;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<CurveRow> rows;

  std::vector<std::string> columns() const;
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  void save(const std::string& path) const;
  static CurveLog parse_csv(const std::string& text);
};

std::vector<std::string> curve_columns(ExperimentKind kind);
/// Fixed-precision text for a metric value.
std::string format_metric(double v);

}  // namespace smve::harness
