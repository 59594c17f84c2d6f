#include "smve/harness/curve_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smve::harness {

std::vector<std::string> curve_columns(ExperimentKind kind) {
  std::vector<std::string> cols{"step", "avg_return", "expected_rollout_len", "model_loss"};
  if (kind == ExperimentKind::kCorrelation) {
    cols.insert(cols.end(), {"r_learned", "r_ensemble", "r_combined"});
  }
  return cols;
}

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> CurveLog::columns() const { return curve_columns(kind); }

void CurveLog::write_csv(std::ostream& out) const {
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  const auto cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  const auto field = [](const std::optional<double>& v) { return v ? format_metric(*v) : std::string(); };
  for (const auto& row : rows) {
    out << row.step << ',' << field(row.avg_return) << ',' << field(row.expected_rollout_len) << ','
        << field(row.model_loss);
    if (kind == ExperimentKind::kCorrelation) {
      out << ',' << field(row.r_learned) << ',' << field(row.r_ensemble) << ',' << field(row.r_combined);
    }
    out << '\n';
  }
}

std::string CurveLog::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

void CurveLog::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out);
}

CurveLog CurveLog::parse_csv(const std::string& text) {
  CurveLog log;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) log.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header.empty()) {
      header = cells;
      if (header == curve_columns(ExperimentKind::kCorrelation)) {
        log.kind = ExperimentKind::kCorrelation;
      } else if (header != curve_columns(ExperimentKind::kControl)) {
        throw std::runtime_error("unrecognised curve CSV header");
      }
      continue;
    }
    if (cells.size() != header.size()) throw std::runtime_error("curve CSV row has wrong field count");
    const auto value = [&](std::size_t i) -> std::optional<double> {
      if (cells[i].empty()) return std::nullopt;
      return std::stod(cells[i]);
    };
    CurveRow row;
    row.step = std::stol(cells[0]);
    row.avg_return = value(1);
    row.expected_rollout_len = value(2);
    row.model_loss = value(3);
    if (log.kind == ExperimentKind::kCorrelation) {
      row.r_learned = value(4);
      row.r_ensemble = value(5);
      row.r_combined = value(6);
    }
    log.rows.push_back(row);
  }
  return log;
}

}  // namespace smve::harness
