#include "gpsabb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gpsabb {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, int row, const std::string& column) {
  double v{};
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    std::ostringstream msg;
    msg << "load_dataset: non-numeric value '" << s << "' at row " << row
        << ", column '" << column << "'";
    throw Error(msg.str());
  }
  return v;
}

std::string context_name(BalanceContext c) {
  switch (c) {
    case BalanceContext::raw: return "raw";
    case BalanceContext::within_cluster_weighted: return "within_cluster_weighted";
    case BalanceContext::matched: return "matched";
  }
  return "unknown";
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("load_dataset: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error("load_dataset: empty file " + path);
  const std::vector<std::string> header = split_csv_line(line);

  auto column_index = [&](const std::string& name) -> int {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return static_cast<int>(c);
    throw Error("load_dataset: missing column '" + name + "'");
  };

  const int w_col = column_index(schema.treatment_column);
  const int y_col = column_index(schema.outcome_column);

  std::vector<int> x_cols;
  std::vector<std::string> x_names;
  if (schema.covariate_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == w_col || static_cast<int>(c) == y_col) continue;
      x_cols.push_back(static_cast<int>(c));
      x_names.push_back(header[c]);
    }
  } else {
    for (const auto& name : schema.covariate_columns) {
      x_cols.push_back(column_index(name));
      x_names.push_back(name);
    }
  }

  std::vector<std::vector<double>> x_rows;
  std::vector<std::string> w_raw;
  std::vector<double> y_vals;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "load_dataset: row " << row << " has " << fields.size()
          << " fields, expected " << header.size();
      throw Error(msg.str());
    }
    std::vector<double> xs;
    xs.reserve(x_cols.size());
    for (std::size_t c = 0; c < x_cols.size(); ++c)
      xs.push_back(parse_double(fields[static_cast<std::size_t>(x_cols[c])], row, x_names[c]));
    x_rows.push_back(std::move(xs));
    w_raw.push_back(fields[static_cast<std::size_t>(w_col)]);
    y_vals.push_back(parse_double(fields[static_cast<std::size_t>(y_col)], row,
                                  schema.outcome_column));
  }

  LoadedDataset out;
  out.covariate_names = x_names;

  // Remap treatment labels to 1..Z in first-appearance order.
  std::vector<std::string> seen;
  std::vector<int> w_mapped;
  w_mapped.reserve(w_raw.size());
  for (std::size_t i = 0; i < w_raw.size(); ++i) {
    int id = 0;
    for (std::size_t s = 0; s < seen.size(); ++s)
      if (seen[s] == w_raw[i]) id = static_cast<int>(s) + 1;
    if (id == 0) {
      if (schema.Z > 0 && static_cast<int>(seen.size()) >= schema.Z) {
        std::ostringstream msg;
        msg << "load_dataset: unknown treatment label '" << w_raw[i] << "' at row "
            << i + 1 << " (declared Z=" << schema.Z << ")";
        throw Error(msg.str());
      }
      seen.push_back(w_raw[i]);
      id = static_cast<int>(seen.size());
    }
    w_mapped.push_back(id);
  }
  for (std::size_t s = 0; s < seen.size(); ++s)
    out.label_map[static_cast<int>(s) + 1] = seen[s];

  Dataset& d = out.data;
  d.Z = schema.Z > 0 ? schema.Z : static_cast<int>(seen.size());
  d.outcome_kind = schema.outcome_kind;
  d.levels = schema.outcome_kind == OutcomeKind::binary ? 2 : schema.ordinal_levels;
  const auto n = static_cast<Eigen::Index>(x_rows.size());
  d.X.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  d.Y.resize(n);
  d.W = std::move(w_mapped);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d.X.cols(); ++c)
      d.X(i, c) = x_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    d.Y[i] = y_vals[static_cast<std::size_t>(i)];
  }
  d.validate();
  return out;
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("save_dataset: cannot write " + path);
  outf << "W,Y";
  for (int p = 0; p < data.P(); ++p) outf << ",x" << p + 1;
  outf << "\n";
  for (int i = 0; i < data.n(); ++i) {
    outf << data.W[static_cast<std::size_t>(i)] << "," << format_double(data.Y[i]);
    for (int p = 0; p < data.P(); ++p) outf << "," << format_double(data.X(i, p));
    outf << "\n";
  }
}

void write_report_csv(const EstimateReport& report, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("write_report_csv: cannot write " + path);
  outf << "j,k,estimand,point,se,ci_low,ci_high,method,Q,M,seed\n";
  for (const auto& r : report.records) {
    outf << r.j << "," << r.k << "," << to_string(r.estimand) << ","
         << format_double(r.point) << "," << format_double(r.se) << ","
         << format_double(r.ci_low) << "," << format_double(r.ci_high) << ","
         << r.method << "," << r.Q << "," << r.M << "," << r.seed << "\n";
  }
}

void write_report_json(const EstimateReport& report, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["metadata"] = report.metadata;
  doc["contrasts"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    doc["contrasts"].push_back({{"j", r.j},
                                {"k", r.k},
                                {"estimand", to_string(r.estimand)},
                                {"point", r.point},
                                {"se", r.se},
                                {"ci_low", r.ci_low},
                                {"ci_high", r.ci_high},
                                {"method", r.method},
                                {"Q", r.Q},
                                {"M", r.M},
                                {"seed", r.seed}});
  }
  doc["balance"] = {{"before_maxmax2sb", report.balance_before.maxmax2sb},
                    {"after_maxmax2sb", report.balance_after.maxmax2sb},
                    {"after_context", context_name(report.balance_after.context)}};
  std::ofstream outf(path);
  if (!outf) throw Error("write_report_json: cannot write " + path);
  outf << doc.dump(2) << "\n";
}

void write_balance_csv(const std::vector<BalanceReport>& reports,
                       const std::vector<std::string>& covariate_names,
                       const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("write_balance_csv: cannot write " + path);
  outf << "covariate,context,max2sb\n";
  for (const auto& rep : reports) {
    for (Eigen::Index p = 0; p < rep.max2sb.size(); ++p) {
      const std::string name = p < static_cast<Eigen::Index>(covariate_names.size())
                                   ? covariate_names[static_cast<std::size_t>(p)]
                                   : "x" + std::to_string(p + 1);
      outf << name << "," << context_name(rep.context) << ","
           << format_double(rep.max2sb[p]) << "\n";
    }
  }
}

void write_sim_result_csv(const SimResult& result, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("write_sim_result_csv: cannot write " + path);
  outf << "method,j,k,coverage,mean_abs_bias,sd_abs_bias,median_se,R,skipped\n";
  for (const auto& row : result.rows) {
    outf << row.method << "," << row.j << "," << row.k << ","
         << format_double(row.coverage) << "," << format_double(row.mean_abs_bias) << ","
         << format_double(row.sd_abs_bias) << "," << format_double(row.median_se) << ","
         << result.R << "," << row.skipped << "\n";
  }
}

std::string format_sim_result(const SimResult& result) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %-8s %-9s %-24s %-10s\n", "Method", "Contrast",
                "Coverage", "Mean absolute bias (SD)", "Std. Error");
  out << buf;
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %d vs. %d  %-9.2f %.4f (%.4f)          %.4f\n",
                  row.method.c_str(), row.j, row.k, row.coverage, row.mean_abs_bias,
                  row.sd_abs_bias, row.median_se);
    out << buf;
  }
  return out.str();
}

void write_sensitivity_csv(const SensitivityGrid& grid, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw Error("write_sensitivity_csv: cannot write " + path);
  outf << "delta,phi,j,k,standardized_effect\n";
  for (std::size_t di = 0; di < grid.delta_values.size(); ++di)
    for (std::size_t pi = 0; pi < grid.phi_values.size(); ++pi)
      for (std::size_t c = 0; c < grid.contrasts.size(); ++c)
        outf << format_double(grid.delta_values[di]) << ","
             << format_double(grid.phi_values[pi]) << "," << grid.contrasts[c].first
             << "," << grid.contrasts[c].second << ","
             << format_double(grid.cells[di][pi][c]) << "\n";
}

}  // namespace gpsabb
