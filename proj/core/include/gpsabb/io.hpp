#pragma once

#include <map>
#include <string>
#include <vector>

#include "gpsabb/pipeline.hpp"
#include "gpsabb/sensitivity.hpp"
#include "gpsabb/simlab.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

/// Column spec for a delimited text table with a header row.
struct DatasetSchema {
  std::string treatment_column;
  std::string outcome_column;
  std::vector<std::string> covariate_columns;  // empty: all remaining columns
  OutcomeKind outcome_kind = OutcomeKind::binary;
  int ordinal_levels = 5;
  int Z = 0;  // 0: infer from data
};

struct LoadedDataset {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::map<int, std::string> label_map;  // internal 1..Z -> original label text
};

LoadedDataset load_dataset(const std::string& path, const DatasetSchema& schema);

// Full precision (round-trips bit-exactly through load_dataset).
void save_dataset(const Dataset& data, const std::string& path);

// CSV: one record per contrast plus a structured key-value JSON document.
void write_report_csv(const EstimateReport& report, const std::string& path);
void write_report_json(const EstimateReport& report, const std::string& path);

// Plot-ready table: covariate, context, Max2SB.
void write_balance_csv(const std::vector<BalanceReport>& reports,
                       const std::vector<std::string>& covariate_names,
                       const std::string& path);

void write_sim_result_csv(const SimResult& result, const std::string& path);
std::string format_sim_result(const SimResult& result);  // Table-style text

void write_sensitivity_csv(const SensitivityGrid& grid, const std::string& path);

}  // namespace gpsabb
