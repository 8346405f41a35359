#pragma once

#include <map>
#include <string>

#include "metabo/bench.hpp"
#include "metabo/validate.hpp"

namespace metabo {

/// Fixed-format float used by every writer so identical runs produce
/// identical bytes.
std::string format_double(double v);

// --- offline (discrete) dataset CSV: header `task_id,input_index,y`,
//     absent rows are masked entries ---
void write_offline_csv(const OfflineMatrix& data, const std::string& path);
OfflineMatrix read_offline_csv(const std::string& path, int n_tasks = -1, int n_inputs = -1);

// --- continuous dataset CSV: header `task_id,x_1..x_d,y`; all tasks must
//     share the same grid rows (enforced on load) ---
void write_continuous_csv(const Matrix& inputs, const Matrix& observations,
                          const std::string& path);
struct ContinuousDataset {
  Matrix inputs;        // M x d
  Matrix observations;  // N x M
};
ContinuousDataset read_continuous_csv(const std::string& path);

/// Ground-truth sidecar for validation runs: config echo plus the prior.
void write_truth_sidecar(const ExperimentConfig& cfg, const OfflineDataset& data,
                         const std::string& path);
OfflineDataset read_truth_sidecar(const std::string& path);

// --- experiment results ---
void write_results_csv(const ExperimentResult& result, const std::string& path);
void write_aggregate_csv(const ExperimentResult& result, const std::string& path);
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);

/// Self-contained SVG line plot of one aggregate column per method with a
/// shaded +/- 1 standard-error band. `metric` is one of r, R, ybest.
void write_svg_plot(const std::vector<AggregateRow>& aggregate, const std::string& metric,
                    const std::string& path);

// --- validation reports ---
void write_report_csv(const ValidationReport& report, const std::string& path);

// --- flat key=value config files ---
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace metabo
