#include "metabo/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace metabo {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_offline_csv(const OfflineMatrix& data, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "task_id,input_index,y\n";
  for (int i = 0; i < data.n_tasks(); ++i)
    for (int j = 0; j < data.n_inputs(); ++j)
      if (data.mask.size() == 0 || data.mask(i, j))
        out << i << ',' << j << ',' << format_double(data.values(i, j)) << '\n';
}

OfflineMatrix read_offline_csv(const std::string& path, int n_tasks, int n_inputs) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"task_id", "input_index", "y"})
    throw std::runtime_error(path + ": expected header task_id,input_index,y");

  struct Entry {
    int i, j;
    double y;
  };
  std::vector<Entry> entries;
  int max_i = -1, max_j = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) throw std::runtime_error(path + ": malformed row: " + line);
    Entry e{std::stoi(fields[0]), std::stoi(fields[1]), std::stod(fields[2])};
    if (e.i < 0 || e.j < 0) throw std::runtime_error(path + ": negative index");
    max_i = std::max(max_i, e.i);
    max_j = std::max(max_j, e.j);
    entries.push_back(e);
  }
  const int n = n_tasks > 0 ? n_tasks : max_i + 1;
  const int m = n_inputs > 0 ? n_inputs : max_j + 1;
  OfflineMatrix data;
  data.values = Matrix::Zero(n, m);
  data.mask.setConstant(n, m, false);
  for (const Entry& e : entries) {
    if (e.i >= n || e.j >= m) throw std::runtime_error(path + ": index outside declared shape");
    data.values(e.i, e.j) = e.y;
    data.mask(e.i, e.j) = true;
  }
  return data;
}

void write_continuous_csv(const Matrix& inputs, const Matrix& observations,
                          const std::string& path) {
  if (observations.cols() != inputs.rows())
    throw std::invalid_argument("continuous csv: observation/grid mismatch");
  std::ofstream out = open_out(path);
  out << "task_id";
  for (int j = 0; j < inputs.cols(); ++j) out << ",x_" << (j + 1);
  out << ",y\n";
  for (int i = 0; i < observations.rows(); ++i)
    for (int p = 0; p < inputs.rows(); ++p) {
      out << i;
      for (int j = 0; j < inputs.cols(); ++j) out << ',' << format_double(inputs(p, j));
      out << ',' << format_double(observations(i, p)) << '\n';
    }
}

ContinuousDataset read_continuous_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_csv(line);
  if (header.size() < 3 || header.front() != "task_id" || header.back() != "y")
    throw std::runtime_error(path + ": expected header task_id,x_1..x_d,y");
  const int d = static_cast<int>(header.size()) - 2;

  std::vector<std::vector<Vector>> points_per_task;
  std::vector<std::vector<double>> ys_per_task;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != d + 2)
      throw std::runtime_error(path + ": malformed row: " + line);
    const int task = std::stoi(fields[0]);
    if (task < 0) throw std::runtime_error(path + ": negative task id");
    if (task >= static_cast<int>(points_per_task.size())) {
      points_per_task.resize(task + 1);
      ys_per_task.resize(task + 1);
    }
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = std::stod(fields[1 + j]);
    points_per_task[task].push_back(x);
    ys_per_task[task].push_back(std::stod(fields[d + 1]));
  }
  if (points_per_task.empty()) throw std::runtime_error(path + ": no data rows");

  const std::size_t m = points_per_task[0].size();
  for (std::size_t i = 0; i < points_per_task.size(); ++i) {
    if (points_per_task[i].size() != m)
      throw std::runtime_error(path + ": tasks do not share a common input grid");
    for (std::size_t p = 0; p < m; ++p)
      if ((points_per_task[i][p] - points_per_task[0][p]).cwiseAbs().maxCoeff() > 1e-12)
        throw std::runtime_error(path + ": tasks do not share a common input grid");
  }

  ContinuousDataset data;
  data.inputs.resize(m, d);
  for (std::size_t p = 0; p < m; ++p) data.inputs.row(p) = points_per_task[0][p].transpose();
  data.observations.resize(points_per_task.size(), m);
  for (std::size_t i = 0; i < points_per_task.size(); ++i)
    for (std::size_t p = 0; p < m; ++p) data.observations(i, p) = ys_per_task[i][p];
  return data;
}

void write_truth_sidecar(const ExperimentConfig& cfg, const OfflineDataset& data,
                         const std::string& path) {
  nlohmann::json j;
  j["setting"] = cfg.setting == Setting::Discrete ? "discrete" : "continuous";
  j["m"] = cfg.m;
  j["n"] = cfg.n;
  j["d"] = cfg.d;
  j["k"] = cfg.k;
  j["noise_sd"] = cfg.noise_sd;
  j["mask_rate"] = cfg.mask_rate;
  j["lengthscale"] = cfg.kernel.lengthscale;
  j["signal_var"] = cfg.kernel.signal_var;
  j["seed"] = cfg.seed;
  auto& inputs = j["inputs"] = nlohmann::json::array();
  for (int i = 0; i < data.inputs.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < data.inputs.cols(); ++c) row.push_back(data.inputs(i, c));
    inputs.push_back(std::move(row));
  }
  auto& mean = j["mean"] = nlohmann::json::array();
  for (int i = 0; i < data.truth.mean.size(); ++i) mean.push_back(data.truth.mean[i]);
  auto& cov = j["cov"] = nlohmann::json::array();
  for (int i = 0; i < data.truth.cov.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < data.truth.cov.cols(); ++c) row.push_back(data.truth.cov(i, c));
    cov.push_back(std::move(row));
  }
  open_out(path) << j.dump() << '\n';
}

OfflineDataset read_truth_sidecar(const std::string& path) {
  nlohmann::json j;
  open_in(path) >> j;
  OfflineDataset data;
  const auto& inputs = j.at("inputs");
  const int m = static_cast<int>(inputs.size());
  const int d = m > 0 ? static_cast<int>(inputs[0].size()) : 0;
  data.inputs.resize(m, d);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < d; ++c) data.inputs(i, c) = inputs[i][c].get<double>();
  data.truth.mean.resize(m);
  for (int i = 0; i < m; ++i) data.truth.mean[i] = j.at("mean")[i].get<double>();
  data.truth.cov.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < m; ++c) data.truth.cov(i, c) = j.at("cov")[i][c].get<double>();
  data.truth.noise_sd = j.at("noise_sd").get<double>();
  return data;
}

void write_results_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "method,trial,t,y_best,r_t,R_t\n";
  for (const TrialRow& row : result.rows)
    out << method_name(row.method) << ',' << row.trial << ',' << row.t << ','
        << format_double(row.y_best) << ',' << format_double(row.r_t) << ','
        << format_double(row.big_r_t) << '\n';
}

void write_aggregate_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "method,t,mean_r,se_r,mean_R,se_R,mean_ybest,se_ybest\n";
  for (const AggregateRow& row : result.aggregate)
    out << method_name(row.method) << ',' << row.t << ',' << format_double(row.mean_r) << ','
        << format_double(row.se_r) << ',' << format_double(row.mean_big_r) << ','
        << format_double(row.se_big_r) << ',' << format_double(row.mean_ybest) << ','
        << format_double(row.se_ybest) << '\n';
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv(line) != std::vector<std::string>{"method", "t", "mean_r", "se_r", "mean_R",
                                                  "se_R", "mean_ybest", "se_ybest"})
    throw std::runtime_error(path + ": expected aggregate csv header");
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 8) throw std::runtime_error(path + ": malformed row: " + line);
    AggregateRow row;
    row.method = parse_method(fields[0]);
    row.t = std::stoi(fields[1]);
    row.mean_r = std::stod(fields[2]);
    row.se_r = std::stod(fields[3]);
    row.mean_big_r = std::stod(fields[4]);
    row.se_big_r = std::stod(fields[5]);
    row.mean_ybest = std::stod(fields[6]);
    row.se_ybest = std::stod(fields[7]);
    rows.push_back(row);
  }
  return rows;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Series {
  Method method;
  std::vector<double> t, mean, se;
};

}  // namespace

void write_svg_plot(const std::vector<AggregateRow>& aggregate, const std::string& metric,
                    const std::string& path) {
  double (*pick_mean)(const AggregateRow&) = nullptr;
  double (*pick_se)(const AggregateRow&) = nullptr;
  if (metric == "r") {
    pick_mean = [](const AggregateRow& r) { return r.mean_r; };
    pick_se = [](const AggregateRow& r) { return r.se_r; };
  } else if (metric == "R") {
    pick_mean = [](const AggregateRow& r) { return r.mean_big_r; };
    pick_se = [](const AggregateRow& r) { return r.se_big_r; };
  } else if (metric == "ybest") {
    pick_mean = [](const AggregateRow& r) { return r.mean_ybest; };
    pick_se = [](const AggregateRow& r) { return r.se_ybest; };
  } else {
    throw std::invalid_argument("unknown plot metric: " + metric);
  }

  std::vector<Series> series;
  for (const AggregateRow& row : aggregate) {
    Series* s = nullptr;
    for (Series& cand : series)
      if (cand.method == row.method) s = &cand;
    if (!s) {
      series.push_back({row.method, {}, {}, {}});
      s = &series.back();
    }
    s->t.push_back(row.t);
    s->mean.push_back(pick_mean(row));
    s->se.push_back(pick_se(row));
  }
  if (series.empty()) throw std::invalid_argument("empty aggregate");

  double tmin = 1e300, tmax = -1e300, vmin = 1e300, vmax = -1e300;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      vmin = std::min(vmin, s.mean[i] - s.se[i]);
      vmax = std::max(vmax, s.mean[i] + s.se[i]);
    }
  if (tmax <= tmin) tmax = tmin + 1.0;
  const double pad = 0.05 * std::max(vmax - vmin, 1e-12);
  vmin -= pad;
  vmax += pad;

  const double w = 640, h = 420, ml = 64, mr = 16, mt = 20, mb = 44;
  const auto xpix = [&](double t) { return ml + (t - tmin) / (tmax - tmin) * (w - ml - mr); };
  const auto ypix = [&](double v) { return h - mb - (v - vmin) / (vmax - vmin) * (h - mt - mb); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double tv = tmin + (tmax - tmin) * tick / 4.0;
    const double vv = vmin + (vmax - vmin) * tick / 4.0;
    out << "<text x=\"" << xpix(tv) << "\" y=\"" << h - mb + 16
        << "\" text-anchor=\"middle\">" << format_double(std::round(tv)) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << ypix(vv) + 4
        << "\" text-anchor=\"end\">" << format_double(vv) << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 8
      << "\" text-anchor=\"middle\">iteration t</text>\n";
  out << "<text x=\"14\" y=\"" << (mt + h - mb) / 2 << "\" text-anchor=\"middle\" transform=\""
      << "rotate(-90 14 " << (mt + h - mb) / 2 << ")\">" << metric << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % 5];
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i)
      out << xpix(s.t[i]) << ',' << ypix(s.mean[i] + s.se[i]) << ' ';
    for (std::size_t i = s.t.size(); i-- > 0;)
      out << xpix(s.t[i]) << ',' << ypix(s.mean[i] - s.se[i]) << ' ';
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i)
      out << xpix(s.t[i]) << ',' << ypix(s.mean[i]) << ' ';
    out << "\"/>\n";
    const double ly = mt + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << w - mr - 150 << "\" y1=\"" << ly << "\" x2=\"" << w - mr - 126
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - mr - 120 << "\" y=\"" << ly + 4 << "\">"
        << method_name(s.method) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_report_csv(const ValidationReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "check,statistic,threshold,pass\n";
  for (const CheckRow& row : report.rows) {
    std::string name = row.check;
    std::replace(name.begin(), name.end(), ',', ';');
    out << name << ',' << format_double(row.statistic) << ',' << format_double(row.threshold)
        << ',' << (row.pass ? 1 : 0) << '\n';
  }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return entries;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "setting") {
    if (value == "discrete")
      cfg.setting = Setting::Discrete;
    else if (value == "continuous")
      cfg.setting = Setting::Continuous;
    else
      throw std::invalid_argument("unknown setting: " + value);
  } else if (key == "m") {
    cfg.m = std::stoi(value);
  } else if (key == "n") {
    cfg.n = std::stoi(value);
  } else if (key == "t") {
    cfg.t_steps = std::stoi(value);
  } else if (key == "d") {
    cfg.d = std::stoi(value);
  } else if (key == "k") {
    cfg.k = std::stoi(value);
  } else if (key == "noise") {
    cfg.noise_sd = std::stod(value);
  } else if (key == "mask-rate") {
    cfg.mask_rate = std::stod(value);
  } else if (key == "lengthscale") {
    cfg.kernel.lengthscale = std::stod(value);
  } else if (key == "signal-var") {
    cfg.kernel.signal_var = std::stod(value);
  } else if (key == "trials") {
    cfg.trials = std::stoi(value);
  } else if (key == "delta") {
    cfg.delta = std::stod(value);
  } else if (key == "seed") {
    cfg.seed = std::stoull(value);
  } else if (key == "bandwidth") {
    cfg.bandwidth = std::stod(value);
  } else if (key == "train-fraction") {
    cfg.train_fraction = std::stod(value);
  } else if (key == "pi-target") {
    cfg.pi_target = std::stod(value);
  } else if (key == "jobs") {
    cfg.jobs = std::stoi(value);
  } else if (key == "methods") {
    cfg.methods.clear();
    std::stringstream ss(value);
    std::string name;
    while (std::getline(ss, name, '+')) cfg.methods.push_back(parse_method(name));
    if (cfg.methods.empty()) throw std::invalid_argument("empty methods list");
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "setting=" << (cfg.setting == Setting::Discrete ? "discrete" : "continuous") << '\n';
  os << "m=" << cfg.m << '\n';
  os << "n=" << cfg.n << '\n';
  os << "t=" << cfg.t_steps << '\n';
  os << "d=" << cfg.d << '\n';
  os << "k=" << cfg.k << '\n';
  os << "noise=" << format_double(cfg.noise_sd) << '\n';
  os << "mask-rate=" << format_double(cfg.mask_rate) << '\n';
  os << "lengthscale=" << format_double(cfg.kernel.lengthscale) << '\n';
  os << "signal-var=" << format_double(cfg.kernel.signal_var) << '\n';
  os << "trials=" << cfg.trials << '\n';
  os << "delta=" << format_double(cfg.delta) << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "bandwidth=" << format_double(cfg.bandwidth) << '\n';
  os << "train-fraction=" << format_double(cfg.train_fraction) << '\n';
  if (cfg.pi_target) os << "pi-target=" << format_double(*cfg.pi_target) << '\n';
  os << "jobs=" << cfg.jobs << '\n';
  os << "methods=";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    os << (i ? "+" : "") << method_name(cfg.methods[i]);
  os << '\n';
  return os.str();
}

}  // namespace metabo
