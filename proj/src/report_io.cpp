#include "riskflow/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "riskflow/error.hpp"

namespace riskflow {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, std::size_t line_no,
                              std::size_t expected) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(start, end - start);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  if (out.size() != expected) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                  " fields");
  }
  return out;
}

std::size_t lookup(const std::vector<double>& values, double v, const char* what) {
  std::size_t best = 0;
  double err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::abs(values[i] - v);
    if (d < err) {
      err = d;
      best = i;
    }
  }
  if (values.empty() || err > 1e-9 * (1.0 + std::abs(v))) {
    throw IoError(std::string("value ") + format_double(v) + " is not on the " + what + " grid");
  }
  return best;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_marginals_csv(const std::filesystem::path& path, const std::string& label,
                         const std::vector<double>& times, const std::vector<DiscreteDistribution>& slices) {
  auto out = open_out(path);
  out << "t," << label << ",mass\n";
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const auto& vals = slices[k].values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out << format_double(times[k]) << ',' << format_double(vals[i]) << ',' << format_double(slices[k].mass()[i])
          << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

TrajectoryDistribution read_marginals_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::string label = "value";
  if (auto a = line.find(','), b = line.rfind(','); a != std::string::npos && b > a) {
    label = line.substr(a + 1, b - a - 1);
  }
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_time;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto row = parse_row(line, path, line_no, 3);
    by_time[row[0]].first.push_back(row[1]);
    by_time[row[0]].second.push_back(row[2]);
  }
  TrajectoryDistribution traj;
  for (auto& [t, vm] : by_time) {
    traj.times.push_back(t);
    traj.slices.emplace_back(std::vector<Axis>{Axis{label, std::move(vm.first)}}, std::move(vm.second));
  }
  return traj;
}

void write_policy_csv(const std::filesystem::path& path, const MarkovPolicy& policy, const StateLayout& layout) {
  auto out = open_out(path);
  out << "t,x,y,a,prob\n";
  const std::size_t ny = layout.y_values.size();
  for (std::size_t k = 0; k < policy.num_times(); ++k) {
    for (std::size_t z = 0; z < policy.num_states(); ++z) {
      if (!policy.reachable(k, z)) continue;
      const auto cell = policy.cell(k, z);
      for (std::size_t a = 0; a < cell.size(); ++a) {
        out << format_double(layout.times[k]) << ',' << format_double(layout.x_values[z / ny]) << ','
            << format_double(layout.y_values[z % ny]) << ',' << format_double(layout.action_values[a]) << ','
            << format_double(cell[a]) << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

MarkovPolicy read_policy_csv(const std::filesystem::path& path, const StateLayout& layout) {
  auto in = open_in(path);
  const std::size_t nt = layout.times.size();
  const std::size_t ny = layout.y_values.size();
  const std::size_t nz = layout.num_states();
  const std::size_t na = layout.action_values.size();
  MarkovPolicy policy(nt, nz, na);
  std::vector<double> probs(nt * nz * na, 0.0);
  std::vector<bool> seen(nt * nz, false);
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto row = parse_row(line, path, line_no, 5);
    const std::size_t k = lookup(layout.times, row[0], "time");
    const std::size_t x = lookup(layout.x_values, row[1], "state");
    const std::size_t y = lookup(layout.y_values, row[2], "cost");
    const std::size_t a = lookup(layout.action_values, row[3], "action");
    const std::size_t z = x * ny + y;
    probs[(k * nz + z) * na + a] = row[4];
    seen[k * nz + z] = true;
  }
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t z = 0; z < nz; ++z) {
      if (!seen[k * nz + z]) continue;
      policy.set_cell(k, z, std::span<const double>(probs.data() + (k * nz + z) * na, na), true);
    }
  }
  return policy;
}

void write_trajectory_csv(const std::filesystem::path& path, const SolveReport& report) {
  auto out = open_out(path);
  out << "t,x,y,a,mass\n";
  const auto& L = report.layout;
  const std::size_t nt = L.times.size();
  const std::size_t ny = L.y_values.size();
  const std::size_t nz = L.num_states();
  const std::size_t na = L.action_values.size();
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t a = 0; a < na; ++a) {
        const double m = report.solution(static_cast<Eigen::Index>((k * nz + z) * na + a));
        out << format_double(L.times[k]) << ',' << format_double(L.x_values[z / ny]) << ','
            << format_double(L.y_values[z % ny]) << ',' << format_double(L.action_values[a]) << ','
            << format_double(m) << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& samples) {
  auto out = open_out(path);
  out << "sample\n";
  for (double y : samples) out << format_double(y) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json report_to_json(const SolveReport& r) {
  return {{"rho_star", r.rho_star},
          {"duality_gap", r.duality_gap},
          {"iterations", r.iterations},
          {"stationarity_w1", r.stationarity_w1},
          {"boundary_mass", r.boundary_mass},
          {"strictness_fraction", r.strictness_fraction},
          {"status", to_string(r.status)},
          {"risk", to_string(r.risk.kind)},
          {"theta", r.risk.theta},
          {"beta", r.risk.beta},
          {"rho_linear", r.rho_linear},
          {"primal_residual", r.primal_residual},
          {"fw_iterations", r.fw_iterations},
          {"fw_gap", r.fw_gap},
          {"policy_reproduction_error", r.policy_reproduction_error}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_solve_outputs(const std::filesystem::path& dir, const SolveReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_json(dir / "report.json", report_to_json(report));
  write_marginals_csv(dir / "marginal_x.csv", "x", report.layout.times, report.x_marginals());
  write_marginals_csv(dir / "marginal_y.csv", "y", report.layout.times, report.y_marginals());
  write_policy_csv(dir / "policy.csv", report.policy, report.layout);
}

}  // namespace riskflow
