// Copyright 2026 The mbcredit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-iteration training log. The CSV holds only seed-determined values so
// two runs with the same seed write identical files; wall-clock time goes to
// a separate timing file.

#ifndef MBCREDIT_HARNESS_RUNLOG_HPP_
#define MBCREDIT_HARNESS_RUNLOG_HPP_

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"

namespace mbcredit::harness {

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct RunLogRow {
  int iteration = 0;
  long long env_steps = 0;  // cumulative
  double mean_episode_reward = kNotApplicable;
  double reward_std = kNotApplicable;
  std::vector<double> mean_abs_action;  // per agent
  double model_delta_mse = kNotApplicable;
  double model_reward_mse = kNotApplicable;
  double critic_loss = kNotApplicable;
  std::vector<double> mean_psi;  // per agent
  std::string status = "ok";
  double wall_seconds = 0.0;  // timing file only

  bool ok() const { return status == "ok"; }
};

inline std::string FormatFloat(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double ParseFloat(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ConfigError("runlog: '" + s + "' is not a number");
  }
  return v;
}

// Same value, treating NaN as equal to NaN.
inline bool SameFloat(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

inline bool SameRow(const RunLogRow& a, const RunLogRow& b) {
  auto same_vec = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!SameFloat(x[k], y[k])) return false;
    }
    return true;
  };
  return a.iteration == b.iteration && a.env_steps == b.env_steps &&
         SameFloat(a.mean_episode_reward, b.mean_episode_reward) &&
         SameFloat(a.reward_std, b.reward_std) &&
         same_vec(a.mean_abs_action, b.mean_abs_action) &&
         SameFloat(a.model_delta_mse, b.model_delta_mse) &&
         SameFloat(a.model_reward_mse, b.model_reward_mse) &&
         SameFloat(a.critic_loss, b.critic_loss) &&
         same_vec(a.mean_psi, b.mean_psi) && a.status == b.status;
}

inline std::string RunLogHeader(int n_agents) {
  std::string h = "iteration,env_steps,mean_episode_reward,reward_std";
  for (int i = 0; i < n_agents; ++i) h += ",mean_abs_action_" + std::to_string(i);
  h += ",model_delta_mse,model_reward_mse,critic_loss";
  for (int i = 0; i < n_agents; ++i) h += ",mean_psi_" + std::to_string(i);
  h += ",status";
  return h;
}

inline std::string FormatRow(const RunLogRow& r) {
  std::string s = std::to_string(r.iteration) + "," + std::to_string(r.env_steps) +
                  "," + FormatFloat(r.mean_episode_reward) + "," +
                  FormatFloat(r.reward_std);
  for (double v : r.mean_abs_action) s += "," + FormatFloat(v);
  s += "," + FormatFloat(r.model_delta_mse) + "," +
       FormatFloat(r.model_reward_mse) + "," + FormatFloat(r.critic_loss);
  for (double v : r.mean_psi) s += "," + FormatFloat(v);
  // Status text must not break the CSV.
  std::string status = r.status;
  for (char& c : status) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  s += "," + status;
  return s;
}

// Append-only CSV writer; every row is flushed as soon as it is added.
class RunLogWriter {
 public:
  RunLogWriter(const std::string& csv_path, const std::string& timing_path,
               int n_agents)
      : n_agents_(n_agents), csv_(csv_path), timing_(timing_path) {
    if (!csv_ || !timing_) {
      throw ConfigError("cannot open run log files at " + csv_path);
    }
    csv_ << RunLogHeader(n_agents) << "\n";
    timing_ << "iteration,wall_seconds\n";
    csv_.flush();
    timing_.flush();
  }

  void Append(const RunLogRow& row) {
    MBCREDIT_CHECK(static_cast<int>(row.mean_abs_action.size()) == n_agents_ &&
                       static_cast<int>(row.mean_psi.size()) == n_agents_,
                   "run log row has the wrong agent count");
    csv_ << FormatRow(row) << "\n";
    timing_ << row.iteration << "," << FormatFloat(row.wall_seconds) << "\n";
    csv_.flush();
    timing_.flush();
  }

 private:
  int n_agents_;
  std::ofstream csv_;
  std::ofstream timing_;
};

namespace internal {

inline std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace internal

struct RunLog {
  int n_agents = 0;
  std::vector<RunLogRow> rows;

  bool completed() const { return rows.empty() || rows.back().ok(); }
};

inline RunLog ReadRunLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read run log " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("run log " + path + " is empty");
  const auto header = internal::SplitCsv(line);
  int n = 0;
  for (const auto& h : header) {
    if (h.rfind("mean_abs_action_", 0) == 0) ++n;
  }
  const std::size_t expected = 4 + 2 * static_cast<std::size_t>(n) + 3 + 1;
  if (header.size() != expected) {
    throw ConfigError("run log " + path + " has an unexpected header");
  }
  RunLog log;
  log.n_agents = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = internal::SplitCsv(line);
    if (f.size() != expected) {
      throw ConfigError("run log " + path + ": malformed row '" + line + "'");
    }
    RunLogRow r;
    std::size_t k = 0;
    r.iteration = std::stoi(f[k++]);
    r.env_steps = std::stoll(f[k++]);
    r.mean_episode_reward = ParseFloat(f[k++]);
    r.reward_std = ParseFloat(f[k++]);
    for (int i = 0; i < n; ++i) r.mean_abs_action.push_back(ParseFloat(f[k++]));
    r.model_delta_mse = ParseFloat(f[k++]);
    r.model_reward_mse = ParseFloat(f[k++]);
    r.critic_loss = ParseFloat(f[k++]);
    for (int i = 0; i < n; ++i) r.mean_psi.push_back(ParseFloat(f[k++]));
    r.status = f[k++];
    log.rows.push_back(std::move(r));
  }
  return log;
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_RUNLOG_HPP_
