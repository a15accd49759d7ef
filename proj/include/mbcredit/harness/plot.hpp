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

// Aggregates run logs across seeds: per method and iteration, mean and
// population std of episode reward and of the agent-averaged |action|.
// aggregate.csv is the source of truth; the SVG curves are drawn from it.

#ifndef MBCREDIT_HARNESS_PLOT_HPP_
#define MBCREDIT_HARNESS_PLOT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/harness/config.hpp"
#include "mbcredit/harness/runlog.hpp"

namespace mbcredit::harness {

struct LoadedRun {
  std::string dir;
  std::string method;
  RunLog log;
};

struct CurvePoint {
  int iteration = 0;
  long long env_steps = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  double action_mean = 0.0;
  double action_std = 0.0;
};

struct MethodCurve {
  std::string method;
  int runs = 0;
  std::vector<CurvePoint> points;
};

struct Aggregate {
  std::vector<MethodCurve> curves;
  std::vector<std::string> warnings;
};

// A run directory holds runlog.csv; a parent directory is expanded into its
// run subdirectories.
inline std::vector<LoadedRun> LoadRuns(const std::vector<std::string>& dirs) {
  namespace fs = std::filesystem;
  std::vector<LoadedRun> runs;
  auto load_one = [&](const fs::path& d) {
    LoadedRun r;
    r.dir = d.string();
    const fs::path cfg = d / "config.txt";
    r.method = fs::exists(cfg) ? LoadConfig(cfg.string()).method
                               : d.filename().string();
    r.log = ReadRunLog((d / "runlog.csv").string());
    runs.push_back(std::move(r));
  };
  for (const std::string& dir : dirs) {
    const fs::path d(dir);
    if (fs::exists(d / "runlog.csv")) {
      load_one(d);
      continue;
    }
    if (!fs::is_directory(d)) throw ConfigError("no run log found in " + dir);
    std::vector<fs::path> subs;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.is_directory() && fs::exists(e.path() / "runlog.csv")) {
        subs.push_back(e.path());
      }
    }
    if (subs.empty()) throw ConfigError("no run log found in " + dir);
    std::sort(subs.begin(), subs.end());
    for (const auto& s : subs) load_one(s);
  }
  return runs;
}

inline Aggregate AggregateRuns(const std::vector<LoadedRun>& runs) {
  MBCREDIT_CHECK(!runs.empty(), "plot needs at least one run");
  Aggregate agg;
  std::vector<std::string> order;
  std::map<std::string, std::vector<const LoadedRun*>> groups;
  for (const LoadedRun& r : runs) {
    if (!groups.count(r.method)) order.push_back(r.method);
    groups[r.method].push_back(&r);
  }
  for (const std::string& method : order) {
    const auto& g = groups[method];
    // Only completed rows count; a failed run ends at its failure row.
    auto usable = [](const RunLog& log) {
      std::size_t n = 0;
      while (n < log.rows.size() && log.rows[n].ok()) ++n;
      return n;
    };
    std::size_t shortest = usable(g.front()->log);
    std::size_t longest = shortest;
    for (const LoadedRun* r : g) {
      shortest = std::min(shortest, usable(r->log));
      longest = std::max(longest, usable(r->log));
    }
    if (shortest != longest) {
      agg.warnings.push_back("method " + method + ": iteration counts differ (" +
                             std::to_string(shortest) + " to " +
                             std::to_string(longest) +
                             "); truncating to the shortest run");
    }
    MethodCurve curve;
    curve.method = method;
    curve.runs = static_cast<int>(g.size());
    const double m = static_cast<double>(g.size());
    for (std::size_t k = 0; k < shortest; ++k) {
      CurvePoint p;
      p.iteration = g.front()->log.rows[k].iteration;
      p.env_steps = g.front()->log.rows[k].env_steps;
      std::vector<double> rew, act;
      for (const LoadedRun* r : g) {
        const RunLogRow& row = r->log.rows[k];
        rew.push_back(row.mean_episode_reward);
        double a = 0.0;
        for (double v : row.mean_abs_action) a += v;
        act.push_back(row.mean_abs_action.empty()
                          ? 0.0
                          : a / static_cast<double>(row.mean_abs_action.size()));
      }
      auto stats = [m](const std::vector<double>& x, double& mean, double& sd) {
        mean = 0.0;
        for (double v : x) mean += v;
        mean /= m;
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        sd = std::sqrt(var / m);
      };
      stats(rew, p.reward_mean, p.reward_std);
      stats(act, p.action_mean, p.action_std);
      curve.points.push_back(p);
    }
    agg.curves.push_back(std::move(curve));
  }
  return agg;
}

inline void WriteAggregateCsv(const std::string& path, const Aggregate& agg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "method,iteration,env_steps,runs,reward_mean,reward_std,"
         "abs_action_mean,abs_action_std\n";
  for (const MethodCurve& c : agg.curves) {
    for (const CurvePoint& p : c.points) {
      out << c.method << "," << p.iteration << "," << p.env_steps << "," << c.runs
          << "," << FormatFloat(p.reward_mean) << "," << FormatFloat(p.reward_std)
          << "," << FormatFloat(p.action_mean) << "," << FormatFloat(p.action_std)
          << "\n";
    }
  }
}

namespace internal {

inline const char* CurveColor(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[k % 8];
}

}  // namespace internal

// Mean curve with a +-1 std band per method, x axis in env steps.
inline std::string CurveSvg(const Aggregate& agg, bool reward, const std::string& title) {
  const double W = 640, H = 400, L = 70, R = 160, T = 40, B = 50;
  double xmax = 1, ymin = 0, ymax = 0;
  bool any = false;
  for (const auto& c : agg.curves) {
    for (const auto& p : c.points) {
      const double mu = reward ? p.reward_mean : p.action_mean;
      const double sd = reward ? p.reward_std : p.action_std;
      if (!std::isfinite(mu) || !std::isfinite(sd)) continue;
      xmax = std::max(xmax, static_cast<double>(p.env_steps));
      if (!any) {
        ymin = mu - sd;
        ymax = mu + sd;
        any = true;
      }
      ymin = std::min(ymin, mu - sd);
      ymax = std::max(ymax, mu + sd);
    }
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  auto sx = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto sy = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
    << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title
    << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
    << H - B << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\">env steps</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    s << "<text x=\"" << L - 6 << "\" y=\"" << sy(y) + 4
      << "\" text-anchor=\"end\">" << FormatFloat(std::round(y * 100) / 100)
      << "</text>\n";
    const double x = xmax * k / 4.0;
    s << "<text x=\"" << sx(x) << "\" y=\"" << H - B + 16
      << "\" text-anchor=\"middle\">" << static_cast<long long>(x) << "</text>\n";
  }
  for (std::size_t c = 0; c < agg.curves.size(); ++c) {
    const auto& curve = agg.curves[c];
    std::ostringstream band, upper, lower, line;
    std::vector<std::pair<double, double>> lo;
    bool first = true;
    for (const auto& p : curve.points) {
      const double mu = reward ? p.reward_mean : p.action_mean;
      const double sd = reward ? p.reward_std : p.action_std;
      if (!std::isfinite(mu) || !std::isfinite(sd)) continue;
      const double x = sx(static_cast<double>(p.env_steps));
      upper << (first ? "M" : " L") << x << "," << sy(mu + sd);
      line << (first ? "M" : " L") << x << "," << sy(mu);
      lo.emplace_back(x, sy(mu - sd));
      first = false;
    }
    if (first) continue;
    for (auto it = lo.rbegin(); it != lo.rend(); ++it) {
      lower << " L" << it->first << "," << it->second;
    }
    s << "<path d=\"" << upper.str() << lower.str() << " Z\" fill=\""
      << internal::CurveColor(c) << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
      << "<path d=\"" << line.str() << "\" fill=\"none\" stroke=\""
      << internal::CurveColor(c) << "\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (c + 1) << "\" fill=\""
      << internal::CurveColor(c) << "\">" << curve.method << " (" << curve.runs
      << ")</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

// Writes aggregate.csv, reward.svg and actions.svg into `out_dir`.
inline Aggregate Plot(const std::vector<std::string>& run_dirs,
                      const std::string& out_dir) {
  const Aggregate agg = AggregateRuns(LoadRuns(run_dirs));
  std::filesystem::create_directories(out_dir);
  WriteAggregateCsv(out_dir + "/aggregate.csv", agg);
  std::ofstream(out_dir + "/reward.svg")
      << CurveSvg(agg, true, "mean episode reward");
  std::ofstream(out_dir + "/actions.svg")
      << CurveSvg(agg, false, "mean |action| across agents");
  return agg;
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_PLOT_HPP_
