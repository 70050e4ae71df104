// Copyright 2026 The mqmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Report tables from prediction dumps.
//
//   table1.csv            method x dataset: character F1 averaged over the
//                         dataset's language pairs
//   table2_<dataset>.csv  method x (lp F1, precision, recall)
//   table3_<dataset>.csv  AVG and STDEV rows for methods with several runs
//
// Values are percentages with two decimals. A trailing '*' marks a cell that
// is significantly better than the baseline method (paired permutation test,
// p < 0.05) using each method's first run.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqmeval/char_f1.hpp"
#include "mqmeval/errors.hpp"
#include "mqmeval/predictions.hpp"
#include "mqmeval/significance.hpp"
#include "mqmeval/types.hpp"

namespace mqmeval {

struct MethodRuns {
  std::string name;
  std::vector<std::vector<Prediction>> runs;  // one entry per seed
};

struct ReportInputs {
  std::vector<MethodRuns> methods;
  std::optional<std::string> baseline;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  Aggregation aggregation = Aggregation::kMicro;
};

struct ReportTables {
  std::string table1;
  std::map<std::string, std::string> table2;  // by dataset
  std::map<std::string, std::string> table3;  // by dataset
  nlohmann::ordered_json summary;
};

inline std::string FormatPercent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * value);
  return buf;
}

namespace internal {

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for fewer than two values.
inline double Stdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct RunScores {
  std::vector<SegmentRow> rows;  // all language pairs of one dataset
  std::map<std::string, Prf1> per_lp;
  Prf1 mean;
};

}  // namespace internal

inline ReportTables BuildReport(const ReportInputs& in, const GoldIndex& gold) {
  const std::vector<std::string> datasets = gold.Datasets();
  std::map<std::string, std::set<std::string>> lps;  // dataset -> lps
  for (const auto& d : datasets) {
    for (const auto& [key, r] : *gold.Ratings(d)) lps[d].insert(key.first.lp);
  }
  // scores[method][dataset][run]
  std::map<std::string, std::map<std::string, std::vector<internal::RunScores>>>
      scores;
  for (const auto& m : in.methods) {
    for (const auto& run : m.runs) {
      std::map<std::string, std::vector<Prediction>> by_dataset;
      for (const auto& p : run) {
        std::string d = p.dataset;
        if (d.empty() && datasets.size() == 1) d = datasets.front();
        by_dataset[d].push_back(p);
      }
      for (const auto& d : datasets) {
        auto it = by_dataset.find(d);
        if (it == by_dataset.end()) continue;
        internal::RunScores s;
        s.rows = ScorePredictions(it->second, gold);
        s.per_lp = PerLpPrf1(s.rows, in.aggregation);
        s.mean = CrossLpPrf1(s.rows, in.aggregation);
        scores[m.name][d].push_back(std::move(s));
      }
    }
  }

  const auto significant = [&](const std::string& method,
                               const std::string& dataset,
                               const std::optional<std::string>& lp,
                               Statistic stat) {
    if (!in.baseline || *in.baseline == method) return false;
    const auto bm = scores.find(*in.baseline);
    if (bm == scores.end() || !bm->second.contains(dataset)) return false;
    const auto& a = scores.at(method).at(dataset).front().rows;
    const auto& b = bm->second.at(dataset).front().rows;
    std::vector<SegmentRow> ra, rb;
    for (const auto& r : a) {
      if (!lp || r.key.lp == *lp) ra.push_back(r);
    }
    for (const auto& r : b) {
      if (!lp || r.key.lp == *lp) rb.push_back(r);
    }
    const auto res =
        PairedPermutationTest(ra, rb, in.resamples, in.seed, stat);
    return res.observed_delta > 0 && res.p_value < in.alpha;
  };

  ReportTables out;
  out.summary["baseline"] =
      in.baseline ? nlohmann::ordered_json(*in.baseline) : nullptr;
  out.summary["resamples"] = in.resamples;
  out.summary["seed"] = in.seed;

  // table1.csv: cross-LP mean F1 per method and dataset.
  std::string t1 = "method";
  for (const auto& d : datasets) t1 += "," + internal::CsvField(d);
  t1 += "\n";
  for (const auto& m : in.methods) {
    t1 += internal::CsvField(m.name);
    for (const auto& d : datasets) {
      const auto mit = scores.find(m.name);
      if (mit == scores.end() || !mit->second.contains(d)) {
        t1 += ",---";
        continue;
      }
      std::vector<double> f1s;
      for (const auto& s : mit->second.at(d)) f1s.push_back(s.mean.f1);
      t1 += "," + FormatPercent(internal::Mean(f1s)) +
            (significant(m.name, d, std::nullopt, Statistic::kF1) ? "*" : "");
    }
    t1 += "\n";
  }
  out.table1 = t1;

  // table2_<dataset>.csv (per-LP means) and table3_<dataset>.csv (AVG/STDEV).
  for (const auto& d : datasets) {
    std::string header = "method";
    for (const auto& lp : lps[d]) {
      header += "," + lp + " F1," + lp + " Precision," + lp + " Recall";
    }
    std::string t2 = header + "\n";
    std::string t3 = "method,stat" + header.substr(6) + "\n";
    for (const auto& m : in.methods) {
      const auto mit = scores.find(m.name);
      if (mit == scores.end() || !mit->second.contains(d)) continue;
      const auto& runs = mit->second.at(d);
      std::string row2 = internal::CsvField(m.name);
      std::string avg = internal::CsvField(m.name) + ",AVG";
      std::string sd = internal::CsvField(m.name) + ",STDEV";
      auto& js = out.summary["methods"][m.name][d];
      js["runs"] = runs.size();
      std::vector<double> means;
      for (const auto& s : runs) means.push_back(s.mean.f1);
      js["f1"] = internal::Mean(means);
      for (const auto& lp : lps[d]) {
        const std::pair<Statistic, double Prf1::*> cols[] = {
            {Statistic::kF1, &Prf1::f1},
            {Statistic::kPrecision, &Prf1::precision},
            {Statistic::kRecall, &Prf1::recall}};
        for (const auto& [stat, member] : cols) {
          std::vector<double> v;
          for (const auto& s : runs) {
            const auto it = s.per_lp.find(lp);
            v.push_back(it == s.per_lp.end() ? 0.0 : it->second.*member);
          }
          const bool star = significant(m.name, d, lp, stat);
          row2 += "," + FormatPercent(internal::Mean(v)) + (star ? "*" : "");
          avg += "," + FormatPercent(internal::Mean(v));
          sd += "," + FormatPercent(internal::Stdev(v));
          const char* name = stat == Statistic::kF1          ? "f1"
                             : stat == Statistic::kPrecision ? "precision"
                                                             : "recall";
          js["per_lp"][lp][name] = internal::Mean(v);
          js["per_lp"][lp][std::string(name) + "_stdev"] = internal::Stdev(v);
          js["per_lp"][lp][std::string(name) + "_significant"] = star;
        }
      }
      t2 += row2 + "\n";
      if (runs.size() > 1) t3 += avg + "\n" + sd + "\n";
    }
    out.table2[d] = t2;
    out.table3[d] = t3;
  }
  return out;
}

inline void WriteReport(const std::filesystem::path& dir,
                        const ReportTables& tables) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ParseError(0, "cannot write " + (dir / name).string());
    out << body;
  };
  write("table1.csv", tables.table1);
  for (const auto& [d, body] : tables.table2) write("table2_" + d + ".csv", body);
  for (const auto& [d, body] : tables.table3) write("table3_" + d + ".csv", body);
  write("report.json", tables.summary.dump(2) + "\n");
}

}  // namespace mqmeval
