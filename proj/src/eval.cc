// Copyright 2026 The tagmap Authors.
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

#include "tagmap/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "tagmap/error.h"

namespace tagmap {

std::optional<double> RocAuc(std::span<const double> scores,
                             std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("roc_auc: scores and labels differ in length");
  }
  std::uint64_t positives = 0;
  for (auto l : labels) positives += l ? 1 : 0;
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  for (double s : scores) {
    if (std::isnan(s)) throw ValidationError("roc_auc: NaN score");
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the Mann-Whitney U statistic, kept integral so ties stay exact.
  std::uint64_t twice_u = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    std::uint64_t p = 0;
    std::uint64_t n = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (labels[order[end]] ? p : n) += 1;
      ++end;
    }
    twice_u += 2 * p * negatives_below + p * n;
    negatives_below += n;
    start = end;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

EvalReport MacroAuc(const ScoreMatrix& scores, const ScoreMatrix& truth,
                    const std::vector<std::size_t>& rows) {
  if (scores.values.rows() != truth.values.rows() ||
      scores.values.cols() != truth.values.cols()) {
    throw ValidationError("score and truth matrices differ in shape");
  }
  if (scores.tags != truth.tags) {
    throw ValidationError("score and truth matrices have different tags");
  }
  EvalReport report;
  report.tags = scores.tags;
  std::vector<double> s(rows.size());
  std::vector<std::uint8_t> l(rows.size());
  double sum = 0.0;
  std::size_t defined = 0;
  for (Eigen::Index c = 0; c < scores.values.cols(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto row = static_cast<Eigen::Index>(rows[r]);
      s[r] = scores.values(row, c);
      l[r] = truth.values(row, c) != 0.0 ? 1 : 0;
    }
    auto auc = RocAuc(s, l);
    report.per_tag_auc.push_back(auc);
    if (auc) {
      sum += *auc;
      ++defined;
    } else {
      report.skipped_tags.push_back(scores.tags[static_cast<std::size_t>(c)]);
    }
  }
  if (defined == 0) {
    throw EvaluationError("no tag has both positive and negative items");
  }
  report.macro_auc = sum / static_cast<double>(defined);
  return report;
}

EvalReport MacroAuc(const ScoreMatrix& scores, const ScoreMatrix& truth) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(scores.values.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  return MacroAuc(scores, truth, rows);
}

std::vector<std::size_t> IterativeStratifiedSplit(
    const std::vector<std::vector<std::size_t>>& labels,
    std::size_t label_count, std::size_t k, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2) throw ValidationError("need at least 2 folds");
  if (k > n) {
    throw ValidationError("cannot split " + std::to_string(n) +
                          " items into " + std::to_string(k) + " folds");
  }
  std::vector<std::vector<std::size_t>> items_with(label_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i].empty()) {
      throw ValidationError("item " + std::to_string(i) +
                            " has no positive label");
    }
    for (auto l : labels[i]) {
      if (l >= label_count) throw ValidationError("label id out of range");
      items_with[l].push_back(i);
    }
  }

  const double share = 1.0 / static_cast<double>(k);
  std::vector<double> capacity(k, static_cast<double>(n) * share);
  std::vector<std::vector<double>> demand(
      label_count, std::vector<double>(k, 0.0));
  for (std::size_t l = 0; l < label_count; ++l) {
    for (auto& d : demand[l]) {
      d = static_cast<double>(items_with[l].size()) * share;
    }
  }

  constexpr auto kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> fold_of(n, kUnassigned);
  std::vector<std::size_t> remaining(label_count);
  for (std::size_t l = 0; l < label_count; ++l) {
    remaining[l] = items_with[l].size();
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> candidates;
  std::size_t left = n;

  while (left > 0) {
    std::size_t rarest = label_count;
    for (std::size_t l = 0; l < label_count; ++l) {
      if (remaining[l] > 0 &&
          (rarest == label_count || remaining[l] < remaining[rarest])) {
        rarest = l;
      }
    }
    for (auto i : items_with[rarest]) {
      if (fold_of[i] != kUnassigned) continue;
      // Greatest demand for the label, then greatest remaining capacity,
      // then a seeded draw.
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < k; ++f) best = std::max(best, demand[rarest][f]);
      candidates.clear();
      for (std::size_t f = 0; f < k; ++f) {
        if (demand[rarest][f] == best) candidates.push_back(f);
      }
      if (candidates.size() > 1) {
        double cap = -std::numeric_limits<double>::infinity();
        for (auto f : candidates) cap = std::max(cap, capacity[f]);
        std::erase_if(candidates, [&](std::size_t f) { return capacity[f] != cap; });
      }
      std::size_t fold = candidates.front();
      if (candidates.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        fold = candidates[pick(rng)];
      }
      fold_of[i] = fold;
      capacity[fold] -= 1.0;
      for (auto l : labels[i]) {
        demand[l][fold] -= 1.0;
        --remaining[l];
      }
      --left;
    }
  }
  return fold_of;
}

std::vector<std::vector<std::size_t>> PositiveLabels(const ScoreMatrix& truth) {
  std::vector<std::vector<std::size_t>> out(
      static_cast<std::size_t>(truth.values.rows()));
  for (Eigen::Index r = 0; r < truth.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < truth.values.cols(); ++c) {
      if (truth.values(r, c) != 0.0) {
        out[static_cast<std::size_t>(r)].push_back(static_cast<std::size_t>(c));
      }
    }
  }
  return out;
}

std::pair<double, double> MeanAndSampleStd(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  // Equal values report their own mean and an exact zero spread.
  if (std::all_of(values.begin(), values.end(),
                  [&](double v) { return v == values.front(); })) {
    return {values.front(), 0.0};
  }
  double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

CrossValidationReport CrossValidate(const ScoreMatrix& scores,
                                    const ScoreMatrix& truth, std::size_t k,
                                    std::uint64_t seed) {
  CrossValidationReport report;
  report.k = k;
  report.seed = seed;
  report.fold_of = IterativeStratifiedSplit(
      PositiveLabels(truth), truth.tags.size(), k, seed);

  std::vector<std::vector<std::size_t>> rows(k);
  for (std::size_t r = 0; r < report.fold_of.size(); ++r) {
    rows[report.fold_of[r]].push_back(r);
  }
  std::vector<double> macro;
  for (std::size_t f = 0; f < k; ++f) {
    report.folds.push_back(MacroAuc(scores, truth, rows[f]));
    macro.push_back(report.folds.back().macro_auc);
  }
  std::tie(report.mean_macro_auc, report.std_macro_auc) = MeanAndSampleStd(macro);

  for (std::size_t t = 0; t < truth.tags.size(); ++t) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& fold : report.folds) {
      if (fold.per_tag_auc[t]) {
        sum += *fold.per_tag_auc[t];
        ++defined;
      }
    }
    report.mean_per_tag_auc.push_back(
        defined ? std::optional<double>(sum / static_cast<double>(defined))
                : std::nullopt);
  }
  return report;
}

void WritePerTagTsv(std::ostream& out, const std::vector<std::string>& tags,
                    const std::vector<std::optional<double>>& auc) {
  char buf[32];
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (auc[t]) {
      std::snprintf(buf, sizeof(buf), "%.17g", *auc[t]);
      out << tags[t] << '\t' << buf << '\n';
    } else {
      out << tags[t] << "\tnan\n";
    }
  }
}

void WriteFolds(std::ostream& out, const std::vector<std::string>& items,
                const std::vector<std::size_t>& fold_of) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << items[i] << '\t' << fold_of[i] << '\n';
  }
}

nlohmann::json SummaryJson(const CrossValidationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"macro_auc", f.macro_auc},
                     {"skipped_tags", f.skipped_tags.size()}});
  }
  std::size_t never_defined = 0;
  for (const auto& a : report.mean_per_tag_auc) never_defined += a ? 0 : 1;
  return {{"k", report.k},
          {"seed", report.seed},
          {"mean_macro_auc", report.mean_macro_auc},
          {"std_macro_auc", report.std_macro_auc},
          {"folds", folds},
          {"tags", report.mean_per_tag_auc.size()},
          {"skipped_tags", never_defined}};
}

}  // namespace tagmap
