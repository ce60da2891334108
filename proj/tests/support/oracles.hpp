#pragma once

// Brute-force reference implementations. They share no code with the
// library: labels are compared directly instead of through flatten(), and
// agreement statistics come from an explicit contingency table.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "valex/domain.hpp"

namespace oracle {

/// counts[i][j]: items rated category i by rater A and j by rater B.
struct Contingency {
  std::vector<int> categories;
  std::vector<std::vector<double>> counts;
  double n = 0;

  std::size_t index(int category) const {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      if (categories[i] == category) return i;
    }
    return categories.size();
  }
};

inline Contingency tabulate(const std::vector<std::pair<int, int>>& ratings, std::vector<int> categories) {
  Contingency t;
  t.categories = std::move(categories);
  const auto q = t.categories.size();
  t.counts.assign(q, std::vector<double>(q, 0.0));
  for (const auto& [a, b] : ratings) {
    t.counts[t.index(a)][t.index(b)] += 1;
    t.n += 1;
  }
  return t;
}

inline double observed(const Contingency& t) {
  double diag = 0;
  for (std::size_t i = 0; i < t.categories.size(); ++i) diag += t.counts[i][i];
  return diag / t.n;
}

inline double row_total(const Contingency& t, std::size_t i) {
  double s = 0;
  for (double c : t.counts[i]) s += c;
  return s;
}

inline double col_total(const Contingency& t, std::size_t j) {
  double s = 0;
  for (const auto& row : t.counts) s += row[j];
  return s;
}

inline double chance_corrected(double po, double pe) { return pe >= 1.0 ? 1.0 : (po - pe) / (1.0 - pe); }

inline double kappa(const Contingency& t) {
  double pe = 0;
  for (std::size_t k = 0; k < t.categories.size(); ++k) pe += (row_total(t, k) / t.n) * (col_total(t, k) / t.n);
  return chance_corrected(observed(t), pe);
}

inline double ac1(const Contingency& t) {
  const double q = static_cast<double>(t.categories.size());
  double pe = 0;
  for (std::size_t k = 0; k < t.categories.size(); ++k) {
    const double pi = (row_total(t, k) + col_total(t, k)) / (2.0 * t.n);
    pe += pi * (1.0 - pi);
  }
  pe /= (q - 1.0);
  return chance_corrected(observed(t), pe);
}

struct Tally {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Per-(value, polarity) tallies over aligned prediction/gold maps.
inline std::map<std::pair<std::size_t, int>, Tally> tallies(const std::map<std::string, valex::AnnotationVector>& pred,
                                                            const std::map<std::string, valex::AnnotationVector>& gold) {
  std::map<std::pair<std::size_t, int>, Tally> out;
  for (std::size_t v = 0; v < valex::kValueCount; ++v) {
    for (const int sign : {+1, -1}) {
      Tally t;
      for (const auto& [id, g] : gold) {
        const bool in_gold = valex::to_int(g[v]) == sign;
        const bool in_pred = valex::to_int(pred.at(id)[v]) == sign;
        if (in_gold && in_pred) ++t.tp;
        if (!in_gold && in_pred) ++t.fp;
        if (in_gold && !in_pred) ++t.fn;
        if (!in_gold && !in_pred) ++t.tn;
      }
      out[{v, sign}] = t;
    }
  }
  return out;
}

inline double f1(const Tally& t) {
  if (t.tp == 0 && t.fp == 0 && t.fn == 0) return 0.0;
  const double precision_num = static_cast<double>(t.tp);
  // Harmonic mean of precision and recall, written out long-hand.
  const double p = t.tp + t.fp == 0 ? 0.0 : precision_num / static_cast<double>(t.tp + t.fp);
  const double r = t.tp + t.fn == 0 ? 0.0 : precision_num / static_cast<double>(t.tp + t.fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

struct Means {
  double macro = 0.0;
  double weighted = 0.0;
};

/// `signs` selects the partition: {+1}, {-1} or {+1, -1}. `keep` filters pairs.
template <class Keep>
Means means(const std::map<std::pair<std::size_t, int>, Tally>& tallies, std::vector<int> signs, Keep keep) {
  double sum = 0, wsum = 0, support = 0;
  std::size_t n = 0;
  for (const auto& [key, t] : tallies) {
    if (std::find(signs.begin(), signs.end(), key.second) == signs.end() || !keep(key)) continue;
    const double f = f1(t);
    sum += f;
    wsum += f * static_cast<double>(t.tp + t.fn);
    support += static_cast<double>(t.tp + t.fn);
    ++n;
  }
  return {n == 0 ? 0.0 : sum / static_cast<double>(n), support == 0 ? 0.0 : wsum / support};
}

/// Count of gold vectors carrying each (value, sign).
inline std::map<std::pair<std::size_t, int>, std::size_t> pair_counts(const std::vector<valex::AnnotationVector>& gold) {
  std::map<std::pair<std::size_t, int>, std::size_t> out;
  for (const auto& g : gold) {
    for (std::size_t v = 0; v < valex::kValueCount; ++v) {
      const int l = valex::to_int(g[v]);
      if (l != 0) ++out[{v, l}];
    }
  }
  return out;
}

}  // namespace oracle
