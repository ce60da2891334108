#include "valex/agreement.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "valex/error.hpp"

namespace valex {

AnnotationVector consolidate(const AnnotationPair& pair, const Resolution& resolver) {
  if (pair.rater_a.annotator_id() && pair.rater_a.annotator_id() == pair.rater_b.annotator_id()) {
    throw Error(ErrorCode::InvalidArgument,
                "video " + pair.video_id + ": both annotations come from '" + *pair.rater_a.annotator_id() + "'");
  }
  AnnotationVector out;
  for (std::size_t v = 0; v < kValueCount; ++v) {
    const Label a = pair.rater_a[v];
    const Label b = pair.rater_b[v];
    if (a == b) {
      out.set(v, a);
      continue;
    }
    const auto it = resolver.find(v);
    if (it == resolver.end()) {
      throw Error(ErrorCode::IncompleteResolution, "video " + pair.video_id + ": disputed value " +
                                                       value_catalog()[v].name + " (" + std::to_string(to_int(a)) +
                                                       " vs " + std::to_string(to_int(b)) + ") has no resolution");
    }
    out.set(v, it->second);
  }
  return out;
}

std::vector<AnnotationPair> pairs_from_rows(const std::vector<AnnotationRow>& rows,
                                            std::string_view exclude_annotator) {
  std::map<std::string, std::vector<AnnotationVector>> by_video;
  for (auto& [key, vec] : group_by_rater(rows)) {
    if (!exclude_annotator.empty() && key.second == exclude_annotator) continue;
    by_video[key.first].push_back(vec);
  }
  std::vector<AnnotationPair> pairs;
  pairs.reserve(by_video.size());
  for (auto& [video, vecs] : by_video) {
    if (vecs.size() != 2) {
      throw Error(ErrorCode::InvalidArgument,
                  "video " + video + " has " + std::to_string(vecs.size()) + " annotator(s); expected exactly 2");
    }
    pairs.push_back({video, std::move(vecs[0]), std::move(vecs[1])});
  }
  return pairs;
}

std::vector<AgreementItem> agreement_items(std::span<const AnnotationPair> pairs) {
  std::vector<AgreementItem> items;
  items.reserve(pairs.size() * kValueCount);
  for (const auto& pair : pairs) {
    for (std::size_t v = 0; v < kValueCount; ++v) {
      items.push_back({pair.video_id, v, to_int(pair.rater_a[v]), to_int(pair.rater_b[v])});
    }
  }
  return items;
}

std::string_view to_string(AgreementMethod method) noexcept {
  switch (method) {
    case AgreementMethod::Percent: return "percent";
    case AgreementMethod::CohenKappa: return "cohen_kappa";
    case AgreementMethod::GwetAc1: return "gwet_ac1";
  }
  return "unknown";
}

std::span<const int> label_categories() noexcept {
  static constexpr std::array<int, 3> kCategories{-1, 0, 1};
  return kCategories;
}

namespace {

struct Tally {
  std::size_t n = 0;
  std::size_t agree = 0;
  std::map<int, std::size_t> count_a;
  std::map<int, std::size_t> count_b;
};

Tally tally(std::span<const AgreementItem> items) {
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "agreement needs at least one item");
  Tally t;
  t.n = items.size();
  for (const auto& item : items) {
    if (item.category_a == item.category_b) ++t.agree;
    ++t.count_a[item.category_a];
    ++t.count_b[item.category_b];
  }
  return t;
}

std::map<int, double> pooled_marginals(const Tally& t, std::span<const int> categories) {
  std::map<int, double> out;
  const double denom = 2.0 * static_cast<double>(t.n);
  for (int k : categories) out[k] = 0.0;
  for (const auto& [k, c] : t.count_a) out[k] += static_cast<double>(c) / denom;
  for (const auto& [k, c] : t.count_b) out[k] += static_cast<double>(c) / denom;
  return out;
}

double chance_corrected(double observed, double chance) {
  // chance == 1 forces observed == 1: both raters used one category only.
  if (chance >= 1.0) return 1.0;
  return (observed - chance) / (1.0 - chance);
}

}  // namespace

AgreementResult percent_agreement(std::span<const AgreementItem> items) {
  const auto t = tally(items);
  AgreementResult r;
  r.method = AgreementMethod::Percent;
  r.n_items = t.n;
  r.observed_agreement = static_cast<double>(t.agree) / static_cast<double>(t.n);
  r.chance_agreement = 0.0;
  r.coefficient = r.observed_agreement;
  r.category_marginals = pooled_marginals(t, label_categories());
  return r;
}

AgreementResult gwet_ac1(std::span<const AgreementItem> items, std::span<const int> categories) {
  const std::set<int> universe(categories.begin(), categories.end());
  if (universe.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "AC1 needs at least two categories in its universe");
  }
  const auto t = tally(items);
  for (const auto* counts : {&t.count_a, &t.count_b}) {
    for (const auto& [k, c] : *counts) {
      if (!universe.contains(k)) {
        throw Error(ErrorCode::InvalidArgument, "category " + std::to_string(k) + " is outside the AC1 universe");
      }
    }
  }
  AgreementResult r;
  r.method = AgreementMethod::GwetAc1;
  r.n_items = t.n;
  r.observed_agreement = static_cast<double>(t.agree) / static_cast<double>(t.n);
  r.category_marginals = pooled_marginals(t, std::vector<int>(universe.begin(), universe.end()));
  double spread = 0.0;
  for (const auto& [k, pi] : r.category_marginals) spread += pi * (1.0 - pi);
  r.chance_agreement = spread / static_cast<double>(universe.size() - 1);
  r.coefficient = chance_corrected(r.observed_agreement, r.chance_agreement);
  return r;
}

AgreementResult cohen_kappa(std::span<const AgreementItem> items) {
  const auto t = tally(items);
  AgreementResult r;
  r.method = AgreementMethod::CohenKappa;
  r.n_items = t.n;
  r.observed_agreement = static_cast<double>(t.agree) / static_cast<double>(t.n);
  const double n = static_cast<double>(t.n);
  double chance = 0.0;
  for (const auto& [k, ca] : t.count_a) {
    const auto it = t.count_b.find(k);
    if (it != t.count_b.end()) chance += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
  }
  r.chance_agreement = chance;
  r.coefficient = chance_corrected(r.observed_agreement, chance);
  r.category_marginals = pooled_marginals(t, label_categories());
  return r;
}

std::string format_agreement_report(std::span<const AgreementResult> results) {
  using nlohmann::ordered_json;
  ordered_json doc = ordered_json::array();
  for (const auto& r : results) {
    ordered_json marginals = ordered_json::object();
    for (const auto& [k, p] : r.category_marginals) marginals[std::to_string(k)] = p;
    doc.push_back({{"method", std::string(to_string(r.method))},
                   {"n_items", r.n_items},
                   {"observed", r.observed_agreement},
                   {"chance", r.chance_agreement},
                   {"coefficient", r.coefficient},
                   {"marginals", marginals}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace valex
