#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "valex/annotation_io.hpp"
#include "valex/domain.hpp"

namespace valex {

/// Two independent annotations of one video. The annotator ids must differ.
struct AnnotationPair {
  std::string video_id;
  AnnotationVector rater_a;
  AnnotationVector rater_b;
};

/// Agreed values keep their common label; disputed values take the
/// resolver's label. Throws Error(IncompleteResolution) naming the first
/// disputed value the resolver does not cover, and Error(InvalidArgument)
/// when both raters carry the same annotator id.
AnnotationVector consolidate(const AnnotationPair& pair, const Resolution& resolver);

/// Builds pairs from long-form rows: every video must carry exactly two
/// distinct annotator ids (rows of `exclude_annotator`, e.g. a resolver, are
/// ignored). Pairs come out in video_id order.
std::vector<AnnotationPair> pairs_from_rows(const std::vector<AnnotationRow>& rows,
                                            std::string_view exclude_annotator = "");

/// Unit of analysis: one (video, value) item rated by two raters.
struct AgreementItem {
  std::string video_id;
  std::size_t value = 0;
  int category_a = 0;
  int category_b = 0;
};

/// 19 items per pair, in pair order then catalog order.
std::vector<AgreementItem> agreement_items(std::span<const AnnotationPair> pairs);

enum class AgreementMethod { Percent, CohenKappa, GwetAc1 };
std::string_view to_string(AgreementMethod method) noexcept;

struct AgreementResult {
  double observed_agreement = 0.0;
  double chance_agreement = 0.0;
  double coefficient = 0.0;
  AgreementMethod method = AgreementMethod::Percent;
  std::size_t n_items = 0;
  /// Pooled category proportions over both raters.
  std::map<int, double> category_marginals;
};

/// The three label categories {-1, 0, +1}.
std::span<const int> label_categories() noexcept;

AgreementResult percent_agreement(std::span<const AgreementItem> items);

/// Two-rater multi-category AC1 over the given category universe:
///   pi_k   = (n_a,k + n_b,k) / 2n
///   chance = sum_k pi_k (1 - pi_k) / (q - 1)
///   AC1    = (p_a - chance) / (1 - chance)
/// Items outside the universe raise Error(InvalidArgument).
AgreementResult gwet_ac1(std::span<const AgreementItem> items,
                         std::span<const int> categories = label_categories());

/// chance = sum_k marginal_a,k * marginal_b,k.
AgreementResult cohen_kappa(std::span<const AgreementItem> items);

/// JSON document: method, n_items, observed, chance, coefficient, marginals.
std::string format_agreement_report(std::span<const AgreementResult> results);

}  // namespace valex
