#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "valex/annotation_io.hpp"
#include "valex/domain.hpp"

namespace valex {

/// The (value, polarity) pairs a supervised model is trained on and scored
/// over.
struct LabelSpace {
  std::vector<LabelPair> retained;  // ascending flat index
  std::size_t min_count = 1;
  std::array<std::size_t, kPairCount> counts_basis{};

  bool contains(LabelPair pair) const noexcept;
  std::size_t dimension() const noexcept { return retained.size(); }

  /// Every pair, no counts. Used when LLM systems are scored on their own.
  static LabelSpace full();

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;
};

/// Keeps every pair whose count over `training_gold` is >= min_count.
/// Throws Error(EmptyLabelSpace) for an empty training set and
/// Error(InvalidArgument) for min_count == 0.
LabelSpace select_labels(std::span<const AnnotationVector> training_gold, std::size_t min_count);
LabelSpace select_labels(const GoldSet& training_gold, std::size_t min_count);

}  // namespace valex
