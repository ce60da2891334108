#include "valex/label_space.hpp"

#include <algorithm>

#include "valex/error.hpp"

namespace valex {

bool LabelSpace::contains(LabelPair pair) const noexcept {
  return std::binary_search(retained.begin(), retained.end(), pair);
}

LabelSpace LabelSpace::full() {
  LabelSpace space;
  for (std::size_t i = 0; i < kPairCount; ++i) space.retained.push_back(LabelPair::from_flat_index(i));
  return space;
}

LabelSpace select_labels(std::span<const AnnotationVector> training_gold, std::size_t min_count) {
  if (min_count == 0) throw Error(ErrorCode::InvalidArgument, "min_count must be at least 1");
  if (training_gold.empty()) throw Error(ErrorCode::EmptyLabelSpace, "no training annotations to count");
  LabelSpace space;
  space.min_count = min_count;
  for (const auto& vec : training_gold) {
    const auto bits = flatten(vec);
    for (std::size_t i = 0; i < kPairCount; ++i) {
      if (bits.bits().test(i)) ++space.counts_basis[i];
    }
  }
  for (std::size_t i = 0; i < kPairCount; ++i) {
    if (space.counts_basis[i] >= min_count) space.retained.push_back(LabelPair::from_flat_index(i));
  }
  return space;
}

LabelSpace select_labels(const GoldSet& training_gold, std::size_t min_count) {
  std::vector<AnnotationVector> vecs;
  vecs.reserve(training_gold.size());
  for (const auto& [id, vec] : training_gold) vecs.push_back(vec);
  return select_labels(vecs, min_count);
}

}  // namespace valex
