#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "valex/annotation_io.hpp"
#include "valex/domain.hpp"

namespace valex {

struct CorpusManifest {
  std::vector<VideoRecord> records;
  std::string source_note;
  Timestamp created_at{};

  std::size_t size() const noexcept { return records.size(); }
  const VideoRecord* find(std::string_view video_id) const noexcept;
};

/// Manifest file: one JSON object per line with fields video_id,
/// influencer_id, genre, media_path, has_verbal_sound, pinned, retrieved_at.
/// Blank lines and lines starting with '#' are skipped. Relative media paths
/// are kept as written.
CorpusManifest parse_manifest(std::string_view text, std::string_view source = "<input>");
CorpusManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const CorpusManifest& manifest);

/// Keeps records with has_verbal_sound, preserving order.
CorpusManifest filter_verbal(const CorpusManifest& manifest);

/// Up to n records per influencer: pinned first, then most recent by
/// retrieved_at (ties by video_id). Influencers appear in first-seen order.
CorpusManifest sample_per_influencer(const CorpusManifest& manifest, std::size_t n);

enum class StratifyKey : std::uint8_t { Influencer, None };
std::string_view to_string(StratifyKey key) noexcept;
StratifyKey parse_stratify_key(std::string_view text);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  StratifyKey stratification_key = StratifyKey::Influencer;
  std::uint64_t seed = 0;

  friend bool operator==(const CorpusSplit&, const CorpusSplit&) = default;
};

/// Deterministic for a fixed seed. Units (influencers, or single videos when
/// unstratified) are shuffled, then apportioned by largest remainder; every
/// part with a positive ratio receives at least one unit. Throws
/// Error(InvalidArgument) on bad ratios and Error(InfeasibleSplit) when there
/// are fewer units than non-empty parts.
CorpusSplit split_corpus(const CorpusManifest& manifest, SplitRatios ratios, StratifyKey stratify,
                         std::uint64_t seed);

struct CorpusStats {
  std::size_t n_videos = 0;
  std::size_t n_labels = 0;
  std::array<std::size_t, kPairCount> per_value_counts{};  // indexed by LabelPair::flat_index()
  std::map<std::size_t, std::size_t> labels_per_video_histogram;

  std::size_t count(LabelPair pair) const { return per_value_counts[pair.flat_index()]; }
};

/// Throws Error(MissingGold) listing manifest ids that have no gold vector.
CorpusStats corpus_stats(const CorpusManifest& manifest, const GoldSet& gold);

}  // namespace valex
