#include "valex/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "text_util.hpp"
#include "valex/error.hpp"

namespace valex {

using nlohmann::json;

const VideoRecord* CorpusManifest::find(std::string_view video_id) const noexcept {
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const VideoRecord& r) { return r.video_id == video_id; });
  return it == records.end() ? nullptr : &*it;
}

namespace {

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

bool read_bool(const json& obj, const char* key, std::string_view source, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(source, line, std::string("missing field '") + key + "'");
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number_integer()) return it->get<long>() != 0;
  if (it->is_string()) {
    const auto s = detail::to_lower(it->get<std::string>());
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
  }
  parse_fail(source, line, std::string("field '") + key + "' is not a boolean");
}

std::string read_string(const json& obj, const char* key, std::string_view source, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    parse_fail(source, line, std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

CorpusManifest parse_manifest(std::string_view text, std::string_view source) {
  CorpusManifest manifest;
  manifest.source_note = std::string(source);
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  for (const auto raw : detail::split_lines(text)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_fail(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) parse_fail(source, line_no, "record is not an object");

    VideoRecord rec;
    rec.video_id = read_string(obj, "video_id", source, line_no);
    if (rec.video_id.empty()) parse_fail(source, line_no, "empty video_id");
    rec.influencer_id = read_string(obj, "influencer_id", source, line_no);
    const auto genre_text = read_string(obj, "genre", source, line_no);
    const auto genre = parse_genre(genre_text);
    if (!genre) {
      throw Error(ErrorCode::UnknownGenre, std::string(source) + ":" + std::to_string(line_no) +
                                               ": unknown genre '" + genre_text + "'");
    }
    rec.genre = *genre;
    rec.media_path = obj.value("media_path", std::string{});
    rec.has_verbal_sound = read_bool(obj, "has_verbal_sound", source, line_no);
    rec.pinned = obj.contains("pinned") ? read_bool(obj, "pinned", source, line_no) : false;
    const auto ts_text = read_string(obj, "retrieved_at", source, line_no);
    const auto ts = parse_iso8601(ts_text);
    if (!ts) parse_fail(source, line_no, "retrieved_at is not ISO-8601: '" + ts_text + "'");
    rec.retrieved_at = *ts;

    const auto [it, inserted] = first_line.try_emplace(rec.video_id, line_no);
    if (!inserted) {
      throw Error(ErrorCode::DuplicateId, std::string(source) + ":" + std::to_string(line_no) +
                                              ": duplicate video_id '" + rec.video_id + "' (first on line " +
                                              std::to_string(it->second) + ")");
    }
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  auto manifest = parse_manifest(detail::read_file(path), path.string());
  std::error_code ec;
  const auto mtime = std::filesystem::last_write_time(path, ec);
  if (!ec) {
    const auto sys = std::chrono::file_clock::to_sys(mtime);
    manifest.created_at = std::chrono::time_point_cast<std::chrono::seconds>(sys);
  }
  return manifest;
}

std::string format_manifest(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    json obj = json::object();
    obj["video_id"] = r.video_id;
    obj["influencer_id"] = r.influencer_id;
    obj["genre"] = std::string(to_string(r.genre));
    obj["media_path"] = r.media_path;
    obj["has_verbal_sound"] = r.has_verbal_sound;
    obj["pinned"] = r.pinned;
    obj["retrieved_at"] = format_iso8601(r.retrieved_at);
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

CorpusManifest filter_verbal(const CorpusManifest& manifest) {
  CorpusManifest out{{}, manifest.source_note, manifest.created_at};
  std::copy_if(manifest.records.begin(), manifest.records.end(), std::back_inserter(out.records),
               [](const VideoRecord& r) { return r.has_verbal_sound; });
  return out;
}

CorpusManifest sample_per_influencer(const CorpusManifest& manifest, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const VideoRecord*>> by_influencer;
  for (const auto& r : manifest.records) {
    auto [it, inserted] = by_influencer.try_emplace(r.influencer_id);
    if (inserted) order.push_back(r.influencer_id);
    it->second.push_back(&r);
  }
  CorpusManifest out{{}, manifest.source_note, manifest.created_at};
  for (const auto& influencer : order) {
    auto& recs = by_influencer[influencer];
    std::sort(recs.begin(), recs.end(), [](const VideoRecord* a, const VideoRecord* b) {
      if (a->pinned != b->pinned) return a->pinned;
      if (a->retrieved_at != b->retrieved_at) return a->retrieved_at > b->retrieved_at;
      return a->video_id < b->video_id;
    });
    const auto take = std::min(n, recs.size());
    for (std::size_t i = 0; i < take; ++i) out.records.push_back(*recs[i]);
  }
  return out;
}

std::string_view to_string(StratifyKey key) noexcept {
  return key == StratifyKey::Influencer ? "influencer" : "none";
}

StratifyKey parse_stratify_key(std::string_view text) {
  if (detail::iequals(text, "influencer")) return StratifyKey::Influencer;
  if (detail::iequals(text, "none")) return StratifyKey::None;
  throw Error(ErrorCode::InvalidArgument, "unknown stratify key '" + std::string(text) + "'");
}

CorpusSplit split_corpus(const CorpusManifest& manifest, SplitRatios ratios, StratifyKey stratify,
                         std::uint64_t seed) {
  const std::array<double, 3> r{ratios.train, ratios.validation, ratios.test};
  for (double x : r) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "split ratios must lie in [0,1]");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "split ratios must sum to 1");
  }

  // Units are sorted before shuffling so the result does not depend on
  // manifest order.
  std::map<std::string, std::vector<std::string>> units;
  for (const auto& rec : manifest.records) {
    const auto& key = stratify == StratifyKey::Influencer ? rec.influencer_id : rec.video_id;
    units[key].push_back(rec.video_id);
  }
  std::vector<const std::vector<std::string>*> shuffled;
  shuffled.reserve(units.size());
  for (const auto& [key, ids] : units) shuffled.push_back(&ids);

  std::mt19937_64 rng(seed);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng() % i)]);
  }

  const std::size_t n_units = shuffled.size();
  const auto non_empty_parts = static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double x) { return x > 0; }));
  if (n_units < non_empty_parts) {
    throw Error(ErrorCode::InfeasibleSplit, std::to_string(n_units) + " " + std::string(to_string(stratify)) +
                                                " unit(s) cannot fill " + std::to_string(non_empty_parts) +
                                                " non-empty parts");
  }

  // Largest-remainder apportionment.
  std::array<double, 3> target{};
  std::array<std::size_t, 3> alloc{};
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    target[p] = r[p] * static_cast<double>(n_units);
    alloc[p] = static_cast<std::size_t>(std::floor(target[p] + 1e-9));
    assigned += alloc[p];
  }
  while (assigned > n_units) {
    const auto p = static_cast<std::size_t>(std::max_element(alloc.begin(), alloc.end()) - alloc.begin());
    --alloc[p];
    --assigned;
  }
  std::array<std::size_t, 3> by_remainder{0, 1, 2};
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
    return target[a] - static_cast<double>(alloc[a]) > target[b] - static_cast<double>(alloc[b]);
  });
  for (std::size_t k = 0; assigned < n_units; k = (k + 1) % 3) {
    if (r[by_remainder[k]] > 0) {
      ++alloc[by_remainder[k]];
      ++assigned;
    }
  }
  for (std::size_t p = 0; p < 3; ++p) {
    if (r[p] > 0 && alloc[p] == 0) {
      std::size_t donor = 3;
      double best = -1e300;
      for (std::size_t q = 0; q < 3; ++q) {
        const double surplus = static_cast<double>(alloc[q]) - target[q];
        if (alloc[q] > 1 && surplus > best) {
          best = surplus;
          donor = q;
        }
      }
      if (donor == 3) throw Error(ErrorCode::InfeasibleSplit, "cannot give every non-empty part a unit");
      --alloc[donor];
      ++alloc[p];
    }
  }

  CorpusSplit split;
  split.stratification_key = stratify;
  split.seed = seed;
  std::array<std::vector<std::string>*, 3> parts{&split.train, &split.validation, &split.test};
  std::size_t cursor = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t k = 0; k < alloc[p]; ++k, ++cursor) {
      const auto& ids = *shuffled[cursor];
      parts[p]->insert(parts[p]->end(), ids.begin(), ids.end());
    }
    std::sort(parts[p]->begin(), parts[p]->end());
  }
  return split;
}

CorpusStats corpus_stats(const CorpusManifest& manifest, const GoldSet& gold) {
  std::vector<std::string> missing;
  for (const auto& rec : manifest.records) {
    if (!gold.contains(rec.video_id)) missing.push_back(rec.video_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    throw Error(ErrorCode::MissingGold, std::to_string(missing.size()) + " video(s) without gold labels: " + list);
  }
  CorpusStats stats;
  stats.n_videos = manifest.records.size();
  for (const auto& rec : manifest.records) {
    const auto& vec = gold.at(rec.video_id);
    const auto bits = flatten(vec);
    for (std::size_t i = 0; i < kPairCount; ++i) {
      if (bits.bits().test(i)) ++stats.per_value_counts[i];
    }
    stats.n_labels += vec.label_count();
    ++stats.labels_per_video_histogram[vec.label_count()];
  }
  return stats;
}

}  // namespace valex
