#pragma once

// Shared test data: temporary directories, random label vectors, the tennis
// script used as a worked example, and a keyword-separable synthetic corpus.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "valex/annotation_io.hpp"
#include "valex/corpus.hpp"
#include "valex/domain.hpp"
#include "valex/encoder.hpp"
#include "valex/parsers.hpp"

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "valex-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Each value independently Present/Conflicted with the given probabilities.
inline valex::AnnotationVector random_vector(std::mt19937_64& rng, double p_present = 0.12,
                                             double p_conflicted = 0.06) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  valex::AnnotationVector v;
  for (std::size_t i = 0; i < valex::kValueCount; ++i) {
    const double x = u(rng);
    if (x < p_present) v.set(i, valex::Label::Present);
    else if (x < p_present + p_conflicted) v.set(i, valex::Label::Conflicted);
  }
  return v;
}

inline constexpr const char* kTennisVideoId = "7341895431883967746";

/// A gaming creator trying to return serves from a professional player.
inline const std::string kTennisScript = R"(Genre: Sports/Challenge
Sound: Yes
NARRATOR: "This pro tennis player Taylor Fritz with one of the fastest serves on tour. His fastest serve ever was 240 KM/H, but can I, a person who's never played tennis, return one?"
[pro]
TAYLOR FRITZ is shown on a tennis court serving, then staring into the camera.
[#9 IN THE WORLD]
[with one]
[fastest]
[serves]
[240KM/H]
[I]
[never]
[return]
The NARRATOR is shown holding a tennis racket, about to return a serve.
[SERVE 1]
TAYLOR FRITZ serves the ball. The NARRATOR misses.
NARRATOR: "Oof"
[SERVE 4]
TAYLOR FRITZ serves. The NARRATOR misses again.
NARRATOR: "Oh, yo, that was..."
[SERVE 10]
TAYLOR FRITZ serves. The NARRATOR misses.
NARRATOR: "F*ck"
[SERVE 18]
TAYLOR FRITZ serves. The NARRATOR misses.
NARRATOR: "F*ck. [giggles] Yo!"
[SERVE 24]
TAYLOR FRITZ serves. The NARRATOR misses.
NARRATOR: "F*ck, I thought I could do this."
[SERVE 32]
TAYLOR FRITZ serves. The NARRATOR misses.
NARRATOR: "F*ck no, I cannot!"
[SERVE 38]
TAYLOR FRITZ serves. The NARRATOR misses.
[SERVE 47]
TAYLOR FRITZ serves. The NARRATOR hits the ball back.
NARRATOR: "Oh! Where'd it go?"
[50TH SERVE]
TAYLOR FRITZ serves for the last time.
NARRATOR: "Oh, come on."
)";

/// ACHIEVEMENT present, FACE conflicted.
inline valex::AnnotationVector tennis_gold() {
  valex::AnnotationVector v;
  v.set("ACHIEVEMENT", valex::Label::Present);
  v.set("FACE", valex::Label::Conflicted);
  return v;
}

/// Scripts where each labelled pair is signalled by one marker token that
/// never shares an encoder bucket with filler words or other markers.
struct SeparableCorpus {
  valex::CorpusManifest manifest;
  std::map<std::string, valex::Script> scripts;
  valex::GoldSet gold;
  std::vector<valex::LabelPair> pairs;
  std::map<valex::LabelPair, std::string> markers;
};

inline SeparableCorpus make_separable_corpus(std::size_t n_videos, std::size_t n_influencers, std::uint64_t seed,
                                             const valex::BagOfTokensEncoder& encoder) {
  using valex::LabelPair;
  using valex::Polarity;
  SeparableCorpus c;
  const auto idx = [](const char* name) { return *valex::value_index(name); };
  // ACHIEVEMENT carries both polarities so the exclusivity rule is exercised.
  c.pairs = {{idx("ACHIEVEMENT"), Polarity::Present},       {idx("ACHIEVEMENT"), Polarity::Conflicted},
             {idx("FACE"), Polarity::Conflicted},           {idx("HEDONISM"), Polarity::Present},
             {idx("STIMULATION"), Polarity::Present},       {idx("BENEVOLENCE-CARING"), Polarity::Present},
             {idx("SECURITY-PERSONAL"), Polarity::Conflicted}, {idx("TRADITION"), Polarity::Present}};
  std::sort(c.pairs.begin(), c.pairs.end());

  const std::vector<std::string> filler{
      "the", "a", "creator", "shows", "friends", "camera", "room", "today", "video", "we", "is", "are", "then",
      "looks", "laughs", "says", "walks", "into", "kitchen", "school", "park", "music", "plays", "dance", "phone",
      "screen", "cut", "to", "next", "shot", "of", "and", "with", "her", "his", "their", "outside", "smiles",
      "points", "at", "holds", "up", "sign", "text", "appears", "background", "bright", "light", "close", "wide"};
  std::set<std::size_t> used;
  for (const auto& w : filler) used.insert(encoder.bucket(w));
  used.insert(encoder.bucket("genre"));
  used.insert(encoder.bucket("sound"));
  used.insert(encoder.bucket("yes"));
  used.insert(encoder.bucket("no"));
  used.insert(encoder.bucket("lifestyle"));
  for (std::size_t k = 0; k < c.pairs.size(); ++k) {
    for (int attempt = 0;; ++attempt) {
      const std::string token = "marker" + std::to_string(k) + "v" + std::to_string(attempt);
      if (used.insert(encoder.bucket(token)).second) {
        c.markers[c.pairs[k]] = token;
        break;
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, filler.size() - 1);
  for (std::size_t i = 0; i < n_videos; ++i) {
    valex::VideoRecord rec;
    rec.video_id = "v" + std::to_string(100000 + i);
    rec.influencer_id = "inf" + std::to_string(i % n_influencers);
    rec.genre = valex::Genre::Lifestyle;
    c.manifest.records.push_back(rec);

    valex::AnnotationVector gold;
    std::vector<std::string> tokens;
    for (std::size_t w = 0; w < 24; ++w) tokens.push_back(filler[pick(rng)]);
    for (const auto& pair : c.pairs) {
      if (u(rng) >= 0.3) continue;
      if (gold[pair.value] != valex::Label::Absent) continue;  // one polarity per value
      gold.set(pair.value, pair.polarity == Polarity::Present ? valex::Label::Present : valex::Label::Conflicted);
      std::uniform_int_distribution<std::size_t> at(0, tokens.size());
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at(rng)), c.markers[pair]);
    }
    valex::Script script;
    script.video_id = rec.video_id;
    script.genre_header = "Lifestyle";
    script.sound_header = true;
    std::string line;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      line += (line.empty() ? "" : " ") + tokens[t];
      if (t % 8 == 7 || t + 1 == tokens.size()) {
        script.body.push_back({valex::ScriptLineKind::Action, "", line + "."});
        line.clear();
      }
    }
    c.scripts.emplace(rec.video_id, std::move(script));
    c.gold.emplace(rec.video_id, gold);
  }
  return c;
}

/// Writes <dir>/manifest.jsonl, <dir>/gold.csv and one media file per video
/// (distinct bytes, so prompt fingerprints differ).
inline void write_corpus_files(const std::filesystem::path& dir, const valex::CorpusManifest& manifest,
                               const valex::GoldSet& gold) {
  valex::CorpusManifest m = manifest;
  for (auto& r : m.records) {
    r.media_path = "media/" + r.video_id + ".mp4";
    write_text(dir / r.media_path, "video bytes for " + r.video_id);
  }
  write_text(dir / "manifest.jsonl", valex::format_manifest(m));
  valex::write_annotations(dir / "gold.csv", gold, "gold");
}

/// Mock backend rules answering each video's script prompt with its script.
inline nlohmann::json script_rules(const std::map<std::string, valex::Script>& scripts) {
  auto rules = nlohmann::json::array();
  for (const auto& [id, s] : scripts) rules.push_back({{"needle", id + ".mp4"}, {"response", valex::serialize_script(s)}});
  return rules;
}

}  // namespace fixtures
