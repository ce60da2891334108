#include <algorithm>
#include <array>

#include "valex/domain.hpp"
#include "valex/error.hpp"

namespace valex {
namespace {

// Examples are phrased for short-form video content; each value gets one
// expression and one contradiction so the codebook can double as a prompt.
const std::array<ValueDef, kValueCount>& catalog_storage() {
  static const std::array<ValueDef, kValueCount> kCatalog{{
      {"SELF-DIRECTION-THOUGHT", "SELF-DIRECTION–THOUGHT",
       "Freedom to cultivate one's own ideas and abilities",
       {"The creator explains how they taught themselves to draw and encourages viewers to develop their own style."},
       {"The creator mocks a friend for having an original opinion and tells viewers to just copy what is trending."}},
      {"SELF-DIRECTION-ACTION", "SELF-DIRECTION–ACTION",
       "Freedom to determine one's own actions",
       {"A teenager shows how they planned their own day and chose their own after-school activities."},
       {"The video shows someone being forced to follow a routine they clearly do not want, with no say in it."}},
      {"STIMULATION", "STIMULATION", "Excitement, novelty, and change",
       {"The creator tries an extreme roller coaster for the first time and screams with excitement."},
       {"The creator complains that trying anything new is pointless and prefers every day to be exactly the same."}},
      {"HEDONISM", "HEDONISM", "Pleasure and sensuous gratification",
       {"A mukbang where the creator savors a huge dessert and describes how good it tastes."},
       {"The creator lectures viewers that having fun or enjoying treats is shameful."}},
      {"ACHIEVEMENT", "ACHIEVEMENT", "Success according to social standards",
       {"Followers compete in a challenge and the winner celebrates beating everyone else."},
       {"The creator shrugs off a failed attempt, shows no ambition, and says trying hard is for losers."}},
      {"POWER-DOMINANCE", "POWER–DOMINANCE", "Power through exercising control over people",
       {"The creator orders their siblings around and makes them do everything they say."},
       {"The creator gives up control of a group game and lets others decide everything."}},
      {"POWER-RESOURCES", "POWER–RESOURCES", "Power through control of material and social resources",
       {"A haul video showing off expensive designer items and stacks of cash."},
       {"The creator gives away all their expensive belongings and says money should not matter."}},
      {"FACE", "FACE",
       "Security and power through maintaining one's public image and avoiding humiliation",
       {"The creator carefully retakes a clip so they never look embarrassing on camera."},
       {"The creator posts themselves failing again and again and being laughed at."}},
      {"SECURITY-PERSONAL", "SECURITY–PERSONAL", "Safety in one's immediate environment",
       {"The creator shows how they lock the door and check the stove before leaving home."},
       {"A prank that puts the creator's friend in physical danger."}},
      {"SECURITY-SOCIETAL", "SECURITY–SOCIETAL", "Safety and stability in the wider society",
       {"The creator thanks firefighters and police for keeping the town safe."},
       {"The creator encourages viewers to vandalize public property."}},
      {"TRADITION", "TRADITION", "Maintaining and preserving cultural, family, or religious traditions",
       {"A family cooks a traditional holiday recipe passed down from grandparents."},
       {"The creator ridicules a religious holiday custom as outdated and stupid."}},
      {"CONFORMITY-RULES", "CONFORMITY–RULES", "Compliance with rules, laws, and formal obligations",
       {"The creator reminds viewers to wear a helmet and obey traffic lights when biking."},
       {"The creator sneaks into a closed area and brags about breaking the rules."}},
      {"CONFORMITY-INTERPERSONAL", "CONFORMITY–INTERPERSONAL",
       "Avoidance of upsetting or harming other people",
       {"The creator lowers the music late at night so the neighbors are not disturbed."},
       {"A prank that deliberately scares and upsets a stranger in public."}},
      {"HUMILITY", "HUMILITY", "Recognizing one's insignificance in the larger scheme of things",
       {"After winning, the creator says they were lucky and credits everyone who helped."},
       {"The creator boasts that they are better than everyone watching."}},
      {"BENEVOLENCE-DEPENDABILITY", "BENEVOLENCE–DEPENDABILITY",
       "Being a reliable and trustworthy member of the in-group",
       {"The creator keeps a promise to help their best friend move, even though it is raining."},
       {"The creator reveals a friend's secret to the camera for views."}},
      {"BENEVOLENCE-CARING", "BENEVOLENCE–CARING", "Devotion to the welfare of in-group members",
       {"The creator surprises their mother with breakfast in bed because she was sick."},
       {"The creator ignores a crying younger sibling to keep filming."}},
      {"UNIVERSALISM-CONCERN", "UNIVERSALISM–CONCERN",
       "Commitment to equality, justice, and protection for all people",
       {"The creator raises money for children in need in another country."},
       {"The creator makes fun of people who cannot afford nice clothes."}},
      {"UNIVERSALISM-NATURE", "UNIVERSALISM–NATURE", "Preservation of the natural environment",
       {"The creator picks up litter on the beach and asks viewers to recycle."},
       {"The creator throws trash into a river as a joke."}},
      {"UNIVERSALISM-TOLERANCE", "UNIVERSALISM–TOLERANCE",
       "Acceptance and understanding of those who are different from oneself",
       {"The creator invites a friend to share a culture different from their own and listens respectfully."},
       {"The creator mocks someone's accent and tells them to go back where they came from."}},
  }};
  return kCatalog;
}

}  // namespace

std::span<const ValueDef> value_catalog() noexcept { return catalog_storage(); }

std::string normalize_value_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  auto push_dash = [&out] {
    if (!out.empty() && out.back() != '-') out.push_back('-');
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    // U+2010..U+2015 (hyphen, en dash, em dash ...) are E2 80 90..95 in UTF-8.
    if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
        static_cast<unsigned char>(raw[i + 2]) >= 0x90 && static_cast<unsigned char>(raw[i + 2]) <= 0x95) {
      push_dash();
      i += 2;
    } else if (c == ' ' || c == '_' || c == '-' || c == '\t') {
      push_dash();
    } else if (c >= 'a' && c <= 'z') {
      out.push_back(static_cast<char>(c - 'a' + 'A'));
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  while (!out.empty() && out.front() == '-') out.erase(out.begin());
  return out;
}

std::optional<std::size_t> value_index(std::string_view name) noexcept {
  try {
    const auto key = normalize_value_name(name);
    const auto& catalog = catalog_storage();
    const auto it = std::find_if(catalog.begin(), catalog.end(),
                                 [&](const ValueDef& def) { return def.name == key; });
    if (it == catalog.end()) return std::nullopt;
    return static_cast<std::size_t>(it - catalog.begin());
  } catch (...) {
    return std::nullopt;
  }
}

const ValueDef& find_value(std::string_view name) {
  if (const auto index = value_index(name)) return catalog_storage()[*index];
  throw Error(ErrorCode::NotFound, "no value named '" + std::string(name) + "' in the catalog");
}

}  // namespace valex
