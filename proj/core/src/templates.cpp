#include "templates.hpp"

#include "sentishape/envsim.hpp"
#include "sentishape/random.hpp"

namespace sshape {

const std::vector<std::string>& positive_phrases() {
  static const std::vector<std::string> bank = {
      "Good job!",
      "Well done!",
      "Excellent work!",
      "Great success!",
      "Wonderful!",
      "Splendid, you are doing great!",
      "Fantastic progress!",
      "Brilliant!",
      "Hooray!",
      "You feel proud and happy.",
      "Warm sunlight shines ahead.",
      "A pleasant breeze lifts your spirits.",
      "You feel hopeful and confident.",
      "Everything is going perfectly.",
      "What a delightful moment!",
      "Superb choice!",
      "You are on the right track!",
      "Bravo, nicely handled!",
      "A cheerful glow fills you with joy.",
      "Marvelous, keep it up!",
  };
  return bank;
}

const std::vector<std::string>& negative_phrases() {
  static const std::vector<std::string> bank = {
      "Ouch!",
      "That hurts badly.",
      "How frustrating.",
      "Oh no!",
      "This is terrible.",
      "You feel awful.",
      "What a miserable failure.",
      "Your ankles throb with pain.",
      "A cold dread creeps over you.",
      "Darkness and gloom surround you.",
      "You feel lost and hopeless.",
      "Nothing but misery here.",
      "Ugh, a painful mistake.",
      "You groan in despair.",
      "A foul stench makes you sick.",
      "Wrong, dreadfully wrong.",
      "You feel foolish and weak.",
      "Bitter disappointment sinks in.",
      "Alas, that went badly.",
      "You shiver with fear.",
  };
  return bank;
}

const std::vector<std::string>& neutral_phrases() {
  static const std::vector<std::string> bank = {
      "The walls are painted beige.",
      "A clock ticks somewhere.",
      "The floor is made of wood.",
      "There is a small window here.",
      "The ceiling is rather high.",
      "A rug lies on the floor.",
      "The air is still.",
      "A shelf stands against the wall.",
      "There is a chair in the corner.",
      "A lamp hangs from above.",
      "The room smells of dust.",
      "Some paper lies on a table.",
      "A door frame marks the passage.",
      "The light is dim and even.",
      "A plain curtain covers one wall.",
      "A basket sits by the door.",
      "Footprints cross the floor.",
      "An old map is pinned up.",
      "The paint is slightly faded.",
      "A bench runs along one side.",
  };
  return bank;
}

namespace detail {

const std::string& pick_phrase(const std::vector<std::string>& bank, std::uint64_t seed,
                               int step, std::uint64_t salt) {
  const std::uint64_t h = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(step)), salt);
  return bank[h % bank.size()];
}

const std::vector<std::string>& room_name_bank() {
  static const std::vector<std::string> bank = {
      "kitchen", "pantry", "garden", "cellar", "hallway", "parlor",
      "bedroom", "bathroom", "backyard", "shed", "study", "attic",
  };
  return bank;
}

const std::vector<std::string>& ingredient_bank() {
  static const std::vector<std::string> bank = {
      "carrot", "potato", "onion", "tomato", "egg", "cheese", "apple", "pepper",
  };
  return bank;
}

}  // namespace detail
}  // namespace sshape
