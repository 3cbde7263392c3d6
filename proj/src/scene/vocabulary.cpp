#include "walkguide/scene/vocabulary.hpp"

#include <algorithm>
#include <cctype>

namespace walkguide::scene {

const std::vector<std::string>& object_vocabulary() {
  static const std::vector<std::string> vocab = {
      // landmark classes
      "door",
      "elevator",
      "escalator",
      "stairs",
      "pedestrian_traffic_light",
      "entrance_of_subway_station",
      "subway_ticket_gate",
      // moving obstacles
      "person",
      "stroller",
      "car",
      "wheelchair",
      "bus",
      "dog",
      "truck",
      "cat",
      "bicycle",
      "carrier",
      "motorcycle",
      "movable_signage",
      "scooter",
      // fixed obstacles
      "tree_trunk",
      "bus_taxi_stop",
      "potted_plant",
      "kiosk",
      "traffic_light",
      "fire_hydrant",
      "traffic_sign",
      "parking_meter",
      "pole",
      "bollard",
      "bench",
      "barricade",
      "chair",
      "power_controller",
      "table",
      "traffic_light_controller",
  };
  return vocab;
}

namespace {

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

}  // namespace

bool in_vocabulary(std::string_view label) {
  const auto& vocab = object_vocabulary();
  return std::find(vocab.begin(), vocab.end(), label) != vocab.end();
}

std::string canonical_label(std::string_view raw) {
  std::string norm = normalize(raw);
  if (in_vocabulary(norm)) return norm;
  return "other:" + norm;
}

}  // namespace walkguide::scene
