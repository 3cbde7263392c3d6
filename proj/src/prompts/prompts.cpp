#include "walkguide/prompts/prompts.hpp"

#include <cstdio>

#include "walkguide/util/error.hpp"

namespace walkguide::prompts {

namespace {

// ---- template texts ----

const char* kSystemBase =
    "A chat between a human and an AI that understands visuals in English. In images, [x, y] "
    "denotes points: top-left [0.0, 0.0], bottom-right [1.0, 1.0]. Increasing x moves right; y "
    "moves down. Decreasing x moves left; y moves up. Bounding box: [x1, y1, x2, y2]. Image "
    "size: 1.0x1.0. The input image depicts the view from a pedestrian's position, taken at a "
    "point 80cm above the ground for pedestrian navigation purposes. The user is looking at the "
    "center [0.5, 0.5] of the image. Consider the starting point as the ground where the user is "
    "standing. Explain as if you were a navigation assistant explaining to a visually impaired "
    "person. Rules:\n\n"
    "1. Do not talk about detailed image coordinates. Never use pixel positional information. "
    "2. Consider perspective view of the 2D image property.";

const char* kSystemRecommendationRules =
    " 3. If the user is in front of a crosswalk, look for the pedestrian traffic light and tell "
    "me the color of the light. If there is a red pedestrian traffic light, say 'Stop and wait' "
    "option. 4. If there is an obstacle in the path obstructing the user's walk, say 'Stop and "
    "wait' option. 5. If the path leads the user into dangerous areas like roads or construction "
    "sites, say 'Stop and wait' option. 6. If the path is clear of obstacles, say 'Follow the "
    "path' option.";

const char* kDestExamples =
    "Provide a one-sentence description of the destination where the user's path is heading. "
    "Example 1) The destination is ahead on the sidewalk. Example 2) The destination is ahead on "
    "the car road. Example 3) The destination is ahead but is obscured by a truck. Example 4) "
    "The destination is ahead at the entrance of the building.";

const char* kLeftBody =
    "provide a one-sentence description that includes what is located closely to the left of "
    "the path. If there are no special objects other than the floor, say 'nothing'. Example 1) "
    "There are cars on the left side. Example 2) There are nothing than the floor on the left "
    "side.";

const char* kRightBody =
    "provide a one-sentence description that includes what is located closely to the right of "
    "the path. If there are no special objects other than the floor, say 'nothing'. Example 1) "
    "There are people on the right side. Example 2) There are nothing than the floor on the "
    "right side.";

const char* kPathBody =
    "provide a one-sentence description of what objects are on the path. Example 1) There are "
    "cars and people on the path. Example 2) There are nothing on the path.";

const char* kWholeImage =
    "Describe where the user is located based on the image. If the user is in front of a "
    "crosswalk, look for the pedestrian traffic light and tell me the color of the light. "
    "Example 1) The user is in front of a crosswalk. The pedestrian traffic light is red. "
    "Example 2) The user is in front of a construction site.";

const char* kRecommendationBody =
    "Based on the current description, evaluate the user is able to move along the path without "
    "collision or collide with other objects. Then, select the most appropriate action: 'Follow "
    "the path' or 'Stop and wait'. Say only the answer, explaining the selection and the reason "
    "in two sentences. Example 1) Stop and wait. A car is on the path, so walking to the "
    "destination is impossible. Example 2) Follow the path. The path is clear of obstacles, so "
    "walking to the destination is possible. Example 3) Stop and wait. It is in front of the "
    "crosswalk and the pedestrian traffic light is red, so walking to the destination is "
    "impossible.";

const char* kJudgeSystem =
    "Please act as an impartial judge and evaluate the quality of the description provided by "
    "an AI assistant to the user. Your evaluation should consider correctness and helpfulness. "
    "You will be given a reference description and the assistant's description. You evaluation "
    "should focus on the assistant's description. Begin your evaluation by comparing the "
    "assistant's description with the reference description. Identify and correct any mistakes. "
    "Be as objective as possible. After providing your explanation, you must rate the response "
    "on a scale of 1 to 10 by strictly following this format: \"[[rating]]\", for example: "
    "\"Rating: [[5]]\".";

std::string path_preamble(NormPoint start, NormPoint goal) {
  return "Assume the user is moving along a 2-meter-wide path from the starting point " +
         format_point(start) + " to the destination point " + format_point(goal) +
         " in the image. ";
}

std::string display_label(const std::string& label) {
  std::string name = label.rfind("other:", 0) == 0 ? label.substr(6) : label;
  for (char& c : name)
    if (c == '_') c = ' ';
  return name;
}

}  // namespace

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Dest: return "dest";
    case QueryKind::Left: return "left";
    case QueryKind::Right: return "right";
    case QueryKind::Path: return "path";
    case QueryKind::Desc: return "desc";
    case QueryKind::Reco: return "reco";
  }
  return "?";
}

std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string format_point(NormPoint p) {
  return "[" + format_coord(p.x) + ", " + format_coord(p.y) + "]";
}

std::string render_object_clause(const std::vector<scene::DetectedObject>& objects) {
  if (objects.empty()) throw Error("empty-objects", "object clause needs at least one object");
  std::string out = "The image contains objects, ";
  for (size_t i = 0; i < objects.size(); ++i) {
    if (i) out += ", ";
    const auto& o = objects[i];
    out += display_label(o.label) + " [" + format_coord(o.bbox[0]) + ", " +
           format_coord(o.bbox[1]) + ", " + format_coord(o.bbox[2]) + ", " +
           format_coord(o.bbox[3]) + "]";
  }
  out += ".";
  return out;
}

std::string render_system_prompt(SystemKind kind,
                                 const std::vector<scene::DetectedObject>* objects) {
  std::string out = kSystemBase;
  if (kind == SystemKind::Recommendation) out += kSystemRecommendationRules;
  if (objects && !objects->empty()) out += " " + render_object_clause(*objects);
  return out;
}

std::string render_region_user_prompt(QueryKind kind, RegionStyle mode, NormPoint start,
                                      NormPoint goal) {
  switch (kind) {
    case QueryKind::Dest:
      // Coordinates work better than masking for destinations, so the
      // region-prompt style is used in both modes.
      return "Assume the user's destination is the point " + format_point(goal) +
             " in the image. " + kDestExamples;
    case QueryKind::Left:
      if (mode == RegionStyle::MaskedImage)
        return std::string("Assume the visible area in the image is to the left of the user's "
                           "path. Analyze the visible area and ") +
               kLeftBody;
      return path_preamble(start, goal) + "Analyze the input image and " + kLeftBody;
    case QueryKind::Right:
      if (mode == RegionStyle::MaskedImage)
        return std::string("Assume the visible area in the image is to the right of the user's "
                           "path. Analyze the visible area and ") +
               kRightBody;
      return path_preamble(start, goal) + "Analyze the input image and " + kRightBody;
    case QueryKind::Path:
      if (mode == RegionStyle::MaskedImage)
        return std::string("Assume the visible area in the image is the user's path and the "
                           "user moves forward along the visible area of the image. Analyze the "
                           "visible area and ") +
               kPathBody;
      return path_preamble(start, goal) + "Analyze the input image and " + kPathBody;
    case QueryKind::Desc:
    case QueryKind::Reco:
      break;
  }
  throw Error("wrong-renderer", std::string(to_string(kind)) + " has a dedicated renderer");
}

std::string render_masked_destination_prompt() {
  return std::string("Assume the visible area in the image is the user's path and the user moves "
                     "forward along the visible area of the image. ") +
         kDestExamples;
}

std::string render_whole_image_prompt() { return kWholeImage; }

std::string render_recommendation_prompt(const scene::DescriptionSet& d) {
  if (d.dest.empty() || d.left.empty() || d.right.empty() || d.path.empty() || d.desc.empty())
    throw Error("incomplete-descriptions", "all five descriptions are required");
  std::string five = d.dest + " " + d.left + " " + d.right + " " + d.path + " " + d.desc;
  return "The image description is following: " + five + " " + kRecommendationBody +
         " Say only the answers.";
}

const char* single_turn_section_header(int section) {
  switch (section) {
    case 1: return "Destination (x, y) Description:";
    case 2: return "Left Side of the Path:";
    case 3: return "Right Side of the Path:";
    case 4: return "Path Description:";
    case 5: return "Overall Scene and Pedestrian Traffic Light:";
    case 6: return "Walkability Evaluation:";
  }
  return "";
}

std::pair<std::string, std::string> render_single_turn_prompt(NormPoint start, NormPoint goal) {
  std::string user =
      path_preamble(start, goal) +
      "Provide the response in a structured format with numbered sections to separate the "
      "details clearly:\n\n"
      "1. " + std::string(single_turn_section_header(1)) + "\n\n" + kDestExamples + "\n\n"
      "2. " + single_turn_section_header(2) + "\n\n" +
      "Analyze the input image and " + kLeftBody + "\n\n"
      "3. " + single_turn_section_header(3) + "\n\n" +
      "Analyze the input image and " + kRightBody + "\n\n"
      "4. " + single_turn_section_header(4) + "\n\n" +
      "Analyze the input image and " + kPathBody + "\n\n"
      "5. " + single_turn_section_header(5) + "\n\n" + kWholeImage + "\n\n"
      "6. " + single_turn_section_header(6) + "\n\n" + kRecommendationBody;
  return {render_system_prompt(SystemKind::Recommendation), user};
}

std::pair<std::string, std::string> render_judge_prompts(const std::string& reference,
                                                         const std::string& assistant) {
  std::string user = "<|The Start of Reference Description|>\n" + reference +
                     "\n<|The End of Reference Description|>\n\n"
                     "<|The Start of Assistant A's Description|>\n" +
                     assistant + "\n<|The End of Assistant A's Description|>";
  return {kJudgeSystem, user};
}

}  // namespace walkguide::prompts
