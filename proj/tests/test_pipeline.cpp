#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"
#include "walkguide/pipeline/describe.hpp"
#include "walkguide/pipeline/run.hpp"
#include "walkguide/pipeline/sample.hpp"
#include "walkguide/scene/manifest.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/jsonl.hpp"

using namespace walkguide;
using namespace testutil;
using nlohmann::json;

namespace {

// 64x64 ramp scene with a strip-friendly focal length.
scene::SceneBundle fixture_scene(const std::string& id = "s1",
                                 std::vector<scene::DetectedObject> detections = {}) {
  return make_scene(id, ramp_depth(64, 64, 2.0f, 14.0f), std::move(detections), 60.0);
}

geom::GoalPoint fixture_goal(const scene::SceneBundle& scene) {
  geom::GoalPoint goal{0.55, 0.25, 0.0};
  auto px = geom::norm_to_px(goal.x_norm, goal.y_norm, scene.depth.width, scene.depth.height);
  goal.depth_m = scene.depth.at_nearest(px.x, px.y);
  return goal;
}

gateway::GatewayOptions no_cache() {
  gateway::GatewayOptions options;
  options.backoff_initial_s = 0.001;
  return options;
}

}  // namespace

TEST_CASE("multi-turn issues six calls that land in their slots") {
  auto scene = fixture_scene();
  auto goal = fixture_goal(scene);
  auto stub = sequence_stub();
  gateway::ChatGateway gw(stub, no_cache());

  pipeline::PipelineConfig config;
  auto set = pipeline::describe_scene_multi_turn(scene, goal, config, gw);

  CHECK(stub->call_count() == 6);
  CHECK(set.dest == "S1");
  CHECK(set.left == "S2");
  CHECK(set.right == "S3");
  CHECK(set.path == "S4");
  CHECK(set.desc == "S5");
  CHECK(set.reco == "S6");

  auto calls = stub->calls();
  REQUIRE(calls.size() == 6);
  CHECK(calls[0].user_turns[0].text.find("destination is the point") != std::string::npos);
  CHECK(calls[1].user_turns[0].text.find("left") != std::string::npos);
  CHECK(calls[4].user_turns[0].text.find("where the user is located") != std::string::npos);
  // the reco call carries the five prior texts in order
  CHECK(calls[5].user_turns[0].text.find("S1 S2 S3 S4 S5") != std::string::npos);
  // masked-image style sends a masked image for the three region calls
  for (int i : {1, 2, 3}) CHECK(calls[i].user_turns[0].image.has_value());
}

TEST_CASE("responses land in the slot whose prompt elicited them") {
  // the stub tags each answer with what its prompt asked for
  auto tagging = std::make_shared<gateway::StubChatBackend>(
      [](const gateway::ChatRequest& req, int) -> std::string {
        const std::string& user = req.user_turns[0].text;
        if (user.find("destination is the point") != std::string::npos) return "TAG_DEST";
        if (user.find("select the most appropriate action") != std::string::npos)
          return "TAG_RECO";
        if (user.find("where the user is located") != std::string::npos) return "TAG_DESC";
        if (user.find("left of the path") != std::string::npos) return "TAG_LEFT";
        if (user.find("right of the path") != std::string::npos) return "TAG_RIGHT";
        if (user.find("on the path") != std::string::npos) return "TAG_PATH";
        return "TAG_UNKNOWN";
      });
  auto scene = fixture_scene("slots");
  auto goal = fixture_goal(scene);
  gateway::ChatGateway gw(tagging, no_cache());

  for (auto style : {prompts::RegionStyle::MaskedImage, prompts::RegionStyle::RegionPrompt}) {
    pipeline::PipelineConfig config;
    config.region_style = style;
    auto set = pipeline::describe_scene_multi_turn(scene, goal, config, gw);
    CHECK(set.dest == "TAG_DEST");
    CHECK(set.left == "TAG_LEFT");
    CHECK(set.right == "TAG_RIGHT");
    CHECK(set.path == "TAG_PATH");
    CHECK(set.desc == "TAG_DESC");
    CHECK(set.reco == "TAG_RECO");
  }
}

TEST_CASE("detection info flag controls the object clause") {
  std::vector<scene::DetectedObject> detections = {{"bollard", {0.8, 0.45, 0.9, 0.6}, 0.9}};
  auto scene = fixture_scene("s_det", detections);
  auto goal = fixture_goal(scene);

  SUBCASE("disabled: no prompt mentions objects") {
    auto stub = sequence_stub();
    gateway::ChatGateway gw(stub, no_cache());
    pipeline::PipelineConfig config;
    config.include_detection_info = false;
    pipeline::describe_scene_multi_turn(scene, goal, config, gw);
    for (const auto& call : stub->calls()) {
      CHECK(call.system_text.find("The image contains objects") == std::string::npos);
      CHECK(call.user_turns[0].text.find("The image contains objects") == std::string::npos);
    }
  }
  SUBCASE("enabled: dest and desc calls carry the full object list") {
    auto stub = sequence_stub();
    gateway::ChatGateway gw(stub, no_cache());
    pipeline::PipelineConfig config;
    pipeline::describe_scene_multi_turn(scene, goal, config, gw);
    auto calls = stub->calls();
    CHECK(calls[0].system_text.find("The image contains objects, bollard") != std::string::npos);
    CHECK(calls[4].system_text.find("The image contains objects, bollard") != std::string::npos);
    // reco input is the five texts, not the object list
    CHECK(calls[5].system_text.find("The image contains objects") == std::string::npos);
  }
}

TEST_CASE("object clauses are region-local, pixel-oracle checked") {
  // A bollard on the right of a centered strip: fx=60, depths 2..14 m.
  std::vector<scene::DetectedObject> detections = {{"bollard", {0.85, 0.55, 0.95, 0.7}, 0.9}};
  auto scene = fixture_scene("s_right", detections);
  auto goal = fixture_goal(scene);

  pipeline::PipelineConfig config;
  auto plan = pipeline::plan_scene(scene, goal, config);

  // oracle: the bbox overlaps only the right mask
  CHECK(geom::region_overlap(detections[0].bbox, plan.masks.right) > 0.0);
  CHECK(geom::region_overlap(detections[0].bbox, plan.masks.left) == 0.0);
  CHECK(geom::region_overlap(detections[0].bbox, plan.masks.path) == 0.0);

  auto stub = sequence_stub();
  gateway::ChatGateway gw(stub, no_cache());
  pipeline::describe_scene_multi_turn(scene, plan, config, gw);
  auto calls = stub->calls();
  CHECK(calls[1].system_text.find("bollard") == std::string::npos);  // left
  CHECK(calls[2].system_text.find("bollard") != std::string::npos);  // right
  CHECK(calls[3].system_text.find("bollard") == std::string::npos);  // path
}

TEST_CASE("single-turn issues one call and parses by section number") {
  auto scene = fixture_scene();
  auto goal = fixture_goal(scene);
  pipeline::PipelineConfig config;
  config.mode = pipeline::QueryMode::SingleTurn;

  SUBCASE("canonical numbered answer") {
    auto stub = gateway::StubChatBackend::fixed("1. D\n2. L\n3. R\n4. P\n5. W\n6. Follow the path. X. Y.");
    gateway::ChatGateway gw(stub, no_cache());
    auto set = pipeline::describe_scene_single_turn(scene, goal, config, gw);
    CHECK(stub->call_count() == 1);
    CHECK(set.dest == "D");
    CHECK(set.left == "L");
    CHECK(set.right == "R");
    CHECK(set.path == "P");
    CHECK(set.desc == "W");
    CHECK(set.reco == "Follow the path. X. Y.");
  }
  SUBCASE("missing section is a parse failure") {
    auto stub = gateway::StubChatBackend::fixed("1. D\n2. L\n3. R\n5. W\n6. Stop and wait. Z.");
    gateway::ChatGateway gw(stub, no_cache());
    try {
      pipeline::describe_scene_single_turn(scene, goal, config, gw);
      FAIL("expected parse-failure");
    } catch (const Error& e) {
      CHECK(e.code() == "parse-failure");
      CHECK(std::string(e.what()).find("4") != std::string::npos);
    }
  }
  SUBCASE("sections out of order are keyed by number") {
    auto stub = gateway::StubChatBackend::fixed("2. L\n1. D\n3. R\n4. P\n5. W\n6. Follow the path.");
    gateway::ChatGateway gw(stub, no_cache());
    auto set = pipeline::describe_scene_single_turn(scene, goal, config, gw);
    CHECK(set.dest == "D");
    CHECK(set.left == "L");
  }
}

TEST_CASE("numbered answer parsing") {
  SUBCASE("headers echoed by the model are stripped") {
    auto sections = pipeline::parse_numbered_answer(
        "1. Destination (x, y) Description: The destination is ahead.\n"
        "2. Left Side of the Path: nothing\n"
        "3. Right Side of the Path: bollards\n"
        "4. Path Description: clear\n"
        "5. Overall Scene and Pedestrian Traffic Light: sidewalk\n"
        "6. Walkability Evaluation: Follow the path. Clear. Safe.");
    CHECK(sections[0] == "The destination is ahead.");
    CHECK(sections[1] == "nothing");
    CHECK(sections[5] == "Follow the path. Clear. Safe.");
  }
  SUBCASE("multi-line bodies run to the next marker") {
    auto sections = pipeline::parse_numbered_answer("1. a\nb\n2. c\n3. d\n4. e\n5. f\n6. g");
    CHECK(sections[0] == "a\nb");
  }
  SUBCASE("duplicates keep the first occurrence and warn") {
    std::vector<std::string> warnings;
    auto sections = pipeline::parse_numbered_answer(
        "1. one\n2. two\n3. first\n3. second\n4. four\n5. five\n6. six", &warnings);
    CHECK(sections[2] == "first");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("3") != std::string::npos);
  }
  SUBCASE("empty text lists every missing section") {
    try {
      pipeline::parse_numbered_answer("");
      FAIL("expected parse-failure");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("1, 2, 3, 4, 5, 6") != std::string::npos);
    }
  }
}

TEST_CASE("recommendation label parsing") {
  CHECK(pipeline::parse_reco_label("Follow the path. The path is clear...") ==
        pipeline::RecoLabel::Go);
  CHECK(pipeline::parse_reco_label("Stop and wait. A car is on the path...") ==
        pipeline::RecoLabel::Stop);
  CHECK(pipeline::parse_reco_label("  follow the path, carefully") == pipeline::RecoLabel::Go);
  CHECK(pipeline::parse_reco_label("STOP AND WAIT!") == pipeline::RecoLabel::Stop);
  CHECK(pipeline::parse_reco_label("Proceed carefully.") == pipeline::RecoLabel::Unknown);
  CHECK(pipeline::parse_reco_label("") == pipeline::RecoLabel::Unknown);
}

TEST_CASE("training sample emission") {
  auto scene = fixture_scene();
  geom::GoalPoint goal{0.5079, 0.502, 9.0};
  scene::DescriptionSet d;
  d.dest = "The destination is ahead on the sidewalk.";
  d.left = "There are nothing than the floor on the left side.";
  d.right = "There are people on the right side.";
  d.path = "There are nothing on the path.";
  d.desc = "The user is on a sidewalk.";
  d.reco = "Follow the path. The path is clear of obstacles, so walking to the destination is "
           "possible.";
  std::vector<std::array<double, 2>> path = {{0.5, 1.0}, {0.504, 0.751}, {0.5079, 0.502}};

  SUBCASE("answer matches the golden transcription") {
    CHECK(pipeline::render_sample_answer(d, path) ==
          read_golden(GOLDEN_DIR, "sample_answer.txt"));
    CHECK(pipeline::render_sample_query(goal) == read_golden(GOLDEN_DIR, "sample_query.txt"));
  }
  SUBCASE("tag order is dest, left, right, path, reco") {
    auto sample = pipeline::emit_training_sample(scene, goal, d, path, {"m", "h"});
    size_t dest = sample.answer_text.find("<dest_desc>");
    size_t left = sample.answer_text.find("<left_desc>");
    size_t right = sample.answer_text.find("<right_desc>");
    size_t pathpos = sample.answer_text.find("<path_desc>");
    size_t reco = sample.answer_text.find("<reco_desc>");
    size_t arr = sample.answer_text.find("<path_array>");
    CHECK(dest < left);
    CHECK(left < right);
    CHECK(right < pathpos);
    CHECK(pathpos < reco);
    CHECK(reco < arr);
  }
  SUBCASE("three path points serialize as three pairs") {
    auto parsed = pipeline::parse_sample_answer(pipeline::render_sample_answer(d, path));
    REQUIRE(parsed.path_array.size() == 3);
    CHECK(parsed.path_array[1][0] == doctest::Approx(0.504));
    CHECK(parsed.dest == d.dest);
    CHECK(parsed.reco == d.reco);
  }
  SUBCASE("re-emitting identical inputs is byte-identical") {
    auto a = pipeline::emit_training_sample(scene, goal, d, path, {"m", "h"});
    auto b = pipeline::emit_training_sample(scene, goal, d, path, {"m", "h"});
    CHECK(a.answer_text == b.answer_text);
    CHECK(a.query_text == b.query_text);
    CHECK(pipeline::sample_to_json(a).dump() == pipeline::sample_to_json(b).dump());
  }
  SUBCASE("goal parses back from the query") {
    auto parsed = pipeline::parse_sample_query_goal(pipeline::render_sample_query(goal));
    CHECK(parsed.x_norm == doctest::Approx(0.5079));
    CHECK(parsed.y_norm == doctest::Approx(0.502));
  }
  SUBCASE("incomplete descriptions error") {
    d.reco.clear();
    try {
      pipeline::render_sample_answer(d, path);
      FAIL("expected incomplete-descriptions");
    } catch (const Error& e) {
      CHECK(e.code() == "incomplete-descriptions");
    }
  }
}

TEST_CASE("scene seeds are stable and scene-local") {
  CHECK(pipeline::scene_seed(1, "a") == pipeline::scene_seed(1, "a"));
  CHECK(pipeline::scene_seed(1, "a") != pipeline::scene_seed(2, "a"));
  CHECK(pipeline::scene_seed(1, "a") != pipeline::scene_seed(1, "b"));
}

TEST_CASE("run_generation over a small batch") {
  std::vector<scene::SceneBundle> scenes = {fixture_scene("a"), fixture_scene("b"),
                                            fixture_scene("c")};
  pipeline::PipelineConfig config;
  pipeline::RunOptions options;
  options.seed = 7;

  SUBCASE("three scenes produce three samples and dataset rows") {
    auto out = make_temp_dir("run3");
    auto stub = gateway::StubChatBackend::demo();
    gateway::ChatGateway gw(stub, {out / "cache", 3, 0.001, 2.0, 4});
    auto summary = pipeline::run_generation(scenes, config, options, gw, out);
    CHECK(summary.succeeded == 3);
    CHECK(summary.failed == 0);
    CHECK(std::filesystem::exists(out / "samples" / "a.json"));
    CHECK(std::filesystem::exists(out / "samples" / "c.json"));
    CHECK(util::read_jsonl(out / "dataset.jsonl").size() == 3);
    CHECK(summary.backend_calls == 18);

    SUBCASE("a re-run over the same output resumes with zero backend calls") {
      gateway::ChatGateway gw2(gateway::StubChatBackend::demo(), {out / "cache2", 3, 0.001, 2.0, 4});
      auto again = pipeline::run_generation(scenes, config, options, gw2, out);
      CHECK(again.succeeded == 3);
      CHECK(again.resumed == 3);
      CHECK(again.backend_calls == 0);
      CHECK(util::read_jsonl(out / "dataset.jsonl").size() == 3);
    }
  }
  SUBCASE("two fresh runs with the same seed are byte-identical") {
    auto out1 = make_temp_dir("runA");
    auto out2 = make_temp_dir("runB");
    gateway::ChatGateway gw1(gateway::StubChatBackend::demo(), {out1 / "cache", 3, 0.001, 2.0, 4});
    gateway::ChatGateway gw2(gateway::StubChatBackend::demo(), {out2 / "cache", 3, 0.001, 2.0, 4});
    pipeline::run_generation(scenes, config, options, gw1, out1);
    pipeline::run_generation(scenes, config, options, gw2, out2);
    CHECK(util::read_file(out1 / "dataset.jsonl") == util::read_file(out2 / "dataset.jsonl"));
  }
  SUBCASE("a shared cache makes even per-scene sample files byte-identical") {
    auto out1 = make_temp_dir("cacheA");
    auto out2 = make_temp_dir("cacheB");
    auto cache = make_temp_dir("shared_cache");
    gateway::ChatGateway gw1(gateway::StubChatBackend::demo(), {cache, 3, 0.001, 2.0, 4});
    gateway::ChatGateway gw2(gateway::StubChatBackend::demo(), {cache, 3, 0.001, 2.0, 4});
    pipeline::run_generation(scenes, config, options, gw1, out1);
    pipeline::run_generation(scenes, config, options, gw2, out2);
    for (const char* id : {"a", "b", "c"}) {
      CHECK(util::read_file(out1 / "samples" / (std::string(id) + ".json")) ==
            util::read_file(out2 / "samples" / (std::string(id) + ".json")));
    }
  }
  SUBCASE("an invalid-depth scene fails without sinking the batch") {
    scenes.push_back(make_scene("dead", uniform_depth(64, 64, 0.0f), {}, 60.0));
    auto out = make_temp_dir("runfail");
    gateway::ChatGateway gw(gateway::StubChatBackend::demo(), {out / "cache", 3, 0.001, 2.0, 4});
    auto summary = pipeline::run_generation(scenes, config, options, gw, out);
    CHECK(summary.succeeded == 3);
    CHECK(summary.failed == 1);
    REQUIRE(summary.outcomes.size() == 4);
    bool found = false;
    for (const auto& o : summary.outcomes)
      if (o.scene_id == "dead" && !o.ok && o.error.find("no-valid-depth") != std::string::npos)
        found = true;
    CHECK(found);
  }
  SUBCASE("strict mode aborts on the failure") {
    scenes.insert(scenes.begin(), make_scene("dead", uniform_depth(64, 64, 0.0f), {}, 60.0));
    options.strict = true;
    auto out = make_temp_dir("runstrict");
    gateway::ChatGateway gw(gateway::StubChatBackend::demo(), {out / "cache", 3, 0.001, 2.0, 4});
    CHECK_THROWS_AS(pipeline::run_generation(scenes, config, options, gw, out), Error);
  }
  SUBCASE("dry run renders prompts without backend calls or samples") {
    options.dry_run = true;
    auto out = make_temp_dir("rundry");
    auto stub = gateway::StubChatBackend::demo();
    gateway::ChatGateway gw(stub, {out / "cache", 3, 0.001, 2.0, 4});
    auto summary = pipeline::run_generation(scenes, config, options, gw, out);
    CHECK(summary.succeeded == 3);
    CHECK(summary.backend_calls == 0);
    CHECK(stub->call_count() == 0);
    CHECK_FALSE(std::filesystem::exists(out / "dataset.jsonl"));
  }
  SUBCASE("limit bounds the batch") {
    options.limit = 2;
    auto out = make_temp_dir("runlimit");
    gateway::ChatGateway gw(gateway::StubChatBackend::demo(), {out / "cache", 3, 0.001, 2.0, 4});
    auto summary = pipeline::run_generation(scenes, config, options, gw, out);
    CHECK(summary.total == 2);
    CHECK(util::read_jsonl(out / "dataset.jsonl").size() == 2);
  }
}

TEST_CASE("worker pool produces the same dataset as the sequential path") {
  std::vector<scene::SceneBundle> scenes;
  for (int i = 0; i < 5; ++i) scenes.push_back(fixture_scene("w" + std::to_string(i)));
  pipeline::PipelineConfig config;
  pipeline::RunOptions seq;
  seq.seed = 3;
  pipeline::RunOptions par = seq;
  par.workers = 4;

  auto out1 = make_temp_dir("seq");
  auto out2 = make_temp_dir("par");
  gateway::ChatGateway gw1(gateway::StubChatBackend::demo(), {out1 / "cache", 3, 0.001, 2.0, 4});
  gateway::ChatGateway gw2(gateway::StubChatBackend::demo(), {out2 / "cache", 3, 0.001, 2.0, 8});
  pipeline::run_generation(scenes, config, seq, gw1, out1);
  pipeline::run_generation(scenes, config, par, gw2, out2);
  CHECK(util::read_file(out1 / "dataset.jsonl") == util::read_file(out2 / "dataset.jsonl"));
}
