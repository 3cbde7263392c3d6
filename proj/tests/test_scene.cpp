#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "testutil.hpp"
#include "walkguide/geom/mask.hpp"
#include "walkguide/scene/manifest.hpp"
#include "walkguide/scene/vocabulary.hpp"
#include "walkguide/util/error.hpp"
#include "walkguide/util/jsonl.hpp"

using namespace walkguide;
using namespace testutil;
using nlohmann::json;

TEST_CASE("vocabulary covers the 36 detector classes") {
  CHECK(scene::object_vocabulary().size() == 36);
  CHECK(scene::in_vocabulary("bollard"));
  CHECK(scene::in_vocabulary("pedestrian_traffic_light"));
  CHECK(scene::canonical_label("Bus/Taxi stop") == "bus_taxi_stop");
  CHECK(scene::canonical_label("Movable signage") == "movable_signage");
  CHECK(scene::canonical_label("TRUCK") == "truck");
  CHECK(scene::canonical_label("zebra crossing") == "other:zebra_crossing");
}

TEST_CASE("manifest loading") {
  SUBCASE("empty manifest yields an empty list") {
    auto dir = make_temp_dir("manifest_empty");
    util::write_file_atomic(dir / "manifest.jsonl", "");
    auto result = scene::load_manifest(dir / "manifest.jsonl");
    CHECK(result.scenes.empty());
    CHECK(result.issues.empty());
  }

  SUBCASE("one valid record loads with matching scene_id") {
    auto dir = make_temp_dir("manifest_one");
    json det = json::array({{{"label", "car"}, {"bbox", {0.1, 0.1, 0.3, 0.3}}, {"score", 0.9}}});
    auto manifest = write_manifest_fixture(dir, 1, 32, 32, det);
    auto result = scene::load_manifest(manifest);
    REQUIRE(result.scenes.size() == 1);
    const auto& s = result.scenes[0];
    CHECK(s.scene_id == "scene0");
    CHECK(s.image.width == 32);
    CHECK(s.depth.width == 32);
    CHECK(s.camera.fx_px == 60.0);
    CHECK(s.camera.cx_px == doctest::Approx(15.5));  // documented center default
    CHECK(s.camera.height_m == 0.8);
    REQUIRE(s.detections.size() == 1);
    CHECK(s.detections[0].label == "car");
  }

  SUBCASE("depth dimension mismatch is reported with the scene id") {
    auto dir = make_temp_dir("manifest_dims");
    image::write_pnm(dir / "bad.ppm", gradient_image(32, 32));
    image::write_depth_raw(dir / "bad.f32", uniform_depth(16, 16, 5.0f));
    json line = {{"scene_id", "bad"}, {"image", "bad.ppm"}, {"depth", "bad.f32"}};
    util::write_file_atomic(dir / "manifest.jsonl", line.dump() + "\n");

    auto result = scene::load_manifest(dir / "manifest.jsonl");
    CHECK(result.scenes.empty());
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].scene_id == "bad");
    CHECK(std::string(result.issues[0].message).find("dims") != std::string::npos);

    CHECK_THROWS_AS(scene::load_manifest(dir / "manifest.jsonl", true), Error);
  }

  SUBCASE("missing referenced files are reported and skipped") {
    auto dir = make_temp_dir("manifest_missing");
    json line = {{"scene_id", "gone"}, {"image", "gone.ppm"}, {"depth", "gone.f32"}};
    util::write_file_atomic(dir / "manifest.jsonl", line.dump() + "\n");
    auto result = scene::load_manifest(dir / "manifest.jsonl");
    CHECK(result.scenes.empty());
    CHECK(result.issues.size() == 1);
  }

  SUBCASE("duplicate scene ids are rejected") {
    auto dir = make_temp_dir("manifest_dup");
    write_manifest_fixture(dir, 1, 16, 16);
    std::string line = util::read_file(dir / "manifest.jsonl");
    util::write_file_atomic(dir / "manifest.jsonl", line + line);
    auto result = scene::load_manifest(dir / "manifest.jsonl");
    CHECK(result.scenes.size() == 1);
    CHECK(result.issues.size() == 1);
  }

  SUBCASE("round-trip keeps the record fields") {
    auto dir = make_temp_dir("manifest_rt");
    auto manifest = write_manifest_fixture(dir, 2, 16, 16);
    auto first = scene::load_manifest(manifest);
    REQUIRE(first.scenes.size() == 2);

    std::vector<json> rows;
    for (const auto& s : first.scenes) rows.push_back(scene::manifest_record_to_json(s));
    util::write_jsonl(dir / "roundtrip.jsonl", rows);
    auto second = scene::load_manifest(dir / "roundtrip.jsonl");
    REQUIRE(second.scenes.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
      CHECK(second.scenes[i].scene_id == first.scenes[i].scene_id);
      CHECK(second.scenes[i].camera.fx_px == first.scenes[i].camera.fx_px);
      CHECK(second.scenes[i].camera.cy_px == first.scenes[i].camera.cy_px);
      CHECK(second.scenes[i].depth.values == first.scenes[i].depth.values);
      CHECK(second.scenes[i].detections.size() == first.scenes[i].detections.size());
    }
  }
}

TEST_CASE("detections file edge cases") {
  auto dir = make_temp_dir("detections");

  SUBCASE("unknown labels map to other: with a warning") {
    json det = json::array({{{"label", "Hoverboard"}, {"bbox", {0.1, 0.1, 0.2, 0.2}}}});
    util::write_file_atomic(dir / "d.json", det.dump());
    std::vector<std::string> warnings;
    auto objects = scene::load_detections(dir / "d.json", &warnings);
    REQUIRE(objects.size() == 1);
    CHECK(objects[0].label == "other:hoverboard");
    CHECK(warnings.size() == 1);
  }
  SUBCASE("empty file is legal") {
    util::write_file_atomic(dir / "empty.json", "[]");
    CHECK(scene::load_detections(dir / "empty.json").empty());
  }
  SUBCASE("malformed bbox is rejected") {
    json det = json::array({{{"label", "car"}, {"bbox", {0.5, 0.1, 0.2, 0.2}}}});
    util::write_file_atomic(dir / "bad.json", det.dump());
    CHECK_THROWS_AS(scene::load_detections(dir / "bad.json"), Error);
  }
}

TEST_CASE("object filtering by region") {
  geom::Mask mask(100, 100);

  scene::DetectedObject obj;
  obj.label = "bollard";
  obj.bbox = {0.25, 0.25, 0.75, 0.75};

  SUBCASE("all-ones mask keeps everything in input order") {
    std::fill(mask.data.begin(), mask.data.end(), uint8_t(1));
    scene::DetectedObject second = obj;
    second.label = "car";
    auto kept = scene::filter_objects_by_region({obj, second}, mask);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].label == "bollard");
    CHECK(kept[1].label == "car");
  }
  SUBCASE("all-zeros mask removes everything") {
    CHECK(scene::filter_objects_by_region({obj}, mask).empty());
  }
  SUBCASE("threshold against a 30% overlap, pixel-oracle checked") {
    // bbox covers x,y in [25,74]; mask covers the 15 leftmost of those columns
    for (int y = 25; y <= 74; ++y)
      for (int x = 25; x <= 39; ++x) mask.set(x, y, 1);
    double overlap = geom::region_overlap(obj.bbox, mask);
    CHECK(overlap == doctest::Approx(0.3));
    CHECK(scene::filter_objects_by_region({obj}, mask, 0.5).empty());
    CHECK(scene::filter_objects_by_region({obj}, mask, 0.0).size() == 1);
  }
  SUBCASE("raising the threshold never adds objects") {
    std::mt19937_64 rng(3);
    auto uniform = [&](double lo, double hi) {
      return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
    };
    for (int y = 0; y < 100; ++y)
      for (int x = 0; x < 100; ++x) mask.set(x, y, uint8_t(rng() % 2));
    std::vector<scene::DetectedObject> objects;
    for (int i = 0; i < 20; ++i) {
      scene::DetectedObject o;
      double x1 = uniform(0, 0.8), y1 = uniform(0, 0.8);
      o.bbox = {x1, y1, x1 + uniform(0.05, 0.2), y1 + uniform(0.05, 0.2)};
      o.label = "car";
      objects.push_back(o);
    }
    size_t prev = objects.size() + 1;
    for (double threshold : {0.0, 0.2, 0.4, 0.6, 0.8}) {
      size_t kept = scene::filter_objects_by_region(objects, mask, threshold).size();
      CHECK(kept <= prev);
      prev = kept;
    }
  }
}

TEST_CASE("bench record validation") {
  scene::BenchRecord rec;
  rec.scene_id = "s1";
  rec.goal = {0.5, 0.4, 10.0};
  rec.dest_text = "The destination is ahead on the sidewalk.";
  rec.left_text = "There are cars on the left side.";
  rec.right_text = "There are nothing than the floor on the right side.";
  rec.path_text = "There are nothing on the path.";
  rec.reco_text = "Follow the path. The path is clear.";
  rec.passable = scene::Passable::Go;

  SUBCASE("consistent record is ok") { CHECK(scene::validate_bench_record(rec).empty()); }
  SUBCASE("reco/label mismatch") {
    rec.reco_text = "Stop and wait. A car is on the path.";
    auto violations = scene::validate_bench_record(rec);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "reco-label-mismatch");
  }
  SUBCASE("goal out of range") {
    rec.goal.x_norm = 1.2;
    auto violations = scene::validate_bench_record(rec);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "goal-out-of-range");
  }
  SUBCASE("empty text") {
    rec.left_text.clear();
    auto violations = scene::validate_bench_record(rec);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "missing-text:left");
  }
  SUBCASE("json round-trip is field-for-field identical") {
    rec.path_array = {{0.5, 1.0}, {0.5, 0.4}};
    auto restored = scene::bench_record_from_json(scene::bench_record_to_json(rec));
    CHECK(restored.scene_id == rec.scene_id);
    CHECK(restored.goal.x_norm == rec.goal.x_norm);
    CHECK(restored.goal.depth_m == rec.goal.depth_m);
    CHECK(restored.path_array == rec.path_array);
    CHECK(restored.dest_text == rec.dest_text);
    CHECK(restored.reco_text == rec.reco_text);
    CHECK(restored.passable == rec.passable);
  }
}

TEST_CASE("bench file loading rejects bad labels") {
  auto dir = make_temp_dir("bench_bad");
  json line = {{"scene_id", "s"},        {"goal", {0.5, 0.5}},  {"dest_text", "d"},
               {"left_text", "l"},       {"right_text", "r"},   {"path_text", "p"},
               {"reco_text", "Follow the path."}, {"passable", "maybe"}};
  util::write_file_atomic(dir / "bench.jsonl", line.dump() + "\n");
  CHECK_THROWS_AS(scene::load_bench(dir / "bench.jsonl"), Error);
}
