#include <gtest/gtest.h>

#include <climits>
#include <filesystem>

#include "goalimagine/detection.hpp"
#include "goalimagine/edge_map.hpp"
#include "goalimagine/render.hpp"

using namespace goalimagine;

namespace {

const std::string kRoot = GOALIMAGINE_SOURCE_DIR;

class FixedBackend : public DetectionBackend {
 public:
  explicit FixedBackend(std::vector<Detection> dets) : dets_(std::move(dets)) {}
  std::string name() const override { return "fixed"; }
  std::vector<Detection> detect(const CandidateImage&, const std::string&) override { return dets_; }

 private:
  std::vector<Detection> dets_;
};

Detection det(double conf, double x0, double y0, const std::string& label = "bowl") {
  return {label, {x0, y0, x0 + 4, y0 + 4}, conf, 0};
}

CandidateImage blank(int index = 3) { return {RasterImage(32, 32), index, "req", "test"}; }

struct MockRun {
  Scene scene;
  std::shared_ptr<MockGroundTruth> truth = std::make_shared<MockGroundTruth>();
  std::vector<CandidateImage> candidates;
};

MockRun mock_run(const std::string& scene_file, std::uint64_t seed, int batch) {
  MockRun run;
  run.scene = load_scene(kRoot + "/scenes/" + scene_file);
  MockGenerationBackend backend(run.scene, rules_for_scene(run.scene), run.truth);
  GenRequest req;
  req.edge_map = EdgeMap(run.scene.camera.width, run.scene.camera.height);
  req.prompt = task_prompt(run.scene.task);
  req.params.batch = batch;
  req.params.seed = seed;
  req.request_id = "req-" + std::to_string(seed);
  run.candidates = generate_candidates(req, backend);
  return run;
}

}  // namespace

TEST(Detect, SortsByConfidenceThenPosition) {
  FixedBackend backend({det(0.7, 1, 1), det(0.9, 5, 5), det(0.7, 2, 0), det(0.7, 0, 1)});
  const auto out = detect(blank(), "bowl", backend);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].confidence, 0.9);
  EXPECT_EQ(out[1].bbox.y_min, 0);
  EXPECT_EQ(out[2].bbox.x_min, 0);
  EXPECT_EQ(out[3].bbox.x_min, 1);
  for (const auto& d : out) EXPECT_EQ(d.candidate_index, 3);
}

TEST(Detect, DropsOtherLabelsAndRejectsBadBoxes) {
  FixedBackend mixed({det(0.5, 1, 1, "glass"), det(0.6, 1, 1)});
  EXPECT_EQ(detect(blank(), "bowl", mixed).size(), 1u);

  FixedBackend outside({det(0.5, 30, 30)});
  EXPECT_THROW(detect(blank(), "bowl", outside), DetectionError);
  FixedBackend confidence({det(1.5, 1, 1)});
  EXPECT_THROW(detect(blank(), "bowl", confidence), DetectionError);
  FixedBackend fine({});
  EXPECT_THROW(detect(blank(), "chair", fine), DetectionError);
}

TEST(Filter, Examples) {
  const std::vector<Detection> in{det(0.9, 0, 0), det(0.4, 0, 0)};
  const auto out = filter_detections(in, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].confidence, 0.9);
  EXPECT_EQ(filter_detections(in, 0.0).size(), 2u);
  EXPECT_TRUE(filter_detections({}, 0.3).empty());
  EXPECT_EQ(filter_detections({det(0.25, 0, 0)}, 0.25).size(), 1u);
  EXPECT_THROW(filter_detections(in, 1.5), std::invalid_argument);
}

TEST(Oracle, BboxBoundsDifferingPixels) {
  for (const char* scene : {"table.json", "wall.json"}) {
    MockRun run = mock_run(scene, 5, 3);
    OracleDetectionBackend oracle(run.truth);
    const std::string label(task_object_label(run.scene.task));
    const RasterImage base = render(run.scene, run.scene.camera).raster;
    for (const auto& c : run.candidates) {
      int x0 = INT_MAX, y0 = INT_MAX, x1 = -1, y1 = -1;
      for (int y = 0; y < base.height; ++y)
        for (int x = 0; x < base.width; ++x)
          if (c.image.at(x, y) != base.at(x, y))
            x0 = std::min(x0, x), y0 = std::min(y0, y), x1 = std::max(x1, x), y1 = std::max(y1, y);
      ASSERT_GE(x1, 0);
      const auto dets = detect(c, label, oracle);
      ASSERT_EQ(dets.size(), 1u) << scene;
      EXPECT_EQ(dets[0].bbox, (BBox{double(x0), double(y0), double(x1 + 1), double(y1 + 1)})) << scene;
      EXPECT_EQ(dets[0].confidence, 1.0);
      EXPECT_TRUE(bbox_valid(dets[0].bbox, base.width, base.height));
      EXPECT_EQ(detect(c, label, oracle)[0].bbox, dets[0].bbox);
    }
  }
}

TEST(Oracle, BaseRenderYieldsNothing) {
  MockRun run = mock_run("table.json", 6, 1);
  OracleDetectionBackend oracle(run.truth);
  CandidateImage base = run.candidates[0];
  base.image = render(run.scene, run.scene.camera).raster;
  EXPECT_TRUE(detect(base, "bowl", oracle).empty());
  EXPECT_TRUE(detect(run.candidates[0], "picture_frame", oracle).empty());
}

TEST(Oracle, UnknownImageHasNoGroundTruth) {
  OracleDetectionBackend oracle(std::make_shared<MockGroundTruth>());
  try {
    detect(blank(), "bowl", oracle);
    FAIL();
  } catch (const DetectionError& e) {
    EXPECT_STREQ(e.what(), "no ground truth available");
  }
}

TEST(LabelMap, LoadsBundledConfig) {
  const LabelMap m = load_label_map(kRoot + "/config/labels.json");
  EXPECT_EQ(m.at("bowl"), (std::vector<std::string>{"Bowl", "Mixing bowl"}));
  EXPECT_EQ(m.at("picture_frame"), (std::vector<std::string>{"Picture frame"}));

  const auto path = (std::filesystem::temp_directory_path() / "goalimagine_labels.json").string();
  write_file(path, R"({"bowl": ["Bowl"]})");
  EXPECT_THROW(load_label_map(path), DetectionError);
  write_file(path, "[1, 2]");
  EXPECT_THROW(load_label_map(path), DetectionError);
  std::filesystem::remove(path);
}
