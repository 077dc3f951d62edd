#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "goalimagine/backprojection.hpp"
#include "goalimagine/pipeline.hpp"

using namespace goalimagine;

int main(int argc, char** argv) {
  CLI::App app{"Imagine a goal state from the camera view and execute a pick-and-place towards it."};
  app.require_subcommand(0, 1);

  PipelineConfig cfg;
  app.add_option("--scene", cfg.scene_path, "Scene JSON file");
  app.add_option("--backend", cfg.backend, "Image generator")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--backend-url", cfg.backend_url, "Generator base URL");
  app.add_option("--detector", cfg.detector, "Object detector")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--detector-url", cfg.detector_url, "Detector base URL");
  app.add_option("--labels", cfg.labels_path, "Detector label map JSON");
  app.add_option("--seed", cfg.seed, "Generator seed");
  app.add_option("--batch", cfg.batch, "Candidates per round")->check(CLI::Range(1, 64));
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--max-rounds", cfg.max_rounds, "Generation rounds before giving up")->check(CLI::PositiveNumber);
  app.add_option("--timeout-secs", cfg.timeout_secs, "HTTP timeout")->check(CLI::PositiveNumber);
  app.add_option("--min-confidence", cfg.min_confidence, "Detection confidence threshold")->check(CLI::Range(0.0, 1.0));

  auto* project = app.add_subcommand("project", "Print the pixel and range of a world point");
  std::string project_scene;
  std::vector<double> point;
  project->add_option("--scene", project_scene, "Scene JSON file")->required();
  project->add_option("--point", point, "World point x y z")->expected(3)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*project) {
    try {
      const Scene scene = load_scene(project_scene);
      const auto p = project_to_pixel(scene.camera, Vec3(point[0], point[1], point[2]));
      if (!p) {
        std::cerr << "point is behind the camera\n";
        return 1;
      }
      std::printf("%.9f %.9f %.9f\n", p->pixel.x(), p->pixel.y(), p->range_m);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  if (cfg.scene_path.empty()) {
    std::cerr << "--scene is required\n" << app.help();
    return 1;
  }
  const RunManifest m = run_pipeline(cfg);
  for (const auto& e : m.errors) std::cerr << e.stage << ": " << e.message << "\n";
  if (m.exit_code == 2) std::cerr << "no valid candidate\n";
  std::cout << cfg.out_dir << "/manifest.json\n";
  return m.exit_code;
}
