#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ixgen/manifest.hpp"
#include "ixgen/opendrive.hpp"
#include "ixgen/pipeline.hpp"

using namespace ixgen;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineError::Kind config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const PipelineError& e) {
    return e.kind();
  }
  FAIL("expected PipelineError");
  return PipelineError::Kind::Input;
}

// Classifies the fixture corpus once per process.
const fs::path& class_dir() {
  static const fs::path dir = [] {
    auto d = fixtures::scratch("pipeline_classes");
    std::ostringstream log;
    run_classify(fixtures::data_dir() / "corpus.txt", d, log);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({
    // comments are allowed
    "seed": 9, "jobs": 3,
    "domains": {"lane_counts": [2, 3], "min_radii": ["inf", 80], "max_slopes": [1.5]},
    "sampling": {"candidates": 10, "limit": 4},
    "optimizer": {"max_generations": 150},
    /* block comment */
    "synthesis": {"retry_limit": 1}
  })");
  CHECK(c.seed == 9);
  CHECK(c.jobs == 3);
  CHECK(c.domains.lane_counts == std::vector<int>{2, 3});
  CHECK(std::isinf(c.domains.min_radii[0]));
  CHECK(c.domains.min_radii[1] == 80);
  CHECK(c.candidates == 10);
  CHECK(c.limit == 4);
  CHECK(c.synthesis.de.max_generations == 150);
  CHECK(c.synthesis.retry_limit == 1);
  CHECK(c.layout.level_clearance == LayoutConfig{}.level_clearance);

  const auto d = parse_config("{}");
  CHECK(d.seed == 1);
  CHECK(d.domains.min_radii == FeatureDomains{}.min_radii);

  using K = PipelineError::Kind;
  CHECK(config_error("{") == K::Config);
  CHECK(config_error(R"({"sede": 1})") == K::Config);
  CHECK(config_error(R"({"layout": {"median": 6, "colour": 1}})") == K::Config);
  CHECK(config_error(R"({"jobs": 0})") == K::Config);
  CHECK(config_error(R"({"seed": "x"})") == K::Config);
  CHECK(config_error(R"({"domains": {"max_slopes": []}})") == K::Config);
  CHECK(config_error(R"({"optimizer": {"crossover_rate": 2}})") == K::Config);
}

TEST_CASE("the documented example config is the default config") {
  const auto c = load_config(fs::path(IXGEN_DATA_DIR).parent_path() / "docs" / "config.example.json");
  const PipelineConfig d;
  CHECK(c.seed == d.seed);
  CHECK(c.jobs == d.jobs);
  CHECK(c.candidates == d.candidates);
  CHECK(c.limit == d.limit);
  CHECK(c.domains.lane_counts == d.domains.lane_counts);
  CHECK(c.domains.min_radii == d.domains.min_radii);
  CHECK(c.domains.max_slopes == d.domains.max_slopes);
  const auto &l = c.layout, &dl = d.layout;
  CHECK(l.level_clearance == dl.level_clearance);
  CHECK(l.lane_width == dl.lane_width);
  CHECK(l.half_length == dl.half_length);
  CHECK(l.endpoint_jitter == dl.endpoint_jitter);
  CHECK(l.median == dl.median);
  CHECK(l.median_jitter == dl.median_jitter);
  CHECK(l.crossing_jitter_deg == dl.crossing_jitter_deg);
  CHECK(l.stem_gap == dl.stem_gap);
  const auto &de = c.synthesis.de, &dde = d.synthesis.de;
  CHECK(de.population_size == dde.population_size);
  CHECK(de.differential_weight == dde.differential_weight);
  CHECK(de.crossover_rate == dde.crossover_rate);
  CHECK(de.max_generations == dde.max_generations);
  CHECK(de.tolerance == dde.tolerance);
  const auto &w = c.synthesis.weights, &dw = d.synthesis.weights;
  CHECK(w.radius_band == dw.radius_band);
  CHECK(w.slope_band == dw.slope_band);
  CHECK(w.curvature_scale == dw.curvature_scale);
  CHECK(w.straight_curvature == dw.straight_curvature);
  CHECK(w.samples_per_segment == dw.samples_per_segment);
  const auto &y = c.synthesis, &dy = d.synthesis;
  CHECK(y.retry_limit == dy.retry_limit);
  CHECK(y.ramp_lanes == dy.ramp_lanes);
  CHECK(y.ramp_lane_width == dy.ramp_lane_width);
  CHECK(y.attach_fraction == dy.attach_fraction);
  CHECK(y.radius_slack == dy.radius_slack);
  CHECK(y.grade_fill == dy.grade_fill);
  CHECK(y.min_tail == dy.min_tail);
  CHECK(y.straight_placement_radius == dy.straight_placement_radius);
}

TEST_CASE("domains json round trip") {
  const FeatureDomains d;
  const auto back = parse_domains_json(domains_json(d));
  CHECK(back.lane_counts == d.lane_counts);
  CHECK(back.min_radii == d.min_radii);
  CHECK(back.max_slopes == d.max_slopes);
}

TEST_CASE("classify writes class files") {
  const auto& dir = class_dir();
  CHECK(fs::exists(dir / "classes.tsv"));
  const auto classes = load_class_files({dir});
  REQUIRE(classes.size() == 21);
  CHECK(classes[0].name == "class-01");
  CHECK(classes[0].record.graph == fixtures::j1());
  CHECK(class_name(7) == "class-07");
  CHECK_THROWS_AS(load_class_files({dir / "nope.txt"}), PipelineError);
}

TEST_CASE("sample is a dry run") {
  const auto out = fixtures::scratch("pipeline_sample");
  std::ostringstream log;
  const auto cls = load_class_files({class_dir() / "class-01.txt"});
  const auto s = run_sample(cls, {}, out, log);
  CHECK(s.successes == 0);
  CHECK(fs::exists(out / "arrays" / "class-01.tsv"));
  CHECK(fs::exists(out / "domains.json"));
  CHECK(!fs::exists(out / "xodr"));
}

TEST_CASE("generate and report on a small class") {
  const auto out = fixtures::scratch("pipeline_generate");
  std::ostringstream log;
  PipelineConfig cfg;
  cfg.jobs = 4;
  const auto cls = load_class_files({class_dir() / "class-12.txt"});
  const auto s = run_generate(cls, cfg, out, log);
  CHECK(s.rows >= 40);
  CHECK(s.successes > 0);
  const auto rows = read_manifest(out / "manifest.tsv");
  CHECK(rows.size() == s.rows);
  std::size_t xodr = 0;
  for (const auto& r : rows) {
    if (r.success && *r.success) {
      ++xodr;
      CHECK(fs::exists(out / "xodr" / (r.id + ".xodr")));
      CHECK(fs::exists(out / "svg" / (r.id + ".svg")));
      CHECK_NOTHROW(read_opendrive(out / "xodr" / (r.id + ".xodr")));
    }
  }
  CHECK(xodr == s.successes);

  const auto rep = run_report(out);
  REQUIRE(rep.classes.size() == 1);
  CHECK(rep.classes[0].coverage_pass);
  CHECK(rep.all_pass());

  // A deleted row breaks coverage and the report says which pair.
  auto text = slurp(out / "manifest.tsv");
  text.erase(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n'));
  std::ofstream(out / "manifest.tsv", std::ios::binary) << text;
  const auto broken = run_report(out);
  CHECK(!broken.all_pass());
  CHECK(!broken.classes[0].coverage_detail.empty());

  fs::remove(out / "manifest.tsv");
  CHECK_THROWS_AS(run_report(out), PipelineError);
}

TEST_CASE("export-svg renders xodr files") {
  const auto out = fixtures::scratch("pipeline_svg");
  std::ostringstream log;
  PipelineConfig cfg;
  cfg.limit = 2;
  run_generate(load_class_files({class_dir() / "class-12.txt"}), cfg, out, log);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(out / "xodr")) files.push_back(e.path());
  REQUIRE(!files.empty());
  run_export_svg(files, out / "render", true, 1.0);
  for (const auto& f : files) CHECK(fs::exists(out / "render" / f.filename().replace_extension(".svg")));
}

}  // TEST_SUITE
