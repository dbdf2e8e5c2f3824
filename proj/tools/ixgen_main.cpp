// ixgen command line: classify, sample, generate, report, export-svg.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ixgen/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInput = 3, kTotalFailure = 4 };

int exit_code(const ixgen::PipelineError& e) {
  switch (e.kind()) {
    case ixgen::PipelineError::Kind::Config:
    case ixgen::PipelineError::Kind::Input: return kInput;
    case ixgen::PipelineError::Kind::TotalFailure: return kTotalFailure;
  }
  return kInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate highway interchange datasets from topology corpora"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  std::string out;
  bool dry_run = false;
  std::size_t limit = 0;

  auto configured = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (comments allowed)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Base seed; overrides the config")->each([&](const std::string&) { seed_set = true; });
  };

  std::string corpus;
  auto* classify = app.add_subcommand("classify", "Partition a corpus into topology classes");
  classify->add_option("corpus", corpus, "Corpus file")->required();
  classify->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> class_files;
  auto* sample = app.add_subcommand("sample", "Covering arrays and features for class files");
  sample->add_option("classes", class_files, "Class files or directories")->required();
  configured(sample);
  sample->add_option("--out", out, "Output directory")->required();

  auto* generate = app.add_subcommand("generate", "Synthesize and export interchanges for class files");
  generate->add_option("classes", class_files, "Class files or directories")->required();
  configured(generate);
  generate->add_option("--jobs", jobs, "Worker threads; overrides the config")->check(CLI::PositiveNumber);
  generate->add_option("--limit", limit, "Rows per class (0 = whole array; breaks pair coverage)");
  generate->add_flag("--dry-run", dry_run, "Write arrays and features, skip synthesis");
  generate->add_option("--out", out, "Output directory")->required();

  std::string dataset;
  auto* report = app.add_subcommand("report", "Summarize a generated dataset");
  report->add_option("dataset", dataset, "Dataset directory")->required();
  report->add_option("--out", out, "Also write the report to this file");

  std::vector<std::string> xodr_files;
  bool labels = false;
  double scale = 0.5;
  auto* svg = app.add_subcommand("export-svg", "Render .xodr files as SVG plan views");
  svg->add_option("files", xodr_files, ".xodr files")->required()->check(CLI::ExistingFile);
  svg->add_option("--out", out, "Output directory, or .svg path for a single input")->required();
  svg->add_flag("--labels", labels, "Draw road and ramp names");
  svg->add_option("--scale", scale, "Pixels per meter")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    ixgen::PipelineConfig config;
    if (!config_path.empty()) config = ixgen::load_config(config_path);
    if (seed_set) config.seed = seed;
    if (jobs > 0) config.jobs = jobs;
    if (limit > 0) config.limit = limit;

    if (*classify) {
      ixgen::run_classify(corpus, out, std::cout);
    } else if (*sample) {
      std::vector<fs::path> paths(class_files.begin(), class_files.end());
      ixgen::run_sample(ixgen::load_class_files(paths), config, out, std::cout);
    } else if (*generate) {
      std::vector<fs::path> paths(class_files.begin(), class_files.end());
      ixgen::run_generate(ixgen::load_class_files(paths), config, out, std::cout, dry_run);
    } else if (*report) {
      const auto r = ixgen::run_report(dataset);
      std::cout << r.text;
      if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
          std::cerr << "error: cannot write '" << out << "'\n";
          return kInput;
        }
        f << r.text;
      }
    } else if (*svg) {
      std::vector<fs::path> paths(xodr_files.begin(), xodr_files.end());
      ixgen::run_export_svg(paths, out, labels, scale);
    }
  } catch (const ixgen::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
