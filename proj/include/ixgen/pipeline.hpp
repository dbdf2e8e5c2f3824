#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/isomorphism.hpp"
#include "ixgen/layout.hpp"
#include "ixgen/sampling.hpp"
#include "ixgen/synthesis.hpp"

namespace ixgen {

class PipelineError : public std::runtime_error {
 public:
  enum class Kind { Config, Input, TotalFailure };
  PipelineError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct PipelineConfig {
  FeatureDomains domains;
  LayoutConfig layout;
  SynthesisConfig synthesis;
  std::uint64_t seed = 1;
  int jobs = 1;
  int candidates = 50;
  /// Rows used per class; 0 = the whole covering array. A limit breaks pair coverage.
  std::size_t limit = 0;
};

/// JSON with // and /* */ comments. Missing keys keep their defaults; unknown keys are errors.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string domains_json(const FeatureDomains& domains);
FeatureDomains parse_domains_json(const std::string& text);

/// A class file is a one-record corpus: the representative's graph under the class name.
struct ClassFile {
  std::string name;  // "class-01"
  int class_id = 0;
  InterchangeRecord record;
};

std::string class_name(int class_id);
std::vector<ClassFile> load_class_files(const std::vector<std::filesystem::path>& paths);

/// Writes classes.tsv and one class file per class into `out`.
std::vector<TopologyClass> run_classify(const std::filesystem::path& corpus, const std::filesystem::path& out,
                                        std::ostream& log);

struct ClassSummary {
  int class_id = 0;
  std::string name;
  std::size_t rows = 0;
  std::size_t successes = 0;
  double mean_generations = 0;
};

struct GenerateSummary {
  std::vector<ClassSummary> classes;
  std::size_t rows = 0;
  std::size_t successes = 0;
};

/// Covering arrays, features.tsv and domains.json; no synthesis.
GenerateSummary run_sample(const std::vector<ClassFile>& classes, const PipelineConfig& config,
                           const std::filesystem::path& out, std::ostream& log);

/// Full pipeline into `out`: arrays/, xodr/, svg/, manifest.tsv, domains.json.
GenerateSummary run_generate(const std::vector<ClassFile>& classes, const PipelineConfig& config,
                             const std::filesystem::path& out, std::ostream& log, bool dry_run = false);

struct ClassReport {
  int class_id = 0;
  std::size_t rows = 0;
  std::size_t successes = 0;
  double mean_generations = 0;
  bool coverage_pass = false;
  std::string coverage_detail;
};

struct DatasetReport {
  std::vector<ClassReport> classes;
  std::vector<std::pair<std::string, std::size_t>> radius_histogram;
  std::vector<std::pair<std::string, std::size_t>> slope_histogram;
  std::string text;
  bool all_pass() const;
};

DatasetReport run_report(const std::filesystem::path& dataset);

/// Renders each .xodr as an .svg next to `out` (a directory) or into `out` (a file, single input).
void run_export_svg(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out, bool labels,
                    double scale);

}  // namespace ixgen
