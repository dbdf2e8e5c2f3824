#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ixgen {

/*
  Dataset manifest: tab-separated, one header line, one line per interchange.

    id  class  sample  success  lanes  targets  achieved  generations  note

  lanes     R1=4,R2=3
  targets   r1=60/2,r2=inf/3          (min radius m / max slope %)
  achieved  r1=60.123456/2.012345,... ("-" for a ramp that did not fit)
  note      failure reasons, "-" when empty
*/
struct RampOutcome {
  std::string name;
  double min_radius = 0;
  double max_slope = 0;
  bool fitted = true;
};

struct ManifestRow {
  std::string id;
  int class_id = 0;
  std::size_t sample = 0;
  std::optional<bool> success;  // unset for dry runs
  std::vector<std::pair<std::string, int>> lanes;
  std::vector<RampOutcome> targets;
  std::vector<RampOutcome> achieved;
  long generations = 0;
  std::string note;
};

class ManifestError : public std::runtime_error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : std::runtime_error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string manifest_header();
std::string format_manifest_row(const ManifestRow& row);
/// Rows ordered by (class, sample, id).
std::string serialize_manifest(std::vector<ManifestRow> rows);
std::vector<ManifestRow> parse_manifest(const std::string& text);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

}  // namespace ixgen
