#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/topology.hpp"

namespace ixgen {

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { Io, Syntax, Schema, Validation };

  CorpusError(Kind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const { return line_; }
  /// Set for Validation errors: the topology rule that failed.
  std::optional<TopologyError::Kind> topology_kind;

 private:
  Kind kind_;
  std::size_t line_;
};

std::vector<InterchangeRecord> parse_corpus_text(const std::string& text);
std::vector<InterchangeRecord> parse_corpus(const std::filesystem::path& path);

std::string serialize_corpus(const std::vector<InterchangeRecord>& records);
void write_corpus(const std::filesystem::path& path, const std::vector<InterchangeRecord>& records);

}  // namespace ixgen
