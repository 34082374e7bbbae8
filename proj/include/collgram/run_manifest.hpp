#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace collgram {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record written next to every output. The timestamp lives
// here and nowhere else, so the outputs themselves stay byte-reproducible.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path -> sha256
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC, ISO 8601
};

RunManifest make_run_manifest(std::string command, std::vector<std::pair<std::string, std::string>> flags,
                              const std::vector<std::filesystem::path>& inputs);

std::string to_json(const RunManifest& manifest);
void write_run_manifest(const std::filesystem::path& file, const RunManifest& manifest);

}  // namespace collgram
