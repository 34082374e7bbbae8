#include "collgram/run_manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "collgram/digest.hpp"
#include "collgram/error.hpp"

namespace collgram {

namespace {
std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace

RunManifest make_run_manifest(std::string command, std::vector<std::pair<std::string, std::string>> flags,
                              const std::vector<std::filesystem::path>& inputs) {
  RunManifest m;
  m.command = std::move(command);
  m.flags = std::move(flags);
  for (const auto& p : inputs) m.input_digests.emplace_back(p.string(), sha256_path_hex(p));
  m.timestamp = utc_now();
  return m;
}

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["flags"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.flags) j["flags"][k] = v;
  j["input_digests"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.input_digests) j["input_digests"][k] = v;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  return j.dump(2);
}

void write_run_manifest(const std::filesystem::path& file, const RunManifest& manifest) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << to_json(manifest) << '\n';
}

}  // namespace collgram
