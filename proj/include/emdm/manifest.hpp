#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "emdm/errors.hpp"
#include "emdm/gateway.hpp"
#include "emdm/hash.hpp"

namespace emdm {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, "cannot read '" + path.string() + "' for checksum");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64_hex(buf.str());
}

// One manifest per run directory. Downstream commands refuse to run when an
// upstream artifact no longer matches the checksum recorded when it was
// written, so a stale or hand-edited file cannot silently feed a report.
struct Manifest {
  std::string tool_version = kToolVersion;
  std::string template_version;
  std::string created;
  std::string updated;
  nlohmann::json config_snapshot;
  std::map<std::string, std::string> checksums;  // artifact name -> fnv1a64 hex

  void record(const std::filesystem::path& run_dir, const std::string& artifact) {
    checksums[artifact] = file_checksum(run_dir / artifact);
    updated = utc_now_iso8601();
  }

  void verify(const std::filesystem::path& run_dir, const std::string& artifact) const {
    auto it = checksums.find(artifact);
    if (it == checksums.end())
      fail(ErrorCode::MANIFEST_MISMATCH, "'" + artifact + "' is not recorded in the manifest");
    std::string now = file_checksum(run_dir / artifact);
    if (now != it->second)
      fail(ErrorCode::MANIFEST_MISMATCH, "'" + artifact + "' changed since it was recorded (" +
                                             it->second + " -> " + now + ")");
  }
};

inline nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json checksums = nlohmann::json::object();
  for (const auto& [k, v] : m.checksums) checksums[k] = v;
  return {{"tool_version", m.tool_version},
          {"template_version", m.template_version},
          {"created", m.created},
          {"updated", m.updated},
          {"config", m.config_snapshot},
          {"checksums", checksums}};
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::FILE_NOT_FOUND, "cannot write '" + path.string() + "'");
  out << manifest_to_json(m).dump(2) << "\n";
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FILE_NOT_FOUND, "no manifest at '" + path.string() + "'");
  Manifest m;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    m.tool_version = j.at("tool_version").get<std::string>();
    m.template_version = j.at("template_version").get<std::string>();
    m.created = j.at("created").get<std::string>();
    m.updated = j.at("updated").get<std::string>();
    m.config_snapshot = j.at("config");
    for (const auto& [k, v] : j.at("checksums").items()) m.checksums[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MALFORMED_RECORD, std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace emdm
