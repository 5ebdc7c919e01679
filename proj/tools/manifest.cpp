#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coalesce/error.hpp"

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coalesce::Error(coalesce::ErrorKind::MalformedInput, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  std::string text = os.str();
  inputs.push_back({path, fnv1a_hex(text)});
  return text;
}

std::string RunManifest::to_json_line() const {
  nlohmann::json doc;
  doc["command"] = command;
  doc["inputs"] = nlohmann::json::array();
  for (const auto& in : inputs) doc["inputs"].push_back({{"path", in.path}, {"fnv1a", in.fnv1a}});
  doc["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  doc["caps"] = caps;
  doc["version"] = version;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  doc["wall_clock_s"] = elapsed.count();
  return doc.dump();
}
