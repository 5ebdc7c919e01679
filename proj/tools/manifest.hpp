#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Everything needed to rerun a command bit for bit; printed to stderr as one
// JSON line when the command finishes.
struct RunManifest {
  struct Input {
    std::string path;
    std::string fnv1a;
  };

  std::string command;
  std::vector<Input> inputs;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::uint64_t> caps;
  std::string version;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  /// Reads a whole file and records its digest. Throws coalesce::Error.
  std::string read_input(const std::string& path);
  std::string to_json_line() const;
};

std::string fnv1a_hex(const std::string& bytes);
