#include "coalesce/coupling_io.hpp"

#include <sstream>

#include "coalesce/error.hpp"

namespace coalesce {

using nlohmann::json;

namespace {

Error malformed(const std::string& why) { return Error(ErrorKind::MalformedInput, "coupling: " + why); }

Rational weight_from_json(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw malformed("weight must be a \"p/q\" string or an integer");
}

std::size_t index_from_json(const json& v, std::size_t limit, const char* what) {
  if (!v.is_number_integer() || v.get<long>() < 1 || static_cast<std::size_t>(v.get<long>()) > limit) {
    throw malformed(std::string(what) + " index out of range 1.." + std::to_string(limit));
  }
  return static_cast<std::size_t>(v.get<long>()) - 1;
}

GrandCoupling explicit_from_json(const json& doc, std::size_t n) {
  std::vector<WeightedFunction> terms;
  for (const auto& entry : doc.at("functions")) {
    terms.push_back({MapFunction::parse(entry.at("map").get<std::string>(), n), weight_from_json(entry.at("weight"))});
  }
  return ExplicitCoupling(std::move(terms));
}

GrandCoupling block_from_json(const json& doc, std::size_t n) {
  const json& jblocks = doc.at("partition");
  std::vector<std::vector<std::size_t>> given;
  for (const auto& jb : jblocks) {
    std::vector<std::size_t> block;
    for (const auto& s : jb) block.push_back(index_from_json(s, n, "state"));
    given.push_back(std::move(block));
  }
  Partition partition(n, given);
  const std::size_t l = given.size();
  // The file may list blocks in any order; map to canonical block indices.
  std::vector<std::size_t> canon(l);
  for (std::size_t g = 0; g < l; ++g) canon[g] = partition.block_of(given[g].front());

  const json& jperms = doc.at("block_perms");
  std::optional<BlockPermutationLaw> law;
  if (jperms.is_string()) {
    if (jperms.get<std::string>() != "uniform") throw malformed("block_perms string must be \"uniform\"");
    law = BlockPermutationLaw::uniform(l);
  } else {
    std::vector<WeightedPermutation> terms;
    for (const auto& entry : jperms) {
      const json& jp = entry.at("perm");
      if (jp.size() != l) throw malformed("block permutation length");
      std::vector<std::size_t> perm(l);
      for (std::size_t g = 0; g < l; ++g) perm[canon[g]] = canon[index_from_json(jp[g], l, "block")];
      terms.push_back({std::move(perm), weight_from_json(entry.at("weight"))});
    }
    law = BlockPermutationLaw(std::move(terms));
  }

  const json& jwithin = doc.at("within");
  if (jwithin.size() != n) throw malformed("within needs " + std::to_string(n) + " rows");
  std::vector<std::vector<Rational>> within;
  for (const auto& jrow : jwithin) {
    std::vector<Rational> row;
    for (const auto& v : jrow) row.push_back(weight_from_json(v));
    within.push_back(std::move(row));
  }
  return BlockCoupling(std::move(partition), std::move(*law), std::move(within));
}

}  // namespace

GrandCoupling coupling_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw malformed("expected a JSON object");
    const long raw_n = doc.at("n").get<long>();
    if (raw_n < 1 || raw_n > 65535) throw malformed("n out of range");
    const auto n = static_cast<std::size_t>(raw_n);
    if (doc.contains("functions")) return explicit_from_json(doc, n);
    if (doc.contains("partition")) return block_from_json(doc, n);
    throw malformed("needs \"functions\" or \"partition\"");
  } catch (const json::exception& e) {
    throw malformed(e.what());
  }
}

GrandCoupling parse_coupling(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw malformed(e.what());
  }
  return coupling_from_json(doc);
}

json to_json(const GrandCoupling& mu) {
  json doc;
  doc["n"] = mu.state_count();
  if (mu.is_explicit()) {
    json fs = json::array();
    for (const auto& t : mu.explicit_form().terms()) {
      fs.push_back({{"map", t.function.to_string()}, {"weight", t.weight.get_str()}});
    }
    doc["functions"] = std::move(fs);
    return doc;
  }
  const BlockCoupling& b = mu.block_form();
  json blocks = json::array();
  for (const auto& block : b.partition().blocks()) {
    json jb = json::array();
    for (std::size_t s : block) jb.push_back(s + 1);
    blocks.push_back(std::move(jb));
  }
  doc["partition"] = std::move(blocks);
  if (b.law().is_uniform()) {
    doc["block_perms"] = "uniform";
  } else {
    json perms = json::array();
    for (const auto& t : b.law().terms()) {
      json jp = json::array();
      for (std::size_t v : t.permutation) jp.push_back(v + 1);
      perms.push_back({{"perm", std::move(jp)}, {"weight", t.weight.get_str()}});
    }
    doc["block_perms"] = std::move(perms);
  }
  json within = json::array();
  for (const auto& row : b.within()) {
    json jr = json::array();
    for (const auto& v : row) jr.push_back(v.get_str());
    within.push_back(std::move(jr));
  }
  doc["within"] = std::move(within);
  return doc;
}

// One top-level key per line and one array element per line, each compact.
std::string serialize_coupling(const GrandCoupling& mu) {
  const nlohmann::json doc = to_json(mu);
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : doc.items()) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += nlohmann::json(key).dump() + ": ";
    if (value.is_array() && !value.empty() && value.front().is_structured()) {
      out += "[";
      for (std::size_t k = 0; k < value.size(); ++k) out += (k ? ",\n    " : "\n    ") + value[k].dump();
      out += "\n  ]";
    } else {
      out += value.dump();
    }
  }
  return out + "\n}\n";
}

Support parse_function_list(std::string_view text, std::size_t n) {
  std::string normalized(text);
  for (char& c : normalized)
    if (c == ';') c = ' ';
  std::istringstream tokens(normalized);
  std::vector<MapFunction> fs;
  std::string token;
  while (tokens >> token) fs.push_back(MapFunction::parse(token, n));
  return Support(std::move(fs));
}

std::string to_string(const Support& support) {
  std::string out = "{";
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (k) out += ' ';
    out += support[k].to_string();
  }
  return out + "}";
}

}  // namespace coalesce
