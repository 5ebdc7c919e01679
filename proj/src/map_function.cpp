#include "coalesce/map_function.hpp"

#include <algorithm>
#include <charconv>

#include "coalesce/error.hpp"

namespace coalesce {

MapFunction::MapFunction(std::vector<State> image) : image_(std::move(image)) {
  for (State s : image_) {
    if (s >= image_.size()) {
      throw Error(ErrorKind::MalformedInput,
                  "image value " + std::to_string(s + 1) + " outside 1.." + std::to_string(image_.size()));
    }
  }
}

MapFunction MapFunction::identity(std::size_t n) {
  std::vector<State> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = static_cast<State>(i);
  return MapFunction(std::move(image));
}

MapFunction MapFunction::constant(std::size_t n, State value) {
  return MapFunction(std::vector<State>(n, value));
}

MapFunction MapFunction::parse(std::string_view text, std::size_t n) {
  std::vector<State> image;
  auto bad = [&](const std::string& why) {
    return Error(ErrorKind::MalformedInput, "function '" + std::string(text) + "': " + why);
  };
  if (text.find(',') == std::string_view::npos) {
    for (char c : text) {
      if (c < '1' || c > '9') throw bad("packed notation takes digits 1-9");
      image.push_back(static_cast<State>(c - '1'));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find(',', pos), text.size());
      std::string_view token = text.substr(pos, end - pos);
      while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
      while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
      unsigned value = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size() || value == 0 || value > 65535) {
        throw bad("bad entry '" + std::string(token) + "'");
      }
      image.push_back(static_cast<State>(value - 1));
      pos = end + 1;
    }
  }
  if (image.empty()) throw bad("empty");
  if (n != 0 && image.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "function '" + std::string(text) + "' has " +
                                                  std::to_string(image.size()) + " entries, expected " +
                                                  std::to_string(n));
  }
  return MapFunction(std::move(image));
}

std::size_t MapFunction::image_size() const {
  std::vector<bool> hit(image_.size(), false);
  std::size_t count = 0;
  for (State s : image_) {
    if (!hit[s]) {
      hit[s] = true;
      ++count;
    }
  }
  return count;
}

std::string MapFunction::to_string() const {
  std::string out;
  if (image_.size() <= 9) {
    for (State s : image_) out.push_back(static_cast<char>('1' + s));
    return out;
  }
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(image_[i] + 1);
  }
  return out;
}

MapFunction compose(const MapFunction& outer, const MapFunction& inner) {
  if (outer.size() != inner.size()) {
    throw Error(ErrorKind::DimensionMismatch, "composing functions of sizes " +
                                                  std::to_string(outer.size()) + " and " +
                                                  std::to_string(inner.size()));
  }
  std::vector<State> image(inner.size());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = outer(inner(i));
  return MapFunction(std::move(image));
}

std::size_t MapFunctionHash::operator()(const MapFunction& f) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (State s : f.image()) {
    h ^= s;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace coalesce
