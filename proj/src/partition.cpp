#include "coalesce/partition.hpp"

#include <algorithm>
#include <charconv>

#include "coalesce/error.hpp"

namespace coalesce {

Partition::Partition(std::size_t n, std::vector<std::vector<std::size_t>> blocks)
    : blocks_(std::move(blocks)), block_of_(n, n) {
  for (auto& b : blocks_) {
    if (b.empty()) throw Error(ErrorKind::MalformedInput, "partition has an empty block");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks_.begin(), blocks_.end());
  for (std::size_t r = 0; r < blocks_.size(); ++r) {
    for (std::size_t s : blocks_[r]) {
      if (s >= n) throw Error(ErrorKind::MalformedInput, "state " + std::to_string(s + 1) + " out of range");
      if (block_of_[s] != n) {
        throw Error(ErrorKind::MalformedInput, "state " + std::to_string(s + 1) + " in two blocks");
      }
      block_of_[s] = r;
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (block_of_[s] == n) {
      throw Error(ErrorKind::MalformedInput, "state " + std::to_string(s + 1) + " not covered");
    }
  }
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t i = 0; i < n; ++i) blocks[i] = {i};
  return Partition(n, std::move(blocks));
}

Partition Partition::whole(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return Partition(n, {all});
}

Partition Partition::consecutive(std::size_t n, std::size_t l) {
  if (l == 0 || n % l != 0) {
    throw Error(ErrorKind::NotADivisor, std::to_string(l) + " does not divide " + std::to_string(n));
  }
  const std::size_t size = n / l;
  std::vector<std::vector<std::size_t>> blocks(l);
  for (std::size_t i = 0; i < n; ++i) blocks[i / size].push_back(i);
  return Partition(n, std::move(blocks));
}

Partition Partition::parse(std::string_view text, std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks(1);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '|') {
      blocks.emplace_back();
      ++pos;
    } else if (c == ',' || c == ' ') {
      ++pos;
    } else {
      std::size_t value = 0;
      const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
      if (ec != std::errc() || value == 0) {
        throw Error(ErrorKind::MalformedInput, "bad partition '" + std::string(text) + "'");
      }
      blocks.back().push_back(value - 1);
      pos = static_cast<std::size_t>(ptr - text.data());
    }
  }
  return Partition(n, std::move(blocks));
}

std::string Partition::to_string() const {
  std::string out;
  for (std::size_t r = 0; r < blocks_.size(); ++r) {
    if (r) out += ',';
    out += '{';
    for (std::size_t k = 0; k < blocks_[r].size(); ++k) {
      if (k) out += ',';
      out += std::to_string(blocks_[r][k] + 1);
    }
    out += '}';
  }
  return out;
}

std::vector<Partition> all_partitions(std::size_t n) {
  std::vector<Partition> out;
  if (n == 0) return out;
  // Restricted growth string: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<std::size_t> a(n, 0);
  while (true) {
    std::size_t blocks = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<std::vector<std::size_t>> parts(blocks);
    for (std::size_t i = 0; i < n; ++i) parts[a[i]].push_back(i);
    out.emplace_back(n, std::move(parts));

    std::size_t i = n - 1;
    while (i > 0) {
      const std::size_t prefix_max = *std::max_element(a.begin(), a.begin() + static_cast<long>(i));
      if (a[i] <= prefix_max) {
        ++a[i];
        std::fill(a.begin() + static_cast<long>(i) + 1, a.end(), 0);
        break;
      }
      --i;
    }
    if (i == 0) break;
  }
  return out;
}

}  // namespace coalesce
