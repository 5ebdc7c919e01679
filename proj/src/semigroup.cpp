#include "coalesce/semigroup.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "coalesce/error.hpp"

namespace coalesce {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

std::vector<std::size_t> SemigroupClosure::word(std::size_t element) const {
  std::vector<std::size_t> w;
  for (std::size_t e = element; e != npos; e = parent_[e]) w.push_back(last_[e]);
  std::reverse(w.begin(), w.end());
  return w;
}

std::size_t SemigroupClosure::max_word_length() const {
  return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
}

std::size_t SemigroupClosure::min_image_size() const {
  std::size_t best = generators_.state_count();
  for (const auto& f : elements_) best = std::min(best, f.image_size());
  return best;
}

std::size_t SemigroupClosure::find(const MapFunction& f) const {
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), f);
  return (it != elements_.end() && *it == f) ? static_cast<std::size_t>(it - elements_.begin()) : size();
}

SemigroupClosure close(const Support& support, std::size_t max_elements) {
  SemigroupClosure out(support);
  std::vector<MapFunction> elems;
  std::vector<std::size_t> parent, last, depth;
  std::unordered_map<MapFunction, std::size_t, MapFunctionHash> index;
  auto add = [&](MapFunction f, std::size_t from, std::size_t gen, std::size_t d) {
    if (index.contains(f)) return;
    if (elems.size() >= max_elements) {
      throw Error(ErrorKind::ClosureTooLarge, "closure exceeds " + std::to_string(max_elements) + " elements");
    }
    index.emplace(f, elems.size());
    elems.push_back(std::move(f));
    parent.push_back(from);
    last.push_back(gen);
    depth.push_back(d);
  };
  for (std::size_t g = 0; g < support.size(); ++g) add(support[g], npos, g, 1);
  // Extending every element on the left by every generator reaches every
  // product; BFS order makes each stored word a shortest one.
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t g = 0; g < support.size(); ++g) {
      add(compose(support[g], elems[head]), head, g, depth[head] + 1);
    }
  }

  std::vector<std::size_t> order(elems.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return elems[a] < elems[b]; });
  std::vector<std::size_t> rank(elems.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  out.elements_.reserve(elems.size());
  for (std::size_t k : order) {
    out.elements_.push_back(std::move(elems[k]));
    out.parent_.push_back(parent[k] == npos ? npos : rank[parent[k]]);
    out.last_.push_back(last[k]);
    out.depth_.push_back(depth[k]);
  }
  return out;
}

Partition kernel(const MapFunction& f) {
  const std::size_t n = f.size();
  std::vector<std::vector<std::size_t>> by_value(n);
  for (std::size_t i = 0; i < n; ++i) by_value[f(i)].push_back(i);
  std::erase_if(by_value, [](const auto& b) { return b.empty(); });
  return Partition(n, std::move(by_value));
}

std::size_t coalescence_number(const Support& support, std::size_t max_sets) {
  const std::size_t n = support.state_count();
  if (n > 64) return close(support, max_sets).min_image_size();
  using Mask = std::uint64_t;
  const Mask full = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  std::unordered_set<Mask> seen{full};
  std::vector<Mask> frontier{full};
  std::size_t best = n;
  while (!frontier.empty()) {
    std::vector<Mask> next;
    for (Mask x : frontier) {
      for (const auto& g : support.functions()) {
        Mask y = 0;
        for (Mask rest = x; rest; rest &= rest - 1) y |= Mask{1} << g(static_cast<std::size_t>(std::countr_zero(rest)));
        if (!seen.insert(y).second) continue;
        best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(y)));
        if (best == 1) return 1;
        if (seen.size() > max_sets) {
          throw Error(ErrorKind::ClosureTooLarge, "image-set search exceeds " + std::to_string(max_sets) + " sets");
        }
        next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  return best;
}

PairSet coalescing_pairs(const Support& support) {
  const std::size_t n = support.state_count();
  // Node id for {i<j}; node `merged` is the sink reached when images agree.
  std::vector<std::size_t> id(n * n, npos);
  std::vector<StatePair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      id[i * n + j] = pairs.size();
      pairs.emplace_back(i, j);
    }
  const std::size_t merged = pairs.size();
  std::vector<std::vector<std::size_t>> reverse(pairs.size() + 1);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto& g : support.functions()) {
      std::size_t a = g(pairs[p].first), b = g(pairs[p].second);
      if (a > b) std::swap(a, b);
      reverse[a == b ? merged : id[a * n + b]].push_back(p);
    }
  }
  std::vector<bool> reach(pairs.size() + 1, false);
  std::vector<std::size_t> stack{merged};
  reach[merged] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : reverse[v]) {
      if (!reach[u]) {
        reach[u] = true;
        stack.push_back(u);
      }
    }
  }
  PairSet out;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (reach[p]) out.insert(pairs[p]);
  return out;
}

std::string to_string(const PairSet& pairs) {
  std::string out = "{";
  bool first = true;
  for (const auto& [i, j] : pairs) {
    if (!first) out += ',';
    first = false;
    out += '{' + std::to_string(i + 1) + ',' + std::to_string(j + 1) + '}';
  }
  return out + "}";
}

std::vector<Partition> limiting_partitions(const SemigroupClosure& closure) {
  const std::size_t k = closure.min_image_size();
  std::set<Partition> kernels;
  for (const auto& f : closure.elements())
    if (f.image_size() == k) kernels.insert(kernel(f));
  return {kernels.begin(), kernels.end()};
}

std::vector<Partition> limiting_partitions(const Support& support, std::size_t max_elements) {
  return limiting_partitions(close(support, max_elements));
}

}  // namespace coalesce
