#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "coalesce/block_structure.hpp"
#include "coalesce/cftp.hpp"
#include "coalesce/coupling_io.hpp"
#include "coalesce/diagram.hpp"
#include "coalesce/error.hpp"
#include "coalesce/feasibility.hpp"
#include "coalesce/kset.hpp"
#include "coalesce/reproduce.hpp"
#include "coalesce/semigroup.hpp"
#include "manifest.hpp"

#ifndef COALESCE_VERSION
#define COALESCE_VERSION "dev"
#endif

using namespace coalesce;
using nlohmann::json;

namespace {

enum class Format { Text, Json, Tsv, Dot };

struct Globals {
  Format format = Format::Text;
  std::optional<std::uint64_t> seed;
  std::uint64_t exact_cap = kDefaultExactCap;
  std::size_t max_closure = kDefaultClosureCap;
  std::uint64_t t_max = kDefaultTMax;
};

// Thrown by commands whose check ran fine but came out negative.
struct CheckFailed {};

json matrix_json(const StochasticMatrix& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    json row = json::array();
    for (const auto& x : p.row(i)) row.push_back(to_string(x));
    rows.push_back(row);
  }
  return rows;
}

json pairs_json(const PairSet& pairs) {
  json out = json::array();
  for (const auto& [a, b] : pairs) out.push_back({a + 1, b + 1});
  return out;
}

std::string indent(const std::string& text, const std::string& prefix = "  ") {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += prefix + line + "\n";
  return out;
}

std::uint64_t resolve_seed(Globals& g, RunManifest& manifest) {
  if (!g.seed) {
    std::random_device rd;
    g.seed = (std::uint64_t{rd()} << 32) | rd();
    std::cerr << "seed: " << *g.seed << "\n";
  }
  manifest.seed = g.seed;
  return *g.seed;
}

Support read_support(const std::string& arg, std::size_t n, RunManifest& manifest) {
  if (std::filesystem::is_regular_file(arg)) {
    const std::string text = manifest.read_input(arg);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return expand_support(parse_coupling(text));
    return parse_function_list(text, n);
  }
  return parse_function_list(arg, n);
}

void analyze(const StochasticMatrix& p, const Globals& g) {
  const bool irreducible = is_irreducible(p);
  const auto per = irreducible ? std::optional(period(p)) : std::nullopt;
  const bool ds = is_doubly_stochastic(p);
  const std::size_t allowed = support_size(doeblin_coupling(p, DoeblinMode::Lazy));
  const std::optional<ProbabilityVector> pi = irreducible ? std::optional(invariant_distribution(p)) : std::nullopt;
  if (g.format == Format::Json) {
    json doc = {{"n", p.size()}, {"irreducible", irreducible}, {"doubly_stochastic", ds},
                {"allowed_functions", allowed}};
    doc["period"] = per ? json(*per) : json(nullptr);
    if (pi) {
      json entries = json::array();
      for (const auto& x : pi->entries()) entries.push_back(to_string(x));
      doc["invariant_distribution"] = entries;
    }
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << "states: " << p.size() << "\n"
            << "irreducible: " << (irreducible ? "yes" : "no") << "\n";
  if (per) std::cout << "period: " << *per << (per == 1u ? " (aperiodic)" : "") << "\n";
  std::cout << "doubly stochastic: " << (ds ? "yes" : "no") << "\n"
            << "allowed functions: " << allowed << "\n";
  if (pi) {
    std::cout << "invariant distribution:";
    for (const auto& x : pi->entries()) std::cout << " " << to_string(x);
    std::cout << "\n";
  }
}

void coupling_check(const GrandCoupling& mu, const StochasticMatrix& p, const Globals& g) {
  const StochasticMatrix q = induced_matrix(mu);
  const bool ok = q == p;
  if (g.format == Format::Json) {
    std::cout << json{{"consistent", ok}, {"induced", matrix_json(q)}}.dump(2) << "\n";
  } else {
    std::cout << "consistent: " << (ok ? "yes" : "no") << "\n";
    if (!ok) std::cout << "induced matrix:\n" << indent(q.to_string());
  }
  if (!ok) throw CheckFailed{};
}

void k_number(const GrandCoupling& mu, const Globals& g) {
  const Support s = expand_support(mu);
  const SemigroupClosure closure = close(s, g.max_closure);
  const std::size_t k = closure.min_image_size();
  const PairSet pairs = coalescing_pairs(s);
  const auto parts = limiting_partitions(closure);
  if (g.format == Format::Json) {
    json p = json::array();
    for (const auto& part : parts) p.push_back(part.to_string());
    std::cout << json{{"k", k},
                      {"coalescing_pairs", pairs_json(pairs)},
                      {"limiting_partitions", p},
                      {"closure_size", closure.size()},
                      {"max_word_length", closure.max_word_length()}}
                     .dump(2)
              << "\n";
    return;
  }
  std::cout << "k: " << k << "\n"
            << "coalescing pairs: " << to_string(pairs) << "\n"
            << "limiting partitions:\n";
  for (const auto& part : parts) std::cout << "  " << part.to_string() << "\n";
  std::cout << "closure size: " << closure.size() << "\n"
            << "longest shortest word: " << closure.max_word_length() << "\n";
}

void feasible(const StochasticMatrix& p, const Support& s, const Globals& g) {
  const auto w = feasible_weights(p, s);
  if (g.format == Format::Json) {
    std::cout << json{{"feasible", w.has_value()}, {"witness", w ? to_json(*w) : json(nullptr)}}.dump(2) << "\n";
  } else if (w) {
    std::cout << serialize_coupling(*w) << "\n";
  } else {
    std::cout << "infeasible\n";
  }
}

void print_birkhoff(const BirkhoffDecomposition& d, json* out) {
  if (out) {
    json terms = json::array();
    for (const auto& t : d.terms) terms.push_back({{"perm", t.permutation.to_string()}, {"weight", to_string(t.weight)}});
    (*out)["birkhoff"] = terms;
    return;
  }
  for (const auto& t : d.terms) std::cout << "  " << t.permutation.to_string() << "  " << to_string(t.weight) << "\n";
}

void blocks(const StochasticMatrix& p, const Partition& part, const Globals& g) {
  const auto lump = check_lumpability(p, part);
  const bool as_json = g.format == Format::Json;
  json doc = {{"partition", part.to_string()}};
  if (const auto* v = std::get_if<LumpabilityViolation>(&lump)) {
    if (as_json) {
      doc["lumpable"] = false;
      doc["violation"] = {{"from_block", v->from_block + 1}, {"to_block", v->to_block + 1},
                          {"state", v->state + 1}, {"other_state", v->other_state + 1}};
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << "lumpable: no (states " << v->state + 1 << " and " << v->other_state + 1 << " of block "
                << v->from_block + 1 << " put different mass on block " << v->to_block + 1 << ")\n";
    }
    throw CheckFailed{};
  }
  const BlockMatrix& lambda = std::get<BlockMatrix>(lump);
  const bool ds = is_doubly_stochastic(lambda);
  if (as_json) {
    doc["lumpable"] = true;
    doc["block_matrix"] = matrix_json(lambda);
    doc["doubly_stochastic"] = ds;
  } else {
    std::cout << "lumpable: yes\nblock matrix:\n"
              << indent(lambda.to_string()) << "doubly stochastic: " << (ds ? "yes" : "no") << "\n";
  }
  if (!ds) {
    if (as_json) std::cout << doc.dump(2) << "\n";
    throw CheckFailed{};
  }
  const GrandCoupling mu = construct_block_measure(p, part);
  // The construction permutes blocks, but it is a block measure only if the
  // states inside each block also end up merged: k must equal the block count.
  std::optional<std::size_t> k;
  if (support_size(mu) <= kDefaultSupportCap) k = coalescence_number(expand_support(mu), g.max_closure);
  const bool verified = k == part.block_count();
  if (as_json) {
    print_birkhoff(birkhoff_decomposition(lambda), &doc);
    doc["block_measure"] = to_json(mu);
    doc["k"] = k ? json(*k) : json(nullptr);
    doc["is_block_measure"] = k ? json(verified) : json(nullptr);
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "block permutations:\n";
    print_birkhoff(birkhoff_decomposition(lambda), nullptr);
    std::cout << "constructed measure:\n" << serialize_coupling(mu);
    std::cout << "k: " << (k ? std::to_string(*k) : std::string("unknown (support too large)")) << "\n"
              << "block measure: " << (!k ? "unverified" : verified ? "yes" : "no") << "\n";
  }
  if (k && !verified) throw CheckFailed{};
}

void birkhoff(const StochasticMatrix& p, const Globals& g) {
  const auto d = birkhoff_decomposition(p);
  if (g.format == Format::Json) {
    json doc;
    print_birkhoff(d, &doc);
    std::cout << doc["birkhoff"].dump(2) << "\n";
  } else {
    std::cout << d.terms.size() << " terms\n";
    print_birkhoff(d, nullptr);
  }
}

void sample(const StochasticMatrix& p, const std::optional<GrandCoupling>& coupling, std::uint64_t n_samples,
            std::uint64_t seed, const Globals& g) {
  const GrandCoupling mu = coupling ? *coupling : doeblin_coupling(p, DoeblinMode::Lazy);
  if (coupling && !is_consistent(mu, p)) throw Error(ErrorKind::MalformedInput, "coupling is not consistent with the matrix");
  SamplerOptions opts;
  opts.t_max = g.t_max;
  opts.closure_cap = g.max_closure;
  const PerfectSampler sampler(mu, opts);
  if (!sampler.can_coalesce()) std::cerr << "warning: " << sampler.guard_reason() << "\n";
  const auto h = cftp_histogram(sampler, RngStream(seed), n_samples);
  const std::optional<ProbabilityVector> pi =
      is_irreducible(p) ? std::optional(invariant_distribution(p)) : std::nullopt;
  const double tv = pi ? total_variation(h, *pi) : 0.0;
  const std::uint64_t coalesced = h.samples - h.did_not_coalesce;
  if (g.format == Format::Json) {
    json doc = {{"samples", h.samples}, {"did_not_coalesce", h.did_not_coalesce}, {"counts", h.counts}};
    doc["tv"] = pi ? json(tv) : json(nullptr);
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << "state\tcount\tempirical\tpi\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double emp = coalesced ? double(h.counts[i]) / double(coalesced) : 0.0;
    std::cout << i + 1 << "\t" << h.counts[i] << "\t" << emp << "\t" << (pi ? to_double((*pi)[i]) : 0.0) << "\n";
  }
  std::cout << "# samples=" << h.samples << " did_not_coalesce=" << h.did_not_coalesce;
  if (pi) std::cout << " tv=" << tv;
  std::cout << "\n";
}

void verify_equidist(const GrandCoupling& mu, std::uint64_t runs, std::uint64_t t_max, std::uint64_t seed,
                     double threshold, const Globals& g) {
  const auto rep = equidistribution_check(mu, runs, t_max, RngStream(seed), threshold);
  if (g.format == Format::Json) {
    std::cout << json{{"runs", rep.runs},
                      {"t_max", rep.t_max},
                      {"backward_censored", rep.backward_censored},
                      {"forward_censored", rep.forward_censored},
                      {"max_cdf_gap", rep.max_cdf_gap},
                      {"threshold", rep.threshold},
                      {"pass", rep.pass}}
                     .dump(2)
              << "\n";
  } else {
    std::uint64_t t_last = 0;
    if (!rep.backward_times.empty()) t_last = rep.backward_times.rbegin()->first;
    if (!rep.forward_times.empty()) t_last = std::max(t_last, rep.forward_times.rbegin()->first);
    std::cout << "t\tC_count\tT_count\n";
    for (std::uint64_t t = 1; t <= t_last; ++t) {
      const auto c = rep.backward_times.find(t);
      const auto f = rep.forward_times.find(t);
      const std::uint64_t cc = c == rep.backward_times.end() ? 0 : c->second;
      const std::uint64_t fc = f == rep.forward_times.end() ? 0 : f->second;
      if (cc || fc) std::cout << t << "\t" << cc << "\t" << fc << "\n";
    }
    std::cout << "# runs=" << rep.runs << " censored_C=" << rep.backward_censored
              << " censored_T=" << rep.forward_censored << " max_cdf_gap=" << rep.max_cdf_gap
              << " threshold=" << rep.threshold << " " << (rep.pass ? "pass" : "fail") << "\n";
  }
  if (!rep.pass) throw CheckFailed{};
}

void kset(const StochasticMatrix& p, const Globals& g) {
  const KSetReport r = k_set(p, g.exact_cap);
  if (g.format == Format::Json) {
    json members = json::array();
    for (const auto& [k, w] : r.members)
      members.push_back({{"k", k}, {"source", w.source}, {"verified", w.verified}, {"coupling", to_json(w.coupling)}});
    json exclusions = json::array();
    for (const auto& [k, why] : r.exclusions) exclusions.push_back({{"k", k}, {"reason", to_string(why)}});
    std::cout << json{{"n", r.n},
                      {"exact", r.exact},
                      {"members", members},
                      {"exclusions", exclusions},
                      {"supports_enumerated", r.supports_enumerated},
                      {"feasible_supports", r.feasible_supports}}
                     .dump(2)
              << "\n";
    return;
  }
  std::cout << "exact: " << (r.exact ? "yes" : "no") << "\nmembers:";
  for (auto k : r.member_values()) std::cout << " " << k;
  std::cout << "\nexclusions:";
  for (const auto& [k, why] : r.exclusions) std::cout << " " << k << " (" << to_string(why) << ")";
  std::cout << "\n";
  if (r.exact)
    std::cout << "supports enumerated: " << r.supports_enumerated << ", passing filter: " << r.supports_passing_filter
              << ", feasible: " << r.feasible_supports << "\n";
  for (const auto& [k, w] : r.members) {
    std::cout << "witness k=" << k << " (" << w.source << (w.verified ? ", verified" : "") << "):\n"
              << serialize_coupling(w.coupling) << "\n";
  }
}

void reproduce(const ReproductionOptions& opts, const Globals& g) {
  const auto rows = run_reproductions(opts);
  bool all = true;
  if (g.format == Format::Json) {
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"id", r.id}, {"description", r.description}, {"expected", r.expected},
                     {"computed", r.computed}, {"pass", r.pass}});
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "id\tresult\texpected\tcomputed\n";
    for (const auto& r : rows)
      std::cout << r.id << "\t" << (r.pass ? "pass" : "fail") << "\t" << r.expected << "\t" << r.computed << "\n";
  }
  for (const auto& r : rows) all = all && r.pass;
  if (!all) throw CheckFailed{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis of grand couplings of finite Markov chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", COALESCE_VERSION);

  Globals g;
  std::string format = "text";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json", "tsv", "dot"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed (generated and printed when absent)");
  app.add_option("--exact-cap", g.exact_cap, "Subset budget for exhaustive K(P)")->capture_default_str();
  app.add_option("--max-closure", g.max_closure, "Semigroup closure cap")->capture_default_str();
  app.add_option("--t-max", g.t_max, "Coalescence horizon cap")->capture_default_str();
  app.fallthrough();

  std::string matrix_path, coupling_path, support_arg, partition_arg, only, cycle3_path;
  std::uint64_t n_samples = 10'000, runs = 10'000;
  double threshold = 0.02;

  auto* c_analyze = app.add_subcommand("analyze", "Irreducibility, period, invariant distribution");
  c_analyze->add_option("matrix", matrix_path)->required();

  auto* c_check = app.add_subcommand("coupling-check", "Does a coupling reproduce a matrix");
  c_check->add_option("coupling", coupling_path)->required();
  c_check->add_option("matrix", matrix_path)->required();

  auto* c_k = app.add_subcommand("k-number", "Coalescence number, coalescing pairs, limiting partitions");
  c_k->add_option("coupling", coupling_path)->required();

  auto* c_feasible = app.add_subcommand("feasible", "Strictly positive consistent weights on a support");
  c_feasible->add_option("matrix", matrix_path)->required();
  c_feasible->add_option("--support", support_arg, "Coupling file, function-list file or \"1234;2244\"")->required();

  auto* c_blocks = app.add_subcommand("blocks", "Block conditions and block measure for a partition");
  c_blocks->add_option("matrix", matrix_path)->required();
  c_blocks->add_option("--partition", partition_arg, "e.g. \"1,2|3,4\"")->required();

  auto* c_birkhoff = app.add_subcommand("birkhoff", "Birkhoff decomposition of a doubly stochastic matrix");
  c_birkhoff->add_option("matrix", matrix_path)->required();

  auto* c_sample = app.add_subcommand("sample", "Coupling from the past");
  c_sample->add_option("matrix", matrix_path)->required();
  c_sample->add_option("--coupling", coupling_path, "Coupling file (default: independent coupling)");
  c_sample->add_option("--n-samples", n_samples)->capture_default_str();

  auto* c_equi = app.add_subcommand("verify-equidist", "Compare backward and forward coalescence times");
  c_equi->add_option("coupling", coupling_path)->required();
  c_equi->add_option("--runs", runs)->capture_default_str();
  c_equi->add_option("--threshold", threshold, "Largest accepted CDF gap")->capture_default_str();

  auto* c_kset = app.add_subcommand("kset", "The set of achievable coalescence numbers");
  c_kset->add_option("matrix", matrix_path)->required();

  std::uint64_t trials = 1000;
  auto* c_search = app.add_subcommand("search-non-block",
                                      "Random search for a consistent coupling that is not a block measure");
  c_search->add_option("matrix", matrix_path)->required();
  c_search->add_option("--trials", trials)->capture_default_str();

  auto* c_repro = app.add_subcommand("reproduce", "Run the built-in worked examples and report pass/fail");
  c_repro->add_option("--only", only, "Run a single check")->check(CLI::IsMember(reproduction_ids()));
  c_repro->add_option("--cycle3-matrix", cycle3_path, "Replace the 3-state lazy cycle used by several checks");

  auto* c_diagram = app.add_subcommand("diagram", "Trajectory diagram (text or --format dot)");
  c_diagram->add_option("coupling", coupling_path)->required();

  bool t_max_given = false;
  try {
    app.parse(argc, argv);
    t_max_given = app.count("--t-max") > 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.format = format == "json" ? Format::Json : format == "tsv" ? Format::Tsv : format == "dot" ? Format::Dot : Format::Text;

  CLI::App* cmd = app.get_subcommands().front();
  RunManifest manifest;
  manifest.version = COALESCE_VERSION;
  manifest.command = "coalesce";
  for (int i = 1; i < argc; ++i) manifest.command += std::string(" ") + argv[i];

  int code = 0;
  try {
    auto matrix = [&] { return parse_matrix(manifest.read_input(matrix_path)); };
    auto coupling = [&] { return parse_coupling(manifest.read_input(coupling_path)); };
    if (cmd == c_analyze) {
      analyze(matrix(), g);
    } else if (cmd == c_check) {
      const GrandCoupling mu = coupling();
      coupling_check(mu, matrix(), g);
    } else if (cmd == c_k) {
      manifest.caps["max_closure"] = g.max_closure;
      k_number(coupling(), g);
    } else if (cmd == c_feasible) {
      const StochasticMatrix p = matrix();
      feasible(p, read_support(support_arg, p.size(), manifest), g);
    } else if (cmd == c_blocks) {
      const StochasticMatrix p = matrix();
      blocks(p, Partition::parse(partition_arg, p.size()), g);
    } else if (cmd == c_birkhoff) {
      birkhoff(matrix(), g);
    } else if (cmd == c_sample) {
      const StochasticMatrix p = matrix();
      std::optional<GrandCoupling> mu;
      if (!coupling_path.empty()) mu = coupling();
      manifest.caps["t_max"] = g.t_max;
      manifest.caps["n_samples"] = n_samples;
      sample(p, mu, n_samples, resolve_seed(g, manifest), g);
    } else if (cmd == c_equi) {
      const GrandCoupling mu = coupling();
      const std::uint64_t t_max = t_max_given ? g.t_max : 10'000;
      manifest.caps["t_max"] = t_max;
      manifest.caps["runs"] = runs;
      verify_equidist(mu, runs, t_max, resolve_seed(g, manifest), threshold, g);
    } else if (cmd == c_kset) {
      manifest.caps["exact_cap"] = g.exact_cap;
      kset(matrix(), g);
    } else if (cmd == c_search) {
      const StochasticMatrix p = matrix();
      manifest.caps["trials"] = trials;
      const auto r = search_non_block(p, trials, RngStream(resolve_seed(g, manifest)));
      if (g.format == Format::Json) {
        std::cout << json{{"trials", r.trials}, {"feasible", r.feasible},
                          {"non_block", r.non_block ? to_json(*r.non_block) : json(nullptr)}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << "trials: " << r.trials << "\nfeasible supports: " << r.feasible << "\n";
        if (r.non_block)
          std::cout << "found a coupling that is not a block measure:\n" << serialize_coupling(*r.non_block);
        else
          std::cout << "every feasible support found is a block measure\n";
      }
    } else if (cmd == c_repro) {
      ReproductionOptions opts;
      if (!only.empty()) opts.only = only;
      if (!cycle3_path.empty()) opts.lazy_cycle3 = parse_matrix(manifest.read_input(cycle3_path));
      if (g.seed) opts.seed = *g.seed;
      manifest.seed = opts.seed;
      reproduce(opts, g);
    } else if (cmd == c_diagram) {
      const GrandCoupling mu = coupling();
      const std::uint64_t t_max = t_max_given ? g.t_max : 12;
      manifest.caps["t_max"] = t_max;
      std::cout << emit_trajectory_diagram(mu, RngStream(resolve_seed(g, manifest)), t_max,
                                           g.format == Format::Dot ? DiagramFormat::Dot : DiagramFormat::Ascii);
    }
  } catch (const CheckFailed&) {
    code = 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = is_budget_error(e.kind()) ? 3 : 2;
  }
  std::cerr << manifest.to_json_line() << "\n";
  return code;
}
