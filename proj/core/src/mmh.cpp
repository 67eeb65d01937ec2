#include "ndr/mmh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

constexpr double kMassTolerance = 1e-9;

std::string render_set(const claims_set& set) {
  std::string enc = encode_set(set);
  return enc.empty() ? std::string("(empty)") : enc;
}

void require_delta(const ndr_config& cfg, const char* who) {
  if (cfg.systems.size() != 1) {
    throw delta_condition_violated(std::string(who) +
                                   ": the machine must be bound to exactly one system, got " +
                                   std::to_string(cfg.systems.size()));
  }
}

// Final tapes of `replicas` runs, one rng substream per replica.
std::vector<claims_list> sample_finals(const ndr_config& cfg, const system_set& systems,
                                       std::uint64_t horizon, std::uint64_t replicas,
                                       std::uint64_t seed) {
  const ndr_engine engine(cfg, systems);
  std::vector<claims_list> finals;
  finals.reserve(replicas);
  for (std::uint64_t i = 0; i < replicas; ++i) {
    rng r = rng::substream(seed, i);
    ndr_state state;
    for (std::uint64_t k = 0; k < horizon; ++k) engine.advance(state, r);
    finals.push_back(state.claims());
  }
  return finals;
}

// Maximality flags per distinct final tape: a tape is maximal when no other
// observed tape properly extends it.
std::map<std::string, bool> maximal_flags(const std::vector<claims_list>& finals) {
  std::map<std::string, claims_list> distinct;
  for (const auto& list : finals) distinct.emplace(encode_list(list), list);
  std::map<std::string, bool> flags;
  for (const auto& [enc, list] : distinct) {
    bool extended = false;
    for (const auto& [enc2, other] : distinct) {
      (void)enc2;
      if (proper_prefix_of(list, other)) {
        extended = true;
        break;
      }
    }
    flags[enc] = !extended;
  }
  return flags;
}

}  // namespace

double mmh_measure::total_mass() const {
  double sum = 0.0;
  for (const auto& [inst, w] : support) {
    (void)inst;
    sum += w;
  }
  return sum;
}

void mmh_measure::validate() const {
  for (const auto& [inst, w] : support) {
    if (!(w >= 0.0)) {
      throw invalid_weights("mmh_measure: negative or NaN weight on instance " +
                            render_set(inst.claims));
    }
  }
  const double total = total_mass();
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw invalid_weights("mmh_measure: weights sum to " + std::to_string(total) +
                          ", expected 1");
  }
}

ndr_world make_world(const ndr_config& cfg, const system_set& systems, unsigned length_bound,
                     const run_options& opt) {
  require_delta(cfg, "make_world");
  const std::string& id = cfg.systems.front();
  const formal_system& fs = systems.get(id);

  ndr_world world;
  world.system = id;
  world.length_bound = length_bound;
  world.horizon = opt.horizon;
  world.replicas = opt.replicas;
  world.seed = opt.seed;

  std::vector<std::string> wffs;
  for (const auto& s : enumerate_strings(fs, length_bound)) {
    if (fs.is_wff(s)) wffs.push_back(s);
  }

  // One batch of replicas feeds every per-WFF tabulation; the counts agree
  // with answer_distribution run question by question on the same seed.
  const auto finals = sample_finals(cfg, systems, opt.horizon, opt.replicas, opt.seed);
  for (const auto& formula : wffs) {
    const question q{id, formula};
    std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
    std::uint64_t denominator = 0;
    for (const auto& list : finals) {
      bool answered = false;
      for (valence v : all_valences) {
        if (list_contains(list, claim{q, v})) {
          ++counts[index_of(v)];
          answered = true;
        }
      }
      if (answered) ++denominator;
    }
    if (denominator == 0) {
      throw wff_never_answered("make_world: no replica answered " + encode_question(q) +
                               " within the horizon");
    }
    valence_distribution d;
    for (std::size_t i = 0; i < 4; ++i) {
      d.p[i] = static_cast<double>(counts[i]) / static_cast<double>(denominator);
    }
    world.answers[formula] = d;
  }
  return world;
}

world_instance sample_world_instance(const ndr_config& cfg, const system_set& systems,
                                     std::uint64_t k_max, std::uint64_t seed,
                                     std::uint64_t probe_replicas) {
  require_delta(cfg, "sample_world_instance");
  const std::uint64_t n = std::max<std::uint64_t>(probe_replicas, 1);
  const auto finals = sample_finals(cfg, systems, k_max, n, seed);
  const auto flags = maximal_flags(finals);

  world_instance inst;
  inst.system = cfg.systems.front();
  inst.claims = claims_set::from_list(finals.front());
  inst.horizon = k_max;
  inst.maximal = flags.at(encode_list(finals.front()));
  inst.horizon_truncated = true;
  return inst;
}

bool classify_mistake_free(const world_instance& inst, const system_set& systems) {
  claims_list list(inst.claims.items().begin(), inst.claims.items().end());
  return is_mistake_free(list, systems);
}

bool classify_mistake_free(const ndr_world& world, const system_set& systems, double tol) {
  for (const auto& [formula, dist] : world.answers) {
    const valence oracle = systems.classify(question{world.system, formula});
    for (valence v : all_valences) {
      const double p = dist[v];
      if (v == oracle ? p < 1.0 - tol : p > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Generators.

namespace {

mmh_measure from_map(std::map<world_instance, double> weights, std::string generator) {
  mmh_measure m;
  m.generator = std::move(generator);
  m.support.assign(weights.begin(), weights.end());
  m.validate();
  return m;
}

mmh_measure build_explicit(const explicit_weights_spec& spec) {
  std::map<world_instance, double> weights;
  for (const auto& [inst, w] : spec.entries) {
    if (!(w >= 0.0)) {
      throw invalid_weights("build_mmh_measure: negative or NaN weight on instance " +
                            render_set(inst.claims));
    }
    weights[inst] += w;
  }
  return from_map(std::move(weights), "explicit-weights");
}

mmh_measure build_sampled(const ndr_sampled_spec& spec, const system_set& systems) {
  require_delta(spec.cfg, "build_mmh_measure");
  if (spec.opt.replicas == 0) throw invalid_config("build_mmh_measure: replicas must be positive");
  const auto finals =
      sample_finals(spec.cfg, systems, spec.opt.horizon, spec.opt.replicas, spec.opt.seed);
  const auto flags = maximal_flags(finals);

  std::map<world_instance, std::uint64_t> counts;
  for (const auto& list : finals) {
    world_instance inst;
    inst.system = spec.cfg.systems.front();
    inst.claims = claims_set::from_list(list);
    inst.horizon = spec.opt.horizon;
    inst.maximal = flags.at(encode_list(list));
    inst.horizon_truncated = true;
    ++counts[inst];
  }
  std::map<world_instance, double> weights;
  for (const auto& [inst, count] : counts) {
    weights[inst] = static_cast<double>(count) / static_cast<double>(spec.opt.replicas);
  }
  return from_map(std::move(weights), "ndr-machine-sampled");
}

mmh_measure build_coinflip(const coinflip_spec& spec) {
  const coin_flip_result cf =
      coin_flip_distribution(spec.machine, spec.max_input_len, spec.step_budget);
  std::map<world_instance, double> weights;
  for (const auto& [program, p] : cf.probabilities) {
    auto it = spec.decoding.find(program);
    if (it == spec.decoding.end()) {
      throw decoding_missing("build_mmh_measure: halting program '" + program +
                             "' has no entry in the decoding table");
    }
    weights[it->second] += p;
  }
  return from_map(std::move(weights), "coinflip-program-induced");
}

}  // namespace

mmh_measure build_mmh_measure(const measure_spec& spec, const system_set& systems) {
  return std::visit(
      [&](const auto& s) -> mmh_measure {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, explicit_weights_spec>) {
          return build_explicit(s);
        } else if constexpr (std::is_same_v<T, ndr_sampled_spec>) {
          return build_sampled(s, systems);
        } else {
          return build_coinflip(s);
        }
      },
      spec);
}

measure_report measure_statistics(const mmh_measure& m, const system_set& systems) {
  measure_report rep;
  rep.support_size = m.support.size();
  for (const auto& [inst, w] : m.support) {
    if (classify_mistake_free(inst, systems)) rep.mistake_free_mass += w;
    rep.mass_per_system[inst.system] += w;
  }
  rep.entropy_bits = entropy_bits(m.support);
  return rep;
}

mmh_measure restrict_to_mistake_free(const mmh_measure& m, const system_set& systems) {
  mmh_measure out;
  out.generator = m.generator;
  double kept = 0.0;
  for (const auto& [inst, w] : m.support) {
    if (classify_mistake_free(inst, systems)) {
      out.support.emplace_back(inst, w);
      kept += w;
    }
  }
  if (kept <= 0.0) {
    throw zero_denominator("restrict_to_mistake_free: the measure has no mistake-free mass");
  }
  for (auto& [inst, w] : out.support) {
    (void)inst;
    w /= kept;
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Files.

void save_world(std::ostream& out, const ndr_world& world) {
  out << std::setprecision(17);
  out << "world " << world.system << " bound " << world.length_bound << "\n";
  out << "meta horizon " << world.horizon << " replicas " << world.replicas << " seed "
      << world.seed << "\n";
  for (const auto& [formula, d] : world.answers) {
    out << "wff " << formula;
    for (valence v : all_valences) out << " " << d[v];
    out << "\n";
  }
}

ndr_world load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open world file");
  ndr_world world;
  bool saw_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword) || keyword[0] == '#') continue;
    if (keyword == "world") {
      std::string bound_kw;
      if (!(fields >> world.system >> bound_kw >> world.length_bound) || bound_kw != "bound") {
        throw parse_error(path, lineno, "expected: world <system> bound <n>");
      }
      saw_header = true;
    } else if (keyword == "meta") {
      std::string k1, k2, k3;
      if (!(fields >> k1 >> world.horizon >> k2 >> world.replicas >> k3 >> world.seed) ||
          k1 != "horizon" || k2 != "replicas" || k3 != "seed") {
        throw parse_error(path, lineno, "expected: meta horizon <h> replicas <n> seed <s>");
      }
    } else if (keyword == "wff") {
      if (!saw_header) throw parse_error(path, lineno, "wff before world header");
      std::string formula;
      valence_distribution d;
      if (!(fields >> formula >> d.p[0] >> d.p[1] >> d.p[2] >> d.p[3])) {
        throw parse_error(path, lineno, "expected: wff <formula> <t> <a> <n> <u>");
      }
      world.answers[formula] = d;
    } else {
      throw parse_error(path, lineno, "unknown keyword '" + keyword + "'");
    }
  }
  if (!saw_header) throw parse_error(path, lineno, "missing world header");
  return world;
}

void save_measure(std::ostream& out, const mmh_measure& m) {
  out << std::setprecision(17);
  out << "measure " << m.generator << "\n";
  for (const auto& [inst, w] : m.support) {
    out << "instance " << w << " " << inst.system << " " << inst.horizon << " "
        << (inst.maximal ? 1 : 0) << " " << render_set(inst.claims) << "\n";
  }
}

mmh_measure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open measure file");
  mmh_measure m;
  bool saw_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword) || keyword[0] == '#') continue;
    if (keyword == "measure") {
      if (!(fields >> m.generator)) throw parse_error(path, lineno, "measure line needs a kind");
      saw_header = true;
    } else if (keyword == "instance") {
      if (!saw_header) throw parse_error(path, lineno, "instance before measure header");
      double w = 0.0;
      world_instance inst;
      int maximal = 0;
      std::string enc;
      if (!(fields >> w >> inst.system >> inst.horizon >> maximal >> enc)) {
        throw parse_error(path, lineno,
                          "expected: instance <weight> <system> <horizon> <maximal> <set>");
      }
      try {
        inst.claims = decode_set(enc);
      } catch (const error& e) {
        throw parse_error(path, lineno, e.what());
      }
      inst.maximal = maximal != 0;
      inst.horizon_truncated = true;
      m.support.emplace_back(std::move(inst), w);
    } else {
      throw parse_error(path, lineno, "unknown keyword '" + keyword + "'");
    }
  }
  if (!saw_header) throw parse_error(path, lineno, "missing measure header");
  m.validate();
  return m;
}

}  // namespace ndr
