#include "ndr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

std::string render_key(const std::string& key) {
  return key.empty() ? std::string(empty_outcome_key) : key;
}

struct replica_result {
  claims_list final_claims;
  bool passed = false;
};

// Runs every replica to the horizon. Replica i draws from substream i of the
// master seed, so results do not depend on the thread count, and growing N
// extends earlier runs without perturbing them. Passage against the target
// tape is checked on the initial blank tape and after every iteration before
// the last.
std::vector<replica_result> run_replicas(const ndr_config& cfg, const system_set& systems,
                                         const run_options& opt,
                                         const std::optional<claims_list>& passage_target) {
  const ndr_engine engine(cfg, systems);
  std::vector<replica_result> results(opt.replicas);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      rng r = rng::substream(opt.seed, i);
      ndr_state state;
      bool passed = passage_target && state.claims() == *passage_target;
      for (std::uint64_t k = 1; k <= opt.horizon; ++k) {
        engine.advance(state, r);
        if (passage_target && !passed && k < opt.horizon && state.claims() == *passage_target) {
          passed = true;
        }
      }
      results[i] = replica_result{state.claims(), passed};
    }
  };
  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1 || opt.replicas < 2 * threads) {
    work(0, opt.replicas);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (opt.replicas + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(opt.replicas, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return results;
}

void require_replicas(const run_options& opt) {
  if (opt.replicas == 0) throw invalid_config("estimation: replicas must be positive");
}

}  // namespace

empirical_distribution::empirical_distribution(std::map<std::string, std::uint64_t> counts,
                                               std::uint64_t replicas, std::uint64_t horizon)
    : counts_(std::move(counts)), replicas_(replicas), horizon_(horizon) {}

dist_entry empirical_distribution::entry(const std::string& key, double z) const {
  dist_entry e;
  auto it = counts_.find(key);
  e.count = it != counts_.end() ? it->second : 0;
  e.estimate = replicas_ > 0 ? static_cast<double>(e.count) / static_cast<double>(replicas_) : 0.0;
  e.ci = wilson_interval(e.count, replicas_, z);
  return e;
}

std::map<std::string, double> empirical_distribution::probabilities() const {
  std::map<std::string, double> out;
  for (const auto& [key, count] : counts_) {
    out[key] = static_cast<double>(count) / static_cast<double>(replicas_);
  }
  return out;
}

double empirical_distribution::total_probability() const {
  double sum = 0.0;
  for (const auto& [key, count] : counts_) {
    (void)key;
    sum += static_cast<double>(count) / static_cast<double>(replicas_);
  }
  return sum;
}

void empirical_distribution::write_csv(std::ostream& out, const std::string& kind) const {
  out << "kind,outcome,count,total,estimate,lo,hi,horizon\n";
  for (const auto& [key, count] : counts_) {
    (void)count;
    dist_entry e = entry(key);
    out << kind << "," << render_key(key) << "," << e.count << "," << replicas_ << ","
        << e.estimate << "," << e.ci.lo << "," << e.ci.hi << "," << horizon_ << "\n";
  }
}

empirical_distribution simulate_pk(const ndr_config& cfg, const system_set& systems, unsigned n,
                                   const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, std::nullopt);
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : results) {
    if (r.final_claims.size() >= n) {
      ++counts[encode_list(prefix(r.final_claims, n))];
    } else {
      ++counts[short_outcome_key];
    }
  }
  return empirical_distribution(std::move(counts), opt.replicas, opt.horizon);
}

valence_distribution answer_estimate::probabilities() const {
  valence_distribution d;
  if (denominator == 0) return d;
  for (std::size_t i = 0; i < 4; ++i) {
    d.p[i] = static_cast<double>(counts[i]) / static_cast<double>(denominator);
  }
  return d;
}

interval answer_estimate::ci(valence v, double z) const {
  return wilson_interval(counts[index_of(v)], denominator, z);
}

containment_estimate estimate_claims_distribution(const ndr_config& cfg,
                                                  const system_set& systems, const claims_set& c,
                                                  const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, std::nullopt);
  containment_estimate est;
  est.replicas = opt.replicas;
  est.denominator = opt.replicas;
  est.horizon = opt.horizon;
  for (const auto& r : results) {
    if (c.contained_in(r.final_claims)) ++est.count;
  }
  est.estimate = static_cast<double>(est.count) / static_cast<double>(est.denominator);
  est.ci = wilson_interval(est.count, est.denominator);
  return est;
}

namespace {

answer_estimate tabulate_answer(const std::vector<replica_result>& results, const question& q,
                                const claims_set& conditioning, bool require_passage,
                                const run_options& opt) {
  answer_estimate est;
  est.q = q;
  est.replicas = opt.replicas;
  est.horizon = opt.horizon;
  for (const auto& r : results) {
    if (require_passage && !r.passed) continue;
    if (!conditioning.contained_in(r.final_claims)) continue;
    bool answered = false;
    for (valence v : all_valences) {
      if (list_contains(r.final_claims, claim{q, v})) {
        ++est.counts[index_of(v)];
        answered = true;
      }
    }
    if (answered) ++est.denominator;
  }
  return est;
}

}  // namespace

answer_estimate answer_distribution(const ndr_config& cfg, const system_set& systems,
                                    const question& q, const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, std::nullopt);
  answer_estimate est = tabulate_answer(results, q, claims_set{}, false, opt);
  if (est.denominator == 0) {
    throw question_never_answered("answer_distribution: no replica answered " +
                                  encode_question(q));
  }
  return est;
}

answer_estimate generalized_answer_distribution(const ndr_config& cfg, const system_set& systems,
                                                const question& q, const claims_set& conditioning,
                                                const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, std::nullopt);
  answer_estimate est = tabulate_answer(results, q, conditioning, false, opt);
  if (est.denominator == 0) {
    if (conditioning.empty()) {
      throw question_never_answered("generalized_answer_distribution: no replica answered " +
                                    encode_question(q));
    }
    throw conditioning_never_observed(
        "generalized_answer_distribution: the event (answer to " + encode_question(q) +
        ", containment of " + render_key(encode_set(conditioning)) + ") never occurred");
  }
  return est;
}

containment_estimate list_conditioned_claims(const ndr_config& cfg, const system_set& systems,
                                             const claims_list& through, const claims_set& c,
                                             const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, through);
  containment_estimate est;
  est.replicas = opt.replicas;
  est.horizon = opt.horizon;
  for (const auto& r : results) {
    if (!r.passed) continue;
    ++est.denominator;
    if (c.contained_in(r.final_claims)) ++est.count;
  }
  if (est.denominator == 0) {
    throw conditioning_list_never_reached("list_conditioned_claims: no replica passed through " +
                                          render_key(encode_list(through)));
  }
  est.estimate = static_cast<double>(est.count) / static_cast<double>(est.denominator);
  est.ci = wilson_interval(est.count, est.denominator);
  return est;
}

answer_estimate list_conditioned_answer(const ndr_config& cfg, const system_set& systems,
                                        const claims_list& through, const question& q,
                                        const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, through);
  bool any_passed = false;
  for (const auto& r : results) {
    if (r.passed) {
      any_passed = true;
      break;
    }
  }
  if (!any_passed) {
    throw conditioning_list_never_reached("list_conditioned_answer: no replica passed through " +
                                          render_key(encode_list(through)));
  }
  answer_estimate est = tabulate_answer(results, q, claims_set{}, true, opt);
  if (est.denominator == 0) {
    throw question_never_answered("list_conditioned_answer: no passing replica answered " +
                                  encode_question(q));
  }
  return est;
}

// ---------------------------------------------------------------------------
// Exact chain.

namespace {

struct chain_node {
  std::vector<question> open;
  claims_list claims;
  bool passed = false;
};

std::string chain_key(const chain_node& node) {
  std::string key = encode_list(node.claims);
  key += '\t';
  for (std::size_t i = 0; i < node.open.size(); ++i) {
    if (i > 0) key += '|';
    key += encode_question(node.open[i]);
  }
  key += '\t';
  key += node.passed ? '1' : '0';
  return key;
}

// Weighted kernel outcomes for one question: no answer, the oracle valence,
// or one of the three wrong valences. Zero-probability branches are pruned.
std::vector<std::pair<std::optional<valence>, double>> kernel_outcomes(const answer_kernel& k,
                                                                       valence truth) {
  std::vector<std::pair<std::optional<valence>, double>> out;
  const double s = k.solve_rate;
  const double eta = k.noise_rate;
  if (1.0 - s > 0.0) out.emplace_back(std::nullopt, 1.0 - s);
  if (s * (1.0 - eta) > 0.0) out.emplace_back(truth, s * (1.0 - eta));
  if (s * eta > 0.0) {
    for (valence w : wrong_valences(truth)) out.emplace_back(w, s * eta / 3.0);
  }
  return out;
}

}  // namespace

exact_chain_result exact_chain(const ndr_config& cfg, const system_set& systems,
                               std::uint64_t horizon, std::size_t max_states,
                               const std::optional<claims_list>& passage_target) {
  auto policy = make_policy(cfg, systems);
  std::map<std::string, std::pair<chain_node, double>> current;
  {
    chain_node root;
    root.passed = passage_target && *passage_target == root.claims;
    current[chain_key(root)] = {root, 1.0};
  }
  std::size_t peak = 1;

  for (std::uint64_t it = 1; it <= horizon; ++it) {
    std::map<std::string, std::pair<chain_node, double>> next;
    auto deposit = [&](chain_node&& node, double p) {
      if (p <= 0.0) return;
      std::string key = chain_key(node);
      auto found = next.find(key);
      if (found != next.end()) {
        found->second.second += p;
        return;
      }
      if (next.size() >= max_states) {
        throw state_space_too_large("exact_chain: more than " + std::to_string(max_states) +
                                    " live states at iteration " + std::to_string(it));
      }
      next.emplace(std::move(key), std::make_pair(std::move(node), p));
    };

    for (const auto& [key, entry] : current) {
      (void)key;
      const chain_node& node = entry.first;
      const double p_node = entry.second;
      ndr_state state = ndr_state::from_parts(node.open, node.claims, it - 1);

      for (const auto& [batch, p_batch] : policy->enumerate(state, cfg, systems)) {
        const auto accepted = filter_emissions(batch, state, cfg);
        std::vector<question> fresh;
        std::vector<question> reasked;
        for (const auto& q : accepted) {
          if (state.is_answered(q)) {
            reasked.push_back(q);
          } else {
            fresh.push_back(q);
          }
        }
        // Attempt order matches the sampler: existing tape, new questions,
        // then transient re-asks.
        std::vector<question> attempts = node.open;
        attempts.insert(attempts.end(), fresh.begin(), fresh.end());
        const std::size_t open_count = attempts.size();
        attempts.insert(attempts.end(), reasked.begin(), reasked.end());

        std::vector<std::vector<std::pair<std::optional<valence>, double>>> per_question;
        per_question.reserve(attempts.size());
        for (const auto& q : attempts) {
          per_question.push_back(kernel_outcomes(cfg.kernel, systems.classify(q)));
        }

        // Cartesian product over the per-question outcomes.
        std::vector<std::size_t> pick(attempts.size(), 0);
        for (;;) {
          double p_kernel = 1.0;
          claims_list appended;
          std::vector<bool> answered(attempts.size(), false);
          for (std::size_t i = 0; i < attempts.size(); ++i) {
            const auto& [maybe_v, pv] = per_question[i][pick[i]];
            p_kernel *= pv;
            if (maybe_v) {
              appended.push_back(claim{attempts[i], *maybe_v});
              answered[i] = true;
            }
          }

          claims_list claims_after = node.claims;
          claims_after.insert(claims_after.end(), appended.begin(), appended.end());
          std::vector<question> open_after;
          for (std::size_t i = 0; i < open_count; ++i) {
            if (!answered[i]) open_after.push_back(attempts[i]);
          }

          const double p_base = p_node * p_batch * p_kernel;
          if (cfg.removal_rate > 0.0) {
            const std::size_t m = claims_after.size();
            if (m > 20) {
              throw state_space_too_large(
                  "exact_chain: removal branching over " + std::to_string(m) + " claims");
            }
            const double r = cfg.removal_rate;
            for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
              double p_rm = 1.0;
              claims_list kept;
              for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1ull << i)) {
                  p_rm *= r;
                } else {
                  p_rm *= (1.0 - r);
                  kept.push_back(claims_after[i]);
                }
              }
              chain_node out{open_after, std::move(kept), node.passed};
              if (passage_target && !out.passed && it < horizon &&
                  out.claims == *passage_target) {
                out.passed = true;
              }
              deposit(std::move(out), p_base * p_rm);
            }
          } else {
            chain_node out{open_after, std::move(claims_after), node.passed};
            if (passage_target && !out.passed && it < horizon && out.claims == *passage_target) {
              out.passed = true;
            }
            deposit(std::move(out), p_base);
          }

          // Advance the odometer over outcome picks.
          std::size_t d = 0;
          for (; d < attempts.size(); ++d) {
            if (++pick[d] < per_question[d].size()) break;
            pick[d] = 0;
          }
          if (d == attempts.size()) break;
          if (attempts.empty()) break;
        }
      }
    }
    current = std::move(next);
    peak = std::max(peak, current.size());
  }

  exact_chain_result result;
  result.horizon = horizon;
  result.peak_states = peak;
  std::map<std::string, std::pair<claims_list, double>> lists;
  std::map<std::string, std::pair<claims_list, double>> passed_lists;
  for (const auto& [key, entry] : current) {
    (void)key;
    const chain_node& node = entry.first;
    const double p = entry.second;
    std::string enc = encode_list(node.claims);
    auto& slot = lists[enc];
    slot.first = node.claims;
    slot.second += p;
    if (node.passed) {
      auto& pslot = passed_lists[enc];
      pslot.first = node.claims;
      pslot.second += p;
      result.passage_probability += p;
    }
  }
  for (auto& [enc, pair] : lists) {
    result.list_probabilities[enc] = pair.second;
    result.outcomes.emplace_back(std::move(pair.first), pair.second);
  }
  for (auto& [enc, pair] : passed_lists) {
    (void)enc;
    result.passed_outcomes.emplace_back(std::move(pair.first), pair.second);
  }
  return result;
}

double exact_chain_result::prob_contains(const claims_set& c) const {
  double sum = 0.0;
  for (const auto& [list, p] : outcomes) {
    if (c.contained_in(list)) sum += p;
  }
  return sum;
}

double exact_chain_result::prob_contains_question(const claims_set& c, const question& q) const {
  double sum = 0.0;
  for (const auto& [list, p] : outcomes) {
    if (c.contained_in(list) && list_contains_question(list, q)) sum += p;
  }
  return sum;
}

valence_distribution exact_chain_result::answer(const question& q) const {
  return generalized_answer(q, claims_set{});
}

valence_distribution exact_chain_result::generalized_answer(const question& q,
                                                            const claims_set& c) const {
  const double denom = prob_contains_question(c, q);
  if (denom <= 0.0) {
    throw zero_denominator("exact answer distribution: question " + encode_question(q) +
                           " never answered under the conditioning event");
  }
  valence_distribution d;
  for (valence v : all_valences) {
    d[v] = prob_contains(c.union_with(claims_set({claim{q, v}}))) / denom;
  }
  return d;
}

std::map<std::string, double> exact_chain_result::prefix_probabilities(unsigned n) const {
  std::map<std::string, double> out;
  for (const auto& [list, p] : outcomes) {
    if (list.size() >= n) {
      out[encode_list(prefix(list, n))] += p;
    } else {
      out[short_outcome_key] += p;
    }
  }
  return out;
}

double exact_chain_result::passed_prob_contains(const claims_set& c) const {
  if (passage_probability <= 0.0) {
    throw zero_denominator("exact list-conditioned distribution: passage probability is zero");
  }
  double sum = 0.0;
  for (const auto& [list, p] : passed_outcomes) {
    if (c.contained_in(list)) sum += p;
  }
  return sum / passage_probability;
}

valence_distribution exact_chain_result::passed_answer(const question& q) const {
  double denom = 0.0;
  std::array<double, 4> nums{0.0, 0.0, 0.0, 0.0};
  for (const auto& [list, p] : passed_outcomes) {
    if (!list_contains_question(list, q)) continue;
    denom += p;
    for (valence v : all_valences) {
      if (list_contains(list, claim{q, v})) nums[index_of(v)] += p;
    }
  }
  if (denom <= 0.0) {
    throw zero_denominator("exact list-conditioned answer: question " + encode_question(q) +
                           " never answered among passing mass");
  }
  valence_distribution d;
  for (std::size_t i = 0; i < 4; ++i) d.p[i] = nums[i] / denom;
  return d;
}

// ---------------------------------------------------------------------------
// Marginalization check.

namespace {

// Parent prefix of an encoded list: everything before the last claim.
std::string parent_key(const std::string& key) {
  const std::size_t bar = key.rfind('|');
  return bar == std::string::npos ? std::string() : key.substr(0, bar);
}

}  // namespace

bool marginal_report::within_3_sigma() const {
  for (const auto& row : rows) {
    if (row.discrepancy > 3.0 * row.sigma + 1e-12) return false;
  }
  return true;
}

marginal_report check_marginal_consistency(const empirical_distribution& dist_n,
                                           const empirical_distribution& dist_n1) {
  marginal_report report;
  const double nn = static_cast<double>(dist_n.replicas());
  const double nn1 = static_cast<double>(dist_n1.replicas());

  // Integer sums of child counts per parent keep the same-sample identity
  // exact: equal counts produce a difference of exactly zero.
  std::map<std::string, std::uint64_t> child_sums;
  for (const auto& [key, count] : dist_n1.counts()) {
    if (key == short_outcome_key) continue;
    child_sums[parent_key(key)] += count;
  }
  std::map<std::string, std::uint64_t> parent_counts;
  for (const auto& [key, count] : dist_n.counts()) {
    if (key == short_outcome_key) continue;
    parent_counts[key] = count;
  }
  std::map<std::string, bool> keys;
  for (const auto& [key, c] : child_sums) {
    (void)c;
    keys[key] = true;
  }
  for (const auto& [key, c] : parent_counts) {
    (void)c;
    keys[key] = true;
  }

  for (const auto& [key, unused] : keys) {
    (void)unused;
    const std::uint64_t cn = parent_counts.count(key) ? parent_counts.at(key) : 0;
    const std::uint64_t cm = child_sums.count(key) ? child_sums.at(key) : 0;
    marginal_row row;
    row.prefix_key = key;
    row.p_n = static_cast<double>(cn) / nn;
    row.p_marginalized = static_cast<double>(cm) / nn1;
    row.discrepancy = (cn == cm && dist_n.replicas() == dist_n1.replicas())
                          ? 0.0
                          : std::abs(row.p_n - row.p_marginalized);
    const double pooled =
        (static_cast<double>(cn) + static_cast<double>(cm)) / (nn + nn1);
    row.sigma = std::sqrt(pooled * (1.0 - pooled) * (1.0 / nn + 1.0 / nn1));
    report.max_discrepancy = std::max(report.max_discrepancy, row.discrepancy);
    report.rows.push_back(std::move(row));
  }
  report.short_mass_n = dist_n.entry(short_outcome_key).estimate;
  report.short_mass_n1 = dist_n1.entry(short_outcome_key).estimate;
  return report;
}

maximal_report detect_maximal(const ndr_config& cfg, const system_set& systems,
                              const run_options& opt) {
  require_replicas(opt);
  auto results = run_replicas(cfg, systems, opt, std::nullopt);
  std::map<std::string, claims_list> observed;
  for (const auto& r : results) {
    observed.emplace(encode_list(r.final_claims), r.final_claims);
  }
  maximal_report report;
  report.horizon = opt.horizon;
  report.replicas = opt.replicas;
  for (const auto& [enc, list] : observed) {
    (void)enc;
    bool extended = false;
    for (const auto& [enc2, other] : observed) {
      (void)enc2;
      if (proper_prefix_of(list, other)) {
        extended = true;
        break;
      }
    }
    if (!extended) report.maximal.push_back(list);
  }
  return report;
}

void write_report_header(std::ostream& out, const ndr_config& cfg, const run_options& opt) {
  out << "# systems:";
  for (const auto& id : cfg.systems) out << " " << id;
  out << "\n# policy: " << cfg.policy.kind << " count=" << cfg.policy.count;
  if (cfg.policy.kind == "wff-biased") out << " wff_weight=" << cfg.policy.wff_weight;
  out << "\n# kernel: solve_rate=" << cfg.kernel.solve_rate
      << " noise_rate=" << cfg.kernel.noise_rate;
  out << "\n# removal_rate: " << cfg.removal_rate;
  out << "\n# max_string_len: " << cfg.max_string_len;
  out << "\n# enforce_non_repeating: " << (cfg.enforce_non_repeating ? "true" : "false");
  out << "\n# horizon: " << opt.horizon << "\n# replicas: " << opt.replicas
      << "\n# seed: " << opt.seed << "\n";
}

}  // namespace ndr
