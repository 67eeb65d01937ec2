#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/errors.hpp"

namespace ndrcli {

namespace {

ndr::claims_set decode_set_field(const std::string& text) {
  if (text.empty() || text == "(empty)") return ndr::claims_set{};
  return ndr::decode_set(text);
}

ndr::claims_list decode_list_field(const std::string& text) {
  if (text.empty() || text == "(empty)") return ndr::claims_list{};
  return ndr::decode_list(text);
}

struct table {
  std::ostringstream body;
  bool csv = true;

  explicit table(bool use_csv) : csv(use_csv) {
    body << std::setprecision(12);
    if (csv) {
      body << "kind,outcome,count,denominator,estimate,lo,hi,horizon\n";
    } else {
      body << "# kind outcome count denominator estimate lo hi horizon\n";
    }
  }
  void row(const std::string& kind, const std::string& outcome, std::uint64_t count,
           std::uint64_t denominator, double estimate, ndr::interval ci, std::uint64_t horizon) {
    const char sep = csv ? ',' : ' ';
    body << kind << sep << outcome << sep << count << sep << denominator << sep << estimate
         << sep << ci.lo << sep << ci.hi << sep << horizon << "\n";
  }
};

std::string exact_table(const std::map<std::string, double>& probs, const std::string& kind,
                        bool csv) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << (csv ? "kind,outcome,probability\n" : "# kind outcome probability\n");
  const char sep = csv ? ',' : ' ';
  for (const auto& [key, p] : probs) {
    out << kind << sep << render_outcome(key) << sep << p << "\n";
  }
  return out.str();
}

std::map<std::string, double> valence_map(const ndr::valence_distribution& d) {
  std::map<std::string, double> out;
  for (ndr::valence v : ndr::all_valences) {
    out[std::string(1, ndr::to_char(v))] = d[v];
  }
  return out;
}

}  // namespace

int cmd_estimate(const global_options& g) {
  session s = open_session(g);
  const bool csv = s.cfg.format == "csv";
  const std::string ext = csv ? ".csv" : ".txt";
  const ndr::run_options opt = s.options();

  std::optional<ndr::exact_chain_result> chain;
  if (s.cfg.exact_enabled) {
    chain = ndr::exact_chain(s.cfg.ndr, s.systems, s.cfg.horizon, s.cfg.exact_max_states);
  }

  for (std::size_t i = 0; i < s.cfg.estimates.size(); ++i) {
    const auto& req = s.cfg.estimates[i];
    const std::string stem = "est_" + std::to_string(i) + "_" + req.type;
    table t(csv);
    std::optional<std::string> exact_body;

    if (req.type == "pk") {
      auto dist = ndr::simulate_pk(s.cfg.ndr, s.systems, req.n, opt);
      const std::string kind = "p" + std::to_string(req.n);
      for (const auto& [key, count] : dist.counts()) {
        (void)count;
        auto e = dist.entry(key);
        t.row(kind, render_outcome(key), e.count, dist.replicas(), e.estimate, e.ci,
              dist.horizon());
      }
      if (chain) exact_body = exact_table(chain->prefix_probabilities(req.n), kind, csv);
    } else if (req.type == "answer" || req.type == "generalized") {
      const ndr::question q = ndr::decode_question(req.question);
      const ndr::claims_set conditioning = decode_set_field(req.conditioning);
      ndr::answer_estimate est =
          req.type == "answer"
              ? ndr::answer_distribution(s.cfg.ndr, s.systems, q, opt)
              : ndr::generalized_answer_distribution(s.cfg.ndr, s.systems, q, conditioning, opt);
      auto probs = est.probabilities();
      for (ndr::valence v : ndr::all_valences) {
        t.row(req.type, std::string(1, ndr::to_char(v)), est.counts[ndr::index_of(v)],
              est.denominator, probs[v], est.ci(v), est.horizon);
      }
      if (chain) {
        exact_body = exact_table(
            valence_map(req.type == "answer" ? chain->answer(q)
                                             : chain->generalized_answer(q, conditioning)),
            req.type, csv);
      }
    } else if (req.type == "claims") {
      const ndr::claims_set set = decode_set_field(req.set);
      auto est = ndr::estimate_claims_distribution(s.cfg.ndr, s.systems, set, opt);
      t.row(req.type, render_outcome(ndr::encode_set(set)), est.count, est.denominator,
            est.estimate, est.ci, est.horizon);
      if (chain) {
        exact_body = exact_table({{ndr::encode_set(set), chain->prob_contains(set)}}, req.type,
                                 csv);
      }
    } else if (req.type == "list-claims" || req.type == "list-answer") {
      const ndr::claims_list through = decode_list_field(req.through);
      if (req.type == "list-claims") {
        const ndr::claims_set set = decode_set_field(req.set);
        auto est = ndr::list_conditioned_claims(s.cfg.ndr, s.systems, through, set, opt);
        t.row(req.type, render_outcome(ndr::encode_set(set)), est.count, est.denominator,
              est.estimate, est.ci, est.horizon);
        if (chain) {
          auto passage = ndr::exact_chain(s.cfg.ndr, s.systems, s.cfg.horizon,
                                          s.cfg.exact_max_states, through);
          exact_body = exact_table({{ndr::encode_set(set), passage.passed_prob_contains(set)}},
                                   req.type, csv);
        }
      } else {
        const ndr::question q = ndr::decode_question(req.question);
        auto est = ndr::list_conditioned_answer(s.cfg.ndr, s.systems, through, q, opt);
        auto probs = est.probabilities();
        for (ndr::valence v : ndr::all_valences) {
          t.row(req.type, std::string(1, ndr::to_char(v)), est.counts[ndr::index_of(v)],
                est.denominator, probs[v], est.ci(v), est.horizon);
        }
        if (chain) {
          auto passage = ndr::exact_chain(s.cfg.ndr, s.systems, s.cfg.horizon,
                                          s.cfg.exact_max_states, through);
          exact_body = exact_table(valence_map(passage.passed_answer(q)), req.type, csv);
        }
      }
    } else if (req.type == "maximal") {
      auto report = ndr::detect_maximal(s.cfg.ndr, s.systems, opt);
      for (const auto& list : report.maximal) {
        t.row(req.type, render_outcome(ndr::encode_list(list)), 0, report.replicas, 0.0,
              ndr::interval{0.0, 0.0}, report.horizon);
      }
    } else {
      throw ndr::invalid_config("estimate: unknown type '" + req.type + "'");
    }

    write_file(s.cfg.out_dir, stem + ext, t.body.str());
    if (exact_body) write_file(s.cfg.out_dir, "exact_" + std::to_string(i) + "_" + req.type + ext,
                               *exact_body);
  }

  write_effective_config(s);
  std::cout << "estimate: wrote " << s.cfg.estimates.size() << " table(s) to " << s.cfg.out_dir
            << "\n";
  return 0;
}

}  // namespace ndrcli
