#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/ndr_machine.hpp"

namespace ndrcli {

namespace {

struct replica_stats {
  std::uint64_t total_claims = 0;
  std::uint64_t mistaken_claims = 0;
  std::uint64_t mistake_free_replicas = 0;
  std::uint64_t non_repeating_replicas = 0;
};

}  // namespace

int cmd_simulate(const global_options& g) {
  session s = open_session(g);
  const ndr::ndr_engine engine(s.cfg.ndr, s.systems);

  replica_stats stats;
  std::vector<std::string> finals;  // encoded, first trace_replicas only
  std::ostringstream trace;
  trace << "replica\tsequence\titeration\tkind\tsystem\tformula\tvalence\tindex\n";
  const std::uint64_t traced = std::min(s.cfg.trace_replicas, s.cfg.replicas);

  for (std::uint64_t i = 0; i < s.cfg.replicas; ++i) {
    ndr::rng r = ndr::rng::substream(s.cfg.seed, i);
    ndr::ndr_state state;
    std::vector<ndr::trace_event> events;
    std::vector<ndr::trace_event>* sink = i < traced ? &events : nullptr;
    for (std::uint64_t k = 0; k < s.cfg.horizon; ++k) engine.advance(state, r, sink);

    std::uint64_t mistakes = 0;
    for (const auto& c : state.claims()) {
      if (s.systems.classify(c.q) != c.v) ++mistakes;
    }
    stats.total_claims += state.claims().size();
    stats.mistaken_claims += mistakes;
    if (mistakes == 0) ++stats.mistake_free_replicas;
    if (ndr::is_non_repeating(state.claims())) ++stats.non_repeating_replicas;

    if (i < traced) {
      finals.push_back(ndr::encode_list(state.claims()));
      for (const auto& e : events) {
        trace << i << "\t" << ndr::trace_event_line(e) << "\n";
      }
    }
  }

  const double mistake_rate =
      stats.total_claims > 0
          ? static_cast<double>(stats.mistaken_claims) / static_cast<double>(stats.total_claims)
          : 0.0;

  std::ostringstream summary;
  summary << std::setprecision(12);
  const bool csv = s.cfg.format == "csv";
  auto row = [&](const std::string& key, const auto& value) {
    if (csv) {
      summary << key << "," << value << "\n";
    } else {
      summary << key << ": " << value << "\n";
    }
  };
  if (csv) summary << "metric,value\n";
  row("replicas", s.cfg.replicas);
  row("horizon", s.cfg.horizon);
  row("seed", s.cfg.seed);
  row("total_claims", stats.total_claims);
  row("mistaken_claims", stats.mistaken_claims);
  row("mistake_rate", mistake_rate);
  row("mistake_free_replicas", stats.mistake_free_replicas);
  row("non_repeating_replicas", stats.non_repeating_replicas);
  for (std::uint64_t i = 0; i < finals.size(); ++i) {
    row("final_list_" + std::to_string(i), render_outcome(finals[i]));
  }

  write_file(s.cfg.out_dir, "trace.tsv", trace.str());
  write_file(s.cfg.out_dir, csv ? "summary.csv" : "summary.txt", summary.str());
  write_effective_config(s);
  std::cout << "simulate: " << s.cfg.replicas << " replicas, horizon " << s.cfg.horizon
            << ", mistake rate " << mistake_rate << "\n";
  return 0;
}

}  // namespace ndrcli
