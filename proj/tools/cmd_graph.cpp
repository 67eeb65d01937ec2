#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/errors.hpp"
#include "ndr/ndr_machine.hpp"

namespace ndrcli {

namespace {

struct edge_key {
  std::string from;
  std::string to;
  std::string kind;
  auto operator<=>(const edge_key&) const = default;
};

}  // namespace

// Rebuilds claims-tape trajectories from a simulate trace and emits the
// transition graph: one node per observed tape, edges labeled append (claims
// added only), delete (at least one claim removed), or none (no change).
int cmd_graph(const global_options& g, const std::string& trace_path, std::uint64_t horizon) {
  std::ifstream in(trace_path);
  if (!in) throw ndr::parse_error(trace_path, 0, "cannot open trace file");

  std::map<std::uint64_t, std::vector<ndr::trace_event>> by_replica;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t max_iteration = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("replica\t", 0) == 0) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ndr::parse_error(trace_path, lineno, "missing replica");
    std::uint64_t replica = 0;
    try {
      replica = std::stoull(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ndr::parse_error(trace_path, lineno, "bad replica number");
    }
    ndr::trace_event event;
    try {
      event = ndr::parse_trace_event(std::string_view(line).substr(tab + 1));
    } catch (const ndr::error& e) {
      throw ndr::parse_error(trace_path, lineno, e.what());
    }
    max_iteration = std::max(max_iteration, event.iteration);
    by_replica[replica].push_back(event);
  }
  if (horizon == 0) horizon = max_iteration;

  std::map<edge_key, std::uint64_t> edges;
  std::map<std::string, std::uint64_t> out_totals;
  for (auto& [replica, events] : by_replica) {
    (void)replica;
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
    ndr::claims_list tape;
    std::size_t next = 0;
    for (std::uint64_t it = 1; it <= horizon; ++it) {
      const std::string from = ndr::encode_list(tape);
      bool added = false;
      bool removed = false;
      while (next < events.size() && events[next].iteration == it) {
        const auto& e = events[next];
        if (e.kind == ndr::trace_kind::claim_added) {
          tape.push_back(ndr::claim{e.q, *e.v});
          added = true;
        } else if (e.kind == ndr::trace_kind::claim_removed) {
          if (!e.index || *e.index >= tape.size()) {
            throw ndr::parse_error(trace_path, 0, "removal index out of range in trace");
          }
          tape.erase(tape.begin() + static_cast<std::ptrdiff_t>(*e.index));
          removed = true;
        }
        ++next;
      }
      const std::string to = ndr::encode_list(tape);
      const std::string kind = removed ? "delete" : (added ? "append" : "none");
      ++edges[edge_key{from, to, kind}];
      ++out_totals[from];
    }
    if (next < events.size()) {
      throw ndr::parse_error(trace_path, 0, "trace has events beyond the stated horizon");
    }
  }

  std::ostringstream out;
  out << std::setprecision(12);
  out << "from\tto\tkind\tcount\tprobability\n";
  for (const auto& [key, count] : edges) {
    out << render_outcome(key.from) << "\t" << render_outcome(key.to) << "\t" << key.kind << "\t"
        << count << "\t"
        << static_cast<double>(count) / static_cast<double>(out_totals.at(key.from)) << "\n";
  }

  const std::string dir = g.out_dir.empty() ? "out" : g.out_dir;
  write_file(dir, "graph.tsv", out.str());
  std::cout << "graph: " << by_replica.size() << " trajectorie(s), " << edges.size()
            << " edge(s), horizon " << horizon << "\n";
  return 0;
}

}  // namespace ndrcli
