#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/errors.hpp"
#include "ndr/tape_machine.hpp"

namespace ndrcli {

int cmd_ptm(const global_options& g, const std::string& machine_path, const std::string& action,
            const std::string& input, unsigned max_len, std::uint64_t budget) {
  const ndr::tape_machine machine = ndr::tape_machine::load(machine_path);
  std::ostringstream out;
  out << std::setprecision(17);
  int rc = 0;

  if (action == "run") {
    ndr::run_outcome outcome = [&] {
      if (machine.deterministic()) return ndr::run(machine, input, budget);
      ndr::rng r(g.seed.value_or(0));
      return ndr::run(machine, input, budget, r);
    }();
    if (const auto* h = std::get_if<ndr::halted>(&outcome)) {
      out << "halted output " << (h->output.empty() ? "(empty)" : h->output) << " steps "
          << h->steps << "\n";
    } else {
      out << "budget_exhausted steps " << std::get<ndr::budget_exhausted>(outcome).steps << "\n";
    }
  } else if (action == "halting-set") {
    auto res = ndr::halting_set(machine, max_len, budget);
    out << "halting set of " << machine.name() << " up to length " << res.max_len << " (budget "
        << res.budget << ", truncated " << (res.truncated ? "yes" : "no") << ")\n";
    for (const auto& s : res.strings) out << (s.empty() ? "(empty)" : s) << "\n";
  } else if (action == "coinflip") {
    auto res = ndr::coin_flip_distribution(machine, max_len, budget);
    out << "omega " << res.omega << "\n";
    for (const auto& [s, p] : res.probabilities) {
      out << (s.empty() ? "(empty)" : s) << " " << p << "\n";
    }
  } else if (action == "check-prefix-free") {
    auto res = ndr::halting_set(machine, max_len, budget);
    const bool ok = ndr::check_prefix_free(res.strings);
    out << "prefix_free " << (ok ? "yes" : "no") << " over " << res.strings.size()
        << " string(s)\n";
    if (!ok) rc = 1;
  } else {
    throw ndr::invalid_config(
        "ptm: action must be run, halting-set, coinflip, or check-prefix-free");
  }

  std::cout << out.str();
  if (!g.out_dir.empty()) write_file(g.out_dir, "ptm_" + action + ".txt", out.str());
  return rc;
}

}  // namespace ndrcli
