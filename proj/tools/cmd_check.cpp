#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/bayes.hpp"
#include "ndr/errors.hpp"

namespace ndrcli {

int cmd_check(const global_options& g) {
  session s = open_session(g);
  const auto& section = s.cfg.check;
  std::ostringstream report;
  report << std::setprecision(12);
  int rc = 0;

  const bool run_abduction = section.suite == "abduction" || section.suite == "both";
  const bool run_proofpath = section.suite == "proofpath" || section.suite == "both";

  if (run_abduction) {
    auto rep = ndr::run_abduction_suite(section.abduction_trials, s.cfg.seed);
    report << "abduction suite: trials " << rep.trials << ", failures " << rep.failures << ", "
           << (rep.passed() ? "pass" : "FAIL") << "\n";
    if (!rep.first_failure.empty()) report << "  first failure: " << rep.first_failure << "\n";
    if (!rep.passed()) rc = 1;
  }
  if (run_proofpath) {
    auto rep = ndr::run_proofpath_suite(section.proofpath_trials, s.cfg.seed);
    report << "proofpath suite: trials " << rep.trials << ", failures " << rep.failures
           << ", max product error " << rep.max_product_error << ", max ratio error "
           << rep.max_ratio_error << ", " << (rep.passed() ? "pass" : "FAIL") << "\n";
    if (!rep.first_failure.empty()) report << "  first failure: " << rep.first_failure << "\n";
    if (!rep.passed()) rc = 1;
  }

  if (!section.joint_file.empty()) {
    ndr::claim_joint joint = ndr::claim_joint::load(resolve_near_config(g, section.joint_file));
    report << "joint file: " << section.joint_file << " (" << joint.outcomes().size()
           << " outcomes)\n";
    if (!section.question.empty() && !section.question2.empty()) {
      const ndr::question q = ndr::decode_question(section.question);
      const ndr::question q2 = ndr::decode_question(section.question2);
      auto rep = ndr::check_abduction(joint, q, q2);
      ndr::write_abduction_report(report, rep, q, q2);
      if (!rep.consistent()) rc = 1;
    }
    if (!section.paths.empty()) {
      if (section.question.empty()) {
        throw ndr::invalid_config("check: proof paths on a joint need check.question");
      }
      const ndr::question q = ndr::decode_question(section.question);
      std::vector<ndr::claims_set> paths;
      for (const auto& p : section.paths) paths.push_back(ndr::decode_set(p));
      auto rep = ndr::proof_path_coefficients(joint, q, paths);
      ndr::write_proof_path_report(report, rep);
      const double direct = rep.steps.empty() ? rep.base_posterior : rep.steps.back().posterior;
      const double err = std::abs(ndr::posterior_product(rep) - direct);
      report << "product identity error: " << err << "\n";
      if (err >= 1e-10) rc = 1;
      if (ndr::monotonicity_check(rep) == ndr::monotonicity::violated) rc = 1;
    }
  }

  if (!run_abduction && !run_proofpath && section.joint_file.empty()) {
    throw ndr::invalid_config("check: nothing to do; set check.suite or check.joint_file");
  }

  report << "status: " << (rc == 0 ? "pass" : "FAIL") << "\n";
  write_file(s.cfg.out_dir, "check_report.txt", report.str());
  write_effective_config(s);
  std::cout << report.str();
  return rc;
}

}  // namespace ndrcli
