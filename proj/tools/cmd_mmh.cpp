#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "ndr/claims.hpp"
#include "ndr/errors.hpp"
#include "ndr/mmh.hpp"
#include "ndr/tape_machine.hpp"

namespace ndrcli {
namespace {

ndr::claims_set decode_set_text(const std::string& text) {
  if (text.empty() || text == "(empty)") return ndr::claims_set{};
  return ndr::decode_set(text);
}

std::string instance_line(const ndr::world_instance& inst) {
  std::ostringstream line;
  line << "system " << inst.system << " horizon " << inst.horizon << " maximal "
       << (inst.maximal ? "yes" : "no") << " claims "
       << (inst.claims.items().empty() ? "(empty)" : ndr::encode_set(inst.claims));
  return line.str();
}

ndr::measure_spec spec_from_config(const session& s, const global_options& g) {
  const ndr::mmh_section& mmh = s.cfg.mmh;
  if (mmh.generator == "explicit-weights") {
    ndr::mmh_measure loaded = ndr::load_measure(resolve_near_config(g, mmh.measure_file));
    return ndr::explicit_weights_spec{std::move(loaded.support)};
  }
  if (mmh.generator == "ndr-machine-sampled") {
    return ndr::ndr_sampled_spec{s.cfg.ndr, s.options()};
  }
  if (mmh.generator == "coinflip-program-induced") {
    ndr::coinflip_spec spec{ndr::tape_machine::load(resolve_near_config(g, mmh.machine_file)),
                            mmh.max_input_len, mmh.step_budget, {}};
    for (const auto& [program, d] : mmh.decoding) {
      ndr::world_instance inst;
      inst.system = d.system;
      inst.claims = decode_set_text(d.set);
      inst.horizon = d.horizon;
      inst.maximal = d.maximal;
      spec.decoding.emplace(program, std::move(inst));
    }
    return spec;
  }
  throw ndr::invalid_config("mmh: unknown generator " + mmh.generator);
}

std::string stats_text(const ndr::measure_report& rep) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "support_size " << rep.support_size << "\n";
  out << "mistake_free_mass " << rep.mistake_free_mass << "\n";
  out << "entropy_bits " << rep.entropy_bits << "\n";
  for (const auto& [sys, mass] : rep.mass_per_system) {
    out << "mass " << sys << " " << mass << "\n";
  }
  return out.str();
}

}  // namespace

int cmd_mmh(const global_options& g) {
  session s = open_session(g);
  const ndr::mmh_section& mmh = s.cfg.mmh;
  if (mmh.action.empty()) {
    throw ndr::invalid_config("mmh: config has no mmh.action (world, instance, or measure)");
  }

  if (mmh.action == "world") {
    const ndr::ndr_world world =
        ndr::make_world(s.cfg.ndr, s.systems, mmh.bound, s.options());
    std::ostringstream out;
    ndr::save_world(out, world);
    write_file(s.cfg.out_dir, "world.txt", out.str());
    const bool mistake_free = ndr::classify_mistake_free(world, s.systems);
    std::cout << "world over " << world.system << ": " << world.answers.size()
              << " wff(s) up to length " << world.length_bound << ", mistake_free "
              << (mistake_free ? "yes" : "no") << "\n";
  } else if (mmh.action == "instance") {
    const ndr::world_instance inst = ndr::sample_world_instance(
        s.cfg.ndr, s.systems, s.cfg.horizon, s.cfg.seed, mmh.probe_replicas);
    const bool mistake_free = ndr::classify_mistake_free(inst, s.systems);
    std::ostringstream out;
    out << instance_line(inst) << " mistake_free " << (mistake_free ? "yes" : "no") << "\n";
    write_file(s.cfg.out_dir, "instance.txt", out.str());
    std::cout << out.str();
  } else {
    const ndr::measure_spec spec = spec_from_config(s, g);
    const ndr::mmh_measure measure = ndr::build_mmh_measure(spec, s.systems);
    {
      std::ostringstream out;
      ndr::save_measure(out, measure);
      write_file(s.cfg.out_dir, "measure.txt", out.str());
    }
    const ndr::measure_report rep = ndr::measure_statistics(measure, s.systems);
    write_file(s.cfg.out_dir, "mmh_stats.txt", stats_text(rep));
    std::cout << "measure (" << measure.generator << "): support " << rep.support_size
              << ", mistake_free_mass " << rep.mistake_free_mass << ", entropy_bits "
              << rep.entropy_bits << "\n";
    if (mmh.restrict_mistake_free) {
      const ndr::mmh_measure restricted = ndr::restrict_to_mistake_free(measure, s.systems);
      std::ostringstream out;
      ndr::save_measure(out, restricted);
      write_file(s.cfg.out_dir, "measure_restricted.txt", out.str());
      const ndr::measure_report rrep = ndr::measure_statistics(restricted, s.systems);
      std::cout << "restricted: support " << rrep.support_size << ", entropy_bits "
                << rrep.entropy_bits << "\n";
    }
  }

  write_effective_config(s);
  return 0;
}

}  // namespace ndrcli
