#include "ndr/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "ndr/claims.hpp"
#include "ndr/errors.hpp"

namespace ndr {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw invalid_config("config " + where + ": " + what);
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) bad(where, "unknown key '" + key + "'");
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::uint64_t get_u64(const json& obj, const std::string& key, std::uint64_t fallback,
                      const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) bad(where + "." + key, "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

unsigned get_unsigned(const json& obj, const std::string& key, unsigned fallback,
                      const std::string& where) {
  return static_cast<unsigned>(get_u64(obj, key, fallback, where));
}

double get_double(const json& obj, const std::string& key, double fallback,
                  const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) bad(where + "." + key, "expected a number");
  return v->get<double>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) bad(where + "." + key, "expected a string");
  return v->get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) bad(where + "." + key, "expected true or false");
  return v->get<bool>();
}

std::vector<std::string> get_string_array(const json& obj, const std::string& key,
                                          const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return {};
  if (!v->is_array()) bad(where + "." + key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *v) {
    if (!item.is_string()) bad(where + "." + key, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

question parse_question_field(const std::string& text, const std::string& where) {
  try {
    return decode_question(text);
  } catch (const error& e) {
    bad(where, std::string("bad question '") + text + "': " + e.what());
  }
}

policy_spec parse_policy(const json& obj, const std::string& where) {
  check_keys(obj, {"kind", "count", "wff_weight", "questions", "dependents"}, where);
  policy_spec p;
  p.kind = get_string(obj, "kind", p.kind, where);
  p.count = static_cast<std::uint32_t>(get_u64(obj, "count", p.count, where));
  p.wff_weight = get_double(obj, "wff_weight", p.wff_weight, where);
  for (const auto& text : get_string_array(obj, "questions", where)) {
    p.questions.push_back(parse_question_field(text, where + ".questions"));
  }
  if (const json* deps = find(obj, "dependents")) {
    if (!deps->is_object()) bad(where + ".dependents", "expected an object");
    for (const auto& [key, value] : deps->items()) {
      question trigger = parse_question_field(key, where + ".dependents");
      if (!value.is_array()) bad(where + ".dependents", "expected arrays of questions");
      std::vector<question> helped;
      for (const auto& item : value) {
        if (!item.is_string()) bad(where + ".dependents", "expected arrays of questions");
        helped.push_back(parse_question_field(item.get<std::string>(), where + ".dependents"));
      }
      p.dependents[trigger] = std::move(helped);
    }
  }
  return p;
}

json policy_to_json(const policy_spec& p) {
  json obj;
  obj["kind"] = p.kind;
  obj["count"] = p.count;
  obj["wff_weight"] = p.wff_weight;
  json questions = json::array();
  for (const auto& q : p.questions) questions.push_back(encode_question(q));
  obj["questions"] = std::move(questions);
  json deps = json::object();
  for (const auto& [trigger, helped] : p.dependents) {
    json arr = json::array();
    for (const auto& q : helped) arr.push_back(encode_question(q));
    deps[encode_question(trigger)] = std::move(arr);
  }
  obj["dependents"] = std::move(deps);
  return obj;
}

ndr_config parse_ndr(const json& obj, const std::string& where) {
  check_keys(obj,
             {"systems", "policy", "kernel", "removal_rate", "max_string_len",
              "enforce_non_repeating"},
             where);
  ndr_config cfg;
  cfg.systems = get_string_array(obj, "systems", where);
  if (const json* policy = find(obj, "policy")) {
    if (!policy->is_object()) bad(where + ".policy", "expected an object");
    cfg.policy = parse_policy(*policy, where + ".policy");
  }
  if (const json* kernel = find(obj, "kernel")) {
    if (!kernel->is_object()) bad(where + ".kernel", "expected an object");
    check_keys(*kernel, {"solve_rate", "noise_rate"}, where + ".kernel");
    cfg.kernel.solve_rate =
        get_double(*kernel, "solve_rate", cfg.kernel.solve_rate, where + ".kernel");
    cfg.kernel.noise_rate =
        get_double(*kernel, "noise_rate", cfg.kernel.noise_rate, where + ".kernel");
  }
  cfg.removal_rate = get_double(obj, "removal_rate", cfg.removal_rate, where);
  cfg.max_string_len = get_unsigned(obj, "max_string_len", cfg.max_string_len, where);
  cfg.enforce_non_repeating =
      get_bool(obj, "enforce_non_repeating", cfg.enforce_non_repeating, where);
  return cfg;
}

json ndr_to_json(const ndr_config& cfg) {
  json obj;
  obj["systems"] = cfg.systems;
  obj["policy"] = policy_to_json(cfg.policy);
  obj["kernel"] = {{"solve_rate", cfg.kernel.solve_rate}, {"noise_rate", cfg.kernel.noise_rate}};
  obj["removal_rate"] = cfg.removal_rate;
  obj["max_string_len"] = cfg.max_string_len;
  obj["enforce_non_repeating"] = cfg.enforce_non_repeating;
  return obj;
}

estimate_request parse_estimate(const json& obj, const std::string& where) {
  check_keys(obj, {"type", "n", "question", "conditioning", "through", "set"}, where);
  estimate_request req;
  req.type = get_string(obj, "type", "", where);
  req.n = get_unsigned(obj, "n", req.n, where);
  req.question = get_string(obj, "question", "", where);
  req.conditioning = get_string(obj, "conditioning", "", where);
  req.through = get_string(obj, "through", "", where);
  req.set = get_string(obj, "set", "", where);
  return req;
}

json estimate_to_json(const estimate_request& req) {
  json obj;
  obj["type"] = req.type;
  obj["n"] = req.n;
  obj["question"] = req.question;
  obj["conditioning"] = req.conditioning;
  obj["through"] = req.through;
  obj["set"] = req.set;
  return obj;
}

check_section parse_check(const json& obj, const std::string& where) {
  check_keys(obj,
             {"suite", "abduction_trials", "proofpath_trials", "joint_file", "question",
              "question2", "paths"},
             where);
  check_section c;
  c.suite = get_string(obj, "suite", c.suite, where);
  c.abduction_trials = get_u64(obj, "abduction_trials", c.abduction_trials, where);
  c.proofpath_trials = get_u64(obj, "proofpath_trials", c.proofpath_trials, where);
  c.joint_file = get_string(obj, "joint_file", c.joint_file, where);
  c.question = get_string(obj, "question", c.question, where);
  c.question2 = get_string(obj, "question2", c.question2, where);
  c.paths = get_string_array(obj, "paths", where);
  return c;
}

json check_to_json(const check_section& c) {
  json obj;
  obj["suite"] = c.suite;
  obj["abduction_trials"] = c.abduction_trials;
  obj["proofpath_trials"] = c.proofpath_trials;
  obj["joint_file"] = c.joint_file;
  obj["question"] = c.question;
  obj["question2"] = c.question2;
  obj["paths"] = c.paths;
  return obj;
}

mmh_section parse_mmh(const json& obj, const std::string& where) {
  check_keys(obj,
             {"action", "bound", "probe_replicas", "generator", "measure_file", "machine_file",
              "max_input_len", "step_budget", "decoding", "restrict_mistake_free"},
             where);
  mmh_section m;
  m.action = get_string(obj, "action", m.action, where);
  m.bound = get_unsigned(obj, "bound", m.bound, where);
  m.probe_replicas = get_u64(obj, "probe_replicas", m.probe_replicas, where);
  m.generator = get_string(obj, "generator", m.generator, where);
  m.measure_file = get_string(obj, "measure_file", m.measure_file, where);
  m.machine_file = get_string(obj, "machine_file", m.machine_file, where);
  m.max_input_len = get_unsigned(obj, "max_input_len", m.max_input_len, where);
  m.step_budget = get_u64(obj, "step_budget", m.step_budget, where);
  if (const json* table = find(obj, "decoding")) {
    if (!table->is_object()) bad(where + ".decoding", "expected an object");
    for (const auto& [program, value] : table->items()) {
      if (!value.is_object()) bad(where + ".decoding", "expected instance objects");
      check_keys(value, {"system", "set", "horizon", "maximal"},
                 where + ".decoding." + program);
      decoded_instance inst;
      inst.system = get_string(value, "system", "", where + ".decoding." + program);
      inst.set = get_string(value, "set", "", where + ".decoding." + program);
      inst.horizon = get_u64(value, "horizon", 0, where + ".decoding." + program);
      inst.maximal = get_bool(value, "maximal", false, where + ".decoding." + program);
      m.decoding[program] = std::move(inst);
    }
  }
  m.restrict_mistake_free =
      get_bool(obj, "restrict_mistake_free", m.restrict_mistake_free, where);
  return m;
}

json mmh_to_json(const mmh_section& m) {
  json obj;
  obj["action"] = m.action;
  obj["bound"] = m.bound;
  obj["probe_replicas"] = m.probe_replicas;
  obj["generator"] = m.generator;
  obj["measure_file"] = m.measure_file;
  obj["machine_file"] = m.machine_file;
  obj["max_input_len"] = m.max_input_len;
  obj["step_budget"] = m.step_budget;
  json table = json::object();
  for (const auto& [program, inst] : m.decoding) {
    table[program] = {{"system", inst.system},
                      {"set", inst.set},
                      {"horizon", inst.horizon},
                      {"maximal", inst.maximal}};
  }
  obj["decoding"] = std::move(table);
  obj["restrict_mistake_free"] = m.restrict_mistake_free;
  return obj;
}

void check_encoded_set(const std::string& text, const std::string& where) {
  if (text.empty() || text == "(empty)") return;
  try {
    decode_set(text);
  } catch (const error& e) {
    bad(where, std::string("bad claims set '") + text + "': " + e.what());
  }
}

void check_encoded_list(const std::string& text, const std::string& where) {
  if (text.empty() || text == "(empty)") return;
  try {
    decode_list(text);
  } catch (const error& e) {
    bad(where, std::string("bad claims list '") + text + "': " + e.what());
  }
}

}  // namespace

void experiment_config::validate_shape() const {
  if (format != "csv" && format != "text") bad("format", "must be csv or text");
  if (horizon == 0) bad("horizon", "must be at least 1");
  if (replicas == 0) bad("replicas", "must be at least 1");
  if (ndr.kernel.solve_rate < 0.0 || ndr.kernel.solve_rate > 1.0) {
    bad("ndr.kernel.solve_rate", "must lie in [0,1]");
  }
  if (ndr.kernel.noise_rate < 0.0 || ndr.kernel.noise_rate > 1.0) {
    bad("ndr.kernel.noise_rate", "must lie in [0,1]");
  }
  if (ndr.removal_rate < 0.0 || ndr.removal_rate > 1.0) {
    bad("ndr.removal_rate", "must lie in [0,1]");
  }
  static const std::vector<std::string> kinds = {"uniform", "wff-biased", "breakthrough-greedy",
                                                 "exhaustive", "fixed-list"};
  if (std::find(kinds.begin(), kinds.end(), ndr.policy.kind) == kinds.end()) {
    bad("ndr.policy.kind", "unknown policy '" + ndr.policy.kind + "'");
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& req = estimates[i];
    const std::string where = "estimates[" + std::to_string(i) + "]";
    static const std::vector<std::string> types = {"pk",         "answer",      "generalized",
                                                   "claims",     "list-claims", "list-answer",
                                                   "maximal"};
    if (std::find(types.begin(), types.end(), req.type) == types.end()) {
      bad(where + ".type", "unknown estimate '" + req.type + "'");
    }
    if (req.type == "pk" && req.n == 0) bad(where + ".n", "prefix length must be at least 1");
    if (req.type == "answer" || req.type == "generalized" || req.type == "list-answer") {
      if (req.question.empty()) bad(where + ".question", "required for this estimate");
      parse_question_field(req.question, where + ".question");
    }
    check_encoded_set(req.conditioning, where + ".conditioning");
    check_encoded_set(req.set, where + ".set");
    check_encoded_list(req.through, where + ".through");
    if (req.type == "claims" && req.set.empty()) bad(where + ".set", "required for this estimate");
  }
  if (check.suite != "" && check.suite != "abduction" && check.suite != "proofpath" &&
      check.suite != "both") {
    bad("check.suite", "must be abduction, proofpath, or both");
  }
  if (!check.question.empty()) parse_question_field(check.question, "check.question");
  if (!check.question2.empty()) parse_question_field(check.question2, "check.question2");
  for (const auto& p : check.paths) check_encoded_set(p, "check.paths");
  if (mmh.action != "" && mmh.action != "world" && mmh.action != "instance" &&
      mmh.action != "measure") {
    bad("mmh.action", "must be world, instance, or measure");
  }
  if (mmh.action == "measure" && mmh.generator != "explicit-weights" &&
      mmh.generator != "ndr-machine-sampled" && mmh.generator != "coinflip-program-induced") {
    bad("mmh.generator",
        "must be explicit-weights, ndr-machine-sampled, or coinflip-program-induced");
  }
  for (const auto& [program, inst] : mmh.decoding) {
    check_encoded_set(inst.set, "mmh.decoding." + program + ".set");
  }
}

experiment_config experiment_config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str(), path);
}

experiment_config experiment_config::from_json_text(const std::string& text,
                                                    const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(source_name, 0, e.what());
  }
  if (!root.is_object()) throw parse_error(source_name, 0, "config must be a JSON object");
  try {
    check_keys(root,
               {"ndr", "system_files", "horizon", "replicas", "seed", "trace_replicas",
                "threads", "out", "format", "estimates", "exact", "check", "mmh"},
               "top level");
    experiment_config cfg;
    if (const json* ndr_obj = find(root, "ndr")) {
      if (!ndr_obj->is_object()) bad("ndr", "expected an object");
      cfg.ndr = parse_ndr(*ndr_obj, "ndr");
    }
    cfg.system_files = get_string_array(root, "system_files", "top level");
    cfg.horizon = get_u64(root, "horizon", cfg.horizon, "top level");
    cfg.replicas = get_u64(root, "replicas", cfg.replicas, "top level");
    cfg.seed = get_u64(root, "seed", cfg.seed, "top level");
    cfg.trace_replicas = get_u64(root, "trace_replicas", cfg.trace_replicas, "top level");
    cfg.threads = get_unsigned(root, "threads", cfg.threads, "top level");
    cfg.out_dir = get_string(root, "out", cfg.out_dir, "top level");
    cfg.format = get_string(root, "format", cfg.format, "top level");
    if (const json* estimates = find(root, "estimates")) {
      if (!estimates->is_array()) bad("estimates", "expected an array");
      std::size_t i = 0;
      for (const auto& item : *estimates) {
        if (!item.is_object()) bad("estimates", "expected objects");
        cfg.estimates.push_back(parse_estimate(item, "estimates[" + std::to_string(i) + "]"));
        ++i;
      }
    }
    if (const json* exact = find(root, "exact")) {
      if (!exact->is_object()) bad("exact", "expected an object");
      check_keys(*exact, {"enabled", "max_states"}, "exact");
      cfg.exact_enabled = get_bool(*exact, "enabled", cfg.exact_enabled, "exact");
      cfg.exact_max_states =
          static_cast<std::size_t>(get_u64(*exact, "max_states", cfg.exact_max_states, "exact"));
    }
    if (const json* check = find(root, "check")) {
      if (!check->is_object()) bad("check", "expected an object");
      cfg.check = parse_check(*check, "check");
    }
    if (const json* mmh_obj = find(root, "mmh")) {
      if (!mmh_obj->is_object()) bad("mmh", "expected an object");
      cfg.mmh = parse_mmh(*mmh_obj, "mmh");
    }
    cfg.validate_shape();
    return cfg;
  } catch (const invalid_config& e) {
    throw parse_error(source_name, 0, e.what());
  }
}

std::string experiment_config::to_json_text() const {
  json root;
  root["ndr"] = ndr_to_json(ndr);
  root["system_files"] = system_files;
  root["horizon"] = horizon;
  root["replicas"] = replicas;
  root["seed"] = seed;
  root["trace_replicas"] = trace_replicas;
  root["threads"] = threads;
  root["out"] = out_dir;
  root["format"] = format;
  json estimates_json = json::array();
  for (const auto& req : estimates) estimates_json.push_back(estimate_to_json(req));
  root["estimates"] = std::move(estimates_json);
  root["exact"] = {{"enabled", exact_enabled}, {"max_states", exact_max_states}};
  root["check"] = check_to_json(check);
  root["mmh"] = mmh_to_json(mmh);
  return root.dump(2) + "\n";
}

void experiment_config::save(std::ostream& out) const { out << to_json_text(); }

}  // namespace ndr
