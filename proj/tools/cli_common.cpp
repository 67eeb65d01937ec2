#include "cli_common.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ndr/errors.hpp"

namespace ndrcli {

unsigned resolve_threads(unsigned cfg_threads) {
  if (cfg_threads > 0) return cfg_threads;
  if (const char* env = std::getenv("NDR_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && parsed > 0 && parsed <= 1024) {
      return static_cast<unsigned>(parsed);
    }
  }
  return 1;
}

session open_session(const global_options& g) {
  if (g.config_path.empty()) {
    throw ndr::invalid_config("this command needs --config");
  }
  session s;
  s.cfg = ndr::experiment_config::load(g.config_path);
  if (g.seed) s.cfg.seed = *g.seed;
  if (!g.out_dir.empty()) s.cfg.out_dir = g.out_dir;
  if (!g.format.empty()) s.cfg.format = g.format;
  s.cfg.validate_shape();

  s.systems = ndr::system_set::builtins();
  const std::filesystem::path base = std::filesystem::path(g.config_path).parent_path();
  for (const auto& file : s.cfg.system_files) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = base / p;
    s.systems.add(ndr::formal_system::load(p));
  }
  s.cfg.ndr.validate(s.systems);
  s.threads = resolve_threads(s.cfg.threads);
  return s;
}

std::string resolve_near_config(const global_options& g, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_absolute()) return file;
  return (std::filesystem::path(g.config_path).parent_path() / p).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ndr::invalid_config("cannot create output directory '" + dir + "': " + ec.message());
  }
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  ensure_out_dir(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ndr::invalid_config("cannot open '" + path.string() + "' for writing");
  out << content;
}

void write_effective_config(const session& s) {
  write_file(s.cfg.out_dir, "effective_config.json", s.cfg.to_json_text());
}

std::string render_outcome(const std::string& key) {
  return key.empty() ? std::string(ndr::empty_outcome_key) : key;
}

}  // namespace ndrcli
