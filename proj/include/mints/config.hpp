#ifndef MINTS_CONFIG_HPP
#define MINTS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mints {

inline constexpr const char* kVersion = "0.1.0";

// Flat namespaced key-value configuration with precedence
// defaults < config file < command-line overrides. Unknown keys are
// rejected against the registered defaults.
class Config {
 public:
  void set_default(const std::string& key, const std::string& value);
  void load_file(const std::string& path);           // `key = value` lines, # comments
  void set_override(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // Canonical `key=value` serialization of the resolved configuration.
  std::string snapshot() const;
  std::uint64_t hash() const; // FNV-1a over the snapshot

 private:
  void check_known(const std::string& key, const std::string& source) const;
  std::map<std::string, std::string> defaults_;
  std::map<std::string, std::string> resolved_;
};

// Writes content to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

// Standard first line of every output file: version, seed, config hash.
std::string file_header(std::uint64_t seed, std::uint64_t config_hash);

} // namespace mints

#endif
