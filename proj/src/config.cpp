#include "mints/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mints {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

} // namespace

void Config::set_default(const std::string& key, const std::string& value) {
  defaults_[key] = value;
  if (!resolved_.count(key)) resolved_[key] = value;
}

void Config::check_known(const std::string& key, const std::string& source) const {
  if (!defaults_.count(key))
    throw std::invalid_argument("unknown config key '" + key + "' (" + source + ")");
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    check_known(key, path);
    resolved_[key] = value;
  }
}

void Config::set_override(const std::string& key, const std::string& value) {
  check_known(key, "flag override");
  resolved_[key] = value;
}

bool Config::has(const std::string& key) const { return resolved_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = resolved_.find(key);
  if (it == resolved_.end()) throw std::invalid_argument("config key '" + key + "' not set");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected number, got '" + v + "'");
  }
}

long Config::get_long(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': expected boolean, got '" + v + "'");
}

std::string Config::snapshot() const {
  std::ostringstream out;
  for (const auto& [k, v] : resolved_) out << k << '=' << v << '\n';
  return out.str();
}

std::uint64_t Config::hash() const {
  const std::string s = snapshot();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

std::string file_header(std::uint64_t seed, std::uint64_t config_hash) {
  std::ostringstream out;
  out << "# mints " << kVersion << " seed=" << seed << " config=" << std::hex << config_hash;
  return out.str();
}

} // namespace mints
