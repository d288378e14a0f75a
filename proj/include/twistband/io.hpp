#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistband/common.hpp"

namespace twistband {

/// 17 significant digits: enough to round-trip any double exactly, so rerun
/// outputs are byte-identical.
inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(16);  // 17 significant digits in scientific notation
  os << std::scientific << v;
  return os.str();
}

struct CsvWriter {
  std::ostringstream buf;
  std::size_t columns = 0;
  std::size_t cursor = 0;

  explicit CsvWriter(const std::vector<std::string>& header) {
    columns = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
      buf << (i ? "," : "") << header[i];
    buf << "\n";
  }
  CsvWriter& cell(const std::string& v) {
    buf << (cursor++ ? "," : "") << v;
    if (cursor == columns) {
      buf << "\n";
      cursor = 0;
    }
    return *this;
  }
  CsvWriter& cell(double v) { return cell(format_double(v)); }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }
  std::string str() const {
    require(cursor == 0, "CsvWriter: unterminated row");
    return buf.str();
  }
};

/// FNV-1a over the byte content; cheap, dependency-free, stable across runs.
inline std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << "fnv1a:" << std::hex << h;
  return os.str();
}

struct RunManifest {
  std::string tool_version = "twistband 1.0.0";
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json fitted = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> outputs;  // name, digest

  void record_output(const std::string& name, const std::string& bytes) {
    outputs.emplace_back(name, content_digest(bytes));
  }

  nlohmann::json json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["config"] = config;
    j["timings_ms"] = timings;
    j["fitted_constants"] = fitted;
    j["warnings"] = warnings;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, digest] : outputs)
      files.push_back({{"file", name}, {"digest", digest}});
    j["outputs"] = files;
    return j;
  }
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot open for writing: " + path.string());
  os << bytes;
  require(static_cast<bool>(os), "write failed: " + path.string());
}

/// Flat key = value configuration with optional [section] headers; section
/// names are folded into the key as "section.key". '#' starts a comment.
struct Config {
  std::map<std::string, std::string> kv;

  static Config parse(std::istream& is) {
    Config c;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        require(line.back() == ']',
                "config line " + std::to_string(lineno) + ": bad section");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      require(eq != std::string::npos,
              "config line " + std::to_string(lineno) + ": expected key=value");
      std::string key = trim(line.substr(0, eq));
      require(!key.empty(),
              "config line " + std::to_string(lineno) + ": empty key");
      if (!section.empty()) key = section + "." + key;
      c.kv[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static Config parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open config: " + path.string());
    return parse(is);
  }

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      require(pos == it->second.size(), "trailing junk");
      return v;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': not a number: '" +
                         it->second + "'");
    }
  }

  int get_int(const std::string& key, int fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      std::size_t pos = 0;
      int v = std::stoi(it->second, &pos);
      require(pos == it->second.size(), "trailing junk");
      return v;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': not an integer: '" +
                         it->second + "'");
    }
  }
};

/// Comma-separated doubles, e.g. "0.1,0.05,0.025".
inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw config_error("bad number in list: '" + item + "'");
    }
  }
  require(!out.empty(), "empty number list");
  return out;
}

}  // namespace twistband
