#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "cdnarms/error.hpp"
#include "cdnarms/layers.hpp"

namespace cdnarms::cli {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Flat "section.key = value" settings read from an INI file and overridden
/// by command line flags. Every value a command reads is recorded together
/// with where it came from, so outputs can echo the defaults they applied.
class Settings {
 public:
  enum class Source { file, flag, fallback };

  struct Applied {
    std::string key;
    std::string value;
    Source source;
  };

  Settings() = default;
  static Settings fromFile(const std::filesystem::path& path);
  static Settings fromString(const std::string& ini);

  void set(const std::string& key, const std::string& value);  // flag override

  std::string text(const std::string& key, const std::string& fallback);
  std::optional<std::string> text(const std::string& key);
  double real(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  bool flag(const std::string& key, bool fallback);
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  Interval interval(const std::string& key, Interval fallback);
  /// Keys of one section present in the file or flags.
  std::vector<std::string> keysIn(const std::string& section) const;

  /// Throws ConfigError naming every file key no command read.
  void rejectUnused() const;

  const std::vector<Applied>& applied() const noexcept { return applied_; }
  nlohmann::ordered_json toJson() const;
  /// One "# key = value (source)" line per applied setting.
  void writeHeader(std::ostream& out) const;

 private:
  std::optional<std::string> lookup(const std::string& key);
  void record(const std::string& key, const std::string& value, Source source);

  std::map<std::string, std::string> file_;
  std::map<std::string, std::string> flags_;
  std::set<std::string> used_;
  std::vector<Applied> applied_;
};

std::string formatReal(double v);

}  // namespace cdnarms::cli
