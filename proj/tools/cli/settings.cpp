#include "cli/settings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace cdnarms::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parseReal(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": '" + raw + "' is not a number");
  }
  return v;
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

std::string formatReal(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Settings Settings::fromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return fromString(buffer.str());
}

Settings Settings::fromString(const std::string& ini) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  Settings out;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) out.file_[section + "." + key] = trim(value.data());
  }
  return out;
}

void Settings::set(const std::string& key, const std::string& value) { flags_[key] = value; }

std::optional<std::string> Settings::lookup(const std::string& key) {
  used_.insert(key);
  if (auto it = flags_.find(key); it != flags_.end()) {
    record(key, it->second, Source::flag);
    return it->second;
  }
  if (auto it = file_.find(key); it != file_.end()) {
    record(key, it->second, Source::file);
    return it->second;
  }
  return std::nullopt;
}

void Settings::record(const std::string& key, const std::string& value, Source source) {
  auto it = std::find_if(applied_.begin(), applied_.end(),
                         [&](const Applied& a) { return a.key == key; });
  if (it == applied_.end()) {
    applied_.push_back({key, value, source});
  } else {
    *it = {key, value, source};
  }
}

std::optional<std::string> Settings::text(const std::string& key) { return lookup(key); }

std::string Settings::text(const std::string& key, const std::string& fallback) {
  if (auto v = lookup(key)) return *v;
  record(key, fallback, Source::fallback);
  return fallback;
}

double Settings::real(const std::string& key, double fallback) {
  if (auto v = lookup(key)) return parseReal(key, *v);
  record(key, formatReal(fallback), Source::fallback);
  return fallback;
}

long Settings::integer(const std::string& key, long fallback) {
  if (auto v = lookup(key)) {
    const std::string s = trim(*v);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError(key + ": '" + *v + "' is not an integer");
    }
    return out;
  }
  record(key, std::to_string(fallback), Source::fallback);
  return fallback;
}

bool Settings::flag(const std::string& key, bool fallback) {
  if (auto v = lookup(key)) {
    std::string s = trim(*v);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError(key + ": '" + *v + "' is not a boolean");
  }
  record(key, fallback ? "true" : "false", Source::fallback);
  return fallback;
}

std::vector<double> Settings::reals(const std::string& key, const std::vector<double>& fallback) {
  if (auto v = lookup(key)) {
    std::vector<double> out;
    for (const auto& item : splitList(*v)) out.push_back(parseReal(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
  }
  std::string joined;
  for (double d : fallback) joined += (joined.empty() ? "" : ",") + formatReal(d);
  record(key, joined, Source::fallback);
  return fallback;
}

Interval Settings::interval(const std::string& key, Interval fallback) {
  if (auto v = lookup(key)) {
    const auto items = splitList(*v);
    if (items.size() != 2) throw ConfigError(key + ": expected 'lower, upper'");
    Interval out{parseReal(key, items[0]), parseReal(key, items[1])};
    if (!(out.lower <= out.upper)) throw ConfigError(key + ": lower bound exceeds upper bound");
    return out;
  }
  record(key, formatReal(fallback.lower) + "," + formatReal(fallback.upper), Source::fallback);
  return fallback;
}

std::vector<std::string> Settings::keysIn(const std::string& section) const {
  std::set<std::string> keys;
  const std::string prefix = section + ".";
  for (const auto* m : {&file_, &flags_}) {
    for (const auto& [k, v] : *m) {
      if (k.rfind(prefix, 0) == 0) keys.insert(k.substr(prefix.size()));
    }
  }
  return {keys.begin(), keys.end()};
}

void Settings::rejectUnused() const {
  std::string unused;
  for (const auto& [k, v] : file_) {
    if (!used_.count(k)) unused += (unused.empty() ? "" : ", ") + k;
  }
  if (!unused.empty()) throw ConfigError("config: unused keys: " + unused);
}

nlohmann::ordered_json Settings::toJson() const {
  auto out = nlohmann::ordered_json::object();
  for (const auto& a : applied_) {
    out[a.key] = {{"value", a.value},
                  {"source", a.source == Source::file   ? "file"
                             : a.source == Source::flag ? "flag"
                                                        : "default"}};
  }
  return out;
}

void Settings::writeHeader(std::ostream& out) const {
  for (const auto& a : applied_) {
    out << "# " << a.key << " = " << a.value;
    if (a.source == Source::fallback) out << " (default)";
    if (a.source == Source::flag) out << " (flag)";
    out << '\n';
  }
}

}  // namespace cdnarms::cli
