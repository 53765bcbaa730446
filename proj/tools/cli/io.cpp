#include "cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cli/settings.hpp"

namespace cdnarms::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> splitRow(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parseCell(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

// JSON has no infinities; non-finite log-likelihoods are stored as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
double numberOr(const Json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

}  // namespace

IngestResult ingestCsv(const std::filesystem::path& path, const std::string& column,
                       Index historyRows) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (historyRows < 0) throw InvalidArgument("ingest: history rows must be >= 0");

  IngestResult out;
  std::optional<std::size_t> index;
  bool byName = false;
  {
    std::size_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(column.data(), column.data() + column.size(), parsed);
    if (!column.empty() && ec == std::errc() && ptr == column.data() + column.size()) {
      index = parsed;
    } else {
      byName = true;
    }
  }

  std::vector<double> values;
  std::string line;
  std::size_t lineNo = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto cells = splitRow(line);
    if (first) {
      first = false;
      if (byName) {
        const auto it = std::find(cells.begin(), cells.end(), column);
        if (it == cells.end()) {
          throw IoError(path.string() + ": line " + std::to_string(lineNo) + ": no column named '" +
                        column + "' in the header");
        }
        index = static_cast<std::size_t>(it - cells.begin());
        out.column = column;
        continue;
      }
      double probe = 0.0;
      if (*index < cells.size() && !parseCell(cells[*index], probe)) {
        out.column = cells[*index];  // header row
        continue;
      }
      out.column = std::to_string(*index);
    }
    if (*index >= cells.size() || cells[*index].empty()) {
      throw IoError(path.string() + ": line " + std::to_string(lineNo) + ": missing value in column " +
                    out.column);
    }
    double v = 0.0;
    if (!parseCell(cells[*index], v)) {
      throw IoError(path.string() + ": line " + std::to_string(lineNo) + ": non-numeric value '" +
                    cells[*index] + "' in column " + out.column);
    }
    values.push_back(v);
    if (*index != 0 && !cells.empty()) {
      if (out.firstLabel.empty()) out.firstLabel = cells[0];
      out.lastLabel = cells[0];
    }
  }
  if (values.empty()) throw IoError(path.string() + ": no data rows");
  if (static_cast<Index>(values.size()) <= historyRows) {
    throw IoError(path.string() + ": " + std::to_string(values.size()) +
                  " rows do not exceed the " + std::to_string(historyRows) + " history rows");
  }
  out.rows = values.size();
  const auto split = values.begin() + historyRows;
  out.series = TimeSeries(std::vector<double>(values.begin(), split),
                          std::vector<double>(split, values.end()));
  return out;
}

void writeSeriesCsv(const std::filesystem::path& path, const TimeSeries& series,
                    const std::vector<std::size_t>& regimes, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << header;
  out.precision(17);
  out << "x,t,regime\n";
  for (Index n = -series.historyLength(); n <= series.lastIndex(); ++n) {
    out << series[n] << ',' << n << ',';
    if (n >= 0 && static_cast<std::size_t>(n) < regimes.size()) {
      out << regimes[static_cast<std::size_t>(n)] + 1;
    }
    out << '\n';
  }
}

std::shared_ptr<const LayerDynamics> makeDynamics(const std::string& kind, std::size_t order) {
  if (kind == "ghil") return ghilDynamics();
  if (kind == "ar") return arDynamics(order);
  throw InvalidArgument("unknown layer kind '" + kind + "' (expected ghil or ar)");
}

Json modelToJson(const SwitchingModel& model) {
  Json j;
  j["step"] = model.step;
  j["transition"] = Json::array();
  for (Eigen::Index i = 0; i < model.chain.transition.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < model.chain.transition.cols(); ++k) {
      row.push_back(model.chain.transition(i, k));
    }
    j["transition"].push_back(row);
  }
  j["initial"] = std::vector<double>(model.chain.initial.data(),
                                     model.chain.initial.data() + model.chain.initial.size());
  j["layers"] = Json::array();
  for (const auto& layer : model.layers) {
    Json l;
    l["kind"] = layer.dynamics->kind();
    if (const auto* ar = dynamic_cast<const ArDynamics*>(layer.dynamics.get())) {
      l["order"] = ar->order();
    }
    Json params = Json::object();
    const auto& names = layer.dynamics->parameterNames();
    for (std::size_t k = 0; k < names.size(); ++k) params[names[k]] = layer.params[k];
    l["params"] = params;
    l["sigma"] = layer.sigma;
    l["delay"] = layer.delay;
    j["layers"].push_back(l);
  }
  return j;
}

SwitchingModel modelFromJson(const Json& j) {
  try {
    SwitchingModel model;
    model.step = j.at("step").get<double>();
    const auto& rows = j.at("transition");
    const auto L = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd M(L, L);
    for (Eigen::Index i = 0; i < L; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != L) {
        throw InvalidArgument("model: transition matrix is not square");
      }
      for (Eigen::Index k = 0; k < L; ++k) {
        M(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
      }
    }
    model.chain.transition = M;
    const auto initial = j.at("initial").get<std::vector<double>>();
    model.chain.initial = Eigen::Map<const Eigen::VectorXd>(initial.data(),
                                                            static_cast<Eigen::Index>(initial.size()));
    for (const auto& l : j.at("layers")) {
      LayerSpec layer;
      layer.dynamics = makeDynamics(l.at("kind").get<std::string>(), l.value("order", std::size_t{1}));
      const auto& params = l.at("params");
      for (const auto& name : layer.dynamics->parameterNames()) {
        layer.params.push_back(params.at(name).get<double>());
      }
      layer.sigma = l.at("sigma").get<double>();
      layer.delay = l.at("delay").get<double>();
      model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model: malformed JSON: ") + e.what());
  }
}

Json fitResultToJson(const FitResult& result) {
  Json j;
  j["logLik"] = number(result.logLik());
  j["converged"] = result.converged;
  j["restartIndex"] = result.restartIndex;
  j["model"] = modelToJson(result.model);
  Json trace = Json::array();
  for (double v : result.logLikTrace) trace.push_back(number(v));
  j["logLikTrace"] = trace;
  j["restarts"] = Json::array();
  for (const auto& r : result.restarts) {
    j["restarts"].push_back({{"index", r.index},
                             {"seed", r.seed},
                             {"initialLogLik", number(r.initialLogLik)},
                             {"finalLogLik", number(r.finalLogLik)},
                             {"iterations", r.iterations},
                             {"converged", r.converged}});
  }
  j["warnings"] = result.warnings;
  return j;
}

FitResult fitResultFromJson(const Json& j) {
  try {
    FitResult out;
    out.model = modelFromJson(j.at("model"));
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    for (const auto& v : j.at("logLikTrace")) out.logLikTrace.push_back(numberOr(v, kNegInf));
    out.converged = j.at("converged").get<bool>();
    out.restartIndex = j.value("restartIndex", std::size_t{0});
    for (const auto& r : j.value("restarts", Json::array())) {
      out.restarts.push_back({r.at("index").get<std::size_t>(), r.at("seed").get<std::uint64_t>(),
                              numberOr(r.at("initialLogLik"), kNegInf),
                              numberOr(r.at("finalLogLik"), kNegInf),
                              r.at("iterations").get<std::size_t>(), r.at("converged").get<bool>()});
    }
    out.warnings = j.value("warnings", std::vector<std::string>{});
    if (out.logLikTrace.empty()) throw InvalidArgument("fit result: empty log-likelihood trace");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("fit result: malformed JSON: ") + e.what());
  }
}

Json stabilityToJson(const StabilityReport& report) {
  Json j;
  Json lipschitz = Json::array();
  for (double k : report.lipschitz) lipschitz.push_back(number(k));
  j["lipschitz"] = lipschitz;
  Json clamped = Json::array();
  for (double k : report.clamped) clamped.push_back(number(k));
  j["clamped"] = clamped;
  j["stationary"] = std::vector<double>(report.stationary.data(),
                                        report.stationary.data() + report.stationary.size());
  j["averageLogGrowth"] = {{"value", number(report.averageLogGrowth)},
                      {"threshold", report.growthThreshold},
                      {"belowThreshold", report.growthBelowThreshold},
                      {"negative", report.growthNegative}};
  j["moments"] = Json::array();
  for (const auto& m : report.moments) {
    Json matrix = Json::array();
    for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < m.matrix.cols(); ++k) row.push_back(m.matrix(i, k));
      matrix.push_back(row);
    }
    j["moments"].push_back({{"order", m.order},
                            {"matrix", matrix},
                            {"spectralRadius", m.radius.value},
                            {"lowerBound", m.radius.lowerBound},
                            {"upperBound", m.radius.upperBound},
                            {"iterations", m.radius.iterations},
                            {"finite", m.finite}});
  }
  j["complete"] = report.complete;
  j["notes"] = report.notes;
  return j;
}

Json selectionToJson(const SelectionResult& result) {
  Json j;
  j["selected"] = result.selected;
  j["scores"] = Json::array();
  for (const auto& s : result.scores) {
    j["scores"].push_back({{"layers", s.layers},
                           {"logLik", s.logLik},
                           {"paramCount", s.paramCount},
                           {"penalty", s.penalty},
                           {"penalizedLogLik", s.penalizedLogLik},
                           {"sampleCount", s.sampleCount}});
  }
  Json excluded = Json::object();
  for (const auto& [L, why] : result.excluded) excluded[std::to_string(L)] = why;
  j["excluded"] = excluded;
  return j;
}

Json readJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void writeJson(const std::filesystem::path& path, const Json& json) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << json.dump(2) << '\n';
}

SwitchingModel loadModel(const std::filesystem::path& path) {
  const Json j = readJson(path);
  if (j.contains("result")) return modelFromJson(j.at("result").at("model"));
  return modelFromJson(j.contains("model") ? j.at("model") : j);
}

}  // namespace cdnarms::cli
