#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdnarms/saem.hpp"
#include "cdnarms/selection.hpp"
#include "cdnarms/simulate.hpp"
#include "cdnarms/stability.hpp"

namespace cdnarms::cli {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IngestResult {
  TimeSeries series;
  std::size_t rows = 0;
  std::string column;      // header name, or the column index
  std::string firstLabel;  // first/last entry of column 0 when it is not the data
  std::string lastLabel;
};

/// Reads one numeric column of a comma-separated file. `column` is a header
/// name or a zero-based index; a header row is recognised when the selected
/// cell of the first row is not numeric. The first `historyRows` rows become
/// the pre-sample history and time 0 is the first row after them. Lines
/// starting with '#' are skipped. Missing or non-numeric cells are errors that
/// name the file line.
IngestResult ingestCsv(const std::filesystem::path& path, const std::string& column,
                       Index historyRows);

/// x, t, regime (1-based; empty for history rows), with `header` comment lines.
void writeSeriesCsv(const std::filesystem::path& path, const TimeSeries& series,
                    const std::vector<std::size_t>& regimes, const std::string& header);

std::shared_ptr<const LayerDynamics> makeDynamics(const std::string& kind, std::size_t order);

Json modelToJson(const SwitchingModel& model);
SwitchingModel modelFromJson(const Json& json);

Json fitResultToJson(const FitResult& result);
/// Restores model, trace, restart summaries and warnings; posteriors are not
/// stored.
FitResult fitResultFromJson(const Json& json);

Json stabilityToJson(const StabilityReport& report);
Json selectionToJson(const SelectionResult& result);

Json readJson(const std::filesystem::path& path);
void writeJson(const std::filesystem::path& path, const Json& json);

/// Model stored on its own, as the "model" member of a fit result, or in a
/// fit.json written by the command line tool.
SwitchingModel loadModel(const std::filesystem::path& path);

}  // namespace cdnarms::cli
