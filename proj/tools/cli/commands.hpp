#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/io.hpp"
#include "cli/settings.hpp"
#include "cdnarms/experiment.hpp"

namespace cdnarms::cli {

/// Runs `cdnarms <command> [flags]`. Returns the process exit status: 0 on
/// success, 2 for usage and configuration errors, 3 when fitting fails, 4 for
/// file errors and 1 otherwise. Failures print a JSON error record to `err`
/// and, when the output directory exists, to error.json inside it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Builders shared by the commands; exposed for tests.
FitConfig fitConfigFrom(Settings& settings);
ModelTemplate templateFrom(Settings& settings, std::size_t layers);
/// model.file if given, otherwise model.preset (ghil2, ghil3, ghil2-fractional).
SwitchingModel truthFrom(Settings& settings);

}  // namespace cdnarms::cli
