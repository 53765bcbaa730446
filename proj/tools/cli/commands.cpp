#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <CLI11.hpp>

#include "cdnarms/evaluate.hpp"
#include "cdnarms/random.hpp"

namespace cdnarms::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  std::string command;
  Settings settings;
  fs::path outDir;
  std::ostream& out;
};

Json header(Context& ctx, std::uint64_t seed) {
  Json j;
  j["tool"] = "cdnarms";
  j["version"] = kVersion;
  j["command"] = ctx.command;
  j["seed"] = seed;
  j["settings"] = ctx.settings.toJson();
  return j;
}

std::string csvHeader(Context& ctx, std::uint64_t seed) {
  std::ostringstream h;
  h << "# cdnarms " << kVersion << ' ' << ctx.command << '\n' << "# seed = " << seed << '\n';
  ctx.settings.writeHeader(h);
  return h.str();
}

std::ofstream openCsv(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f.precision(17);
  return f;
}

struct Data {
  IngestResult ingest;
  fs::path path;
  Index history = 0;
};

Data loadData(Context& ctx, const FitConfig& fitConfig) {
  const auto path = ctx.settings.text("data.path");
  if (!path) throw ConfigError("data.path (or --data) is required for " + ctx.command);
  const std::string column = ctx.settings.text("data.column", "0");
  const long history = ctx.settings.integer(
      "data.history",
      static_cast<long>(std::ceil(fitConfig.delayBounds.upper - kIntegerIndexTolerance)));
  // Settings are complete here; report typos before touching the file.
  ctx.settings.rejectUnused();
  Data d{ingestCsv(*path, column, history), *path, history};
  ctx.out << "read " << d.ingest.rows << " rows from " << *path << " (column " << d.ingest.column
          << "; " << history << " history rows, " << d.ingest.series.sampleCount() << " samples";
  if (!d.ingest.firstLabel.empty()) {
    ctx.out << "; " << d.ingest.firstLabel << " to " << d.ingest.lastLabel;
  }
  ctx.out << ")\n";
  return d;
}

Json dataJson(const Data& d) {
  return {{"path", d.path.string()},
          {"column", d.ingest.column},
          {"rows", d.ingest.rows},
          {"historyRows", d.history},
          {"samples", d.ingest.series.sampleCount()},
          {"firstLabel", d.ingest.firstLabel},
          {"lastLabel", d.ingest.lastLabel}};
}

// --- commands ------------------------------------------------------------------

void simulateCommand(Context& ctx) {
  const SwitchingModel truth = truthFrom(ctx.settings);
  const long length = ctx.settings.integer("simulate.length", 1000);
  const long refinement = ctx.settings.integer("simulate.refinement", 1);
  const long history =
      ctx.settings.integer("simulate.history", std::max<long>(24, truth.requiredHistory()));
  const auto seed = static_cast<std::uint64_t>(ctx.settings.integer("simulate.seed", 1));
  ctx.settings.rejectUnused();

  SimulationResult sim;
  if (refinement == 1) {
    SimulationOptions options;
    options.historyLength = history;
    sim = simulate(truth, length, seed, options);
  } else {
    sim = simulateFineGrid(truth, static_cast<int>(refinement), length, seed, history);
  }
  const auto path = ctx.outDir / "series.csv";
  writeSeriesCsv(path, sim.series, sim.regimes, csvHeader(ctx, seed));
  ctx.out << "wrote " << path.string() << '\n';
}

void fitCommand(Context& ctx) {
  const FitConfig config = fitConfigFrom(ctx.settings);
  const auto layers = static_cast<std::size_t>(ctx.settings.integer("model.layers", 2));
  const ModelTemplate tmpl = templateFrom(ctx.settings, layers);
  Data data = loadData(ctx, config);

  const FitResult result = fit(data.ingest.series, tmpl, config);
  Json j = header(ctx, config.seed);
  j["data"] = dataJson(data);
  j["result"] = fitResultToJson(result);
  const auto path = ctx.outDir / "fit.json";
  writeJson(path, j);
  ctx.out << "log-likelihood " << formatReal(result.logLik()) << " after "
          << result.logLikTrace.size() - 1 << " iterations; wrote " << path.string() << '\n';
}

void selectCommand(Context& ctx) {
  const FitConfig config = fitConfigFrom(ctx.settings);
  const auto lo = static_cast<std::size_t>(ctx.settings.integer("select.min_layers", 2));
  const auto hi = static_cast<std::size_t>(ctx.settings.integer("select.max_layers", 4));
  // Read the template keys once so they are echoed and checked up front.
  (void)templateFrom(ctx.settings, 1);
  Data data = loadData(ctx, config);

  const auto result = selectLayers(
      data.ingest.series, [&](std::size_t L) { return templateFrom(ctx.settings, L); }, lo, hi,
      config);

  auto csv = openCsv(ctx.outDir / "select.csv");
  csv << csvHeader(ctx, config.seed);
  csv << "layers,logLik,paramCount,penalty,penalizedLogLik,sampleCount,selected\n";
  for (const auto& s : result.scores) {
    csv << s.layers << ',' << s.logLik << ',' << s.paramCount << ',' << s.penalty << ','
        << s.penalizedLogLik << ',' << s.sampleCount << ',' << (s.layers == result.selected) << '\n';
  }
  Json j = header(ctx, config.seed);
  j["data"] = dataJson(data);
  j["selection"] = selectionToJson(result);
  Json fits = Json::object();
  for (const auto& [L, f] : result.fits) fits[std::to_string(L)] = fitResultToJson(f);
  j["fits"] = fits;
  writeJson(ctx.outDir / "select.json", j);
  ctx.out << "selected L = " << result.selected << "; wrote " << (ctx.outDir / "select.csv").string()
          << '\n';
}

void stabilityCommand(Context& ctx) {
  const SwitchingModel model = truthFrom(ctx.settings);
  const auto orders = ctx.settings.reals("stability.orders", {2.0});
  const double threshold = ctx.settings.real("stability.threshold", 1.0);
  ctx.settings.rejectUnused();

  const auto report = certify(model, orders, threshold);
  Json j = header(ctx, 0);
  j["report"] = stabilityToJson(report);
  const auto path = ctx.outDir / "stability.json";
  writeJson(path, j);
  for (const auto& m : report.moments) {
    ctx.out << "rho(M_" << m.order << ") = " << formatReal(m.radius.value)
            << (m.finite ? " < 1" : " >= 1") << '\n';
  }
  ctx.out << "wrote " << path.string() << '\n';
}

void diagnoseCommand(Context& ctx) {
  const SwitchingModel model = truthFrom(ctx.settings);
  FitConfig boundsOnly;
  boundsOnly.delayBounds.upper = ctx.settings.real("fit.delay_max", boundsOnly.delayBounds.upper);
  const long maxLag = ctx.settings.integer("diagnose.max_lag", 24);
  const long sims = ctx.settings.integer("diagnose.simulations", 2000);
  const long quantiles = ctx.settings.integer("diagnose.quantiles", 99);
  const auto seed = static_cast<std::uint64_t>(ctx.settings.integer("diagnose.seed", 1));
  const auto jobs = static_cast<unsigned>(ctx.settings.integer("fit.jobs", 1));
  Data data = loadData(ctx, boundsOnly);
  if (maxLag < 0 || sims < 1 || quantiles < 1) {
    throw ConfigError("diagnose: need max_lag >= 0, simulations >= 1, quantiles >= 1");
  }

  const auto& series = data.ingest.series;
  const auto values = series.sampleValues();
  const auto dataAcf = empiricalAcf(values, static_cast<std::size_t>(maxLag));
  const auto paths = simulatePaths(model, series.sampleCount(), static_cast<std::size_t>(sims),
                                   deriveSeed(seed, hashTag("acf")), jobs);
  const auto simAcf = ensembleAcf(paths, static_cast<std::size_t>(maxLag));

  std::vector<double> levels;
  for (long k = 1; k <= quantiles; ++k) levels.push_back(static_cast<double>(k) / (quantiles + 1));
  const auto qq = qqQuantiles(series, model, static_cast<std::size_t>(sims), levels,
                              deriveSeed(seed, hashTag("qq")), jobs);

  auto acf = openCsv(ctx.outDir / "acf.csv");
  acf << csvHeader(ctx, seed) << "lag,data,model\n";
  for (long k = 0; k <= maxLag; ++k) {
    acf << k << ',' << dataAcf.values[static_cast<std::size_t>(k)] << ','
        << simAcf.values[static_cast<std::size_t>(k)] << '\n';
  }
  auto qqCsv = openCsv(ctx.outDir / "qq.csv");
  qqCsv << csvHeader(ctx, seed) << "level,data,model\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    qqCsv << levels[k] << ',' << qq.data[k] << ',' << qq.model[k] << '\n';
  }
  ctx.out << "wrote " << (ctx.outDir / "acf.csv").string() << " and "
          << (ctx.outDir / "qq.csv").string() << '\n';
}

void experimentCommand(Context& ctx) {
  ExperimentConfig config;
  config.truth = truthFrom(ctx.settings);
  config.fit = fitConfigFrom(ctx.settings);
  const auto lengths = ctx.settings.reals("experiment.lengths", {250.0, 1000.0});
  config.lengths.clear();
  for (double v : lengths) {
    if (v != std::floor(v) || v < 1) throw ConfigError("experiment.lengths: positive integers required");
    config.lengths.push_back(static_cast<Index>(v));
  }
  config.replicates = static_cast<std::size_t>(ctx.settings.integer("experiment.replicates", 5));
  config.refinement = static_cast<int>(ctx.settings.integer("experiment.refinement", 1));
  config.historyLength = ctx.settings.integer("experiment.history", 0);
  config.seed = static_cast<std::uint64_t>(ctx.settings.integer("experiment.seed", 1));
  config.jobs = config.fit.jobs;
  ctx.settings.rejectUnused();

  const auto result = runExperiment(config, [&](const ReplicateFit& f) {
    ctx.out << "replicate " << f.replicate << " length " << f.length << ": log-likelihood "
            << formatReal(f.logLik) << '\n';
  });

  auto errors = openCsv(ctx.outDir / "errors.csv");
  errors << csvHeader(ctx, config.seed) << "replicate,length,parameter,error,absolute\n";
  auto fits = openCsv(ctx.outDir / "fits.csv");
  fits << csvHeader(ctx, config.seed) << "replicate,length,logLik,converged,iterations";
  for (std::size_t l = 0; l < config.truth.layerCount(); ++l) fits << ",D[" << l + 1 << ']';
  fits << '\n';
  for (const auto& f : result.fits) {
    for (const auto& e : f.errors.entries) {
      errors << f.replicate << ',' << f.length << ',' << e.name << ',' << e.value << ','
             << e.absolute << '\n';
    }
    fits << f.replicate << ',' << f.length << ',' << f.logLik << ',' << f.converged << ','
         << f.iterations;
    for (const auto& l : f.model.layers) fits << ',' << l.delay;
    fits << '\n';
  }
  const bool integerTruth = std::all_of(config.truth.layers.begin(), config.truth.layers.end(),
                                        [](const LayerSpec& l) { return l.delay == std::round(l.delay); });
  if (integerTruth) {
    auto det = openCsv(ctx.outDir / "detections.csv");
    det << csvHeader(ctx, config.seed) << "length,detections,replicates\n";
    for (Index length : config.lengths) {
      det << length << ',' << result.detections(config.truth, length) << ',' << config.replicates
          << '\n';
    }
  }
  ctx.out << "wrote " << (ctx.outDir / "errors.csv").string() << '\n';
}

int fail(std::ostream& err, const fs::path& outDir, const std::string& command,
         const std::string& type, const std::string& message, int status) {
  Json record = {{"error", {{"type", type}, {"message", message}, {"command", command}}},
                 {"status", status}};
  err << record.dump() << '\n';
  std::error_code ec;
  if (!outDir.empty() && fs::is_directory(outDir, ec)) {
    std::ofstream f(outDir / "error.json");
    if (f) f << record.dump(2) << '\n';
  }
  return status;
}

}  // namespace

FitConfig fitConfigFrom(Settings& s) {
  FitConfig c;
  c.maxIter = static_cast<std::size_t>(s.integer("fit.iterations", static_cast<long>(c.maxIter)));
  c.tolerance = s.real("fit.tolerance", c.tolerance);
  c.restarts = static_cast<std::size_t>(s.integer("fit.restarts", static_cast<long>(c.restarts)));
  c.integerDelays = s.flag("fit.integer_delays", c.integerDelays);
  c.delayBounds.lower = s.real("fit.delay_min", c.delayBounds.lower);
  c.delayBounds.upper = s.real("fit.delay_max", c.delayBounds.upper);
  c.sigmaFloor = s.real("fit.sigma_floor", c.sigmaFloor);
  c.seed = static_cast<std::uint64_t>(s.integer("fit.seed", static_cast<long>(c.seed)));
  c.jobs = static_cast<unsigned>(s.integer("fit.jobs", c.jobs));
  c.ars.contraction = s.real("ars.contraction", c.ars.contraction);
  c.ars.maxIter = static_cast<std::size_t>(s.integer("ars.max_iter", static_cast<long>(c.ars.maxIter)));
  c.ars.stallLength =
      static_cast<std::size_t>(s.integer("ars.stall", static_cast<long>(c.ars.stallLength)));
  c.ars.radiusFraction = s.real("ars.radius_fraction", c.ars.radiusFraction);
  c.ars.minRadiusRatio = s.real("ars.min_radius_ratio", c.ars.minRadiusRatio);
  for (const auto& key : s.keysIn("init")) {
    c.initialBoxes[key] = s.interval("init." + key, {});
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ModelTemplate templateFrom(Settings& s, std::size_t layers) {
  const std::string kind = s.text("model.kind", "ghil");
  const auto order = static_cast<std::size_t>(s.integer("model.order", 1));
  const double step = s.real("model.step", 1.0 / 12.0);
  if (!(step > 0.0)) throw ConfigError("model.step must be positive");
  return ModelTemplate::uniform(makeDynamics(kind, order), layers, step);
}

SwitchingModel truthFrom(Settings& s) {
  if (const auto file = s.text("model.file")) return loadModel(*file);
  const std::string preset = s.text("model.preset", "ghil2");
  if (preset == "ghil2") return presets::ghilTwoLayer();
  if (preset == "ghil3") return presets::ghilThreeLayer();
  if (preset == "ghil2-fractional") return presets::ghilTwoLayerFractional();
  throw ConfigError("model.preset: unknown preset '" + preset + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov-switching delayed autoregressive models"};
  app.set_version_flag("--version", kVersion);
  std::string command;
  std::string configPath;
  std::optional<long> seed, jobs, restarts, iters;
  std::string outDir = ".";
  std::string layers, modelPath, dataPath;
  bool integerDelays = false;

  app.add_option("command", command, "simulate | fit | select | stability | diagnose | experiment")
      ->required()
      ->check(CLI::IsMember({"simulate", "fit", "select", "stability", "diagnose", "experiment"}));
  app.add_option("--config", configPath, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed of the command's random streams");
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
  app.add_option("--out-dir", outDir, "directory for output files");
  app.add_option("--restarts", restarts, "independent SA-EM runs per fit");
  app.add_option("--iters", iters, "SA-EM iterations per run");
  app.add_option("--layers", layers, "layer count L, or range a:b for select");
  app.add_flag("--integer-delays", integerDelays, "restrict delays to integers");
  app.add_option("--model", modelPath, "model JSON (a fit.json is accepted)");
  app.add_option("--data", dataPath, "input CSV");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(err, {}, command, "usage", e.what(), 2);
  }

  const fs::path dir(outDir);
  try {
    Settings settings = configPath.empty() ? Settings{} : Settings::fromFile(configPath);
    const std::map<std::string, std::string> seedKey{
        {"simulate", "simulate.seed"}, {"fit", "fit.seed"},           {"select", "fit.seed"},
        {"diagnose", "diagnose.seed"}, {"experiment", "experiment.seed"}};
    if (seed && seedKey.count(command)) settings.set(seedKey.at(command), std::to_string(*seed));
    if (jobs) settings.set("fit.jobs", std::to_string(*jobs));
    if (restarts) settings.set("fit.restarts", std::to_string(*restarts));
    if (iters) settings.set("fit.iterations", std::to_string(*iters));
    if (integerDelays) settings.set("fit.integer_delays", "true");
    if (!modelPath.empty()) settings.set("model.file", modelPath);
    if (!dataPath.empty()) settings.set("data.path", dataPath);
    if (!layers.empty()) {
      const auto colon = layers.find(':');
      const std::string lo = layers.substr(0, colon);
      const std::string hi = colon == std::string::npos ? lo : layers.substr(colon + 1);
      if (command == "select") {
        settings.set("select.min_layers", lo);
        settings.set("select.max_layers", hi);
      } else {
        if (lo != hi) throw ConfigError("--layers: a range is only valid for select");
        settings.set("model.layers", lo);
      }
    }
    settings.set("output.dir", outDir);
    (void)settings.text("output.dir");

    fs::create_directories(dir);
    Context ctx{command, std::move(settings), dir, out};
    if (command == "simulate") simulateCommand(ctx);
    if (command == "fit") fitCommand(ctx);
    if (command == "select") selectCommand(ctx);
    if (command == "stability") stabilityCommand(ctx);
    if (command == "diagnose") diagnoseCommand(ctx);
    if (command == "experiment") experimentCommand(ctx);
    return 0;
  } catch (const ConfigError& e) {
    return fail(err, dir, command, "config", e.what(), 2);
  } catch (const FitFailure& e) {
    return fail(err, dir, command, "fit_failure", e.what(), 3);
  } catch (const IoError& e) {
    return fail(err, dir, command, "io", e.what(), 4);
  } catch (const fs::filesystem_error& e) {
    return fail(err, dir, command, "io", e.what(), 4);
  } catch (const IndexOutOfRange& e) {
    return fail(err, dir, command, "index_out_of_range", e.what(), 2);
  } catch (const InvalidArgument& e) {
    return fail(err, dir, command, "invalid_argument", e.what(), 2);
  } catch (const std::exception& e) {
    return fail(err, dir, command, "internal", e.what(), 1);
  }
}

}  // namespace cdnarms::cli
