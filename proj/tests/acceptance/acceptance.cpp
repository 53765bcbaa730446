// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: cdnarms_acceptance [criterion ...]   (default: all, "data" = real-data check)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdnarms/ars.hpp"
#include "cdnarms/evaluate.hpp"
#include "cdnarms/experiment.hpp"
#include "cdnarms/inference.hpp"
#include "cdnarms/random.hpp"
#include "cdnarms/saem.hpp"
#include "cdnarms/selection.hpp"
#include "cdnarms/simulate.hpp"
#include "cdnarms/stability.hpp"
#include "cli/commands.hpp"
#include "cli/io.hpp"
#include "support/oracles.hpp"

namespace {

using namespace cdnarms;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

SimulationOptions withHistory(Index h) {
  SimulationOptions o;
  o.historyLength = h;
  return o;
}

// --- 1: forward-backward against path enumeration ------------------------------

Outcome likelihoodOracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> Ldist(1, 3), Tdist(0, 8);
  double worst = 0.0;
  double seconds = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto L = static_cast<std::size_t>(Ldist(rng));
    const auto model = testing::randomGhilModel(L, rng);
    const int T = Tdist(rng);
    const auto series = testing::randomSeries(4, T + 1, rng);
    const auto start = std::chrono::steady_clock::now();
    const double got = forwardBackward(model, series).logLik;
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double want = testing::enumeratePaths(model, series).logLik;
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  return {worst <= 1e-10 && seconds < 1.0,
          "max relative error " + fmt(worst) + ", forward-backward time " + fmt(seconds) + " s"};
}

// --- 2: monotone likelihood traces ----------------------------------------------

Outcome emMonotonicity() {
  std::mt19937_64 rng(77);
  const auto start = std::chrono::steady_clock::now();
  double worstDrop = 0.0;
  std::size_t steps = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t L = 1 + static_cast<std::size_t>(trial % 3);
    const auto truth = testing::randomGhilModel(L, rng, 2.0, 10.0);
    const auto sim = simulate(truth, 300, 500 + static_cast<std::uint64_t>(trial), withHistory(12));
    FitConfig c;
    c.maxIter = 30;
    c.tolerance = 0.0;
    c.delayBounds = {2.0, 12.0};
    c.seed = 900 + static_cast<std::uint64_t>(trial);
    const auto r = fit(sim.series, ModelTemplate::uniform(ghilDynamics(), L, truth.step), c);
    for (std::size_t i = 1; i < r.logLikTrace.size(); ++i) {
      worstDrop = std::max(worstDrop, r.logLikTrace[i - 1] - r.logLikTrace[i]);
      ++steps;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worstDrop <= 1e-8 && seconds < 120.0,
          "largest decrease " + fmt(worstDrop) + " over " + std::to_string(steps) +
              " iterations, " + fmt(seconds) + " s"};
}

// --- 3: penalty offsets ------------------------------------------------------------

Outcome penaltyOffsets() {
  const double expected[] = {55.3, 93.3, 138.2};
  bool ok = true;
  std::string detail;
  for (std::size_t L = 2; L <= 4; ++L) {
    const auto count = parameterCount(ModelTemplate::uniform(ghilDynamics(), L, 1.0 / 12.0));
    const auto score = makeScore(L, 0.0, count, 1000);
    ok = ok && count == L * L + 6 * L && std::abs(score.penalty - expected[L - 2]) <= 0.1;
    detail += "L=" + std::to_string(L) + ": " + fmt(score.penalty, 5) + " ";
  }
  return {ok, detail};
}

// --- 4: layer-count selection --------------------------------------------------------

Outcome layerSelection() {
  const auto truth = presets::ghilTwoLayer();
  FitConfig c;
  c.restarts = 10;
  c.maxIter = 50;
  c.integerDelays = true;
  c.delayBounds = {2.0, 24.0};
  auto tmpl = [&](std::size_t L) { return ModelTemplate::uniform(ghilDynamics(), L, truth.step); };
  const auto start = std::chrono::steady_clock::now();
  int hits = 0;
  std::string picks;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sim = simulate(truth, 1000, deriveSeed(seed, hashTag("selection-data")), withHistory(24));
    c.seed = seed;
    const auto r = selectLayers(sim.series, tmpl, 2, 4, c);
    hits += r.selected == 2 ? 1 : 0;
    picks += std::to_string(r.selected);
  }
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  return {hits >= 8, "selected L per seed " + picks + " (" + std::to_string(hits) +
                         "/10 correct), " + fmt(minutes, 3) + " min"};
}

// --- 5 and 6: replicated estimation ---------------------------------------------

ExperimentResult integerDelayStudy(double& minutes) {
  ExperimentConfig c;
  c.truth = presets::ghilTwoLayer();
  c.lengths = {250, 1000};
  c.replicates = 20;
  c.seed = 5;
  c.fit.restarts = 5;
  c.fit.maxIter = 50;
  c.fit.integerDelays = true;
  c.fit.delayBounds = {2.0, 24.0};
  c.fit.seed = 55;
  const auto start = std::chrono::steady_clock::now();
  auto result = runExperiment(c);
  minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  return result;
}

Outcome delayDetection(const ExperimentResult& study, double minutes) {
  const auto truth = presets::ghilTwoLayer();
  const auto hits = study.detections(truth, 1000);
  const auto short_ = study.detections(truth, 250);
  return {hits >= 16, "F_D = " + std::to_string(hits) + "/20 at T=1000 (" + std::to_string(short_) +
                          "/20 at T=250), study time " + fmt(minutes, 3) + " min"};
}

Outcome errorTrend(const ExperimentResult& integerStudy) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"a[1]", "a[2]", "b[1]", "b[2]", "sigma[1]", "sigma[2]", "M"}) {
    const double lo = median(integerStudy.errors(name, 250));
    const double hi = median(integerStudy.errors(name, 1000));
    ok = ok && hi < lo;
    detail += std::string(name) + " " + fmt(lo, 3) + "->" + fmt(hi, 3) + "; ";
  }

  ExperimentConfig c;
  c.truth = presets::ghilTwoLayerFractional();
  c.refinement = 2;
  c.lengths = {250, 1000};
  c.replicates = 20;
  c.seed = 6;
  c.fit.restarts = 5;
  c.fit.maxIter = 50;
  c.fit.delayBounds = {2.0, 24.0};
  c.fit.seed = 66;
  const auto real = runExperiment(c);
  const auto d250 = real.pooledErrors("D", 250);
  const auto d1000 = real.pooledErrors("D", 1000);
  const double med = median(d1000);
  const double iqr250 = interquartileRange(d250), iqr1000 = interquartileRange(d1000);
  ok = ok && med <= 0.05 && iqr1000 < iqr250;
  detail += "e_D median " + fmt(median(d250), 3) + "->" + fmt(med, 3) + ", IQR " + fmt(iqr250, 3) +
            "->" + fmt(iqr1000, 3);
  return {ok, detail};
}

// --- 7: stability certifier --------------------------------------------------------

Outcome stabilityCertifier() {
  Eigen::MatrixXd M(2, 2);
  M << 0.6, 0.4, 0.3, 0.7;
  const std::vector<double> K{0.3, 0.9};
  const auto report = certify(M, K, {2.0});
  const Eigen::MatrixXd M2 = report.moments[0].matrix;
  const double dense = M2.eigenvalues().cwiseAbs().maxCoeff();
  const double rho = report.moments[0].radius.value;
  double worstScaling = 0.0;
  for (double s : {1.0, 2.0, 3.0}) {
    const double base = spectralRadius(momentMatrix(M, K, s)).value;
    for (double lambda : {2.0, 10.0}) {
      const std::vector<double> scaled{lambda * K[0], lambda * K[1]};
      const double r = spectralRadius(momentMatrix(M, scaled, s)).value;
      worstScaling = std::max(worstScaling, std::abs(r - std::pow(lambda, s) * base) /
                                                (std::pow(lambda, s) * base));
    }
  }
  return {std::abs(rho - dense) <= 1e-9 && worstScaling <= 1e-9,
          "rho(M_2) = " + fmt(rho, 12) + ", dense " + fmt(dense, 12) +
              ", worst relative scaling error " + fmt(worstScaling)};
}

// --- 8: accelerated random search --------------------------------------------------

Outcome randomSearch() {
  const Interval box[] = {{0.0, 10.0}};
  const auto config = ArsConfig::forBox(box);
  auto f = [](std::span<const double> b) { return -(b[0] - 3.0) * (b[0] - 3.0); };
  int hits = 0;
  bool monotone = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const double start = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    const auto r = maximize(f, box, {start}, config, seed);
    worst = std::max(worst, std::abs(r.argmax[0] - 3.0));
    hits += std::abs(r.argmax[0] - 3.0) <= 1e-2 ? 1 : 0;
    for (std::size_t k = 1; k < r.acceptedValues.size(); ++k) {
      monotone = monotone && r.acceptedValues[k] > r.acceptedValues[k - 1];
    }
  }
  return {hits == 100 && monotone, std::to_string(hits) + "/100 within 1e-2 (worst " + fmt(worst) +
                                       "), best-so-far " + (monotone ? "monotone" : "NOT monotone")};
}

// --- 9: property suites -------------------------------------------------------------

Outcome propertySuites() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && std::find(failures.begin(), failures.end(), what) == failures.end()) {
      failures.push_back(what);
    }
  };

  // Interpolation: exact on the grid, affine between neighbours.
  for (int t = 0; t < 200; ++t) {
    const auto s = testing::randomSeries(5, 30, rng);
    for (int k = 0; k < 50; ++k) {
      const Index lo = -5 + static_cast<Index>(u(rng) * 33.0);
      const double f1 = u(rng), f2 = u(rng), w = u(rng);
      const double x1 = interpolateScalar(s, lo + f1), x2 = interpolateScalar(s, lo + f2);
      const double mid = interpolateScalar(s, lo + (w * f1 + (1.0 - w) * f2));
      check(std::abs(mid - (w * x1 + (1.0 - w) * x2)) <= 1e-12 * (1.0 + std::abs(mid)),
            "interpolation affinity");
      check(interpolateScalar(s, static_cast<double>(lo)) == s[lo], "interpolation on the grid");
    }
  }

  // Posterior normalisation, consistency and relabelling.
  for (int t = 0; t < 100; ++t) {
    const std::size_t L = 1 + static_cast<std::size_t>(t % 4);
    const auto model = testing::randomGhilModel(L, rng, 1.5, 5.0);
    const auto series = testing::randomSeries(6, 60, rng);
    const auto fb = forwardBackward(model, series);
    for (Eigen::Index n = 0; n < fb.gamma.rows(); ++n) {
      check(std::abs(fb.gamma.row(n).sum() - 1.0) <= 1e-10, "gamma rows sum to one");
    }
    for (std::size_t n = 0; n < fb.xi.size(); ++n) {
      const auto row = static_cast<Eigen::Index>(n);
      check(std::abs(fb.xi[n].sum() - 1.0) <= 1e-10, "xi sums to one");
      check((fb.xi[n].rowwise().sum().transpose() - fb.gamma.row(row)).cwiseAbs().maxCoeff() <= 1e-10,
            "xi marginals match gamma (previous)");
      check((fb.xi[n].colwise().sum() - fb.gamma.row(row + 1)).cwiseAbs().maxCoeff() <= 1e-10,
            "xi marginals match gamma (next)");
    }
    std::vector<std::size_t> order(L);
    for (std::size_t k = 0; k < L; ++k) order[k] = (k + 1) % L;
    const auto fp = forwardBackward(model.permuted(order), series);
    check(std::abs(fp.logLik - fb.logLik) <= 1e-10 * std::abs(fb.logLik),
          "likelihood invariant under relabelling");
    for (std::size_t k = 0; k < L; ++k) {
      check((fp.gamma.col(static_cast<Eigen::Index>(k)) -
             fb.gamma.col(static_cast<Eigen::Index>(order[k])))
                    .cwiseAbs()
                    .maxCoeff() <= 1e-10,
            "gamma equivariant under relabelling");
    }
  }

  // Persistence round trips.
  const auto dir = fs::temp_directory_path() / "cdnarms-acceptance-roundtrip";
  fs::create_directories(dir);
  for (int t = 0; t < 20; ++t) {
    const auto model = testing::randomGhilModel(1 + static_cast<std::size_t>(t % 3), rng, 2.0, 8.0);
    const auto back = cli::modelFromJson(cli::Json::parse(cli::modelToJson(model).dump()));
    bool same = back.chain.transition == model.chain.transition &&
                back.chain.initial == model.chain.initial && back.step == model.step;
    for (std::size_t l = 0; l < model.layerCount(); ++l) {
      same = same && back.layers[l].params == model.layers[l].params &&
             back.layers[l].sigma == model.layers[l].sigma &&
             back.layers[l].delay == model.layers[l].delay;
    }
    check(same, "model JSON round trip");

    const auto sim = simulate(model, 80, 40 + static_cast<std::uint64_t>(t), withHistory(8));
    const auto path = dir / "series.csv";
    cli::writeSeriesCsv(path, sim.series, sim.regimes, "");
    const auto read = cli::ingestCsv(path, "x", sim.series.historyLength());
    check(read.series.raw().size() == sim.series.raw().size() &&
              std::equal(read.series.raw().begin(), read.series.raw().end(), sim.series.raw().begin()),
          "series CSV round trip");

    FitConfig c;
    c.maxIter = 2;
    c.delayBounds = {2.0, 8.0};
    c.seed = static_cast<std::uint64_t>(t);
    const auto r = fit(sim.series, ModelTemplate::uniform(ghilDynamics(), model.layerCount(), model.step), c);
    const auto rb = cli::fitResultFromJson(cli::Json::parse(cli::fitResultToJson(r).dump()));
    check(rb.logLikTrace == r.logLikTrace && rb.model.chain.transition == r.model.chain.transition &&
              forwardBackward(rb.model, sim.series).logLik == r.logLik(),
          "fit result JSON round trip");
  }
  fs::remove_all(dir);

  std::string detail = failures.empty() ? "interpolation, posterior, relabelling and persistence checks hold"
                                        : "failed:";
  for (const auto& f : failures) detail += " [" + f + "]";
  return {failures.empty(), detail};
}

// --- real data ------------------------------------------------------------------------

std::size_t dataRows(const fs::path& csv) {
  std::ifstream f(csv);
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      if (!std::isfinite(std::stod(cell))) return 0;
    }
    ++rows;
  }
  return rows;
}

Outcome realData() {
  const auto dir = fs::temp_directory_path() / "cdnarms-acceptance-enso";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = std::string(CDNARMS_TEST_DATA) + "/nino12_anomalies.csv";
  {
    std::ofstream ini(dir / "enso.ini");
    ini << "[data]\ncolumn = anomaly\n[fit]\nrestarts = 5\niterations = 50\n";
  }
  std::ostringstream out, err;
  int status = cli::run({"fit", "--config", (dir / "enso.ini").string(), "--data", data, "--layers",
                         "2", "--out-dir", dir.string()},
                        out, err);
  if (status != 0) return {false, "fit exited with " + std::to_string(status) + ": " + err.str()};
  const auto model = cli::loadModel(dir / "fit.json");

  {
    std::ofstream ini(dir / "diag.ini");
    ini << "[data]\ncolumn = anomaly\n";
  }
  status = cli::run({"diagnose", "--config", (dir / "diag.ini").string(), "--model",
                     (dir / "fit.json").string(), "--data", data, "--out-dir", dir.string()},
                    out, err);
  if (status != 0) return {false, "diagnose exited with " + std::to_string(status) + ": " + err.str()};
  const auto acfRows = dataRows(dir / "acf.csv");
  const auto qqRows = dataRows(dir / "qq.csv");

  bool fractional = true;
  std::string delays;
  for (const auto& layer : model.layers) {
    const double frac = layer.delay - std::floor(layer.delay);
    fractional = fractional && std::min(frac, 1.0 - frac) > 0.05;
    delays += fmt(layer.delay, 6) + " ";
  }
  fs::remove_all(dir);
  return {fractional && acfRows == 25 && qqRows == 99,
          "delays " + delays + "; acf rows " + std::to_string(acfRows) + ", qq rows " +
              std::to_string(qqRows)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  auto selected = [&](const std::string& id) { return wanted.empty() || wanted.count(id) > 0; };

  int failures = 0;
  auto report = [&](const std::string& id, const std::string& name, const std::function<Outcome()>& run) {
    if (!selected(id)) return;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << std::endl;
  };

  report("1", "forward-backward matches path enumeration", likelihoodOracle);
  report("2", "likelihood traces are nondecreasing", emMonotonicity);
  report("3", "penalty offsets at T=1000", penaltyOffsets);
  report("4", "penalised selection recovers L=2", layerSelection);

  if (selected("5") || selected("6")) {
    double minutes = 0.0;
    std::optional<ExperimentResult> study;
    try {
      study = integerDelayStudy(minutes);
    } catch (const std::exception& e) {
      std::cerr << "integer-delay study failed: " << e.what() << '\n';
    }
    auto missing = [] { return Outcome{false, "integer-delay study did not complete"}; };
    report("5", "integer delays detected", [&] { return study ? delayDetection(*study, minutes) : missing(); });
    report("6", "errors shrink with length", [&] { return study ? errorTrend(*study) : missing(); });
  }

  report("7", "stability certifier", stabilityCertifier);
  report("8", "random search on a parabola", randomSearch);
  report("9", "property suites", propertySuites);
  report("data", "real-data fit and diagnostics", realData);

  return failures == 0 ? 0 : 1;
}
