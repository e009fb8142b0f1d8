#include "cli_app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lingcast/evalharness.hpp"
#include "lingcast/forecaster.hpp"
#include "lingcast/io.hpp"

namespace lingcast::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0x0f];
  }
  return out;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ForecastArgs {
  std::string input;
  std::string batch;
  std::string output;
  std::string plot_data;
  std::string report;
  std::size_t horizon = 0;
  double multiplier = 1.0;
  std::size_t window = 0;
  std::size_t levels = 32;
  std::string criterion = "difference";
  std::string trend = "none";
  std::string method = "linguistic";
  double xi = 0.5;
  double phi = 0.5;
  bool holdout = false;

  // Set after parsing.
  bool window_given = false;
  bool holdout_forced = false;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }
  bool uses_holdout() const { return holdout || holdout_forced; }
  bool is_holt() const { return method == "holt"; }

  ForecastConfig forecast_config() const {
    ForecastConfig c;
    c.horizon = horizon;
    c.multiplier = multiplier;
    c.levels = levels;
    c.criterion = criterion == "correlation" ? Criterion::Correlation : Criterion::Difference;
    c.trend = trend == "linear" ? TrendMode::Linear : TrendMode::None;
    if (window_given) c.window = window;
    return c;
  }

  HoltConfig holt_config() const { return {xi, phi}; }
};

struct GenerateArgs {
  std::string kind = "sinusoid";
  std::size_t length = 100;
  double period = 25.0;
  double amplitude = 2.0;
  double slope = 0.0;
  double quad = 0.0;
  double phase = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string output;
  std::string report;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }
};

const std::map<std::string, GeneratorKind> kKinds = {
    {"sinusoid", GeneratorKind::Sinusoid},
    {"sinusoid-linear", GeneratorKind::SinusoidLinearTrend},
    {"sinusoid-nonlinear", GeneratorKind::SinusoidNonlinearTrend},
};

void add_forecast_options(CLI::App& sub, ForecastArgs& a) {
  a.opts["input"] = sub.add_option("--input", a.input, "CSV file: one value column, or label,value");
  a.opts["batch"] = sub.add_option("--batch", a.batch, "Directory of CSV files to process in parallel");
  a.opts["output"] = sub.add_option("--output", a.output, "Forecast CSV path (directory with --batch)");
  a.opts["plot-data"] = sub.add_option("--plot-data", a.plot_data, "Long-format series,index,value CSV");
  a.opts["report"] = sub.add_option("--report", a.report, "JSON report path");
  a.opts["horizon"] = sub.add_option("--horizon", a.horizon, "Forecast horizon P")->required()->check(CLI::PositiveNumber);
  a.opts["multiplier"] =
      sub.add_option("--multiplier", a.multiplier, "Window multiplier M, N = ceil(M*P)")->check(CLI::PositiveNumber);
  a.opts["window"] = sub.add_option("--window", a.window, "Window length N (overrides --multiplier)")
                         ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  a.opts["levels"] = sub.add_option("--levels", a.levels, "Quantization levels S")->check(CLI::PositiveNumber);
  a.opts["criterion"] = sub.add_option("--criterion", a.criterion, "Similarity criterion")
                            ->check(CLI::IsMember({"difference", "correlation"}));
  a.opts["trend"] = sub.add_option("--trend", a.trend, "Per-window trend handling")->check(CLI::IsMember({"none", "linear"}));
  a.opts["method"] = sub.add_option("--method", a.method, "Forecasting method")->check(CLI::IsMember({"linguistic", "holt"}));
  a.opts["xi"] = sub.add_option("--xi", a.xi, "Holt value smoothing coefficient")->check(CLI::Range(0.0, 1.0));
  a.opts["phi"] = sub.add_option("--phi", a.phi, "Holt trend smoothing coefficient")->check(CLI::Range(0.0, 1.0));
  a.opts["holdout"] = sub.add_flag("--holdout", a.holdout, "Hold out the last P values and score the forecast");
  a.opts["input"]->excludes(a.opts["batch"]);
}

void check_forecast_combination(const ForecastArgs& a) {
  if (!a.given("input") && !a.given("batch")) throw UsageError("--input or --batch is required");
  if (a.given("batch") && !a.given("output")) throw UsageError("--batch requires --output DIR");
  if (a.given("batch") && (a.given("plot-data") || a.given("report")))
    throw UsageError(std::string(a.given("plot-data") ? "--plot-data" : "--report") +
                     " is not used with --batch; outputs are written under --output");
  if (a.is_holt()) {
    for (const char* name : {"multiplier", "window", "levels", "criterion", "trend"})
      if (a.given(name)) throw UsageError(std::string("--") + name + " is not used with --method holt");
  } else {
    for (const char* name : {"xi", "phi"})
      if (a.given(name)) throw UsageError(std::string("--") + name + " requires --method holt");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::FileNotFound, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error(ErrorKind::FileNotFound, "failed writing '" + path.string() + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json forecast_config_json(const ForecastArgs& a, std::optional<std::size_t> window) {
  return {
      {"horizon", a.horizon},
      {"method", a.method},
      {"multiplier", a.multiplier},
      {"window", window ? json(*window) : json(nullptr)},
      {"window_override", a.window_given},
      {"levels", a.levels},
      {"criterion", a.criterion},
      {"trend", a.trend},
      {"xi", a.xi},
      {"phi", a.phi},
      {"holdout", a.uses_holdout()},
  };
}

struct Products {
  std::string forecast_csv;
  json report;
  std::string plot_csv;
  std::vector<std::string> warnings;
};

// Everything is computed before any file is touched, so a failing run
// leaves no partial outputs behind.
Products produce(const ForecastArgs& a, const std::string& subcommand, const fs::path& input,
                 const std::string& forecast_path, const std::string& plot_path) {
  const std::string raw = io::read_file(input);
  const io::LabeledSeries ls = io::parse_csv(raw);
  const TimeSeries& series = ls.series;
  const std::size_t horizon = a.horizon;

  Products p;
  std::optional<Forecast> f;
  std::optional<BacktestReport> bt;
  std::optional<std::size_t> window;
  json multiplier_check = nullptr;

  if (a.is_holt()) {
    const HoltConfig holt = a.holt_config();
    holt.validate();
    if (a.uses_holdout()) {
      bt = holdout_backtest(series, holt, horizon);
    } else {
      f = forecast_holt(series, holt, horizon);
    }
  } else {
    const ForecastConfig config = a.forecast_config();
    config.validate();
    window = config.window_length();
    const MultiplierAdvice advice = validate_multiplier(horizon, config.effective_multiplier());
    multiplier_check = {{"ok", advice.ok},
                        {"multiplier", config.effective_multiplier()},
                        {"recommended_range", advice.range_text()},
                        {"message", advice.ok ? json(nullptr) : json(advice.message)}};
    if (!advice.ok) p.warnings.push_back(advice.message);
    if (a.uses_holdout()) {
      bt = holdout_backtest(series, config);
    } else {
      f = forecast(series, config);
    }
  }
  if (bt) f = bt->forecast;
  p.warnings.insert(p.warnings.end(), f->warnings.begin(), f->warnings.end());

  const std::size_t history = bt ? series.size() - horizon : series.size();
  p.forecast_csv = io::indexed_csv(f->values, history + 1);

  p.plot_csv = "series,index,value\n";
  for (std::size_t i = 0; i < history; ++i)
    p.plot_csv += "history," + std::to_string(i + 1) + ',' + io::format_double(series[i]) + '\n';
  for (std::size_t j = 0; j < f->values.size(); ++j)
    p.plot_csv += "forecast," + std::to_string(history + j + 1) + ',' + io::format_double(f->values[j]) + '\n';
  if (bt) {
    for (std::size_t j = 0; j < bt->actual.size(); ++j)
      p.plot_csv += "actual," + std::to_string(history + j + 1) + ',' + io::format_double(bt->actual[j]) + '\n';
  }

  json backtest = nullptr;
  if (bt) {
    const ErrorMetrics& m = bt->metrics;
    backtest = {{"train_length", history},
                {"mae", m.mae},
                {"rmse", m.rmse},
                {"mape", optional_number(m.mape)},
                {"mape_skipped", m.mape_skipped},
                {"correlation", optional_number(m.correlation)},
                {"actual", bt->actual}};
  }

  json input_info = {{"path", input.string()},
                     {"sha256", sha256_hex(raw)},
                     {"rows", series.size()},
                     {"layout", ls.labels.empty() ? "single" : "labeled"},
                     {"value_header", ls.value_header ? json(*ls.value_header) : json(nullptr)},
                     {"label_header", ls.label_header ? json(*ls.label_header) : json(nullptr)},
                     {"last_label", ls.labels.empty() ? json(nullptr) : json(ls.labels.back())}};

  p.report = {
      {"manifest",
       {{"tool", kToolName}, {"version", kVersion}, {"subcommand", subcommand}, {"input", input_info},
        {"config", forecast_config_json(a, window)}}},
      {"method", to_string(f->method)},
      {"series_length", series.size()},
      {"history_length", history},
      {"window", window ? json(*window) : json(nullptr)},
      {"matched_start", f->matched_start ? json(*f->matched_start) : json(nullptr)},
      {"score", optional_number(f->score)},
      {"quantization_step", optional_number(f->step)},
      {"multiplier_check", multiplier_check},
      {"forecast", {{"first_index", history + 1}, {"values", f->values}}},
      {"warnings", p.warnings},
      {"backtest", backtest},
      {"outputs",
       {{"forecast", forecast_path.empty() ? json(nullptr) : json(forecast_path)},
        {"plot_data", plot_path.empty() ? json(nullptr) : json(plot_path)}}},
  };
  return p;
}

int run_forecast_single(const ForecastArgs& a, const std::string& subcommand, std::ostream& out, std::ostream& err) {
  Products p = produce(a, subcommand, a.input, a.output, a.plot_data);
  for (const auto& w : p.warnings) err << "warning: " << w << '\n';
  const std::string report_text = p.report.dump(2) + '\n';
  if (a.output.empty()) {
    out << p.forecast_csv;
  } else {
    write_text(a.output, p.forecast_csv);
  }
  if (!a.plot_data.empty()) write_text(a.plot_data, p.plot_csv);
  if (!a.report.empty()) {
    write_text(a.report, report_text);
  } else if (!a.output.empty()) {
    out << report_text;
  }
  return 0;
}

int run_forecast_batch(const ForecastArgs& a, const std::string& subcommand, std::ostream& err) {
  std::vector<fs::path> inputs;
  if (!fs::is_directory(a.batch)) throw Error(ErrorKind::FileNotFound, "'" + a.batch + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(a.batch))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw Error(ErrorKind::EmptyInput, "no .csv files in '" + a.batch + "'");

  const fs::path out_dir(a.output);
  fs::create_directories(out_dir);

  std::vector<std::future<Products>> jobs;
  for (const auto& in : inputs) {
    const std::string stem = in.stem().string();
    const std::string forecast_path = (out_dir / (stem + ".forecast.csv")).string();
    jobs.push_back(std::async(std::launch::async, [&a, &subcommand, in, forecast_path] {
      return produce(a, subcommand, in, forecast_path, "");
    }));
  }

  int status = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string stem = inputs[i].stem().string();
    try {
      Products p = jobs[i].get();
      for (const auto& w : p.warnings) err << "warning: " << inputs[i].filename().string() << ": " << w << '\n';
      write_text(out_dir / (stem + ".forecast.csv"), p.forecast_csv);
      write_text(out_dir / (stem + ".report.json"), p.report.dump(2) + '\n');
    } catch (const std::exception& e) {
      err << "error: " << inputs[i].filename().string() << ": " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

int run_generate(const GenerateArgs& g, std::ostream& out) {
  GeneratorSpec spec;
  spec.kind = kKinds.at(g.kind);
  if (g.given("slope") && spec.kind == GeneratorKind::Sinusoid)
    throw UsageError("--slope requires --kind sinusoid-linear or sinusoid-nonlinear");
  if (g.given("quad") && spec.kind != GeneratorKind::SinusoidNonlinearTrend)
    throw UsageError("--quad requires --kind sinusoid-nonlinear");
  spec.length = g.length;
  spec.period = g.period;
  spec.amplitude = g.amplitude;
  spec.slope = g.slope;
  spec.quadratic = g.quad;
  spec.phase = g.phase;
  spec.noise = g.noise;
  spec.seed = g.seed;

  const TimeSeries series = generate(spec);
  const std::string csv = io::series_csv(series.values());
  const json manifest = {
      {"tool", kToolName},
      {"version", kVersion},
      {"subcommand", "generate"},
      {"input", nullptr},
      {"config",
       {{"kind", g.kind},
        {"length", spec.length},
        {"period", spec.period},
        {"amplitude", spec.amplitude},
        {"slope", spec.kind == GeneratorKind::Sinusoid ? 0.0 : spec.slope},
        {"quad", spec.kind == GeneratorKind::SinusoidNonlinearTrend ? spec.quadratic : 0.0},
        {"phase", spec.phase},
        {"noise", spec.noise},
        {"seed", spec.seed}}},
      {"output", {{"path", g.output.empty() ? json(nullptr) : json(g.output)}, {"sha256", sha256_hex(csv)}, {"rows", series.size()}}},
  };
  const std::string manifest_text = manifest.dump(2) + '\n';

  if (g.output.empty()) {
    out << csv;
  } else {
    write_text(g.output, csv);
  }
  if (!g.report.empty()) {
    write_text(g.report, manifest_text);
  } else if (!g.output.empty()) {
    out << manifest_text;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-series forecasting by N-gram phrase matching", std::string(kToolName)};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  ForecastArgs forecast_args;
  CLI::App* forecast_cmd = app.add_subcommand("forecast", "Forecast the next P values of a series");
  add_forecast_options(*forecast_cmd, forecast_args);

  ForecastArgs backtest_args;
  CLI::App* backtest_cmd = app.add_subcommand("backtest", "Forecast the last P values from the rest and score them");
  add_forecast_options(*backtest_cmd, backtest_args);
  backtest_args.holdout_forced = true;

  GenerateArgs gen;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Write a synthetic seasonal series as CSV");
  gen.opts["kind"] = generate_cmd->add_option("--kind", gen.kind, "Series family")
                         ->check(CLI::IsMember({"sinusoid", "sinusoid-linear", "sinusoid-nonlinear"}));
  gen.opts["length"] = generate_cmd->add_option("--length", gen.length, "Number of values K")->check(CLI::PositiveNumber);
  gen.opts["period"] = generate_cmd->add_option("--period", gen.period, "Period in samples")->check(CLI::PositiveNumber);
  gen.opts["amplitude"] = generate_cmd->add_option("--amplitude", gen.amplitude, "Half the peak-to-peak range")
                              ->check(CLI::PositiveNumber);
  gen.opts["slope"] = generate_cmd->add_option("--slope", gen.slope, "Linear trend per step");
  gen.opts["quad"] = generate_cmd->add_option("--quad", gen.quad, "Quadratic trend coefficient");
  gen.opts["phase"] = generate_cmd->add_option("--phase", gen.phase, "Phase in radians");
  gen.opts["noise"] = generate_cmd->add_option("--noise", gen.noise, "Uniform noise half-width")
                          ->check(CLI::NonNegativeNumber);
  gen.opts["seed"] = generate_cmd->add_option("--seed", gen.seed, "Noise seed");
  gen.opts["output"] = generate_cmd->add_option("--output", gen.output, "CSV path (default: standard output)");
  gen.opts["report"] = generate_cmd->add_option("--report", gen.report, "Manifest JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*forecast_cmd || *backtest_cmd) {
      ForecastArgs& a = *forecast_cmd ? forecast_args : backtest_args;
      const std::string name = *forecast_cmd ? "forecast" : "backtest";
      a.window_given = a.given("window");
      check_forecast_combination(a);
      return a.given("batch") ? run_forecast_batch(a, name, err) : run_forecast_single(a, name, out, err);
    }
    return run_generate(gen, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lingcast::cli
