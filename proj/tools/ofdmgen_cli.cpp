// ofdmgen command-line front end: dataset generation, representation
// conversion, evaluation and report rendering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ofdmgen/container.hpp"
#include "ofdmgen/dataset.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/evaluate.hpp"
#include "ofdmgen/parallel.hpp"
#include "ofdmgen/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ofdmgen;

namespace {

void print_error(const std::string& code, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << std::endl;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

WaveformSpec load_spec(const fs::path& path) {
  const auto j = read_json_file(path);
  try {
    auto spec = j.get<WaveformSpec>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
}

// Specs describe the same waveform family when everything except the seed
// (and channel seed) agrees.
bool same_family(WaveformSpec a, WaveformSpec b) {
  a.seed = b.seed = 0;
  if (a.channel && b.channel) a.channel->seed = b.channel->seed = 0;
  return a == b;
}

struct GenerateArgs {
  std::string preset;
  std::string spec_path;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct TransformArgs {
  std::string in;
  std::string out;
  std::string to;
  std::string scaling;
};

struct EvaluateArgs {
  std::string gen;
  std::string target;
  std::string out;
  std::string csv_dir;
  std::size_t profile_limit = 1024;
};

struct ReportArgs {
  std::string in;
  std::string csv_dir;
};

int run_generate(const GenerateArgs& a) {
  const WaveformSpec spec = a.preset.empty() ? load_spec(a.spec_path) : preset(a.preset);
  generate_dataset_file(spec, a.count, a.seed, a.out);
  ContainerReader check(a.out);
  json summary = {{"out", a.out},
                  {"count", check.header().count},
                  {"seed", a.seed},
                  {"bytes", fs::file_size(a.out)},
                  {"item_shape", check.header().item_shape()}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int run_transform(const TransformArgs& a) {
  std::optional<ScalingMode> scaling;
  if (!a.scaling.empty()) scaling = parse_scaling_mode(a.scaling);
  convert_file(a.in, a.out, parse_representation(a.to), scaling);
  ContainerReader check(a.out);
  json summary = {{"out", a.out},
                  {"representation", to_string(check.header().representation)},
                  {"item_shape", check.header().item_shape()},
                  {"scaling", scaling ? json(to_string(*scaling)) : json(nullptr)}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  const auto gen = read_container(a.gen);
  const auto target = read_container(a.target);
  if (!same_family(gen.header.spec, target.header.spec))
    throw Error(ErrorCode::dimension_mismatch, "generated and target datasets were produced with different specs");
  EvalOptions options;
  options.profile_limit = a.profile_limit;
  const auto report = evaluate(to_waveforms(gen), to_waveforms(target), gen.header.spec, options);
  const json j = report_to_json(report);
  write_json_file(a.out, j);
  if (!a.csv_dir.empty()) write_report_csv(j, a.csv_dir);
  json summary = {{"psd_distance", report.psd_distance},
                  {"evm_db", report.evm_db},
                  {"evm_db_target", report.evm_db_target},
                  {"cp_relerr_pct", report.cp_relerr_pct}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int run_report(const ReportArgs& a) {
  write_report_csv(read_json_file(a.in), a.csv_dir);
  std::cout << json{{"csv_dir", a.csv_dir}}.dump() << std::endl;
  return 0;
}

int run_presets(bool as_json) {
  if (!as_json) {
    for (const auto& group : experiment_presets())
      for (const auto& [name, spec] : group.specs) std::cout << name << '\n';
    return 0;
  }
  json out = json::object();
  for (const auto& group : experiment_presets())
    for (const auto& [name, spec] : group.specs) out[name] = spec;
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int run_info(const std::string& in) {
  ContainerReader reader(in);
  std::cout << json::parse(serialize_header(reader.header())).dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM waveform dataset generator and evaluator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: OFDMGEN_THREADS or hardware)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a raw I/Q dataset container");
  auto* preset_opt = generate->add_option("--preset", gen.preset, "Named configuration (see `presets`)");
  auto* spec_opt = generate->add_option("--spec", gen.spec_path, "Waveform spec JSON file")->check(CLI::ExistingFile);
  preset_opt->excludes(spec_opt);
  generate->add_option("--count", gen.count, "Number of waveforms")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Dataset seed")->required();
  generate->add_option("--out", gen.out, "Output container path")->required();

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "Convert between raw and STFT representations");
  transform->add_option("--in", tr.in, "Input container")->required()->check(CLI::ExistingFile);
  transform->add_option("--out", tr.out, "Output container")->required();
  transform->add_option("--to", tr.to, "Target representation")->required()->check(CLI::IsMember({"raw", "stft"}));
  transform->add_option("--scaling", tr.scaling, "Min-max scaling to [-1, 1]")
      ->check(CLI::IsMember({"global", "featurewise"}));

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a generated dataset against a target dataset");
  evaluate_cmd->add_option("--gen", ev.gen, "Generated dataset container")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--target", ev.target, "Target dataset container")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", ev.out, "Report JSON path")->required();
  evaluate_cmd->add_option("--csv-dir", ev.csv_dir, "Also write plot-ready CSV files here");
  evaluate_cmd->add_option("--profile-limit", ev.profile_limit, "Waveforms in the median correlation profile")
      ->capture_default_str();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Render CSV files from a saved report");
  report->add_option("--in", rep.in, "Report JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--csv-dir", rep.csv_dir, "Output directory")->required();

  bool presets_json = false;
  auto* presets = app.add_subcommand("presets", "List named configurations");
  presets->add_flag("--json", presets_json, "Print full specs as JSON");

  std::string info_in;
  auto* info = app.add_subcommand("info", "Print a container header");
  info->add_option("--in", info_in, "Container path")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (generate->parsed()) {
      if (gen.preset.empty() && gen.spec_path.empty()) {
        print_error("usage", "generate needs --preset or --spec");
        return 2;
      }
      return run_generate(gen);
    }
    if (transform->parsed()) return run_transform(tr);
    if (evaluate_cmd->parsed()) return run_evaluate(ev);
    if (report->parsed()) return run_report(rep);
    if (presets->parsed()) return run_presets(presets_json);
    if (info->parsed()) return run_info(info_in);
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
