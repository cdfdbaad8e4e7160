// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: synth, smooth, track-human, track-object, refine, eval,
// run and visibility. Module settings are passed as --<module>.<key>=<value>.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intertrack/io.hpp"
#include "intertrack/kernels.hpp"
#include "intertrack/pipeline.hpp"
#include "intertrack/pose_utils.hpp"
#include "intertrack/synth.hpp"

namespace it = intertrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStage = 1;
constexpr int kExitUsage = 2;

bool is_module_key(const std::string& name) {
  const auto dot = name.find('.');
  return dot != std::string::npos && dot > 0 && dot + 1 < name.size();
}

// Splits "--module.key=value" and "--module.key value" out of argv.
std::vector<std::pair<std::string, std::string>> extract_overrides(std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      const std::string body = a.substr(2);
      const auto eq = body.find('=');
      const std::string name = body.substr(0, eq);
      if (is_module_key(name)) {
        if (eq != std::string::npos) {
          out.emplace_back(name, body.substr(eq + 1));
        } else if (i + 1 < args.size()) {
          out.emplace_back(name, args[++i]);
        } else {
          throw CLI::ArgumentMismatch("missing value for --" + name);
        }
        continue;
      }
    }
    rest.push_back(a);
  }
  args = std::move(rest);
  return out;
}

std::vector<it::Stage> parse_stages(const std::vector<std::string>& names) {
  std::vector<it::Stage> chosen;
  for (const auto& list : names) {
    std::size_t pos = 0;
    while (pos <= list.size()) {
      const auto comma = std::min(list.find(',', pos), list.size());
      const std::string name = list.substr(pos, comma - pos);
      if (!name.empty()) chosen.push_back(it::parse_stage(name));
      pos = comma + 1;
    }
  }
  std::vector<it::Stage> ordered;
  for (const it::Stage s : it::all_stages())
    if (std::find(chosen.begin(), chosen.end(), s) != chosen.end()) ordered.push_back(s);
  return ordered;
}

int write_visibility(const std::string& bundle_dir, const std::string& out_path, double radius) {
  const it::SequenceBundle bundle = it::load_sequence(bundle_dir);
  std::string text;
  for (const auto& f : bundle.frames) {
    text += it::format_double(it::visibility_ratio(f.object.view(), f.human_mask, bundle.camera, radius));
    text += '\n';
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    it::write_text(out_path, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::pair<std::string, std::string>> overrides;
  try {
    overrides = extract_overrides(args);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Interaction tracking: object and human reconstruction over video sequences"};
  app.require_subcommand(1);
  app.footer("Module settings: --<module>.<key>=<value>; modules: human-track, object-track, joint-refine, "
             "eval-metrics, synth-gen.");

  std::string bundle_dir, out_dir, config_file, template_file;
  std::vector<std::string> stage_names;
  std::optional<std::uint64_t> seed;
  bool binary = false;
  double radius = it::kDefaultSplatRadius;

  auto common = [&](CLI::App* sub, bool needs_bundle) {
    sub->add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed for every module");
    sub->add_option("--out", out_dir, "output directory")->required();
    if (needs_bundle) sub->add_option("--bundle", bundle_dir, "sequence directory")->required();
    sub->add_flag("--binary", binary, "write point clouds in the binary ITPC1 format");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence with ground truth");
  common(synth, false);

  std::vector<std::pair<CLI::App*, it::Stage>> single;
  for (const it::Stage s : it::all_stages()) {
    CLI::App* sub = app.add_subcommand(it::to_string(s), std::string("run the ") + it::to_string(s) + " stage");
    common(sub, true);
    if (s == it::Stage::TrackObject) {
      sub->add_option("--template", template_file, "fixed canonical shape")->check(CLI::ExistingFile);
    }
    single.emplace_back(sub, s);
  }

  CLI::App* run = app.add_subcommand("run", "run the pipeline stages in order");
  common(run, true);
  run->add_option("--stage", stage_names, "stages to run (comma separated); default all");
  run->add_option("--template", template_file, "fixed canonical shape")->check(CLI::ExistingFile);

  CLI::App* vis = app.add_subcommand("visibility", "per-frame visibility ratios from the object clouds and human masks");
  vis->add_option("--bundle", bundle_dir, "sequence directory")->required();
  vis->add_option("--out", out_dir, "output file; stdout when omitted");
  vis->add_option("--radius", radius, "splat radius in pixels");

  it::RunConfig cfg;
  std::vector<it::Stage> stages;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    if (seed) cfg.apply_seed(*seed);
    cfg.binary = binary;
    if (!template_file.empty()) cfg.object_template = template_file;
    if (run->parsed()) {
      stages = stage_names.empty() ? it::all_stages() : parse_stages(stage_names);
      if (stages.empty()) throw it::Error(it::ErrorCode::InvalidConfig, "no stage selected");
    }
    for (const auto& [sub, s] : single)
      if (sub->parsed()) stages = {s};
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const it::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  it::configure_threads_from_env();
  try {
    if (synth->parsed()) {
      const it::SynthResult r = it::gen_sequence(cfg.synth);
      it::save_sequence(out_dir, r.bundle, cfg.binary);
      it::save_truth(std::filesystem::path(out_dir) / "gt", r.truth);
      return kExitOk;
    }
    if (vis->parsed()) return write_visibility(bundle_dir, out_dir, radius);
    it::run_pipeline(bundle_dir, out_dir, cfg, stages);
  } catch (const it::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
