// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration and the stage driver: smooth, track-human, track-object,
// refine and eval over a sequence directory.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intertrack/error.hpp"
#include "intertrack/human_track.hpp"
#include "intertrack/joint_refine.hpp"
#include "intertrack/metrics.hpp"
#include "intertrack/object_track.hpp"
#include "intertrack/synth.hpp"

namespace intertrack {

struct EvalConfig {
  double tau = 0.01;
  AlignMode align = AlignMode::None;
};

/// Every module configuration, addressable as "<module>.<key>".
struct RunConfig {
  HumanFitConfig human;
  ObjectFitConfig object;
  JointConfig joint;
  EvalConfig eval;
  SynthConfig synth;
  std::uint64_t seed = 0;
  bool binary = false;
  std::optional<std::filesystem::path> object_template;

  /// Throws InvalidConfig for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  /// key=value lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  /// Propagates the run seed into every module.
  void apply_seed(std::uint64_t value);

  static const std::vector<std::string>& keys();
};

enum class Stage { Smooth, TrackHuman, TrackObject, Refine, Eval };

const char* to_string(Stage stage);
Stage parse_stage(const std::string& name);
const std::vector<Stage>& all_stages();

/// Raised by run_pipeline; carries the failing stage name in what().
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause);
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Runs the selected stages in pipeline order, reading earlier results from
/// `out_dir` when a stage is run on its own.
void run_pipeline(const std::filesystem::path& bundle_dir, const std::filesystem::path& out_dir, const RunConfig& cfg,
                  const std::vector<Stage>& stages);

/// Metrics of the tracks against ground truth; runtime is left at zero.
MetricReport evaluate_tracks(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                             const GroundTruth& truth, const EvalConfig& cfg);

}  // namespace intertrack
