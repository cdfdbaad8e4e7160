// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include <unistd.h>

#include "intertrack/error.hpp"
#include "intertrack/io.hpp"
#include "intertrack/pipeline.hpp"

using namespace intertrack;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("intertrack_pipe_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig quick_config() {
  RunConfig cfg;
  for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{{"human-track.steps", "20"},
                                                                             {"object-track.steps", "20"},
                                                                             {"joint-refine.steps", "10"}}) {
    cfg.set(k, v);
  }
  cfg.apply_seed(3);
  return cfg;
}

fs::path make_bundle(const fs::path& root) {
  SynthConfig s;
  s.frames = 5;
  s.object_points = 64;
  s.dense_points = 256;
  s.human_points = 96;
  s.template_vertices = 128;
  s.window = 4;
  s.seed = 9;
  const auto r = gen_sequence(s);
  save_sequence(root / "bundle", r.bundle);
  save_truth(root / "bundle" / "gt", r.truth);
  return root / "bundle";
}

}  // namespace

TEST_CASE("config keys") {
  RunConfig cfg;
  cfg.set("human-track.lambda_cd", "42");
  CHECK(cfg.human.lambda_cd == 42.0);
  cfg.set("object-track.steps", "123");
  CHECK(cfg.object.steps == 123);
  cfg.set("object-track.low_quality_poses", "true");
  CHECK(cfg.object.steps == 16000);
  cfg.set("joint-refine.delta", "0.03");
  CHECK(cfg.joint.delta == 0.03);
  cfg.set("eval-metrics.tau", "0.02");
  CHECK(cfg.eval.tau == 0.02);
  cfg.set("synth-gen.object", "box");
  CHECK(cfg.synth.object == ObjectKind::Box);

  for (const auto& key : RunConfig::keys()) CHECK((key.find('.') != std::string::npos || key == "seed"));

  auto code = [&](const std::string& k, const std::string& v) {
    try {
      cfg.set(k, v);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code("human-track.bogus", "1") == ErrorCode::InvalidConfig);
  CHECK(code("nomodule", "1") == ErrorCode::InvalidConfig);
  CHECK(code("human-track.steps", "many") == ErrorCode::InvalidConfig);
  CHECK(code("human-track.steps", "12x") == ErrorCode::InvalidConfig);

  TempDir tmp("cfg");
  std::ofstream(tmp.path / "a.cfg") << "# comment\nhuman-track.steps = 7\n\nseed=5\n";
  cfg.load_file(tmp.path / "a.cfg");
  CHECK(cfg.human.steps == 7);
  std::ofstream(tmp.path / "b.cfg") << "human-track.steps 7\n";
  try {
    cfg.load_file(tmp.path / "b.cfg");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("b.cfg:1") != std::string::npos);
  }
}

TEST_CASE("stage names") {
  for (const auto s : all_stages()) CHECK(parse_stage(to_string(s)) == s);
  CHECK(all_stages().size() == 5);
  CHECK_THROWS_AS(parse_stage("fly"), Error);
  const StageError e(Stage::TrackObject, Error(ErrorCode::NoVisibleFrame, "none"));
  CHECK(e.code() == ErrorCode::NoVisibleFrame);
  CHECK(std::string(e.what()).find("track-object") != std::string::npos);
}

TEST_CASE("full run and eval-only recomputation") {
  TempDir tmp("run");
  const auto bundle = make_bundle(tmp.path);
  const auto cfg = quick_config();
  run_pipeline(bundle, tmp.path / "out", cfg, all_stages());
  for (const char* f : {"rotations_smoothed.txt", "body_params.txt", "canonical_object.pts", "object_poses.txt",
                        "contacts.txt", "report.json"}) {
    CHECK(fs::exists(tmp.path / "out" / f));
  }
  const auto report = report_from_json(slurp(tmp.path / "out/report.json"));
  CHECK(report.human_fscore >= 0.0);
  CHECK(report.human_fscore <= 1.0);
  CHECK(report.runtime_s > 0.0);

  const std::string before = slurp(tmp.path / "out/report.json");
  run_pipeline(bundle, tmp.path / "out", cfg, {Stage::Eval});
  CHECK(slurp(tmp.path / "out/report.json") == before);

  // Same seed, fresh directory: identical data files.
  run_pipeline(bundle, tmp.path / "out2", cfg, all_stages());
  for (const char* f : {"rotations_smoothed.txt", "body_params.txt", "canonical_object.pts", "object_poses.txt",
                        "contacts.txt"}) {
    CHECK(slurp(tmp.path / "out" / f) == slurp(tmp.path / "out2" / f));
  }
}

TEST_CASE("stage errors carry the stage name") {
  TempDir tmp("stage");
  const auto bundle = make_bundle(tmp.path);
  auto cfg = quick_config();
  try {
    run_pipeline(bundle, tmp.path / "empty", cfg, {Stage::Refine});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Refine);
    CHECK(std::string(e.what()).find("refine") != std::string::npos);
  }

  cfg.set("object-track.visibility_threshold", "1");
  std::ofstream(bundle / "visibility.txt") << "0.1\n0.1\n0.1\n0.1\n0.1\n";
  try {
    run_pipeline(bundle, tmp.path / "out", cfg, {Stage::Smooth, Stage::TrackObject});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::TrackObject);
    CHECK(e.code() == ErrorCode::NoVisibleFrame);
  }
}

TEST_CASE("template mode freezes the canonical shape") {
  TempDir tmp("template");
  const auto bundle = make_bundle(tmp.path);
  const auto truth = load_truth(bundle / "gt");
  write_points(tmp.path / "template.pts", truth.canonical);
  auto cfg = quick_config();
  cfg.object_template = tmp.path / "template.pts";
  run_pipeline(bundle, tmp.path / "out", cfg, {Stage::Smooth, Stage::TrackObject});
  CHECK(read_points(tmp.path / "out/canonical_object.pts") == truth.canonical);
}
