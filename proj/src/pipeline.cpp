// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <functional>
#include <map>
#include <sstream>

#include "intertrack/error.hpp"
#include "intertrack/io.hpp"
#include "intertrack/pose_utils.hpp"

namespace intertrack {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto r = std::from_chars(value.data(), value.data() + value.size(), v);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidConfig, "invalid value '" + value + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw Error(ErrorCode::InvalidConfig, "invalid boolean '" + value + "' for " + key);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T RunConfig::*group, double T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) { (c.*group).*field = parse_number<double>(k, v); };
}
template <typename T>
Setter integer(T RunConfig::*group, int T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) { (c.*group).*field = parse_number<int>(k, v); };
}
template <typename T>
Setter count(T RunConfig::*group, std::size_t T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) {
    (c.*group).*field = parse_number<std::size_t>(k, v);
  };
}
template <typename T>
Setter flag(T RunConfig::*group, bool T::*field) {
  return [=](RunConfig& c, const std::string& k, const std::string& v) { (c.*group).*field = parse_bool(k, v); };
}

const std::map<std::string, Setter>& registry() {
  static const std::map<std::string, Setter> r = [] {
    std::map<std::string, Setter> m;
    const auto H = &RunConfig::human;
    m["human-track.lambda_cd"] = number(H, &HumanFitConfig::lambda_cd);
    m["human-track.lambda_prior"] = number(H, &HumanFitConfig::lambda_prior);
    m["human-track.lambda_acc"] = number(H, &HumanFitConfig::lambda_acc);
    m["human-track.steps"] = integer(H, &HumanFitConfig::steps);
    m["human-track.learning_rate"] = number(H, &HumanFitConfig::learning_rate);
    m["human-track.batch_frames"] = integer(H, &HumanFitConfig::batch_frames);

    const auto O = &RunConfig::object;
    m["object-track.lambda_cd"] = number(O, &ObjectFitConfig::lambda_cd);
    m["object-track.lambda_occ"] = number(O, &ObjectFitConfig::lambda_occ);
    m["object-track.lambda_acc_points"] = number(O, &ObjectFitConfig::lambda_acc_points);
    m["object-track.lambda_acc_rotation"] = number(O, &ObjectFitConfig::lambda_acc_rotation);
    m["object-track.lambda_acc_translation"] = number(O, &ObjectFitConfig::lambda_acc_translation);
    m["object-track.lambda_acc_scale"] = number(O, &ObjectFitConfig::lambda_acc_scale);
    m["object-track.steps"] = integer(O, &ObjectFitConfig::steps);
    m["object-track.learning_rate"] = number(O, &ObjectFitConfig::learning_rate);
    m["object-track.visibility_threshold"] = number(O, &ObjectFitConfig::visibility_threshold);
    m["object-track.batch_frames"] = integer(O, &ObjectFitConfig::batch_frames);
    m["object-track.splat_radius"] = number(O, &ObjectFitConfig::splat_radius);
    m["object-track.low_quality_poses"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (parse_bool(k, v)) c.object.steps = kLowQualityObjectSteps;
    };

    const auto J = &RunConfig::joint;
    m["joint-refine.delta"] = number(J, &JointConfig::delta);
    m["joint-refine.lambda_contact"] = number(J, &JointConfig::lambda_contact);
    m["joint-refine.steps"] = integer(J, &JointConfig::steps);
    m["joint-refine.learning_rate_human"] = number(J, &JointConfig::learning_rate_human);
    m["joint-refine.learning_rate_object"] = number(J, &JointConfig::learning_rate_object);
    m["joint-refine.batch_frames"] = integer(J, &JointConfig::batch_frames);

    m["eval-metrics.tau"] = number(&RunConfig::eval, &EvalConfig::tau);
    m["eval-metrics.align"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.eval.align = parse_align_mode(v);
    };

    const auto S = &RunConfig::synth;
    m["synth-gen.frames"] = count(S, &SynthConfig::frames);
    m["synth-gen.fps"] = number(S, &SynthConfig::fps);
    m["synth-gen.object"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.synth.object = parse_object_kind(v);
    };
    m["synth-gen.object_points"] = count(S, &SynthConfig::object_points);
    m["synth-gen.dense_points"] = count(S, &SynthConfig::dense_points);
    m["synth-gen.human_points"] = count(S, &SynthConfig::human_points);
    m["synth-gen.template_vertices"] = count(S, &SynthConfig::template_vertices);
    m["synth-gen.noise"] = number(S, &SynthConfig::noise);
    m["synth-gen.shuffle"] = flag(S, &SynthConfig::shuffle);
    m["synth-gen.scale_jitter"] = number(S, &SynthConfig::scale_jitter);
    m["synth-gen.occluded_fraction"] = number(S, &SynthConfig::occluded_fraction);
    m["synth-gen.occlusion_level"] = number(S, &SynthConfig::occlusion_level);
    m["synth-gen.degraded_noise"] = number(S, &SynthConfig::degraded_noise);
    m["synth-gen.contact"] = flag(S, &SynthConfig::contact);
    m["synth-gen.contact_begin"] = count(S, &SynthConfig::contact_begin);
    m["synth-gen.contact_end"] = count(S, &SynthConfig::contact_end);
    m["synth-gen.contact_offset"] = number(S, &SynthConfig::contact_offset);
    m["synth-gen.window"] = count(S, &SynthConfig::window);
    m["synth-gen.window_noise_deg"] = number(S, &SynthConfig::window_noise_deg);
    m["synth-gen.human_pose_noise"] = number(S, &SynthConfig::human_pose_noise);
    m["synth-gen.human_translation_noise"] = number(S, &SynthConfig::human_translation_noise);
    m["synth-gen.human_shape_noise"] = number(S, &SynthConfig::human_shape_noise);
    m["synth-gen.splat_radius"] = number(S, &SynthConfig::splat_radius);
    m["synth-gen.max_sweep_deg"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.synth.trajectory.max_sweep_deg = parse_number<double>(k, v);
    };
    m["synth-gen.body_amplitude"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.synth.body.amplitude = parse_number<double>(k, v);
    };
    return m;
  }();
  return r;
}

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  return colon == std::string::npos ? what : what.substr(colon + 2);
}

using Clock = std::chrono::steady_clock;

BodyModel model_of(const SequenceBundle& bundle) {
  return BodyModel(bundle.body_template ? *bundle.body_template : default_template());
}

std::vector<Mat3> smoothed_rotations(const SequenceBundle& bundle) {
  if (bundle.rotation_windows.empty()) {
    std::vector<Mat3> r;
    for (const auto& f : bundle.frames) r.push_back(f.rotation_estimate);
    return r;
  }
  return smooth_rotations(bundle.rotation_windows, bundle.size());
}

HumanTrack human_init(const BodyModel& model, const SequenceBundle& bundle) {
  if (!bundle.human_init.empty()) return HumanTrack::from_params(bundle.human_init);
  std::vector<BodyParams> params;
  for (const auto& f : bundle.frames) {
    BodyParams p = BodyParams::zeros(model.num_joints(), model.num_shape());
    p.translation = f.human.centroid();
    params.push_back(std::move(p));
  }
  return HumanTrack::from_params(params);
}

const char* const kSmoothedFile = "rotations_smoothed.txt";

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    apply_seed(parse_number<std::uint64_t>(key, value));
    return;
  }
  const auto& r = registry();
  const auto it = r.find(key);
  if (it == r.end()) throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + key + "'");
  it->second(*this, key, value);
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(n) + ": expected key=value");
    }
    auto trim = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::apply_seed(std::uint64_t value) {
  seed = value;
  human.seed = value;
  object.seed = value;
  joint.seed = value;
  synth.seed = value;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out{"seed"};
    for (const auto& [key, setter] : registry()) out.push_back(key);
    return out;
  }();
  return k;
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Smooth:
      return "smooth";
    case Stage::TrackHuman:
      return "track-human";
    case Stage::TrackObject:
      return "track-object";
    case Stage::Refine:
      return "refine";
    case Stage::Eval:
      return "eval";
  }
  return "smooth";
}

Stage parse_stage(const std::string& name) {
  for (const Stage s : all_stages())
    if (name == to_string(s)) return s;
  throw Error(ErrorCode::InvalidConfig, "unknown stage '" + name + "'");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> s{Stage::Smooth, Stage::TrackHuman, Stage::TrackObject, Stage::Refine, Stage::Eval};
  return s;
}

StageError::StageError(Stage stage, const Error& cause)
    : Error(cause.code(), std::string("stage ") + to_string(stage) + ": " + strip_code(cause)), stage_(stage) {}

MetricReport evaluate_tracks(const BodyModel& model, const HumanTrack& human, const ObjectTrack& object,
                             const GroundTruth& truth, const EvalConfig& cfg) {
  const std::size_t T = human.size();
  if (object.size() != T || truth.poses.size() != T || truth.body.size() != T) {
    throw Error(ErrorCode::LengthMismatch, "tracks and ground truth differ in length");
  }
  MetricReport r;
  if (T == 0) return r;
  std::vector<double> hf(T), of(T), cf(T), cd(T);
  std::vector<std::vector<Vec3>> motion(T);
#pragma omp parallel for schedule(dynamic) if (T > 1)
  for (std::size_t i = 0; i < T; ++i) {
    auto hp = posed_vertices(model, human.params(i));
    const auto hg = posed_vertices(model, truth.body[i]);
    auto op = object.posed(i);
    const auto og = apply_similarity(truth.canonical, truth.poses[i]);
    if (cfg.align == AlignMode::Joint) {
      const SimilarityPose a = procrustes_align(hp, hg);
      hp = apply_similarity(hp, a);
      op = apply_similarity(op, a);
    } else if (cfg.align == AlignMode::PerEntity) {
      hp = apply_similarity(hp, procrustes_align(hp, hg));
      // Object: Procrustes on nearest-neighbour correspondences, iterated.
      const NeighborIndex index(og);
      for (int it = 0; it < 10; ++it) {
        const auto nn = nearest_neighbors(index, op);
        std::vector<std::size_t> corr;
        for (const auto& n : nn) corr.push_back(n.index);
        op = apply_similarity(op, procrustes_align(op, og, corr));
      }
    }
    hf[i] = fscore(hp, hg, cfg.tau);
    of[i] = fscore(op, og, cfg.tau);
    std::vector<Vec3> pc = hp, gc = hg;
    pc.insert(pc.end(), op.begin(), op.end());
    gc.insert(gc.end(), og.begin(), og.end());
    cf[i] = fscore(pc, gc, cfg.tau);
    cd[i] = chamfer_l1(op, og);
    motion[i] = std::move(pc);
  }
  for (std::size_t i = 0; i < T; ++i) {
    r.human_fscore += hf[i] / static_cast<double>(T);
    r.object_fscore += of[i] / static_cast<double>(T);
    r.combined_fscore += cf[i] / static_cast<double>(T);
    r.chamfer_cm += 100.0 * cd[i] / static_cast<double>(T);
  }
  const SimilarityPose gauge = estimate_gauge(object.poses, truth.poses);
  const PoseErrors pe = pose_errors(object.poses, truth.poses, gauge);
  r.rot_mean_deg = pe.rotation.mean_deg;
  r.rot_median_deg = pe.rotation.median_deg;
  r.trans_cm = 100.0 * pe.translation_mean;
  r.jitter = jitter(motion);
  return r;
}

void run_pipeline(const std::filesystem::path& bundle_dir, const std::filesystem::path& out_dir, const RunConfig& cfg,
                  const std::vector<Stage>& stages) {
  auto selected = [&](Stage s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
  const SequenceBundle bundle = load_sequence(bundle_dir);
  const BodyModel model = model_of(bundle);
  double fitting_seconds = 0.0;
  bool fitted = false;

  auto run = [&](Stage stage, auto&& body) {
    if (!selected(stage)) return;
    const auto t0 = Clock::now();
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(stage, e);
    }
    if (stage != Stage::Eval) {
      fitting_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
      fitted = true;
    }
  };

  run(Stage::Smooth, [&] { write_rotations(out_dir / kSmoothedFile, smoothed_rotations(bundle)); });

  run(Stage::TrackHuman, [&] {
    const auto result = fit_human(model, joint_targets(bundle).human, human_init(model, bundle), cfg.human);
    save_results(out_dir, {result.track, std::nullopt, std::nullopt}, cfg.binary);
  });

  run(Stage::TrackObject, [&] {
    const auto rotations = std::filesystem::exists(out_dir / kSmoothedFile) ? read_rotations(out_dir / kSmoothedFile)
                                                                            : smoothed_rotations(bundle);
    if (rotations.size() != bundle.size()) {
      throw Error(ErrorCode::LengthMismatch, "smoothed rotations do not match the frame count");
    }
    ObjectFitResult result;
    if (cfg.object_template) {
      ObjectTrack init;
      init.canonical = read_points(*cfg.object_template);
      if (init.canonical.empty()) throw Error(ErrorCode::EmptyCloud, "object template is empty");
      init.poses.resize(bundle.size());
      for (std::size_t i = 0; i < bundle.size(); ++i) {
        init.poses[i].rotation = rotations[i];
        init.poses[i].translation = bundle.frames[i].object.centroid();
      }
      ObjectFitConfig frozen = cfg.object;
      frozen.freeze_canonical = true;
      result = fit_object(bundle, init, frozen);
    } else {
      result = fit_object(bundle, rotations, cfg.object);
    }
    save_results(out_dir, {std::nullopt, result.track, std::nullopt}, cfg.binary);
  });

  run(Stage::Refine, [&] {
    const SavedResults prior = load_results(out_dir);
    if (!prior.human || !prior.object) {
      throw Error(ErrorCode::MissingFile, "refine needs body_params.txt and object results in " + out_dir.string());
    }
    const auto result = refine_joint(model, *prior.human, *prior.object, bundle, cfg.human, cfg.object, cfg.joint);
    save_results(out_dir, {result.human, result.object, std::nullopt}, cfg.binary);
    write_contacts(out_dir / "contacts.txt", result.contacts);
  });

  run(Stage::Eval, [&] {
    const SavedResults prior = load_results(out_dir);
    if (!prior.human || !prior.object) {
      throw Error(ErrorCode::MissingFile, "eval needs body_params.txt and object results in " + out_dir.string());
    }
    const GroundTruth truth = load_truth(bundle_dir / "gt");
    MetricReport report = evaluate_tracks(model, *prior.human, *prior.object, truth, cfg.eval);
    // Without a fitting stage in this run, the recorded fitting time is kept.
    report.runtime_s = fitted ? fitting_seconds : (prior.report ? prior.report->runtime_s : 0.0);
    save_results(out_dir, {std::nullopt, std::nullopt, report}, cfg.binary);
  });
}

}  // namespace intertrack
