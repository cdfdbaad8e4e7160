// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "intertrack/error.hpp"
#include "intertrack/geometry.hpp"
#include "intertrack/pose_utils.hpp"
#include "intertrack/rotation.hpp"

namespace intertrack {

namespace {

// Independent stream per purpose, derived from the master seed.
std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Mat3 slerp(const Mat3& a, const Mat3& b, double u) {
  return axis_angle_to_matrix(u * matrix_to_axis_angle(b * a.transpose())) * a;
}

struct Box {
  Vec3 lo, hi;
  double area() const {
    const Vec3 e = hi - lo;
    return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.x() * e.z());
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array() - 1e-12).all() && (p.array() <= hi.array() + 1e-12).all();
  }
  Vec3 sample(std::mt19937_64& rng) const {
    const Vec3 e = hi - lo;
    const double faces[3] = {e.y() * e.z(), e.x() * e.z(), e.x() * e.y()};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(rng) * (faces[0] + faces[1] + faces[2]);
    int axis = 0;
    while (axis < 2 && r > faces[axis]) r -= faces[axis++];
    Vec3 p(lo.x() + u(rng) * e.x(), lo.y() + u(rng) * e.y(), lo.z() + u(rng) * e.z());
    p[axis] = u(rng) < 0.5 ? lo[axis] : hi[axis];
    return p;
  }
};

std::vector<Vec3> sample_boxes(const std::vector<Box>& boxes, std::size_t count, std::mt19937_64& rng) {
  std::vector<double> area;
  for (const auto& b : boxes) area.push_back(b.area());
  std::discrete_distribution<std::size_t> pick(area.begin(), area.end());
  std::vector<Vec3> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    const std::size_t k = pick(rng);
    const Vec3 p = boxes[k].sample(rng);
    bool inside_other = false;
    for (std::size_t j = 0; j < boxes.size(); ++j) inside_other |= j != k && boxes[j].contains(p);
    if (!inside_other) pts.push_back(p);
  }
  return pts;
}

std::vector<Vec3> sample_cylinder(double radius, double height, std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double side = 2.0 * M_PI * radius * height;
  const double cap = M_PI * radius * radius;
  std::vector<Vec3> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    const double r = u(rng) * (side + 2.0 * cap);
    const double phi = 2.0 * M_PI * u(rng);
    if (r < side) {
      pts.emplace_back(radius * std::cos(phi), (u(rng) - 0.5) * height, radius * std::sin(phi));
    } else {
      const double rr = radius * std::sqrt(u(rng));
      pts.emplace_back(rr * std::cos(phi), (r < side + cap ? -0.5 : 0.5) * height, rr * std::sin(phi));
    }
  }
  return pts;
}

std::vector<Vec3> sample_blob(std::size_t count, std::mt19937_64& rng) {
  struct Bump {
    Vec3 dir;
    double amp;
  };
  std::vector<Bump> bumps(5);
  std::uniform_real_distribution<double> amp(0.1, 0.25);
  for (auto& b : bumps) b = {random_unit(rng), amp(rng)};
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 d = random_unit(rng);
    double r = 0.05;
    for (const auto& b : bumps) r += 0.05 * b.amp * std::exp(-4.0 * (1.0 - d.dot(b.dir)));
    pts.push_back(r * d);
  }
  return pts;
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

void add_noise(std::vector<Vec3>& pts, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& p : pts) p += Vec3(n(rng), n(rng), n(rng));
}

void jitter_scale(std::vector<Vec3>& pts, double range, std::mt19937_64& rng) {
  if (range <= 0.0 || pts.empty()) return;
  std::uniform_real_distribution<double> u(-range, range);
  const double s = std::exp(u(rng));
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  for (auto& p : pts) p = c + s * (p - c);
}

// Planar patch of points in front of the object covering a share of its image
// extent from one side.
std::vector<Vec3> occluder_patch(std::span<const Vec3> object, const Camera& cam, double share, bool from_left) {
  const auto proj = project_points(object, cam);
  double u0 = 1e9, u1 = -1e9, v0 = 1e9, v1 = -1e9, zmin = 1e9;
  for (const auto& p : proj) {
    u0 = std::min(u0, p.pixel.x());
    u1 = std::max(u1, p.pixel.x());
    v0 = std::min(v0, p.pixel.y());
    v1 = std::max(v1, p.pixel.y());
    zmin = std::min(zmin, p.depth);
  }
  const double z = std::max(0.3, zmin - 0.12);
  const double margin = 4.0;
  const double width = share * (u1 - u0);
  const double ua = from_left ? u0 - margin : u1 - width;
  const double ub = from_left ? u0 + width : u1 + margin;
  const double va = v0 - margin, vb = v1 + margin;
  const double step = 0.5;
  std::vector<Vec3> pts;
  for (double v = va; v <= vb; v += step) {
    for (double u = ua; u <= ub; u += step) {
      pts.emplace_back((u - cam.cx) * z / cam.fx, (v - cam.cy) * z / cam.fy, z);
    }
  }
  return pts;
}

}  // namespace

ObjectKind parse_object_kind(const std::string& name) {
  if (name == "box") return ObjectKind::Box;
  if (name == "cylinder") return ObjectKind::Cylinder;
  if (name == "l-shape") return ObjectKind::LShape;
  if (name == "blob") return ObjectKind::Blob;
  throw Error(ErrorCode::InvalidConfig, "unknown object kind '" + name + "'");
}

const char* to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Box:
      return "box";
    case ObjectKind::Cylinder:
      return "cylinder";
    case ObjectKind::LShape:
      return "l-shape";
    case ObjectKind::Blob:
      return "blob";
  }
  return "box";
}

void SynthConfig::validate() const {
  if (frames < 3) throw Error(ErrorCode::InvalidConfig, "synth frames must be at least 3");
  if (object_points < 16) throw Error(ErrorCode::InvalidConfig, "synth object_points must be at least 16");
  if (dense_points < object_points) throw Error(ErrorCode::InvalidConfig, "dense_points must cover object_points");
  if (human_points < 1 || human_points > template_vertices) {
    throw Error(ErrorCode::InvalidConfig, "human_points must be in [1, template_vertices]");
  }
  if (!(noise >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise must be non-negative");
  if (!(scale_jitter >= 0.0)) throw Error(ErrorCode::InvalidConfig, "scale_jitter must be non-negative");
  if (!(occluded_fraction >= 0.0 && occluded_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "occluded_fraction must be in [0, 1]");
  }
  if (!(occlusion_level >= 0.0 && occlusion_level < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "occlusion_level must be in [0, 1)");
  }
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be positive");
  if (body.amplitude < 0.0 || body.amplitude > 0.6) throw Error(ErrorCode::InvalidConfig, "body amplitude must be in [0, 0.6]");
  if (trajectory.max_sweep_deg < 0.0 || trajectory.max_sweep_deg > 90.0) {
    throw Error(ErrorCode::InvalidConfig, "rotation sweep must be in [0, 90] degrees");
  }
  if ((trajectory.box_half * 2.0).prod() > 1.0 + 1e-12) throw Error(ErrorCode::InvalidConfig, "translation box exceeds 1 m^3");
  if (trajectory.rotation_controls < 2) throw Error(ErrorCode::InvalidConfig, "rotation_controls must be at least 2");
  if (!(splat_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "splat_radius must be positive");
}

std::vector<Vec3> sample_object_surface(ObjectKind kind, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec3> pts;
  switch (kind) {
    case ObjectKind::Box:
      pts = sample_boxes({{Vec3(0, 0, 0), Vec3(0.12, 0.08, 0.06)}}, count, rng);
      break;
    case ObjectKind::Cylinder:
      pts = sample_cylinder(0.04, 0.14, count, rng);
      break;
    case ObjectKind::LShape:
      pts = sample_boxes({{Vec3(0, 0, 0), Vec3(0.16, 0.05, 0.05)}, {Vec3(0, 0.05, 0), Vec3(0.05, 0.12, 0.05)}}, count,
                         rng);
      break;
    case ObjectKind::Blob:
      pts = sample_blob(count, rng);
      break;
  }
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  for (auto& p : pts) p -= c;
  return pts;
}

std::vector<Mat3> trajectory_controls(std::size_t frames, std::uint64_t seed, const TrajectoryConfig& cfg) {
  std::mt19937_64 rng(substream(seed, 0));
  const double cap = std::min(cfg.max_sweep_deg, cfg.max_deg_per_frame * static_cast<double>(frames - 1));
  std::uniform_real_distribution<double> frac(0.6, 1.0);
  const double sweep = frac(rng) * cap * M_PI / 180.0;
  const std::size_t M = cfg.rotation_controls;
  std::vector<Mat3> controls{random_rotation(rng)};
  for (std::size_t k = 1; k < M; ++k) {
    const Vec3 axis = random_unit(rng);
    controls.push_back(axis_angle_to_matrix(axis * sweep / static_cast<double>(M - 1)) * controls.back());
  }
  return controls;
}

std::vector<SimilarityPose> gen_trajectory(std::size_t frames, std::uint64_t seed, const TrajectoryConfig& cfg) {
  if (frames < 3) throw Error(ErrorCode::InvalidConfig, "trajectory needs at least 3 frames");
  const auto controls = trajectory_controls(frames, seed, cfg);
  std::mt19937_64 rng(substream(seed, 1));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 from = cfg.box_center + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(cfg.box_half);
  Vec3 to = cfg.box_center + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(cfg.box_half);
  const double reach = cfg.max_speed * static_cast<double>(frames - 1);
  if ((to - from).norm() > reach) to = from + reach * (to - from).normalized();

  std::vector<SimilarityPose> poses(frames);
  const double M1 = static_cast<double>(controls.size() - 1);
  for (std::size_t i = 0; i < frames; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(frames - 1);
    const double seg = s * M1;
    const std::size_t k = std::min(static_cast<std::size_t>(seg), controls.size() - 2);
    poses[i].rotation = slerp(controls[k], controls[k + 1], seg - static_cast<double>(k));
    poses[i].translation = from + s * (to - from);
  }
  return poses;
}

std::vector<BodyParams> gen_body_motion(const BodyModel& model, std::size_t frames, std::uint64_t seed,
                                        const BodyMotionConfig& cfg) {
  if (frames < 3) throw Error(ErrorCode::InvalidConfig, "body motion needs at least 3 frames");
  const std::size_t K = model.num_joints();
  const std::size_t B = model.num_shape();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  Eigen::VectorXd shape(static_cast<Eigen::Index>(B));
  for (auto& b : shape) b = cfg.shape_range * (2.0 * u(rng) - 1.0);
  struct Wave {
    double amp, omega, phase;
  };
  auto wave = [&](double amp) {
    const double period = cfg.min_period_s + (cfg.max_period_s - cfg.min_period_s) * u(rng);
    return Wave{amp * (0.3 + 0.7 * u(rng)), 2.0 * M_PI / (period * cfg.fps), 2.0 * M_PI * u(rng)};
  };
  std::vector<Wave> pose_waves(3 * K), root_waves(3);
  for (std::size_t c = 0; c < 3 * K; ++c) pose_waves[c] = wave(c < 3 ? 0.3 * cfg.amplitude : cfg.amplitude);
  for (auto& w : root_waves) w = wave(cfg.root_drift);

  std::vector<BodyParams> out(frames, BodyParams::zeros(K, B));
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i);
    auto& p = out[i];
    p.shape = shape;
    for (std::size_t c = 0; c < 3 * K; ++c) {
      const auto& w = pose_waves[c];
      p.pose[static_cast<Eigen::Index>(c)] = w.amp * std::sin(w.omega * t + w.phase);
    }
    p.translation = cfg.root;
    for (int c = 0; c < 3; ++c) p.translation[c] += root_waves[c].amp * std::sin(root_waves[c].omega * t + root_waves[c].phase);
  }
  return out;
}

std::vector<RotationWindow> simulate_window_predictions(std::span<const Mat3> gt, std::size_t window,
                                                        std::size_t stride, double noise_deg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double angle = noise_deg * M_PI / 180.0;
  std::vector<RotationWindow> out;
  const std::size_t w = std::min(window, gt.size());
  for (const std::size_t s : window_starts(gt.size(), window, stride)) {
    RotationWindow win{s, {}};
    for (std::size_t k = 0; k < w; ++k) {
      win.rotations.push_back(axis_angle_to_matrix(angle * random_unit(rng)) * gt[s + k]);
    }
    out.push_back(std::move(win));
  }
  return out;
}

std::vector<Mat3> single_window_predictions(std::span<const RotationWindow> windows, std::size_t frames) {
  if (windows.empty()) throw Error(ErrorCode::UncoveredFrame, "no rotation windows");
  const std::size_t w = windows.front().rotations.size();
  std::vector<Mat3> out(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t tile = std::min(i / w * w, frames - w);
    const auto it = std::find_if(windows.begin(), windows.end(), [&](const RotationWindow& r) { return r.start == tile; });
    if (it == windows.end()) throw Error(ErrorCode::UncoveredFrame, "no window starts at frame " + std::to_string(tile));
    out[i] = it->rotations[i - tile];
  }
  return out;
}

SynthResult gen_sequence(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t T = cfg.frames;
  SynthResult result;
  SequenceBundle& bundle = result.bundle;
  GroundTruth& gt = result.truth;
  const Camera cam = bundle.camera;
  gt.camera = cam;

  bundle.body_template = default_template(cfg.template_vertices, kDefaultJoints, kDefaultShapeDims, 0);
  const BodyModel model(*bundle.body_template);
  BodyMotionConfig body_cfg = cfg.body;
  body_cfg.fps = cfg.fps;
  gt.body = gen_body_motion(model, T, substream(cfg.seed, 1), body_cfg);
  std::vector<std::vector<Vec3>> verts(T);
  for (std::size_t i = 0; i < T; ++i) verts[i] = posed_vertices(model, gt.body[i]);

  gt.canonical = sample_object_surface(cfg.object, cfg.dense_points, substream(cfg.seed, 2));
  gt.poses = gen_trajectory(T, substream(cfg.seed, 3), cfg.trajectory);

  if (cfg.contact) {
    // Hand anchor: right-wrist vertex farthest from the wrist joint at rest.
    constexpr std::size_t kHand = 9;
    const auto rest_joints = forward_kinematics(model, Eigen::VectorXd::Zero(3 * model.num_joints()), gt.body[0].shape);
    const auto shaped = model.shaped_vertices(gt.body[0].shape);
    std::size_t anchor = 0;
    double far = -1.0;
    for (std::size_t v = 0; v < model.num_vertices(); ++v) {
      const auto inf = model.influences(v);
      const auto best = std::max_element(inf.begin(), inf.end(), [](auto& a, auto& b) { return a.weight < b.weight; });
      if (best == inf.end() || best->joint != kHand) continue;
      const double d = (shaped[v] - rest_joints.translation[kHand]).norm();
      if (d > far) {
        far = d;
        anchor = v;
      }
    }
    std::vector<std::size_t> order(model.num_vertices());
    std::iota(order.begin(), order.end(), 0);
    const auto dist = [&](std::size_t v) { return (shaped[v] - shaped[anchor]).norm(); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    for (std::size_t k = 0; k < order.size() && (k < 8 || dist(order[k]) <= 0.03); ++k) gt.hand_vertices.push_back(order[k]);
    std::sort(gt.hand_vertices.begin(), gt.hand_vertices.end());
    // Object face point extreme along the direction that faces away from the body mid-sequence.
    const Mat3& Rmid = gt.poses[T / 2].rotation;
    const Vec3 dir = Rmid.transpose() * Vec3(1.0, 0.0, 0.0);
    std::size_t face = 0;
    for (std::size_t j = 1; j < gt.canonical.size(); ++j) {
      if (gt.canonical[j].dot(dir) > gt.canonical[face].dot(dir)) face = j;
    }
    gt.contact_point = face;
    gt.contact_frames = {std::min(cfg.contact_begin, T), std::min(cfg.contact_end, T)};
    for (std::size_t i = 0; i < T; ++i) {
      const Mat3& R = gt.poses[i].rotation;
      const Vec3 away = -(R * dir);
      // Outside the contact range the object drifts smoothly away from the hand.
      double gap = 0.0;
      const double ramp = 8.0;
      if (i < gt.contact_frames.begin) gap = std::min(1.0, static_cast<double>(gt.contact_frames.begin - i) / ramp);
      if (i >= gt.contact_frames.end) gap = std::min(1.0, static_cast<double>(i + 1 - gt.contact_frames.end) / ramp);
      gap = gap * gap * (3.0 - 2.0 * gap) * 0.1;
      gt.poses[i].translation = verts[i][anchor] + (cfg.contact_offset + gap) * away - R * gt.canonical[face];
    }
  }

  // Occluder schedule: one contiguous block of frames.
  gt.occluded.assign(T, false);
  std::mt19937_64 occ_rng(substream(cfg.seed, 4));
  const auto n_occ = static_cast<std::size_t>(std::llround(cfg.occluded_fraction * static_cast<double>(T)));
  if (n_occ > 0) {
    std::uniform_int_distribution<std::size_t> start(0, T - n_occ);
    const std::size_t s = start(occ_rng);
    for (std::size_t i = s; i < s + n_occ; ++i) gt.occluded[i] = true;
  }

  bundle.frames.resize(T);
  for (std::size_t i = 0; i < T; ++i) {
    std::mt19937_64 rng(substream(cfg.seed, 100 + i));
    std::mt19937_64 order_rng(substream(cfg.seed, 1000000 + i));
    FrameData& frame = bundle.frames[i];
    const auto dense = apply_similarity(gt.canonical, gt.poses[i]);

    std::vector<Vec3> occluder;
    OcclusionMasks masks;
    auto scene_with = [&](const std::vector<Vec3>& occ) {
      std::vector<Vec3> scene = verts[i];
      scene.insert(scene.end(), occ.begin(), occ.end());
      return scene;
    };
    if (gt.occluded[i]) {
      const bool from_left = std::uniform_int_distribution<int>(0, 1)(occ_rng) == 1;
      for (double share = 0.2; share <= 1.2; share += 0.05) {
        occluder = occluder_patch(dense, cam, share, from_left);
        masks = render_occlusion_masks(dense, scene_with(occluder), cam, cfg.splat_radius);
        const double v = masks.object_alone ? static_cast<double>(masks.object_visible) / masks.object_alone : 0.0;
        if (v <= 1.0 - cfg.occlusion_level) break;
      }
    } else {
      masks = render_occlusion_masks(dense, verts[i], cam, cfg.splat_radius);
    }
    frame.visibility = masks.object_alone ? static_cast<double>(masks.object_visible) / masks.object_alone : 0.0;
    frame.object_mask = std::move(masks.object);
    frame.human_mask = std::move(masks.human);

    // Object cloud: subset of the dense surface, with hidden points degraded in occluded frames.
    auto obj_idx = random_subset(dense.size(), cfg.object_points, rng);
    std::sort(obj_idx.begin(), obj_idx.end());
    std::vector<Vec3> obj;
    obj.reserve(obj_idx.size());
    for (const auto j : obj_idx) obj.push_back(dense[j]);
    add_noise(obj, cfg.noise, rng);
    if (gt.occluded[i] && cfg.degraded_noise > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::normal_distribution<double> n(0.0, cfg.degraded_noise);
      for (auto& p : obj) {
        if (u(rng) >= frame.visibility) p += Vec3(n(rng), n(rng), n(rng));
      }
    }
    jitter_scale(obj, cfg.scale_jitter, rng);
    if (cfg.shuffle) std::shuffle(obj.begin(), obj.end(), order_rng);
    frame.object = PointCloud(std::move(obj));

    auto hum_idx = random_subset(verts[i].size(), cfg.human_points, rng);
    std::sort(hum_idx.begin(), hum_idx.end());
    std::vector<Vec3> hum;
    hum.reserve(hum_idx.size());
    for (const auto v : hum_idx) hum.push_back(verts[i][v]);
    add_noise(hum, cfg.noise, rng);
    jitter_scale(hum, cfg.scale_jitter, rng);
    if (cfg.shuffle) std::shuffle(hum.begin(), hum.end(), order_rng);
    frame.human = PointCloud(std::move(hum));
  }

  std::vector<Mat3> gt_rot(T);
  for (std::size_t i = 0; i < T; ++i) gt_rot[i] = gt.poses[i].rotation;
  bundle.rotation_windows = simulate_window_predictions(gt_rot, cfg.window, 1, cfg.window_noise_deg, substream(cfg.seed, 5));
  const auto raw = single_window_predictions(bundle.rotation_windows, T);
  for (std::size_t i = 0; i < T; ++i) bundle.frames[i].rotation_estimate = raw[i];

  std::mt19937_64 init_rng(substream(cfg.seed, 6));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  bundle.human_init = gt.body;
  for (auto& p : bundle.human_init) {
    for (std::size_t j = 0; j < model.num_joints(); ++j) {
      const Vec3 delta = cfg.human_pose_noise * u(init_rng) * random_unit(init_rng);
      p.pose.segment<3>(static_cast<Eigen::Index>(3 * j)) += delta;
    }
    p.translation += cfg.human_translation_noise * u(init_rng) * random_unit(init_rng);
    for (auto& b : p.shape) b += cfg.human_shape_noise * n(init_rng);
  }
  return result;
}

}  // namespace intertrack
