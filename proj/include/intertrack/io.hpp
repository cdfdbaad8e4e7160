// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk formats: ASCII point files (optionally binary ITPC1), binary PGM
// masks, whitespace-separated parameter tables and the sequence directory.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intertrack/body_model.hpp"
#include "intertrack/bundle.hpp"
#include "intertrack/human_track.hpp"
#include "intertrack/joint_refine.hpp"
#include "intertrack/metrics.hpp"
#include "intertrack/object_track.hpp"
#include "intertrack/synth.hpp"

namespace intertrack {

namespace fs = std::filesystem;

/// Shortest decimal form that reads back to the same double (at most 17
/// significant digits).
std::string format_double(double value);

/// Numeric table: one row per non-empty line, '#' starts a comment. Errors
/// name the file, line and column.
using Table = std::vector<std::vector<double>>;
Table read_table(const fs::path& path);
void write_table(const fs::path& path, const Table& rows);

/// ASCII `x y z` per line, or ITPC1 binary (detected by its magic).
std::vector<Vec3> read_points(const fs::path& path);
void write_points(const fs::path& path, std::span<const Vec3> points, bool binary = false);

/// Binary PGM (P5, maxval 255); values >= 128 load as 1, others as 0.
SoftMask read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const SoftMask& mask);

BodyTemplate read_body_template(const fs::path& path);
void write_body_template(const fs::path& path, const BodyTemplate& tmpl);

/// Sequence directory: config.txt, frames/NNNNNN/{human,object}.pts and
/// {object,human}_mask.pgm, rotations.txt, visibility.txt, plus optional
/// rotation_windows.txt, body_template.txt and human_init.txt.
SequenceBundle load_sequence(const fs::path& dir);
void save_sequence(const fs::path& dir, const SequenceBundle& bundle, bool binary = false);

void save_truth(const fs::path& dir, const GroundTruth& truth);
GroundTruth load_truth(const fs::path& dir);

std::vector<Mat3> read_rotations(const fs::path& path);
void write_rotations(const fs::path& path, std::span<const Mat3> rotations);

/// First line: mean shape; then per frame 3K pose, 3 translation, 1 log-scale.
HumanTrack read_human_track(const fs::path& path);
void write_human_track(const fs::path& path, const HumanTrack& track);

/// Per frame: 9 rotation (row-major), 3 translation, 1 log-scale.
std::vector<SimilarityPose> read_poses(const fs::path& path);
void write_poses(const fs::path& path, std::span<const SimilarityPose> poses);

ObjectTrack read_object_track(const fs::path& dir);

void write_contacts(const fs::path& path, const ContactSet& contacts);
ContactSet read_contacts(const fs::path& path);

struct SavedResults {
  std::optional<HumanTrack> human;
  std::optional<ObjectTrack> object;
  std::optional<MetricReport> report;
};

/// Writes body_params.txt, canonical_object.pts, object_poses.txt and
/// report.json for whichever parts are present.
void save_results(const fs::path& dir, const SavedResults& results, bool binary = false);
SavedResults load_results(const fs::path& dir);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace intertrack
