// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#include "intertrack/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "intertrack/error.hpp"

namespace intertrack {

namespace {

constexpr char kBinaryMagic[] = "ITPC1";
constexpr std::size_t kMagicLength = 5;

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorCode::ParseError,
              path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, "missing file " + path.string());
}

std::string frame_name(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

std::vector<double> row_of(const Mat3& R) {
  std::vector<double> r;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r.push_back(R(a, b));
  return r;
}

Mat3 mat_of(const double* d) {
  Mat3 R;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) R(a, b) = d[3 * a + b];
  return R;
}

void require_width(const fs::path& path, const Table& t, std::size_t row, std::size_t width) {
  if (t[row].size() != width) {
    parse_error(path, row + 1, 1,
                "expected " + std::to_string(width) + " values, found " + std::to_string(t[row].size()));
  }
}

std::size_t as_index(const fs::path& path, std::size_t line, double v) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) parse_error(path, line, 1, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> params_row(const BodyParams& p, bool with_shape) {
  std::vector<double> r(p.pose.data(), p.pose.data() + p.pose.size());
  if (with_shape) r.insert(r.end(), p.shape.data(), p.shape.data() + p.shape.size());
  for (int c = 0; c < 3; ++c) r.push_back(p.translation[c]);
  r.push_back(p.log_scale);
  return r;
}

std::vector<BodyParams> read_params_rows(const fs::path& path, std::size_t joints, std::size_t shape_dims) {
  const Table t = read_table(path);
  std::vector<BodyParams> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_width(path, t, i, 3 * joints + shape_dims + 4);
    BodyParams p = BodyParams::zeros(joints, shape_dims);
    const double* d = t[i].data();
    for (std::size_t c = 0; c < 3 * joints; ++c) p.pose[static_cast<Eigen::Index>(c)] = d[c];
    d += 3 * joints;
    for (std::size_t c = 0; c < shape_dims; ++c) p.shape[static_cast<Eigen::Index>(c)] = d[c];
    d += shape_dims;
    p.translation = Vec3(d[0], d[1], d[2]);
    p.log_scale = d[3];
    out.push_back(std::move(p));
  }
  return out;
}

void write_params_rows(const fs::path& path, std::span<const BodyParams> params) {
  Table t;
  for (const auto& p : params) t.push_back(params_row(p, true));
  write_table(path, t);
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  require_file(path);
  std::istringstream in(read_text(path));
  std::map<std::string, std::string> kv;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(path, n, first + 1, "expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

double number_of(const fs::path& path, const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::ParseError, path.string() + ": missing key '" + key + "'");
  double v = 0.0;
  const auto* end = it->second.data() + it->second.size();
  const auto r = std::from_chars(it->second.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw Error(ErrorCode::ParseError, path.string() + ": key '" + key + "' is not a number");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

std::string read_text(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Table read_table(const fs::path& path) {
  const std::string text = read_text(path);
  Table rows;
  std::size_t line = 1, pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::vector<double> row;
    std::size_t i = pos;
    while (i < eol) {
      const char ch = text[i];
      if (ch == ' ' || ch == '\t' || ch == '\r') {
        ++i;
        continue;
      }
      if (ch == '#') break;
      std::size_t j = i;
      while (j < eol && text[j] != ' ' && text[j] != '\t' && text[j] != '\r' && text[j] != '#') ++j;
      double v = 0.0;
      const auto r = std::from_chars(text.data() + i, text.data() + j, v);
      if (r.ec != std::errc() || r.ptr != text.data() + j) {
        parse_error(path, line, i - pos + 1, "invalid number '" + text.substr(i, j - i) + "'");
      }
      row.push_back(v);
      i = j;
    }
    if (!row.empty()) rows.push_back(std::move(row));
    pos = eol + 1;
    ++line;
  }
  return rows;
}

void write_table(const fs::path& path, const Table& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ' ';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  write_text(path, out);
}

std::vector<Vec3> read_points(const fs::path& path) {
  const std::string text = read_text(path);
  if (text.compare(0, kMagicLength, kBinaryMagic) == 0) {
    static_assert(std::endian::native == std::endian::little, "binary point files assume a little-endian host");
    std::uint64_t count = 0;
    if (text.size() < kMagicLength + sizeof(count)) parse_error(path, 1, kMagicLength + 1, "truncated header");
    std::memcpy(&count, text.data() + kMagicLength, sizeof(count));
    const std::size_t body = kMagicLength + sizeof(count);
    if (count > (text.size() - body) / (3 * sizeof(float)) || text.size() - body != count * 3 * sizeof(float)) {
      parse_error(path, 1, body + 1, "payload does not match the point count");
    }
    std::vector<Vec3> pts(count);
    for (std::size_t i = 0; i < count; ++i) {
      float f[3];
      std::memcpy(f, text.data() + body + i * sizeof(f), sizeof(f));
      pts[i] = Vec3(f[0], f[1], f[2]);
    }
    return pts;
  }
  const Table t = read_table(path);
  std::vector<Vec3> pts;
  pts.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_width(path, t, i, 3);
    pts.emplace_back(t[i][0], t[i][1], t[i][2]);
  }
  return pts;
}

void write_points(const fs::path& path, std::span<const Vec3> points, bool binary) {
  if (binary) {
    std::string out(kBinaryMagic, kMagicLength);
    const std::uint64_t count = points.size();
    out.append(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& p : points) {
      const float f[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
      out.append(reinterpret_cast<const char*>(f), sizeof(f));
    }
    write_text(path, out);
    return;
  }
  Table t;
  t.reserve(points.size());
  for (const auto& p : points) t.push_back({p.x(), p.y(), p.z()});
  write_table(path, t);
}

SoftMask read_pgm(const fs::path& path) {
  const std::string text = read_text(path);
  std::size_t pos = 0;
  auto token = [&](const char* what) {
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else if (text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) parse_error(path, 1, start + 1, std::string("truncated header, missing ") + what);
    return text.substr(start, pos - start);
  };
  auto integer = [&](const char* what) {
    const std::string s = token(what);
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v <= 0) {
      parse_error(path, 1, pos - s.size() + 1, std::string("invalid ") + what);
    }
    return v;
  };
  if (token("magic") != "P5") parse_error(path, 1, 1, "not a binary PGM (P5)");
  const int w = integer("width");
  const int h = integer("height");
  if (integer("maxval") != 255) parse_error(path, 1, pos, "maxval must be 255");
  ++pos;  // single whitespace byte before the raster
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (text.size() < pos + n) {
    parse_error(path, 1, pos + 1,
                "truncated raster: expected " + std::to_string(n) + " bytes, found " +
                    std::to_string(text.size() > pos ? text.size() - pos : 0));
  }
  SoftMask m(w, h);
  for (std::size_t p = 0; p < n; ++p) m.values[p] = static_cast<unsigned char>(text[pos + p]) >= 128 ? 1.0 : 0.0;
  return m;
}

void write_pgm(const fs::path& path, const SoftMask& mask) {
  std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  out.reserve(out.size() + mask.size());
  for (double v : mask.values) out += static_cast<char>(v >= 0.5 ? 255 : 0);
  write_text(path, out);
}

BodyTemplate read_body_template(const fs::path& path) {
  const Table t = read_table(path);
  if (t.empty() || t[0].size() != 3) parse_error(path, 1, 1, "expected header 'vertices joints shape_dims'");
  const std::size_t V = as_index(path, 1, t[0][0]);
  const std::size_t K = as_index(path, 1, t[0][1]);
  const std::size_t B = as_index(path, 1, t[0][2]);
  const std::size_t expected = 2 + V + K + V + (B ? 3 * V : 0);
  if (t.size() != expected) {
    parse_error(path, t.size(), 1, "expected " + std::to_string(expected) + " rows, found " + std::to_string(t.size()));
  }
  BodyTemplate tmpl;
  require_width(path, t, 1, K);
  for (double p : t[1]) tmpl.parents.push_back(static_cast<int>(p));
  std::size_t row = 2;
  for (std::size_t v = 0; v < V; ++v, ++row) {
    require_width(path, t, row, 3);
    tmpl.rest_vertices.emplace_back(t[row][0], t[row][1], t[row][2]);
  }
  tmpl.joint_regressor.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
  for (std::size_t k = 0; k < K; ++k, ++row) {
    require_width(path, t, row, V);
    for (std::size_t v = 0; v < V; ++v) tmpl.joint_regressor(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v)) = t[row][v];
  }
  tmpl.skin_weights.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(K));
  for (std::size_t v = 0; v < V; ++v, ++row) {
    require_width(path, t, row, K);
    for (std::size_t k = 0; k < K; ++k) tmpl.skin_weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k)) = t[row][k];
  }
  tmpl.shape_basis.resize(static_cast<Eigen::Index>(3 * V), static_cast<Eigen::Index>(B));
  for (std::size_t r = 0; B && r < 3 * V; ++r, ++row) {
    require_width(path, t, row, B);
    for (std::size_t b = 0; b < B; ++b) tmpl.shape_basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) = t[row][b];
  }
  tmpl.validate();
  return tmpl;
}

void write_body_template(const fs::path& path, const BodyTemplate& tmpl) {
  const std::size_t V = tmpl.num_vertices(), K = tmpl.num_joints(), B = tmpl.num_shape();
  Table t;
  t.push_back({static_cast<double>(V), static_cast<double>(K), static_cast<double>(B)});
  t.emplace_back(tmpl.parents.begin(), tmpl.parents.end());
  for (const auto& v : tmpl.rest_vertices) t.push_back({v.x(), v.y(), v.z()});
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::VectorXd row = tmpl.joint_regressor.row(static_cast<Eigen::Index>(k));
    t.emplace_back(row.data(), row.data() + row.size());
  }
  for (std::size_t v = 0; v < V; ++v) {
    const Eigen::VectorXd row = tmpl.skin_weights.row(static_cast<Eigen::Index>(v));
    t.emplace_back(row.data(), row.data() + row.size());
  }
  for (std::size_t r = 0; B && r < 3 * V; ++r) {
    const Eigen::VectorXd row = tmpl.shape_basis.row(static_cast<Eigen::Index>(r));
    t.emplace_back(row.data(), row.data() + row.size());
  }
  write_table(path, t);
}

std::vector<Mat3> read_rotations(const fs::path& path) {
  const Table t = read_table(path);
  std::vector<Mat3> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_width(path, t, i, 9);
    out.push_back(mat_of(t[i].data()));
  }
  return out;
}

void write_rotations(const fs::path& path, std::span<const Mat3> rotations) {
  Table t;
  for (const auto& R : rotations) t.push_back(row_of(R));
  write_table(path, t);
}

SequenceBundle load_sequence(const fs::path& dir) {
  const fs::path config = dir / "config.txt";
  const auto kv = read_key_values(config);
  static const char* kKeys[] = {"frames", "fx", "fy", "cx", "cy", "width", "height"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; }) == std::end(kKeys)) {
      throw Error(ErrorCode::ParseError, config.string() + ": unknown key '" + key + "'");
    }
  }
  SequenceBundle b;
  b.camera.fx = number_of(config, kv, "fx");
  b.camera.fy = number_of(config, kv, "fy");
  b.camera.cx = number_of(config, kv, "cx");
  b.camera.cy = number_of(config, kv, "cy");
  b.camera.width = static_cast<int>(number_of(config, kv, "width"));
  b.camera.height = static_cast<int>(number_of(config, kv, "height"));
  const std::size_t T = static_cast<std::size_t>(number_of(config, kv, "frames"));

  const fs::path frames = dir / "frames";
  if (!fs::is_directory(frames)) throw Error(ErrorCode::MissingFile, "missing directory " + frames.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(frames)) {
    if (e.is_directory()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  if (names.size() != T) {
    throw Error(ErrorCode::NonContiguousFrames,
                "config lists " + std::to_string(T) + " frames but " + std::to_string(names.size()) + " exist");
  }
  for (std::size_t i = 0; i < T; ++i) {
    if (names[i] != frame_name(i)) {
      throw Error(ErrorCode::NonContiguousFrames, "expected frame " + frame_name(i) + ", found " + names[i]);
    }
  }

  const auto rotations = read_rotations(dir / "rotations.txt");
  const Table vis = read_table(dir / "visibility.txt");
  if (rotations.size() != T) throw Error(ErrorCode::ParseError, (dir / "rotations.txt").string() + ": one row per frame required");
  if (vis.size() != T) throw Error(ErrorCode::ParseError, (dir / "visibility.txt").string() + ": one row per frame required");

  b.frames.resize(T);
  for (std::size_t i = 0; i < T; ++i) {
    const fs::path f = frames / frame_name(i);
    auto& fd = b.frames[i];
    fd.human = PointCloud(read_points(f / "human.pts"));
    fd.object = PointCloud(read_points(f / "object.pts"));
    fd.object_mask = read_pgm(f / "object_mask.pgm");
    fd.human_mask = read_pgm(f / "human_mask.pgm");
    if (fd.object_mask.width != b.camera.width || fd.object_mask.height != b.camera.height ||
        !fd.human_mask.same_shape(fd.object_mask)) {
      throw Error(ErrorCode::DimensionMismatch, "mask size differs from the camera in frame " + frame_name(i));
    }
    fd.rotation_estimate = rotations[i];
    require_width(dir / "visibility.txt", vis, i, 1);
    fd.visibility = vis[i][0];
  }

  if (fs::exists(dir / "rotation_windows.txt")) {
    const fs::path p = dir / "rotation_windows.txt";
    const Table t = read_table(p);
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (t[r].empty() || (t[r].size() - 1) % 9 != 0) parse_error(p, r + 1, 1, "expected start followed by 9 values per frame");
      RotationWindow w{as_index(p, r + 1, t[r][0]), {}};
      for (std::size_t k = 1; k < t[r].size(); k += 9) w.rotations.push_back(mat_of(t[r].data() + k));
      b.rotation_windows.push_back(std::move(w));
    }
  }
  if (fs::exists(dir / "body_template.txt")) b.body_template = read_body_template(dir / "body_template.txt");
  if (fs::exists(dir / "human_init.txt")) {
    const BodyTemplate tmpl = b.body_template ? *b.body_template : default_template();
    b.human_init = read_params_rows(dir / "human_init.txt", tmpl.num_joints(), tmpl.num_shape());
    if (b.human_init.size() != T) {
      throw Error(ErrorCode::ParseError, (dir / "human_init.txt").string() + ": one row per frame required");
    }
  }
  return b;
}

void save_sequence(const fs::path& dir, const SequenceBundle& b, bool binary) {
  std::string cfg;
  cfg += "frames=" + std::to_string(b.size()) + "\n";
  cfg += "fx=" + format_double(b.camera.fx) + "\n";
  cfg += "fy=" + format_double(b.camera.fy) + "\n";
  cfg += "cx=" + format_double(b.camera.cx) + "\n";
  cfg += "cy=" + format_double(b.camera.cy) + "\n";
  cfg += "width=" + std::to_string(b.camera.width) + "\n";
  cfg += "height=" + std::to_string(b.camera.height) + "\n";
  write_text(dir / "config.txt", cfg);

  std::vector<Mat3> rot;
  Table vis;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& fd = b.frames[i];
    const fs::path f = dir / "frames" / frame_name(i);
    write_points(f / "human.pts", fd.human.points, binary);
    write_points(f / "object.pts", fd.object.points, binary);
    write_pgm(f / "object_mask.pgm", fd.object_mask);
    write_pgm(f / "human_mask.pgm", fd.human_mask);
    rot.push_back(fd.rotation_estimate);
    vis.push_back({fd.visibility});
  }
  write_rotations(dir / "rotations.txt", rot);
  write_table(dir / "visibility.txt", vis);
  if (!b.rotation_windows.empty()) {
    Table t;
    for (const auto& w : b.rotation_windows) {
      std::vector<double> row{static_cast<double>(w.start)};
      for (const auto& R : w.rotations) {
        const auto r = row_of(R);
        row.insert(row.end(), r.begin(), r.end());
      }
      t.push_back(std::move(row));
    }
    write_table(dir / "rotation_windows.txt", t);
  }
  if (b.body_template) write_body_template(dir / "body_template.txt", *b.body_template);
  if (!b.human_init.empty()) write_params_rows(dir / "human_init.txt", b.human_init);
}

void save_truth(const fs::path& dir, const GroundTruth& gt) {
  write_points(dir / "canonical.pts", gt.canonical);
  write_poses(dir / "object_poses.txt", gt.poses);
  write_params_rows(dir / "body_params.txt", gt.body);
  Table occ;
  for (bool o : gt.occluded) occ.push_back({o ? 1.0 : 0.0});
  write_table(dir / "occluded.txt", occ);
  Table contact{{static_cast<double>(gt.contact_point), static_cast<double>(gt.contact_frames.begin),
                 static_cast<double>(gt.contact_frames.end)}};
  if (!gt.hand_vertices.empty()) contact.emplace_back(gt.hand_vertices.begin(), gt.hand_vertices.end());
  write_table(dir / "contact.txt", contact);
  write_table(dir / "camera.txt", {{gt.camera.fx, gt.camera.fy, gt.camera.cx, gt.camera.cy,
                                     static_cast<double>(gt.camera.width), static_cast<double>(gt.camera.height)}});
}

GroundTruth load_truth(const fs::path& dir) {
  GroundTruth gt;
  gt.canonical = read_points(dir / "canonical.pts");
  gt.poses = read_poses(dir / "object_poses.txt");
  const Table body = read_table(dir / "body_params.txt");
  if (!body.empty()) {
    // Width is 3K + B + 4; the template fixes K and B.
    const BodyTemplate tmpl = fs::exists(dir.parent_path() / "body_template.txt")
                                  ? read_body_template(dir.parent_path() / "body_template.txt")
                                  : default_template();
    gt.body = read_params_rows(dir / "body_params.txt", tmpl.num_joints(), tmpl.num_shape());
  }
  for (const auto& r : read_table(dir / "occluded.txt")) gt.occluded.push_back(!r.empty() && r[0] != 0.0);
  const Table contact = read_table(dir / "contact.txt");
  if (!contact.empty()) {
    require_width(dir / "contact.txt", contact, 0, 3);
    gt.contact_point = as_index(dir / "contact.txt", 1, contact[0][0]);
    gt.contact_frames = {as_index(dir / "contact.txt", 1, contact[0][1]), as_index(dir / "contact.txt", 1, contact[0][2])};
    if (contact.size() > 1)
      for (double v : contact[1]) gt.hand_vertices.push_back(as_index(dir / "contact.txt", 2, v));
  }
  const Table cam = read_table(dir / "camera.txt");
  if (cam.empty()) parse_error(dir / "camera.txt", 1, 1, "missing camera row");
  require_width(dir / "camera.txt", cam, 0, 6);
  gt.camera = Camera{cam[0][0], cam[0][1], cam[0][2], cam[0][3], static_cast<int>(cam[0][4]), static_cast<int>(cam[0][5])};
  return gt;
}

HumanTrack read_human_track(const fs::path& path) {
  const Table t = read_table(path);
  if (t.empty()) parse_error(path, 1, 1, "missing mean shape row");
  HumanTrack track;
  track.mean_shape = Eigen::Map<const Eigen::VectorXd>(t[0].data(), static_cast<Eigen::Index>(t[0].size()));
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i].size() < 7 || (t[i].size() - 4) % 3 != 0) parse_error(path, i + 1, 1, "expected 3K pose + 3 translation + 1 log-scale");
    if (i > 1 && t[i].size() != t[1].size()) require_width(path, t, i, t[1].size());
    HumanFrame f;
    const std::size_t P = t[i].size() - 4;
    f.pose = Eigen::Map<const Eigen::VectorXd>(t[i].data(), static_cast<Eigen::Index>(P));
    f.translation = Vec3(t[i][P], t[i][P + 1], t[i][P + 2]);
    f.log_scale = t[i][P + 3];
    track.frames.push_back(std::move(f));
  }
  return track;
}

void write_human_track(const fs::path& path, const HumanTrack& track) {
  Table t;
  t.emplace_back(track.mean_shape.data(), track.mean_shape.data() + track.mean_shape.size());
  for (const auto& f : track.frames) {
    std::vector<double> row(f.pose.data(), f.pose.data() + f.pose.size());
    for (int c = 0; c < 3; ++c) row.push_back(f.translation[c]);
    row.push_back(f.log_scale);
    t.push_back(std::move(row));
  }
  write_table(path, t);
}

std::vector<SimilarityPose> read_poses(const fs::path& path) {
  const Table t = read_table(path);
  std::vector<SimilarityPose> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_width(path, t, i, 13);
    SimilarityPose p;
    p.rotation = mat_of(t[i].data());
    p.translation = Vec3(t[i][9], t[i][10], t[i][11]);
    p.log_scale = t[i][12];
    out.push_back(p);
  }
  return out;
}

void write_poses(const fs::path& path, std::span<const SimilarityPose> poses) {
  Table t;
  for (const auto& p : poses) {
    auto row = row_of(p.rotation);
    for (int c = 0; c < 3; ++c) row.push_back(p.translation[c]);
    row.push_back(p.log_scale);
    t.push_back(std::move(row));
  }
  write_table(path, t);
}

ObjectTrack read_object_track(const fs::path& dir) {
  ObjectTrack track;
  track.canonical = read_points(dir / "canonical_object.pts");
  track.poses = read_poses(dir / "object_poses.txt");
  if (track.canonical.empty()) throw Error(ErrorCode::EmptyCloud, (dir / "canonical_object.pts").string() + " is empty");
  return track;
}

void write_contacts(const fs::path& path, const ContactSet& contacts) {
  std::string out = "# frame human_vertex object_point human_xyz object_xyz\n";
  for (std::size_t i = 0; i < contacts.frames.size(); ++i) {
    const auto& f = contacts.frames[i];
    for (std::size_t k = 0; k < f.pairs.size(); ++k) {
      out += std::to_string(i) + ' ' + std::to_string(f.pairs[k].human_vertex) + ' ' +
             std::to_string(f.pairs[k].object_point);
      for (int c = 0; c < 3; ++c) out += ' ' + format_double(f.human_locations[k][c]);
      for (int c = 0; c < 3; ++c) out += ' ' + format_double(f.object_locations[k][c]);
      out += '\n';
    }
  }
  write_text(path, out);
}

ContactSet read_contacts(const fs::path& path) {
  const Table t = read_table(path);
  ContactSet set;
  for (std::size_t r = 0; r < t.size(); ++r) {
    require_width(path, t, r, 9);
    const std::size_t frame = as_index(path, r + 1, t[r][0]);
    if (set.frames.size() <= frame) set.frames.resize(frame + 1);
    auto& f = set.frames[frame];
    f.pairs.push_back({as_index(path, r + 1, t[r][1]), as_index(path, r + 1, t[r][2])});
    f.human_locations.emplace_back(t[r][3], t[r][4], t[r][5]);
    f.object_locations.emplace_back(t[r][6], t[r][7], t[r][8]);
  }
  return set;
}

void save_results(const fs::path& dir, const SavedResults& results, bool binary) {
  if (results.human) write_human_track(dir / "body_params.txt", *results.human);
  if (results.object) {
    write_points(dir / "canonical_object.pts", results.object->canonical, binary);
    write_poses(dir / "object_poses.txt", results.object->poses);
  }
  if (results.report) write_text(dir / "report.json", to_json(*results.report));
}

SavedResults load_results(const fs::path& dir) {
  SavedResults r;
  if (fs::exists(dir / "body_params.txt")) r.human = read_human_track(dir / "body_params.txt");
  if (fs::exists(dir / "canonical_object.pts") && fs::exists(dir / "object_poses.txt")) r.object = read_object_track(dir);
  if (fs::exists(dir / "report.json")) r.report = report_from_json(read_text(dir / "report.json"));
  return r;
}

}  // namespace intertrack
