// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "intertrack/types.hpp"

namespace intertrack {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam over a flat parameter vector. State is owned by one optimiser and
/// never shared between threads.
class Adam {
 public:
  Adam(std::size_t size, AdamOptions options) : options_(options), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * grad[i];
      v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * grad[i] * grad[i];
      params[i] -= options_.learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + options_.epsilon);
    }
  }

  std::size_t iterations() const noexcept { return t_; }

 private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

/// Contiguous minibatch window of at most `batch` frames; the whole sequence
/// when it fits.
inline FrameRange sample_window(std::size_t frames, int batch, std::mt19937_64& rng) {
  const std::size_t b = batch <= 0 ? frames : static_cast<std::size_t>(batch);
  if (b >= frames) return {0, frames};
  std::uniform_int_distribution<std::size_t> start(0, frames - b);
  const std::size_t s = start(rng);
  return {s, s + b};
}

}  // namespace intertrack
