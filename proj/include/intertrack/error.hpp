// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace intertrack {

enum class ErrorCode {
  DegenerateInput,
  InvalidRotation,
  EmptyCloud,
  TooShort,
  BehindCamera,
  InvalidConfig,
  EmptyList,
  LengthMismatch,
  NonFiniteLoss,
  NoVisibleFrame,
  DimensionMismatch,
  DegenerateMean,
  UncoveredFrame,
  DegenerateConfiguration,
  MissingFile,
  ParseError,
  NonContiguousFrames,
  IoError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class BehindCameraError : public Error {
 public:
  explicit BehindCameraError(std::vector<std::size_t> indices);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InvalidRotation: return "InvalidRotation";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NoVisibleFrame: return "NoVisibleFrame";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateMean: return "DegenerateMean";
    case ErrorCode::UncoveredFrame: return "UncoveredFrame";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonContiguousFrames: return "NonContiguousFrames";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

inline BehindCameraError::BehindCameraError(std::vector<std::size_t> indices)
    : Error(ErrorCode::BehindCamera,
            [&] {
              std::string msg = "points at or behind the camera plane:";
              std::size_t shown = 0;
              for (auto i : indices) {
                if (shown++ == 16) {
                  msg += " ...";
                  break;
                }
                msg += " " + std::to_string(i);
              }
              return msg;
            }()),
      indices_(std::move(indices)) {}

}  // namespace intertrack
