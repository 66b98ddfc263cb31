#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slipdet/common.hpp"

namespace slipdet::io {

inline constexpr int kFormatVersion = 1;

struct LoadError : FormatError {
  enum class Kind { Malformed, VersionMismatch, TruncatedPayload, NanPosition };
  LoadError(Kind kind, const std::string& what) : FormatError(what), kind(kind) {}
  Kind kind;
};

struct SequenceHeader {
  int version = kFormatVersion;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double frame_rate_hz = 30.0;
  std::size_t frame_count = 0;
  std::vector<std::string> fields;
  std::string length_unit = "mm";
  std::string force_unit = "N";
  std::string payload;  // file name relative to the header

  std::size_t payload_bytes() const { return frame_count * fields.size() * rows * cols * 4; }
};

struct Sequence {
  SequenceHeader header;
  std::vector<DeformationFrame> frames;
};

// Builds a header listing the fields present in the frames.
SequenceHeader make_header(const std::vector<DeformationFrame>& frames, std::size_t rows, std::size_t cols,
                           double frame_rate_hz);

void write_sequence(const std::filesystem::path& header_path, const Sequence& seq);
Sequence read_sequence(const std::filesystem::path& header_path);

}  // namespace slipdet::io
