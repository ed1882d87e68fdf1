#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ggl/sampler.hpp"

namespace ggl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian fixed-width encoder.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(const std::vector<double>& v);
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<double> f64s();
  bool done() const { return pos_ == size_; }

 private:
  void need(std::size_t n) const;
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

/// Resumable state of a sampling run.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  bool burned_in = false;
  std::uint64_t samples_done = 0;
  std::uint64_t csv_bytes = 0;
  ChainState chain;
  std::vector<double> accumulators;
};

/// "GGLCKPT\0", u32 version, u64 payload size, payload, u64 FNV-1a of the payload.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c);
/// CheckpointVersionMismatch for other versions, CorruptCheckpoint otherwise.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Written to a temporary file and renamed into place.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace ggl
