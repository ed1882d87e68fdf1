#include "ggl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ggl/config.hpp"
#include "ggl/error.hpp"

namespace ggl {

namespace {

constexpr char kMagic[8] = {'G', 'G', 'L', 'C', 'K', 'P', 'T', '\0'};

}  // namespace

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::f64s(const std::vector<double>& v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void ByteReader::need(std::size_t n) const {
  if (size_ - pos_ < n) throw Error(ErrorCode::CorruptCheckpoint, "checkpoint truncated");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::vector<double> ByteReader::f64s() {
  const std::uint64_t n = u64();
  need(n * 8);
  std::vector<double> v(n);
  for (auto& x : v) x = f64();
  return v;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  ByteWriter p;
  p.u64(c.config_hash);
  p.u8(c.burned_in ? 1 : 0);
  p.u64(c.samples_done);
  p.u64(c.csv_bytes);
  p.f64s(c.chain.phi);
  p.u64(c.chain.step_count);
  for (auto k : c.chain.rng.key) p.u32(k);
  for (auto k : c.chain.rng.counter) p.u32(k);
  for (auto k : c.chain.rng.buffer) p.u32(k);
  p.u32(c.chain.rng.position);
  p.f64(c.chain.dt);
  p.u64(c.chain.accepted);
  p.u64(c.chain.proposed);
  p.f64s(c.accumulators);

  ByteWriter out;
  for (char m : kMagic) out.u8(static_cast<std::uint8_t>(m));
  out.u32(kCheckpointVersion);
  out.u64(p.bytes().size());
  std::vector<std::uint8_t> bytes = out.bytes();
  bytes.insert(bytes.end(), p.bytes().begin(), p.bytes().end());
  ByteWriter tail;
  tail.u64(fnv1a64(p.bytes().data(), p.bytes().size()));
  bytes.insert(bytes.end(), tail.bytes().begin(), tail.bytes().end());
  return bytes;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw Error(ErrorCode::CorruptCheckpoint, "not a checkpoint file");
  }
  ByteReader head(bytes.data() + 8, 12);
  const std::uint32_t version = head.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::CheckpointVersionMismatch,
                "checkpoint version " + std::to_string(version) + ", expected " + std::to_string(kCheckpointVersion));
  }
  const std::uint64_t size = head.u64();
  if (bytes.size() != 20 + size + 8) throw Error(ErrorCode::CorruptCheckpoint, "checkpoint size mismatch");
  const std::uint8_t* payload = bytes.data() + 20;
  ByteReader tail(payload + size, 8);
  if (tail.u64() != fnv1a64(payload, size)) throw Error(ErrorCode::CorruptCheckpoint, "checkpoint checksum mismatch");

  ByteReader r(payload, size);
  Checkpoint c;
  c.config_hash = r.u64();
  c.burned_in = r.u8() != 0;
  c.samples_done = r.u64();
  c.csv_bytes = r.u64();
  c.chain.phi = r.f64s();
  c.chain.step_count = r.u64();
  for (auto& k : c.chain.rng.key) k = r.u32();
  for (auto& k : c.chain.rng.counter) k = r.u32();
  for (auto& k : c.chain.rng.buffer) k = r.u32();
  c.chain.rng.position = r.u32();
  c.chain.dt = r.f64();
  c.chain.accepted = r.u64();
  c.chain.proposed = r.u64();
  c.accumulators = r.f64s();
  if (!r.done()) throw Error(ErrorCode::CorruptCheckpoint, "trailing bytes in checkpoint payload");
  return c;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  const auto bytes = encode_checkpoint(c);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace ggl
