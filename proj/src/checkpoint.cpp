#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "micol/encoder.hpp"
#include "micol/error.hpp"
#include "micol/jsonl.hpp"

namespace micol {
namespace {

constexpr char kMagic[8] = {'M', 'I', 'C', 'O', 'L', 'C', 'K', 'P'};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) { buf_.append(s); }
  std::string& buffer() { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return s_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (s_.size() - pos_ < n) throw CheckpointError("corrupt checkpoint: truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(s_[pos_ + i])} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const EncoderParams& p) {
  Writer w;
  w.bytes({kMagic, sizeof(kMagic)});
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(p.dim));
  w.u32(static_cast<std::uint32_t>(p.max_len));
  w.u64(p.vocab.size());
  for (const auto& t : p.vocab.tokens()) {
    w.u32(static_cast<std::uint32_t>(t.size()));
    w.bytes(t);
  }
  for (double x : p.weights.embedding.data) w.f64(x);
  for (double x : p.weights.projection.data) w.f64(x);
  for (double x : p.weights.head) w.f64(x);
  w.u64(p.vocab.hash());
  w.u64(fnv1a(w.buffer()));
  return std::move(w.buffer());
}

EncoderParams deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  EncoderParams p;
  p.dim = r.u32();
  p.max_len = r.u32();
  const auto vocab_size = r.u64();
  // Every token needs at least its 4-byte length prefix.
  if (vocab_size == 0 || vocab_size > r.remaining() / 4) throw CheckpointError("corrupt checkpoint: bad vocabulary size");
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const auto len = r.u32();
    tokens.emplace_back(r.bytes(len));
  }
  p.vocab = Vocabulary::from_ordered(std::move(tokens));
  if (p.dim == 0) throw CheckpointError("corrupt checkpoint: zero dimension");
  const std::size_t expected = (p.vocab.size() * p.dim + p.dim * p.dim + p.dim) * 8 + 16;
  if (r.remaining() != expected) throw CheckpointError("corrupt checkpoint: unexpected payload size");
  p.weights.embedding = Matrix(p.vocab.size(), p.dim);
  p.weights.projection = Matrix(p.dim, p.dim);
  p.weights.head.assign(p.dim, 0.0);
  for (auto& x : p.weights.embedding.data) x = r.f64();
  for (auto& x : p.weights.projection.data) x = r.f64();
  for (auto& x : p.weights.head) x = r.f64();
  const auto vocab_hash = r.u64();
  const auto body_end = r.pos();
  const auto checksum = r.u64();
  if (checksum != fnv1a(bytes.substr(0, body_end))) throw CheckpointError("corrupt checkpoint: checksum mismatch");
  if (vocab_hash != p.vocab.hash()) throw CheckpointError("corrupt checkpoint: vocabulary hash mismatch");
  if (!p.weights.all_finite()) throw CheckpointError("corrupt checkpoint: non-finite weights");
  return p;
}

void save_checkpoint(const EncoderParams& p, const std::filesystem::path& path) {
  auto out = open_output(path);
  const auto bytes = serialize_checkpoint(p);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return deserialize_checkpoint(bytes);
}

void check_vocabulary(const EncoderParams& p, const Vocabulary& expected) {
  if (p.vocab.hash() != expected.hash() || !(p.vocab == expected)) {
    throw CheckpointError("checkpoint vocabulary (" + std::to_string(p.vocab.size()) +
                          " tokens) does not match this corpus (" + std::to_string(expected.size()) +
                          " tokens)");
  }
}

}  // namespace micol
