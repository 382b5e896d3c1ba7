#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "aespec/autoencoder.hpp"

namespace aespec::ae {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("checkpoint truncated: needed " + std::to_string(n) + " bytes at offset " +
                        std::to_string(pos_) + ", file has " + std::to_string(bytes_.size()));
    }
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const AutoencoderParams& params, std::uint32_t epoch, std::uint64_t seed) {
  params.validate();
  Writer w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(static_cast<std::uint32_t>(params.latent_dim));
  w.u32(epoch);
  w.u64(seed);
  for (const Layer& layer : params.layers) {
    w.u32(static_cast<std::uint32_t>(layer.weights.rows()));
    w.u32(static_cast<std::uint32_t>(layer.weights.cols()));
    for (double v : layer.weights.data()) w.f64(v);
    for (double v : layer.biases) w.f64(v);
  }
  return w.take();
}

AutoencoderParams decode_checkpoint(std::span<const std::uint8_t> bytes, CheckpointHeader* header) {
  Reader r(bytes);
  auto magic = r.raw(sizeof kCheckpointMagic);
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError("not a checkpoint: expected magic AESPEC01 (format v1), found '" +
                      std::string(magic.begin(), magic.end()) + "'");
  }
  CheckpointHeader h{};
  h.latent_dim = r.u32();
  h.epoch = r.u32();
  h.seed = r.u64();
  if (h.latent_dim < kMinLatent || h.latent_dim > kMaxLatent) {
    throw FormatError("checkpoint latent dimension " + std::to_string(h.latent_dim) + " outside [2, 20]");
  }
  const auto widths = layer_widths(h.latent_dim);
  AutoencoderParams p;
  p.latent_dim = h.latent_dim;
  for (std::size_t l = 0; l < kLayerCount; ++l) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != widths[l + 1] || cols != widths[l]) {
      throw FormatError("checkpoint layer " + std::to_string(l + 1) + " is " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", architecture expects " + std::to_string(widths[l + 1]) + "x" +
                        std::to_string(widths[l]));
    }
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (double& v : w) v = r.f64();
    std::vector<double> b(rows);
    for (double& v : b) v = r.f64();
    try {
      p.layers[l].weights = Matrix(rows, cols, std::move(w));
    } catch (const std::invalid_argument& e) {
      throw FormatError("checkpoint layer " + std::to_string(l + 1) + ": " + e.what());
    }
    p.layers[l].biases = std::move(b);
  }
  if (r.remaining() != 0) {
    throw FormatError("checkpoint has " + std::to_string(r.remaining()) + " trailing bytes");
  }
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  if (header) *header = h;
  return p;
}

void write_checkpoint(const std::filesystem::path& path, const AutoencoderParams& params, std::uint32_t epoch,
                      std::uint64_t seed) {
  const auto bytes = encode_checkpoint(params, epoch, seed);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

AutoencoderParams read_checkpoint(const std::filesystem::path& path, CheckpointHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, header);
}

}  // namespace aespec::ae
