#include "aespec/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "aespec/rng.hpp"

namespace aespec::data {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (static_cast<std::uint32_t>(b[at]) << 24) | (static_cast<std::uint32_t>(b[at + 1]) << 16) |
         (static_cast<std::uint32_t>(b[at + 2]) << 8) | static_cast<std::uint32_t>(b[at + 3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

constexpr double kSyntheticNoise = 0.05;
constexpr std::size_t kSyntheticRank = 10;

}  // namespace

LengthError::LengthError(std::size_t expected, std::size_t actual)
    : FormatError("IDX payload length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

std::vector<std::uint8_t> maybe_gunzip(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1f || bytes[1] != 0x8b) return {bytes.begin(), bytes.end()};

  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw FormatError("zlib: inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("gzip stream is corrupt (zlib code " + std::to_string(rc) + ")");
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw FormatError("gzip stream truncated");
    }
  }
  inflateEnd(&zs);
  return out;
}

ImageTensor parse_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw LengthError(16, bytes.size());
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw FormatError("IDX image file: bad magic " + hex32(magic) + ", expected " + hex32(kIdxImageMagic));
  }
  ImageTensor t;
  t.count = read_be32(bytes, 4);
  t.rows = read_be32(bytes, 8);
  t.cols = read_be32(bytes, 12);
  if (t.rows != 28 || t.cols != 28) {
    throw FormatError("IDX image file: images are " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                      ", expected 28x28");
  }
  const std::size_t expected = t.count * t.rows * t.cols;
  if (bytes.size() - 16 != expected) throw LengthError(expected, bytes.size() - 16);
  t.pixels.assign(bytes.begin() + 16, bytes.end());
  return t;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw LengthError(8, bytes.size());
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw FormatError("IDX label file: bad magic " + hex32(magic) + ", expected " + hex32(kIdxLabelMagic));
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() - 8 != count) throw LengthError(count, bytes.size() - 8);
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
  for (auto l : labels)
    if (l > 9) throw FormatError("IDX label file: label " + std::to_string(l) + " outside 0-9");
  return labels;
}

std::vector<std::uint8_t> encode_idx_images(const ImageTensor& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

double normalize(std::uint8_t pixel) { return static_cast<double>(pixel) / 127.5 - 1.0; }

std::uint8_t denormalize(double value) {
  const double p = std::round((value + 1.0) * 127.5);
  return static_cast<std::uint8_t>(std::clamp(p, 0.0, 255.0));
}

std::vector<double> flatten(std::span<const std::uint8_t> image) {
  std::vector<double> v(image.size());
  std::transform(image.begin(), image.end(), v.begin(), normalize);
  return v;
}

Dataset Dataset::head(std::size_t count) const {
  Dataset d;
  d.source = source;
  d.synthetic_seed = synthetic_seed;
  const std::size_t n = std::min(count, points.size());
  d.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n));
  if (labels) d.labels = std::vector<std::uint8_t>(labels->begin(), labels->begin() + static_cast<std::ptrdiff_t>(n));
  return d;
}

std::vector<std::string> expected_files(Split split) {
  if (split == Split::Train) return {"train-images-idx3-ubyte", "train-labels-idx1-ubyte"};
  return {"t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

std::optional<std::filesystem::path> locate(const std::filesystem::path& dir, const std::string& name) {
  for (const auto& candidate : {dir / name, dir / (name + ".gz")})
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  return std::nullopt;
}

}  // namespace

Dataset load_mnist(const std::filesystem::path& dir, Split split) {
  const auto names = expected_files(split);
  const auto images_path = locate(dir, names[0]);
  if (!images_path) {
    throw MissingDataError("MNIST images not found in '" + dir.string() + "': expected " + names[0] + " or " +
                           names[0] + ".gz (labels: " + names[1] + "[.gz])");
  }
  const ImageTensor images = parse_idx_images(maybe_gunzip(read_file(*images_path)));
  Dataset d;
  d.source = split == Split::Train ? Source::MnistTrain : Source::MnistTest;
  d.points.reserve(images.count);
  for (std::size_t i = 0; i < images.count; ++i) d.points.push_back(flatten(images.image(i)));
  if (const auto labels_path = locate(dir, names[1])) {
    auto labels = parse_idx_labels(maybe_gunzip(read_file(*labels_path)));
    if (labels.size() != images.count) {
      throw FormatError("label count " + std::to_string(labels.size()) + " does not match image count " +
                        std::to_string(images.count));
    }
    d.labels = std::move(labels);
  }
  return d;
}

std::optional<std::filesystem::path> data_dir_from_env() {
  if (const char* v = std::getenv("SPECTRA_DATA_DIR"); v && *v) return std::filesystem::path(v);
  return std::nullopt;
}

Dataset synthetic_dataset(std::size_t count, std::uint64_t seed) {
  constexpr std::size_t dim = 784;
  const CounterRng root(seed);
  CounterRng model = root.split(0);
  std::vector<double> center(dim);
  for (double& c : center) c = model.uniform(-0.2, 0.2);
  std::vector<double> basis(dim * kSyntheticRank);  // dim x rank
  for (double& b : basis) b = 0.2 * model.gaussian();

  Dataset d;
  d.source = Source::Synthetic;
  d.synthetic_seed = seed;
  d.points.reserve(count);
  std::vector<double> coeff(kSyntheticRank);
  for (std::size_t n = 0; n < count; ++n) {
    CounterRng rng = root.split(n + 1);
    for (double& c : coeff) c = rng.uniform(-1.0, 1.0);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      double v = center[i];
      for (std::size_t k = 0; k < kSyntheticRank; ++k) v += basis[i * kSyntheticRank + k] * coeff[k];
      v += kSyntheticNoise * rng.gaussian();
      x[i] = std::clamp(v, -1.0, 1.0);
    }
    d.points.push_back(std::move(x));
  }
  return d;
}

}  // namespace aespec::data
