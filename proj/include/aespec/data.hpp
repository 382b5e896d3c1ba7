#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aespec::data {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthError : public FormatError {
 public:
  LengthError(std::size_t expected, std::size_t actual);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Raised when required dataset files are absent; the message lists them.
class MissingDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// count x rows x cols unsigned bytes, row-major within each image.
struct ImageTensor {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  std::span<const std::uint8_t> image(std::size_t i) const { return {pixels.data() + i * rows * cols, rows * cols}; }
};

/// Inflates gzip input; other input is returned unchanged.
std::vector<std::uint8_t> maybe_gunzip(std::span<const std::uint8_t> bytes);

ImageTensor parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// Serialises an image tensor back to an (uncompressed) IDX byte stream.
std::vector<std::uint8_t> encode_idx_images(const ImageTensor& images);

/// pixel / 127.5 - 1: 0 -> -1, 255 -> +1.
double normalize(std::uint8_t pixel);
/// Inverse affine map, rounded and clamped to [0, 255].
std::uint8_t denormalize(double value);

/// Flattened row-major: element (r, c) lands at r * cols + c.
std::vector<double> flatten(std::span<const std::uint8_t> image);

enum class Source { MnistTrain, MnistTest, Synthetic };

struct Dataset {
  std::vector<std::vector<double>> points;  // each of length 784, coordinates in [-1, 1]
  std::optional<std::vector<std::uint8_t>> labels;
  Source source = Source::Synthetic;
  std::uint64_t synthetic_seed = 0;

  std::size_t size() const { return points.size(); }
  /// First `count` points (or all when count >= size).
  Dataset head(std::size_t count) const;
};

enum class Split { Train, Test };

/// Expected file names for a split (without the optional .gz suffix).
std::vector<std::string> expected_files(Split split);

/// Loads a split from `dir`, accepting raw or gzip-compressed IDX files.
/// Labels are loaded when present. Throws MissingDataError naming the files.
Dataset load_mnist(const std::filesystem::path& dir, Split split);

/// Directory from SPECTRA_DATA_DIR, if set.
std::optional<std::filesystem::path> data_dir_from_env();

/// `count` points on a random 10-dimensional affine subspace of [-1,1]^784
/// plus N(0, 0.05^2) noise, clipped to [-1, 1]. Deterministic in seed.
Dataset synthetic_dataset(std::size_t count, std::uint64_t seed);

/// Loads a whole file into memory.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace aespec::data
