#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "snn/config_io.hpp"
#include "snn/network.hpp"

namespace snn {

struct LabeledImage {
  Image pixels{};
  int label = 0;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// MNIST IDX containers. Errors are ParseError with the failing byte offset,
// or IoError when the file cannot be opened.
std::vector<Image> read_idx_images(const std::filesystem::path& path);
std::vector<int> read_idx_labels(const std::filesystem::path& path);
std::vector<Image> parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

// Pairs `<dir>/<prefix>-images-idx3-ubyte` with `<dir>/<prefix>-labels-idx1-ubyte`;
// prefix is "train" or "t10k".
std::vector<LabeledImage> load_mnist_split(const std::filesystem::path& dir, const std::string& prefix);

// SNNW checkpoint, little-endian:
//   "SNNW" | u32 version=1 | u32 rows | u32 cols | f64 weights[rows*cols]
//   | u64 config_len | config_len bytes of INI text
struct Checkpoint {
  WeightMatrix weights;
  ModelConfig config;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const WeightMatrix& weights, const ModelConfig& config);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const WeightMatrix& weights,
                     const ModelConfig& config);
// Throws DimensionError unless the stored matrix is 8112x10.
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Any shape; for tools that inspect foreign checkpoints.
Checkpoint load_checkpoint_any_shape(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace snn
