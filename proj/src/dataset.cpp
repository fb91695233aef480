#include "snn/dataset.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "snn/errors.hpp"

namespace snn {
namespace {

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("truncated file: expected ") + what, pos_);
    }
  }

  std::uint32_t u32_be(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  template <typename T>
  T le(const char* what) {
    need(sizeof(T), what);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<U>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<T>(v);
  }

  const std::uint8_t* take(std::size_t n, const char* what) {
    need(n, what);
    const auto* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const auto v = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void check_magic(std::uint32_t magic, std::uint32_t expected) {
  if (magic == expected) return;
  if (expected == kIdxImageMagic && magic == kIdxLabelMagic) {
    throw ParseError("label file passed where images expected (magic 0x00000801)", 0);
  }
  if (expected == kIdxLabelMagic && magic == kIdxImageMagic) {
    throw ParseError("image file passed where labels expected (magic 0x00000803)", 0);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08X", magic);
  throw ParseError(std::string("bad IDX magic ") + buf, 0);
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<Image> parse_idx_images(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  check_magic(r.u32_be("magic"), kIdxImageMagic);
  const auto count = r.u32_be("image count");
  const auto rows_at = r.offset();
  const auto rows = r.u32_be("row count");
  const auto cols = r.u32_be("column count");
  if (rows != kImageSide || cols != kImageSide) {
    throw ParseError("image dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", expected 28x28",
                     rows_at);
  }
  std::vector<Image> images(count);
  for (auto& img : images) {
    const auto* p = r.take(kImagePixels, "image pixels");
    std::memcpy(img.data(), p, kImagePixels);
  }
  return images;
}

std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  check_magic(r.u32_be("magic"), kIdxLabelMagic);
  const auto count = r.u32_be("label count");
  std::vector<int> labels(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto at = r.offset();
    const int v = *r.take(1, "label byte");
    if (v > 9) {
      throw ParseError("label " + std::to_string(i) + " has value " + std::to_string(v) +
                           ", expected 0-9",
                       at);
    }
    labels[i] = v;
  }
  return labels;
}

std::vector<Image> read_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file_bytes(path));
}

std::vector<int> read_idx_labels(const std::filesystem::path& path) {
  return parse_idx_labels(read_file_bytes(path));
}

std::vector<LabeledImage> load_mnist_split(const std::filesystem::path& dir, const std::string& prefix) {
  const auto images = read_idx_images(dir / (prefix + "-images-idx3-ubyte"));
  const auto labels = read_idx_labels(dir / (prefix + "-labels-idx1-ubyte"));
  if (images.size() != labels.size()) {
    throw DimensionError(prefix + ": " + std::to_string(images.size()) + " images but " +
                         std::to_string(labels.size()) + " labels");
  }
  std::vector<LabeledImage> out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) out[i] = {images[i], labels[i]};
  return out;
}

std::vector<std::uint8_t> serialize_checkpoint(const WeightMatrix& weights, const ModelConfig& config) {
  const std::string text = to_ini(config);
  std::vector<std::uint8_t> out;
  out.reserve(24 + weights.size() * 8 + text.size());
  for (const char ch : {'S', 'N', 'N', 'W'}) out.push_back(static_cast<std::uint8_t>(ch));
  put_le(out, kCheckpointVersion);
  put_le(out, static_cast<std::uint32_t>(weights.rows()));
  put_le(out, static_cast<std::uint32_t>(weights.cols()));
  for (double w : weights.data()) put_le(out, w);
  put_le(out, static_cast<std::uint64_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  const auto* magic = r.take(4, "SNNW magic");
  if (std::memcmp(magic, "SNNW", 4) != 0) throw ParseError("not an SNNW checkpoint", 0);
  const auto version_at = r.offset();
  const auto version = r.le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  const auto rows = r.le<std::uint32_t>("row count");
  const auto cols = r.le<std::uint32_t>("column count");
  r.need(std::size_t{rows} * cols * 8, "weight payload");
  WeightMatrix w(rows, cols);
  for (double& v : w.data()) v = r.le<double>("weight");
  const auto len = r.le<std::uint64_t>("config length");
  const auto* text = r.take(len, "config text");
  if (r.remaining() != 0) throw ParseError("trailing bytes after config text", r.offset());
  ModelConfig cfg = from_ini(std::string_view(reinterpret_cast<const char*>(text), len));
  return Checkpoint{std::move(w), std::move(cfg)};
}

void save_checkpoint(const std::filesystem::path& path, const WeightMatrix& weights,
                     const ModelConfig& config) {
  const auto bytes = serialize_checkpoint(weights, config);
  // Write beside the target and rename so a reader never sees a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint_any_shape(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file_bytes(path));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto ckpt = load_checkpoint_any_shape(path);
  if (ckpt.weights.rows() != static_cast<std::size_t>(kHiddenSize) ||
      ckpt.weights.cols() != static_cast<std::size_t>(kNumClasses)) {
    throw DimensionError("checkpoint " + path.string() + " holds a " +
                         std::to_string(ckpt.weights.rows()) + "x" +
                         std::to_string(ckpt.weights.cols()) + " matrix, network needs " +
                         std::to_string(kHiddenSize) + "x" + std::to_string(kNumClasses));
  }
  return ckpt;
}

}  // namespace snn
