#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "snn/dataset.hpp"

namespace httplib {
class Server;
}

namespace snn {

struct ServiceOptions {
  double presentation = units::ms(75);
  double dt = units::ms(1);
  int max_canvas_side = 1024;
  // Bounds for the t_ms / dt_ms query overrides.
  double min_t_ms = 10, max_t_ms = 150;
  double min_dt_ms = 0.1, max_dt_ms = 2;
  std::int64_t max_steps = 1500;
  int binarize_threshold = 128;
};

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

// Stateless per request: each call simulates on its own network state and
// reads a snapshot of the loaded checkpoint. Loading a new checkpoint swaps
// the snapshot; requests already running finish on the old one.
class InferenceService {
 public:
  explicit InferenceService(ServiceOptions opts = {});

  void load_checkpoint(const std::filesystem::path& path);
  void set_model(Checkpoint ckpt);
  bool weights_loaded() const;

  HttpResult health() const;
  // body: {"format":"raw","width":W,"height":H,"pixels":<base64>} or
  //       {"format":"mnist28","pixels":<base64 of 784 bytes>}
  HttpResult infer(std::string_view body, std::optional<std::string> t_ms = std::nullopt,
                   std::optional<std::string> dt_ms = std::nullopt) const;

  const ServiceOptions& options() const { return opts_; }

 private:
  std::shared_ptr<const Checkpoint> snapshot() const;

  ServiceOptions opts_;
  mutable std::mutex mu_;
  std::shared_ptr<const Checkpoint> model_;
};

// GET /api/health, POST /api/infer, CORS preflight for `cors_origin`.
void register_routes(httplib::Server& server, InferenceService& service,
                     const std::string& cors_origin = "*");

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);
std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace snn
