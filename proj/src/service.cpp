#include "snn/service.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>

#include "httplib.h"
#include "snn/errors.hpp"
#include "snn/preprocess.hpp"

namespace snn {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

HttpResult error(int status, const std::string& code, const std::string& detail = {}) {
  json body = {{"error", code}};
  if (!detail.empty()) body["detail"] = detail;
  return {status, std::move(body)};
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  if (text.empty()) return out;
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  // EVP_DecodeBlock keeps the zero bytes that padding stands for.
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  if (bytes.empty()) return out;
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

InferenceService::InferenceService(ServiceOptions opts) : opts_(opts) {}

void InferenceService::load_checkpoint(const std::filesystem::path& path) {
  set_model(snn::load_checkpoint(path));
}

void InferenceService::set_model(Checkpoint ckpt) {
  auto next = std::make_shared<const Checkpoint>(std::move(ckpt));
  std::lock_guard lock(mu_);
  model_ = std::move(next);
}

std::shared_ptr<const Checkpoint> InferenceService::snapshot() const {
  std::lock_guard lock(mu_);
  return model_;
}

bool InferenceService::weights_loaded() const { return snapshot() != nullptr; }

HttpResult InferenceService::health() const {
  return {200, json{{"status", "ok"}, {"weights_loaded", weights_loaded()}}};
}

HttpResult InferenceService::infer(std::string_view body, std::optional<std::string> t_ms_q,
                                   std::optional<std::string> dt_ms_q) const {
  const auto model = snapshot();
  if (!model) return error(503, "weights_not_loaded");

  double t_ms = units::to_ms(opts_.presentation);
  double dt_ms = units::to_ms(opts_.dt);
  if (t_ms_q) {
    const auto v = parse_number(*t_ms_q);
    if (!v || *v < opts_.min_t_ms || *v > opts_.max_t_ms) return error(400, "param_out_of_range", "t_ms");
    t_ms = *v;
  }
  if (dt_ms_q) {
    const auto v = parse_number(*dt_ms_q);
    if (!v || *v < opts_.min_dt_ms || *v > opts_.max_dt_ms) return error(400, "param_out_of_range", "dt_ms");
    dt_ms = *v;
  }
  NetworkConfig cfg = model->config.network;
  cfg.presentation = units::ms(t_ms);
  cfg.dt = units::ms(dt_ms);
  try {
    if (cfg.num_steps() > opts_.max_steps) return error(400, "param_out_of_range", "too many steps");
  } catch (const InvalidInput& e) {
    return error(400, "param_out_of_range", e.what());
  }

  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, "malformed_body", e.what());
  }
  if (!req.is_object() || !req.contains("format") || !req["format"].is_string() ||
      !req.contains("pixels") || !req["pixels"].is_string()) {
    return error(400, "malformed_body", "expected string fields 'format' and 'pixels'");
  }
  const auto format = req["format"].get<std::string>();
  const auto pixels = base64_decode(req["pixels"].get_ref<const std::string&>());
  if (!pixels) return error(400, "malformed_body", "pixels is not valid base64");

  Image image{};
  const auto t_pre = Clock::now();
  if (format == "mnist28") {
    if (pixels->size() != kImagePixels) {
      return error(400, "malformed_body", "mnist28 needs exactly 784 pixel bytes");
    }
    std::copy(pixels->begin(), pixels->end(), image.begin());
  } else if (format == "raw") {
    if (!req.contains("width") || !req.contains("height") || !req["width"].is_number_integer() ||
        !req["height"].is_number_integer()) {
      return error(400, "malformed_body", "raw format needs integer width and height");
    }
    const auto w = req["width"].get<std::int64_t>();
    const auto h = req["height"].get<std::int64_t>();
    if (w < 1 || h < 1) return error(400, "malformed_body", "width and height must be >= 1");
    if (w > opts_.max_canvas_side || h > opts_.max_canvas_side) {
      return error(413, "canvas_too_large");
    }
    if (pixels->size() != static_cast<std::size_t>(w * h)) {
      return error(400, "malformed_body", "pixel count does not match width*height");
    }
    try {
      image = preprocess_pipeline(GrayImage(static_cast<int>(w), static_cast<int>(h), *pixels),
                                  opts_.binarize_threshold);
    } catch (const BlankDrawing&) {
      return error(400, "blank_drawing");
    }
  } else {
    return error(400, "malformed_body", "unknown format '" + format + "'");
  }
  const double preprocess_ms = ms_since(t_pre);

  const auto t_sim = Clock::now();
  SpikeRecord rec;
  try {
    rec = forward_pass(image, model->weights, model->config.filters, cfg);
  } catch (const NumericError& e) {
    return error(500, "numeric_failure", e.what());
  }
  const double inference_ms = ms_since(t_sim);

  return {200, json{{"digit", classify(rec)},
                    {"counts", rec.output_counts},
                    {"preprocess_ms", preprocess_ms},
                    {"inference_ms", inference_ms},
                    {"t_ms", t_ms},
                    {"dt_ms", dt_ms}}};
}

void register_routes(httplib::Server& server, InferenceService& service, const std::string& cors_origin) {
  const auto send = [cors_origin](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", cors_origin);
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get("/api/health", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  server.Post("/api/infer", [&service, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> t_ms, dt_ms;
    if (req.has_param("t_ms")) t_ms = req.get_param_value("t_ms");
    if (req.has_param("dt_ms")) dt_ms = req.get_param_value("dt_ms");
    send(res, service.infer(req.body, t_ms, dt_ms));
  });
  server.Options(R"(/api/.*)", [cors_origin](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace snn
