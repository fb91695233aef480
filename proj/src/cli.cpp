#include "snn/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <opencv2/imgcodecs.hpp>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "snn/errors.hpp"
#include "snn/preprocess.hpp"
#include "snn/service.hpp"
#include "snn/training.hpp"

namespace snn {
namespace {

using json = nlohmann::json;

struct CliOptions {
  std::string mnist_dir = "data/mnist";
  std::string config_path;
  int epochs = 20;
  double dt_us = 0;  // 0 = keep the configured value
  double t_ms = 0;
  double rate_hz = -1;
  double lr = 0;
  std::size_t subset = 0;
  std::size_t test_subset = 0;
  std::vector<int> classes;
  std::uint64_t seed = 1;
  std::string weights;
  std::string out = "snn.ckpt";
  std::string stats;
  int workers = 1;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string cors_origin = "*";
  std::string image;
  int index = -1;
  std::string format = "auto";
  std::vector<double> sweep_t_ms;
  std::vector<double> sweep_dt_us;
};

ModelConfig base_config(const CliOptions& opt) {
  return opt.config_path.empty() ? ModelConfig{} : load_config_file(opt.config_path);
}

void apply_overrides(const CliOptions& opt, ModelConfig& cfg) {
  if (opt.dt_us > 0) cfg.network.dt = units::us(opt.dt_us);
  if (opt.t_ms > 0) cfg.network.presentation = units::ms(opt.t_ms);
  if (opt.rate_hz >= 0) cfg.network.desired_rate = opt.rate_hz;
  if (opt.lr > 0) cfg.learn.learning_rate = opt.lr;
  cfg.validate();
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(epoch);
}

int cmd_train(const CliOptions& opt, std::ostream& out) {
  ModelConfig cfg = base_config(opt);
  apply_overrides(opt, cfg);
  const auto all = load_mnist_split(opt.mnist_dir, "train");
  const auto data = select_subset(all, opt.subset, opt.classes, opt.seed);
  std::vector<LabeledImage> held_out;
  if (opt.test_subset > 0) {
    held_out = select_subset(load_mnist_split(opt.mnist_dir, "t10k"), opt.test_subset, opt.classes, opt.seed);
  }

  WeightMatrix weights;
  if (!opt.weights.empty()) weights = load_checkpoint(opt.weights).weights;

  const std::string stats_path = opt.stats.empty() ? opt.out + ".stats.jsonl" : opt.stats;
  std::ofstream stats(stats_path, std::ios::trunc);
  if (!stats) throw IoError("cannot write stats log " + stats_path);

  out << "training on " << data.size() << " images, " << learned_parameter_count()
      << " learned synapses, dt " << units::to_ms(cfg.network.dt) << " ms, T "
      << units::to_ms(cfg.network.presentation) << " ms, lr " << cfg.learn.learning_rate << "\n";
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto order = seeded_permutation(data.size(), epoch_seed(opt.seed, epoch));
    const auto st = train_epoch(data, weights, cfg.filters, cfg.network, cfg.learn, order);
    save_checkpoint(opt.out, weights, cfg);

    // online_*: counted while the weights were still moving during the epoch.
    // train_error_pct: the epoch's final weights re-run over the training set.
    const auto tr = evaluate(data, weights, cfg.filters, cfg.network, opt.workers);
    // The log holds only deterministic fields; timing goes to stdout.
    json rec = {{"epoch", epoch},
                {"presentations", st.presentations},
                {"online_errors", st.errors},
                {"online_error_pct", 100.0 * st.error_rate()},
                {"online_silent", st.silent},
                {"train_error_pct", 100.0 * (1.0 - tr.accuracy())}};
    if (!held_out.empty()) {
      const auto ev = evaluate(held_out, weights, cfg.filters, cfg.network, opt.workers);
      rec["heldout_accuracy_pct"] = 100.0 * ev.accuracy();
    }
    stats << rec.dump() << "\n" << std::flush;
    rec["wall_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << rec.dump() << "\n" << std::flush;
  }
  return kExitOk;
}

void print_report(std::ostream& out, const EvalReport& r, double t_ms, double dt_ms) {
  out << std::fixed << std::setprecision(2) << "T " << t_ms << " ms, dt " << dt_ms
      << " ms: accuracy " << 100.0 * r.accuracy() << "% (" << r.correct << "/" << r.total
      << "), " << r.mean_ms_per_image << " ms/image";
  if (r.silent) out << ", no spikes on " << r.silent << " image(s)";
  out << "\nconfusion (rows = label, cols = predicted):\n";
  for (int l = 0; l < kNumClasses; ++l) {
    out << "  " << l << ":";
    for (int p = 0; p < kNumClasses; ++p) out << std::setw(5) << r.confusion[static_cast<std::size_t>(l)][static_cast<std::size_t>(p)];
    out << "\n";
  }
  out << std::defaultfloat;
}

int cmd_eval(const CliOptions& opt, std::ostream& out) {
  const auto ckpt = load_checkpoint(opt.weights);
  const auto data = select_subset(load_mnist_split(opt.mnist_dir, "t10k"), opt.subset, opt.classes, opt.seed);
  std::vector<double> ts = opt.sweep_t_ms, dts = opt.sweep_dt_us;
  if (ts.empty()) ts.push_back(opt.t_ms > 0 ? opt.t_ms : units::to_ms(ckpt.config.network.presentation));
  if (dts.empty()) dts.push_back(opt.dt_us > 0 ? opt.dt_us : ckpt.config.network.dt / units::kMicro);
  for (double t : ts) {
    for (double dt : dts) {
      NetworkConfig cfg = ckpt.config.network;
      cfg.presentation = units::ms(t);
      cfg.dt = units::us(dt);
      cfg.validate();
      const auto report = evaluate(data, ckpt.weights, ckpt.config.filters, cfg, opt.workers);
      print_report(out, report, t, dt / 1000.0);
    }
  }
  return kExitOk;
}

GrayImage read_image_file(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw IoError("cannot read image " + path);
  GrayImage g(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) g.at(r, c) = m.at<std::uint8_t>(r, c);
  }
  return g;
}

int cmd_infer(const CliOptions& opt, std::ostream& out) {
  const auto ckpt = load_checkpoint(opt.weights);
  NetworkConfig cfg = ckpt.config.network;
  if (opt.t_ms > 0) cfg.presentation = units::ms(opt.t_ms);
  if (opt.dt_us > 0) cfg.dt = units::us(opt.dt_us);
  cfg.validate();

  Image image{};
  int label = -1;
  const auto t_pre = std::chrono::steady_clock::now();
  if (opt.index >= 0) {
    const auto test = load_mnist_split(opt.mnist_dir, "t10k");
    if (static_cast<std::size_t>(opt.index) >= test.size()) throw InvalidInput("--index past the end of the test split");
    image = test[static_cast<std::size_t>(opt.index)].pixels;
    label = test[static_cast<std::size_t>(opt.index)].label;
  } else {
    const auto g = read_image_file(opt.image);
    const bool as_mnist = opt.format == "mnist28" ||
                          (opt.format == "auto" && g.width == kImageSide && g.height == kImageSide);
    image = as_mnist ? to_image(g) : preprocess_pipeline(g);
  }
  const double pre_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_pre).count();
  const auto t_sim = std::chrono::steady_clock::now();
  const auto rec = forward_pass(image, ckpt.weights, ckpt.config.filters, cfg);
  const double sim_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_sim).count();

  json res = {{"digit", classify(rec)}, {"counts", rec.output_counts},
              {"preprocess_ms", pre_ms}, {"inference_ms", sim_ms}};
  if (label >= 0) res["label"] = label;
  out << res.dump() << "\n";
  return kExitOk;
}

// Set from signal handlers, acted on by the serve loop's watcher thread.
volatile std::sig_atomic_t g_reload = 0;
volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const CliOptions& opt, std::ostream& out) {
  ServiceOptions opts;
  if (opt.t_ms > 0) opts.presentation = units::ms(opt.t_ms);
  if (opt.dt_us > 0) opts.dt = units::us(opt.dt_us);
  InferenceService service(opts);
  if (!opt.weights.empty()) service.load_checkpoint(opt.weights);

  httplib::Server server;
  register_routes(server, service, opt.cors_origin);
  g_reload = 0;
  g_stop = 0;
  std::signal(SIGHUP, [](int) { g_reload = 1; });
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  // SIGHUP re-reads --weights; the swap is atomic for in-flight requests.
  std::jthread watcher([&](std::stop_token stop) {
    while (!stop.stop_requested()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      if (g_stop) {
        server.stop();
        return;
      }
      if (g_reload && !opt.weights.empty()) {
        g_reload = 0;
        try {
          service.load_checkpoint(opt.weights);
          std::cerr << "reloaded " << opt.weights << "\n";
        } catch (const std::exception& e) {
          std::cerr << "reload failed, keeping previous weights: " << e.what() << "\n";
        }
      }
    }
  });
  out << "serving on http://" << opt.host << ":" << opt.port << " (weights "
      << (service.weights_loaded() ? "loaded" : "not loaded") << ")\n" << std::flush;
  const bool ok = server.listen(opt.host, opt.port);
  watcher.request_stop();
  std::signal(SIGHUP, SIG_DFL);
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
  if (!ok) throw IoError("cannot listen on " + opt.host + ":" + std::to_string(opt.port));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliOptions opt;
  CLI::App app{"Spiking network digit classifier: LIF layers trained with NormAD"};
  app.require_subcommand(1);

  auto add_data = [&](CLI::App* c) {
    c->add_option("--mnist-dir", opt.mnist_dir, "Directory holding the IDX files");
    c->add_option("--subset", opt.subset, "Total images to use, split evenly over classes (0 = all)");
    c->add_option("--classes", opt.classes, "Comma-separated digits to keep")->delimiter(',');
    c->add_option("--seed", opt.seed, "Seed for subset selection and shuffling");
    c->add_option("--workers", opt.workers, "Evaluation threads")->check(CLI::PositiveNumber);
  };
  auto add_timing = [&](CLI::App* c) {
    c->add_option("--dt-us", opt.dt_us, "Integration step in microseconds")->check(CLI::PositiveNumber);
    c->add_option("--t-ms", opt.t_ms, "Presentation time in milliseconds")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Train hidden->output weights with NormAD");
  add_data(train);
  add_timing(train);
  train->add_option("--config", opt.config_path, "INI config (defaults built in)");
  train->add_option("--epochs", opt.epochs, "Epochs")->check(CLI::PositiveNumber);
  train->add_option("--rate-hz", opt.rate_hz, "Desired output rate");
  train->add_option("--lr", opt.lr, "Learning rate")->check(CLI::PositiveNumber);
  train->add_option("--weights", opt.weights, "Resume from this checkpoint");
  train->add_option("--out", opt.out, "Checkpoint written after every epoch");
  train->add_option("--stats", opt.stats, "Per-epoch stats log (default <out>.stats.jsonl)");
  train->add_option("--test-subset", opt.test_subset, "Held-out images evaluated after each epoch");

  auto* eval = app.add_subcommand("eval", "Accuracy on the test split");
  add_data(eval);
  add_timing(eval);
  eval->add_option("--weights", opt.weights, "Checkpoint")->required();
  eval->add_option("--sweep-t-ms", opt.sweep_t_ms, "Presentation times to sweep")->delimiter(',');
  eval->add_option("--sweep-dt-us", opt.sweep_dt_us, "Time steps to sweep")->delimiter(',');

  auto* infer = app.add_subcommand("infer", "Classify one image");
  add_timing(infer);
  infer->add_option("--weights", opt.weights, "Checkpoint")->required();
  auto* img = infer->add_option("--image", opt.image, "Image file (ink bright on dark)");
  auto* idx = infer->add_option("--index", opt.index, "Index into the test split instead of --image");
  img->excludes(idx);
  infer->add_option("--mnist-dir", opt.mnist_dir, "Directory holding the IDX files");
  infer->add_option("--format", opt.format, "auto | canvas | mnist28")
      ->check(CLI::IsMember({"auto", "canvas", "mnist28"}));

  auto* serve = app.add_subcommand("serve", "HTTP inference service");
  add_timing(serve);
  serve->add_option("--weights", opt.weights, "Checkpoint (reloaded on SIGHUP)");
  serve->add_option("--port", opt.port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", opt.host, "Bind address");
  serve->add_option("--cors-origin", opt.cors_origin, "Allowed browser origin");

  auto* config = app.add_subcommand("config", "Print the default INI config");
  auto* info = app.add_subcommand("info", "Print network dimensions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(opt, out);
    if (*eval) return cmd_eval(opt, out);
    if (*infer) {
      if (opt.image.empty() && opt.index < 0) {
        err << "usage error: infer needs --image or --index\n";
        return kExitUsage;
      }
      return cmd_infer(opt, out);
    }
    if (*serve) return cmd_serve(opt, out);
    if (*config) {
      out << to_ini(ModelConfig{});
      return kExitOk;
    }
    if (*info) {
      out << "input neurons " << kImagePixels << "\nhidden neurons " << kHiddenSize << " ("
          << kNumFilters << " maps of " << kFeatureSide << "x" << kFeatureSide << ")\noutput neurons "
          << kNumClasses << "\nlearned synapses " << learned_parameter_count() << "\n";
      return kExitOk;
    }
  } catch (const BlankDrawing& e) {
    err << "error: " << e.what() << "\n";
    return kExitBlankDrawing;
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    // IoError, ParseError, DimensionError and anything else from the file layer.
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace snn
