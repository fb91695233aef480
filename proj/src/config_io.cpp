#include "snn/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "snn/errors.hpp"

namespace snn {
namespace {

namespace pt = boost::property_tree;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidInput("config key '" + key + "': '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::string format_kernel(const Kernel3x3& k) {
  std::string out;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i) out += ' ';
    out += format_double(k[i]);
  }
  return out;
}

Kernel3x3 parse_kernel(const std::string& key, const std::string& s) {
  std::istringstream in(s);
  Kernel3x3 k{};
  std::string tok;
  std::size_t i = 0;
  while (in >> tok) {
    if (i >= k.size()) throw InvalidInput("config key '" + key + "': more than 9 entries");
    k[i++] = parse_double(key, tok);
  }
  if (i != k.size()) throw InvalidInput("config key '" + key + "': expected 9 entries");
  return k;
}

// A flat table of (key, pointer) pairs over every scalar field.
struct Field {
  std::string key;
  double* value;
};

std::vector<Field> scalar_fields(NetworkConfig& n, LearnConfig& l) {
  std::vector<Field> f = {
      {"simulation.presentation_s", &n.presentation},
      {"simulation.dt_s", &n.dt},
      {"simulation.desired_rate_hz", &n.desired_rate},
      {"simulation.inhibition_weight", &n.inhibition_weight},
      {"simulation.output_gain_a", &n.output_gain},
      {"encoding.i0_a", &n.encoding.i_0},
      {"encoding.ip_a", &n.encoding.i_p},
      {"kernel.tau1_s", &n.kernel.tau_rise_slow},
      {"kernel.tau2_s", &n.kernel.tau_rise_fast},
      {"learning.rate", &l.learning_rate},
      {"learning.norm_epsilon", &l.norm_epsilon},
      {"learning.tau_l_s", &l.tau_l},
  };
  const std::pair<const char*, LifParams*> layers[] = {
      {"lif_input", &n.input_lif}, {"lif_hidden", &n.hidden_lif}, {"lif_output", &n.output_lif}};
  for (const auto& [name, p] : layers) {
    const std::string s(name);
    f.push_back({s + ".capacitance_f", &p->capacitance});
    f.push_back({s + ".leak_conductance_s", &p->leak_conductance});
    f.push_back({s + ".rest_potential_v", &p->rest_potential});
    f.push_back({s + ".threshold_v", &p->threshold});
    f.push_back({s + ".refractory_s", &p->refractory});
  }
  return f;
}

std::string filter_key(int i) { return "filters.kernel" + std::to_string(i); }

}  // namespace

void ModelConfig::validate() const {
  network.validate();
  learn.validate();
}

std::string to_ini(const ModelConfig& cfg) {
  ModelConfig copy = cfg;
  pt::ptree tree;
  for (const auto& f : scalar_fields(copy.network, copy.learn)) {
    tree.put(pt::ptree::path_type(f.key, '.'), format_double(*f.value));
  }
  tree.put("filters.gain_a", format_double(cfg.filters.gain()));
  for (int i = 0; i < kNumFilters; ++i) tree.put(filter_key(i), format_kernel(cfg.filters.kernel(i)));
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

ModelConfig from_ini(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }

  ModelConfig cfg;
  std::set<std::string> known;
  for (const auto& f : scalar_fields(cfg.network, cfg.learn)) {
    known.insert(f.key);
    if (auto v = tree.get_optional<std::string>(f.key)) *f.value = parse_double(f.key, *v);
  }

  known.insert("filters.gain_a");
  double gain = cfg.filters.gain();
  if (auto v = tree.get_optional<std::string>("filters.gain_a")) gain = parse_double("filters.gain_a", *v);
  auto kernels = cfg.filters.kernels();
  for (int i = 0; i < kNumFilters; ++i) {
    const auto key = filter_key(i);
    known.insert(key);
    if (auto v = tree.get_optional<std::string>(key)) kernels[static_cast<std::size_t>(i)] = parse_kernel(key, *v);
  }
  cfg.filters = FilterBank(kernels, gain);

  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      if (!known.contains(section + "." + key)) {
        throw InvalidInput("config: unknown key '" + section + "." + key + "'");
      }
    }
    if (body.empty()) throw InvalidInput("config: key '" + section + "' outside any section");
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_ini(buf.str());
}

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return to_ini(a) == to_ini(b);
}

}  // namespace snn
