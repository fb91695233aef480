#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "snn/network.hpp"
#include "snn/normad.hpp"

namespace snn {

// Everything needed to rebuild a network apart from its learned weights.
struct ModelConfig {
  NetworkConfig network;
  FilterBank filters = FilterBank::standard();
  LearnConfig learn;

  void validate() const;
};

// INI text, SI units, doubles in shortest round-trip form. Keys absent from
// the input keep their default; unknown keys are rejected.
std::string to_ini(const ModelConfig& cfg);
ModelConfig from_ini(std::string_view text);
ModelConfig load_config_file(const std::filesystem::path& path);

bool operator==(const ModelConfig& a, const ModelConfig& b);

}  // namespace snn
