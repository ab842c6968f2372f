#include "ctdg/params_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "ctdg/fingerprint.hpp"
#include "json.hpp"

namespace ctdg {

namespace {

const char* aggregator_name(Aggregator a) {
  return a == Aggregator::kGcn ? "gcn" : "attention";
}
const char* memory_name(MemoryKind m) {
  return m == MemoryKind::kIdentity ? "identity" : "gated";
}
const char* projection_name(Projection p) {
  return p == Projection::kNone ? "none" : "linear";
}
const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

std::string hex64(double v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

double unhex64(const std::string& s) {
  if (s.size() != 16) throw std::runtime_error("params: bad hex float '" + s + "'");
  std::uint64_t bits = 0;
  for (char c : s) {
    bits <<= 4;
    if (c >= '0' && c <= '9') bits |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') bits |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw std::runtime_error("params: bad hex float '" + s + "'");
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string model_config_json(const ModelConfig& config) {
  nlohmann::json j;
  j["layers"] = config.layers;
  j["hidden_dim"] = config.hidden_dim;
  j["aggregator"] = aggregator_name(config.aggregator);
  j["memory"] = memory_name(config.memory);
  j["projection"] = projection_name(config.projection);
  j["activation"] = activation_name(config.activation);
  j["activation_slope"] = config.activation_slope;
  j["norm_bound"] = config.norm_bound;
  j["neighbor_k"] = config.neighbor_k;
  j["use_edge_features"] = config.use_edge_features;
  j["theorem_mode"] = config.theorem_mode;
  return j.dump();
}

std::string model_config_fingerprint(const ModelConfig& config) {
  return to_hex(fnv1a64(model_config_json(config)));
}

void save_params(const ModelParams& params, const ModelConfig& config,
                 const std::filesystem::path& path) {
  nlohmann::json j;
  j["fingerprint"] = model_config_fingerprint(config);
  j["config"] = nlohmann::json::parse(model_config_json(config));
  nlohmann::json blocks = nlohmann::json::object();
  ModelParams copy = params;
  for_each_param_block(copy, [&](const std::string& name,
                                 std::vector<double>& values) {
    nlohmann::json data = nlohmann::json::array();
    for (double v : values) data.push_back(hex64(v));
    blocks[name] = {{"size", values.size()}, {"data", std::move(data)}};
  });
  j["blocks"] = std::move(blocks);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ModelParams load_params(const std::filesystem::path& path,
                        const ModelConfig& expected_config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  const std::string fp = j.at("fingerprint").get<std::string>();
  if (fp != model_config_fingerprint(expected_config))
    throw std::runtime_error("params fingerprint mismatch in " + path.string());

  // Shapes come from the config; data from the container.
  std::size_t feature_dim = 0;
  {
    const auto& blocks = j.at("blocks");
    const std::size_t edge_len =
        blocks.at("edge_weight").at("size").get<std::size_t>();
    feature_dim = edge_len - 1;
  }
  ModelParams params = init_params(expected_config, feature_dim, 0);
  for_each_param_block(params, [&](const std::string& name,
                                   std::vector<double>& values) {
    const auto& block = j.at("blocks").at(name);
    if (block.at("size").get<std::size_t>() != values.size())
      throw std::runtime_error("params block '" + name + "' has wrong size");
    const auto& data = block.at("data");
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = unhex64(data.at(i).get<std::string>());
  });
  return params;
}

}  // namespace ctdg
