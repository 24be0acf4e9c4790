#include "mgsr/generator.hpp"

#include <cmath>
#include <map>
#include <random>

#include "mgsr/error.hpp"

namespace mgsr {

namespace {

struct FeatureMap {
  int channels = 0;
  int side = 0;
  std::vector<float> v;

  FeatureMap(int c, int s) : channels(c), side(s), v(static_cast<std::size_t>(c) * s * s, 0.0f) {}
  float* plane(int c) { return v.data() + static_cast<std::size_t>(c) * side * side; }
  const float* plane(int c) const { return v.data() + static_cast<std::size_t>(c) * side * side; }
};

nlohmann::json conv_layer(const std::string& name, int in, int out, const std::string& act) {
  nlohmann::json l = {{"type", "conv"}, {"name", name}, {"in", in}, {"out", out}, {"kernel", 3}, {"activation", act}};
  if (act == "leaky_relu") l["slope"] = 0.2;
  return l;
}

}  // namespace

nlohmann::json pinned_generator_architecture() {
  nlohmann::json layers = nlohmann::json::array();
  layers.push_back(conv_layer("conv_in", 1, 32, "leaky_relu"));
  for (int b = 0; b < 4; ++b) {
    layers.push_back({{"type", "res_block"},
                      {"name", "res" + std::to_string(b)},
                      {"channels", 32},
                      {"kernel", 3},
                      {"activation", "leaky_relu"},
                      {"slope", 0.2}});
  }
  layers.push_back({{"type", "global_skip"}, {"from", "conv_in"}});
  for (int u = 0; u < 2; ++u) {
    layers.push_back({{"type", "upsample"},
                      {"name", "up" + std::to_string(u)},
                      {"in", 32},
                      {"out", 128},
                      {"kernel", 3},
                      {"scale", 2},
                      {"activation", "leaky_relu"},
                      {"slope", 0.2}});
  }
  layers.push_back(conv_layer("conv_out", 32, 1, "tanh"));
  return {{"kind", "generator"}, {"n_s", 6}, {"base_factor", 4}, {"padding", "circular"}, {"layers", layers}};
}

WeightsContainer random_generator_weights(std::uint64_t seed, double stddev) {
  const auto arch = pinned_generator_architecture();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Tensor> tensors;
  auto add_conv = [&](const std::string& name, std::uint32_t in, std::uint32_t out) {
    Tensor w{name + ".weight", {out, in, 3, 3}, {}};
    w.data.resize(w.element_count());
    for (double& v : w.data) v = stddev * normal(rng);
    tensors.push_back(std::move(w));
    tensors.push_back(Tensor{name + ".bias", {out}, std::vector<double>(out, 0.0)});
  };
  for (const auto& layer : arch["layers"]) {
    const std::string type = layer["type"];
    if (type == "conv" || type == "upsample") {
      add_conv(layer["name"], layer["in"], layer["out"]);
    } else if (type == "res_block") {
      const std::string name = layer["name"];
      add_conv(name + ".conv1", layer["channels"], layer["channels"]);
      add_conv(name + ".conv2", layer["channels"], layer["channels"]);
    }
  }
  WeightsContainer w(arch, std::move(tensors));
  w.round_to_f32();
  return w;
}

Generator::Generator(const WeightsContainer& weights) {
  const auto& arch = weights.architecture();
  if (weights.kind() != "generator") throw WeightsError("weights are not a generator (kind='" + weights.kind() + "')");
  if (arch.value("padding", std::string{"circular"}) != "circular") throw WeightsError("only circular padding is supported");
  n_s_ = arch.value("n_s", 6);
  base_factor_ = arch.value("base_factor", 4);
  if (!arch.contains("layers") || !arch["layers"].is_array()) throw WeightsError("descriptor has no layer list");

  auto parse_act = [](const nlohmann::json& l) {
    const std::string a = l.value("activation", std::string{"none"});
    if (a == "leaky_relu") return Act::Leaky;
    if (a == "tanh") return Act::Tanh;
    if (a == "none") return Act::None;
    throw WeightsError("unknown activation '" + a + "'");
  };
  auto load_conv = [&](const std::string& name, int in, int out, int k) {
    Conv c;
    c.in = in;
    c.out = out;
    c.kernel = k;
    const auto ui = [](int x) { return static_cast<std::uint32_t>(x); };
    const Tensor& w = weights.require(name + ".weight", {ui(out), ui(in), ui(k), ui(k)});
    const Tensor& b = weights.require(name + ".bias", {ui(out)});
    c.weight.assign(w.data.begin(), w.data.end());
    c.bias.assign(b.data.begin(), b.data.end());
    return c;
  };

  int channels = 1;
  int side = n_s_;
  std::map<std::string, std::pair<int, std::pair<int, int>>> saved;  // name -> (layer index, (channels, side))
  try {
    for (const auto& l : arch["layers"]) {
      Layer layer;
      layer.type = l.at("type").get<std::string>();
      layer.act = parse_act(l);
      layer.slope = static_cast<float>(l.value("slope", 0.2));
      if (layer.type == "conv") {
        layer.name = l.at("name");
        const int in = l.at("in"), out = l.at("out");
        if (in != channels) throw WeightsError("layer '" + layer.name + "' expects " + std::to_string(in) + " channels");
        layer.conv = load_conv(layer.name, in, out, l.value("kernel", 3));
        channels = out;
      } else if (layer.type == "res_block") {
        layer.name = l.at("name");
        const int c = l.at("channels");
        if (c != channels) throw WeightsError("res block '" + layer.name + "' channel mismatch");
        layer.conv = load_conv(layer.name + ".conv1", c, c, l.value("kernel", 3));
        layer.conv2 = load_conv(layer.name + ".conv2", c, c, l.value("kernel", 3));
      } else if (layer.type == "global_skip") {
        const std::string from = l.at("from");
        auto it = saved.find(from);
        if (it == saved.end()) throw WeightsError("global_skip source '" + from + "' not found");
        if (it->second.second != std::make_pair(channels, side)) throw WeightsError("global_skip shape mismatch");
        layer.skip_from = it->second.first;
      } else if (layer.type == "upsample") {
        layer.name = l.at("name");
        layer.scale = l.value("scale", 2);
        const int in = l.at("in"), out = l.at("out");
        if (in != channels || out % (layer.scale * layer.scale) != 0) {
          throw WeightsError("upsample '" + layer.name + "' channel mismatch");
        }
        layer.conv = load_conv(layer.name, in, out, l.value("kernel", 3));
        channels = out / (layer.scale * layer.scale);
        side *= layer.scale;
      } else {
        throw WeightsError("unknown layer type '" + layer.type + "'");
      }
      if (!layer.name.empty()) saved[layer.name] = {static_cast<int>(layers_.size()), {channels, side}};
      layers_.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw WeightsError(std::string("malformed layer descriptor: ") + e.what());
  }
  if (channels != 1 || side != n_s_ * base_factor_) {
    throw WeightsError("generator does not map a single-channel window to the declared output size");
  }
}

namespace {

FeatureMap convolve(const FeatureMap& x, int in, int out, int kernel, const std::vector<float>& weight,
                    const std::vector<float>& bias) {
  const int s = x.side;
  const int pad = kernel / 2;
  FeatureMap y(out, s);
  std::vector<int> wrap(static_cast<std::size_t>(s) + 2 * pad);
  for (int k = 0; k < s + 2 * pad; ++k) wrap[k] = ((k - pad) % s + s) % s;

  for (int o = 0; o < out; ++o) {
    float* dst = y.plane(o);
    std::fill(dst, dst + s * s, bias[o]);
    for (int c = 0; c < in; ++c) {
      const float* src = x.plane(c);
      for (int ky = 0; ky < kernel; ++ky) {
        for (int kx = 0; kx < kernel; ++kx) {
          const float w = weight[((static_cast<std::size_t>(o) * in + c) * kernel + ky) * kernel + kx];
          if (w == 0.0f) continue;
          for (int r = 0; r < s; ++r) {
            const float* row = src + static_cast<std::size_t>(wrap[r + ky]) * s;
            float* drow = dst + static_cast<std::size_t>(r) * s;
            for (int q = 0; q < s; ++q) drow[q] += w * row[wrap[q + kx]];
          }
        }
      }
    }
  }
  return y;
}

void activate(FeatureMap& x, int act, float slope) {
  if (act == 1) {
    for (float& v : x.v) v = v > 0.0f ? v : slope * v;
  } else if (act == 2) {
    for (float& v : x.v) v = std::tanh(v);
  }
}

FeatureMap pixel_shuffle(const FeatureMap& x, int r) {
  const int c_out = x.channels / (r * r);
  const int s = x.side;
  FeatureMap y(c_out, s * r);
  for (int c = 0; c < c_out; ++c) {
    float* dst = y.plane(c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        const float* src = x.plane(c * r * r + i * r + j);
        for (int a = 0; a < s; ++a)
          for (int b = 0; b < s; ++b) dst[static_cast<std::size_t>(a * r + i) * y.side + (b * r + j)] = src[a * s + b];
      }
    }
  }
  return y;
}

}  // namespace

std::vector<double> Generator::infer(std::span<const double> window) const {
  if (window.size() != static_cast<std::size_t>(n_s_) * n_s_) throw ShapeError("generator input has wrong size");
  FeatureMap x(1, n_s_);
  for (std::size_t k = 0; k < window.size(); ++k) x.v[k] = static_cast<float>(window[k]);

  std::vector<FeatureMap> saved;
  saved.reserve(layers_.size());
  for (const auto& layer : layers_) {
    const int act = static_cast<int>(layer.act);
    if (layer.type == "conv") {
      x = convolve(x, layer.conv.in, layer.conv.out, layer.conv.kernel, layer.conv.weight, layer.conv.bias);
      activate(x, act, layer.slope);
    } else if (layer.type == "res_block") {
      FeatureMap t = convolve(x, layer.conv.in, layer.conv.out, layer.conv.kernel, layer.conv.weight, layer.conv.bias);
      activate(t, act, layer.slope);
      t = convolve(t, layer.conv2.in, layer.conv2.out, layer.conv2.kernel, layer.conv2.weight, layer.conv2.bias);
      for (std::size_t k = 0; k < x.v.size(); ++k) x.v[k] += t.v[k];
    } else if (layer.type == "global_skip") {
      const auto& src = saved[static_cast<std::size_t>(layer.skip_from)];
      for (std::size_t k = 0; k < x.v.size(); ++k) x.v[k] += src.v[k];
    } else if (layer.type == "upsample") {
      x = convolve(x, layer.conv.in, layer.conv.out, layer.conv.kernel, layer.conv.weight, layer.conv.bias);
      x = pixel_shuffle(x, layer.scale);
      activate(x, act, layer.slope);
    }
    saved.push_back(x);
  }
  return std::vector<double>(x.v.begin(), x.v.end());
}

std::vector<double> generator_infer(std::span<const double> window, const WeightsContainer& weights) {
  return Generator(weights).infer(window);
}

}  // namespace mgsr
