#include "mgsr/weights.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <numeric>

#include "binary_io.hpp"
#include "mgsr/error.hpp"

namespace mgsr {

namespace {
constexpr std::uint32_t kSrwtVersion = 1;
}

std::size_t Tensor::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

WeightsContainer::WeightsContainer(nlohmann::json architecture, std::vector<Tensor> tensors)
    : architecture_(std::move(architecture)), descriptor_text_(architecture_.dump()), tensors_(std::move(tensors)) {
  for (const auto& t : tensors_) {
    if (t.element_count() != t.data.size()) throw WeightsError("tensor '" + t.name + "': data size does not match shape");
  }
}

std::string WeightsContainer::kind() const { return architecture_.value("kind", std::string{}); }

const Tensor* WeightsContainer::find(const std::string& name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

const Tensor& WeightsContainer::require(const std::string& name, const std::vector<std::uint32_t>& shape) const {
  const Tensor* t = find(name);
  if (!t) throw WeightsError("missing tensor '" + name + "'");
  if (t->shape != shape) throw WeightsError("tensor '" + name + "' has unexpected shape");
  return *t;
}

void WeightsContainer::round_to_f32() {
  for (auto& t : tensors_)
    for (double& v : t.data) v = static_cast<double>(static_cast<float>(v));
}

void write_srwt(const WeightsContainer& w, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("SRWT", 4);
  detail::put_u32(os, kSrwtVersion);
  const std::string& desc = w.descriptor_text();
  detail::put_u32(os, static_cast<std::uint32_t>(desc.size()));
  os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  detail::put_u32(os, static_cast<std::uint32_t>(w.tensors().size()));
  for (const auto& t : w.tensors()) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) throw IoError("tensor name too long");
    detail::put_u16(os, static_cast<std::uint16_t>(t.name.size()));
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    detail::put_u8(os, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) detail::put_u32(os, d);
    for (double v : t.data) detail::put_f32(os, static_cast<float>(v));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

WeightsContainer read_srwt(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::expect_magic(is, "SRWT", path.string());
  if (const auto v = detail::get_u32(is); v != kSrwtVersion) {
    throw IoError(path.string() + ": unsupported SRWT version " + std::to_string(v));
  }
  const auto desc_len = detail::get_u32(is);
  std::string desc(desc_len, '\0');
  if (!is.read(desc.data(), desc_len)) throw IoError(path.string() + ": truncated descriptor");

  WeightsContainer w;
  try {
    w.architecture_ = nlohmann::json::parse(desc);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": descriptor is not valid JSON: " + e.what());
  }
  w.descriptor_text_ = std::move(desc);

  const auto count = detail::get_u32(is);
  for (std::uint32_t k = 0; k < count; ++k) {
    Tensor t;
    const auto name_len = detail::get_u16(is);
    t.name.resize(name_len);
    if (!is.read(t.name.data(), name_len)) throw IoError(path.string() + ": truncated tensor name");
    const auto ndim = detail::get_u8(is);
    t.shape.resize(ndim);
    for (auto& d : t.shape) d = detail::get_u32(is);
    const std::size_t elems = t.element_count();
    if (elems > (std::size_t{1} << 28)) throw IoError(path.string() + ": implausible tensor size");
    t.data.resize(elems);
    for (double& v : t.data) v = detail::get_f32(is);
    w.tensors_.push_back(std::move(t));
  }
  return w;
}

}  // namespace mgsr
