#pragma once

// Named-tensor archive ("SRWT") for the learned prolongation operators.
//
// Layout, little-endian:
//   "SRWT" | u32 version (1) | u32 descriptor length | UTF-8 JSON descriptor
//   | u32 tensor count | per tensor: u16 name length, name bytes, u8 ndim,
//   u32 dims[ndim], f32 data (row-major)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgsr {

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  /// Held in double precision; serialised as f32.
  std::vector<double> data;

  std::size_t element_count() const;
};

class WeightsContainer {
 public:
  WeightsContainer() = default;
  WeightsContainer(nlohmann::json architecture, std::vector<Tensor> tensors);

  const nlohmann::json& architecture() const { return architecture_; }
  /// Descriptor text as stored on disk; re-used verbatim on write.
  const std::string& descriptor_text() const { return descriptor_text_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  std::string kind() const;
  const Tensor* find(const std::string& name) const;
  /// Throws WeightsError if missing or if the shape differs.
  const Tensor& require(const std::string& name, const std::vector<std::uint32_t>& shape) const;

  /// Narrows every tensor to f32 precision in place, matching what a
  /// write/read cycle would produce.
  void round_to_f32();

  friend WeightsContainer read_srwt(const std::filesystem::path& path);

 private:
  nlohmann::json architecture_;
  std::string descriptor_text_;
  std::vector<Tensor> tensors_;
};

void write_srwt(const WeightsContainer& w, const std::filesystem::path& path);
WeightsContainer read_srwt(const std::filesystem::path& path);

}  // namespace mgsr
