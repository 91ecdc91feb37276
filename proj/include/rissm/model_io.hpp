#pragma once

// Model file layout (little-endian):
//   8 bytes  magic "RISSMNN\n"
//   u32      format version
//   u32 x 5  scheme, M, Nr, N, feature mode
//   u32      number of layer sizes, then one u64 per size
//   per layer: weights row-major as f64, then biases as f64

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "rissm/bdnn.hpp"

namespace rissm {

inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const BdnnModel& model, const std::filesystem::path& path);
BdnnModel load_model(const std::filesystem::path& path);

void write_model(const BdnnModel& model, std::ostream& out);
BdnnModel read_model(std::istream& in);

}  // namespace rissm
