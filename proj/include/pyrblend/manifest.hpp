#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pyrblend/plan.hpp"

namespace pyrblend {

/// One line of the manifest: enough to regenerate the output byte for byte
/// with the same toolkit version.
struct ManifestRecord {
  std::string output;  ///< file name inside the output directory
  bool ok = true;
  std::string error;   ///< set when !ok

  Phase phase = Phase::balance;
  AugMethod method = AugMethod::glpb;
  std::string source_a;     ///< empty for jitter of a synthetic image
  std::string source_b;     ///< blends only
  std::string base_output;  ///< jitter of a synthetic image: its output name
  TumorClass class_label = TumorClass::benign;
  int magnification = 40;
  MaskKind mask_kind = MaskKind::half_vertical;
  std::optional<int> n_levels;  ///< depth actually used (glpb)
  long transition_width = 0;
  bool swap_sides = false;
  double jitter_strength = 0.0;
  bool resize_half = false;
  std::uint64_t seed = 0;
  std::string version;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

/// Single-line JSON with keys in a fixed order.
std::string to_json_line(const ManifestRecord& r);
/// Throws std::invalid_argument on malformed input.
ManifestRecord parse_json_line(const std::string& line);

/// Writes records (sorted by output name) as UTF-8 JSON lines.
void write_manifest(const std::filesystem::path& path, std::vector<ManifestRecord> records);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

}  // namespace pyrblend
