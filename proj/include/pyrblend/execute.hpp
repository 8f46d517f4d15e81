#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pyrblend/image.hpp"
#include "pyrblend/manifest.hpp"
#include "pyrblend/plan.hpp"

namespace pyrblend {

struct ExecuteOptions {
  unsigned workers = 1;
  bool resize_half = false;  ///< one reduce step on every decoded source
};

struct RenderResult {
  Image<float> image;           ///< unclamped; clamped and quantized on encode
  std::optional<int> n_levels;  ///< depth used by glpb
};

/// Decodes the sources of one entry and produces its output in memory.
/// Throws on decode failures, dimension mismatches and level errors.
RenderResult render_entry(const PlanEntry& entry, bool resize_half);

/// Renders and encodes every entry into `out_dir` using up to
/// `options.workers` threads. Entry failures are recorded, not thrown.
/// The returned records are sorted by output name and do not depend on the
/// worker count.
std::vector<ManifestRecord> execute_entries(std::span<const PlanEntry> entries, const std::filesystem::path& out_dir,
                                            const ExecuteOptions& options);

inline std::vector<ManifestRecord> execute_plan(const AugmentationPlan& plan, const std::filesystem::path& out_dir,
                                                const ExecuteOptions& options) {
  return execute_entries(plan.entries, out_dir, options);
}

/// Rebuilds the plan entries behind the successful records of a manifest.
std::vector<PlanEntry> entries_from_manifest(const std::vector<ManifestRecord>& records);

}  // namespace pyrblend
