#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "pyrblend/blend.hpp"
#include "pyrblend/plan.hpp"

namespace pyrblend::cli {

/// Process exit codes. Each error path maps to exactly one code.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,             ///< bad flags, invalid fold file, invalid blend spec, inconsistent corpus
  kInputError = 2,        ///< undecodable image or unreadable dataset root
  kTooManyLevels = 3,
  kDimMismatch = 4,
  kInsufficientPatients = 5,
  kUnassignedPatient = 6,
  kOutputError = 7,       ///< cannot write outputs
  kAllEntriesFailed = 8,  ///< augment planned work but produced nothing
};

struct PyramidArgs {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  std::optional<int> levels;
  bool resize_half = false;
};

struct BlendArgs {
  std::filesystem::path a;
  std::filesystem::path b;
  std::filesystem::path out;
  BlendSpec spec;
  std::optional<std::filesystem::path> mask_file;  ///< required for MaskKind::custom
  bool resize_half = false;
};

struct AugmentArgs {
  std::filesystem::path root;
  std::optional<std::filesystem::path> fold_file;  ///< absent: every patient trains
  int fold_index = 1;
  bool balance = false;
  int factor = 1;
  AugMethod method = AugMethod::jitter;        ///< multiplication method
  AugMethod balance_method = AugMethod::glpb;  ///< balancing method
  std::optional<int> levels;
  MaskKind mask_kind = MaskKind::half_vertical;
  long transition_width = 0;
  bool randomize_sides = false;
  bool same_subtype = false;
  bool any_magnification = false;
  double jitter_strength = 0.5;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::filesystem::path out_dir;
  bool resize_half = false;
};

int cmd_pyramid(const PyramidArgs& args, std::ostream& out, std::ostream& err);
int cmd_blend(const BlendArgs& args, std::ostream& out, std::ostream& err);
int cmd_scan(const std::filesystem::path& root, std::ostream& out, std::ostream& err);
int cmd_augment(const AugmentArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pyrblend::cli
