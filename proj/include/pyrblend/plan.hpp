#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pyrblend/blend.hpp"
#include "pyrblend/dataset.hpp"

namespace pyrblend {

/// Which records may be blended together. Class and distinct-patient
/// constraints are always enforced and have no switch.
struct PairingPolicy {
  bool same_magnification = true;
  bool same_subtype = false;
  std::optional<std::set<std::string>> restrict_to_patients;

  bool admits(const SampleRecord& r) const {
    return !restrict_to_patients || restrict_to_patients->contains(r.patient_id);
  }
  bool compatible(const SampleRecord& a, const SampleRecord& b) const {
    return a.class_label == b.class_label && a.patient_id != b.patient_id &&
           (!same_magnification || a.magnification == b.magnification) &&
           (!same_subtype || a.subtype == b.subtype) && admits(a) && admits(b);
  }
};

enum class AugMethod { glpb, mix, direct, jitter };
enum class Phase { balance, multiply };

std::string_view to_string(AugMethod m);
std::string_view to_string(Phase p);
std::optional<AugMethod> parse_aug_method(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);
bool is_blend(AugMethod m);

/// Per-method parameters copied into every planned entry.
struct PlanConfig {
  AugMethod method = AugMethod::glpb;
  MaskKind mask_kind = MaskKind::half_vertical;
  std::optional<int> n_levels;  ///< unset: default depth of the source images
  long transition_width = 0;    ///< mix only
  bool randomize_sides = false; ///< let the entry seed decide which source goes left
  double jitter_strength = 0.5; ///< jitter only
};

struct PlanEntry {
  Phase phase = Phase::balance;
  AugMethod method = AugMethod::glpb;
  /// Blend sources, or the jitter source when it is an original image.
  std::optional<SampleRecord> source_a;
  std::optional<SampleRecord> source_b;
  /// Jitter of a balancing output: that entry is rendered first.
  std::shared_ptr<const PlanEntry> synthetic_base;

  TumorClass class_label = TumorClass::benign;
  int magnification = 40;
  MaskKind mask_kind = MaskKind::half_vertical;
  std::optional<int> n_levels;
  long transition_width = 0;
  bool swap_sides = false;
  double jitter_strength = 0.0;
  std::uint64_t seed = 0;
  std::string output_name;
};

struct AugmentationPlan {
  std::vector<PlanEntry> entries;
  Phase phase = Phase::balance;

  std::size_t size() const { return entries.size(); }
  std::size_t count(TumorClass c, int magnification) const;
};

/// Stable 64-bit hash of a global seed and a list of identifying fields.
/// Independent of platform, standard library and call order.
std::uint64_t derive_seed(std::uint64_t global_seed, std::span<const std::string_view> parts);

/// Uniform draw over the ordered policy-valid pairs of `pool`. The result is
/// a pure function of the pool order and `entry_seed`. Throws
/// InsufficientPatients when no valid pair exists.
std::pair<SampleRecord, SampleRecord> select_pair(std::span<const SampleRecord> pool, const PairingPolicy& policy,
                                                  std::uint64_t entry_seed);

/// Precomputed form of select_pair for many draws from one pool. Holds
/// pointers into `pool`, which must outlive the sampler.
class PairSampler {
 public:
  PairSampler(std::span<const SampleRecord> pool, const PairingPolicy& policy);
  std::pair<SampleRecord, SampleRecord> draw(std::uint64_t entry_seed) const;

 private:
  std::size_t pool_size_;
  std::vector<const SampleRecord*> admitted_;
  std::vector<std::size_t> group_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

/// Per magnification, plans (majority - minority) synthetic minority-class
/// blends. Throws InsufficientPatients.
AugmentationPlan plan_balancing(const DatasetIndex& index, const PairingPolicy& policy, const PlanConfig& config,
                                std::uint64_t seed);

/// Plans (factor - 1) * S extra entries over the base set of S images
/// (originals plus balancing outputs). Jitter makes factor - 1 copies of every
/// base image; blend methods draw original pairs per (class, magnification).
AugmentationPlan plan_multiplication(const DatasetIndex& index, const AugmentationPlan& balanced, int factor,
                                     const PlanConfig& config, const PairingPolicy& policy, std::uint64_t seed);

}  // namespace pyrblend
