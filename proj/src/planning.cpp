#include <algorithm>
#include <cctype>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "pyrblend/plan.hpp"

namespace pyrblend {

namespace {

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string output_name(AugMethod method, TumorClass c, int magnification, std::uint64_t seed, std::size_t k) {
  std::string tag(to_string(method));
  std::ranges::transform(tag, tag.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  return tag + "_" + std::string(to_string(c)) + "_" + std::to_string(magnification) + "_" + hex16(seed) + "_" +
         std::to_string(k) + ".png";
}

std::uint64_t seed_for(std::uint64_t global, std::initializer_list<std::string_view> parts) {
  return derive_seed(global, std::span<const std::string_view>(parts.begin(), parts.size()));
}

PlanEntry entry_template(const PlanConfig& config, Phase phase, TumorClass c, int magnification, std::uint64_t seed) {
  PlanEntry e;
  e.phase = phase;
  e.method = config.method;
  e.class_label = c;
  e.magnification = magnification;
  e.mask_kind = config.mask_kind;
  e.n_levels = config.n_levels;
  e.transition_width = config.transition_width;
  e.jitter_strength = config.method == AugMethod::jitter ? config.jitter_strength : 0.0;
  e.swap_sides = config.randomize_sides && is_blend(config.method) && ((seed >> 63) & 1u);
  e.seed = seed;
  return e;
}

bool has_valid_pair(std::span<const SampleRecord> pool, const PairingPolicy& policy) {
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      if (policy.compatible(pool[i], pool[j])) return true;
  return false;
}

// Blend pools are checked once up front so the error names the group.
void require_pairs(std::span<const SampleRecord> pool, const PairingPolicy& policy, TumorClass c, int magnification) {
  std::set<std::string> patients;
  for (const auto& r : pool)
    if (policy.admits(r)) patients.insert(r.patient_id);
  if (patients.size() < 2 || !has_valid_pair(pool, policy))
    throw InsufficientPatients("cannot pair " + std::string(to_string(c)) + " images at " +
                               std::to_string(magnification) + "x: " + std::to_string(patients.size()) +
                               " eligible patient(s) under the pairing policy");
}

// Fills sources for one entry drawn from `pool`.
void draw_sources(PlanEntry& e, std::span<const SampleRecord> pool, const PairSampler& sampler) {
  if (is_blend(e.method)) {
    auto [a, b] = sampler.draw(e.seed);
    e.source_a = std::move(a);
    e.source_b = std::move(b);
  } else {
    std::mt19937_64 rng(e.seed);
    e.source_a = pool[rng() % pool.size()];
  }
}

std::vector<SampleRecord> group_pool(const DatasetIndex& index, const PairingPolicy& policy, TumorClass c,
                                     int magnification) {
  return index.select([&](const SampleRecord& r) {
    return r.class_label == c && (!policy.same_magnification || r.magnification == magnification) && policy.admits(r);
  });
}

}  // namespace

std::string_view to_string(AugMethod m) {
  switch (m) {
    case AugMethod::glpb: return "glpb";
    case AugMethod::mix: return "mix";
    case AugMethod::direct: return "direct";
    case AugMethod::jitter: return "jitter";
  }
  return "?";
}

std::string_view to_string(Phase p) { return p == Phase::balance ? "balance" : "multiply"; }

std::optional<AugMethod> parse_aug_method(std::string_view s) {
  for (auto m : {AugMethod::glpb, AugMethod::mix, AugMethod::direct, AugMethod::jitter})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view s) {
  for (auto p : {Phase::balance, Phase::multiply})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

bool is_blend(AugMethod m) { return m != AugMethod::jitter; }

std::size_t AugmentationPlan::count(TumorClass c, int magnification) const {
  return static_cast<std::size_t>(std::ranges::count_if(
      entries, [&](const PlanEntry& e) { return e.class_label == c && e.magnification == magnification; }));
}

AugmentationPlan plan_balancing(const DatasetIndex& index, const PairingPolicy& policy, const PlanConfig& config,
                                std::uint64_t seed) {
  AugmentationPlan plan;
  plan.phase = Phase::balance;
  const std::string method(to_string(config.method));
  for (int mag : kMagnifications) {
    const std::size_t nb = index.count(TumorClass::benign, mag);
    const std::size_t nm = index.count(TumorClass::malignant, mag);
    if (nb == nm) continue;
    const TumorClass minority = nb < nm ? TumorClass::benign : TumorClass::malignant;
    const std::size_t deficit = nb < nm ? nm - nb : nb - nm;

    const auto pool = group_pool(index, policy, minority, mag);
    const PairSampler sampler(pool, policy);
    if (is_blend(config.method))
      require_pairs(pool, policy, minority, mag);
    else if (pool.empty())
      throw InsufficientPatients("no " + std::string(to_string(minority)) + " images at " + std::to_string(mag) + "x");

    const std::string cls(to_string(minority)), mag_s = std::to_string(mag);
    for (std::size_t k = 0; k < deficit; ++k) {
      const std::string k_s = std::to_string(k);
      const auto entry_seed = seed_for(seed, {"balance", method, cls, mag_s, k_s});
      PlanEntry e = entry_template(config, Phase::balance, minority, mag, entry_seed);
      draw_sources(e, pool, sampler);
      e.output_name = output_name(config.method, minority, mag, entry_seed, k);
      plan.entries.push_back(std::move(e));
    }
  }
  return plan;
}

AugmentationPlan plan_multiplication(const DatasetIndex& index, const AugmentationPlan& balanced, int factor,
                                     const PlanConfig& config, const PairingPolicy& policy, std::uint64_t seed) {
  if (factor < 1) throw std::invalid_argument("augmentation factor must be at least 1");
  AugmentationPlan plan;
  plan.phase = Phase::multiply;
  if (factor == 1) return plan;
  const std::string method(to_string(config.method));

  if (config.method == AugMethod::jitter) {
    auto add_copies = [&](const std::string& base_id, TumorClass c, int mag, auto&& attach) {
      for (int j = 1; j < factor; ++j) {
        const std::string j_s = std::to_string(j);
        const auto entry_seed = seed_for(seed, {"multiply", method, base_id, j_s});
        PlanEntry e = entry_template(config, Phase::multiply, c, mag, entry_seed);
        attach(e);
        e.output_name = output_name(config.method, c, mag, entry_seed, static_cast<std::size_t>(j));
        plan.entries.push_back(std::move(e));
      }
    };
    for (const auto& r : index.records())
      add_copies(r.file_name(), r.class_label, r.magnification, [&](PlanEntry& e) { e.source_a = r; });
    for (const auto& b : balanced.entries) {
      auto base = std::make_shared<const PlanEntry>(b);
      add_copies(b.output_name, b.class_label, b.magnification, [&](PlanEntry& e) { e.synthetic_base = base; });
    }
    return plan;
  }

  for (TumorClass c : {TumorClass::benign, TumorClass::malignant}) {
    for (int mag : kMagnifications) {
      const std::size_t group_size = index.count(c, mag) + balanced.count(c, mag);
      if (group_size == 0) continue;
      const auto pool = group_pool(index, policy, c, mag);
      const PairSampler sampler(pool, policy);
      require_pairs(pool, policy, c, mag);
      const std::size_t n = static_cast<std::size_t>(factor - 1) * group_size;
      const std::string cls(to_string(c)), mag_s = std::to_string(mag);
      for (std::size_t k = 0; k < n; ++k) {
        const std::string k_s = std::to_string(k);
        const auto entry_seed = seed_for(seed, {"multiply", method, cls, mag_s, k_s});
        PlanEntry e = entry_template(config, Phase::multiply, c, mag, entry_seed);
        draw_sources(e, pool, sampler);
        e.output_name = output_name(config.method, c, mag, entry_seed, k);
        plan.entries.push_back(std::move(e));
      }
    }
  }
  return plan;
}

}  // namespace pyrblend
