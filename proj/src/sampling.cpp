#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "pyrblend/plan.hpp"

namespace pyrblend {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, n) by rejection; std::uniform_int_distribution is not
// specified bit-exactly across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

using GroupKey = std::tuple<TumorClass, int, int>;

GroupKey group_key(const SampleRecord& r, const PairingPolicy& policy) {
  return {r.class_label, policy.same_magnification ? r.magnification : -1,
          policy.same_subtype ? static_cast<int>(r.subtype) : -1};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::span<const std::string_view> parts) {
  constexpr std::uint64_t kOffset = 0xCBF29CE484222325ull;
  constexpr std::uint64_t kPrime = 0x100000001B3ull;
  std::uint64_t h = kOffset;
  auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= kPrime;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(global_seed >> (8 * i)));
  for (auto part : parts) {
    mix_byte(0x1F);
    for (char ch : part) mix_byte(static_cast<unsigned char>(ch));
  }
  return splitmix64(h);
}

PairSampler::PairSampler(std::span<const SampleRecord> pool, const PairingPolicy& policy) : pool_size_(pool.size()) {
  for (const auto& r : pool)
    if (policy.admits(r)) admitted_.push_back(&r);

  std::map<GroupKey, std::size_t> group_ids;
  std::vector<std::map<std::string_view, std::uint64_t>> per_patient;
  group_of_.reserve(admitted_.size());
  for (std::size_t i = 0; i < admitted_.size(); ++i) {
    const auto [it, inserted] = group_ids.try_emplace(group_key(*admitted_[i], policy), members_.size());
    if (inserted) {
      members_.emplace_back();
      per_patient.emplace_back();
    }
    group_of_.push_back(it->second);
    members_[it->second].push_back(i);
    ++per_patient[it->second][admitted_[i]->patient_id];
  }
  cumulative_.reserve(admitted_.size());
  for (std::size_t i = 0; i < admitted_.size(); ++i) {
    const auto g = group_of_[i];
    total_ += members_[g].size() - per_patient[g].at(admitted_[i]->patient_id);
    cumulative_.push_back(total_);
  }
}

std::pair<SampleRecord, SampleRecord> PairSampler::draw(std::uint64_t entry_seed) const {
  if (total_ == 0)
    throw InsufficientPatients("no pair of records from distinct patients satisfies the pairing policy (pool of " +
                               std::to_string(pool_size_) + " records)");
  std::mt19937_64 rng(entry_seed);
  std::uint64_t r = bounded(rng, total_);
  const auto a = static_cast<std::size_t>(std::ranges::upper_bound(cumulative_, r) - cumulative_.begin());
  if (a > 0) r -= cumulative_[a - 1];
  const SampleRecord& first = *admitted_[a];
  for (const auto j : members_[group_of_[a]]) {
    if (admitted_[j]->patient_id == first.patient_id) continue;
    if (r == 0) return {first, *admitted_[j]};
    --r;
  }
  throw InsufficientPatients("pair enumeration out of range");
}

std::pair<SampleRecord, SampleRecord> select_pair(std::span<const SampleRecord> pool, const PairingPolicy& policy,
                                                  std::uint64_t entry_seed) {
  return PairSampler(pool, policy).draw(entry_seed);
}

}  // namespace pyrblend
