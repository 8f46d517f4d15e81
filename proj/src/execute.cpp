#include "pyrblend/execute.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <stdexcept>
#include <thread>

#include "pyrblend/jitter.hpp"
#include "pyrblend/png_io.hpp"
#include "pyrblend/version.hpp"

namespace pyrblend {

namespace {

const Kernel<float>& default_kernel() {
  static const auto k = Kernel<float>::binomial();
  return k;
}

Image<float> load_source(const SampleRecord& r, bool resize_half) {
  auto img = read_png(r.path);
  return resize_half ? reduce(img, default_kernel()) : img;
}

BlendMethod blend_method_of(AugMethod m) {
  switch (m) {
    case AugMethod::direct: return BlendMethod::direct;
    case AugMethod::mix: return BlendMethod::mix;
    default: return BlendMethod::glpb;
  }
}

ManifestRecord describe(const PlanEntry& e, bool resize_half) {
  ManifestRecord r;
  r.output = e.output_name;
  r.phase = e.phase;
  r.method = e.method;
  if (e.source_a) r.source_a = e.source_a->path;
  if (e.source_b) r.source_b = e.source_b->path;
  if (e.synthetic_base) r.base_output = e.synthetic_base->output_name;
  r.class_label = e.class_label;
  r.magnification = e.magnification;
  r.mask_kind = e.mask_kind;
  r.n_levels = e.n_levels;
  r.transition_width = e.transition_width;
  r.swap_sides = e.swap_sides;
  r.jitter_strength = e.jitter_strength;
  r.resize_half = resize_half;
  r.seed = e.seed;
  r.version = kToolkitVersion;
  return r;
}

ManifestRecord run_one(const PlanEntry& e, const std::filesystem::path& out_dir, bool resize_half) {
  ManifestRecord rec = describe(e, resize_half);
  try {
    auto result = render_entry(e, resize_half);
    if (e.method == AugMethod::glpb) rec.n_levels = result.n_levels;
    write_png(out_dir / e.output_name, result.image);
  } catch (const std::exception& ex) {
    std::error_code ec;
    std::filesystem::remove(out_dir / e.output_name, ec);
    rec.ok = false;
    rec.error = ex.what();
  }
  return rec;
}

SampleRecord record_for_path(const std::string& path, const ManifestRecord& m) {
  if (auto r = parse_sample_filename(std::filesystem::path(path).filename().string(), path)) return *r;
  SampleRecord r;
  r.path = path;
  r.class_label = m.class_label;
  r.magnification = m.magnification;
  return r;
}

}  // namespace

RenderResult render_entry(const PlanEntry& e, bool resize_half) {
  if (e.method == AugMethod::jitter) {
    Image<float> base;
    if (e.synthetic_base) {
      // Same pixels a decode of the written synthetic file would give.
      base = quantize8(render_entry(*e.synthetic_base, resize_half).image);
    } else if (e.source_a) {
      base = load_source(*e.source_a, resize_half);
    } else {
      throw std::invalid_argument(e.output_name + ": jitter entry without a source");
    }
    return {color_jitter(base, e.jitter_strength, e.seed), std::nullopt};
  }

  if (!e.source_a || !e.source_b) throw std::invalid_argument(e.output_name + ": blend entry needs two sources");
  auto a = load_source(*e.source_a, resize_half);
  auto b = load_source(*e.source_b, resize_half);
  if (e.swap_sides) std::swap(a, b);

  BlendSpec spec;
  spec.method = blend_method_of(e.method);
  spec.mask_kind = e.mask_kind;
  spec.transition_width = e.transition_width;
  spec.n_levels = e.n_levels;
  if (e.method == AugMethod::glpb && !spec.n_levels) spec.n_levels = default_levels(a.width(), a.height());
  auto out = blend(a, b, spec, default_kernel());
  return {std::move(out), e.method == AugMethod::glpb ? spec.n_levels : std::nullopt};
}

std::vector<ManifestRecord> execute_entries(std::span<const PlanEntry> entries, const std::filesystem::path& out_dir,
                                            const ExecuteOptions& options) {
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestRecord> results(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) results[i] = run_one(entries[i], out_dir, options.resize_half);
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.workers), std::max<std::size_t>(1, entries.size())));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  std::ranges::sort(results, {}, &ManifestRecord::output);
  return results;
}

std::vector<PlanEntry> entries_from_manifest(const std::vector<ManifestRecord>& records) {
  std::map<std::string, const ManifestRecord*> by_name;
  for (const auto& r : records) by_name[r.output] = &r;

  auto rebuild = [&](const ManifestRecord& m, auto&& self) -> PlanEntry {
    PlanEntry e;
    e.phase = m.phase;
    e.method = m.method;
    if (!m.source_a.empty()) e.source_a = record_for_path(m.source_a, m);
    if (!m.source_b.empty()) e.source_b = record_for_path(m.source_b, m);
    if (!m.base_output.empty()) {
      const auto it = by_name.find(m.base_output);
      if (it == by_name.end()) throw std::invalid_argument("manifest lacks base record " + m.base_output);
      e.synthetic_base = std::make_shared<const PlanEntry>(self(*it->second, self));
    }
    e.class_label = m.class_label;
    e.magnification = m.magnification;
    e.mask_kind = m.mask_kind;
    e.n_levels = m.n_levels;
    e.transition_width = m.transition_width;
    e.swap_sides = m.swap_sides;
    e.jitter_strength = m.jitter_strength;
    e.seed = m.seed;
    e.output_name = m.output;
    return e;
  };

  std::vector<PlanEntry> out;
  for (const auto& r : records)
    if (r.ok) out.push_back(rebuild(r, rebuild));
  return out;
}

}  // namespace pyrblend
