#include "pyrblend/commands.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "pyrblend/dataset.hpp"
#include "pyrblend/execute.hpp"
#include "pyrblend/manifest.hpp"
#include "pyrblend/png_io.hpp"
#include "pyrblend/pyramid.hpp"

namespace pyrblend::cli {

namespace {

const Kernel<float>& kernel() {
  static const auto k = Kernel<float>::binomial();
  return k;
}

Image<float> load(const std::filesystem::path& path, bool resize_half) {
  auto img = read_png(path);
  return resize_half ? reduce(img, kernel()) : img;
}

// Signed band value v is shown as 0.5 + v/2.
Image<float> band_to_display(const Image<float>& band) {
  std::vector<Plane<float>> planes;
  for (const auto& p : band.planes()) planes.push_back((0.5f + 0.5f * p).max(0.0f).min(1.0f));
  return Image<float>(std::move(planes));
}

// Maps library exceptions to exit codes; anything unknown is reported as usage.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const UnreadableRoot& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const TooManyLevels& e) {
    err << "error: " << e.what() << '\n';
    return kTooManyLevels;
  } catch (const DimMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kDimMismatch;
  } catch (const InsufficientPatients& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientPatients;
  } catch (const UnassignedPatient& e) {
    err << "error: " << e.what() << '\n';
    return kUnassignedPatient;
  } catch (const EncodeError& e) {
    err << "error: " << e.what() << '\n';
    return kOutputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kOutputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

int cmd_pyramid(const PyramidArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto img = load(args.input, args.resize_half);
    const int n = args.levels.value_or(default_levels(img.width(), img.height()));
    const auto gp = build_gaussian(img, kernel(), n);
    const auto lp = build_laplacian(img, kernel(), n);
    std::filesystem::create_directories(args.out_dir);
    for (int l = 0; l <= n; ++l) write_png(args.out_dir / ("gauss_" + std::to_string(l) + ".png"), gp.levels[l]);
    for (int l = 0; l < n; ++l)
      write_png(args.out_dir / ("laplace_" + std::to_string(l) + ".png"), band_to_display(lp.band_levels[l]));
    write_png(args.out_dir / ("laplace_" + std::to_string(n) + ".png"), lp.top);
    const auto recon = collapse(lp, kernel());
    write_png(args.out_dir / "recon.png", recon);
    out << "levels: " << n << '\n';
    for (int l = 0; l <= n; ++l)
      out << "level " << l << ": " << gp.level_dims[l].width << "x" << gp.level_dims[l].height << '\n';
    out << "reconstruction max abs error: " << max_abs_diff(recon, img) << '\n';
    return kOk;
  });
}

int cmd_blend(const BlendArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto a = load(args.a, args.resize_half);
    const auto b = load(args.b, args.resize_half);
    std::optional<BlendMask<float>> mask;
    if (args.spec.mask_kind == MaskKind::custom) {
      if (!args.mask_file) throw InvalidBlendSpec("--mask custom requires --mask-file");
      auto m = load(*args.mask_file, args.resize_half);
      if (m.channels() == 3) {
        std::vector<Plane<float>> gray{(m.plane(0) + m.plane(1) + m.plane(2)) / 3.0f};
        m = Image<float>(std::move(gray));
      }
      mask.emplace(std::move(m));
    }
    const auto composite = blend(a, b, args.spec, kernel(), mask ? &*mask : nullptr);
    if (args.out.has_parent_path()) std::filesystem::create_directories(args.out.parent_path());
    write_png(args.out, composite);
    const auto shown = clamped(composite);
    const auto axis = orientation_of(args.spec.mask_kind);
    out << std::setprecision(6) << "seam_energy: " << seam_energy(shown, axis) << '\n'
        << "seam_boundary_energy: " << seam_boundary_energy(shown, axis) << '\n';
    return kOk;
  });
}

int cmd_scan(const std::filesystem::path& root, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto index = scan_dataset(root);
    for (const auto& m : index.malformed()) err << "warning: unrecognized file " << m << '\n';

    std::map<std::pair<Subtype, int>, std::size_t> images;
    std::map<Subtype, std::set<std::string>> patients;
    for (const auto& r : index.records()) {
      ++images[{r.subtype, r.magnification}];
      patients[r.subtype].insert(r.patient_id);
    }
    auto row = [&](std::string_view cls, std::string_view label, const std::array<std::size_t, 4>& per_mag,
                   std::size_t n_patients) {
      std::size_t total = 0;
      out << std::left << std::setw(10) << cls << std::setw(8) << label << std::right;
      for (auto v : per_mag) {
        out << std::setw(8) << v;
        total += v;
      }
      out << std::setw(9) << total << std::setw(10) << n_patients << '\n';
    };
    out << std::left << std::setw(10) << "class" << std::setw(8) << "subtype" << std::right;
    for (int m : kMagnifications) out << std::setw(8) << (std::to_string(m) + "x");
    out << std::setw(9) << "images" << std::setw(10) << "patients" << '\n';

    std::array<std::size_t, 4> grand{};
    std::size_t grand_patients = 0;
    for (TumorClass c : {TumorClass::benign, TumorClass::malignant}) {
      std::array<std::size_t, 4> class_total{};
      std::set<std::string> class_patients;
      for (Subtype s : {Subtype::A, Subtype::F, Subtype::TA, Subtype::PT, Subtype::DC, Subtype::PC, Subtype::MC,
                        Subtype::LC}) {
        if (class_of(s) != c) continue;
        std::array<std::size_t, 4> per_mag{};
        for (std::size_t i = 0; i < 4; ++i) {
          per_mag[i] = images[{s, kMagnifications[i]}];
          class_total[i] += per_mag[i];
        }
        class_patients.insert(patients[s].begin(), patients[s].end());
        row(to_string(c), to_string(s), per_mag, patients[s].size());
      }
      row(to_string(c), "total", class_total, class_patients.size());
      for (std::size_t i = 0; i < 4; ++i) grand[i] += class_total[i];
      grand_patients += class_patients.size();
    }
    row("all", "total", grand, grand_patients);
    if (!index.malformed().empty()) out << "unrecognized files: " << index.malformed().size() << '\n';
    return kOk;
  });
}

int cmd_augment(const AugmentArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.factor < 1) throw std::invalid_argument("--factor must be at least 1");
    if (args.workers < 1) throw std::invalid_argument("--workers must be at least 1");
    if (!(args.jitter_strength >= 0.0 && args.jitter_strength <= 1.0))
      throw std::invalid_argument("--jitter-strength must lie in [0,1]");
    if (args.out_dir.empty()) throw std::invalid_argument("--out is required");

    const auto index = scan_dataset(args.root);
    for (const auto& m : index.malformed()) err << "warning: unrecognized file " << m << '\n';
    DatasetIndex train = index;
    if (args.fold_file) train = apply_fold(index, load_fold_spec(*args.fold_file, args.fold_index)).train;

    PairingPolicy policy;
    policy.same_magnification = !args.any_magnification;
    policy.same_subtype = args.same_subtype;
    policy.restrict_to_patients = train.patient_ids();

    auto config_for = [&](AugMethod method) {
      PlanConfig c;
      c.method = method;
      c.mask_kind = args.mask_kind;
      c.n_levels = args.levels;
      c.transition_width = args.transition_width;
      c.randomize_sides = args.randomize_sides;
      c.jitter_strength = args.jitter_strength;
      return c;
    };

    AugmentationPlan balanced;
    if (args.balance) balanced = plan_balancing(train, policy, config_for(args.balance_method), args.seed);
    const auto multiplied =
        plan_multiplication(train, balanced, args.factor, config_for(args.method), policy, args.seed);

    std::vector<PlanEntry> entries = balanced.entries;
    entries.insert(entries.end(), multiplied.entries.begin(), multiplied.entries.end());
    const auto records = execute_entries(entries, args.out_dir, {args.workers, args.resize_half});
    write_manifest(args.out_dir / "manifest.jsonl", records);

    std::size_t ok = 0;
    std::map<ClassMag, std::size_t> final_counts = train.counts();
    for (const auto& r : records) {
      if (!r.ok) {
        err << "failed: " << r.output << ": " << r.error << '\n';
        continue;
      }
      ++ok;
      ++final_counts[{r.class_label, r.magnification}];
    }
    out << "planned: " << entries.size() << " (balance " << balanced.size() << ", multiply " << multiplied.size()
        << ")\n";
    out << "succeeded: " << ok << "\nfailed: " << (records.size() - ok) << '\n';
    for (TumorClass c : {TumorClass::benign, TumorClass::malignant}) {
      std::size_t total = 0;
      out << "final " << to_string(c) << ":";
      for (int m : kMagnifications) {
        const auto it = final_counts.find({c, m});
        const std::size_t v = it == final_counts.end() ? 0 : it->second;
        total += v;
        out << ' ' << m << "x=" << v;
      }
      out << " total=" << total << '\n';
    }
    return !entries.empty() && ok == 0 ? kAllEntriesFailed : kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-Laplacian pyramid blending and dataset augmentation"};
  app.require_subcommand(1);

  const std::vector<std::string> blend_methods{"direct", "mix", "glpb"};
  const std::vector<std::string> aug_methods{"glpb", "mix", "direct", "jitter"};
  const std::vector<std::string> mask_kinds{"half_vertical", "half_horizontal", "custom"};
  std::string bl_method = "glpb", bl_mask = "half_vertical";
  std::string aug_method = "jitter", aug_balance_method = "glpb", aug_mask = "half_vertical";

  PyramidArgs pyr;
  int pyr_levels = -1;
  auto* pyramid = app.add_subcommand("pyramid", "Write Gaussian and Laplacian levels and the reconstruction");
  pyramid->add_option("input", pyr.input, "Input PNG")->required();
  pyramid->add_option("-o,--out", pyr.out_dir, "Output directory")->required();
  pyramid->add_option("-l,--levels", pyr_levels, "Pyramid depth (default: max - 2)");
  pyramid->add_flag("--resize-half", pyr.resize_half, "Downscale by two before processing");

  BlendArgs bl;
  int bl_levels = -1;
  std::string mask_file;
  auto* blend_cmd = app.add_subcommand("blend", "Composite two images");
  blend_cmd->add_option("a", bl.a, "Image A (mask 0)")->required();
  blend_cmd->add_option("b", bl.b, "Image B (mask 1)")->required();
  blend_cmd->add_option("-o,--out", bl.out, "Output PNG")->required();
  blend_cmd->add_option("-m,--method", bl_method, "direct | mix | glpb")
      ->check(CLI::IsMember(blend_methods))
      ->capture_default_str();
  blend_cmd->add_option("--mask", bl_mask, "half_vertical | half_horizontal | custom")
      ->check(CLI::IsMember(mask_kinds))
      ->capture_default_str();
  blend_cmd->add_option("--mask-file", mask_file, "Mask PNG for --mask custom");
  blend_cmd->add_option("-w,--transition-width", bl.spec.transition_width, "Mix ramp width in pixels")
      ->check(CLI::NonNegativeNumber);
  blend_cmd->add_option("-l,--levels", bl_levels, "Pyramid depth for glpb (default: max - 2)");
  blend_cmd->add_flag("--resize-half", bl.resize_half, "Downscale by two before processing");

  std::filesystem::path scan_root;
  auto* scan = app.add_subcommand("scan", "Print image and patient counts of a corpus");
  scan->add_option("root", scan_root, "Dataset root")->required();

  AugmentArgs aug;
  int aug_levels = -1;
  std::string fold_file;
  auto* augment = app.add_subcommand("augment", "Balance and multiply a training fold");
  augment->add_option("--dataset,root", aug.root, "Dataset root")->required();
  augment->add_option("--folds", fold_file, "Fold file (JSON); default: all patients train");
  augment->add_option("--fold-index", aug.fold_index, "Fold to use")->capture_default_str();
  augment->add_flag("--balance", aug.balance, "Equalize class counts per magnification");
  augment->add_option("--factor", aug.factor, "Final size multiple of the balanced set")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment->add_option("--method", aug_method, "Multiplication method: jitter | glpb | mix | direct")
      ->check(CLI::IsMember(aug_methods))
      ->capture_default_str();
  augment->add_option("--balance-method", aug_balance_method, "Balancing method: glpb | mix | direct | jitter")
      ->check(CLI::IsMember(aug_methods))
      ->capture_default_str();
  augment->add_option("-l,--levels", aug_levels, "Pyramid depth for glpb (default: max - 2)");
  augment->add_option("--mask", aug_mask, "half_vertical | half_horizontal")
      ->check(CLI::IsMember(std::vector<std::string>{"half_vertical", "half_horizontal"}))
      ->capture_default_str();
  augment->add_option("-w,--transition-width", aug.transition_width, "Mix ramp width in pixels")
      ->check(CLI::NonNegativeNumber);
  augment->add_flag("--randomize-sides", aug.randomize_sides, "Let the seed pick which source goes left");
  augment->add_flag("--same-subtype", aug.same_subtype, "Only pair images of the same subtype");
  augment->add_flag("--any-magnification", aug.any_magnification, "Allow pairs across magnifications");
  augment->add_option("--jitter-strength", aug.jitter_strength, "Colour jitter strength in [0,1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  augment->add_option("--seed", aug.seed, "Global seed")->capture_default_str();
  augment->add_option("-j,--workers", aug.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  augment->add_option("-o,--out", aug.out_dir, "Output directory")->required();
  augment->add_flag("--resize-half", aug.resize_half, "Downscale sources by two before blending");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (pyramid->parsed()) {
    if (pyramid->count("--levels")) pyr.levels = pyr_levels;
    return cmd_pyramid(pyr, out, err);
  }
  if (blend_cmd->parsed()) {
    bl.spec.method = *parse_blend_method(bl_method);
    bl.spec.mask_kind = *parse_mask_kind(bl_mask);
    if (blend_cmd->count("--levels")) bl.spec.n_levels = bl_levels;
    if (!mask_file.empty()) bl.mask_file = mask_file;
    return cmd_blend(bl, out, err);
  }
  if (scan->parsed()) return cmd_scan(scan_root, out, err);
  if (augment->parsed()) {
    aug.method = *parse_aug_method(aug_method);
    aug.balance_method = *parse_aug_method(aug_balance_method);
    aug.mask_kind = *parse_mask_kind(aug_mask);
    if (augment->count("--levels")) aug.levels = aug_levels;
    if (!fold_file.empty()) aug.fold_file = fold_file;
    return cmd_augment(aug, out, err);
  }
  return kUsage;
}

}  // namespace pyrblend::cli
