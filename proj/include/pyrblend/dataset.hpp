#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pyrblend/errors.hpp"

namespace pyrblend {

enum class TumorClass { benign, malignant };

/// Histological subtypes. A/F/TA/PT are benign; DC/PC/MC/LC are malignant.
enum class Subtype { A, F, TA, PT, DC, PC, MC, LC };

inline constexpr int kMagnifications[] = {40, 100, 200, 400};

std::string_view to_string(TumorClass c);
std::string_view to_string(Subtype s);
std::optional<Subtype> parse_subtype(std::string_view s);
TumorClass class_of(Subtype s);
bool is_valid_magnification(int m);

struct SampleRecord {
  std::string path;  ///< as found on disk (root joined with the relative path)
  TumorClass class_label = TumorClass::benign;
  Subtype subtype = Subtype::A;
  std::string patient_id;
  int magnification = 40;
  int sequence = 0;

  /// File name component of `path`.
  std::string file_name() const;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Parses `SOB_<B|M>_<SUBTYPE>-<patient>-<mag>-<seq>.png`. Returns nullopt
/// when the name does not follow the grammar or the class letter disagrees
/// with the subtype.
std::optional<SampleRecord> parse_sample_filename(std::string_view file_name, std::string path = {});

using ClassMag = std::pair<TumorClass, int>;

/// Records sorted by path, with per-(class, magnification) counts and
/// per-patient groupings.
class DatasetIndex {
 public:
  DatasetIndex() = default;

  /// Throws InconsistentIndex when a patient appears under both classes or a
  /// record carries an invalid magnification / subtype-class pairing.
  explicit DatasetIndex(std::vector<SampleRecord> records, std::vector<std::string> malformed = {});

  const std::vector<SampleRecord>& records() const { return records_; }
  const std::vector<std::string>& malformed() const { return malformed_; }
  std::size_t size() const { return records_.size(); }

  std::size_t count(TumorClass c, int magnification) const;
  std::size_t count(TumorClass c) const;
  const std::map<ClassMag, std::size_t>& counts() const { return counts_; }

  /// Record indices per patient id.
  const std::map<std::string, std::vector<std::size_t>>& patients() const { return patients_; }
  std::set<std::string> patient_ids() const;

  /// Records satisfying `pred`, keeping index order.
  template <typename Pred>
  std::vector<SampleRecord> select(Pred pred) const {
    std::vector<SampleRecord> out;
    for (const auto& r : records_)
      if (pred(r)) out.push_back(r);
    return out;
  }

 private:
  std::vector<SampleRecord> records_;
  std::vector<std::string> malformed_;
  std::map<ClassMag, std::size_t> counts_;
  std::map<std::string, std::vector<std::size_t>> patients_;
};

/// Walks `root` recursively. Files that do not match the filename grammar are
/// listed in DatasetIndex::malformed(). Throws UnreadableRoot.
DatasetIndex scan_dataset(const std::filesystem::path& root);

enum class Split { train, test };

/// Patient id -> split for one fold.
using FoldSpec = std::map<std::string, Split>;

/// Parses a fold document of the form
///   {"<fold index>": {"train": ["14-21978AB", ...], "test": [...]}, ...}
/// and returns the requested fold. Throws InvalidFold.
FoldSpec parse_fold_spec(std::string_view json_text, int fold_index);
FoldSpec load_fold_spec(const std::filesystem::path& path, int fold_index);

struct FoldSplit {
  DatasetIndex train;
  DatasetIndex test;
};

/// Partitions by patient. Throws UnassignedPatient when a patient of the
/// index is missing from the fold.
FoldSplit apply_fold(const DatasetIndex& index, const FoldSpec& fold);

}  // namespace pyrblend
