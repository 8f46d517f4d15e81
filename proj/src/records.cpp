#include "pyrblend/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace pyrblend {

namespace {

constexpr std::pair<Subtype, std::string_view> kSubtypeNames[] = {
    {Subtype::A, "A"},   {Subtype::F, "F"},   {Subtype::TA, "TA"}, {Subtype::PT, "PT"},
    {Subtype::DC, "DC"}, {Subtype::PC, "PC"}, {Subtype::MC, "MC"}, {Subtype::LC, "LC"},
};

}  // namespace

std::string_view to_string(TumorClass c) { return c == TumorClass::benign ? "benign" : "malignant"; }

std::string_view to_string(Subtype s) {
  for (const auto& [k, name] : kSubtypeNames)
    if (k == s) return name;
  return "?";
}

std::optional<Subtype> parse_subtype(std::string_view s) {
  for (const auto& [k, name] : kSubtypeNames)
    if (name == s) return k;
  return std::nullopt;
}

TumorClass class_of(Subtype s) {
  switch (s) {
    case Subtype::A:
    case Subtype::F:
    case Subtype::TA:
    case Subtype::PT:
      return TumorClass::benign;
    default:
      return TumorClass::malignant;
  }
}

bool is_valid_magnification(int m) { return std::ranges::find(kMagnifications, m) != std::end(kMagnifications); }

std::string SampleRecord::file_name() const { return std::filesystem::path(path).filename().string(); }

std::optional<SampleRecord> parse_sample_filename(std::string_view file_name, std::string path) {
  static const std::regex grammar(R"(^SOB_([BM])_(A|F|TA|PT|DC|PC|MC|LC)-(\d{2}-\d+[A-Za-z]*)-(40|100|200|400)-(\d+)\.png$)");
  std::cmatch m;
  if (!std::regex_match(file_name.data(), file_name.data() + file_name.size(), m, grammar)) return std::nullopt;

  SampleRecord r;
  r.class_label = m[1].str() == "B" ? TumorClass::benign : TumorClass::malignant;
  r.subtype = *parse_subtype(m[2].str());
  if (class_of(r.subtype) != r.class_label) return std::nullopt;
  r.patient_id = m[3].str();
  r.magnification = std::stoi(m[4].str());
  try {
    r.sequence = std::stoi(m[5].str());
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
  r.path = path.empty() ? std::string(file_name) : std::move(path);
  return r;
}

DatasetIndex::DatasetIndex(std::vector<SampleRecord> records, std::vector<std::string> malformed)
    : records_(std::move(records)), malformed_(std::move(malformed)) {
  std::ranges::sort(records_, {}, &SampleRecord::path);
  std::ranges::sort(malformed_);
  std::map<std::string, TumorClass> patient_class;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!is_valid_magnification(r.magnification))
      throw InconsistentIndex(r.path + ": magnification " + std::to_string(r.magnification) + " is not supported");
    if (class_of(r.subtype) != r.class_label)
      throw InconsistentIndex(r.path + ": subtype " + std::string(to_string(r.subtype)) + " is not " +
                              std::string(to_string(r.class_label)));
    auto [it, inserted] = patient_class.emplace(r.patient_id, r.class_label);
    if (!inserted && it->second != r.class_label)
      throw InconsistentIndex("patient " + r.patient_id + " appears under both classes");
    ++counts_[{r.class_label, r.magnification}];
    patients_[r.patient_id].push_back(i);
  }
}

std::size_t DatasetIndex::count(TumorClass c, int magnification) const {
  const auto it = counts_.find({c, magnification});
  return it == counts_.end() ? 0 : it->second;
}

std::size_t DatasetIndex::count(TumorClass c) const {
  std::size_t n = 0;
  for (const auto& [key, v] : counts_)
    if (key.first == c) n += v;
  return n;
}

std::set<std::string> DatasetIndex::patient_ids() const {
  std::set<std::string> out;
  for (const auto& [id, _] : patients_) out.insert(id);
  return out;
}

DatasetIndex scan_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw UnreadableRoot("dataset root " + root.string() + " is not a readable directory");

  std::vector<SampleRecord> records;
  std::vector<std::string> malformed;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw UnreadableRoot("cannot read " + root.string() + ": " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw UnreadableRoot("cannot read " + root.string() + ": " + ec.message());
    if (!it->is_regular_file(ec)) continue;
    const auto path = it->path();
    if (auto r = parse_sample_filename(path.filename().string(), path.string()))
      records.push_back(std::move(*r));
    else
      malformed.push_back(path.string());
  }
  return DatasetIndex(std::move(records), std::move(malformed));
}

FoldSpec parse_fold_spec(std::string_view json_text, int fold_index) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidFold(std::string("fold file is not valid JSON: ") + e.what());
  }
  const std::string key = std::to_string(fold_index);
  if (!doc.is_object() || !doc.contains(key)) throw InvalidFold("fold " + key + " not found");
  const auto& fold = doc.at(key);

  FoldSpec spec;
  for (const auto& [field, split] : {std::pair{"train", Split::train}, std::pair{"test", Split::test}}) {
    if (!fold.contains(field) || !fold.at(field).is_array())
      throw InvalidFold("fold " + key + " lacks a '" + field + "' list");
    for (const auto& id : fold.at(field)) {
      if (!id.is_string()) throw InvalidFold("patient ids must be strings");
      auto [it, inserted] = spec.emplace(id.get<std::string>(), split);
      if (!inserted && it->second != split)
        throw InvalidFold("patient " + it->first + " is in both train and test of fold " + key);
    }
  }
  return spec;
}

FoldSpec load_fold_spec(const std::filesystem::path& path, int fold_index) {
  std::ifstream in(path);
  if (!in) throw InvalidFold("cannot open fold file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fold_spec(ss.str(), fold_index);
}

FoldSplit apply_fold(const DatasetIndex& index, const FoldSpec& fold) {
  std::vector<SampleRecord> train, test;
  for (const auto& r : index.records()) {
    const auto it = fold.find(r.patient_id);
    if (it == fold.end()) throw UnassignedPatient("patient " + r.patient_id + " is not assigned by the fold");
    (it->second == Split::train ? train : test).push_back(r);
  }
  return {DatasetIndex(std::move(train)), DatasetIndex(std::move(test))};
}

}  // namespace pyrblend
