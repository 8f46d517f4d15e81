#include "pyrblend/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pyrblend {

namespace {

template <typename T, typename Parser>
T parse_enum(const nlohmann::json& j, const char* key, Parser parse) {
  const auto v = parse(j.at(key).get<std::string>());
  if (!v) throw std::invalid_argument(std::string("bad value for manifest field ") + key);
  return *v;
}

}  // namespace

std::string to_json_line(const ManifestRecord& r) {
  nlohmann::ordered_json j;
  j["output"] = r.output;
  j["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) j["error"] = r.error;
  j["phase"] = to_string(r.phase);
  j["method"] = to_string(r.method);
  j["source_a"] = r.source_a;
  j["source_b"] = r.source_b;
  j["base_output"] = r.base_output;
  j["class"] = to_string(r.class_label);
  j["magnification"] = r.magnification;
  j["mask_kind"] = to_string(r.mask_kind);
  j["n_levels"] = r.n_levels ? nlohmann::ordered_json(*r.n_levels) : nlohmann::ordered_json(nullptr);
  j["transition_width"] = r.transition_width;
  j["swap_sides"] = r.swap_sides;
  j["jitter_strength"] = r.jitter_strength;
  j["resize_half"] = r.resize_half;
  j["seed"] = r.seed;
  j["version"] = r.version;
  return j.dump();
}

ManifestRecord parse_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    ManifestRecord r;
    r.output = j.at("output").get<std::string>();
    r.ok = j.at("status").get<std::string>() == "ok";
    if (!r.ok) r.error = j.value("error", std::string{});
    r.phase = parse_enum<Phase>(j, "phase", parse_phase);
    r.method = parse_enum<AugMethod>(j, "method", parse_aug_method);
    r.source_a = j.at("source_a").get<std::string>();
    r.source_b = j.at("source_b").get<std::string>();
    r.base_output = j.at("base_output").get<std::string>();
    const auto cls = j.at("class").get<std::string>();
    if (cls != "benign" && cls != "malignant") throw std::invalid_argument("bad manifest class");
    r.class_label = cls == "benign" ? TumorClass::benign : TumorClass::malignant;
    r.magnification = j.at("magnification").get<int>();
    r.mask_kind = parse_enum<MaskKind>(j, "mask_kind", parse_mask_kind);
    if (!j.at("n_levels").is_null()) r.n_levels = j.at("n_levels").get<int>();
    r.transition_width = j.at("transition_width").get<long>();
    r.swap_sides = j.at("swap_sides").get<bool>();
    r.jitter_strength = j.at("jitter_strength").get<double>();
    r.resize_half = j.at("resize_half").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed manifest line: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, std::vector<ManifestRecord> records) {
  std::ranges::sort(records, {}, &ManifestRecord::output);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  std::vector<ManifestRecord> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(parse_json_line(line));
  return out;
}

}  // namespace pyrblend
