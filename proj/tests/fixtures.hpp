#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iterator>
#include <map>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "pyrblend/dataset.hpp"
#include "pyrblend/png_io.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("pyrblend_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline std::string sample_name(pyrblend::Subtype s, const std::string& patient, int mag, int seq) {
  char seq_s[8];
  std::snprintf(seq_s, sizeof(seq_s), "%03d", seq);
  return std::string("SOB_") + (pyrblend::class_of(s) == pyrblend::TumorClass::benign ? "B" : "M") + "_" +
         std::string(pyrblend::to_string(s)) + "-" + patient + "-" + std::to_string(mag) + "-" + seq_s + ".png";
}

/// Smooth colour field with a little texture; distinct per seed.
inline pyrblend::Image<float> smooth_image(long w, long h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  pyrblend::Image<float> img(w, h, 3);
  for (long c = 0; c < 3; ++c) {
    const float base = 0.2f + 0.6f * u(rng), gx = 0.2f * (u(rng) - 0.5f), gy = 0.2f * (u(rng) - 0.5f);
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x)
        img(c, y, x) = std::clamp(base + gx * x / w + gy * y / h + 0.03f * (u(rng) - 0.5f), 0.0f, 1.0f);
  }
  return img;
}

struct CorpusSpec {
  pyrblend::Subtype subtype;
  std::string patient;
  int magnification;
  int count;
};

/// Writes one PNG per image under root/<class>/<patient>/.
inline std::vector<fs::path> write_corpus(const fs::path& root, const std::vector<CorpusSpec>& spec, long w = 48,
                                          long h = 32) {
  std::vector<fs::path> written;
  std::uint64_t seed = 1;
  for (const auto& s : spec) {
    const auto dir = root / std::string(pyrblend::to_string(pyrblend::class_of(s.subtype))) / s.patient;
    fs::create_directories(dir);
    for (int i = 1; i <= s.count; ++i) {
      const auto p = dir / sample_name(s.subtype, s.patient, s.magnification, i);
      pyrblend::write_png(p, smooth_image(w, h, seed++));
      written.push_back(p);
    }
  }
  return written;
}

/// 6 benign (patients 14-100, 14-101) and 10 malignant (14-200, 14-201) at 40x.
inline std::vector<CorpusSpec> small_corpus() {
  using pyrblend::Subtype;
  return {{Subtype::A, "14-100", 40, 3}, {Subtype::F, "14-101", 40, 3}, {Subtype::DC, "14-200", 40, 5},
          {Subtype::DC, "14-201", 40, 5}};
}

inline std::vector<pyrblend::SampleRecord> make_records(pyrblend::Subtype subtype, int n_patients, int first_patient,
                                                        int magnification, int images) {
  std::vector<pyrblend::SampleRecord> out;
  for (int i = 0; i < images; ++i) {
    const std::string patient = "14-" + std::to_string(first_patient + i % n_patients);
    auto r = pyrblend::parse_sample_filename(sample_name(subtype, patient, magnification, i + 1),
                                             "synthetic/" + sample_name(subtype, patient, magnification, i + 1));
    out.push_back(*r);
  }
  return out;
}

/// Index with the published class totals: 2,368 benign images of 24 patients
/// and 5,429 malignant images of 58 patients, spread over the four
/// magnifications (benign 592 each; malignant 1,357 / 1,357 / 1,357 / 1,358).
inline pyrblend::DatasetIndex reference_corpus_index() {
  using pyrblend::Subtype;
  std::vector<pyrblend::SampleRecord> records;
  const int mags[] = {40, 100, 200, 400};
  const int malignant_per_mag[] = {1357, 1357, 1357, 1358};
  for (int i = 0; i < 4; ++i) {
    auto b = make_records(Subtype::F, 24, 1000, mags[i], 592);
    auto m = make_records(Subtype::DC, 58, 5000, mags[i], malignant_per_mag[i]);
    records.insert(records.end(), b.begin(), b.end());
    records.insert(records.end(), m.begin(), m.end());
  }
  return pyrblend::DatasetIndex(std::move(records));
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every regular file below `root`, relative path -> bytes.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

}  // namespace fixtures
