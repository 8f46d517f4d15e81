#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "pyrblend/dataset.hpp"
#include "pyrblend/jitter.hpp"
#include "pyrblend/plan.hpp"

using namespace pyrblend;

TEST_CASE("filename grammar") {
  auto r = parse_sample_filename("SOB_B_TA-14-21978AB-100-009.png");
  REQUIRE(r);
  CHECK(r->class_label == TumorClass::benign);
  CHECK(r->subtype == Subtype::TA);
  CHECK(r->patient_id == "14-21978AB");
  CHECK(r->magnification == 100);
  CHECK(r->sequence == 9);

  r = parse_sample_filename("SOB_M_DC-14-10926-400-012.png");
  REQUIRE(r);
  CHECK(r->class_label == TumorClass::malignant);
  CHECK(r->subtype == Subtype::DC);
  CHECK(r->patient_id == "14-10926");
  CHECK(r->magnification == 400);
  CHECK(r->sequence == 12);

  CHECK(!parse_sample_filename("SOB_B_DC-14-10926-400-012.png"));  // class/subtype disagree
  CHECK(!parse_sample_filename("SOB_M_DC-14-10926-50-012.png"));   // magnification
  CHECK(!parse_sample_filename("SOB_M_DC-14-10926-400-012.jpg"));
  CHECK(!parse_sample_filename("SOB_M_XX-14-10926-400-012.png"));
  CHECK(!parse_sample_filename("notes.txt"));
}

TEST_CASE("DatasetIndex invariants") {
  auto records = fixtures::make_records(Subtype::A, 2, 10, 40, 4);
  auto r = records.front();
  r.class_label = TumorClass::malignant;
  r.subtype = Subtype::DC;
  r.path = "other.png";
  records.push_back(r);
  CHECK_THROWS_AS(DatasetIndex{records}, InconsistentIndex);

  const DatasetIndex index(fixtures::make_records(Subtype::A, 2, 10, 40, 4));
  CHECK(index.count(TumorClass::benign, 40) == 4);
  CHECK(index.count(TumorClass::malignant, 40) == 0);
  CHECK(index.patients().size() == 2);
  CHECK(std::ranges::is_sorted(index.records(), {}, &SampleRecord::path));
}

TEST_CASE("scan_dataset") {
  fixtures::TempDir dir;
  fixtures::write_corpus(dir.path(), fixtures::small_corpus(), 8, 8);
  fixtures::write_corpus(dir.path(), {{Subtype::PT, "13-7", 100, 1}}, 8, 8);
  std::ofstream(dir / "README.txt") << "not an image";

  const auto index = scan_dataset(dir.path());
  CHECK(index.size() == 17);
  CHECK(index.count(TumorClass::benign, 40) == 6);
  CHECK(index.count(TumorClass::malignant, 40) == 10);
  CHECK(index.count(TumorClass::benign, 100) == 1);
  REQUIRE(index.malformed().size() == 1);
  CHECK(index.malformed()[0].find("README.txt") != std::string::npos);

  CHECK_THROWS_AS(scan_dataset(dir / "missing"), UnreadableRoot);
  CHECK_THROWS_AS(scan_dataset(dir / "README.txt"), UnreadableRoot);
}

TEST_CASE("derive_seed") {
  const std::string_view a[] = {"balance", "glpb", "benign", "40", "0"};
  const std::string_view b[] = {"balance", "glpb", "benign", "40", "1"};
  const std::string_view c[] = {"balance", "glpb", "benign4", "0"};  // separator matters
  const std::string_view d[] = {"balance", "glpb", "benign", "40", "0"};
  CHECK(derive_seed(7, a) == derive_seed(7, d));
  CHECK(derive_seed(7, a) != derive_seed(8, a));
  CHECK(derive_seed(7, a) != derive_seed(7, b));
  CHECK(derive_seed(7, a) != derive_seed(7, c));
}

TEST_CASE("select_pair") {
  const PairingPolicy policy;
  SUBCASE("two patients, one choice") {
    std::vector<SampleRecord> pool = fixtures::make_records(Subtype::A, 2, 10, 40, 2);
    std::set<std::string> firsts;
    for (std::uint64_t s = 0; s < 32; ++s) {
      const auto [a, b] = select_pair(pool, policy, s);
      CHECK(a.patient_id != b.patient_id);
      firsts.insert(a.patient_id);
      const auto again = select_pair(pool, policy, s);
      CHECK(again.first == a);
    }
    CHECK(firsts.size() == 2);  // both orders occur
  }
  SUBCASE("single patient") {
    const auto pool = fixtures::make_records(Subtype::A, 1, 10, 40, 3);
    CHECK_THROWS_AS(select_pair(pool, policy, 1), InsufficientPatients);
  }
  SUBCASE("1000 draws over four patients") {
    const auto pool = fixtures::make_records(Subtype::A, 4, 10, 40, 20);
    std::set<std::string> seen;
    int same = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto [a, b] = select_pair(pool, policy, s * 7919 + 3);
      same += a.patient_id == b.patient_id;
      seen.insert(a.patient_id);
      seen.insert(b.patient_id);
    }
    CHECK(same == 0);
    CHECK(seen.size() == 4);
  }
  SUBCASE("ordered pairs are drawn uniformly") {
    // 3 records: patient X has 2 images, patient Y has 1 -> 4 valid ordered pairs.
    auto pool = fixtures::make_records(Subtype::A, 1, 10, 40, 2);
    const auto y = fixtures::make_records(Subtype::A, 1, 11, 40, 1);
    pool.push_back(y[0]);
    std::map<std::pair<std::string, std::string>, int> hist;
    const int n = 8000;
    for (int s = 0; s < n; ++s) {
      const auto [a, b] = select_pair(pool, policy, static_cast<std::uint64_t>(s));
      ++hist[{a.path, b.path}];
    }
    CHECK(hist.size() == 4);
    for (const auto& [_, v] : hist) CHECK(std::abs(v - n / 4) < 200);  // ~4.6 sigma
  }
  SUBCASE("policy filters") {
    auto pool = fixtures::make_records(Subtype::A, 2, 10, 40, 4);
    const auto f = fixtures::make_records(Subtype::F, 1, 20, 40, 2);
    pool.insert(pool.end(), f.begin(), f.end());
    PairingPolicy sub;
    sub.same_subtype = true;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto [a, b] = select_pair(pool, sub, s);
      CHECK(a.subtype == b.subtype);
    }
    PairingPolicy restricted;
    restricted.restrict_to_patients = std::set<std::string>{"14-10", "14-20"};
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto [a, b] = select_pair(pool, restricted, s);
      CHECK(restricted.restrict_to_patients->contains(a.patient_id));
      CHECK(restricted.restrict_to_patients->contains(b.patient_id));
    }
    restricted.restrict_to_patients = std::set<std::string>{"14-10"};
    CHECK_THROWS_AS(select_pair(pool, restricted, 0), InsufficientPatients);
  }
}

TEST_CASE("plan_balancing") {
  const PlanConfig glpb;
  SUBCASE("published class totals") {
    const auto index = fixtures::reference_corpus_index();
    CHECK(index.count(TumorClass::benign) == 2368);
    CHECK(index.count(TumorClass::malignant) == 5429);
    const auto plan = plan_balancing(index, PairingPolicy{}, glpb, 0);
    CHECK(plan.size() == 3061);
    for (int mag : kMagnifications)
      CHECK(index.count(TumorClass::benign, mag) + plan.count(TumorClass::benign, mag) ==
            index.count(TumorClass::malignant, mag));
    CHECK(plan.count(TumorClass::malignant, 40) == 0);
  }
  SUBCASE("equal classes give an empty plan") {
    auto records = fixtures::make_records(Subtype::A, 3, 10, 100, 9);
    const auto m = fixtures::make_records(Subtype::LC, 3, 50, 100, 9);
    records.insert(records.end(), m.begin(), m.end());
    CHECK(plan_balancing(DatasetIndex(records), PairingPolicy{}, glpb, 1).size() == 0);
  }
  SUBCASE("single minority patient") {
    auto records = fixtures::make_records(Subtype::A, 1, 10, 40, 3);
    const auto m = fixtures::make_records(Subtype::LC, 3, 50, 40, 9);
    records.insert(records.end(), m.begin(), m.end());
    CHECK_THROWS_AS(plan_balancing(DatasetIndex(records), PairingPolicy{}, glpb, 1), InsufficientPatients);
  }
  SUBCASE("entries carry config and unique names") {
    auto records = fixtures::make_records(Subtype::A, 3, 10, 200, 5);
    const auto m = fixtures::make_records(Subtype::MC, 2, 50, 200, 12);
    records.insert(records.end(), m.begin(), m.end());
    PlanConfig cfg;
    cfg.method = AugMethod::mix;
    cfg.transition_width = 6;
    const auto plan = plan_balancing(DatasetIndex(records), PairingPolicy{}, cfg, 99);
    REQUIRE(plan.size() == 7);
    std::set<std::string> names;
    for (const auto& e : plan.entries) {
      CHECK(e.method == AugMethod::mix);
      CHECK(e.transition_width == 6);
      CHECK(e.output_name.rfind("MIX_benign_200_", 0) == 0);
      CHECK(!e.swap_sides);
      names.insert(e.output_name);
    }
    CHECK(names.size() == 7);
  }
  SUBCASE("plan does not depend on record order") {
    auto records = fixtures::make_records(Subtype::A, 3, 10, 40, 6);
    const auto m = fixtures::make_records(Subtype::DC, 4, 50, 40, 14);
    records.insert(records.end(), m.begin(), m.end());
    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(5));
    const auto p1 = plan_balancing(DatasetIndex(records), PairingPolicy{}, glpb, 3);
    const auto p2 = plan_balancing(DatasetIndex(shuffled), PairingPolicy{}, glpb, 3);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(p1.entries[i].output_name == p2.entries[i].output_name);
      CHECK(*p1.entries[i].source_a == *p2.entries[i].source_a);
      CHECK(*p1.entries[i].source_b == *p2.entries[i].source_b);
    }
    const auto p3 = plan_balancing(DatasetIndex(records), PairingPolicy{}, glpb, 4);
    CHECK(p3.entries[0].seed != p1.entries[0].seed);
  }
  SUBCASE("randomized sides use the seed") {
    auto records = fixtures::make_records(Subtype::A, 3, 10, 40, 6);
    const auto m = fixtures::make_records(Subtype::DC, 4, 50, 40, 70);
    records.insert(records.end(), m.begin(), m.end());
    PlanConfig cfg;
    cfg.randomize_sides = true;
    const auto plan = plan_balancing(DatasetIndex(records), PairingPolicy{}, cfg, 3);
    const auto swapped = std::ranges::count_if(plan.entries, [](const PlanEntry& e) { return e.swap_sides; });
    CHECK(swapped > 0);
    CHECK(swapped < static_cast<long>(plan.size()));
  }
}

TEST_CASE("plan_multiplication") {
  PlanConfig jitter;
  jitter.method = AugMethod::jitter;
  SUBCASE("factor 1 is empty") {
    const auto index = fixtures::reference_corpus_index();
    CHECK(plan_multiplication(index, AugmentationPlan{}, 1, jitter, PairingPolicy{}, 0).size() == 0);
    CHECK_THROWS_AS(plan_multiplication(index, AugmentationPlan{}, 0, jitter, PairingPolicy{}, 0),
                    std::invalid_argument);
  }
  SUBCASE("base of 100 times six") {
    auto records = fixtures::make_records(Subtype::A, 3, 10, 40, 50);
    const auto m = fixtures::make_records(Subtype::DC, 3, 50, 40, 50);
    records.insert(records.end(), m.begin(), m.end());
    const DatasetIndex index(records);
    CHECK(plan_multiplication(index, AugmentationPlan{}, 6, jitter, PairingPolicy{}, 0).size() == 500);
    PlanConfig blend_cfg;
    const auto plan = plan_multiplication(index, AugmentationPlan{}, 6, blend_cfg, PairingPolicy{}, 0);
    CHECK(plan.size() == 500);
    CHECK(plan.count(TumorClass::benign, 40) == 250);
    for (const auto& e : plan.entries) {
      CHECK(e.source_a->patient_id != e.source_b->patient_id);
      CHECK(e.source_a->class_label == e.class_label);
    }
  }
  SUBCASE("published totals after balancing") {
    const auto index = fixtures::reference_corpus_index();
    const auto balanced = plan_balancing(index, PairingPolicy{}, PlanConfig{}, 0);
    const auto twice = plan_multiplication(index, balanced, 2, jitter, PairingPolicy{}, 0);
    CHECK(twice.size() == 10858);
    std::size_t from_synthetic = 0;
    for (const auto& e : twice.entries) from_synthetic += e.synthetic_base != nullptr;
    CHECK(from_synthetic == 3061);
    CHECK(plan_multiplication(index, balanced, 6, jitter, PairingPolicy{}, 0).size() == 54290);
  }
}

TEST_CASE("color_jitter") {
  const auto img = fixtures::smooth_image(16, 12, 4);
  CHECK(max_abs_diff(color_jitter(img, 0.0, 123), img) == 0.0f);
  CHECK(max_abs_diff(color_jitter(img, 0.7, 123), color_jitter(img, 0.7, 123)) == 0.0f);
  CHECK(max_abs_diff(color_jitter(img, 0.7, 123), color_jitter(img, 0.7, 124)) > 0.0f);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto out = color_jitter(Image<float>::constant(4, 4, 3, 0.5f), 1.0, s);
    for (const auto& p : out.planes()) {
      CHECK(p.minCoeff() >= 0.3f - 1e-6f);
      CHECK(p.maxCoeff() <= 0.7f + 1e-6f);
    }
  }
  CHECK_THROWS_AS(color_jitter(img, 1.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(color_jitter(img, -0.1, 0), std::invalid_argument);
}

TEST_CASE("folds") {
  std::vector<SampleRecord> records;
  for (int p = 0; p < 10; ++p) {
    const auto r = fixtures::make_records(p < 4 ? Subtype::A : Subtype::DC, 1, 100 + p, 40, 3);
    records.insert(records.end(), r.begin(), r.end());
  }
  const DatasetIndex index(records);

  SUBCASE("7/3 split") {
    const auto fold = parse_fold_spec(R"({"1": {"train": ["14-100","14-101","14-102","14-104","14-105","14-106","14-107"],
                                             "test": ["14-103","14-108","14-109"]}})",
                                      1);
    const auto split = apply_fold(index, fold);
    CHECK(split.train.patients().size() == 7);
    CHECK(split.train.size() == 21);
    CHECK(split.test.size() == 9);
    CHECK(!split.train.patient_ids().contains("14-103"));
  }
  SUBCASE("unassigned patient") {
    const auto fold = parse_fold_spec(R"({"1": {"train": ["14-100"], "test": []}})", 1);
    CHECK_THROWS_AS(apply_fold(index, fold), UnassignedPatient);
  }
  SUBCASE("malformed folds") {
    CHECK_THROWS_AS(parse_fold_spec("{", 1), InvalidFold);
    CHECK_THROWS_AS(parse_fold_spec(R"({"2": {"train": [], "test": []}})", 1), InvalidFold);
    CHECK_THROWS_AS(parse_fold_spec(R"({"1": {"train": ["a"], "test": ["a"]}})", 1), InvalidFold);
    CHECK_THROWS_AS(parse_fold_spec(R"({"1": {"train": ["a"]}})", 1), InvalidFold);
  }
  SUBCASE("one benign training patient cannot be balanced") {
    const auto fold = parse_fold_spec(R"({"1": {"train": ["14-100","14-104","14-105","14-106","14-107"],
                                             "test": ["14-101","14-102","14-103","14-108","14-109"]}})",
                                      1);
    const auto split = apply_fold(index, fold);
    PairingPolicy policy;
    policy.restrict_to_patients = split.train.patient_ids();
    CHECK_THROWS_AS(plan_balancing(split.train, policy, PlanConfig{}, 0), InsufficientPatients);
  }
}
