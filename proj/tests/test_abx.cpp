#include "abxeval/abx.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace abxeval;
using namespace abxeval::testutil;

namespace {

DeltaRecord rec(const std::string& id, double delta, Language lang = Language::en) {
  DeltaRecord d;
  d.model_id = "m";
  d.language = lang;
  d.triplet_id = id;
  d.delta = delta;
  d.d_ax = std::max(0.0, -delta);
  d.d_bx = std::max(0.0, delta);
  return d;
}

ItemAccuracy hum(const std::string& id, long correct, long total) {
  return ItemAccuracy{id, correct, total};
}

}  // namespace

TEST_CASE("delta sign convention") {
  CHECK(delta_from_distances(0.2, 0.5, Side::A) == doctest::Approx(0.3));
  CHECK(delta_from_distances(0.5, 0.2, Side::B) == doctest::Approx(0.3));
  CHECK(delta_from_distances(0.5, 0.2, Side::A) == doctest::Approx(-0.3));
}

TEST_CASE("compute_delta runs the three-way comparison") {
  auto data = make_gaussian_abx(4, 8.0, 21);

  SUBCASE("x identical to a gives d_ax = 0 and delta = d_bx") {
    TripletItem item = data.triplets[0];
    // make X a byte copy of A's utterance under X's id
    FeatureMatrix copy = data.archive.at(item.a.utterance_id);
    copy.utterance_id = item.x.utterance_id;
    item.x.onset = item.a.onset;
    item.x.offset = item.a.offset;
    data.archive.insert_or_assign(item.x.utterance_id, std::move(copy));
    item.x_matches = Side::A;

    auto d = compute_delta(item, data.archive, FrameMetric{}, "m");
    CHECK(d.d_ax == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.delta == doctest::Approx(d.d_bx));
    CHECK(d.delta >= 0.0);
  }
  SUBCASE("swapping a and b while flipping x_matches leaves delta unchanged") {
    for (const auto& item : data.triplets) {
      TripletItem swapped = item;
      std::swap(swapped.a, swapped.b);
      std::swap(swapped.phone_a, swapped.phone_b);
      swapped.x_matches = item.x_matches == Side::A ? Side::B : Side::A;
      auto d1 = compute_delta(item, data.archive, FrameMetric{}, "m");
      auto d2 = compute_delta(swapped, data.archive, FrameMetric{}, "m");
      CHECK(d1.delta == doctest::Approx(d2.delta).epsilon(1e-12));
      CHECK(d1.d_ax == doctest::Approx(d2.d_bx));
    }
  }
  SUBCASE("missing utterance names the triplet and the utterance") {
    TripletItem item = data.triplets[0];
    item.x.utterance_id = "missing_utt";
    try {
      compute_delta(item, data.archive, FrameMetric{}, "m");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      std::string msg = e.what();
      CHECK(msg.find("missing_utt") != std::string::npos);
      CHECK(msg.find(item.triplet_id) != std::string::npos);
    }
  }
}

TEST_CASE("evaluate_deltas is schedule-independent") {
  auto data = make_gaussian_abx(40, 2.0, 33);
  auto serial = evaluate_deltas(data.triplets, data.archive, FrameMetric{}, "m", 1);
  auto parallel = evaluate_deltas(data.triplets, data.archive, FrameMetric{}, "m", 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].triplet_id == parallel[i].triplet_id);
    CHECK(serial[i].delta == parallel[i].delta);  // bitwise
    CHECK(serial[i].d_ax == parallel[i].d_ax);
  }
}

TEST_CASE("decide is a strict sign test") {
  CHECK(decide(0.3));
  CHECK_FALSE(decide(0.0));
  CHECK_FALSE(decide(-0.1));
  CHECK_THROWS_AS(decide(std::nan("")), NumericError);
}

TEST_CASE("decisions are invariant under positive scaling of all distances") {
  CounterRng rng(71, "decide-scale");
  for (int trial = 0; trial < 200; ++trial) {
    double d_ax = std::abs(rng.next_gaussian());
    double d_bx = std::abs(rng.next_gaussian());
    double alpha = 0.001 + 100.0 * rng.next_unit();
    Side side = rng.next() % 2 == 0 ? Side::A : Side::B;
    CHECK(decide(delta_from_distances(d_ax, d_bx, side)) ==
          decide(delta_from_distances(alpha * d_ax, alpha * d_bx, side)));
  }
}

TEST_CASE("accuracy aggregates by language and contrast") {
  std::vector<TripletItem> manifest = {
      minimal_item("t1", Language::en, "pa", "pb"),
      minimal_item("t2", Language::en, "pb", "pa"),
      minimal_item("t3", Language::en, "pc", "pd"),
      minimal_item("t4", Language::en, "pc", "pd"),
  };

  SUBCASE("global counting, zero counts wrong") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.3), rec("t2", -0.1), rec("t3", 0.2),
                                       rec("t4", 0.0)};
    auto report = accuracy(deltas, Scope::global, manifest);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].key == "all");
    CHECK(report.rows[0].n_items == 4);
    CHECK(report.rows[0].accuracy() == doctest::Approx(0.5));
  }
  SUBCASE("all positive gives accuracy one") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.3), rec("t2", 0.1)};
    auto report = accuracy(deltas, Scope::global, manifest);
    CHECK(report.rows[0].accuracy() == 1.0);
  }
  SUBCASE("contrasts share a row regardless of phone order") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.3), rec("t2", 0.1), rec("t3", -0.2),
                                       rec("t4", -0.4)};
    auto report = accuracy(deltas, Scope::by_contrast, manifest);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].key == "pa:pb");
    CHECK(report.rows[0].n_items == 2);
    CHECK(report.rows[0].accuracy() == 1.0);
    CHECK(report.rows[1].key == "pc:pd");
    CHECK(report.rows[1].accuracy() == 0.0);
  }
  SUBCASE("contrast rows average back to the global accuracy") {
    CounterRng rng(17, "acc-avg");
    auto data = make_gaussian_abx(60, 1.0, 44);
    auto deltas = evaluate_deltas(data.triplets, data.archive, FrameMetric{}, "m", 0);
    auto global = accuracy(deltas, Scope::global, data.triplets);
    auto by_contrast = accuracy(deltas, Scope::by_contrast, data.triplets);
    long correct = 0, items = 0;
    for (const auto& row : by_contrast.rows) {
      correct += row.n_correct;
      items += row.n_items;
    }
    REQUIRE(global.rows.size() == 1);
    CHECK(items == global.rows[0].n_items);
    CHECK(correct == global.rows[0].n_correct);
  }
  SUBCASE("unresolved triplet id") {
    std::vector<DeltaRecord> deltas = {rec("nope", 0.3)};
    CHECK_THROWS_WITH_AS(accuracy(deltas, Scope::global, manifest),
                         doctest::Contains("unknown triplet"), DataError);
  }
}

TEST_CASE("reweighted accuracy follows the weighted decision rule") {
  SUBCASE("hand example: 0.9 / 1.5") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4), rec("t2", -0.4)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 9, 10)},
                                             {"t2", hum("t2", 6, 10)}};
    auto rew = reweighted_accuracy(deltas, h);
    REQUIRE(rew.contains(Language::en));
    CHECK(rew.at(Language::en).value == doctest::Approx(0.6));
    CHECK(rew.at(Language::en).exact == "3/5");
    CHECK(rew.at(Language::en).n_items == 2);
  }
  SUBCASE("all decisions correct gives 1.0 regardless of the weights") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4), rec("t2", 0.1), rec("t3", 2.0)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 1, 7)},
                                             {"t2", hum("t2", 3, 5)},
                                             {"t3", hum("t3", 2, 3)}};
    auto rew = reweighted_accuracy(deltas, h);
    CHECK(rew.at(Language::en).value == 1.0);
    CHECK(rew.at(Language::en).exact == "1/1");
  }
  SUBCASE("constant weights reduce to the plain accuracy, exactly") {
    CounterRng rng(9, "rew-const");
    std::vector<DeltaRecord> deltas;
    std::map<std::string, ItemAccuracy> h;
    long correct = 0;
    const long n = 37;
    for (long i = 0; i < n; ++i) {
      std::string id = "t" + std::to_string(i);
      double delta = rng.next_gaussian();
      correct += delta > 0.0;
      deltas.push_back(rec(id, delta));
      h.emplace(id, hum(id, 5, 7));  // same weight everywhere
    }
    auto rew = reweighted_accuracy(deltas, h);
    long g = std::gcd(correct, n);
    std::string expected =
        std::to_string(correct / g) + "/" + std::to_string(n / g);
    CHECK(rew.at(Language::en).exact == expected);
  }
  SUBCASE("mistakes only on items humans always miss give 1.0") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4), rec("t2", -0.4)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 3, 4)},
                                             {"t2", hum("t2", 0, 4)}};
    auto rew = reweighted_accuracy(deltas, h);
    CHECK(rew.at(Language::en).value == 1.0);
  }
  SUBCASE("languages are weighted separately") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4, Language::en),
                                       rec("t2", -0.4, Language::en),
                                       rec("t3", 0.4, Language::fr)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 9, 10)},
                                             {"t2", hum("t2", 6, 10)},
                                             {"t3", hum("t3", 1, 2)}};
    auto rew = reweighted_accuracy(deltas, h);
    CHECK(rew.at(Language::en).value == doctest::Approx(0.6));
    CHECK(rew.at(Language::fr).value == 1.0);
  }
  SUBCASE("missing weights are reported with their ids") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4), rec("t2", -0.4)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 9, 10)}};
    CHECK_THROWS_WITH_AS(reweighted_accuracy(deltas, h), doctest::Contains("t2"),
                         DataError);
  }
  SUBCASE("zero weight sum is an error") {
    std::vector<DeltaRecord> deltas = {rec("t1", 0.4)};
    std::map<std::string, ItemAccuracy> h = {{"t1", hum("t1", 0, 4)}};
    CHECK_THROWS_WITH_AS(reweighted_accuracy(deltas, h), doctest::Contains("zero"),
                         DataError);
  }
  SUBCASE("bounds hold on random inputs") {
    CounterRng rng(13, "rew-bounds");
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<DeltaRecord> deltas;
      std::map<std::string, ItemAccuracy> h;
      for (long i = 0; i < 25; ++i) {
        std::string id = "t" + std::to_string(i);
        deltas.push_back(rec(id, rng.next_gaussian()));
        long total = 1 + static_cast<long>(rng.next_below(9));
        long correct = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(total + 1)));
        h.emplace(id, hum(id, correct, total));
      }
      long weight_sum = 0;
      for (auto& [id, acc] : h) weight_sum += acc.n_correct;
      if (weight_sum == 0) continue;
      auto rew = reweighted_accuracy(deltas, h);
      CHECK(rew.at(Language::en).value >= 0.0);
      CHECK(rew.at(Language::en).value <= 1.0);
    }
  }
}

TEST_CASE("delta table round-trips through CSV") {
  TempDir dir("delta");
  auto data = make_gaussian_abx(10, 3.0, 55);
  auto deltas = evaluate_deltas(data.triplets, data.archive, FrameMetric{}, "m1", 0);
  auto path = dir.path() / "deltas.csv";
  write_delta_csv(path, deltas);
  auto loaded = read_delta_csv(path);
  REQUIRE(loaded.size() == deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    CHECK(loaded[i].triplet_id == deltas[i].triplet_id);
    CHECK(loaded[i].model_id == "m1");
    // 12 significant digits survive the round trip to ~1e-11 relative
    CHECK(loaded[i].delta ==
          doctest::Approx(deltas[i].delta).epsilon(1e-10));
  }
}
