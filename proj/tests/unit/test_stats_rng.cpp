#include <doctest.h>

#include <set>

#include "spatialcv/rng.hpp"
#include "spatialcv/stats.hpp"

using namespace spcv;

TEST_SUITE("stats_rng") {
  TEST_CASE("type-7 quantiles match hand computation") {
    const std::vector<double> v{7, 1, 3, 5};  // sorted 1 3 5 7
    CHECK(quantile7(v, 0.0) == 1.0);
    CHECK(quantile7(v, 1.0) == 7.0);
    CHECK(quantile7(v, 0.25) == doctest::Approx(2.5));  // h = 0.75 -> 1 + 0.75*2
    CHECK(quantile7(v, 0.75) == doctest::Approx(5.5));  // h = 2.25 -> 5 + 0.25*2
    CHECK(quantile7(v, 0.5) == doctest::Approx(4.0));
  }

  TEST_CASE("upper whisker is Q75 + 1.5 IQR") {
    const std::vector<double> v{7, 1, 3, 5};
    CHECK(upper_whisker(v) == doctest::Approx(5.5 + 1.5 * 3.0));
    const std::vector<double> same{2, 2, 2};
    CHECK(upper_whisker(same) == 2.0);
  }

  TEST_CASE("mean and sample sd") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(mean(v) == 5.0);
    CHECK(sample_sd(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
    const std::vector<double> one{3};
    CHECK(sample_sd(one) == 0.0);
  }

  TEST_CASE("column scaling centers constant columns only") {
    Matrix x(3, 2, std::vector<double>{1, 5, 2, 5, 3, 5});
    const auto s = ColumnScaling::fit(x);
    CHECK(s.means == std::vector<double>{2, 5});
    CHECK(s.sds[0] == 1.0);
    CHECK(s.sds[1] == 0.0);
    const Matrix z = s.apply(x);
    CHECK(z(0, 0) == -1.0);
    CHECK(z(2, 1) == 0.0);
  }

  TEST_CASE("derived seeds differ by label and index and are stable") {
    std::set<std::uint64_t> seen;
    for (const char* label : {"a", "b", "rf-tree", "random_kfold"})
      for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(42, label, i));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(42, "rf-tree", 3) == derive_seed(42, "rf-tree", 3));
    CHECK(derive_seed(42, "rf-tree", 3) != derive_seed(43, "rf-tree", 3));
  }

  TEST_CASE("rng distributions") {
    Rng rng(5);
    std::vector<std::size_t> counts(7, 0);
    double s = 0.0, s2 = 0.0;
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
      ++counts[rng.below(7)];
      const double z = rng.normal();
      s += z;
      s2 += z * z;
      const double u = rng.uniform();
      CHECK_FALSE((u < 0.0 || u >= 1.0));
    }
    for (auto c : counts) CHECK(std::abs(static_cast<double>(c) - n / 7.0) < 400.0);
    CHECK(std::abs(s / n) < 0.02);
    CHECK(std::abs(s2 / n - 1.0) < 0.03);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    rng.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  }
}
