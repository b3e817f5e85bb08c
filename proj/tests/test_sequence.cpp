#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "restartlab/sequence.hpp"

using namespace restartlab;

namespace {

// Memoized reference implementation straight from the recursion, independent
// of the iterative production code.
std::uint64_t luby_oracle(std::uint64_t k) {
  static std::map<std::uint64_t, std::uint64_t> memo;
  if (auto it = memo.find(k); it != memo.end()) return it->second;
  std::uint64_t result = 0;
  for (int i = 1; i < 63; ++i) {
    const std::uint64_t block_end = (std::uint64_t{1} << i) - 2;
    if (k == block_end) {
      result = std::uint64_t{1} << (i - 1);
      break;
    }
    if (k < block_end) {
      result = luby_oracle(k - ((std::uint64_t{1} << (i - 1)) - 1));
      break;
    }
  }
  memo[k] = result;
  return result;
}

}  // namespace

TEST_CASE("luby prefix") {
  const std::vector<std::uint64_t> expected = {1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8};
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(luby_value_u64(k) == expected[k]);
}

TEST_CASE("luby matches the memoized recursion for k < 2^16") {
  for (std::uint64_t k = 0; k < (1u << 16); ++k) {
    REQUIRE(luby_value_u64(k) == luby_oracle(k));
  }
}

TEST_CASE("luby block ends") {
  for (int i = 1; i <= 20; ++i)
    CHECK(luby_value_u64((std::uint64_t{1} << i) - 2) == (std::uint64_t{1} << (i - 1)));
}

TEST_CASE("luby values are powers of two and the running max completes each block") {
  std::uint64_t running_max = 0;
  int next_block = 1;
  for (std::uint64_t k = 0; k <= (1u << 20) - 2; ++k) {
    const std::uint64_t v = luby_value_u64(k);
    CHECK((v & (v - 1)) == 0);
    running_max = std::max(running_max, v);
    if (k == (std::uint64_t{1} << next_block) - 2) {
      CHECK(running_max == (std::uint64_t{1} << (next_block - 1)));
      ++next_block;
    }
  }
}

TEST_CASE("luby prefix sums grow as Theta(2^i i)") {
  // sum over the full block i equals i 2^{i-1}; check the numeric slope.
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k <= (std::uint64_t{1} << i) - 2; ++k) sum += static_cast<double>(luby_value_u64(k));
    CHECK(sum == doctest::Approx(static_cast<double>(i) * std::pow(2.0, i - 1)));
    if (i > 1) CHECK(sum / prev == doctest::Approx(2.0 * i / (i - 1)));  // -> 2
    prev = sum;
  }
}

TEST_CASE("geometric quantile examples") {
  CHECK(geometric_quantile_value(1.0, 3) == doctest::Approx(8.0));
  CHECK(geometric_quantile_value(0.5, 2) == doctest::Approx(16.0 / 9.0));
  CHECK(geometric_quantile_value(0x1p-20, 0) == 1.0);
}

TEST_CASE("geometric quantile has a constant ratio") {
  for (double q : {1.0, 0.5, 0.125, 0x1p-10}) {
    const double ratio = 1.0 / (1.0 - 0.5 * q);
    for (std::size_t k = 0; k + 1 < 100; ++k) {
      const double a = geometric_quantile_value(q, k);
      const double b = geometric_quantile_value(q, k + 1);
      CHECK(b / a == doctest::Approx(ratio).epsilon(1e-12));
      CHECK(b > a);
    }
  }
}

TEST_CASE("geometric quantile saturates on overflow") {
  bool overflow = false;
  const double v = geometric_quantile_value(0x1p-10, 3'000'000, &overflow);
  CHECK(overflow);
  CHECK(v == kMaxFiniteTime);
  overflow = true;
  geometric_quantile_value(0.5, 3, &overflow);
  CHECK(!overflow);
}

TEST_CASE("constant sequence") {
  const auto s = CutoffSequence::constant(5.0);
  CHECK(s.at(0) == 5.0);
  CHECK(s.at(1'000'000'000) == 5.0);
  CHECK(CutoffSequence::constant(1.0).at(3) == 1.0);
}

TEST_CASE("explicit sequence repeats its last element") {
  const auto s = CutoffSequence::explicit_list({1.0, 2.0, 3.0});
  CHECK(s.at(2) == 3.0);
  CHECK(s.at(99) == 3.0);
}

TEST_CASE("all sequences emit values >= 1") {
  const CutoffSequence seqs[] = {CutoffSequence::luby(), CutoffSequence::geometric_quantile(0x1p-6),
                                 CutoffSequence::constant(1.0),
                                 CutoffSequence::explicit_list({2.0, 1.0})};
  for (const auto& s : seqs)
    for (std::size_t k = 0; k < 4096; ++k) CHECK(s.at(k) >= 1.0);
}

TEST_CASE("sequence constructors validate their parameters") {
  CHECK_THROWS_AS(CutoffSequence::geometric_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(CutoffSequence::geometric_quantile(1.5), std::domain_error);
  CHECK_THROWS_AS(CutoffSequence::constant(0.5), std::domain_error);
  CHECK_THROWS_AS(CutoffSequence::explicit_list({}), std::domain_error);
  CHECK_THROWS_AS(CutoffSequence::explicit_list({0.25}), std::domain_error);
}
