#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cqft/errors.hpp"
#include "cqft/grassmann_sign.hpp"

using namespace cqft;

namespace {

GradedVar F(const char* id) { return {id, Grade::fermi}; }
GradedVar B(const char* id) { return {id, Grade::bose}; }

// Bubble-sorts `target` back into `source` order one adjacent swap at a time,
// flipping the sign whenever two fermionic neighbours are exchanged.
int transposition_oracle(const std::vector<GradedVar>& source, std::vector<GradedVar> target) {
  auto rank = [&](const GradedVar& v) {
    return std::find(source.begin(), source.end(), v) - source.begin();
  };
  int sign = 1;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < target.size(); ++i) {
      if (rank(target[i]) > rank(target[i + 1])) {
        if (target[i].grade == Grade::fermi && target[i + 1].grade == Grade::fermi) sign = -sign;
        std::swap(target[i], target[i + 1]);
        swapped = true;
      }
    }
  }
  return sign;
}

std::vector<GradedVar> make_vars(int n, unsigned fermi_mask) {
  std::vector<GradedVar> v;
  for (int i = 0; i < n; ++i)
    v.push_back({"v" + std::to_string(i), (fermi_mask >> i) & 1u ? Grade::fermi : Grade::bose});
  return v;
}

std::vector<GradedVar> permuted(const std::vector<GradedVar>& v, const std::vector<int>& perm) {
  std::vector<GradedVar> out;
  for (int p : perm) out.push_back(v[p]);
  return out;
}

}  // namespace

TEST_CASE("identity partition has sign +1") {
  Partition p{{F("a"), B("b"), F("c")}, {{F("a")}, {B("b"), F("c")}}};
  CHECK(parity_sign(p) == 1);
}

TEST_CASE("adjacent fermionic swap has sign -1") {
  Partition p{{F("a"), F("b")}, {{F("b"), F("a")}}};
  CHECK(parity_sign(p) == -1);
}

TEST_CASE("mixed list agrees with the transposition oracle") {
  std::vector<GradedVar> src{F("f1"), B("b1"), F("f2"), F("f3")};
  std::vector<GradedVar> dst{F("f3"), B("b1"), F("f1"), F("f2")};
  Partition p{src, {{dst[0], dst[1]}, {dst[2], dst[3]}}};
  CHECK(parity_sign(p) == transposition_oracle(src, dst));
  CHECK(parity_sign(p) == 1);
}

TEST_CASE("validation rejects malformed partitions") {
  CHECK_THROWS_AS(validate(Partition{{F("a"), F("a")}, {{F("a"), F("a")}}}), ValidationError);
  CHECK_THROWS_AS(validate(Partition{{F("a"), F("b")}, {{F("a")}}}), ValidationError);
  CHECK_THROWS_AS(validate(Partition{{F("a")}, {{F("a"), F("z")}}}), ValidationError);
  CHECK_THROWS_AS(validate(Partition{{F("a")}, {{B("a")}}}), ValidationError);
}

TEST_CASE("every permutation of up to six variables matches the oracle") {
  for (int n = 1; n <= 6; ++n) {
    for (unsigned mask = 0; mask < (1u << n); mask += (n > 4 ? 5 : 1)) {
      const auto vars = make_vars(n, mask);
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        const auto target = permuted(vars, perm);
        REQUIRE(reorder_sign(vars, target) == transposition_oracle(vars, target));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST_CASE("composition, involution and bose transparency") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto vars = make_vars(n, static_cast<unsigned>(rng()));
    std::vector<int> p1(n), p2(n);
    std::iota(p1.begin(), p1.end(), 0);
    std::iota(p2.begin(), p2.end(), 0);
    std::shuffle(p1.begin(), p1.end(), rng);
    std::shuffle(p2.begin(), p2.end(), rng);
    const auto mid = permuted(vars, p1);
    const auto end = permuted(mid, p2);
    CHECK(reorder_sign(vars, end) == reorder_sign(vars, mid) * reorder_sign(mid, end));
    CHECK(reorder_sign(vars, mid) * reorder_sign(mid, vars) == 1);

    // insert a boson at a random place in both lists
    auto with_b = vars;
    auto mid_b = mid;
    const GradedVar extra{"extra", Grade::bose};
    with_b.insert(with_b.begin() + static_cast<long>(rng() % (n + 1)), extra);
    mid_b.insert(mid_b.begin() + static_cast<long>(rng() % (n + 1)), extra);
    CHECK(reorder_sign(with_b, mid_b) == reorder_sign(vars, mid));
  }
}

TEST_CASE("permutation_sign counts only flagged entries") {
  const std::vector<int> perm{2, 0, 1};
  const std::vector<std::uint8_t> all{1, 1, 1};
  const std::vector<std::uint8_t> none{0, 0, 0};
  const std::vector<std::uint8_t> two{1, 0, 1};
  CHECK(permutation_sign(perm, all) == 1);
  CHECK(permutation_sign(perm, none) == 1);
  CHECK(permutation_sign(perm, two) == -1);
}
