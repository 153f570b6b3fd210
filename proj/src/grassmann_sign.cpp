#include "cqft/grassmann_sign.hpp"

#include <unordered_map>

#include "cqft/errors.hpp"

namespace cqft {

namespace {

std::vector<int> positions_in_source(std::span<const GradedVar> source, std::span<const GradedVar> target) {
  std::unordered_map<std::string, int> index;
  index.reserve(source.size());
  for (int i = 0; i < static_cast<int>(source.size()); ++i) {
    if (!index.emplace(source[i].id, i).second) {
      throw ValidationError("duplicate variable '" + source[i].id + "' in source list");
    }
  }
  if (target.size() != source.size()) {
    throw ValidationError("reordered list has " + std::to_string(target.size()) + " variables, source has " +
                          std::to_string(source.size()));
  }
  std::vector<int> perm;
  perm.reserve(target.size());
  std::vector<bool> seen(source.size(), false);
  for (const auto& v : target) {
    auto it = index.find(v.id);
    if (it == index.end()) throw ValidationError("variable '" + v.id + "' not in source list");
    if (seen[it->second]) throw ValidationError("variable '" + v.id + "' appears twice");
    if (source[it->second].grade != v.grade) throw ValidationError("grade mismatch for variable '" + v.id + "'");
    seen[it->second] = true;
    perm.push_back(it->second);
  }
  return perm;
}

}  // namespace

int permutation_sign(std::span<const int> perm, std::span<const std::uint8_t> fermionic) {
  // O(n^2) inversion count; lists here are short.
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (!fermionic[perm[i]]) continue;
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (fermionic[perm[j]] && perm[j] < perm[i]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

int reorder_sign(std::span<const GradedVar> source, std::span<const GradedVar> target) {
  const auto perm = positions_in_source(source, target);
  std::vector<std::uint8_t> fermionic(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) fermionic[i] = source[i].grade == Grade::fermi;
  return permutation_sign(perm, fermionic);
}

void validate(const Partition& partition) {
  std::vector<GradedVar> concat;
  for (const auto& b : partition.blocks) concat.insert(concat.end(), b.begin(), b.end());
  (void)positions_in_source(partition.source, concat);
}

int parity_sign(const Partition& partition) {
  std::vector<GradedVar> concat;
  for (const auto& b : partition.blocks) concat.insert(concat.end(), b.begin(), b.end());
  return reorder_sign(partition.source, concat);
}

}  // namespace cqft
