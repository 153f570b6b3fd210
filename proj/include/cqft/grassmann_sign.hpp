#pragma once

// Parity signs for reorderings of ordered variable lists carrying a
// Bose/Fermi grade. Only fermi-fermi inversions contribute.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cqft {

enum class Grade : int { bose = 0, fermi = 1 };

struct GradedVar {
  std::string id;
  Grade grade = Grade::bose;

  friend bool operator==(const GradedVar&, const GradedVar&) = default;
};

/// A source list split into ordered blocks; the concatenated blocks must be a
/// permutation of the source.
struct Partition {
  std::vector<GradedVar> source;
  std::vector<std::vector<GradedVar>> blocks;
};

/// Throws ValidationError on duplicate ids, missing or foreign variables, or
/// grades that disagree with the source.
void validate(const Partition& partition);

/// (-1)^(inversions among fermi variables between source order and the
/// concatenated block order).
[[nodiscard]] int parity_sign(const Partition& partition);

/// Sign of reordering `source` into `target` (same variables, new order).
[[nodiscard]] int reorder_sign(std::span<const GradedVar> source, std::span<const GradedVar> target);

/// Sign of the permutation `perm` (target position i holds source element perm[i])
/// restricted to the entries flagged fermionic.
[[nodiscard]] int permutation_sign(std::span<const int> perm, std::span<const std::uint8_t> fermionic);

}  // namespace cqft
