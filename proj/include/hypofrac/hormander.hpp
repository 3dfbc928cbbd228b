#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"
#include "hypofrac/poly.hpp"

namespace hypofrac::hormander {

using poly::VectorField;
using poly::VectorFieldSystem;

/// Letters index fields (0 = drift). V_I = [V_{i1}, [V_{i2}, ..., [V_{i(k-1)}, V_{ik}]...]].
using Word = std::vector<unsigned>;
std::string to_string(const Word& w);

struct BracketField {
  Word word;
  VectorField field;
};

/// weak: first letter in {0..d}, the rest in {1..d}. strong: letters in {1..d}.
enum class Mode { weak, strong };
std::string to_string(Mode m);
Mode parse_mode(const std::string& name);

/// All nonzero, pairwise distinct bracket fields with words of length <= max_level,
/// ordered by length then lexicographically. Throws NumericalError when the
/// number of words to enumerate exceeds `word_cap`.
std::vector<BracketField> bracket_sets(const VectorFieldSystem& sys, std::size_t max_level,
                                       Mode mode = Mode::weak, std::size_t word_cap = 100000);

/// Numerical rank with threshold n * sigma_max * 2^-40.
std::size_t numerical_rank(const Mat& columns);

struct HormanderReport {
  bool satisfied = false;
  std::size_t n_star = 0;            // 0 when not satisfied up to max_level
  std::vector<std::size_t> ranks;    // rank of span at levels 1..max_level (stops at full rank)
  std::vector<Word> witnesses;       // words that raised the rank, in order
};

HormanderReport hormander_check(const VectorFieldSystem& sys, const Vec& x, std::size_t max_level,
                                Mode mode = Mode::weak, std::size_t word_cap = 100000);

struct FlagReport {
  std::vector<double> point;
  std::vector<std::size_t> growth;          // dim D^k(x), k = 1..min(r, cap)
  std::size_t r = 0;                        // first full level, 0 if not reached
  bool full_rank = false;
  std::optional<bool> regular;              // unset when the rank never fills
  std::optional<std::size_t> D;             // sum k (dim D^k - dim D^{k-1})
  std::optional<std::size_t> D_displayed;   // sum k dim D^k (alternative convention)
  std::vector<std::vector<Word>> witnesses; // per level
  std::size_t level_cap = 0;
};

/// Canonical flag from diffusion-only words. The drift is ignored.
FlagReport strong_hormander_flag(const VectorFieldSystem& sys, const Vec& x, std::size_t level_cap,
                                 double radius = 1e-3, std::size_t n_samples = 16,
                                 std::uint64_t seed = 7);

/// Growth vector only (no regularity probe).
std::vector<std::size_t> growth_vector(const VectorFieldSystem& sys, const Vec& x,
                                       std::size_t level_cap);

struct RegularityReport {
  bool regular = true;
  std::vector<std::size_t> growth;
  std::optional<std::vector<double>> witness;   // a sampled point with a different growth vector
  std::optional<std::vector<std::size_t>> witness_growth;
  std::size_t samples = 0;
};

/// Probabilistic: compares growth vectors at x and at points drawn uniformly from the ball.
RegularityReport regular_point_check(const VectorFieldSystem& sys, const Vec& x, double radius,
                                     std::size_t n_samples, std::uint64_t seed = 7,
                                     std::size_t level_cap = 6);

}  // namespace hypofrac::hormander
