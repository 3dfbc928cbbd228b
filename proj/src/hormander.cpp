#include "hypofrac/hormander.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "hypofrac/rng.hpp"

namespace hypofrac::hormander {

std::string to_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w[i]);
  }
  return s + ")";
}

std::string to_string(Mode m) { return m == Mode::weak ? "weak" : "strong"; }

Mode parse_mode(const std::string& name) {
  if (name == "weak") return Mode::weak;
  if (name == "strong") return Mode::strong;
  throw DomainError("unknown mode '" + name + "' (expected weak|strong)");
}

namespace {

std::string key(const VectorField& v) {
  std::string s;
  char buf[64];
  for (const auto& p : v) {
    for (const auto& [e, c] : p.terms()) {
      std::snprintf(buf, sizeof buf, "%a:", c);
      s += buf;
      for (unsigned k : e) s += std::to_string(k) + ",";
      s += ";";
    }
    s += "|";
  }
  return s;
}

}  // namespace

std::vector<BracketField> bracket_sets(const VectorFieldSystem& sys, std::size_t max_level,
                                       Mode mode, std::size_t word_cap) {
  sys.validate();
  if (max_level == 0) throw DomainError("bracket_sets: level cap must be at least 1");
  const bool weak = mode == Mode::weak;
  const double d = static_cast<double>(sys.d);
  double total = 0.0, layer = 1.0;
  for (std::size_t k = 1; k <= max_level; ++k) {
    total += (weak ? d + 1.0 : d) * layer;
    layer *= d;
    if (total > static_cast<double>(word_cap)) {
      throw NumericalError("bracket_sets: " + std::to_string(static_cast<long long>(total)) +
                           "+ words exceed the cap of " + std::to_string(word_cap) +
                           "; lower the level or raise the cap");
    }
  }

  std::vector<BracketField> out;
  std::set<std::string> seen;
  auto emit = [&](const Word& w, const VectorField& f) {
    if (poly::is_zero(f)) return false;
    if (!seen.insert(key(f)).second) return false;
    out.push_back({w, f});
    return true;
  };

  // Diffusion-only words feed the recursion; duplicates and zero fields are
  // dropped since their extensions would be duplicates or zero as well.
  std::vector<BracketField> prev;
  for (std::size_t k = 1; k <= max_level; ++k) {
    std::vector<BracketField> level;
    std::vector<BracketField> next_prev;
    if (k == 1) {
      if (weak) level.push_back({{0u}, sys.letter(0)});
      for (std::size_t i = 1; i <= sys.d; ++i) {
        level.push_back({{static_cast<unsigned>(i)}, sys.fields[i - 1]});
        next_prev.push_back(level.back());
      }
    } else {
      const unsigned first = weak ? 0u : 1u;
      for (unsigned i = first; i <= sys.d; ++i) {
        const VectorField vi = sys.letter(i);
        for (const auto& w : prev) {
          Word word{i};
          word.insert(word.end(), w.word.begin(), w.word.end());
          BracketField bf{word, poly::lie_bracket(vi, w.field)};
          if (i != 0) next_prev.push_back(bf);
          level.push_back(std::move(bf));
        }
      }
    }
    std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) { return a.word < b.word; });
    for (const auto& bf : level) emit(bf.word, bf.field);
    prev.clear();
    std::set<std::string> local;
    std::sort(next_prev.begin(), next_prev.end(), [](const auto& a, const auto& b) { return a.word < b.word; });
    for (auto& bf : next_prev) {
      if (poly::is_zero(bf.field)) continue;
      if (!local.insert(key(bf.field)).second) continue;
      prev.push_back(std::move(bf));
    }
  }
  return out;
}

std::size_t numerical_rank(const Mat& columns) {
  if (columns.size() == 0) return 0;
  const Eigen::JacobiSVD<Mat> svd(columns);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double tau = static_cast<double>(columns.rows()) * s[0] * std::ldexp(1.0, -40);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tau) ++r;
  }
  return r;
}

namespace {

// Greedy column selection: returns the rank after each field and the words that raised it.
struct SpanState {
  Mat basis;
  std::size_t rank = 0;

  bool offer(const Vec& v) {
    Mat trial(v.size(), basis.cols() + 1);
    if (basis.cols()) trial.leftCols(basis.cols()) = basis;
    trial.col(basis.cols()) = v;
    const std::size_t r = numerical_rank(trial);
    if (r > rank) {
      basis = std::move(trial);
      rank = r;
      return true;
    }
    return false;
  }
};

std::size_t word_length(const Word& w) { return w.size(); }

}  // namespace

HormanderReport hormander_check(const VectorFieldSystem& sys, const Vec& x, std::size_t max_level,
                                Mode mode, std::size_t word_cap) {
  if (static_cast<std::size_t>(x.size()) != sys.n) throw DomainError("hormander_check: point has wrong length");
  const auto fields = bracket_sets(sys, max_level, mode, word_cap);
  HormanderReport rep;
  SpanState span;
  std::size_t idx = 0;
  for (std::size_t k = 1; k <= max_level; ++k) {
    for (; idx < fields.size() && word_length(fields[idx].word) == k; ++idx) {
      if (span.rank == sys.n) break;
      if (span.offer(poly::eval(fields[idx].field, x))) rep.witnesses.push_back(fields[idx].word);
    }
    rep.ranks.push_back(span.rank);
    if (span.rank == sys.n) {
      rep.satisfied = true;
      rep.n_star = k;
      break;
    }
  }
  return rep;
}

namespace {

struct Flag {
  std::vector<std::size_t> growth;
  std::vector<std::vector<Word>> witnesses;
  bool full = false;
};

Flag compute_flag(const std::vector<BracketField>& fields, std::size_t n, const Vec& x,
                  std::size_t level_cap) {
  Flag f;
  SpanState span;
  std::size_t idx = 0;
  for (std::size_t k = 1; k <= level_cap; ++k) {
    std::vector<Word> wit;
    for (; idx < fields.size() && fields[idx].word.size() == k; ++idx) {
      if (span.rank == n) continue;
      if (span.offer(poly::eval(fields[idx].field, x))) wit.push_back(fields[idx].word);
    }
    f.growth.push_back(span.rank);
    f.witnesses.push_back(std::move(wit));
    if (span.rank == n) {
      f.full = true;
      break;
    }
  }
  return f;
}

}  // namespace

std::vector<std::size_t> growth_vector(const VectorFieldSystem& sys, const Vec& x,
                                       std::size_t level_cap) {
  const auto fields = bracket_sets(sys, level_cap, Mode::strong);
  return compute_flag(fields, sys.n, x, level_cap).growth;
}

RegularityReport regular_point_check(const VectorFieldSystem& sys, const Vec& x, double radius,
                                     std::size_t n_samples, std::uint64_t seed,
                                     std::size_t level_cap) {
  if (!(radius > 0.0)) throw DomainError("regular_point_check: radius must be positive");
  if (static_cast<std::size_t>(x.size()) != sys.n) throw DomainError("regular_point_check: point has wrong length");
  const auto fields = bracket_sets(sys, level_cap, Mode::strong);
  RegularityReport rep;
  rep.growth = compute_flag(fields, sys.n, x, level_cap).growth;
  const auto n = x.size();
  for (std::size_t s = 0; s < n_samples; ++s) {
    rng::Stream stream(seed, "regular-point", s);
    Vec dir(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) dir[i] = stream.gaussian();
    } while (dir.norm() == 0.0);
    const double rad = radius * std::pow(stream.uniform(), 1.0 / static_cast<double>(n));
    const Vec y = x + rad * dir / dir.norm();
    const auto g = compute_flag(fields, sys.n, y, level_cap).growth;
    ++rep.samples;
    if (g != rep.growth) {
      rep.regular = false;
      rep.witness = std::vector<double>(y.data(), y.data() + n);
      rep.witness_growth = g;
      break;
    }
  }
  return rep;
}

FlagReport strong_hormander_flag(const VectorFieldSystem& sys, const Vec& x, std::size_t level_cap,
                                 double radius, std::size_t n_samples, std::uint64_t seed) {
  if (level_cap == 0) throw DomainError("strong_hormander_flag: level cap must be at least 1");
  if (static_cast<std::size_t>(x.size()) != sys.n) throw DomainError("strong_hormander_flag: point has wrong length");
  const auto fields = bracket_sets(sys, level_cap, Mode::strong);
  const auto flag = compute_flag(fields, sys.n, x, level_cap);
  FlagReport rep;
  rep.point.assign(x.data(), x.data() + x.size());
  rep.growth = flag.growth;
  rep.witnesses = flag.witnesses;
  rep.full_rank = flag.full;
  rep.level_cap = level_cap;
  if (flag.full) {
    rep.r = flag.growth.size();
    std::size_t d = 0, shown = 0, prev = 0;
    for (std::size_t k = 1; k <= rep.r; ++k) {
      d += k * (flag.growth[k - 1] - prev);
      shown += k * flag.growth[k - 1];
      prev = flag.growth[k - 1];
    }
    rep.D = d;
    rep.D_displayed = shown;
    rep.regular = regular_point_check(sys, x, radius, n_samples, seed, level_cap).regular;
  }
  return rep;
}

}  // namespace hypofrac::hormander
