#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypofrac/common.hpp"

namespace hypofrac::poly {

using Exponents = std::vector<unsigned>;

/// Sparse real polynomial in a fixed number of variables. Zero coefficients
/// are never stored, so structural equality is polynomial equality.
class Polynomial {
 public:
  explicit Polynomial(std::size_t vars = 0) : vars_(vars) {}

  static Polynomial constant(std::size_t vars, double c);
  static Polynomial variable(std::size_t vars, std::size_t i);
  static Polynomial monomial(std::size_t vars, double c, Exponents e);

  void add_term(double c, const Exponents& e);

  std::size_t vars() const noexcept { return vars_; }
  const std::map<Exponents, double>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  unsigned degree() const;

  double eval(const Vec& x) const;
  Polynomial derivative(std::size_t i) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }

  std::string to_string() const;

 private:
  std::size_t vars_;
  std::map<Exponents, double> terms_;
};

/// Component list of a polynomial vector field on R^n.
using VectorField = std::vector<Polynomial>;

VectorField zero_field(std::size_t n);
bool is_zero(const VectorField& v);
Vec eval(const VectorField& v, const Vec& x);
Mat jacobian(const VectorField& v, const Vec& x);
/// Symbolic Jacobian, entry (i, j) = d v_i / d x_j.
std::vector<std::vector<Polynomial>> jacobian(const VectorField& v);

/// [V, W] = DW V - DV W.
VectorField lie_bracket(const VectorField& v, const VectorField& w);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);

/// V0 (optional drift) and V1..Vd on R^n.
struct VectorFieldSystem {
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<VectorField> drift;
  std::vector<VectorField> fields;
  std::optional<std::vector<double>> x0;

  /// Checks component counts and variable counts; throws DomainError.
  void validate() const;
  /// Letter 0 is the drift (zero field if absent), letters 1..d the diffusion fields.
  VectorField letter(std::size_t i) const;
  bool unbounded() const;
  Vec start() const;
};

/// Canonical examples used by tests, benchmarks and the CLI.
namespace systems {
VectorFieldSystem elliptic(std::size_t n);
VectorFieldSystem heisenberg();
VectorFieldSystem grushin();
VectorFieldSystem scalar_linear();
VectorFieldSystem scalar_additive();
/// V1 = (1, 0), V2 = 0 on R^2.
VectorFieldSystem rank_deficient();
/// Non-nilpotent test system on R^2: V1 = (1, x2^2), V2 = (x1, 1).
VectorFieldSystem quadratic();
}  // namespace systems

}  // namespace hypofrac::poly
