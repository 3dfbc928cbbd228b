#include "hypofrac/poly.hpp"

#include <algorithm>
#include <sstream>

namespace hypofrac::poly {

Polynomial Polynomial::constant(std::size_t vars, double c) {
  Polynomial p(vars);
  p.add_term(c, Exponents(vars, 0));
  return p;
}

Polynomial Polynomial::variable(std::size_t vars, std::size_t i) {
  Exponents e(vars, 0);
  e.at(i) = 1;
  return monomial(vars, 1.0, std::move(e));
}

Polynomial Polynomial::monomial(std::size_t vars, double c, Exponents e) {
  Polynomial p(vars);
  p.add_term(c, e);
  return p;
}

void Polynomial::add_term(double c, const Exponents& e) {
  if (e.size() != vars_) throw DomainError("polynomial term has wrong number of exponents");
  if (c == 0.0) return;
  auto [it, fresh] = terms_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

unsigned Polynomial::degree() const {
  unsigned best = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    best = std::max(best, s);
  }
  return best;
}

double Polynomial::eval(const Vec& x) const {
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) m *= x[static_cast<Eigen::Index>(i)];
    }
    total += m;
  }
  return total;
}

Polynomial Polynomial::derivative(std::size_t i) const {
  Polynomial out(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    f[i] -= 1;
    out.add_term(c * e[i], f);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(c, e);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(-c, e);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.vars() != b.vars()) throw DomainError("polynomial product: variable count mismatch");
  Polynomial out(a.vars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(ca * cb, e);
    }
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

VectorField zero_field(std::size_t n) { return VectorField(n, Polynomial(n)); }

bool is_zero(const VectorField& v) {
  return std::all_of(v.begin(), v.end(), [](const Polynomial& p) { return p.is_zero(); });
}

Vec eval(const VectorField& v, const Vec& x) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].eval(x);
  return out;
}

Mat jacobian(const VectorField& v, const Vec& x) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Mat out = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = v[static_cast<std::size_t>(i)];
    // d/dx_j of each monomial, evaluated directly
    for (const auto& [e, c] : p.terms()) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const unsigned ej = e[static_cast<std::size_t>(j)];
        if (ej == 0) continue;
        double m = c * ej;
        for (Eigen::Index k = 0; k < n; ++k) {
          unsigned pw = e[static_cast<std::size_t>(k)] - (k == j ? 1u : 0u);
          for (unsigned q = 0; q < pw; ++q) m *= x[k];
        }
        out(i, j) += m;
      }
    }
  }
  return out;
}

std::vector<std::vector<Polynomial>> jacobian(const VectorField& v) {
  const std::size_t n = v.size();
  std::vector<std::vector<Polynomial>> out(n, std::vector<Polynomial>(n, Polynomial(n)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = v[i].derivative(j);
  }
  return out;
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  if (v.size() != w.size()) throw DomainError("lie_bracket: fields live on different spaces");
  const std::size_t n = v.size();
  VectorField out = zero_field(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i] += w[i].derivative(j) * v[j];
      out[i] -= v[i].derivative(j) * w[j];
    }
  }
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.at(i);
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.at(i);
  return out;
}

VectorField operator*(double s, const VectorField& a) {
  VectorField out = a;
  for (auto& p : out) p *= s;
  return out;
}

// ---------------------------------------------------------------------------

void VectorFieldSystem::validate() const {
  if (n == 0) throw DomainError("system: state dimension n must be positive");
  if (fields.size() != d) {
    throw DomainError("system: expected " + std::to_string(d) + " diffusion fields, got " +
                      std::to_string(fields.size()));
  }
  auto check = [&](const VectorField& v, const std::string& name) {
    if (v.size() != n) {
      throw DomainError("system: field " + name + " has " + std::to_string(v.size()) +
                        " components, expected " + std::to_string(n));
    }
    for (const auto& p : v) {
      if (p.vars() != n) throw DomainError("system: field " + name + " uses wrong variable count");
    }
  };
  if (drift) check(*drift, "V0");
  for (std::size_t i = 0; i < fields.size(); ++i) check(fields[i], "V" + std::to_string(i + 1));
  if (x0 && x0->size() != n) throw DomainError("system: x0 has wrong length");
}

VectorField VectorFieldSystem::letter(std::size_t i) const {
  if (i == 0) return drift ? *drift : zero_field(n);
  return fields.at(i - 1);
}

bool VectorFieldSystem::unbounded() const {
  auto nonconst = [](const VectorField& v) {
    return std::any_of(v.begin(), v.end(), [](const Polynomial& p) { return p.degree() > 0; });
  };
  if (drift && nonconst(*drift)) return true;
  return std::any_of(fields.begin(), fields.end(), nonconst);
}

Vec VectorFieldSystem::start() const {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(n));
  if (x0) {
    for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = (*x0)[i];
  }
  return out;
}

namespace systems {

namespace {
Polynomial c(std::size_t n, double v) { return Polynomial::constant(n, v); }
Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial zero(std::size_t n) { return Polynomial(n); }
}  // namespace

VectorFieldSystem elliptic(std::size_t n) {
  VectorFieldSystem s;
  s.n = n;
  s.d = n;
  for (std::size_t i = 0; i < n; ++i) {
    VectorField v = zero_field(n);
    v[i] = c(n, 1.0);
    s.fields.push_back(v);
  }
  return s;
}

VectorFieldSystem heisenberg() {
  VectorFieldSystem s;
  s.n = 3;
  s.d = 2;
  s.fields.push_back({c(3, 1.0), zero(3), zero(3)});
  s.fields.push_back({zero(3), c(3, 1.0), x(3, 0)});
  return s;
}

VectorFieldSystem grushin() {
  VectorFieldSystem s;
  s.n = 2;
  s.d = 2;
  s.fields.push_back({c(2, 1.0), zero(2)});
  s.fields.push_back({zero(2), x(2, 0)});
  return s;
}

VectorFieldSystem scalar_linear() {
  VectorFieldSystem s;
  s.n = 1;
  s.d = 1;
  s.fields.push_back({x(1, 0)});
  s.x0 = std::vector<double>{1.0};
  return s;
}

VectorFieldSystem scalar_additive() {
  VectorFieldSystem s;
  s.n = 1;
  s.d = 1;
  s.fields.push_back({c(1, 1.0)});
  return s;
}

VectorFieldSystem rank_deficient() {
  VectorFieldSystem s;
  s.n = 2;
  s.d = 2;
  s.fields.push_back({c(2, 1.0), zero(2)});
  s.fields.push_back({zero(2), zero(2)});
  return s;
}

VectorFieldSystem quadratic() {
  VectorFieldSystem s;
  s.n = 2;
  s.d = 2;
  s.fields.push_back({c(2, 1.0), x(2, 1) * x(2, 1)});
  s.fields.push_back({x(2, 0), c(2, 1.0)});
  return s;
}

}  // namespace systems

}  // namespace hypofrac::poly
