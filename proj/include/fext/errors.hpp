#pragma once
#include <stdexcept>
#include <string>

namespace fext {

struct AlgebraError : std::runtime_error {
  explicit AlgebraError(const std::string& m) : std::runtime_error(m) {}
};

struct ZeroDenominator : AlgebraError {
  ZeroDenominator() : AlgebraError("zero denominator") {}
};

struct DivisionByZero : AlgebraError {
  DivisionByZero() : AlgebraError("division by zero") {}
};

// Dynamic evaluation: an inversion met a zero divisor, so some tower modulus
// is reducible. Carries the offending step and a proper factor.
struct ReducibleModulus : AlgebraError {
  std::string step;
  std::string factor;
  ReducibleModulus(std::string s, std::string f)
      : AlgebraError("reducible modulus at step '" + s + "', proper factor: " + f),
        step(std::move(s)), factor(std::move(f)) {}
};

struct DimensionMismatch : AlgebraError {
  DimensionMismatch() : AlgebraError("ambient dimension mismatch") {}
};

struct UnsupportedBase : AlgebraError {
  explicit UnsupportedBase(const std::string& m) : AlgebraError("unsupported base: " + m) {}
};

struct TowerMismatch : AlgebraError {
  TowerMismatch() : AlgebraError("elements of different towers never mix") {}
};

struct NotABasis : AlgebraError {
  NotABasis() : AlgebraError("given family is not a module basis") {}
};

struct NoUnitFound : AlgebraError {
  NoUnitFound() : AlgebraError("no invertible element found within the search budget") {}
};

struct NotContainingL : AlgebraError {
  NotContainingL() : AlgebraError("algebra does not contain the field image") {}
};

struct NotNormalized : AlgebraError {
  NotNormalized() : AlgebraError("group matrices do not normalize the coefficient algebra") {}
};

struct InconsistentTheorems : AlgebraError {
  explicit InconsistentTheorems(const std::string& m)
      : AlgebraError("equivalent criteria disagree: " + m) {}
};

struct GroupTooLarge : AlgebraError {
  GroupTooLarge() : AlgebraError("group too large for lattice enumeration") {}
};

struct NotNormalSubfield : AlgebraError {
  NotNormalSubfield() : AlgebraError("subfield is not normal over the base") {}
};

struct NotPurelyInseparable : AlgebraError {
  NotPurelyInseparable() : AlgebraError("extension is not purely inseparable") {}
};

struct NotAField : AlgebraError {
  explicit NotAField(const std::string& m) : AlgebraError("not a field: " + m) {}
};

struct NotFinite : AlgebraError {
  NotFinite() : AlgebraError("dependence search exceeded the ambient degree bound") {}
};

struct UnsupportedAmbient : AlgebraError {
  explicit UnsupportedAmbient(const std::string& m) : AlgebraError("unsupported ambient: " + m) {}
};

struct NoGoodSpecialization : AlgebraError {
  explicit NoGoodSpecialization(const std::string& m)
      : AlgebraError("no good specialization: " + m) {}
};

struct LiftDivergence : AlgebraError {
  LiftDivergence() : AlgebraError("lift diverged: non-simple specialized root at every tried point") {}
};

struct ParseError : AlgebraError {
  size_t line, col;
  ParseError(size_t ln, size_t cl, const std::string& m)
      : AlgebraError("parse error at " + std::to_string(ln) + ":" + std::to_string(cl) + ": " + m),
        line(ln), col(cl) {}
};

struct UnknownCheck : AlgebraError {
  explicit UnknownCheck(const std::string& name) : AlgebraError("unknown check: " + name) {}
};

}  // namespace fext
