#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sbpg::learn {

/// One observation of a stacked game at a support cell.
struct Sample {
  double leader_action = 0.0;
  double follower_action = 0.0;
  double leader_utility = 0.0;
  double follower_utility = 0.0;
};

enum class Role { leader, follower };

/// Exponent pair (j, m) of the monomial a_L^j * a_F^m.
using Monomial = std::pair<int, int>;

/// Bivariate polynomial surrogate over the full basis {a_L^j a_F^m : j+m <= n}.
/// Basis order follows total degree; within degree d it is a_L^d, a_F^d,
/// then the mixed terms a_L^(d-1) a_F, ..., a_L a_F^(d-1). For n = 2 this is
/// (1, a_L, a_F, a_L^2, a_F^2, a_L a_F).
class PolyModel {
 public:
  PolyModel() = default;
  /// Throws std::invalid_argument if the coefficient count does not match.
  PolyModel(int degree, std::vector<double> coefficients);

  static std::size_t basis_size(int degree);
  static std::vector<Monomial> basis(int degree);

  int degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coef_; }

  double value(double a_leader, double a_follower) const;
  double d_leader(double a_leader, double a_follower) const;
  double d_follower(double a_leader, double a_follower) const;
  double d2_follower(double a_leader, double a_follower) const;
  /// Mixed partial d^2 / (d a_F d a_L).
  double d2_mixed(double a_leader, double a_follower) const;

 private:
  double eval(double x, double y, int dx, int dy) const;

  int degree_ = 0;
  std::vector<double> coef_;
};

/// Least squares over the monomial basis through the normal equation
/// (X^T X + ridge I) beta = X^T y. Throws SingularFitError when there are
/// fewer samples than basis functions or the system is rank deficient.
PolyModel fit_poly(std::span<const Sample> samples, Role role, int degree, double ridge);

}  // namespace sbpg::learn
