#include "sbpg/learn/poly_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "sbpg/error.hpp"

namespace sbpg::learn {
namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// k! / (k - d)!, the factor produced by d derivatives of x^k.
double falling(int k, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= static_cast<double>(k - i);
  return r;
}

}  // namespace

std::size_t PolyModel::basis_size(int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  const auto n = static_cast<std::size_t>(degree);
  return (n + 1) * (n + 2) / 2;
}

std::vector<Monomial> PolyModel::basis(int degree) {
  std::vector<Monomial> out;
  out.reserve(basis_size(degree));
  out.emplace_back(0, 0);
  for (int d = 1; d <= degree; ++d) {
    out.emplace_back(d, 0);
    out.emplace_back(0, d);
    for (int m = 1; m < d; ++m) out.emplace_back(d - m, m);
  }
  return out;
}

PolyModel::PolyModel(int degree, std::vector<double> coefficients)
    : degree_(degree), coef_(std::move(coefficients)) {
  if (coef_.size() != basis_size(degree)) {
    throw std::invalid_argument("expected " + std::to_string(basis_size(degree)) +
                                " coefficients for degree " + std::to_string(degree) + ", got " +
                                std::to_string(coef_.size()));
  }
}

double PolyModel::eval(double x, double y, int dx, int dy) const {
  const auto terms = basis(degree_);
  double sum = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto [j, m] = terms[t];
    if (j < dx || m < dy || coef_[t] == 0.0) continue;
    sum += coef_[t] * falling(j, dx) * falling(m, dy) * ipow(x, j - dx) * ipow(y, m - dy);
  }
  return sum;
}

double PolyModel::value(double a_leader, double a_follower) const {
  return eval(a_leader, a_follower, 0, 0);
}
double PolyModel::d_leader(double a_leader, double a_follower) const {
  return eval(a_leader, a_follower, 1, 0);
}
double PolyModel::d_follower(double a_leader, double a_follower) const {
  return eval(a_leader, a_follower, 0, 1);
}
double PolyModel::d2_follower(double a_leader, double a_follower) const {
  return eval(a_leader, a_follower, 0, 2);
}
double PolyModel::d2_mixed(double a_leader, double a_follower) const {
  return eval(a_leader, a_follower, 1, 1);
}

PolyModel fit_poly(std::span<const Sample> samples, Role role, int degree, double ridge) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be >= 0");
  const auto terms = PolyModel::basis(degree);
  const auto p = static_cast<Eigen::Index>(terms.size());
  if (samples.size() < terms.size()) {
    throw SingularFitError("need at least " + std::to_string(terms.size()) + " samples, have " +
                           std::to_string(samples.size()));
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), p);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Sample& s = samples[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < p; ++c) {
      const auto [j, m] = terms[static_cast<std::size_t>(c)];
      x(r, c) = ipow(s.leader_action, j) * ipow(s.follower_action, m);
    }
    y(r) = role == Role::leader ? s.leader_utility : s.follower_utility;
  }

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = x.transpose() * y;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < p) {
    throw SingularFitError("Gram matrix rank " + std::to_string(lu.rank()) + " < " +
                           std::to_string(p));
  }
  Eigen::VectorXd beta = lu.solve(rhs);
  // One refinement pass recovers digits lost to the squared conditioning.
  beta += lu.solve(rhs - gram * beta);
  if (!beta.allFinite()) throw SingularFitError("non-finite regression coefficients");

  return PolyModel(degree, std::vector<double>(beta.data(), beta.data() + beta.size()));
}

}  // namespace sbpg::learn
