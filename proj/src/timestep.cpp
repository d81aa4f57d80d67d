#include "graphrbm/timestep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "graphrbm/error.hpp"

namespace graphrbm {

Scheme Scheme::theta_method(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(Errc::InvalidArgument, "theta must lie in [0, 1]");
  return {Kind::Theta, theta};
}

std::string Scheme::name() const {
  switch (kind) {
    case Kind::ImplicitEuler: return "ie";
    case Kind::CrankNicolson: return "cn";
    case Kind::Theta: return "theta";
    case Kind::SemiImplicitEuler: return "siem";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name, double theta) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "ie") return Scheme::implicit_euler();
  if (s == "cn") return Scheme::crank_nicolson();
  if (s == "theta") return Scheme::theta_method(theta);
  if (s == "siem") return Scheme::semi_implicit_euler();
  throw Error(Errc::InvalidArgument, "unknown scheme '" + name + "' (expected ie, cn, theta or siem)");
}

namespace {

/// Rows of `m` at `rows`, columns kept if keep_col(col).
template <typename Keep>
SparseMatrix select(const SparseMatrix& m, const std::vector<int>& row_local, std::size_t nrows, Keep keep_col,
                    const std::vector<int>& col_local, std::size_t ncols) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (int col = 0; col < m.outerSize(); ++col) {
    if (!keep_col(col)) continue;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      const int r = row_local[static_cast<std::size_t>(it.row())];
      if (r >= 0) trip.emplace_back(r, col_local[static_cast<std::size_t>(col)], it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

StepOperator::StepOperator(const Scheme& scheme, double dt, const SparseMatrix& mass, const SparseMatrix& stiffness,
                           const SparseMatrix& lower_order, std::vector<bool> constrained)
    : dt_(dt), load_weight_(scheme.load_weight()), constrained_(std::move(constrained)) {
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "time step must be positive");
  const std::size_t n = constrained_.size();
  if (static_cast<std::size_t>(mass.rows()) != n)
    throw Error(Errc::InvalidArgument, "operator size does not match the constraint mask");

  SparseMatrix implicit_op, explicit_op;
  if (scheme.kind == Scheme::Kind::SemiImplicitEuler) {
    implicit_op = mass + dt * stiffness;
    explicit_op = mass - dt * lower_order;
  } else {
    const SparseMatrix s = stiffness + lower_order;
    implicit_op = mass + (dt * scheme.theta) * s;
    explicit_op = mass - (dt * (1.0 - scheme.theta)) * s;
  }

  std::vector<int> free_local(n, -1), identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    identity[i] = static_cast<int>(i);
    if (!constrained_[i]) {
      free_local[i] = static_cast<int>(free_.size());
      free_.push_back(static_cast<int>(i));
    }
  }
  const std::size_t nf = free_.size();
  auto is_free = [&](int c) { return !constrained_[static_cast<std::size_t>(c)]; };
  auto is_fixed = [&](int c) { return constrained_[static_cast<std::size_t>(c)]; };

  SparseMatrix a_ff = select(implicit_op, free_local, nf, is_free, free_local, nf);
  coupling_ = select(implicit_op, free_local, nf, is_fixed, identity, n);
  explicit_ = select(explicit_op, free_local, nf, [](int) { return true; }, identity, n);

  if (nf > 0) {
    lu_.analyzePattern(a_ff);
    lu_.factorize(a_ff);
    if (lu_.info() != Eigen::Success)
      throw Error(Errc::SingularSystem, "step matrix factorization failed: " + lu_.lastErrorMessage());
    factor_nnz_ = static_cast<std::size_t>(lu_.nnzL() + lu_.nnzU());
  }
  rhs_.resize(static_cast<Eigen::Index>(nf));
}

void StepOperator::step(const Vector& u, const Vector& load_now, const Vector& load_next,
                        const Vector& boundary_next, Vector& u_next) const {
  rhs_.noalias() = explicit_ * u;
  rhs_.noalias() -= coupling_ * boundary_next;
  const double wn = dt_ * load_weight_;
  const double wc = dt_ * (1.0 - load_weight_);
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    rhs_[k] += wn * load_next[free_[i]];
    if (wc != 0.0) rhs_[k] += wc * load_now[free_[i]];
  }
  u_next.resize(static_cast<Eigen::Index>(constrained_.size()));
  for (std::size_t i = 0; i < constrained_.size(); ++i)
    if (constrained_[i]) u_next[static_cast<Eigen::Index>(i)] = boundary_next[static_cast<Eigen::Index>(i)];
  if (free_.empty()) return;
  sol_ = lu_.solve(rhs_);
  for (std::size_t i = 0; i < free_.size(); ++i) u_next[free_[i]] = sol_[static_cast<Eigen::Index>(i)];
}

Vector step(const Scheme& scheme, const SparseMatrix& mass, const SparseMatrix& stiffness,
            const SparseMatrix& lower_order, const Vector& load_now, const Vector& load_next, const Vector& u,
            double dt) {
  StepOperator op(scheme, dt, mass, stiffness, lower_order, std::vector<bool>(static_cast<std::size_t>(u.size())));
  Vector out;
  op.step(u, load_now, load_next, Vector::Zero(u.size()), out);
  return out;
}

Vector solve_linear(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw Error(Errc::InvalidArgument, "solve_linear: shape mismatch");
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw Error(Errc::SingularSystem, "factorization failed: " + lu.lastErrorMessage());
  Vector x = lu.solve(b);
  const double tol = 1e-10 * (1.0 + b.lpNorm<Eigen::Infinity>());
  if (!x.allFinite() || (a * x - b).lpNorm<Eigen::Infinity>() > tol)
    throw Error(Errc::SingularSystem, "residual above tolerance after direct solve");
  return x;
}

}  // namespace graphrbm
