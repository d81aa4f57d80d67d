#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <string>
#include <vector>

#include "graphrbm/fem.hpp"

namespace graphrbm {

/// Time discretization of M u' + (K + R) u = F, where K is the diffusion
/// operator and R collects convection and reaction.
struct Scheme {
  enum class Kind { ImplicitEuler, CrankNicolson, Theta, SemiImplicitEuler };

  Kind kind = Kind::ImplicitEuler;
  double theta = 1.0;

  static Scheme implicit_euler() { return {Kind::ImplicitEuler, 1.0}; }
  static Scheme crank_nicolson() { return {Kind::CrankNicolson, 0.5}; }
  static Scheme theta_method(double theta);
  /// K implicit, R explicit.
  static Scheme semi_implicit_euler() { return {Kind::SemiImplicitEuler, 1.0}; }

  /// "ie", "cn", "theta", "siem".
  std::string name() const;
  /// Weight of F_{k+1} in the load; F_k gets the complement.
  double load_weight() const { return kind == Kind::SemiImplicitEuler ? 1.0 : theta; }
};

/// Accepts ie | cn | theta | siem (case-insensitive). Errors: InvalidArgument.
Scheme parse_scheme(const std::string& name, double theta = 0.75);

/// One-step update A u_{k+1} = B u_k + dt (w F_{k+1} + (1 - w) F_k) restricted
/// to free dofs, with constrained dofs taken from the boundary vector. The
/// free-free block of A is factorized once at construction. step() reuses
/// scratch buffers, so one operator must not be stepped from two threads.
///
///   theta-method: A = M + dt theta (K + R),  B = M - dt (1 - theta)(K + R)
///   SIEM:         A = M + dt K,              B = M - dt R
class StepOperator {
public:
  StepOperator(const Scheme& scheme, double dt, const SparseMatrix& mass, const SparseMatrix& stiffness,
               const SparseMatrix& lower_order, std::vector<bool> constrained);

  StepOperator(const StepOperator&) = delete;
  StepOperator& operator=(const StepOperator&) = delete;

  /// u_next = full vector; entries at constrained dofs are copied from
  /// boundary_next. load_now is ignored when the scheme gives it zero weight.
  void step(const Vector& u, const Vector& load_now, const Vector& load_next, const Vector& boundary_next,
            Vector& u_next) const;

  bool needs_load_now() const noexcept { return load_weight_ != 1.0; }
  std::size_t size() const noexcept { return constrained_.size(); }
  std::size_t num_free() const noexcept { return free_.size(); }
  /// Nonzeros of the L and U factors.
  std::size_t factor_nnz() const noexcept { return factor_nnz_; }
  double dt() const noexcept { return dt_; }

private:
  double dt_;
  double load_weight_;
  std::vector<bool> constrained_;
  std::vector<int> free_;
  SparseMatrix explicit_;        // B, free rows only (nf x n)
  SparseMatrix coupling_;        // A restricted to free rows, constrained columns (nf x n)
  Eigen::SparseLU<SparseMatrix> lu_;
  std::size_t factor_nnz_ = 0;
  mutable Vector rhs_, sol_;
};

/// Single unconstrained step of the scheme (convenience for small systems).
Vector step(const Scheme& scheme, const SparseMatrix& mass, const SparseMatrix& stiffness,
            const SparseMatrix& lower_order, const Vector& load_now, const Vector& load_next, const Vector& u,
            double dt);

/// Direct sparse solve. Errors: SingularSystem (factorization failure or a
/// residual above 1e-10 (1 + ||b||_inf)).
Vector solve_linear(const SparseMatrix& a, const Vector& b);

}  // namespace graphrbm
