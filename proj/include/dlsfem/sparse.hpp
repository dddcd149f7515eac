// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_SPARSE_HPP
#define DLSFEM_SPARSE_HPP

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlsfem/types.hpp"

namespace dlsfem
{

// Square CSR matrix with strictly increasing column indices in every row.
struct CsrMatrix
{
  int rows = 0;
  std::vector<int> row_offsets{0};
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }
  double max_abs() const;
  // Value at (i, j), zero if the entry is not stored.
  double coeff(int i, int j) const;
  // Throws std::invalid_argument when the structural invariants fail.
  void validate() const;

  static CsrMatrix from_dense(const DenseMatrix &dense, double drop_tol = 0.0);
  DenseMatrix to_dense() const;
};

void spmv(const CsrMatrix &a, const Vector &x, Vector &y);
Vector spmv(const CsrMatrix &a, const Vector &x);

class Preconditioner
{
public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Vector &r, Vector &z) const = 0;
  virtual std::string name() const = 0;
};

class IdentityPreconditioner final : public Preconditioner
{
public:
  void apply(const Vector &r, Vector &z) const override { z = r; }
  std::string name() const override { return "none"; }
};

class JacobiPreconditioner final : public Preconditioner
{
public:
  explicit JacobiPreconditioner(const CsrMatrix &a);
  void apply(const Vector &r, Vector &z) const override;
  std::string name() const override { return "jacobi"; }

private:
  Vector inv_diag_;
};

class ZeroPivotError : public std::runtime_error
{
public:
  explicit ZeroPivotError(int row)
    : std::runtime_error("ILU(0): zero pivot in row " + std::to_string(row)), row_(row)
  {
  }
  int row() const { return row_; }

private:
  int row_;
};

// Incomplete LU factorization with the sparsity pattern of A (unit lower L).
class Ilu0Preconditioner final : public Preconditioner
{
public:
  explicit Ilu0Preconditioner(const CsrMatrix &a);
  void apply(const Vector &r, Vector &z) const override;
  std::string name() const override { return "ilu0"; }

  // Combined L (strict lower, unit diagonal implied) and U factors.
  const CsrMatrix &factors() const { return lu_; }

private:
  CsrMatrix lu_;
  std::vector<int> diag_;
};

// Exact inverses of the diagonal blocks of size `block` (rows must be a multiple).
class BlockJacobiPreconditioner final : public Preconditioner
{
public:
  BlockJacobiPreconditioner(const CsrMatrix &a, int block);
  void apply(const Vector &r, Vector &z) const override;
  std::string name() const override { return "block-jacobi"; }

private:
  int block_;
  std::vector<DenseMatrix> inverses_;
};

// ILU(0) when the factorization succeeds, Jacobi otherwise.
std::unique_ptr<Preconditioner> make_default_preconditioner(const CsrMatrix &a);

struct SolveStats
{
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
};

struct SolveResult
{
  Vector x;
  SolveStats stats;
};

// 100 sqrt(n), at least 100.
int default_max_iterations(int n);

// Both solvers start from x = 0 and stop on ||b - Ax|| <= tol ||b||.
SolveResult bicgstab(const CsrMatrix &a, const Vector &b, const Preconditioner &precond,
                     double tol, int max_iterations);
SolveResult cg(const CsrMatrix &a, const Vector &b, const Preconditioner &precond, double tol,
               int max_iterations);

enum class SolverKind
{
  bicgstab,
  cg
};

enum class PreconditionerKind
{
  block_jacobi,
  ilu0,
  jacobi
};

struct SolverSettings
{
  SolverKind kind = SolverKind::cg;
  PreconditionerKind preconditioner = PreconditionerKind::block_jacobi;
  int block_size = 1;  // cell block size used by block_jacobi
  double tol = 1e-10;
  int max_iterations = 0;  // 0: default_max_iterations(n)
};

std::unique_ptr<Preconditioner> make_preconditioner(const CsrMatrix &a, PreconditionerKind kind,
                                                    int block_size);

SolveResult solve(const CsrMatrix &a, const Vector &b, const SolverSettings &settings);

void write_matrix_market(std::ostream &os, const CsrMatrix &a);

}  // namespace dlsfem

#endif  // DLSFEM_SPARSE_HPP
