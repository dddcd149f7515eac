// SPDX-License-Identifier: Apache-2.0

#include "dlsfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/LU>

namespace dlsfem
{

double CsrMatrix::max_abs() const
{
  double m = 0.0;
  for (double v : values)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double CsrMatrix::coeff(int i, int j) const
{
  const auto first = col_indices.begin() + row_offsets[i];
  const auto last = col_indices.begin() + row_offsets[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
  {
    return 0.0;
  }
  return values[it - col_indices.begin()];
}

void CsrMatrix::validate() const
{
  if (static_cast<int>(row_offsets.size()) != rows + 1 || row_offsets.front() != 0)
  {
    throw std::invalid_argument("CsrMatrix: bad row offset array");
  }
  if (col_indices.size() != values.size() ||
      static_cast<std::size_t>(row_offsets.back()) != values.size())
  {
    throw std::invalid_argument("CsrMatrix: offsets/indices/values length mismatch");
  }
  for (int i = 0; i < rows; ++i)
  {
    if (row_offsets[i + 1] < row_offsets[i])
    {
      throw std::invalid_argument("CsrMatrix: decreasing row offsets");
    }
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
    {
      if (col_indices[k] < 0 || col_indices[k] >= rows)
      {
        throw std::invalid_argument("CsrMatrix: column index out of range");
      }
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
      {
        throw std::invalid_argument("CsrMatrix: column indices not strictly increasing");
      }
    }
  }
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix &dense, double drop_tol)
{
  if (dense.rows() != dense.cols())
  {
    throw std::invalid_argument("CsrMatrix::from_dense: matrix must be square");
  }
  CsrMatrix a;
  a.rows = static_cast<int>(dense.rows());
  a.row_offsets.assign(1, 0);
  for (int i = 0; i < a.rows; ++i)
  {
    for (int j = 0; j < a.rows; ++j)
    {
      if (std::abs(dense(i, j)) > drop_tol || i == j)
      {
        a.col_indices.push_back(j);
        a.values.push_back(dense(i, j));
      }
    }
    a.row_offsets.push_back(static_cast<int>(a.values.size()));
  }
  return a;
}

DenseMatrix CsrMatrix::to_dense() const
{
  DenseMatrix d = DenseMatrix::Zero(rows, rows);
  for (int i = 0; i < rows; ++i)
  {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
    {
      d(i, col_indices[k]) += values[k];
    }
  }
  return d;
}

void spmv(const CsrMatrix &a, const Vector &x, Vector &y)
{
  if (x.size() != a.rows)
  {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  y.resize(a.rows);
  const int *offsets = a.row_offsets.data();
  const int *cols = a.col_indices.data();
  const double *vals = a.values.data();
  for (int i = 0; i < a.rows; ++i)
  {
    double s = 0.0;
    for (int k = offsets[i]; k < offsets[i + 1]; ++k)
    {
      s += vals[k] * x[cols[k]];
    }
    y[i] = s;
  }
}

Vector spmv(const CsrMatrix &a, const Vector &x)
{
  Vector y;
  spmv(a, x, y);
  return y;
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix &a) : inv_diag_(a.rows)
{
  for (int i = 0; i < a.rows; ++i)
  {
    const double d = a.coeff(i, i);
    if (d == 0.0)
    {
      throw std::runtime_error("Jacobi: zero diagonal in row " + std::to_string(i));
    }
    inv_diag_[i] = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(const Vector &r, Vector &z) const
{
  z = r.cwiseProduct(inv_diag_);
}

Ilu0Preconditioner::Ilu0Preconditioner(const CsrMatrix &a) : lu_(a), diag_(a.rows, -1)
{
  const int n = a.rows;
  auto &vals = lu_.values;
  const auto &cols = lu_.col_indices;
  const auto &offs = lu_.row_offsets;
  for (int i = 0; i < n; ++i)
  {
    for (int k = offs[i]; k < offs[i + 1]; ++k)
    {
      if (cols[k] == i)
      {
        diag_[i] = k;
      }
    }
    if (diag_[i] < 0)
    {
      throw ZeroPivotError(i);
    }
  }

  std::vector<int> position(n, -1);
  for (int i = 0; i < n; ++i)
  {
    for (int k = offs[i]; k < offs[i + 1]; ++k)
    {
      position[cols[k]] = k;
    }
    for (int k = offs[i]; k < offs[i + 1] && cols[k] < i; ++k)
    {
      const int row_k = cols[k];
      const double pivot = vals[diag_[row_k]];
      if (pivot == 0.0)
      {
        throw ZeroPivotError(row_k);
      }
      const double factor = vals[k] / pivot;
      vals[k] = factor;
      for (int j = diag_[row_k] + 1; j < offs[row_k + 1]; ++j)
      {
        const int pos = position[cols[j]];
        if (pos >= 0)
        {
          vals[pos] -= factor * vals[j];
        }
      }
    }
    if (vals[diag_[i]] == 0.0)
    {
      throw ZeroPivotError(i);
    }
    for (int k = offs[i]; k < offs[i + 1]; ++k)
    {
      position[cols[k]] = -1;
    }
  }
}

void Ilu0Preconditioner::apply(const Vector &r, Vector &z) const
{
  const int n = lu_.rows;
  const auto &vals = lu_.values;
  const auto &cols = lu_.col_indices;
  const auto &offs = lu_.row_offsets;
  z.resize(n);
  for (int i = 0; i < n; ++i)
  {
    double s = r[i];
    for (int k = offs[i]; k < diag_[i]; ++k)
    {
      s -= vals[k] * z[cols[k]];
    }
    z[i] = s;
  }
  for (int i = n - 1; i >= 0; --i)
  {
    double s = z[i];
    for (int k = diag_[i] + 1; k < offs[i + 1]; ++k)
    {
      s -= vals[k] * z[cols[k]];
    }
    z[i] = s / vals[diag_[i]];
  }
}

namespace
{

std::vector<DenseMatrix> invert_diagonal_blocks(const CsrMatrix &a, int block)
{
  if (block < 1 || a.rows % block != 0)
  {
    throw std::invalid_argument("block preconditioner: rows are not a multiple of the block size");
  }
  const int nb = a.rows / block;
  std::vector<DenseMatrix> inv(nb);
  DenseMatrix d(block, block);
  for (int b = 0; b < nb; ++b)
  {
    d.setZero();
    for (int i = 0; i < block; ++i)
    {
      const int row = b * block + i;
      for (int k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k)
      {
        const int j = a.col_indices[k] - b * block;
        if (j >= 0 && j < block)
        {
          d(i, j) = a.values[k];
        }
      }
    }
    Eigen::FullPivLU<DenseMatrix> lu(d);
    if (!lu.isInvertible())
    {
      throw std::runtime_error("block preconditioner: singular diagonal block " + std::to_string(b));
    }
    inv[b] = lu.inverse();
  }
  return inv;
}

}  // namespace

BlockJacobiPreconditioner::BlockJacobiPreconditioner(const CsrMatrix &a, int block)
  : block_(block), inverses_(invert_diagonal_blocks(a, block))
{
}

void BlockJacobiPreconditioner::apply(const Vector &r, Vector &z) const
{
  z.resize(r.size());
  for (std::size_t b = 0; b < inverses_.size(); ++b)
  {
    z.segment(b * block_, block_).noalias() = inverses_[b] * r.segment(b * block_, block_);
  }
}

std::unique_ptr<Preconditioner> make_default_preconditioner(const CsrMatrix &a)
{
  try
  {
    return std::make_unique<Ilu0Preconditioner>(a);
  }
  catch (const ZeroPivotError &)
  {
    return std::make_unique<JacobiPreconditioner>(a);
  }
}

std::unique_ptr<Preconditioner> make_preconditioner(const CsrMatrix &a, PreconditionerKind kind,
                                                    int block_size)
{
  switch (kind)
  {
  case PreconditionerKind::ilu0:
    return make_default_preconditioner(a);
  case PreconditionerKind::jacobi:
    return std::make_unique<JacobiPreconditioner>(a);
  case PreconditionerKind::block_jacobi:
    break;
  }
  return std::make_unique<BlockJacobiPreconditioner>(a, block_size);
}

int default_max_iterations(int n)
{
  return std::max(100, static_cast<int>(std::ceil(100.0 * std::sqrt(static_cast<double>(n)))));
}

namespace
{

double true_relative_residual(const CsrMatrix &a, const Vector &b, const Vector &x, double bnorm,
                              Vector &r)
{
  spmv(a, x, r);
  r = b - r;
  return r.norm() / bnorm;
}

}  // namespace

SolveResult bicgstab(const CsrMatrix &a, const Vector &b, const Preconditioner &precond,
                     double tol, int max_iterations)
{
  if (!(tol > 0.0))
  {
    throw std::invalid_argument("bicgstab: tolerance must be positive");
  }
  if (b.size() != a.rows)
  {
    throw std::invalid_argument("bicgstab: dimension mismatch");
  }
  const int n = a.rows;
  SolveResult res;
  res.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    res.stats.converged = true;
    return res;
  }

  Vector &x = res.x;
  Vector r = b;
  Vector r_hat = r;
  Vector p = Vector::Zero(n), v = Vector::Zero(n);
  Vector y(n), z(n), s(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  bool fresh = true;
  bool restarted = false;  // set by a restart, cleared by a completed iteration
  int it = 0;
  // Restart from the true residual with a new shadow vector. A second breakdown
  // without an intervening completed iteration is final.
  auto restart = [&]()
  {
    if (restarted)
    {
      res.stats.breakdown = true;
      return false;
    }
    true_relative_residual(a, b, x, bnorm, r);
    r_hat = r;
    fresh = true;
    restarted = true;
    return true;
  };
  while (it < max_iterations)
  {
    ++it;
    const double rho_new = r_hat.dot(r);
    if (!std::isfinite(rho_new) || std::abs(rho_new) <= 1e-14 * r_hat.norm() * r.norm())
    {
      if (restart())
      {
        continue;
      }
      break;
    }
    if (fresh)
    {
      p = r;
      fresh = false;
    }
    else
    {
      const double beta = (rho_new / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    rho = rho_new;
    precond.apply(p, y);
    spmv(a, y, v);
    const double denom = r_hat.dot(v);
    if (denom == 0.0 || !std::isfinite(denom))
    {
      if (restart())
      {
        continue;
      }
      break;
    }
    alpha = rho / denom;
    s = r - alpha * v;
    if (s.norm() / bnorm <= tol)
    {
      x += alpha * y;
      if (true_relative_residual(a, b, x, bnorm, r) <= tol)
      {
        break;
      }
      // recursive residual drifted
      restarted = false;
      if (restart())
      {
        continue;
      }
      break;
    }
    precond.apply(s, z);
    spmv(a, z, t);
    const double tt = t.dot(t);
    omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
    x += alpha * y + omega * z;
    r = s - omega * t;
    if (r.norm() / bnorm <= tol)
    {
      if (true_relative_residual(a, b, x, bnorm, r) <= tol)
      {
        break;
      }
      restarted = false;
      if (restart())
      {
        continue;
      }
      break;
    }
    if (omega == 0.0)
    {
      if (restart())
      {
        continue;
      }
      break;
    }
    restarted = false;
  }
  res.stats.iterations = it;
  res.stats.relative_residual = true_relative_residual(a, b, x, bnorm, r);
  res.stats.converged = res.stats.relative_residual <= tol;
  return res;
}

SolveResult cg(const CsrMatrix &a, const Vector &b, const Preconditioner &precond, double tol,
               int max_iterations)
{
  if (!(tol > 0.0))
  {
    throw std::invalid_argument("cg: tolerance must be positive");
  }
  if (b.size() != a.rows)
  {
    throw std::invalid_argument("cg: dimension mismatch");
  }
  const int n = a.rows;
  SolveResult res;
  res.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    res.stats.converged = true;
    return res;
  }
  Vector &x = res.x;
  Vector r = b;
  Vector z(n), q(n);
  precond.apply(r, z);
  Vector p = z;
  double rz = r.dot(z);
  int it = 0;
  while (it < max_iterations)
  {
    ++it;
    spmv(a, p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0))
    {
      res.stats.breakdown = true;
      break;
    }
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() / bnorm <= tol)
    {
      if (true_relative_residual(a, b, x, bnorm, r) <= tol)
      {
        break;
      }
      // restart the search direction from the true residual
      precond.apply(r, z);
      p = z;
      rz = r.dot(z);
      continue;
    }
    precond.apply(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.stats.iterations = it;
  res.stats.relative_residual = true_relative_residual(a, b, x, bnorm, r);
  res.stats.converged = res.stats.relative_residual <= tol;
  return res;
}

SolveResult solve(const CsrMatrix &a, const Vector &b, const SolverSettings &settings)
{
  const auto precond = make_preconditioner(a, settings.preconditioner, settings.block_size);
  const int maxit =
      settings.max_iterations > 0 ? settings.max_iterations : default_max_iterations(a.rows);
  if (settings.kind == SolverKind::cg)
  {
    return cg(a, b, *precond, settings.tol, maxit);
  }
  return bicgstab(a, b, *precond, settings.tol, maxit);
}

void write_matrix_market(std::ostream &os, const CsrMatrix &a)
{
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows << ' ' << a.rows << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (int i = 0; i < a.rows; ++i)
  {
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
    {
      os << i + 1 << ' ' << a.col_indices[k] + 1 << ' ' << a.values[k] << '\n';
    }
  }
}

}  // namespace dlsfem
