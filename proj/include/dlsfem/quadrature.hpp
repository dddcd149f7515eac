// SPDX-License-Identifier: Apache-2.0

#ifndef DLSFEM_QUADRATURE_HPP
#define DLSFEM_QUADRATURE_HPP

#include <span>
#include <vector>

#include "dlsfem/mesh.hpp"
#include "dlsfem/types.hpp"

namespace dlsfem
{

// Rule on the reference simplex {x_i >= 0, sum x_i <= 1} of dimension 1, 2 or 3.
struct QuadratureRule
{
  int dim = 0;
  int exact_degree = 0;
  std::vector<Vec> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

struct MappedQuadrature
{
  std::vector<Vec> points;
  std::vector<double> weights;
};

inline constexpr int kMaxQuadratureDegree = 20;

// Collapsed (Duffy) tensor Gauss-Legendre rule, exact for total degree <= degree.
QuadratureRule simplex_rule(int dim, int degree);

// Gauss-Legendre points/weights on [0,1].
void gauss_legendre(int npoints, std::vector<double> &points, std::vector<double> &weights);

// Measure of the reference simplex: 1, 1/2, 1/6.
double reference_measure(int dim);

MappedQuadrature map_rule_to_cell(const QuadratureRule &rule, const SimplicialMesh &mesh, int cell);

// `face_vertices` holds the dim vertex ids of a (dim-1)-face of `mesh`.
MappedQuadrature map_rule_to_face(const QuadratureRule &rule, const SimplicialMesh &mesh,
                                  std::span<const int> face_vertices);

}  // namespace dlsfem

#endif  // DLSFEM_QUADRATURE_HPP
