#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "igafc/geometry.hpp"
#include "igafc/quadrature.hpp"
#include "igafc/sparse.hpp"

namespace igafc {

/// Physical velocity field v(x).
using VelocityField = std::function<Vec2(Vec2)>;
/// Physical source term R(x).
using SourceField = std::function<double(Vec2)>;

/// Galerkin assembly over the pulled-back unit square. The solution space and
/// the geometry may live on different (nested) knot vectors; quadrature spans
/// come from the solution space.
///
/// Span blocks are integrated independently (OpenMP under Exec::parallel) and
/// scattered into the sparse pattern in a fixed span order, so results do not
/// depend on thread count.

/// Convection operator K with entries k_ij = -v_j . c_ij, where
/// c_ij = integral of grad(phi_j) phi_i over the physical domain and v_j is
/// the velocity sampled at the physical image of DOF j's Greville anchor
/// (group formulation).
SparseOperator assemble_convection(const TensorSplineSpace& space, const GeometryMap& geom,
                                   const QuadratureRule& quad, const VelocityField& velocity,
                                   Exec exec = Exec::serial);

/// Diffusion operator S with entries
/// s_ij = d * integral of grad_xi(phi_j) . G grad_xi(phi_i) over the unit
/// square, with the geometric factor G = |det J| J^-1 J^-T.
SparseOperator assemble_diffusion(const TensorSplineSpace& space, const GeometryMap& geom,
                                  const QuadratureRule& quad, double diffusion,
                                  Exec exec = Exec::serial);

/// Consistent mass matrix m_ij = integral of phi_j phi_i over the physical
/// domain.
SparseOperator assemble_mass(const TensorSplineSpace& space, const GeometryMap& geom,
                             const QuadratureRule& quad, Exec exec = Exec::serial);

/// Load vector r_i = integral of R phi_i over the physical domain.
std::vector<double> assemble_rhs(const TensorSplineSpace& space, const GeometryMap& geom,
                                 const QuadratureRule& quad, const SourceField& source,
                                 Exec exec = Exec::serial);

/// Arc-length metric |dx/dt| of a univariate curve parameter; identity when
/// absent.
using CurveMetric = std::function<double(double)>;

/// Univariate assembly on a knot vector, used for boundary mass matrices and
/// as the 1D reference in the tests. The metric enters the mass integrand as
/// a factor and the stiffness integrand as a divisor (physical derivatives);
/// it cancels in the convection integrand.
SparseOperator assemble_mass_1d(const KnotVector& kv, int q, const CurveMetric& metric = {});
SparseOperator assemble_stiffness_1d(const KnotVector& kv, int q, double diffusion = 1.0,
                                     const CurveMetric& metric = {});
SparseOperator assemble_convection_1d(const KnotVector& kv, int q, double velocity);
std::vector<double> assemble_rhs_1d(const KnotVector& kv, int q,
                                    const std::function<double(double)>& source,
                                    const CurveMetric& metric = {});

} // namespace igafc
