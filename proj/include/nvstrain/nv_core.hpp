#pragma once

// Orientation geometry of the NV center in a [110]-axis cantilever,
// strain-tensor frame transformations, symmetry-resolved couplings and
// optical transition frequencies of the m_s = 0 manifold {|A>, |Ex>, |Ey>}.
//
// Conventions: frequencies in Hz, strain dimensionless, couplings in
// Hz per unit strain, angles in radians.

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "nvstrain/constants.hpp"
#include "nvstrain/errors.hpp"

namespace nvstrain {

// The four cube-diagonal NV axes. Orientations split into two groups by
// their response to [110]-axis beam strain: group A axes have a shear
// component in the NV frame, group B axes do not.
enum class NvAxis {
  m1m1m1,  // [-1-1-1]
  p1p1m1,  // [ 1 1-1]
  m1p1p1,  // [-1 1 1]
  p1m1p1,  // [ 1-1 1]
};

enum class NvGroup { A, B };

struct NvOrientation {
  NvAxis axis = NvAxis::m1p1p1;

  NvGroup group() const {
    return (axis == NvAxis::m1m1m1 || axis == NvAxis::p1p1m1) ? NvGroup::A
                                                              : NvGroup::B;
  }
  Eigen::Vector3d axis_direction() const;  // unit vector, cube coords

  static NvOrientation representative(NvGroup g) {
    return {g == NvGroup::A ? NvAxis::m1m1m1 : NvAxis::m1p1p1};
  }
};

// Right-handed orthonormal NV basis expressed in crystal-cube coordinates.
struct NvTriad {
  Eigen::Vector3d x;
  Eigen::Vector3d y;
  Eigen::Vector3d z;
};

NvTriad nv_frame(const NvOrientation& orientation);

enum class FrameKind { CantileverFrame, CrystalCubeFrame, NvFrame };

struct Frame {
  FrameKind kind = FrameKind::CantileverFrame;
  std::optional<NvOrientation> orientation;  // set iff kind == NvFrame

  static Frame cantilever() { return {FrameKind::CantileverFrame, {}}; }
  static Frame cube() { return {FrameKind::CrystalCubeFrame, {}}; }
  static Frame nv(NvOrientation o) { return {FrameKind::NvFrame, o}; }
};

class StrainTensor {
 public:
  // Throws FrameError if the matrix is not symmetric to 1e-14 absolute.
  StrainTensor(const Eigen::Matrix3d& components, Frame frame);

  const Eigen::Matrix3d& components() const { return components_; }
  const Frame& frame() const { return frame_; }
  double trace() const { return components_.trace(); }

 private:
  Eigen::Matrix3d components_;
  Frame frame_;
};

struct IntrinsicStrain {
  double df_a1_hz = 0.0;
  double df_e1_hz = 0.0;
  double df_e2_hz = 0.0;
};

struct SymmetryShifts {
  double a1_hz = 0.0;
  double e1_hz = 0.0;
  double e2_hz = 0.0;
};

struct TransitionFrequencies {
  double f_plus_hz = 0.0;
  double f_minus_hz = 0.0;
  double splitting_hz() const { return f_plus_hz - f_minus_hz; }
};

// Uniaxial beam strain with Poisson contraction, cantilever frame:
// diag(-nu*eps, -nu*eps, eps), Z the beam axis. |eps| >= 1e-2 is outside
// the linear-elasticity regime and rejected with StrainRangeError.
StrainTensor axial_strain_tensor(double eps, double nu);

// eps_NV = R^T eps R. Accepts cantilever- or cube-frame tensors; the
// cantilever basis is X || [-110], Y || [001], Z || [110].
StrainTensor to_nv_frame(const StrainTensor& t, const NvOrientation& orientation);

// a1 = lambda_a1*e_zz + lambda_a1p*(e_xx + e_yy)
// e1 = lambda_e*(e_yy - e_xx) + lambda_ep*(e_xz + e_zx)
// e2 = lambda_e*(e_xy + e_yx) + lambda_ep*(e_yz + e_zy)
// Requires an NV-frame tensor.
SymmetryShifts symmetry_shifts(const StrainTensor& t, const CouplingConstants& k);

// f_pm = f_zpl + df_a1 + a1 +- sqrt((e1 + df_e1)^2 + (e2 + df_e2)^2)
TransitionFrequencies transition_frequencies(double f_zpl_hz,
                                             const IntrinsicStrain& intr,
                                             const SymmetryShifts& s);

// Delta f_0 = 2 sqrt(df_e1^2 + df_e2^2)
double zero_strain_splitting(const IntrinsicStrain& intr);

// theta = atan2(df_e2 + e2, df_e1 + e1) / 2, in (-pi/2, pi/2].
// Both arguments below 1e-3 Hz in magnitude -> DegenerateStrainError.
double stuckelberg_angle(double e1_tot_hz, double e2_tot_hz);
double stuckelberg_angle(const IntrinsicStrain& intr, const SymmetryShifts& s);

}  // namespace nvstrain
