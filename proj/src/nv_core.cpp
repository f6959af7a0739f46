#include "nvstrain/nv_core.hpp"

#include <cmath>

namespace nvstrain {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

// Cantilever basis in cube coordinates: X || [-110], Y || [001], Z || [110].
Eigen::Matrix3d cantilever_basis() {
  Eigen::Matrix3d b;
  b.col(0) = Eigen::Vector3d(-1.0, 1.0, 0.0) / kSqrt2;
  b.col(1) = Eigen::Vector3d(0.0, 0.0, 1.0);
  b.col(2) = Eigen::Vector3d(1.0, 1.0, 0.0) / kSqrt2;
  return b;
}

}  // namespace

Eigen::Vector3d NvOrientation::axis_direction() const {
  switch (axis) {
    case NvAxis::m1m1m1:
      return Eigen::Vector3d(-1.0, -1.0, -1.0) / kSqrt3;
    case NvAxis::p1p1m1:
      return Eigen::Vector3d(1.0, 1.0, -1.0) / kSqrt3;
    case NvAxis::m1p1p1:
      return Eigen::Vector3d(-1.0, 1.0, 1.0) / kSqrt3;
    case NvAxis::p1m1p1:
    default:
      return Eigen::Vector3d(1.0, -1.0, 1.0) / kSqrt3;
  }
}

NvTriad nv_frame(const NvOrientation& orientation) {
  // One triad per group; the two orientations within a group see the same
  // beam strain, so they share the group's representative basis.
  NvTriad t;
  if (orientation.group() == NvGroup::A) {
    t.z = Eigen::Vector3d(1.0, 1.0, 1.0) / kSqrt3;
    t.x = Eigen::Vector3d(-1.0, -1.0, 2.0) / kSqrt6;
    t.y = Eigen::Vector3d(1.0, -1.0, 0.0) / kSqrt2;
  } else {
    t.z = Eigen::Vector3d(-1.0, 1.0, 1.0) / kSqrt3;
    t.x = Eigen::Vector3d(1.0, -1.0, 2.0) / kSqrt6;
    t.y = Eigen::Vector3d(1.0, 1.0, 0.0) / kSqrt2;
  }
  return t;
}

StrainTensor::StrainTensor(const Eigen::Matrix3d& components, Frame frame)
    : components_(components), frame_(frame) {
  const double asym = (components - components.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-14)) {
    throw FrameError("strain tensor not symmetric: max |e_ij - e_ji| = " +
                     std::to_string(asym));
  }
}

StrainTensor axial_strain_tensor(double eps, double nu) {
  if (!(std::abs(eps) < kMaxLinearStrain)) {
    throw StrainRangeError("strain " + std::to_string(eps) +
                           " outside linear regime |eps| < 1e-2");
  }
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 0) = -nu * eps;
  m(1, 1) = -nu * eps;
  m(2, 2) = eps;
  return StrainTensor(m, Frame::cantilever());
}

StrainTensor to_nv_frame(const StrainTensor& t, const NvOrientation& orientation) {
  if (t.frame().kind == FrameKind::NvFrame) {
    throw FrameError("tensor already in an NV frame");
  }
  Eigen::Matrix3d cube = t.components();
  if (t.frame().kind == FrameKind::CantileverFrame) {
    const Eigen::Matrix3d b = cantilever_basis();
    cube = b * cube * b.transpose();
  }
  const NvTriad triad = nv_frame(orientation);
  Eigen::Matrix3d r;
  r.col(0) = triad.x;
  r.col(1) = triad.y;
  r.col(2) = triad.z;
  Eigen::Matrix3d nv = r.transpose() * cube * r;
  // exact symmetry can be lost to rounding at the 1e-17 level
  nv = 0.5 * (nv + nv.transpose()).eval();
  return StrainTensor(nv, Frame::nv(orientation));
}

SymmetryShifts symmetry_shifts(const StrainTensor& t, const CouplingConstants& k) {
  if (t.frame().kind != FrameKind::NvFrame) {
    throw FrameError("symmetry shifts require an NV-frame tensor");
  }
  const Eigen::Matrix3d& e = t.components();
  SymmetryShifts s;
  s.a1_hz = k.lambda_a1 * e(2, 2) + k.lambda_a1p * (e(0, 0) + e(1, 1));
  s.e1_hz = k.lambda_e * (e(1, 1) - e(0, 0)) + k.lambda_ep * (e(0, 2) + e(2, 0));
  s.e2_hz = k.lambda_e * (e(0, 1) + e(1, 0)) + k.lambda_ep * (e(1, 2) + e(2, 1));
  return s;
}

TransitionFrequencies transition_frequencies(double f_zpl_hz,
                                             const IntrinsicStrain& intr,
                                             const SymmetryShifts& s) {
  const double common = f_zpl_hz + intr.df_a1_hz + s.a1_hz;
  const double e1 = s.e1_hz + intr.df_e1_hz;
  const double e2 = s.e2_hz + intr.df_e2_hz;
  const double half = std::hypot(e1, e2);
  return {common + half, common - half};
}

double zero_strain_splitting(const IntrinsicStrain& intr) {
  return 2.0 * std::hypot(intr.df_e1_hz, intr.df_e2_hz);
}

double stuckelberg_angle(double e1_tot_hz, double e2_tot_hz) {
  if (std::abs(e1_tot_hz) < 1e-3 && std::abs(e2_tot_hz) < 1e-3) {
    throw DegenerateStrainError("mixing angle undefined: |e1|, |e2| < 1e-3 Hz");
  }
  return 0.5 * std::atan2(e2_tot_hz, e1_tot_hz);
}

double stuckelberg_angle(const IntrinsicStrain& intr, const SymmetryShifts& s) {
  return stuckelberg_angle(s.e1_hz + intr.df_e1_hz, s.e2_hz + intr.df_e2_hz);
}

}  // namespace nvstrain
