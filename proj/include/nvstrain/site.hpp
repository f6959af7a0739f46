#pragma once

#include <string>

#include "nvstrain/constants.hpp"
#include "nvstrain/mechanics.hpp"
#include "nvstrain/nv_core.hpp"

namespace nvstrain {

// One NV center placed in a cantilever.
struct NvSite {
  std::string site_id = "NV1";
  NvOrientation orientation;
  IntrinsicStrain intrinsic;
  double f_zpl_hz = kDefaultZplHz;
  double linewidth_gamma_hz = 1e9;  // FWHM of the optical transition
  double pl_scale_kcps = 1.0;       // kC/s per unit absorption intensity
  CantileverGeometry geometry;

  void validate() const {
    geometry.validate();
    if (!(linewidth_gamma_hz > 0.0)) {
      throw ConfigError("linewidth_gamma_hz must be positive");
    }
    if (pl_scale_kcps < 0.0) {
      throw ConfigError("pl_scale_kcps must be nonnegative");
    }
  }

  // Axial strain at the NV for tip deflection x (signed).
  double strain_at(double x_m) const { return mode_strain(geometry, x_m); }

  // Symmetry shifts produced by tip deflection x, through the full
  // cantilever -> cube -> NV frame chain.
  SymmetryShifts shifts_at(double x_m, const CouplingConstants& k,
                           double nu) const {
    const StrainTensor t = axial_strain_tensor(strain_at(x_m), nu);
    return symmetry_shifts(to_nv_frame(t, orientation), k);
  }

  TransitionFrequencies frequencies_at(double x_m, const CouplingConstants& k,
                                       double nu) const {
    return transition_frequencies(f_zpl_hz, intrinsic, shifts_at(x_m, k, nu));
  }
};

}  // namespace nvstrain
