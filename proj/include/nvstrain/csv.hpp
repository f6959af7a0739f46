#pragma once

// CSV emission and ingestion. Numbers are written with enough digits that a
// write/read cycle is bit exact.

#include <string>
#include <vector>

#include "nvstrain/inference.hpp"
#include "nvstrain/spectra.hpp"

namespace nvstrain {

std::string format_double(double v);

void write_spectrum_csv(const std::string& path, const Spectrum& spec);
Spectrum read_spectrum_csv(const std::string& path);

void write_map_csv(const std::string& path, const SpectrumMap& map);
SpectrumMap read_map_csv(const std::string& path);

// Columns: site_id,group,eps,f_plus_hz,f_minus_hz,sigma_f_hz,sigma_eps.
// Each site block is preceded by a comment carrying its theta_obs and
// delta_f0_obs seeds.
void write_datasets_csv(const std::string& path,
                        const std::vector<NvDataset>& datasets);
std::vector<NvDataset> read_datasets_csv(const std::string& path);

// Columns: phi_deg,pl_ex_kcps,pl_ey_kcps (degrees on disk, radians in memory).
void write_polarization_csv(const std::string& path,
                            const std::vector<PolarizationScanPoint>& scan);
std::vector<PolarizationScanPoint> read_polarization_csv(
    const std::string& path);

}  // namespace nvstrain
