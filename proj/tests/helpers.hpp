#pragma once

#include <string>
#include <vector>

#include "nvstrain/site.hpp"
#include "nvstrain/synthesis.hpp"

namespace nvtest {

inline nvstrain::NvSite make_site(nvstrain::NvAxis axis, double df_a1,
                                  double df_e1, double df_e2,
                                  const std::string& id = "NV") {
  nvstrain::NvSite s;
  s.site_id = id;
  s.orientation.axis = axis;
  s.intrinsic = {df_a1, df_e1, df_e2};
  return s;
}

// The 12-site ensemble used by the roundtrip scenarios: six group-A sites
// and six group-B sites with spread-out intrinsic strain.
inline std::vector<nvstrain::NvSite> twelve_sites() {
  using nvstrain::NvAxis;
  struct Row {
    NvAxis axis;
    double a1, e1, e2;  // GHz
  };
  const Row rows[] = {
      {NvAxis::m1m1m1, 1.2, 2.0, -1.0}, {NvAxis::p1p1m1, -0.8, 3.5, 2.2},
      {NvAxis::m1m1m1, 2.5, -1.5, 0.8}, {NvAxis::p1p1m1, 0.5, 4.0, 3.0},
      {NvAxis::m1m1m1, -1.7, 2.8, -2.4}, {NvAxis::p1p1m1, 3.1, 1.1, 1.9},
      {NvAxis::m1p1p1, 0.9, -2.2, 1.4}, {NvAxis::p1m1p1, -2.3, 3.2, -0.6},
      {NvAxis::m1p1p1, 1.6, 2.6, 2.9}, {NvAxis::p1m1p1, -0.4, 1.8, -3.1},
      {NvAxis::m1p1p1, 2.8, -3.4, 1.2}, {NvAxis::p1m1p1, 1.1, 2.4, 0.5}};
  std::vector<nvstrain::NvSite> sites;
  int i = 0;
  for (const Row& r : rows) {
    nvstrain::NvSite s = make_site(r.axis, r.a1 * 1e9, r.e1 * 1e9, r.e2 * 1e9,
                                   "NV" + std::to_string(++i));
    sites.push_back(s);
  }
  return sites;
}

inline nvstrain::EnsembleSpec twelve_site_spec() {
  nvstrain::EnsembleSpec spec;
  spec.sites = twelve_sites();
  spec.deflections_m = {-24e-9, -16e-9, -8e-9, 8e-9, 16e-9, 24e-9};
  return spec;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

inline double trapz(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return s;
}

}  // namespace nvtest
