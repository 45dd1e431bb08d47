#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gridjac/netcase.hpp"
#include "gridjac/oracle.hpp"
#include "gridjac/sparse.hpp"

namespace testutil {

using gridjac::cplx;
using gridjac::index_t;

inline std::string case_path(const std::string& name) {
  return std::string(GRIDJAC_CASE_DIR) + "/" + name;
}

// Two buses joined by a purely reactive branch (x = 0.1 pu -> y = -10j),
// sending end at 0.1 rad. The classic hand-checkable configuration:
// P_h = 10 sin(0.1), Q_h = 10 (1 - cos(0.1)).
inline gridjac::IndexedNetwork two_bus_net() {
  gridjac::RawCase c;
  c.base_mva = 100.0;
  c.buses.push_back({1, 0.0, 0.0, 1.0, 0.1 * 180.0 / 3.14159265358979323846});
  c.buses.push_back({2, 0.0, 0.0, 1.0, 0.0});
  c.branches.push_back({1, 2, 0.0, 0.1, 0.0, 0.0, 0.0, 1});
  return gridjac::index_network(c);
}

// Frozen values for the two-bus configuration, computed from the dense
// oracle and hand arithmetic (10 sin 0.1 etc.).
inline constexpr double kTwoBusPh = 0.99833416646828155;    // 10*sin(0.1)
inline constexpr double kTwoBusQh = 0.049958347219741794;   // 10*(1-cos(0.1))
inline constexpr double kTwoBusDPhDth = 9.9500416527802589; // 10*cos(0.1)

// One bus, no branches, a single shunt (pu on a 100 MVA base).
inline gridjac::IndexedNetwork shunt_only_net(cplx y_shunt, double vm) {
  gridjac::RawCase c;
  c.base_mva = 100.0;
  c.buses.push_back({1, y_shunt.real() * 100.0, y_shunt.imag() * 100.0, vm, 0.0});
  return gridjac::index_network(c);
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng()) / 4294967296.0);
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

template <typename T>
double max_nzval_diff(const gridjac::CscMatrix<T>& a, const gridjac::CscMatrix<T>& b) {
  double worst = 0.0;
  for (size_t k = 0; k < a.nzval.size(); ++k) worst = std::max(worst, std::abs(a.nzval[k] - b.nzval[k]));
  return worst;
}

template <typename T>
double max_dense_diff(const gridjac::DenseMatrix<T>& a, const gridjac::DenseMatrix<T>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.vals.size(); ++i) worst = std::max(worst, std::abs(a.vals[i] - b.vals[i]));
  return worst;
}

}  // namespace testutil
