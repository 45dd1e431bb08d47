#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridjac/common.hpp"

namespace gridjac {

/// Bus row as read from a MATPOWER case, captured columns only.
struct RawBus {
  long long bus_id = 0;
  double gs = 0.0;      // shunt conductance, MW at 1 pu
  double bs = 0.0;      // shunt susceptance, MVAr at 1 pu
  double vm = 1.0;      // voltage magnitude, pu
  double va_deg = 0.0;  // voltage angle, degrees
};

/// Branch row as read from a MATPOWER case, captured columns only.
struct RawBranch {
  long long from_bus = 0;
  long long to_bus = 0;
  double r = 0.0;         // series resistance, pu
  double x = 0.0;         // series reactance, pu
  double b = 0.0;         // total line charging susceptance, pu
  double tap = 0.0;       // off-nominal ratio, 0 means nominal
  double shift_deg = 0.0; // phase shift, degrees
  int status = 1;
};

struct RawCase {
  double base_mva = 0.0;
  std::vector<RawBus> buses;
  std::vector<RawBranch> branches;
};

/// Parsed grid with contiguous 0-based bus numbering and per-branch
/// admittance parameters. Angles are radians, shunts are pu on base_mva.
struct IndexedNetwork {
  index_t n_b = 0;  // bus count
  index_t n_l = 0;  // in-service branch count
  std::vector<index_t> from_idx;
  std::vector<index_t> to_idx;
  std::vector<cplx> y_series;   // 1/(r+jx) per branch
  std::vector<cplx> y_sh_from;  // j*b/2 at the from terminal
  std::vector<cplx> y_sh_to;    // j*b/2 at the to terminal
  std::vector<double> tap_m;    // off-nominal ratio, file 0 normalized to 1
  std::vector<double> tap_phi;  // phase shift, radians
  std::vector<cplx> bus_shunt;  // (gs + j*bs)/base_mva per bus
  std::vector<double> vm0;      // pu
  std::vector<double> va0;      // radians
};

/// Reads the baseMVA, bus, and branch blocks of MATPOWER case text.
/// Unknown blocks and columns beyond the captured ones are ignored.
/// Throws ParseError (with line number) on malformed numeric tokens and
/// CaseError on missing blocks or duplicate bus ids.
RawCase parse_matpower(std::istream& text);
RawCase parse_matpower(const std::string& text);
RawCase parse_matpower_file(const std::string& path);

/// Emits the captured columns back as MATPOWER case text.
std::string serialize_matpower(const RawCase& c, const std::string& name = "mpc");

/// Remaps bus ids to 0..n_b-1 in file order, converts angles to radians and
/// shunts to pu, and drops out-of-service branches.
IndexedNetwork index_network(const RawCase& c);

/// Tiles the network k times with no coupling between copies; copy c offsets
/// all bus indices by c*n_b. k = 0 throws std::domain_error.
IndexedNetwork replicate_case(const IndexedNetwork& net, int k);

}  // namespace gridjac
