// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmortar/assembly.hpp"
#include "hmortar/infsup.hpp"
#include "hmortar/saddle.hpp"

namespace hmortar {

/// Locale-independent number formatting with `digits` significant digits.
inline std::string format_number(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(digits) << v;
  return os.str();
}

/// Opens `path` for writing; throws on failure.
inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out.imbue(std::locale::classic());
  return out;
}

inline const char* kInfSupCsvHeader =
    "level,k,n_interface,c,N,dim_MN,scope,beta_discrete,beta_continuous,criterion,stable";

inline void write_infsup_row(std::ostream& os, const InfSupResult& r, int digits = 6) {
  os << r.level << ',' << r.degree << ',' << r.n_interface << ','
     << (r.c ? format_number(*r.c, digits) : std::string()) << ',' << r.N << ',' << r.dim_MN
     << ',' << to_string(r.scope) << ',' << format_number(r.beta_discrete, digits) << ','
     << format_number(r.beta_continuous, digits) << ','
     << format_number(r.criterion_value, digits) << ',' << (r.stable ? 1 : 0) << '\n';
}

inline void write_infsup_csv(std::ostream& os, const std::vector<InfSupResult>& rows,
                             int digits = 6) {
  os << kInfSupCsvHeader << '\n';
  for (const auto& r : rows) write_infsup_row(os, r, digits);
}

inline void write_oracle_csv(std::ostream& os, const AnalyticBeta& b, int digits = 6) {
  os << "mode,beta,is_min\n";
  for (std::size_t n = 0; n < b.per_mode.size(); ++n)
    os << n << ',' << format_number(b.per_mode[n], digits) << ','
       << (static_cast<int>(n) == b.argmin ? 1 : 0) << '\n';
}

/// Block-tagged coefficient listing: stator dofs, rotor dofs, multipliers
/// (in the harmonic basis order).
inline void write_solution_csv(std::ostream& os, const SolveResult& r, int digits = 6) {
  os << "block,index,value\n";
  auto block = [&](const char* name, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      os << name << ',' << i << ',' << format_number(v[i], digits) << '\n';
  };
  block("stator", r.u_stator);
  block("rotor", r.u_rotor);
  block("lambda", r.lambda);
}

/// Samples u_h on an (n_r x n_theta) tensor grid of each ring. Rotor values
/// are reported at stator-frame angles theta = theta_rotor - alpha.
inline void write_field_grid(std::ostream& os, const SaddleSystem& s, const SolveResult& r,
                             int n_r = 16, int n_theta = 96, int digits = 6) {
  os << "subdomain,r,theta,u\n";
  auto ring = [&](const SplineSpace2D& space, const Eigen::VectorXd& coeffs, double shift) {
    const PolarMesh& m = space.mesh();
    for (int i = 0; i <= n_r; ++i) {
      const double rr = m.r_lo + (m.r_hi - m.r_lo) * i / n_r;
      for (int j = 0; j < n_theta; ++j) {
        const double t = 2.0 * std::numbers::pi * j / n_theta;
        const double u = evaluate(space, coeffs, rr, t).value;
        double ts = std::fmod(t + shift, 2.0 * std::numbers::pi);
        if (ts < 0) ts += 2.0 * std::numbers::pi;
        os << to_string(space.subdomain()) << ',' << format_number(rr, digits) << ','
           << format_number(ts, digits) << ',' << format_number(u, digits) << '\n';
      }
    }
  };
  ring(s.stator, r.u_stator, 0.0);
  ring(s.rotor, r.u_rotor, -s.alpha);
}

/// Coordinate-format dump "row col value" with full precision.
inline void write_coo(std::ostream& os, const SparseMatrix& M) {
  os << "# " << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n';
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << format_number(it.value(), 17) << '\n';
}

}  // namespace hmortar
