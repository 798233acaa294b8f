#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hubble/errors.hpp"
#include "hubble/gamma.hpp"

namespace hubble {

// Complex samples on a strictly increasing real grid.
class SampledFunction {
 public:
  SampledFunction(std::vector<double> grid, std::vector<cplx> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size())
      throw GridError("SampledFunction: grid and values differ in length");
    if (grid_.size() < 2) throw GridError("SampledFunction: need at least two nodes");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!std::isfinite(grid_[i])) throw GridError("SampledFunction: non-finite grid node");
      if (i > 0 && !(grid_[i] > grid_[i - 1]))
        throw GridError("SampledFunction: grid must be strictly increasing");
    }
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::size_t size() const { return grid_.size(); }

  bool is_uniform(double rel_tol = 1e-9) const {
    const double h = step();
    for (std::size_t i = 1; i < grid_.size(); ++i)
      if (std::fabs((grid_[i] - grid_[i - 1]) - h) > rel_tol * h) return false;
    return true;
  }
  // Mean spacing; the actual spacing when the grid is uniform.
  double step() const { return (grid_.back() - grid_.front()) / double(grid_.size() - 1); }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::vector<double> grid_;
  std::vector<cplx> values_;
};

// n nodes from a to b inclusive, computed as a + i*h so grids with the same
// (a, h) share nodes exactly.
inline std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n < 2 || !(b > a)) throw GridError("uniform_grid: need n >= 2 and b > a");
  std::vector<double> x(n);
  const double h = (b - a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + double(i) * h;
  x.back() = b;
  return x;
}

template <class F>
SampledFunction sample(const std::vector<double>& grid, F&& f) {
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return SampledFunction(grid, std::move(v));
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DomainError("cannot parse number '" + s + "'");
  return v;
}

inline void write_csv(std::ostream& out, const SampledFunction& f) {
  out << "x,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out << format_double(f.grid()[i]) << ',' << format_double(f.values()[i].real()) << ','
        << format_double(f.values()[i].imag()) << '\n';
}

inline SampledFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x,re,im") throw DomainError("read_csv: missing header x,re,im");
  std::vector<double> x;
  std::vector<cplx> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw DomainError("read_csv: malformed row '" + line + "'");
    x.push_back(parse_double(a));
    v.emplace_back(parse_double(b), parse_double(c));
  }
  return SampledFunction(std::move(x), std::move(v));
}

}  // namespace hubble
