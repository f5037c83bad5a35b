#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dirlab::reference {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + ")";
}

std::string exact_direction(std::span<const Rational> a, std::span<const Rational> b, bool antipodal) {
  const std::size_t d = a.size();
  std::vector<Rational> diff(d);
  for (std::size_t k = 0; k < d; ++k) diff[k] = b[k] - a[k];
  BigInt common = 1;
  for (const auto& v : diff) common = lcm(common, BigInt(v.get_den()));
  std::vector<BigInt> ints(d);
  BigInt g = 0;
  for (std::size_t k = 0; k < d; ++k) {
    Rational scaled = diff[k] * Rational(common);
    ints[k] = scaled.get_num();
    g = gcd(g, ints[k]);
  }
  for (auto& v : ints) v /= g;
  if (antipodal) {
    for (const auto& v : ints) {
      if (v != 0) {
        if (v < 0) {
          for (auto& w : ints) w = -w;
        }
        break;
      }
    }
  }
  std::vector<std::string> parts;
  for (const auto& v : ints) parts.push_back(v.get_str());
  return join(parts);
}

std::string float_direction(std::span<const double> a, std::span<const double> b, bool antipodal,
                            double resolution) {
  const std::size_t d = a.size();
  std::vector<double> u(d);
  double norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    u[k] = b[k] - a[k];
    norm = std::hypot(norm, u[k]);
  }
  std::vector<long long> q(d);
  for (std::size_t k = 0; k < d; ++k) q[k] = std::llround(u[k] / norm / resolution);
  if (antipodal) {
    for (auto v : q) {
      if (v != 0) {
        if (v < 0) {
          for (auto& w : q) w = -w;
        }
        break;
      }
    }
  }
  std::vector<std::string> parts;
  for (auto v : q) parts.push_back(std::to_string(v));
  return join(parts);
}

}  // namespace

std::set<std::string> directions(const PointSet& points, bool antipodal, double resolution) {
  std::set<std::string> out;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (antipodal && j < i) continue;
      if (points.mode() == NumberMode::Exact) {
        out.insert(exact_direction(points.exact_row(i), points.exact_row(j), antipodal));
      } else {
        out.insert(float_direction(points.row(i), points.row(j), antipodal, resolution));
      }
    }
  }
  return out;
}

std::string key_string(const DirectionKey& key) {
  std::vector<std::string> parts;
  if (key.mode() == NumberMode::Exact) {
    for (const auto& v : key.primitive()) parts.push_back(v.get_str());
  } else {
    for (auto v : key.quantized()) parts.push_back(std::to_string(v));
  }
  return join(parts);
}

std::uint64_t primitive_count(int q, int d) {
  std::uint64_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::uint64_t>(q + 1);
  std::uint64_t count = 0;
  std::vector<long> v(static_cast<std::size_t>(d));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    long g = 0;
    for (auto& c : v) {
      c = static_cast<long>(rest % static_cast<std::uint64_t>(q + 1));
      rest /= static_cast<std::uint64_t>(q + 1);
      g = std::gcd(g, c);
    }
    if (g == 1) ++count;
  }
  return count;
}

double energy(const WeightedPointSet& mu, double s) {
  const std::size_t n = mu.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      auto a = mu.base().row(i);
      auto b = mu.base().row(j);
      double sq = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
      total += mu.masses()[i] * mu.masses()[j] / std::pow(std::sqrt(sq), s);
    }
  }
  return total;
}

std::vector<double> nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2, double eps,
                           double pitch) {
  const auto d = static_cast<std::size_t>(mu1.dimension());
  const auto per_axis = static_cast<std::size_t>(std::llround(0.5 / pitch));
  std::size_t cells = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) cells *= per_axis;
  std::vector<double> out(cells, 0.0);
  std::vector<double> t(d - 1);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rest = cell;
    for (std::size_t k = d - 1; k-- > 0;) {
      t[k] = 0.5 + (static_cast<double>(rest % per_axis) + 0.5) * pitch;
      rest /= per_axis;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
      auto x = mu1.base().row(i);
      for (std::size_t j = 0; j < mu2.size(); ++j) {
        auto y = mu2.base().row(j);
        bool inside = true;
        for (std::size_t k = 0; k + 1 < d && inside; ++k) {
          const double slope = (x[k] - y[k]) / (x[d - 1] - y[d - 1]);
          inside = t[k] - eps <= slope && slope <= t[k] + eps;
        }
        if (inside) sum += mu1.masses()[i] * mu2.masses()[j];
      }
    }
    out[cell] = sum * std::pow(eps, -static_cast<double>(d - 1));
  }
  return out;
}

double chart_pair_mass(const WeightedPointSet& mu1, const WeightedPointSet& mu2) {
  const auto d = static_cast<std::size_t>(mu1.dimension());
  double total = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    for (std::size_t j = 0; j < mu2.size(); ++j) {
      auto x = mu1.base().row(i);
      auto y = mu2.base().row(j);
      bool inside = true;
      for (std::size_t k = 0; k + 1 < d; ++k) {
        const double slope = (x[k] - y[k]) / (x[d - 1] - y[d - 1]);
        inside = inside && slope >= 0.5 && slope <= 1.0;
      }
      if (inside) total += mu1.masses()[i] * mu2.masses()[j];
    }
  }
  return total;
}

double min_pairwise_distance(const std::vector<std::vector<double>>& units) {
  double best = INFINITY;
  if (units.size() < 2) return best;
  const std::size_t d = units.front().size();
  // Sort by first coordinate and stop scanning once the gap alone exceeds
  // the best distance found so far.
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return units[a][0] < units[b][0]; });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& u = units[order[a]];
      const auto& v = units[order[b]];
      if (v[0] - u[0] >= best) break;
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) sq += (u[k] - v[k]) * (u[k] - v[k]);
      best = std::min(best, std::sqrt(sq));
    }
  }
  return best;
}

std::size_t occupied_cells(const PointSet& points, double eps, bool antipodal) {
  const auto d = static_cast<std::size_t>(points.dimension());
  const long per_axis = static_cast<long>(std::ceil(2.0 / eps - 1e-9));
  std::set<std::vector<long>> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      std::vector<double> u(d);
      if (points.mode() == NumberMode::Exact) {
        // Exact difference, cleared of denominators, so ties between
        // coordinates and cell boundaries are seen exactly.
        auto a = points.exact_row(i);
        auto b = points.exact_row(j);
        std::vector<Rational> diff(d);
        BigInt common = 1;
        for (std::size_t k = 0; k < d; ++k) {
          diff[k] = b[k] - a[k];
          mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), diff[k].get_den_mpz_t());
        }
        for (std::size_t k = 0; k < d; ++k) {
          Rational scaled = diff[k] * common;
          u[k] = scaled.get_num().get_d();
        }
      } else {
        auto a = points.row(i);
        auto b = points.row(j);
        for (std::size_t k = 0; k < d; ++k) u[k] = b[k] - a[k];
      }
      for (int flip = 0; flip < (antipodal ? 1 : 2); ++flip) {
        if (flip) {
          for (auto& c : u) c = -c;
        }
        std::vector<double> v = u;
        // Largest |coordinate| picks the face; ties go to the lower index.
        std::size_t face = 0;
        for (std::size_t k = 1; k < d; ++k) {
          if (std::fabs(v[k]) > std::fabs(v[face])) face = k;
        }
        bool negative = v[face] < 0;
        if (antipodal && negative) {
          for (auto& c : v) c = -c;
          negative = false;
        }
        std::vector<long> cell{static_cast<long>(face), negative ? 1L : 0L};
        for (std::size_t k = 0; k < d; ++k) {
          if (k == face) continue;
          long idx = static_cast<long>(std::floor((v[k] / std::fabs(v[face]) + 1.0) / eps));
          cell.push_back(std::clamp(idx, 0L, per_axis - 1));
        }
        cells.insert(cell);
      }
    }
  }
  return cells.size();
}

}  // namespace dirlab::reference
