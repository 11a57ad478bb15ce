#include "rnse/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rnse/error.hpp"
#include "rnse/fft.hpp"
#include "rnse/operators.hpp"

namespace rnse {
namespace {

double smooth_step(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double kmag(const GridSpec& g, int i1, int i2, int i3) {
  const auto k = wavevector(g, i1, i2, i3);
  return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

}  // namespace

double lp_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = smooth_step(2.0 - r);
  const double b = smooth_step(r - 1.0);
  return a / (a + b);
}

DyadicPartition DyadicPartition::for_grid(const GridSpec& g) {
  DyadicPartition part;
  part.j_min = static_cast<int>(std::floor(std::log2(g.k_min()) + 1e-12));
  const double top = std::sqrt(3.0) * (g.n / 2) * g.k_unit();
  part.j_max = static_cast<int>(std::ceil(std::log2(top) - 1e-12));
  return part;
}

double DyadicPartition::weight(int j, double k) const {
  return lp_cutoff(std::ldexp(k, -j)) - lp_cutoff(std::ldexp(k, -j + 1));
}

double DyadicPartition::annulus_lo() const { return std::ldexp(1.0, j_min); }
double DyadicPartition::annulus_hi() const { return std::ldexp(1.0, j_max); }

SpectralField band_filter(const SpectralField& f, int j, const DyadicPartition& part) {
  require(j >= part.j_min && j <= part.j_max,
          "band_filter: band " + std::to_string(j) + " outside partition");
  const GridSpec& g = f.grid();
  SpectralField out(g, f.ncomp());
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    if (idx == 0) return;
    const double w = part.weight(j, kmag(g, i1, i2, i3));
    if (w == 0.0) return;
    for (int c = 0; c < f.ncomp(); ++c) out.at(c, idx) = w * f.at(c, idx);
  });
  out.set_mean_free(true);
  out.set_div_free(f.div_free());
  return out;
}

double uncovered_fraction(const SpectralField& f, const DyadicPartition& part) {
  const GridSpec& g = f.grid();
  double total = 0.0, outside = 0.0;
  for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
    double e = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) e += std::norm(f.at(c, idx));
    total += e;
    if (idx == 0 || !part.covers(kmag(g, i1, i2, i3))) outside += e;
  });
  return total > 0.0 ? outside / total : 0.0;
}

double lp_norm(const PhysicalField& f, double p) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  const std::size_t np = f.points();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      double s = 0.0;
      for (int c = 0; c < f.ncomp(); ++c) s += f.at(c, i) * f.at(c, i);
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double s = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) s += f.at(c, i) * f.at(c, i);
    acc += p == 2.0 ? s : std::pow(s, 0.5 * p);
  }
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double lp_norm(const SpectralField& f, double p) {
  if (p == 2.0) return l2_norm(f);
  PhysicalField u(f.grid(), f.ncomp());
  detail::inverse_components(f, u);
  return lp_norm(u, p);
}

double besov_norm(const SpectralField& f, double s, double p, double q, const DyadicPartition& part,
                  double* uncovered) {
  require(part.j_max >= part.j_min, "besov_norm: empty partition");
  require(f.mean_free(), "besov_norm: field must be mean-free");
  require(q >= 1.0, "besov_norm: q must be >= 1");
  if (uncovered) *uncovered = uncovered_fraction(f, part);
  const int nb = part.j_max - part.j_min + 1;
  std::vector<double> band(nb, 0.0);
  if (p == 2.0) {
    // Parseval per band in one sweep; phi_j(k) vanishes unless 2^(j-1) < |k| < 2^(j+1).
    const GridSpec& g = f.grid();
    for_each_mode(g, [&](int i1, int i2, int i3, std::size_t idx) {
      if (idx == 0) return;
      double e = 0.0;
      for (int c = 0; c < f.ncomp(); ++c) e += std::norm(f.at(c, idx));
      if (e == 0.0) return;
      const double k = kmag(g, i1, i2, i3);
      const int j0 = static_cast<int>(std::floor(std::log2(k)));
      for (int j = std::max(j0, part.j_min); j <= std::min(j0 + 1, part.j_max); ++j) {
        const double w = part.weight(j, k);
        band[j - part.j_min] += w * w * e;
      }
    });
    for (auto& b : band) b = std::sqrt(g.volume() * b);
  } else {
    for (int j = part.j_min; j <= part.j_max; ++j)
      band[j - part.j_min] = lp_norm(band_filter(f, j, part), p);
  }
  double acc = 0.0;
  for (int j = part.j_min; j <= part.j_max; ++j) {
    const double term = std::pow(2.0, s * j) * band[j - part.j_min];
    if (std::isinf(q)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, q);
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

void NormParams::validate() const {
  require(r >= 2.0 && r < 3.0, "norms: need 2 <= r < 3");
  require(q_sol > 2.0 && q_sol <= 12.0 / 5.0, "norms: need 2 < q <= 12/5");
  require(s > 0.0, "norms: need s > 0");
  require(p > 1.0 && p <= 2.0, "norms: need 1 < p <= 2");
  require(s / 3.0 + 1.0 / p > 1.0 / r + 2.0 / 3.0, "norms: need s/3 + 1/p > 1/r + 2/3");
  require(1.0 / kappa >= 0.5 && 1.0 / kappa < 1.0 / q_sol + 1.0 / 3.0,
          "norms: need 1/2 <= 1/kappa < 1/q + 1/3");
  require(N > 0.0, "norms: need N > 0");
}

DyadicPartition NormParams::partition(const GridSpec& g) const {
  if (j_min > j_max) return DyadicPartition::for_grid(g);
  return DyadicPartition{j_min, j_max};
}

double forcing_snapshot_norm(const SpectralField& f, const NormParams& params) {
  return besov_norm(f, -params.s, params.p, 2.0, params.partition(f.grid())) +
         lp_norm(f, params.kappa);
}

double solution_snapshot_norm(const SpectralField& u, const NormParams& params) {
  return lp_norm(u, params.r) + lp_norm(gradient(u, 1), params.q_sol);
}

namespace {

double forcing_sup(const Trajectory& f, const NormParams& params, double window) {
  require(!f.fields.empty() && f.fields.size() == f.times.size(), "forcing norm: empty trajectory");
  double besov = 0.0, leb = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < f.fields.size(); ++i) {
    if (std::abs(f.times[i]) > window) continue;
    any = true;
    const auto& fi = f.fields[i];
    besov = std::max(besov, besov_norm(fi, -params.s, params.p, 2.0, params.partition(fi.grid())));
    leb = std::max(leb, lp_norm(fi, params.kappa));
  }
  require(any, "window norm: no samples inside the window");
  return besov + leb;
}

}  // namespace

double forcing_norm_L(const Trajectory& f, const NormParams& params) {
  return forcing_sup(f, params, kInfinity);
}

double window_norm_K(const Trajectory& f, double N, const NormParams& params) {
  return forcing_sup(f, params, N);
}

double solution_norm_X(const Trajectory& u, const NormParams& params) {
  require(!u.fields.empty(), "solution norm: empty trajectory");
  double a = 0.0, b = 0.0;
  for (const auto& ui : u.fields) {
    a = std::max(a, lp_norm(ui, params.r));
    b = std::max(b, lp_norm(gradient(ui, 1), params.q_sol));
  }
  return a + b;
}

}  // namespace rnse
