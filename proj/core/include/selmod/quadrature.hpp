#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands. All
// components share one subdivision, so derivative integrals stay consistent
// with the value they differentiate.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace selmod::quadrature {

template <std::size_t N>
struct Result {
  std::array<double, N> value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// Nonnegative Kronrod nodes, largest first; the Gauss nodes are the odd entries.
inline constexpr std::array<double, 8> kNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrod{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGauss{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N, class F>
void gk15(const F& f, double a, double b, std::array<double, N>& kron, double& err) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  std::array<double, N> gauss{};
  kron.fill(0.0);
  const auto centre = f(c);
  for (std::size_t k = 0; k < N; ++k) {
    kron[k] = centre[k] * kKronrod[7];
    gauss[k] = centre[k] * kGauss[3];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const auto lo = f(c - r * kNodes[j]);
    const auto hi = f(c + r * kNodes[j]);
    for (std::size_t k = 0; k < N; ++k) {
      const double s = lo[k] + hi[k];
      kron[k] += kKronrod[j] * s;
      if (j % 2 == 1) gauss[k] += kGauss[j / 2] * s;
    }
  }
  err = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    kron[k] *= r;
    err = std::fmax(err, std::fabs(kron[k] - r * gauss[k]));
  }
}

}  // namespace detail

// Integrates f over [a, b] until the summed component-wise error estimate is
// below abs_tol, bisecting the worst interval first.
template <std::size_t N, class F>
Result<N> integrate(const F& f, double a, double b, double abs_tol, int max_intervals = 2000) {
  struct Piece {
    double a, b, err;
    std::array<double, N> value;
  };
  std::vector<Piece> pieces;
  pieces.reserve(64);
  Result<N> out;
  Piece first{a, b, 0.0, {}};
  detail::gk15<N>(f, a, b, first.value, first.err);
  out.evaluations += 15;
  pieces.push_back(first);
  double total_err = first.err;
  while (total_err > abs_tol) {
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      out.converged = false;
      break;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pieces.size(); ++i) {
      if (pieces[i].err > pieces[worst].err) worst = i;
    }
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    Piece left{p.a, mid, 0.0, {}};
    Piece right{mid, p.b, 0.0, {}};
    detail::gk15<N>(f, left.a, left.b, left.value, left.err);
    detail::gk15<N>(f, right.a, right.b, right.value, right.err);
    out.evaluations += 30;
    pieces[worst] = left;
    pieces.push_back(right);
    total_err += left.err + right.err - p.err;
  }
  out.value.fill(0.0);
  out.error = 0.0;
  for (const auto& p : pieces) {
    for (std::size_t k = 0; k < N; ++k) out.value[k] += p.value[k];
    out.error += p.err;
  }
  return out;
}

}  // namespace selmod::quadrature
