#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "veflow/errors.hpp"

namespace veflow {

// Symmetric 2x2 tensor value, off-diagonal stored once. Houses nodal values
// of the elastic Cauchy-Green tensor and everything derived from it through
// the spectrum.
template <typename Scalar>
struct SymMat2T {
  Scalar a11{0}, a12{0}, a22{0};

  static SymMat2T identity() { return {Scalar(1), Scalar(0), Scalar(1)}; }
  static SymMat2T zero() { return {Scalar(0), Scalar(0), Scalar(0)}; }
  static SymMat2T diag(Scalar d1, Scalar d2) { return {d1, Scalar(0), d2}; }

  Scalar trace() const { return a11 + a22; }
  Scalar det() const { return a11 * a22 - a12 * a12; }

  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << a11, a12, a12, a22;
    return m;
  }
  static SymMat2T from_matrix(const Eigen::Matrix<Scalar, 2, 2>& m) {
    return {m(0, 0), Scalar(0.5) * (m(0, 1) + m(1, 0)), m(1, 1)};
  }

  SymMat2T operator+(const SymMat2T& o) const {
    return {a11 + o.a11, a12 + o.a12, a22 + o.a22};
  }
  SymMat2T operator-(const SymMat2T& o) const {
    return {a11 - o.a11, a12 - o.a12, a22 - o.a22};
  }
  SymMat2T operator*(Scalar s) const { return {a11 * s, a12 * s, a22 * s}; }
  SymMat2T& operator+=(const SymMat2T& o) {
    a11 += o.a11;
    a12 += o.a12;
    a22 += o.a22;
    return *this;
  }
};

template <typename Scalar>
SymMat2T<Scalar> operator*(Scalar s, const SymMat2T<Scalar>& m) {
  return m * s;
}

// Frobenius inner product A : B (off-diagonal counted twice).
template <typename Scalar>
Scalar ddot(const SymMat2T<Scalar>& a, const SymMat2T<Scalar>& b) {
  return a.a11 * b.a11 + Scalar(2) * a.a12 * b.a12 + a.a22 * b.a22;
}

// Frobenius norm |A|.
template <typename Scalar>
Scalar frobenius_norm(const SymMat2T<Scalar>& a) {
  using std::sqrt;
  return sqrt(ddot(a, a));
}

// Orthonormal eigenbasis of a symmetric 2x2 matrix. The rotation
// R = [[cos_t, -sin_t], [sin_t, cos_t]] satisfies
// R * diag(eig1, eig2) * R^T = input, with eig1 >= eig2.
template <typename Scalar>
struct SpectralDecompT {
  Scalar eig1{0}, eig2{0};
  Scalar cos_t{1}, sin_t{0};

  SymMat2T<Scalar> reconstruct() const {
    const Scalar c = cos_t, s = sin_t;
    return {c * c * eig1 + s * s * eig2, c * s * (eig1 - eig2),
            s * s * eig1 + c * c * eig2};
  }
};

// Closed-form eigendecomposition, eigenvalues in descending order. Exact for
// diagonal input. Near-coincident eigenvalues collapse to the identity
// rotation to avoid cancellation in the eigenvector formulas.
template <typename Scalar>
SpectralDecompT<Scalar> eig_sym2(const SymMat2T<Scalar>& m) {
  using std::abs;
  using std::atan2;
  using std::cos;
  using std::hypot;
  using std::max;
  using std::sin;

  SpectralDecompT<Scalar> d;
  const Scalar mean = Scalar(0.5) * (m.a11 + m.a22);
  const Scalar half_gap = Scalar(0.5) * (m.a11 - m.a22);
  const Scalar radius = hypot(half_gap, m.a12);
  d.eig1 = mean + radius;
  d.eig2 = mean - radius;

  if (Scalar(2) * radius < Scalar(1e-14) * max(Scalar(1), abs(d.eig1))) {
    d.eig1 = d.eig2 = mean;
    d.cos_t = 1;
    d.sin_t = 0;
    return d;
  }
  // Half-angle from (a11 - a22, 2 a12); theta = 0 exactly when a12 = 0 and
  // a11 >= a22, so diagonal matrices decompose without roundoff.
  const Scalar theta =
      Scalar(0.5) * atan2(Scalar(2) * m.a12, m.a11 - m.a22);
  d.cos_t = cos(theta);
  d.sin_t = sin(theta);
  return d;
}

// Spectral extension of a scalar function: R * f(D) * R^T. The function may
// throw DomainError at an eigenvalue outside its domain.
template <typename Scalar, typename F>
SymMat2T<Scalar> matfun_apply(const SymMat2T<Scalar>& m, F&& f) {
  const auto d = eig_sym2(m);
  const Scalar f1 = f(d.eig1);
  const Scalar f2 = f(d.eig2);
  const Scalar c = d.cos_t, s = d.sin_t;
  return {c * c * f1 + s * s * f2, c * s * (f1 - f2), s * s * f1 + c * c * f2};
}

template <typename Scalar>
bool is_positive_definite(const SymMat2T<Scalar>& m) {
  const auto d = eig_sym2(m);
  return d.eig2 > Scalar(0);
}

template <typename Scalar>
Scalar min_eigenvalue(const SymMat2T<Scalar>& m) {
  return eig_sym2(m).eig2;
}

// Matrix logarithm for positive definite input.
template <typename Scalar>
SymMat2T<Scalar> log_sym(const SymMat2T<Scalar>& m) {
  return matfun_apply(m, [](Scalar s) {
    if (!(s > Scalar(0)))
      throw DomainError("log_sym: nonpositive eigenvalue");
    return std::log(s);
  });
}

// Inverse through the spectrum (equals the adjugate formula for symmetric
// input, but stays consistent with the other spectral functions).
template <typename Scalar>
SymMat2T<Scalar> inv_sym(const SymMat2T<Scalar>& m) {
  return matfun_apply(m, [](Scalar s) {
    if (s == Scalar(0)) throw DomainError("inv_sym: zero eigenvalue");
    return Scalar(1) / s;
  });
}

// tr ln B for positive definite B; equals ln det B.
template <typename Scalar>
Scalar trace_log(const SymMat2T<Scalar>& m) {
  const auto d = eig_sym2(m);
  if (!(d.eig2 > Scalar(0)))
    throw NotPositiveDefinite("trace_log: nonpositive eigenvalue");
  return std::log(d.eig1) + std::log(d.eig2);
}

// Negative part [B]_- through the spectrum, s -> min(s, 0).
template <typename Scalar>
SymMat2T<Scalar> negative_part(const SymMat2T<Scalar>& m) {
  return matfun_apply(m, [](Scalar s) { return s < Scalar(0) ? s : Scalar(0); });
}

inline void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidDelta("delta must lie in (0,1)");
}

// Scalar regularized logarithm pair: g = g_delta(s) and beta = max(s, delta),
// the inverse of g'.
template <typename Scalar>
struct RegLogPair {
  Scalar g;
  Scalar beta;
};

template <typename Scalar>
RegLogPair<Scalar> regularized_log_pair(Scalar s, double delta) {
  check_delta(delta);
  const Scalar d = Scalar(delta);
  RegLogPair<Scalar> out;
  if (s < d) {
    out.g = s / d + std::log(d) - Scalar(1);
    out.beta = d;
  } else {
    out.g = std::log(s);
    out.beta = s;
  }
  return out;
}

template <typename Scalar>
Scalar g_delta_scalar(Scalar s, double delta) {
  return regularized_log_pair(s, delta).g;
}

template <typename Scalar>
Scalar beta_delta_scalar(Scalar s, double delta) {
  check_delta(delta);
  return s < Scalar(delta) ? Scalar(delta) : s;
}

template <typename Scalar>
SymMat2T<Scalar> g_delta(const SymMat2T<Scalar>& m, double delta) {
  check_delta(delta);
  return matfun_apply(m, [delta](Scalar s) { return g_delta_scalar(s, delta); });
}

template <typename Scalar>
SymMat2T<Scalar> beta_delta(const SymMat2T<Scalar>& m, double delta) {
  check_delta(delta);
  return matfun_apply(m,
                      [delta](Scalar s) { return beta_delta_scalar(s, delta); });
}

// g_delta'(B) = beta_delta(B)^{-1}; eigenvalues are clamped below by delta,
// so the inverse always exists.
template <typename Scalar>
SymMat2T<Scalar> g_delta_prime(const SymMat2T<Scalar>& m, double delta) {
  check_delta(delta);
  return matfun_apply(m, [delta](Scalar s) {
    return Scalar(1) / beta_delta_scalar(s, delta);
  });
}

// Elastic energy density W(B) = (g/2) tr(B - ln B - I), or its regularized
// variant with g_delta in place of ln when delta is given.
template <typename Scalar>
Scalar elastic_energy_density(const SymMat2T<Scalar>& b, Scalar g_mod,
                              std::optional<double> delta = std::nullopt) {
  const auto d = eig_sym2(b);
  Scalar sum = 0;
  for (Scalar eig : {d.eig1, d.eig2}) {
    if (delta) {
      sum += eig - g_delta_scalar(eig, *delta) - Scalar(1);
    } else {
      if (!(eig > Scalar(0)))
        throw NotPositiveDefinite(
            "elastic_energy_density: nonpositive eigenvalue without delta");
      sum += eig - std::log(eig) - Scalar(1);
    }
  }
  return Scalar(0.5) * g_mod * sum;
}

// tr(B + B^{-1} - 2 I), with B replaced by beta_delta(B) when delta is given.
// Nonnegative; equals |B^{1/2} - B^{-1/2}|^2 on the spectrum.
template <typename Scalar>
Scalar relaxation_trace(const SymMat2T<Scalar>& b,
                        std::optional<double> delta = std::nullopt) {
  const auto d = eig_sym2(b);
  Scalar sum = 0;
  for (Scalar eig : {d.eig1, d.eig2}) {
    Scalar s = eig;
    if (delta) {
      s = beta_delta_scalar(eig, *delta);
    } else if (!(s > Scalar(0))) {
      throw NotPositiveDefinite(
          "relaxation_trace: nonpositive eigenvalue without delta");
    }
    sum += s + Scalar(1) / s - Scalar(2);
  }
  return sum;
}

using SymMat2 = SymMat2T<double>;
using SpectralDecomp = SpectralDecompT<double>;

}  // namespace veflow
