#pragma once
// Independent reference computations for the tests. None of these call into
// the closed-form algebra they are used to check.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;

/// Coherent-state coefficients from log-gamma, no recursion.
inline Eigen::VectorXcd coherent(Complex a, int n_max) {
  Eigen::VectorXcd v(n_max);
  const double mod = std::abs(a);
  const double arg = std::arg(a);
  for (int n = 0; n < n_max; ++n) {
    if (mod == 0.0) {
      v(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = -0.5 * mod * mod + n * std::log(mod) - 0.5 * std::lgamma(n + 1.0);
    v(n) = std::polar(std::exp(log_mag), n * arg);
  }
  return v;
}

/// Truncated annihilation operator.
inline Eigen::MatrixXcd lower(int n) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Displacement via Eigen's own matrix exponential.
inline Eigen::MatrixXcd displacement(Complex beta, int n) {
  const Eigen::MatrixXcd a = lower(n);
  const Eigen::MatrixXcd gen = beta * a.adjoint() - std::conj(beta) * a;
  return gen.exp();
}

inline Eigen::MatrixXcd rotation(double theta, int n) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) r(k, k) = std::polar(1.0, -theta * k);
  return r;
}

/// exp(-i t [eps (a^dag e^{i phi} + a e^{-i phi}) + chi n]) via Eigen.
inline Eigen::MatrixXcd drive(double eps, double chi, double t, double phi, int n) {
  const Eigen::MatrixXcd a = lower(n);
  const Complex ph = std::polar(1.0, phi);
  const Eigen::MatrixXcd h = eps * (ph * a.adjoint() + std::conj(ph) * a) + chi * (a.adjoint() * a);
  const Eigen::MatrixXcd gen = Complex(0.0, -t) * h;
  return gen.exp();
}

/// |<a|b>|^2 for normalized vectors.
inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

inline Complex random_complex(std::mt19937_64& rng, double max_mod) {
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> phi(-M_PI, M_PI);
  return std::polar(max_mod * std::sqrt(r(rng)), phi(rng));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random normalized vector of `n` complex amplitudes.
inline std::vector<Complex> random_state(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<Complex> c(n);
  double norm = 0.0;
  for (auto& z : c) {
    z = {g(rng), g(rng)};
    norm += std::norm(z);
  }
  for (auto& z : c) z /= std::sqrt(norm);
  return c;
}

/// Phase difference reduced to (-pi, pi].
inline double phase_gap(double a, double b) { return std::remainder(a - b, 2.0 * M_PI); }

}  // namespace oracle
