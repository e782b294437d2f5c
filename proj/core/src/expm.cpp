#include "qubus/expm.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qubus {

namespace {

using Matrix = Eigen::MatrixXcd;

// Backward-error thresholds theta_m for double precision.
constexpr std::array<double, 5> kTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                       9.504178996162932e-1, 2.097847961257068e0,
                                       5.371920351148152e0};

double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

Matrix pade_solve(const Matrix& u, const Matrix& v) {
  // r = (v - u)^{-1} (v + u)
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade_low(const Matrix& a, int degree) {
  static const double b3[] = {120.0, 60.0, 12.0, 1.0};
  static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                              25200.0,    1512.0,    56.0,      1.0};
  static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                              2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const double* b = degree == 3 ? b3 : degree == 5 ? b5 : degree == 7 ? b7 : b9;

  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix odd = b[1] * ident;
  Matrix even = b[0] * ident;
  Matrix power = ident;
  for (int k = 1; 2 * k <= degree; ++k) {
    power = power * a2;
    odd += b[2 * k + 1] * power;
    even += b[2 * k] * power;
  }
  return pade_solve(a * odd, even);
}

Matrix pade13(const Matrix& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix u = a * (a6 * inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix v = a6 * inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return pade_solve(u, v);
}

}  // namespace

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw std::domain_error("expm: non-finite input");

  const double norm = one_norm(a);
  constexpr std::array<int, 4> kDegrees{3, 5, 7, 9};
  for (std::size_t i = 0; i < kDegrees.size(); ++i) {
    if (norm <= kTheta[i]) return pade_low(a, kDegrees[i]);
  }
  int squarings = 0;
  if (norm > kTheta[4]) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
  }
  Matrix result = pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

}  // namespace qubus
