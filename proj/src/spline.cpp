#include "mgsr/spline.hpp"

#include "mgsr/error.hpp"

namespace mgsr {

namespace {

// Solves the circulant system M[i-1] + 4 M[i] + M[i+1] = rhs[i] with the
// Sherman-Morrison reduction of a cyclic tridiagonal matrix.
std::vector<double> solve_cyclic_141(std::vector<double> rhs) {
  const std::size_t m = rhs.size();
  if (m == 1) return {rhs[0] / 6.0};
  if (m == 2) {
    // rows: 4 M0 + 2 M1 = r0, 2 M0 + 4 M1 = r1
    const double det = 12.0;
    return {(4.0 * rhs[0] - 2.0 * rhs[1]) / det, (4.0 * rhs[1] - 2.0 * rhs[0]) / det};
  }
  const double a = 1.0, b = 4.0, c = 1.0;
  const double alpha = c;  // corner A[m-1][0]
  const double beta = a;   // corner A[0][m-1]
  const double gamma = -b;

  std::vector<double> diag(m, b);
  diag[0] = b - gamma;
  diag[m - 1] = b - alpha * beta / gamma;

  auto thomas = [&](std::vector<double> d) {
    std::vector<double> cp(m), x(m);
    cp[0] = c / diag[0];
    d[0] /= diag[0];
    for (std::size_t i = 1; i < m; ++i) {
      const double denom = diag[i] - a * cp[i - 1];
      cp[i] = c / denom;
      d[i] = (d[i] - a * d[i - 1]) / denom;
    }
    x[m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i] = d[i] - cp[i] * x[i + 1];
    return x;
  };

  const std::vector<double> x = thomas(std::move(rhs));
  std::vector<double> u(m, 0.0);
  u[0] = gamma;
  u[m - 1] = alpha;
  const std::vector<double> z = thomas(std::move(u));
  const double fact = (x[0] + beta * x[m - 1] / gamma) / (1.0 + z[0] + beta * z[m - 1] / gamma);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

}  // namespace

std::vector<double> periodic_cubic_upsample(std::span<const double> values, int factor) {
  const std::size_t m = values.size();
  if (m == 0) return {};
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = values[(i + m - 1) % m];
    const double next = values[(i + 1) % m];
    rhs[i] = 6.0 * (next - 2.0 * values[i] + prev);
  }
  const std::vector<double> second = solve_cyclic_141(std::move(rhs));

  std::vector<double> out(m * static_cast<std::size_t>(factor));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ip = (i + 1) % m;
    for (int k = 0; k < factor; ++k) {
      const double t = static_cast<double>(k) / factor;
      const double s = 1.0 - t;
      out[i * factor + k] = s * values[i] + t * values[ip] + (s * s * s - s) * second[i] / 6.0 +
                            (t * t * t - t) * second[ip] / 6.0;
    }
  }
  return out;
}

Grid spline_prolong(const Grid& coarse, int factor) {
  if (factor < 2) throw ConfigError("spline_prolong: factor must be >= 2");
  const int m = coarse.n();
  const int nf = m * factor;

  // Pass 1: along columns of each coarse row -> m x nf.
  std::vector<double> rows(static_cast<std::size_t>(m) * nf);
  for (int i = 0; i < m; ++i) {
    auto line = periodic_cubic_upsample(coarse.values().subspan(static_cast<std::size_t>(i) * m, m), factor);
    std::copy(line.begin(), line.end(), rows.begin() + static_cast<std::ptrdiff_t>(i) * nf);
  }

  // Pass 2: along rows for each fine column -> nf x nf.
  Grid fine(nf, coarse.h() / factor);
  std::vector<double> column(m);
  for (int j = 0; j < nf; ++j) {
    for (int i = 0; i < m; ++i) column[i] = rows[static_cast<std::size_t>(i) * nf + j];
    auto line = periodic_cubic_upsample(column, factor);
    for (int r = 0; r < nf; ++r) fine(r, j) = line[r];
  }
  return fine;
}

}  // namespace mgsr
