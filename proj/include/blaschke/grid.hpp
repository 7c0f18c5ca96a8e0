#pragma once

// Grids, quadrature and spectral differentiation on S^1 and S^2.
//
// S^1: N uniform angles, trigonometric (DFT) differentiation.
// S^2: Gauss-Legendre colatitudes x uniform longitudes (no node at a pole),
//      differentiation through a real spherical-harmonic analysis followed
//      by analytic per-mode synthesis of the chart derivatives.  Analysis
//      coefficients below a small relative threshold are dropped: they are
//      quadrature roundoff, and second-derivative synthesis would amplify
//      them by O(L^2).

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace blaschke {

inline constexpr double pi = 3.14159265358979323846;

// relative cutoff separating analysis coefficients from quadrature noise
inline constexpr double coeff_denoise = 1e-13;

struct grid_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chart-derivative bundle at the nodes.  For dim 2 only f, ft, ftt are
// populated (t = the single angle); for dim 3 t = colatitude, p = longitude.
struct Jet {
  std::vector<double> f, ft, fp, ftt, ftp, fpp;
};

class Grid {
 public:
  static std::shared_ptr<const Grid> circle(int n_angles);
  static std::shared_ptr<const Grid> sphere(int bandlimit);

  int dim() const { return dim_; }                  // ambient dimension n
  int resolution() const { return dim_ == 2 ? nt_ : bandlimit_; }
  std::size_t node_count() const { return weights_.size(); }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& theta() const { return theta_row_; }  // per node
  const std::vector<double>& sin_theta() const { return sin_row_; }

  // outward unit normal per node
  const std::vector<double>& zx() const { return zx_; }
  const std::vector<double>& zy() const { return zy_; }
  const std::vector<double>& zz() const { return zz_; }

  // index of the antipodal node (exact on both grids)
  const std::vector<std::size_t>& antipode() const { return antipode_; }

  int n_theta() const { return nt_; }
  int n_phi() const { return np_; }
  int max_degree() const { return lmax_; }  // exact for bandlimited fields

  double integrate(const std::vector<double>& v) const;
  Jet jet(const std::vector<double>& v) const;

  // longitudinal d/dphi, row by row; no projection across colatitudes.
  // Needed where a field is smooth along each circle of latitude but is
  // not a smooth scalar on the whole sphere (chart components of tensors).
  std::vector<double> dphi_rows(const std::vector<double>& v) const;

  // dim 2: evaluate the trigonometric interpolant at an arbitrary angle
  double eval_circle(const std::vector<double>& v, double angle) const;

 private:
  Grid() = default;

  void check(const std::vector<double>& v) const {
    if (v.size() != node_count()) throw grid_error("field/grid size mismatch");
  }

  Jet jet2(const std::vector<double>& v) const;
  Jet jet3(const std::vector<double>& v) const;

  // triangular index of (l, m), m <= l <= lmax
  std::size_t tri(int l, int m) const {
    return static_cast<std::size_t>(m) * (2 * lmax_ + 3 - m) / 2 + (l - m);
  }

  int dim_ = 0;
  int nt_ = 0, np_ = 0;
  int bandlimit_ = 0, lmax_ = 0;

  std::vector<double> weights_;
  std::vector<double> theta_row_, sin_row_;   // per node, for convenience
  std::vector<double> zx_, zy_, zz_;
  std::vector<std::size_t> antipode_;

  // dim 2 tables: cos(m theta_k), sin(m theta_k), m = 0..N/2
  std::vector<double> c2_, s2_;

  // dim 3 tables
  std::vector<double> theta_, sintheta_, costheta_, cottheta_, inv_sin2_;
  std::vector<double> glw_;                   // Gauss-Legendre weights in x
  std::vector<double> plm_, dplm_;            // [tri(l,m)*nt + i]
  std::vector<double> cosm_, sinm_;           // [m*np + j]
  double wphi_ = 0.0;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double t = std::cos(pi * (k + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        p0 = 1.0;
        p1 = t;
        for (int l = 2; l <= n; ++l) {
          double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
          p0 = p1;
          p1 = p2;
        }
        break;
      }
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[k] = -t;  // ascending
    x[n - 1 - k] = t;
    w[k] = w[n - 1 - k] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace detail

inline std::shared_ptr<const Grid> Grid::circle(int n_angles) {
  if (n_angles < 8 || n_angles % 2 != 0)
    throw domain_error("circle grid needs an even node count >= 8");
  auto g = std::shared_ptr<Grid>(new Grid);
  g->dim_ = 2;
  g->nt_ = n_angles;
  g->np_ = 1;
  g->lmax_ = n_angles / 2 - 1;
  const int n = n_angles;
  g->weights_.assign(n, 2.0 * pi / n);
  g->theta_row_.resize(n);
  g->sin_row_.resize(n);
  g->zx_.resize(n);
  g->zy_.resize(n);
  g->zz_.assign(n, 0.0);
  g->antipode_.resize(n);
  for (int k = 0; k < n; ++k) {
    double th = 2.0 * pi * k / n;
    g->theta_row_[k] = th;
    g->sin_row_[k] = std::sin(th);
    g->zx_[k] = std::cos(th);
    g->zy_[k] = std::sin(th);
    g->antipode_[k] = static_cast<std::size_t>((k + n / 2) % n);
  }
  const int mmax = n / 2;
  g->c2_.resize(static_cast<std::size_t>(mmax + 1) * n);
  g->s2_.resize(static_cast<std::size_t>(mmax + 1) * n);
  for (int m = 0; m <= mmax; ++m)
    for (int k = 0; k < n; ++k) {
      g->c2_[static_cast<std::size_t>(m) * n + k] = std::cos(m * g->theta_row_[k]);
      g->s2_[static_cast<std::size_t>(m) * n + k] = std::sin(m * g->theta_row_[k]);
    }
  return g;
}

inline std::shared_ptr<const Grid> Grid::sphere(int bandlimit) {
  if (bandlimit < 4) throw domain_error("sphere grid needs bandlimit >= 4");
  auto g = std::shared_ptr<Grid>(new Grid);
  g->dim_ = 3;
  g->bandlimit_ = bandlimit;
  g->lmax_ = bandlimit - 1;
  const int nt = 2 * bandlimit, np = 2 * bandlimit;
  g->nt_ = nt;
  g->np_ = np;
  g->wphi_ = 2.0 * pi / np;

  std::vector<double> x;
  detail::gauss_legendre(nt, x, g->glw_);
  // theta ascending <=> x descending
  g->theta_.resize(nt);
  g->sintheta_.resize(nt);
  g->costheta_.resize(nt);
  g->cottheta_.resize(nt);
  g->inv_sin2_.resize(nt);
  std::vector<double> glw_sorted(nt);
  for (int i = 0; i < nt; ++i) {
    double xi = x[nt - 1 - i];
    g->theta_[i] = std::acos(xi);
    g->costheta_[i] = xi;
    g->sintheta_[i] = std::sqrt((1.0 - xi) * (1.0 + xi));
    g->cottheta_[i] = xi / g->sintheta_[i];
    g->inv_sin2_[i] = 1.0 / (g->sintheta_[i] * g->sintheta_[i]);
    glw_sorted[i] = g->glw_[nt - 1 - i];
  }
  g->glw_ = glw_sorted;

  g->cosm_.resize(static_cast<std::size_t>(g->lmax_ + 1) * np);
  g->sinm_.resize(static_cast<std::size_t>(g->lmax_ + 1) * np);
  for (int m = 0; m <= g->lmax_; ++m)
    for (int j = 0; j < np; ++j) {
      double ph = g->wphi_ * j;
      g->cosm_[static_cast<std::size_t>(m) * np + j] = std::cos(m * ph);
      g->sinm_[static_cast<std::size_t>(m) * np + j] = std::sin(m * ph);
    }

  // orthonormal real-basis associated Legendre values and their
  // theta-derivatives at the colatitude nodes (sqrt(2) folded in for m>0)
  const int L = g->lmax_;
  const std::size_t ntab = g->tri(L, L) + 1;
  g->plm_.assign(ntab * nt, 0.0);
  g->dplm_.assign(ntab * nt, 0.0);
  std::vector<double> pmm(nt, std::sqrt(1.0 / (4.0 * pi)));
  for (int m = 0; m <= L; ++m) {
    if (m > 0) {
      double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      for (int i = 0; i < nt; ++i) pmm[i] *= f * g->sintheta_[i];
    }
    std::vector<double> pl1 = pmm, pl2(nt, 0.0);
    for (int l = m; l <= L; ++l) {
      std::vector<double>* cur;
      std::vector<double> tmp(nt);
      if (l == m) {
        cur = &pl1;
      } else if (l == m + 1) {
        double f = std::sqrt(2.0 * m + 3.0);
        for (int i = 0; i < nt; ++i) tmp[i] = f * g->costheta_[i] * pl1[i];
        pl2 = pl1;
        pl1 = tmp;
        cur = &pl1;
      } else {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double am1 =
            std::sqrt((4.0 * (l - 1.0) * (l - 1.0) - 1.0) / ((l - 1.0) * (l - 1.0) - double(m) * m));
        for (int i = 0; i < nt; ++i)
          tmp[i] = a * (g->costheta_[i] * pl1[i] - pl2[i] / am1);
        pl2 = pl1;
        pl1 = tmp;
        cur = &pl1;
      }
      const double scale = (m > 0) ? std::sqrt(2.0) : 1.0;
      double* prow = &g->plm_[g->tri(l, m) * nt];
      double* drow = &g->dplm_[g->tri(l, m) * nt];
      // sin(theta) dP/dtheta = l x P - e P_{l-1}
      double e = (l > m) ? std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0))
                         : 0.0;
      for (int i = 0; i < nt; ++i) {
        prow[i] = scale * (*cur)[i];
        double below = (l > m) ? pl2[i] : 0.0;
        drow[i] = scale * (l * g->costheta_[i] * (*cur)[i] - e * below) / g->sintheta_[i];
      }
    }
  }

  const std::size_t nn = static_cast<std::size_t>(nt) * np;
  g->weights_.resize(nn);
  g->theta_row_.resize(nn);
  g->sin_row_.resize(nn);
  g->zx_.resize(nn);
  g->zy_.resize(nn);
  g->zz_.resize(nn);
  g->antipode_.resize(nn);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * np + j;
      g->weights_[idx] = g->glw_[i] * g->wphi_;
      g->theta_row_[idx] = g->theta_[i];
      g->sin_row_[idx] = g->sintheta_[i];
      double ph = g->wphi_ * j;
      g->zx_[idx] = g->sintheta_[i] * std::cos(ph);
      g->zy_[idx] = g->sintheta_[i] * std::sin(ph);
      g->zz_[idx] = g->costheta_[i];
      // (theta, phi) -> (pi - theta, phi + pi); GL nodes are symmetric in x
      g->antipode_[idx] =
          static_cast<std::size_t>(nt - 1 - i) * np + (j + np / 2) % np;
    }
  return g;
}

inline double Grid::integrate(const std::vector<double>& v) const {
  check(v);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += weights_[k] * v[k];
  return s;
}

inline Jet Grid::jet(const std::vector<double>& v) const {
  check(v);
  return dim_ == 2 ? jet2(v) : jet3(v);
}

inline Jet Grid::jet2(const std::vector<double>& v) const {
  const int n = nt_, mmax = n / 2;
  std::vector<double> a(mmax + 1, 0.0), b(mmax + 1, 0.0);
  for (int m = 0; m <= mmax; ++m) {
    const double* cm = &c2_[static_cast<std::size_t>(m) * n];
    const double* sm = &s2_[static_cast<std::size_t>(m) * n];
    double ca = 0.0, cb = 0.0;
    for (int k = 0; k < n; ++k) {
      ca += v[k] * cm[k];
      cb += v[k] * sm[k];
    }
    double norm = (m == 0 || m == mmax) ? 1.0 / n : 2.0 / n;
    a[m] = ca * norm;
    b[m] = (m == 0 || m == mmax) ? 0.0 : cb * norm;
  }
  double amax = 0.0;
  for (int m = 0; m <= mmax; ++m) amax = std::max({amax, std::abs(a[m]), std::abs(b[m])});
  const double thr = coeff_denoise * amax;
  for (int m = 0; m <= mmax; ++m) {
    if (std::abs(a[m]) < thr) a[m] = 0.0;
    if (std::abs(b[m]) < thr) b[m] = 0.0;
  }

  Jet out;
  out.f.assign(n, 0.0);
  out.ft.assign(n, 0.0);
  out.ftt.assign(n, 0.0);
  for (int m = 0; m <= mmax; ++m) {
    if (a[m] == 0.0 && b[m] == 0.0) continue;
    const double* cm = &c2_[static_cast<std::size_t>(m) * n];
    const double* sm = &s2_[static_cast<std::size_t>(m) * n];
    const bool nyquist = (m == mmax);
    for (int k = 0; k < n; ++k) {
      double e = a[m] * cm[k] + b[m] * sm[k];
      out.f[k] += e;
      if (!nyquist) out.ft[k] += m * (-a[m] * sm[k] + b[m] * cm[k]);
      out.ftt[k] -= double(m) * m * e;
    }
  }
  return out;
}

inline Jet Grid::jet3(const std::vector<double>& v) const {
  const int nt = nt_, np = np_, L = lmax_;

  // longitudinal trig moments per colatitude row
  std::vector<double> fc(static_cast<std::size_t>(nt) * (L + 1));
  std::vector<double> fs(static_cast<std::size_t>(nt) * (L + 1));
  for (int m = 0; m <= L; ++m) {
    const double* cm = &cosm_[static_cast<std::size_t>(m) * np];
    const double* sm = &sinm_[static_cast<std::size_t>(m) * np];
    for (int i = 0; i < nt; ++i) {
      const double* row = &v[static_cast<std::size_t>(i) * np];
      double sc = 0.0, ss = 0.0;
      for (int j = 0; j < np; ++j) {
        sc += row[j] * cm[j];
        ss += row[j] * sm[j];
      }
      fc[static_cast<std::size_t>(i) * (L + 1) + m] = sc * wphi_;
      fs[static_cast<std::size_t>(i) * (L + 1) + m] = ss * wphi_;
    }
  }

  // analysis
  const std::size_t ntab = tri(L, L) + 1;
  std::vector<double> a(ntab, 0.0), b(ntab, 0.0);
  double amax = 0.0;
  for (int m = 0; m <= L; ++m)
    for (int l = m; l <= L; ++l) {
      const double* prow = &plm_[tri(l, m) * nt];
      double sa = 0.0, sb = 0.0;
      for (int i = 0; i < nt; ++i) {
        double wp = glw_[i] * prow[i];
        sa += wp * fc[static_cast<std::size_t>(i) * (L + 1) + m];
        if (m > 0) sb += wp * fs[static_cast<std::size_t>(i) * (L + 1) + m];
      }
      a[tri(l, m)] = sa;
      b[tri(l, m)] = sb;
      amax = std::max({amax, std::abs(sa), std::abs(sb)});
    }
  const double thr = coeff_denoise * amax;
  for (std::size_t k = 0; k < ntab; ++k) {
    if (std::abs(a[k]) < thr) a[k] = 0.0;
    if (std::abs(b[k]) < thr) b[k] = 0.0;
  }

  Jet out;
  const std::size_t nn = static_cast<std::size_t>(nt) * np;
  out.f.assign(nn, 0.0);
  out.ft.assign(nn, 0.0);
  out.fp.assign(nn, 0.0);
  out.ftt.assign(nn, 0.0);
  out.ftp.assign(nn, 0.0);
  out.fpp.assign(nn, 0.0);

  std::vector<double> sa0(nt), sa1(nt), sa2(nt), sb0(nt), sb1(nt), sb2(nt);
  for (int m = 0; m <= L; ++m) {
    bool any = false;
    for (int i = 0; i < nt; ++i) sa0[i] = sa1[i] = sa2[i] = sb0[i] = sb1[i] = sb2[i] = 0.0;
    for (int l = m; l <= L; ++l) {
      double al = a[tri(l, m)], bl = b[tri(l, m)];
      if (al == 0.0 && bl == 0.0) continue;
      any = true;
      const double* prow = &plm_[tri(l, m) * nt];
      const double* drow = &dplm_[tri(l, m) * nt];
      const double ll = double(l) * (l + 1);
      for (int i = 0; i < nt; ++i) {
        sa0[i] += al * prow[i];
        sa1[i] += al * drow[i];
        sa2[i] += al * ll * prow[i];
        if (m > 0) {
          sb0[i] += bl * prow[i];
          sb1[i] += bl * drow[i];
          sb2[i] += bl * ll * prow[i];
        }
      }
    }
    if (!any) continue;
    const double* cm = &cosm_[static_cast<std::size_t>(m) * np];
    const double* sm = &sinm_[static_cast<std::size_t>(m) * np];
    const double m2 = double(m) * m;
    for (int i = 0; i < nt; ++i) {
      // theta-theta from the associated Legendre ODE; no extra table
      const double ta = -cottheta_[i] * sa1[i] - sa2[i] + m2 * inv_sin2_[i] * sa0[i];
      const double tb = -cottheta_[i] * sb1[i] - sb2[i] + m2 * inv_sin2_[i] * sb0[i];
      double* f = &out.f[static_cast<std::size_t>(i) * np];
      double* ft = &out.ft[static_cast<std::size_t>(i) * np];
      double* fp = &out.fp[static_cast<std::size_t>(i) * np];
      double* ftt = &out.ftt[static_cast<std::size_t>(i) * np];
      double* ftp = &out.ftp[static_cast<std::size_t>(i) * np];
      double* fpp = &out.fpp[static_cast<std::size_t>(i) * np];
      for (int j = 0; j < np; ++j) {
        const double c = cm[j], s = sm[j];
        const double e0 = sa0[i] * c + sb0[i] * s;
        f[j] += e0;
        ft[j] += sa1[i] * c + sb1[i] * s;
        ftt[j] += ta * c + tb * s;
        if (m > 0) {
          fp[j] += m * (-sa0[i] * s + sb0[i] * c);
          ftp[j] += m * (-sa1[i] * s + sb1[i] * c);
          fpp[j] -= m2 * e0;
        }
      }
    }
  }
  return out;
}

inline std::vector<double> Grid::dphi_rows(const std::vector<double>& v) const {
  check(v);
  if (dim_ != 3) throw grid_error("dphi_rows needs a sphere grid");
  const int nt = nt_, np = np_, L = lmax_;
  std::vector<double> out(v.size(), 0.0);
  std::vector<double> am(L + 1), bm(L + 1);
  for (int i = 0; i < nt; ++i) {
    const double* row = &v[static_cast<std::size_t>(i) * np];
    double amax = 0.0;
    for (int m = 0; m <= L; ++m) {
      const double* cm = &cosm_[static_cast<std::size_t>(m) * np];
      const double* sm = &sinm_[static_cast<std::size_t>(m) * np];
      double sc = 0.0, ss = 0.0;
      for (int j = 0; j < np; ++j) {
        sc += row[j] * cm[j];
        ss += row[j] * sm[j];
      }
      am[m] = sc * 2.0 / np;
      bm[m] = ss * 2.0 / np;
      if (m == 0) am[0] *= 0.5, bm[0] = 0.0;
      amax = std::max({amax, std::abs(am[m]), std::abs(bm[m])});
    }
    const double thr = coeff_denoise * amax;
    double* orow = &out[static_cast<std::size_t>(i) * np];
    for (int m = 1; m <= L; ++m) {
      if (std::abs(am[m]) < thr) am[m] = 0.0;
      if (std::abs(bm[m]) < thr) bm[m] = 0.0;
      if (am[m] == 0.0 && bm[m] == 0.0) continue;
      const double* cm = &cosm_[static_cast<std::size_t>(m) * np];
      const double* sm = &sinm_[static_cast<std::size_t>(m) * np];
      for (int j = 0; j < np; ++j) orow[j] += m * (-am[m] * sm[j] + bm[m] * cm[j]);
    }
  }
  return out;
}

inline double Grid::eval_circle(const std::vector<double>& v, double angle) const {
  check(v);
  if (dim_ != 2) throw grid_error("eval_circle needs a circle grid");
  const int n = nt_, mmax = n / 2;
  double out = 0.0;
  for (int m = 0; m <= mmax; ++m) {
    const double* cm = &c2_[static_cast<std::size_t>(m) * n];
    const double* sm = &s2_[static_cast<std::size_t>(m) * n];
    double ca = 0.0, cb = 0.0;
    for (int k = 0; k < n; ++k) {
      ca += v[k] * cm[k];
      cb += v[k] * sm[k];
    }
    double norm = (m == 0 || m == mmax) ? 1.0 / n : 2.0 / n;
    out += ca * norm * std::cos(m * angle);
    if (m != 0 && m != mmax) out += cb * norm * std::sin(m * angle);
  }
  return out;
}

}  // namespace blaschke
