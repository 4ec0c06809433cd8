#include "disclin/stencil.hpp"

namespace disclin::stencil {

using Eigen::ArrayXXd;

ArrayXXd d_s(const PolarGrid& g, const ArrayXXd& f) {
  const int n = g.n_r();
  const double ds = g.ds();
  ArrayXXd out(n, f.cols());
  out.row(0) = (-1.5 * f.row(0) + 2.0 * f.row(1) - 0.5 * f.row(2)) / ds;
  for (int k = 1; k < n - 1; ++k)
    out.row(k) = (f.row(k + 1) - f.row(k - 1)) / (2.0 * ds);
  out.row(n - 1) = (1.5 * f.row(n - 1) - 2.0 * f.row(n - 2) + 0.5 * f.row(n - 3)) / ds;
  return out;
}

ArrayXXd d_s_adj(const PolarGrid& g, const ArrayXXd& w) {
  const int n = g.n_r();
  const double ds = g.ds();
  ArrayXXd out = ArrayXXd::Zero(n, w.cols());
  out.row(0) += -1.5 / ds * w.row(0);
  out.row(1) += 2.0 / ds * w.row(0);
  out.row(2) += -0.5 / ds * w.row(0);
  for (int k = 1; k < n - 1; ++k) {
    out.row(k + 1) += w.row(k) / (2.0 * ds);
    out.row(k - 1) -= w.row(k) / (2.0 * ds);
  }
  out.row(n - 1) += 1.5 / ds * w.row(n - 1);
  out.row(n - 2) += -2.0 / ds * w.row(n - 1);
  out.row(n - 3) += 0.5 / ds * w.row(n - 1);
  return out;
}

ArrayXXd d_ss(const PolarGrid& g, const ArrayXXd& f) {
  const int n = g.n_r();
  const double ds2 = g.ds() * g.ds();
  ArrayXXd out(n, f.cols());
  out.row(0) = (2.0 * f.row(0) - 5.0 * f.row(1) + 4.0 * f.row(2) - f.row(3)) / ds2;
  for (int k = 1; k < n - 1; ++k)
    out.row(k) = (f.row(k + 1) - 2.0 * f.row(k) + f.row(k - 1)) / ds2;
  out.row(n - 1) =
      (2.0 * f.row(n - 1) - 5.0 * f.row(n - 2) + 4.0 * f.row(n - 3) - f.row(n - 4)) / ds2;
  return out;
}

ArrayXXd d_ss_adj(const PolarGrid& g, const ArrayXXd& w) {
  const int n = g.n_r();
  const double ds2 = g.ds() * g.ds();
  ArrayXXd out = ArrayXXd::Zero(n, w.cols());
  out.row(0) += 2.0 / ds2 * w.row(0);
  out.row(1) += -5.0 / ds2 * w.row(0);
  out.row(2) += 4.0 / ds2 * w.row(0);
  out.row(3) += -1.0 / ds2 * w.row(0);
  for (int k = 1; k < n - 1; ++k) {
    out.row(k + 1) += w.row(k) / ds2;
    out.row(k) -= 2.0 * w.row(k) / ds2;
    out.row(k - 1) += w.row(k) / ds2;
  }
  out.row(n - 1) += 2.0 / ds2 * w.row(n - 1);
  out.row(n - 2) += -5.0 / ds2 * w.row(n - 1);
  out.row(n - 3) += 4.0 / ds2 * w.row(n - 1);
  out.row(n - 4) += -1.0 / ds2 * w.row(n - 1);
  return out;
}

ArrayXXd d_phi(const PolarGrid& g, const ArrayXXd& f) {
  const int m = g.n_phi();
  const double dphi = g.dphi();
  ArrayXXd out(f.rows(), m);
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const int jm = (j + m - 1) % m;
    out.col(j) = (f.col(jp) - f.col(jm)) / (2.0 * dphi);
  }
  return out;
}

ArrayXXd d_phi_adj(const PolarGrid& g, const ArrayXXd& w) {
  const int m = g.n_phi();
  const double dphi = g.dphi();
  ArrayXXd out = ArrayXXd::Zero(w.rows(), m);
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const int jm = (j + m - 1) % m;
    out.col(jp) += w.col(j) / (2.0 * dphi);
    out.col(jm) -= w.col(j) / (2.0 * dphi);
  }
  return out;
}

ArrayXXd d_phiphi(const PolarGrid& g, const ArrayXXd& f) {
  const int m = g.n_phi();
  const double dphi2 = g.dphi() * g.dphi();
  ArrayXXd out(f.rows(), m);
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const int jm = (j + m - 1) % m;
    out.col(j) = (f.col(jp) - 2.0 * f.col(j) + f.col(jm)) / dphi2;
  }
  return out;
}

ArrayXXd d_phiphi_adj(const PolarGrid& g, const ArrayXXd& w) {
  const int m = g.n_phi();
  const double dphi2 = g.dphi() * g.dphi();
  ArrayXXd out = ArrayXXd::Zero(w.rows(), m);
  for (int j = 0; j < m; ++j) {
    const int jp = (j + 1) % m;
    const int jm = (j + m - 1) % m;
    out.col(jp) += w.col(j) / dphi2;
    out.col(j) -= 2.0 * w.col(j) / dphi2;
    out.col(jm) += w.col(j) / dphi2;
  }
  return out;
}

}  // namespace disclin::stencil
