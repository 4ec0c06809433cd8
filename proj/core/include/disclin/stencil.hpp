#pragma once

#include <Eigen/Dense>

#include "disclin/grid.hpp"

// Low-level difference operators on nodal arrays (n_r x n_phi), used by the
// energy evaluators and their exact adjoints. All operators are linear with
// fixed coefficient tables, so apply/applied-transpose pairs are exact
// adjoints in floating point up to summation order.
//
// d_s differentiates along s = log r (uniform spacing, central interior,
// second-order one-sided rows at both ends). d_phi is the periodic central
// difference. Radial derivatives follow as v_r = d_s v / r,
// v_rr = (d_ss v - d_s v) / r^2.

namespace disclin::stencil {

Eigen::ArrayXXd d_s(const PolarGrid& g, const Eigen::ArrayXXd& f);
Eigen::ArrayXXd d_ss(const PolarGrid& g, const Eigen::ArrayXXd& f);
Eigen::ArrayXXd d_phi(const PolarGrid& g, const Eigen::ArrayXXd& f);
Eigen::ArrayXXd d_phiphi(const PolarGrid& g, const Eigen::ArrayXXd& f);

Eigen::ArrayXXd d_s_adj(const PolarGrid& g, const Eigen::ArrayXXd& w);
Eigen::ArrayXXd d_ss_adj(const PolarGrid& g, const Eigen::ArrayXXd& w);
Eigen::ArrayXXd d_phi_adj(const PolarGrid& g, const Eigen::ArrayXXd& w);
Eigen::ArrayXXd d_phiphi_adj(const PolarGrid& g, const Eigen::ArrayXXd& w);

}  // namespace disclin::stencil
