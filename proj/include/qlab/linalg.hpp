#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qlab/numeric.hpp"

namespace qlab {

using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

/// det(I + A) via pivoted LU on the complex matrix.
cplx det_id_plus(const MatC& a);

/// Dense exp(A) by scaling-and-squaring with a Pade approximant.
MatR expm(const MatR& a);

/// Eigenvalues of a general complex matrix.
VecC eigenvalues(const MatC& a);

/// Elementary symmetric polynomials e_0..e_kmax of the given values.
std::vector<cplx> elementary_symmetric(const VecC& vals, int kmax);

}  // namespace qlab
