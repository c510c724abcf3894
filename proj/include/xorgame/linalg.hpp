#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>

namespace xorgame {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Operator (spectral) norm. Hermitian inputs go through the eigenvalue
/// solver, anything else through a singular value decomposition.
double operator_norm(const CMat& a);
double operator_norm(const Mat& a);

bool is_hermitian(const CMat& a, double tol);

/// Spectral sign function of a Hermitian matrix; zero eigenvalues map to +1.
CMat hermitian_sign(const CMat& a);

CMat kron(const CMat& a, const CMat& b);

/// Orthogonal projection onto the span of the columns of `a` (complex),
/// using singular values above `tol`.
CMat column_space_basis(const CMat& a, double tol);

double min_eigenvalue(const Mat& symmetric);

/// Runs fn(0..count-1), possibly on several threads. Thread count comes from
/// XORGAME_THREADS (default 1). Callers write results by index, so the outcome
/// does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace xorgame
