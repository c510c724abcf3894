#include "xorgame/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace xorgame {

namespace {

constexpr double kHermitianCheck = 1e-12;

std::size_t configured_threads() {
  const char* env = std::getenv("XORGAME_THREADS");
  if (env == nullptr) return 1;
  try {
    const long n = std::stol(env);
    return n > 0 ? static_cast<std::size_t>(n) : 1;
  } catch (...) {
    return 1;
  }
}

}  // namespace

double operator_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && is_hermitian(a, kHermitianCheck * std::max(1.0, a.cwiseAbs().maxCoeff()))) {
    const CMat h = (a + a.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && (a - a.transpose()).cwiseAbs().maxCoeff() <= kHermitianCheck) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMat hermitian_sign(const CMat& a) {
  const CMat h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Vec s(h.rows());
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = es.eigenvalues()(k) < 0.0 ? -1.0 : 1.0;
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat column_space_basis(const CMat& a, double tol) {
  if (a.cols() == 0) return CMat(a.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

double min_eigenvalue(const Mat& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min(configured_threads(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace xorgame
