#include "kcut/operand.hpp"

#include <cmath>
#include <stdexcept>

namespace kcut {

HermitianOperand::HermitianOperand(Eigen::MatrixXcd m, double tol,
                                   bool psd_hint, bool require_hermitian)
    : entries(std::move(m)), hermitian_tol(tol), is_psd_hint(psd_hint) {
  if (entries.rows() != entries.cols()) {
    throw std::invalid_argument("operand must be square");
  }
  frobenius_ = entries.norm();
  hermitian_dev_ = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  hermitian_ok_ = hermitian_dev_ <= hermitian_tol;
  if (require_hermitian && !hermitian_ok_) {
    throw std::invalid_argument("operand exceeds Hermitian tolerance");
  }
}

double quadratic_form(const HermitianOperand& Q, const Assignment& a) {
  if (a.size() != Q.n()) {
    throw std::invalid_argument("assignment dimension does not match operand");
  }
  const Eigen::VectorXcd z = a.symbols();
  const Cplx val = z.dot(Q.entries * z); // z.dot(w) conjugates z, giving z^H Q z
  if (Q.is_hermitian() && std::abs(val.imag()) > 1e-8 * Q.frobenius_norm()) {
    throw std::runtime_error("quadratic form has non-negligible imaginary part");
  }
  return val.real();
}

double factor_quadratic_form(const Eigen::MatrixXcd& V, const Assignment& a) {
  if (a.size() != V.rows()) {
    throw std::invalid_argument("assignment dimension does not match factor");
  }
  const Eigen::VectorXcd z = a.symbols();
  return (V.adjoint() * z).squaredNorm();
}

} // namespace kcut
