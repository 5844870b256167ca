#ifndef DPBO_COMMON_HPP
#define DPBO_COMMON_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace dpbo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SampleRef = Eigen::Ref<const Eigen::VectorXd>;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  precondition_violated,
  budget_exceeded,
  numerical_failure,
  config_error,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace dpbo

#endif
