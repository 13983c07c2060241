#include "gnefair/errors.hpp"

#include <sstream>
#include <utility>

namespace gnefair {

namespace {

std::string describe_no_convergence(int iterations, double residual,
                                    const std::string& context) {
  std::ostringstream os;
  os << "no convergence after " << iterations
     << " iterations (natural residual " << residual << ")";
  if (!context.empty()) os << ": " << context;
  return os.str();
}

std::string describe_validation(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  os << errors.size() << " validation error(s)";
  for (const auto& e : errors) os << "\n  " << e.path << ": " << e.message;
  return os.str();
}

}  // namespace

NoConvergence::NoConvergence(int iterations, double residual,
                             std::string context)
    : Error(describe_no_convergence(iterations, residual, context)),
      iterations_(iterations),
      residual_(residual) {}

ValidationError::ValidationError(std::vector<FieldError> errors)
    : Error(describe_validation(errors)), errors_(std::move(errors)) {}

}  // namespace gnefair
