#include "mpass/core.hpp"

#include <cmath>

namespace mpass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::InvalidEndpoints: return "InvalidEndpoints";
    case ErrorCode::BracketDegenerate: return "BracketDegenerate";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::SeparationFailed: return "SeparationFailed";
    case ErrorCode::LevelNotReached: return "LevelNotReached";
    case ErrorCode::NotInBasin: return "NotInBasin";
    case ErrorCode::OracleInconsistent: return "OracleInconsistent";
    case ErrorCode::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool all_finite(const Vector& x) noexcept { return x.size() > 0 && x.allFinite(); }

void require_finite(const Vector& x, const char* what) {
  if (!all_finite(x)) throw Error(ErrorCode::NonFinite, std::string(what) + " is empty or not finite");
}

void Tolerances::validate() const {
  const bool ok = grad_tol > 0 && t_budget > 0 && settle_tol > 0 && sep_eps > 0 && n_max >= 1 &&
                  step_ctrl.rtol > 0 && step_ctrl.atol > 0 && step_ctrl.h_init > 0 && step_ctrl.h_min > 0 &&
                  step_ctrl.h_max >= step_ctrl.h_min && step_ctrl.h_fixed > 0;
  if (!ok) throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive and n_max >= 1");
}

double audit_gradient(const Functional& f, const Vector& x, double h) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "audit step h must be positive");
  require_finite(x, "audit point");
  const Vector g = f.gradient(x);
  require_finite(g, "declared gradient");
  if (g.size() != x.size()) throw Error(ErrorCode::BadDimension, "gradient dimension mismatch");
  double worst = 0.0;
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f.value(probe);
    probe[i] = x[i] - h;
    const double fm = f.value(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw Error(ErrorCode::NonFinite, "functional value not finite");
    worst = std::max(worst, std::abs((fp - fm) / (2 * h) - g[i]));
  }
  return worst;
}

}  // namespace mpass
