#include "burstmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "burstmap/lambert_w.hpp"
#include "burstmap/numerics.hpp"

namespace burstmap {
namespace {

constexpr double kDomainSlack = 1e-9;

std::string describe(const ModelParams& p) {
  std::ostringstream s;
  s << "{epsilon=" << p.epsilon << ", w=" << p.w << ", a=" << p.a
    << ", b=" << p.b << "}";
  return s.str();
}

}  // namespace

ModelParams preset_b0() { return {0.01, 1.0, 0.8, 0.0}; }
ModelParams preset_b05() { return {0.01, 1.0, 0.4, 0.5}; }

std::optional<ModelParams> preset_by_name(std::string_view name) {
  if (name == "b0") return preset_b0();
  if (name == "b05") return preset_b05();
  return std::nullopt;
}

BranchRadii branch_radii(double y) {
  BranchRadii r;
  if (y < kSaddleNode) return r;
  const double s = std::sqrt(y - kSaddleNode);
  r.r_P = std::sqrt(1.0 + s);
  if (y <= kHopf) r.r_U = std::sqrt(std::max(0.0, 1.0 - s));
  return r;
}

double cutoff_slow_value(double A) {
  if (A < 0.0 || A > 1.0) return kSaddleNode;
  const double u = 1.0 - A * A;
  return u * u - 1.0;
}

BurstModel::BurstModel(ModelParams params) : params_(params) {
  validate_drifts();
  const double y_J = jump_up(kSaddleNode);
  geometry_.y_J = y_J;
  geometry_.T_S = h_S_inv(y_J);
  c_P_ = geometry_.T_S - h_P_raw(y_J);
  geometry_.T_P = h_P_raw(kSaddleNode) + c_P_ - geometry_.T_S;
  geometry_.T = geometry_.T_S + geometry_.T_P;
  y_domain_hi_ = y_J;
  if (!(spiking_drift(y_J) < 0.0)) {
    throw InvalidParams(
        "spiking-branch drift a - r_P(y)^2 - b*y must be negative on "
        "[y_SN, y_J] for " + describe(params_));
  }
}

BurstModel::BurstModel(ModelParams params, double jump_up_override)
    : BurstModel(params) {
  if (!(jump_up_override > kSaddleNode) || !std::isfinite(jump_up_override)) {
    throw InvalidParams("jump-up override must exceed y_SN");
  }
  const double natural = geometry_.y_J;
  geometry_.y_J = jump_up_override;
  if (!(silent_drift(jump_up_override) > 0.0)) {
    throw InvalidParams("silent-branch drift a - b*y must be positive at the "
                        "overridden jump-up value");
  }
  if (!(spiking_drift(jump_up_override) < 0.0)) {
    throw InvalidParams("spiking-branch drift a - r_P(y)^2 - b*y must be "
                        "negative at the overridden jump-up value");
  }
  geometry_.T_S = h_S_inv(jump_up_override);
  c_P_ = geometry_.T_S - h_P_raw(jump_up_override);
  geometry_.T_P = h_P_raw(kSaddleNode) + c_P_ - geometry_.T_S;
  geometry_.T = geometry_.T_S + geometry_.T_P;
  y_domain_hi_ = std::max(natural, jump_up_override);
}

void BurstModel::validate_drifts() const {
  const auto& p = params_;
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw InvalidParams("epsilon must be positive for " + describe(p));
  }
  if (!std::isfinite(p.w) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
    throw InvalidParams("parameters must be finite: " + describe(p));
  }
  if (p.b < 0.0) {
    throw InvalidParams("b must be non-negative for " + describe(p));
  }
  // Silent drift a - b*y is linear in y; y_J < a/b whenever the drift is
  // positive at y_SN, so checking the left end suffices.
  if (!(silent_drift(kSaddleNode) > 0.0) || !(p.a > 0.0)) {
    throw InvalidParams(
        "silent-branch drift a - b*y must be positive on [y_SN, y_J] for " +
        describe(p));
  }
  // Spiking drift is convex in y; check at y_SN here, at y_J once known.
  if (!(spiking_drift(kSaddleNode) < 0.0)) {
    throw InvalidParams(
        "spiking-branch drift a - r_P(y)^2 - b*y must be negative on "
        "[y_SN, y_J] for " + describe(p));
  }
}

double BurstModel::silent_drift(double y) const {
  return params_.epsilon * (params_.a - params_.b * y);
}

double BurstModel::spiking_drift(double y) const {
  const double s = std::sqrt(std::max(0.0, y - kSaddleNode));
  return params_.epsilon * (params_.a - 1.0 - s - params_.b * y);
}

double BurstModel::h_S(double t) const {
  return silent_profile(kSaddleNode, t);
}

double BurstModel::h_S_rate(double t) const { return silent_drift(h_S(t)); }

double BurstModel::h_S_inv(double y) const {
  const auto& p = params_;
  if (p.b == 0.0) return (y - kSaddleNode) / (p.epsilon * p.a);
  const double rest = p.a - p.b * y;
  if (!(rest > 0.0)) {
    throw DomainError("h_S_inv: slow value beyond the silent fixed point a/b");
  }
  return (std::log(p.epsilon * (p.a - p.b * kSaddleNode)) -
          std::log(p.epsilon * rest)) /
         (p.epsilon * p.b);
}

double BurstModel::h_S_inv_slope(double y) const {
  return 1.0 / silent_drift(y);
}

double BurstModel::h_P_raw(double y) const {
  const auto& p = params_;
  const double s = std::sqrt(std::max(0.0, y - kSaddleNode));
  if (p.b == 0.0) {
    return -2.0 / p.epsilon * ((p.a - 1.0) * std::log(s + 1.0 - p.a) + s);
  }
  const double b = p.b;
  const double c = 1.0 - p.a - b;
  const double q = b * s * s + s + c;  // = b*y + s + 1 - a
  const double disc = 4.0 * b * c - 1.0;
  double inv_quadratic;  // antiderivative of 1 / (b s^2 + s + c)
  if (disc > 1e-14) {
    const double r = std::sqrt(disc);
    inv_quadratic = 2.0 / r * std::atan((2.0 * b * s + 1.0) / r);
  } else if (disc < -1e-14) {
    const double r = std::sqrt(-disc);
    inv_quadratic =
        std::log(std::fabs((2.0 * b * s + 1.0 - r) / (2.0 * b * s + 1.0 + r))) /
        r;
  } else {
    inv_quadratic = -2.0 / (2.0 * b * s + 1.0);
  }
  return (inv_quadratic - std::log(q)) / (p.epsilon * b);
}

double BurstModel::h_P_inv(double y) const {
  if (y < kSaddleNode - kDomainSlack || y > y_domain_hi_ + kDomainSlack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "h_P_inv: slow value " << y << " outside [" << kSaddleNode << ", "
        << y_domain_hi_ << "]";
    throw DomainError(msg.str());
  }
  return h_P_raw(std::max(y, kSaddleNode)) + c_P_;
}

double BurstModel::h_P_inv_slope(double y) const {
  return 1.0 / spiking_drift(y);
}

double BurstModel::jump_up(double y_i) const {
  const auto& p = params_;
  if (p.b == 0.0) return -y_i;
  const double arg =
      -(p.a - p.b * y_i) / p.a * std::exp(p.b / p.a * y_i - 1.0);
  double w;
  try {
    w = lambert_w0(arg);
  } catch (const DomainError& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "jump_up: Lambert W argument " << arg << " (y_i=" << y_i
        << ") outside the principal branch: " << e.what();
    throw NumericError(msg.str());
  }
  return p.a / p.b * (w + 1.0);
}

double BurstModel::jump_up_slope(double y_i) const {
  // Implicit differentiation of int_{y_i}^{y_j} y / (a - b y) dy = 0.
  const double y_j = jump_up(y_i);
  if (params_.b == 0.0) return -1.0;
  return y_i * silent_drift(y_j) / (y_j * silent_drift(y_i));
}

double BurstModel::silent_profile(double y_i, double t) const {
  const auto& p = params_;
  if (p.b == 0.0) return y_i + p.epsilon * p.a * t;
  const double rest = p.a / p.b;
  return rest + (y_i - rest) * std::exp(-p.epsilon * p.b * t);
}

double BurstModel::silent_profile_integral(double y_i, double t) const {
  const auto& p = params_;
  if (p.b == 0.0) return y_i * t + 0.5 * p.epsilon * p.a * t * t;
  const double rest = p.a / p.b;
  const double k = p.epsilon * p.b;
  return rest * t + (y_i - rest) * (-std::expm1(-k * t)) / k;
}

double BurstModel::silent_time(double y_i, double y) const {
  return h_S_inv(y) - h_S_inv(y_i);
}

}  // namespace burstmap
