#pragma once

#include <string>

namespace vetk {

enum class FrailtyFamily { gamma, positive_stable };

std::string to_string(FrailtyFamily family);
FrailtyFamily frailty_family_from_string(const std::string& name);

/// Law of the latent multiplicative frailty U.
///
/// Gamma frailty has mean 1 and variance nu >= 0 (nu = 0 is "no frailty").
/// Positive-stable frailty is PS(alpha, alpha, 0) with Laplace transform
/// E[exp(-sU)] = exp(-s^alpha), 0 < alpha <= 1 (alpha = 1 is "no frailty").
/// Kendall's tau between the two potential outcomes is derived on demand and
/// never stored.
class FrailtySpec {
 public:
  static FrailtySpec none() { return FrailtySpec(FrailtyFamily::gamma, 0.0); }
  static FrailtySpec gamma(double variance);
  static FrailtySpec positive_stable(double alpha);

  FrailtyFamily family() const { return family_; }
  /// nu for gamma, alpha for positive stable.
  double parameter() const { return parameter_; }
  double kendall_tau() const;
  bool is_degenerate() const;

  friend bool operator==(const FrailtySpec&, const FrailtySpec&) = default;

 private:
  FrailtySpec(FrailtyFamily family, double parameter)
      : family_(family), parameter_(parameter) {}

  FrailtyFamily family_;
  double parameter_;
};

/// Inverts Kendall's tau: nu = 2K/(1-K) for gamma, alpha = 1-K for stable.
FrailtySpec spec_from_tau(FrailtyFamily family, double kendall_tau);

inline double kendall_tau(const FrailtySpec& spec) { return spec.kendall_tau(); }

}  // namespace vetk
