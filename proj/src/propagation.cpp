#include "evtrust/propagation.hpp"

#include <algorithm>
#include <vector>

#include "evtrust/errors.hpp"

namespace evtrust {

Belief concatenate(const Belief& referrer, const Belief& report) {
  const double b = referrer.b() * report.b();
  const double d = referrer.b() * report.d();
  return {b, d, 1.0 - b - d};
}

Evidence aggregate(const Evidence& a, const Evidence& b) {
  return {a.r() + b.r(), a.s() + b.s()};
}

Evidence combine_referrals(std::span<const ReferralPath> paths) {
  if (paths.empty()) throw ArgumentError("combine_referrals needs at least one path");
  std::vector<Evidence> parts;
  parts.reserve(paths.size());
  for (const ReferralPath& path : paths) {
    // A fully trusted referrer passes the report through untouched; skipping
    // the belief round trip keeps that case exact.
    if (path.referrer_trust.b() == 1.0) {
      parts.push_back(path.report);
      continue;
    }
    const Belief discounted = concatenate(path.referrer_trust, to_belief(path.report));
    parts.push_back(from_belief(discounted));
  }
  // Summing in a canonical order makes the result independent of path order.
  std::sort(parts.begin(), parts.end(), [](const Evidence& x, const Evidence& y) {
    return x.r() != y.r() ? x.r() < y.r() : x.s() < y.s();
  });
  Evidence combined;
  for (const Evidence& part : parts) combined = aggregate(combined, part);
  return combined;
}

}  // namespace evtrust
