#pragma once

// Propagating trust through referrals: discount a referrer's report by the
// client's trust in the referrer (concatenation), then sum the discounted
// evidence of independent referral paths (aggregation).

#include <span>

#include "evtrust/trust.hpp"

namespace evtrust {

struct ReferralPath {
  Belief referrer_trust;  // client's trust in the referrer
  Evidence report;        // referrer's claimed evidence about the provider
};

/// <b_R b', b_R d', 1 - b_R b' - b_R d'>. Only the referrer's belief weight
/// discounts the report.
Belief concatenate(const Belief& referrer, const Belief& report);

/// Componentwise sum.
Evidence aggregate(const Evidence& a, const Evidence& b);

/// Discount every report by its referrer trust (in belief space), map each
/// result back to evidence and aggregate. Paths must be independent.
/// Throws ArgumentError on an empty list.
Evidence combine_referrals(std::span<const ReferralPath> paths);

}  // namespace evtrust
