// Copyright 2026 The CDI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Deployment-time trust evaluation. A principal's policy names its trusted
// roots, per-property authority thresholds, and TEE requirements; a bundle
// carries everything validation needs. Validation consumes digests and
// metadata only, never artifact content.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdi/provenance.h"
#include "cdi/tee.h"
#include "cdi/vetting.h"

namespace cdi {

struct PropertyRequirement {
  std::string property;
  int threshold = 1;  // >= 1
  // Restricts the requirement to one operation type; absent = all
  // statements.
  std::optional<OperationType> applies_to;

  bool applies(OperationType type) const {
    return !applies_to.has_value() || *applies_to == type;
  }

  bool operator==(const PropertyRequirement&) const = default;
};

struct TrustPolicy {
  std::set<Digest> trusted_roots;  // non-empty
  std::vector<PropertyRequirement> requirements;
  bool require_tee = false;  // every statement must carry valid evidence
  std::vector<PublicKey> trusted_platform_keys;  // used when require_tee
  bool allow_origin_inputs = true;
  // Caller-supplied; validation never reads a clock. Must be set before
  // validate_bundle runs.
  std::optional<std::int64_t> evaluation_time;
};

// Self-contained: validation needs nothing beyond the bundle and a policy.
struct Bundle {
  ArtifactRef deployed;
  std::vector<SignedStatement> statements;
  std::vector<ToolCertification> certifications;
  std::vector<AuthorityCertificate> authority_certs;
};

struct ValidationReport {
  bool pass = false;
  std::vector<Violation> violations;  // sorted (statement, rule, detail)
  // statement digest -> (property -> count of certifying authorities), for
  // every property named in the policy's requirements.
  std::map<Digest, std::map<std::string, int>> per_statement_trust;
};

// Counts distinct certifying authorities per required property for one
// statement, at the policy's evaluation time.
std::map<std::string, int> evaluate_tool_trust(const SignedStatement& statement,
                                               const Bundle& bundle,
                                               const TrustPolicy& policy);

// Runs, in order: chain linking and integrity, TEE evidence checks when
// required, per-statement property thresholds, and the origin-input rule.
// Every failure appends a violation and all checks still run, so the report
// is a complete audit. Throws Error only on structural problems (e.g. an
// unset evaluation time), never for a failing verdict.
ValidationReport validate_bundle(const Bundle& bundle, const TrustPolicy& policy);
ValidationReport validate_bundle(const Bundle& bundle, const TrustPolicy& policy,
                                 const EvidenceVerifier& evidence_verifier);

}  // namespace cdi
