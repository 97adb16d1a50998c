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

#include "cdi/policy.h"

#include <algorithm>
#include <utility>

#include "cdi/error.h"

namespace cdi {

namespace {

std::int64_t required_evaluation_time(const TrustPolicy& policy) {
  if (!policy.evaluation_time.has_value()) {
    throw Error("policy evaluation time is not set");
  }
  return *policy.evaluation_time;
}

void check_policy(const TrustPolicy& policy) {
  required_evaluation_time(policy);
  if (policy.trusted_roots.empty()) {
    throw Error("policy must name at least one trusted root");
  }
  for (const PropertyRequirement& req : policy.requirements) {
    if (req.threshold < 1) {
      throw Error("requirement threshold must be >= 1");
    }
  }
}

// The signing key a statement claims to act as: the embedded public key
// whose entry matches payload.tool.keyid. Integrity rule "tool-key-unbound"
// separately ensures that entry's signature actually verifies.
const PublicKey* claimed_tool_key(const SignedStatement& stmt) {
  for (const StatementSignature& entry : stmt.signatures) {
    if (entry.keyid == stmt.payload.tool.keyid) return &entry.public_key;
  }
  return nullptr;
}

// Measurements the certifications pin for this statement's tool. An empty
// result means no matching certification constrains the enclave, so any
// measurement is acceptable to the evidence verifier.
std::vector<EnclaveMeasurement> expected_measurements_for(
    const SignedStatement& stmt, const Bundle& bundle) {
  std::set<EnclaveMeasurement> measurements;
  for (const ToolCertification& cert : bundle.certifications) {
    if (!cert.tool.matches(stmt.payload.tool)) continue;
    measurements.insert(cert.certified_measurements.begin(),
                        cert.certified_measurements.end());
  }
  return {measurements.begin(), measurements.end()};
}

void check_tee_evidence(const Digest& dig, const SignedStatement& stmt,
                        const Bundle& bundle, const TrustPolicy& policy,
                        const EvidenceVerifier& verifier,
                        std::vector<Violation>& violations) {
  if (!stmt.evidence.has_value()) {
    violations.push_back({dig.to_string(), std::string(rules::kTeeEvidenceMissing),
                          "statement carries no attestation evidence"});
    return;
  }
  const PublicKey* bound_key = claimed_tool_key(stmt);
  if (bound_key == nullptr) {
    violations.push_back(
        {dig.to_string(), std::string(rules::kTeeEvidenceInvalid),
         "no signature entry matches the tool keyid, so the evidence binds "
         "nothing"});
    return;
  }
  std::vector<EnclaveMeasurement> expected = expected_measurements_for(stmt, bundle);
  EvidenceCheck check = verifier.verify(*stmt.evidence, expected,
                                        policy.trusted_platform_keys, *bound_key);
  if (!check.ok) {
    violations.push_back(
        {dig.to_string(), std::string(rules::kTeeEvidenceInvalid), check.reason});
  }
}

}  // namespace

std::map<std::string, int> evaluate_tool_trust(const SignedStatement& statement,
                                               const Bundle& bundle,
                                               const TrustPolicy& policy) {
  std::int64_t at_time = required_evaluation_time(policy);
  std::map<std::string, int> counts;
  for (const PropertyRequirement& req : policy.requirements) {
    if (counts.contains(req.property)) continue;
    auto authorities = certifying_authorities(
        statement, req.property, bundle.certifications, bundle.authority_certs,
        policy.trusted_roots, at_time);
    counts.emplace(req.property, static_cast<int>(authorities.size()));
  }
  return counts;
}

ValidationReport validate_bundle(const Bundle& bundle, const TrustPolicy& policy) {
  return validate_bundle(bundle, policy, SimulatedEvidenceVerifier{});
}

ValidationReport validate_bundle(const Bundle& bundle, const TrustPolicy& policy,
                                 const EvidenceVerifier& evidence_verifier) {
  check_policy(policy);

  ValidationReport report;
  std::vector<Violation>& violations = report.violations;

  // Index statements by digest. Duplicates collapse to one node so every
  // later check runs once per distinct statement, but are still reported.
  ProvenanceChain chain;
  for (const SignedStatement& stmt : bundle.statements) {
    Digest dig = statement_digest(stmt);
    auto [it, inserted] = chain.statements.emplace(dig, stmt);
    (void)it;
    if (!inserted) {
      violations.push_back({dig.to_string(), std::string(rules::kDuplicateStatement),
                            "statement appears more than once in the bundle"});
    }
  }

  // Terminal resolution. link_chain would reject these bundles outright;
  // here the defects become violations so the rest of the audit still runs.
  std::vector<Digest> terminals;
  for (const auto& [dig, stmt] : chain.statements) {
    bool outputs_deployed =
        std::any_of(stmt.payload.outputs.begin(), stmt.payload.outputs.end(),
                    [&](const ArtifactRef& out) {
                      return out.digest == bundle.deployed.digest;
                    });
    if (outputs_deployed) terminals.push_back(dig);
  }
  if (terminals.empty()) {
    violations.push_back({"-", std::string(rules::kNoTerminal),
                          "no statement outputs the deployed artifact " +
                              bundle.deployed.digest.to_string()});
  } else if (terminals.size() > 1) {
    std::string listed;
    for (const Digest& dig : terminals) {
      if (!listed.empty()) listed += ", ";
      listed += dig.to_string();
    }
    violations.push_back({"-", std::string(rules::kAmbiguousTerminal),
                          "deployed artifact is output by multiple statements: " +
                              listed});
  } else {
    chain.terminal = terminals.front();
  }

  IntegrityReport integrity = verify_chain_integrity(chain);
  violations.insert(violations.end(), integrity.violations.begin(),
                    integrity.violations.end());

  if (policy.require_tee) {
    for (const auto& [dig, stmt] : chain.statements) {
      check_tee_evidence(dig, stmt, bundle, policy, evidence_verifier, violations);
    }
  }

  for (const auto& [dig, stmt] : chain.statements) {
    std::map<std::string, int> trust = evaluate_tool_trust(stmt, bundle, policy);
    for (const PropertyRequirement& req : policy.requirements) {
      if (!req.applies(stmt.payload.operation_type)) continue;
      int count = trust.at(req.property);
      if (count < req.threshold) {
        violations.push_back(
            {dig.to_string(), std::string(rules::kThresholdNotMet),
             "property \"" + req.property + "\" certified by " +
                 std::to_string(count) + " trusted authorities, " +
                 std::to_string(req.threshold) + " required"});
      }
    }
    report.per_statement_trust.emplace(dig, std::move(trust));
  }

  if (!policy.allow_origin_inputs) {
    for (const auto& [dig, stmt] : chain.statements) {
      if (stmt.payload.operation_type != OperationType::kTransform) continue;
      for (const InputRef& input : stmt.payload.inputs) {
        if (input.upstream.has_value()) continue;
        violations.push_back({dig.to_string(),
                              std::string(rules::kOriginInputForbidden),
                              "input \"" + input.artifact.name +
                                  "\" has no upstream statement link"});
      }
    }
  }

  std::sort(violations.begin(), violations.end());
  violations.erase(std::unique(violations.begin(), violations.end()),
                   violations.end());
  report.pass = violations.empty();
  return report;
}

}  // namespace cdi
