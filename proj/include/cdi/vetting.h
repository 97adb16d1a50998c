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
// Vetting authorities certify that tools preserve named security
// properties. Authorities form a certificate hierarchy; a tool
// certification is trusted when a path of valid authority certificates
// reaches a self-signed root the evaluating principal trusts.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cdi/crypto.h"
#include "cdi/provenance.h"

namespace cdi {

struct Validity {
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;  // must be > not_before

  // Inclusive at both ends.
  bool contains(std::int64_t at_time) const {
    return not_before <= at_time && at_time <= not_after;
  }

  bool operator==(const Validity&) const = default;
};

struct AuthoritySubject {
  std::string name;
  PublicKey public_key;

  bool operator==(const AuthoritySubject&) const = default;
};

struct AuthorityCertificate {
  AuthoritySubject subject;
  Digest issuer_keyid;  // equals the subject keyid for self-signed roots
  Validity validity;
  Signature signature;  // by issuer, over all fields above

  Digest subject_keyid() const { return keyid(subject.public_key); }
  bool self_signed() const { return issuer_keyid == subject_keyid(); }

  bool operator==(const AuthorityCertificate&) const = default;
};

struct ToolMatch {
  std::string id;
  std::string version_pattern;  // "*" or an exact version string

  bool matches(const ToolInfo& tool) const {
    return id == tool.id &&
           (version_pattern == "*" || version_pattern == tool.version);
  }

  bool operator==(const ToolMatch&) const = default;
};

struct ToolCertification {
  ToolMatch tool;
  std::vector<Digest> certified_keyids;        // signing keys vouched for
  std::vector<Digest> certified_measurements;  // or enclave measurements
  std::vector<std::string> properties;         // non-empty
  Digest issuer_keyid;
  Validity validity;
  Signature signature;  // by issuer, over all fields above

  bool operator==(const ToolCertification&) const = default;
};

// Leaf issuer first, self-signed root last.
using CertPath = std::vector<AuthorityCertificate>;

inline constexpr int kMaxPathDepth = 8;

// Self-signed when subject equals the issuer's own key. Throws Error on an
// inverted validity window.
AuthorityCertificate issue_authority_cert(const KeyPair& issuer_key,
                                          std::string subject_name,
                                          const PublicKey& subject_pubkey,
                                          Validity validity);

// Throws Error on empty properties or when neither keyids nor measurements
// are given.
ToolCertification issue_tool_certification(const KeyPair& authority_key,
                                           ToolMatch tool,
                                           std::vector<Digest> certified_keyids,
                                           std::vector<Digest> certified_measurements,
                                           std::vector<std::string> properties,
                                           Validity validity);

struct PathResult {
  bool ok = false;
  Digest root_keyid;   // anchoring trusted root, set on success
  CertPath path;       // set on success
  std::string reason;  // set on failure
};

// Builds a path from cert's issuer through the pool to a self-signed
// certificate whose keyid is a trusted root. Every certificate on the path,
// and cert itself, must carry a verifying signature and a validity window
// containing at_time. Depth is capped at kMaxPathDepth. The search is
// deterministic: candidate issuers are tried in canonical order.
PathResult verify_cert_path(const ToolCertification& cert,
                            std::span<const AuthorityCertificate> pool,
                            const std::set<Digest>& trusted_roots,
                            std::int64_t at_time);

// Distinct authorities (by issuer keyid) whose certifications match the
// statement's tool id and version, cover its signing keyid or evidence
// measurement, list the property, and anchor in a trusted root. Maps issuer
// keyid to the anchoring root keyid; an empty map is a valid result.
std::map<Digest, Digest> certifying_authorities(
    const SignedStatement& statement, const std::string& property,
    std::span<const ToolCertification> certs,
    std::span<const AuthorityCertificate> pool,
    const std::set<Digest>& trusted_roots, std::int64_t at_time);

}  // namespace cdi
