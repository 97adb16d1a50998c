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

#include "cdi/vetting.h"

#include <algorithm>

#include "cdi/error.h"
#include "cdi/json_io.h"

namespace cdi {

namespace {

bool is_well_formed_digest(const Digest& d) {
  if (d.hex.size() != 64) return false;
  for (char c : d.hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void check_validity(const Validity& validity) {
  if (validity.not_before >= validity.not_after) {
    throw Error("inverted validity window");
  }
}

struct PathSearch {
  // Candidates grouped by subject keyid, each group sorted by the digest of
  // the certificate's canonical bytes so the search order is stable no
  // matter how the pool was assembled.
  std::map<Digest, std::vector<const AuthorityCertificate*>> by_subject;
  std::map<const AuthorityCertificate*, Digest> cert_digest;
  const std::set<Digest>* trusted_roots = nullptr;
  std::int64_t at_time = 0;

  bool saw_validity_failure = false;
  bool saw_signature_failure = false;
  bool saw_untrusted_root = false;
  bool saw_depth_cut = false;

  CertPath path;
  std::set<Digest> on_path;  // certificate digests, for simple-path search

  explicit PathSearch(std::span<const AuthorityCertificate> pool,
                      const std::set<Digest>& roots, std::int64_t time)
      : trusted_roots(&roots), at_time(time) {
    for (const AuthorityCertificate& cert : pool) {
      Digest dig = digest(std::span<const std::uint8_t>(canonicalize(to_json(cert))));
      cert_digest.emplace(&cert, dig);
      by_subject[cert.subject_keyid()].push_back(&cert);
    }
    for (auto& [subject, certs] : by_subject) {
      std::sort(certs.begin(), certs.end(),
                [this](const AuthorityCertificate* a, const AuthorityCertificate* b) {
                  return cert_digest.at(a) < cert_digest.at(b);
                });
    }
  }

  // Extends the path toward a certificate for `issuer`. `signed_bytes` is
  // what the previous element (tool certification or child certificate) was
  // signed over; the candidate's subject key must verify it.
  bool extend(const Digest& issuer, const Bytes& signed_bytes,
              const Signature& signature) {
    auto group = by_subject.find(issuer);
    if (group == by_subject.end()) return false;
    if (static_cast<int>(path.size()) >= kMaxPathDepth) {
      saw_depth_cut = true;
      return false;
    }

    for (const AuthorityCertificate* candidate : group->second) {
      if (on_path.contains(cert_digest.at(candidate))) continue;
      if (!candidate->validity.contains(at_time)) {
        saw_validity_failure = true;
        continue;
      }
      bool child_ok = false;
      try {
        child_ok = verify(candidate->subject.public_key,
                          std::span<const std::uint8_t>(signed_bytes), signature);
      } catch (const DecodeError&) {
        child_ok = false;
      }
      if (!child_ok) {
        saw_signature_failure = true;
        continue;
      }

      path.push_back(*candidate);
      on_path.insert(cert_digest.at(candidate));

      if (candidate->self_signed()) {
        bool self_ok = false;
        try {
          Bytes own_bytes = authority_cert_signing_bytes(*candidate);
          self_ok = verify(candidate->subject.public_key,
                           std::span<const std::uint8_t>(own_bytes),
                           candidate->signature);
        } catch (const DecodeError&) {
          self_ok = false;
        }
        if (!self_ok) {
          saw_signature_failure = true;
        } else if (!trusted_roots->contains(candidate->subject_keyid())) {
          saw_untrusted_root = true;
        } else {
          return true;
        }
      } else {
        Bytes candidate_bytes = authority_cert_signing_bytes(*candidate);
        if (extend(candidate->issuer_keyid, candidate_bytes, candidate->signature)) {
          return true;
        }
      }

      on_path.erase(cert_digest.at(candidate));
      path.pop_back();
    }
    return false;
  }

  std::string failure_reason() const {
    std::string reason = "no path to a trusted root";
    if (saw_depth_cut) reason += "; path depth exceeded";
    if (saw_signature_failure) reason += "; signature failure on a candidate path";
    if (saw_validity_failure) reason += "; validity violation on a candidate path";
    if (saw_untrusted_root) {
      reason += "; reached a self-signed certificate outside the trusted roots";
    }
    return reason;
  }
};

}  // namespace

AuthorityCertificate issue_authority_cert(const KeyPair& issuer_key,
                                          std::string subject_name,
                                          const PublicKey& subject_pubkey,
                                          Validity validity) {
  check_validity(validity);
  AuthorityCertificate cert;
  cert.subject = AuthoritySubject{std::move(subject_name), subject_pubkey};
  cert.issuer_keyid = keyid(issuer_key.pub);
  cert.validity = validity;
  cert.signature = sign(
      issuer_key, std::span<const std::uint8_t>(authority_cert_signing_bytes(cert)));
  return cert;
}

ToolCertification issue_tool_certification(const KeyPair& authority_key,
                                           ToolMatch tool,
                                           std::vector<Digest> certified_keyids,
                                           std::vector<Digest> certified_measurements,
                                           std::vector<std::string> properties,
                                           Validity validity) {
  check_validity(validity);
  if (properties.empty()) {
    throw Error("tool certification must assert at least one property");
  }
  if (certified_keyids.empty() && certified_measurements.empty()) {
    throw Error("tool certification must cover at least one keyid or measurement");
  }
  for (const Digest& d : certified_keyids) {
    if (!is_well_formed_digest(d)) throw Error("malformed certified keyid");
  }
  for (const Digest& d : certified_measurements) {
    if (!is_well_formed_digest(d)) throw Error("malformed certified measurement");
  }

  ToolCertification cert;
  cert.tool = std::move(tool);
  cert.certified_keyids = std::move(certified_keyids);
  cert.certified_measurements = std::move(certified_measurements);
  cert.properties = std::move(properties);
  cert.issuer_keyid = keyid(authority_key.pub);
  cert.validity = validity;
  cert.signature =
      sign(authority_key,
           std::span<const std::uint8_t>(tool_certification_signing_bytes(cert)));
  return cert;
}

PathResult verify_cert_path(const ToolCertification& cert,
                            std::span<const AuthorityCertificate> pool,
                            const std::set<Digest>& trusted_roots,
                            std::int64_t at_time) {
  PathResult result;
  if (!cert.validity.contains(at_time)) {
    result.reason = "validity violation: certification window excludes evaluation time";
    return result;
  }

  PathSearch search(pool, trusted_roots, at_time);
  Bytes cert_bytes = tool_certification_signing_bytes(cert);
  if (search.extend(cert.issuer_keyid, cert_bytes, cert.signature)) {
    result.ok = true;
    result.path = std::move(search.path);
    result.root_keyid = result.path.back().subject_keyid();
    return result;
  }
  result.reason = search.failure_reason();
  return result;
}

std::map<Digest, Digest> certifying_authorities(
    const SignedStatement& statement, const std::string& property,
    std::span<const ToolCertification> certs,
    std::span<const AuthorityCertificate> pool,
    const std::set<Digest>& trusted_roots, std::int64_t at_time) {
  std::map<Digest, Digest> result;
  const ToolInfo& tool = statement.payload.tool;

  for (const ToolCertification& cert : certs) {
    if (!cert.tool.matches(tool)) continue;

    bool covers_key = std::find(cert.certified_keyids.begin(),
                                cert.certified_keyids.end(),
                                tool.keyid) != cert.certified_keyids.end();
    bool covers_measurement =
        statement.evidence.has_value() &&
        std::find(cert.certified_measurements.begin(),
                  cert.certified_measurements.end(),
                  statement.evidence->measurement) !=
            cert.certified_measurements.end();
    if (!covers_key && !covers_measurement) continue;

    if (std::find(cert.properties.begin(), cert.properties.end(), property) ==
        cert.properties.end()) {
      continue;
    }

    PathResult path = verify_cert_path(cert, pool, trusted_roots, at_time);
    if (!path.ok) continue;

    // One authority counts once, however many certifications it issued.
    auto [it, inserted] = result.emplace(cert.issuer_keyid, path.root_keyid);
    if (!inserted && path.root_keyid < it->second) {
      it->second = path.root_keyid;
    }
  }
  return result;
}

}  // namespace cdi
