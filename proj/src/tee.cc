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

#include "cdi/tee.h"

#include <algorithm>

#include "cdi/error.h"
#include "cdi/json_io.h"

namespace cdi {

EnclaveMeasurement enclave_measurement(std::string_view tool_id,
                                       std::string_view tool_version,
                                       const Digest& code_digest) {
  Json j = Json::object();
  j["code_digest"] = code_digest.to_string();
  j["tool_id"] = std::string(tool_id);
  j["tool_version"] = std::string(tool_version);
  return digest(std::span<const std::uint8_t>(canonicalize(j)));
}

AttestationEvidence make_evidence(const EnclaveMeasurement& measurement,
                                  const KeyPair& platform_key,
                                  std::string platform_id,
                                  const PublicKey& bound_key) {
  AttestationEvidence evidence;
  evidence.measurement = measurement;
  evidence.platform_id = std::move(platform_id);
  evidence.bound_keyid = keyid(bound_key);
  evidence.report_data =
      digest(std::span<const std::uint8_t>(canonical_public_key(bound_key)));
  evidence.signature = sign(
      platform_key, std::span<const std::uint8_t>(evidence_signing_bytes(evidence)));
  return evidence;
}

std::pair<KeyPair, AttestationEvidence> simulate_enclave_keygen(
    const EnclaveMeasurement& measurement, const KeyPair& platform_key,
    std::string platform_id, std::optional<std::span<const std::uint8_t>> seed) {
  KeyPair key = seed.has_value() ? generate_keypair(*seed) : generate_keypair();
  AttestationEvidence evidence =
      make_evidence(measurement, platform_key, std::move(platform_id), key.pub);
  return {std::move(key), std::move(evidence)};
}

EvidenceCheck SimulatedEvidenceVerifier::verify(
    const AttestationEvidence& evidence,
    std::span<const EnclaveMeasurement> expected_measurements,
    std::span<const PublicKey> trusted_platform_keys,
    const PublicKey& bound_key) const {
  Bytes signed_bytes = evidence_signing_bytes(evidence);
  bool platform_ok = false;
  for (const PublicKey& platform_key : trusted_platform_keys) {
    try {
      if (cdi::verify(platform_key, std::span<const std::uint8_t>(signed_bytes),
                      evidence.signature)) {
        platform_ok = true;
        break;
      }
    } catch (const DecodeError&) {
      // A malformed trusted key cannot vouch for anything; try the rest.
    }
  }
  if (!platform_ok) {
    return {false, "platform signature untrusted"};
  }

  if (!expected_measurements.empty() &&
      std::find(expected_measurements.begin(), expected_measurements.end(),
                evidence.measurement) == expected_measurements.end()) {
    return {false, "measurement mismatch"};
  }

  Digest bound_digest =
      digest(std::span<const std::uint8_t>(canonical_public_key(bound_key)));
  if (evidence.report_data != bound_digest ||
      evidence.bound_keyid != keyid(bound_key)) {
    return {false, "key binding mismatch"};
  }
  return {true, ""};
}

EvidenceCheck verify_evidence(
    const AttestationEvidence& evidence,
    std::span<const EnclaveMeasurement> expected_measurements,
    std::span<const PublicKey> trusted_platform_keys, const PublicKey& bound_key) {
  return SimulatedEvidenceVerifier{}.verify(evidence, expected_measurements,
                                            trusted_platform_keys, bound_key);
}

}  // namespace cdi
