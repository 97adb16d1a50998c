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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdi/crypto.h"

namespace cdi {

// Identity of an enclave: digest over the canonical serialization of
// (tool id, tool version, code digest).
using EnclaveMeasurement = Digest;

EnclaveMeasurement enclave_measurement(std::string_view tool_id,
                                       std::string_view tool_version,
                                       const Digest& code_digest);

// Simulated attestation quote: a record signed by the platform attestation
// key that binds an enclave-derived public key to a measurement and a
// platform. report_data carries the digest of the bound public key's
// canonical bytes, mirroring how real quotes bind keys via user data.
struct AttestationEvidence {
  EnclaveMeasurement measurement;
  std::string platform_id;
  Digest bound_keyid;
  Digest report_data;
  Signature signature;  // by the platform key, over all fields above

  bool operator==(const AttestationEvidence&) const = default;
};

// Evidence for an existing key. bound_keyid and report_data are derived
// from bound_key; the platform key signs the canonical record.
AttestationEvidence make_evidence(const EnclaveMeasurement& measurement,
                                  const KeyPair& platform_key,
                                  std::string platform_id,
                                  const PublicKey& bound_key);

// Derives a signing keypair "inside the enclave" (fresh, or deterministic
// from a 32-byte seed) and returns it with evidence binding its public key
// to the measurement and platform.
std::pair<KeyPair, AttestationEvidence> simulate_enclave_keygen(
    const EnclaveMeasurement& measurement, const KeyPair& platform_key,
    std::string platform_id,
    std::optional<std::span<const std::uint8_t>> seed = std::nullopt);

struct EvidenceCheck {
  bool ok = false;
  std::string reason;  // empty on pass
};

// Verification boundary. A real quote verifier can replace the simulated
// one without touching the policy engine.
class EvidenceVerifier {
 public:
  virtual ~EvidenceVerifier() = default;

  // Pass iff the evidence signature verifies under some trusted platform
  // key, the measurement is in expected_measurements (empty set = any), and
  // report_data matches the digest of bound_key's canonical bytes.
  virtual EvidenceCheck verify(
      const AttestationEvidence& evidence,
      std::span<const EnclaveMeasurement> expected_measurements,
      std::span<const PublicKey> trusted_platform_keys,
      const PublicKey& bound_key) const = 0;
};

class SimulatedEvidenceVerifier final : public EvidenceVerifier {
 public:
  EvidenceCheck verify(const AttestationEvidence& evidence,
                       std::span<const EnclaveMeasurement> expected_measurements,
                       std::span<const PublicKey> trusted_platform_keys,
                       const PublicKey& bound_key) const override;
};

// Convenience wrapper over SimulatedEvidenceVerifier.
EvidenceCheck verify_evidence(
    const AttestationEvidence& evidence,
    std::span<const EnclaveMeasurement> expected_measurements,
    std::span<const PublicKey> trusted_platform_keys,
    const PublicKey& bound_key);

}  // namespace cdi
