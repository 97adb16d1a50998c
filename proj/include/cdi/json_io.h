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
// JSON wire formats. Parsing is strict: unknown fields, wrong types, and
// violated invariants raise DecodeError, so a value that parses is a value
// the rest of the library can trust structurally. Emitted JSON is always
// canonical, so files can be digested directly.

#pragma once

#include <filesystem>
#include <string>

#include "cdi/canonical.h"
#include "cdi/crypto.h"
#include "cdi/policy.h"
#include "cdi/provenance.h"
#include "cdi/tee.h"
#include "cdi/vetting.h"

namespace cdi {

// Signed payloads carry a kind tag inside the canonicalized bytes so a
// signature over one payload type can never be replayed as another.
namespace kind {
inline constexpr std::string_view kStatement = "statement";
inline constexpr std::string_view kAuthorityCert = "authority-cert";
inline constexpr std::string_view kToolCert = "tool-cert";
inline constexpr std::string_view kEvidence = "evidence";
}  // namespace kind

Json to_json(const PublicKey& key);
Json to_json(const OperationStatement& stmt);
Json to_json(const SignedStatement& stmt);
Json to_json(const AttestationEvidence& evidence);
Json to_json(const AuthorityCertificate& cert);
Json to_json(const ToolCertification& cert);
Json to_json(const Bundle& bundle);
Json to_json(const TrustPolicy& policy);
Json to_json(const ValidationReport& report);

PublicKey public_key_from_json(const Json& j);
OperationStatement operation_statement_from_json(const Json& j);
SignedStatement signed_statement_from_json(const Json& j);
AttestationEvidence evidence_from_json(const Json& j);
AuthorityCertificate authority_cert_from_json(const Json& j);
ToolCertification tool_certification_from_json(const Json& j);
Bundle bundle_from_json(const Json& j);
TrustPolicy trust_policy_from_json(const Json& j);

// Bytes a statement signature covers: canonicalize(payload).
Bytes statement_signing_bytes(const OperationStatement& stmt);

// Bytes certificate / evidence signatures cover: the canonical record with
// the signature field removed.
Bytes authority_cert_signing_bytes(const AuthorityCertificate& cert);
Bytes tool_certification_signing_bytes(const ToolCertification& cert);
Bytes evidence_signing_bytes(const AttestationEvidence& evidence);

// Key files: { "scheme", "public" } with "private" present only in private
// key files.
Json to_public_key_file(const PublicKey& key);
Json to_private_key_file(const KeyPair& key);
PublicKey public_key_from_file_json(const Json& j);
KeyPair keypair_from_file_json(const Json& j);

// File helpers. Writes are canonical bytes, no trailing newline.
std::string read_text_file(const std::filesystem::path& path);
Bytes read_binary_file(const std::filesystem::path& path);
void write_canonical_json_file(const std::filesystem::path& path, const Json& value);
Json load_json_file(const std::filesystem::path& path);

}  // namespace cdi
