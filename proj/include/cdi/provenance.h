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
// Per-operation supply-chain statements and the linked chain they form.
// Statements reference upstream statements by digest, so the chain is a
// content-addressed DAG; none of the operations here ever see artifact
// bytes, only digests.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdi/crypto.h"
#include "cdi/tee.h"

namespace cdi {

struct ArtifactRef {
  std::string name;  // human label, e.g. file name; non-empty
  Digest digest;

  bool operator==(const ArtifactRef&) const = default;
};

struct InputRef {
  ArtifactRef artifact;
  // Digest of the SignedStatement that produced this artifact. Absent for
  // origin inputs such as source files.
  std::optional<Digest> upstream;

  bool operator==(const InputRef&) const = default;
};

enum class OperationType { kTransform, kInspect };

std::string_view to_string(OperationType type);
OperationType operation_type_from_string(std::string_view s);  // DecodeError

struct ToolInfo {
  std::string id;
  std::string version;
  Digest keyid;  // keyid of the tool's signing key

  bool operator==(const ToolInfo&) const = default;
};

// Outputs of an "inspect" statement must either repeat an input digest
// (inspection does not modify artifacts) or be a pure report flagged by
// this name prefix.
inline constexpr std::string_view kReportNamePrefix = "report:";

struct OperationStatement {
  ToolInfo tool;
  OperationType operation_type = OperationType::kTransform;
  std::map<std::string, std::string> parameters;  // e.g. compiler flags
  std::vector<InputRef> inputs;
  std::vector<ArtifactRef> outputs;
  std::int64_t created_at = 0;  // Unix seconds, caller-supplied

  bool operator==(const OperationStatement&) const = default;
};

struct StatementSignature {
  Digest keyid;
  PublicKey public_key;  // in-band so bundles stay self-contained
  Signature signature;

  bool operator==(const StatementSignature&) const = default;
};

struct SignedStatement {
  OperationStatement payload;
  std::vector<StatementSignature> signatures;  // strictly ascending by keyid
  std::optional<AttestationEvidence> evidence;

  bool operator==(const SignedStatement&) const = default;
};

// Validates the statement invariants and returns it. Throws Error on empty
// transform outputs, inspect outputs that neither match an input digest nor
// carry the report prefix, empty artifact names, or malformed digests.
OperationStatement create_statement(ToolInfo tool, OperationType operation_type,
                                    std::map<std::string, std::string> parameters,
                                    std::vector<InputRef> inputs,
                                    std::vector<ArtifactRef> outputs,
                                    std::int64_t created_at);

// Signs canonicalize(payload) and attaches the signature (and evidence, if
// given). Throws Error if the evidence is bound to a different public key.
SignedStatement sign_statement(const OperationStatement& stmt, const KeyPair& key,
                               std::optional<AttestationEvidence> evidence = std::nullopt);

// Adds a co-signature, keeping the list sorted by keyid. Throws Error if
// this keyid already signed.
void add_signature(SignedStatement& stmt, const KeyPair& key);

// Digest of the full canonical envelope, signatures and evidence included.
// This is the value upstream references point at, so stripping a signature
// breaks downstream links too.
Digest statement_digest(const SignedStatement& stmt);

struct ProvenanceChain {
  std::map<Digest, SignedStatement> statements;  // keyed by statement_digest
  Digest terminal;  // statement producing the deployed artifact
};

// Indexes statements by digest and locates the unique statement that
// outputs the deployed artifact digest. Throws Error on zero or multiple
// terminal candidates and on duplicate statement digests.
ProvenanceChain link_chain(const std::vector<SignedStatement>& statements,
                           const Digest& deployed);

// Topological order, upstream before downstream, ties broken by ascending
// statement digest. Throws Error on a cycle or a dangling upstream
// reference.
std::vector<SignedStatement> walk_chain(const ProvenanceChain& chain);

// One policy or integrity finding. statement holds the offending statement
// digest, or "-" when no single statement is at fault.
struct Violation {
  std::string statement;
  std::string rule;
  std::string detail;

  auto operator<=>(const Violation&) const = default;
};

struct IntegrityReport {
  std::vector<Violation> violations;  // sorted; empty <=> pass

  bool ok() const { return violations.empty(); }
};

// Violation rule identifiers shared with the policy engine. Stable for CI
// parsing.
namespace rules {
inline constexpr std::string_view kSignatureInvalid = "signature-invalid";
inline constexpr std::string_view kNoSignatures = "no-signatures";
inline constexpr std::string_view kKeyidMismatch = "keyid-mismatch";
inline constexpr std::string_view kToolKeyUnbound = "tool-key-unbound";
inline constexpr std::string_view kMissingUpstream = "missing-upstream";
inline constexpr std::string_view kLinkMismatch = "link-mismatch";
inline constexpr std::string_view kLinkCycle = "link-cycle";
inline constexpr std::string_view kDuplicateStatement = "duplicate-statement";
inline constexpr std::string_view kNoTerminal = "no-terminal-statement";
inline constexpr std::string_view kAmbiguousTerminal = "ambiguous-terminal";
inline constexpr std::string_view kTeeEvidenceMissing = "tee-evidence-missing";
inline constexpr std::string_view kTeeEvidenceInvalid = "tee-evidence-invalid";
inline constexpr std::string_view kThresholdNotMet = "threshold-not-met";
inline constexpr std::string_view kOriginInputForbidden = "origin-input-forbidden";
}  // namespace rules

// Checks every statement's signatures, the keyid binding of the declared
// tool key, every upstream link (referenced statement exists and lists an
// output matching the input artifact digest), and graph acyclicity.
// Violations are report entries, never exceptions; an empty report means
// the chain passes.
IntegrityReport verify_chain_integrity(const ProvenanceChain& chain);

}  // namespace cdi
