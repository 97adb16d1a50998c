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

#include "cdi/provenance.h"

#include <algorithm>
#include <set>

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

void check_artifact(const ArtifactRef& artifact, const char* role) {
  if (artifact.name.empty()) {
    throw Error(std::string(role) + " artifact name is empty");
  }
  if (!is_well_formed_digest(artifact.digest)) {
    throw Error(std::string(role) + " artifact \"" + artifact.name +
                "\" has a malformed digest");
  }
}

// Upstream links and adjacency, de-duplicated per statement.
std::map<Digest, std::set<Digest>> upstream_sets(const ProvenanceChain& chain) {
  std::map<Digest, std::set<Digest>> result;
  for (const auto& [dig, stmt] : chain.statements) {
    auto& ups = result[dig];
    for (const InputRef& input : stmt.payload.inputs) {
      if (input.upstream.has_value()) {
        ups.insert(*input.upstream);
      }
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(OperationType type) {
  switch (type) {
    case OperationType::kTransform:
      return "transform";
    case OperationType::kInspect:
      return "inspect";
  }
  throw Error("invalid operation type");
}

OperationType operation_type_from_string(std::string_view s) {
  if (s == "transform") return OperationType::kTransform;
  if (s == "inspect") return OperationType::kInspect;
  throw DecodeError("unknown operation type: \"" + std::string(s) + "\"");
}

OperationStatement create_statement(ToolInfo tool, OperationType operation_type,
                                    std::map<std::string, std::string> parameters,
                                    std::vector<InputRef> inputs,
                                    std::vector<ArtifactRef> outputs,
                                    std::int64_t created_at) {
  if (!is_well_formed_digest(tool.keyid)) {
    throw Error("tool keyid is malformed");
  }
  for (const InputRef& input : inputs) {
    check_artifact(input.artifact, "input");
    if (input.upstream.has_value() && !is_well_formed_digest(*input.upstream)) {
      throw Error("input \"" + input.artifact.name +
                  "\" has a malformed upstream digest");
    }
  }
  for (const ArtifactRef& output : outputs) {
    check_artifact(output, "output");
  }

  if (operation_type == OperationType::kTransform && outputs.empty()) {
    throw Error("transform statement must list at least one output");
  }
  if (operation_type == OperationType::kInspect) {
    std::set<Digest> input_digests;
    for (const InputRef& input : inputs) {
      input_digests.insert(input.artifact.digest);
    }
    for (const ArtifactRef& output : outputs) {
      if (output.name.starts_with(kReportNamePrefix)) continue;
      if (!input_digests.contains(output.digest)) {
        throw Error("inspect output \"" + output.name +
                    "\" neither repeats an input digest nor is a report");
      }
    }
  }

  OperationStatement stmt;
  stmt.tool = std::move(tool);
  stmt.operation_type = operation_type;
  stmt.parameters = std::move(parameters);
  stmt.inputs = std::move(inputs);
  stmt.outputs = std::move(outputs);
  stmt.created_at = created_at;
  return stmt;
}

SignedStatement sign_statement(const OperationStatement& stmt, const KeyPair& key,
                               std::optional<AttestationEvidence> evidence) {
  Digest signer = keyid(key.pub);
  if (evidence.has_value() && evidence->bound_keyid != signer) {
    throw Error("evidence is bound to " + evidence->bound_keyid.to_string() +
                ", not to the signing key " + signer.to_string());
  }
  SignedStatement signed_stmt;
  signed_stmt.payload = stmt;
  signed_stmt.evidence = std::move(evidence);
  Bytes payload_bytes = statement_signing_bytes(stmt);
  signed_stmt.signatures.push_back(StatementSignature{
      signer, key.pub, sign(key, std::span<const std::uint8_t>(payload_bytes))});
  return signed_stmt;
}

void add_signature(SignedStatement& stmt, const KeyPair& key) {
  Digest signer = keyid(key.pub);
  auto pos = std::lower_bound(
      stmt.signatures.begin(), stmt.signatures.end(), signer,
      [](const StatementSignature& s, const Digest& k) { return s.keyid < k; });
  if (pos != stmt.signatures.end() && pos->keyid == signer) {
    throw Error("statement already signed by " + signer.to_string());
  }
  Bytes payload_bytes = statement_signing_bytes(stmt.payload);
  stmt.signatures.insert(
      pos, StatementSignature{signer, key.pub,
                              sign(key, std::span<const std::uint8_t>(payload_bytes))});
}

Digest statement_digest(const SignedStatement& stmt) {
  return digest(std::span<const std::uint8_t>(canonicalize(to_json(stmt))));
}

ProvenanceChain link_chain(const std::vector<SignedStatement>& statements,
                           const Digest& deployed) {
  ProvenanceChain chain;
  std::vector<Digest> terminals;
  for (const SignedStatement& stmt : statements) {
    Digest dig = statement_digest(stmt);
    auto [it, inserted] = chain.statements.emplace(dig, stmt);
    (void)it;
    if (!inserted) {
      throw Error("duplicate statement digest " + dig.to_string());
    }
    for (const ArtifactRef& output : stmt.payload.outputs) {
      if (output.digest == deployed) {
        terminals.push_back(dig);
        break;
      }
    }
  }
  if (terminals.empty()) {
    throw Error("no statement outputs the deployed artifact " +
                deployed.to_string());
  }
  if (terminals.size() > 1) {
    throw Error("ambiguous terminal: " + std::to_string(terminals.size()) +
                " statements output the deployed artifact");
  }
  chain.terminal = terminals.front();
  return chain;
}

std::vector<SignedStatement> walk_chain(const ProvenanceChain& chain) {
  auto upstreams = upstream_sets(chain);

  std::map<Digest, std::set<Digest>> downstreams;
  std::map<Digest, std::size_t> indegree;
  for (const auto& [dig, ups] : upstreams) {
    indegree.emplace(dig, ups.size());
    for (const Digest& up : ups) {
      if (!chain.statements.contains(up)) {
        throw Error("dangling upstream reference " + up.to_string());
      }
      downstreams[up].insert(dig);
    }
  }

  // Kahn's algorithm with an ordered frontier: ties resolve by ascending
  // statement digest, so the order is stable across runs.
  std::set<Digest> ready;
  for (const auto& [dig, deg] : indegree) {
    if (deg == 0) ready.insert(dig);
  }
  std::vector<SignedStatement> order;
  order.reserve(chain.statements.size());
  while (!ready.empty()) {
    Digest next = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(chain.statements.at(next));
    for (const Digest& down : downstreams[next]) {
      if (--indegree.at(down) == 0) ready.insert(down);
    }
  }
  if (order.size() != chain.statements.size()) {
    throw Error("provenance chain contains a cycle");
  }
  return order;
}

IntegrityReport verify_chain_integrity(const ProvenanceChain& chain) {
  IntegrityReport report;
  auto violate = [&report](const Digest& stmt, std::string_view rule,
                           std::string detail) {
    report.violations.push_back(
        Violation{stmt.to_string(), std::string(rule), std::move(detail)});
  };

  for (const auto& [dig, stmt] : chain.statements) {
    if (stmt.signatures.empty()) {
      violate(dig, rules::kNoSignatures, "statement carries no signatures");
    }

    Bytes payload_bytes = statement_signing_bytes(stmt.payload);
    bool tool_key_signed = false;
    for (const StatementSignature& entry : stmt.signatures) {
      bool entry_ok = true;
      Digest actual = keyid(entry.public_key);
      if (actual != entry.keyid) {
        violate(dig, rules::kKeyidMismatch,
                "signature entry claims " + entry.keyid.to_string() +
                    " but the embedded key digests to " + actual.to_string());
        entry_ok = false;
      }
      try {
        if (!verify(entry.public_key, std::span<const std::uint8_t>(payload_bytes),
                    entry.signature)) {
          violate(dig, rules::kSignatureInvalid,
                  "signature by " + entry.keyid.to_string() +
                      " does not verify over the statement payload");
          entry_ok = false;
        }
      } catch (const DecodeError& e) {
        violate(dig, rules::kSignatureInvalid,
                "signature entry for " + entry.keyid.to_string() +
                    " is malformed: " + e.what());
        entry_ok = false;
      }
      if (entry_ok && entry.keyid == stmt.payload.tool.keyid) {
        tool_key_signed = true;
      }
    }
    if (!tool_key_signed) {
      violate(dig, rules::kToolKeyUnbound,
              "declared tool keyid " + stmt.payload.tool.keyid.to_string() +
                  " is not backed by a verifying signature");
    }

    for (const InputRef& input : stmt.payload.inputs) {
      if (!input.upstream.has_value()) continue;
      auto up = chain.statements.find(*input.upstream);
      if (up == chain.statements.end()) {
        violate(dig, rules::kMissingUpstream,
                "input \"" + input.artifact.name + "\" references missing upstream " +
                    input.upstream->to_string());
        continue;
      }
      bool produced = std::any_of(
          up->second.payload.outputs.begin(), up->second.payload.outputs.end(),
          [&input](const ArtifactRef& out) {
            return out.digest == input.artifact.digest;
          });
      if (!produced) {
        violate(dig, rules::kLinkMismatch,
                "input \"" + input.artifact.name + "\" digest " +
                    input.artifact.digest.to_string() +
                    " is not an output of upstream " + input.upstream->to_string());
      }
    }
  }

  // Acyclicity via the same Kahn pass walk_chain uses; whatever cannot be
  // scheduled is part of a cycle.
  {
    auto upstreams = upstream_sets(chain);
    std::map<Digest, std::set<Digest>> downstreams;
    std::map<Digest, std::size_t> indegree;
    for (const auto& [dig, ups] : upstreams) {
      std::size_t resolved = 0;
      for (const Digest& up : ups) {
        if (chain.statements.contains(up)) {
          downstreams[up].insert(dig);
          ++resolved;
        }
      }
      indegree.emplace(dig, resolved);
    }
    std::set<Digest> ready;
    for (const auto& [dig, deg] : indegree) {
      if (deg == 0) ready.insert(dig);
    }
    std::size_t scheduled = 0;
    while (!ready.empty()) {
      Digest next = *ready.begin();
      ready.erase(ready.begin());
      ++scheduled;
      for (const Digest& down : downstreams[next]) {
        if (--indegree.at(down) == 0) ready.insert(down);
      }
    }
    if (scheduled != chain.statements.size()) {
      std::string cyclic;
      for (const auto& [dig, deg] : indegree) {
        if (deg > 0) {
          if (!cyclic.empty()) cyclic += ", ";
          cyclic += dig.to_string();
        }
      }
      report.violations.push_back(Violation{
          "-", std::string(rules::kLinkCycle), "cycle among statements: " + cyclic});
    }
  }

  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

}  // namespace cdi
