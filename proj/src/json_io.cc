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

#include "cdi/json_io.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "cdi/error.h"

namespace cdi {

namespace {

void expect_object(const Json& j, const char* what) {
  if (!j.is_object()) {
    throw DecodeError(std::string(what) + " must be a JSON object");
  }
}

// Strict schema: every required key present, nothing outside
// required + optional. Unknown fields would silently change canonical
// bytes, so they are rejected outright.
void expect_keys(const Json& j, const char* what,
                 std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional = {}) {
  expect_object(j, what);
  for (std::string_view key : required) {
    if (!j.contains(key)) {
      throw DecodeError(std::string(what) + " is missing field \"" +
                        std::string(key) + "\"");
    }
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                 std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) {
      throw DecodeError(std::string(what) + " has unknown field \"" + key + "\"");
    }
  }
}

std::string get_string(const Json& j, const char* what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_string()) {
    throw DecodeError(std::string(what) + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

std::int64_t get_int64(const Json& j, const char* what, const char* key) {
  const Json& v = j.at(key);
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw DecodeError(std::string(what) + "." + key + " is out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) {
    throw DecodeError(std::string(what) + "." + key + " must be an integer");
  }
  return v.get<std::int64_t>();
}

bool get_bool(const Json& j, const char* what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) {
    throw DecodeError(std::string(what) + "." + key + " must be a boolean");
  }
  return v.get<bool>();
}

Digest get_digest(const Json& j, const char* what, const char* key) {
  return Digest::parse(get_string(j, what, key));
}

const Json& get_array(const Json& j, const char* what, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array()) {
    throw DecodeError(std::string(what) + "." + key + " must be an array");
  }
  return v;
}

void expect_kind(const Json& j, const char* what, std::string_view kind) {
  if (get_string(j, what, "kind") != kind) {
    throw DecodeError(std::string(what) + ".kind must be \"" + std::string(kind) +
                      "\"");
  }
}

Bytes get_hex_bytes(const Json& j, const char* what, const char* key,
                    std::size_t expected_size) {
  Bytes bytes = hex_decode(get_string(j, what, key));
  if (bytes.size() != expected_size) {
    throw DecodeError(std::string(what) + "." + key + " must be " +
                      std::to_string(expected_size) + " bytes of hex");
  }
  return bytes;
}

Json validity_to_json(const Validity& validity) {
  Json j = Json::object();
  j["not_before"] = validity.not_before;
  j["not_after"] = validity.not_after;
  return j;
}

Validity validity_from_json(const Json& j) {
  expect_keys(j, "validity", {"not_after", "not_before"});
  Validity v{get_int64(j, "validity", "not_before"),
             get_int64(j, "validity", "not_after")};
  if (v.not_before >= v.not_after) {
    throw DecodeError("validity window is inverted");
  }
  return v;
}

Json artifact_to_json(const ArtifactRef& artifact) {
  Json j = Json::object();
  j["name"] = artifact.name;
  j["digest"] = artifact.digest.to_string();
  return j;
}

ArtifactRef artifact_from_json(const Json& j, const char* what) {
  expect_keys(j, what, {"digest", "name"});
  ArtifactRef artifact{get_string(j, what, "name"), get_digest(j, what, "digest")};
  if (artifact.name.empty()) {
    throw DecodeError(std::string(what) + ".name must be non-empty");
  }
  return artifact;
}

}  // namespace

Json to_json(const PublicKey& key) {
  Json j = Json::object();
  j["public"] = hex_encode(key.bytes);
  j["scheme"] = key.scheme;
  return j;
}

PublicKey public_key_from_json(const Json& j) {
  expect_keys(j, "public key", {"public", "scheme"});
  PublicKey key;
  key.scheme = get_string(j, "public key", "scheme");
  if (key.scheme != kSignatureScheme) {
    throw DecodeError("unsupported signature scheme: " + key.scheme);
  }
  key.bytes = get_hex_bytes(j, "public key", "public", kPublicKeySize);
  return key;
}

Json to_json(const OperationStatement& stmt) {
  Json j = Json::object();
  j["kind"] = std::string(kind::kStatement);

  Json tool = Json::object();
  tool["id"] = stmt.tool.id;
  tool["version"] = stmt.tool.version;
  tool["keyid"] = stmt.tool.keyid.to_string();
  j["tool"] = std::move(tool);

  j["operation_type"] = std::string(to_string(stmt.operation_type));
  j["parameters"] = Json(stmt.parameters);

  Json inputs = Json::array();
  for (const InputRef& input : stmt.inputs) {
    Json in = Json::object();
    in["artifact"] = artifact_to_json(input.artifact);
    if (input.upstream.has_value()) {
      in["upstream"] = input.upstream->to_string();
    }
    inputs.push_back(std::move(in));
  }
  j["inputs"] = std::move(inputs);

  Json outputs = Json::array();
  for (const ArtifactRef& output : stmt.outputs) {
    outputs.push_back(artifact_to_json(output));
  }
  j["outputs"] = std::move(outputs);

  j["created_at"] = stmt.created_at;
  return j;
}

OperationStatement operation_statement_from_json(const Json& j) {
  expect_keys(j, "statement payload",
              {"created_at", "inputs", "kind", "operation_type", "outputs",
               "parameters", "tool"});
  expect_kind(j, "statement payload", kind::kStatement);

  const Json& tool_j = j.at("tool");
  expect_keys(tool_j, "statement tool", {"id", "keyid", "version"});
  ToolInfo tool{get_string(tool_j, "statement tool", "id"),
                get_string(tool_j, "statement tool", "version"),
                get_digest(tool_j, "statement tool", "keyid")};

  OperationType type =
      operation_type_from_string(get_string(j, "statement payload", "operation_type"));

  const Json& params_j = j.at("parameters");
  expect_object(params_j, "statement parameters");
  std::map<std::string, std::string> parameters;
  for (const auto& [key, value] : params_j.items()) {
    if (!value.is_string()) {
      throw DecodeError("statement parameter \"" + key + "\" must be a string");
    }
    parameters.emplace(key, value.get<std::string>());
  }

  std::vector<InputRef> inputs;
  for (const Json& in : get_array(j, "statement payload", "inputs")) {
    expect_keys(in, "statement input", {"artifact"}, {"upstream"});
    InputRef input;
    input.artifact = artifact_from_json(in.at("artifact"), "statement input artifact");
    if (in.contains("upstream")) {
      input.upstream = get_digest(in, "statement input", "upstream");
    }
    inputs.push_back(std::move(input));
  }

  std::vector<ArtifactRef> outputs;
  for (const Json& out : get_array(j, "statement payload", "outputs")) {
    outputs.push_back(artifact_from_json(out, "statement output"));
  }

  std::int64_t created_at = get_int64(j, "statement payload", "created_at");

  try {
    return create_statement(std::move(tool), type, std::move(parameters),
                            std::move(inputs), std::move(outputs), created_at);
  } catch (const Error& e) {
    throw DecodeError(std::string("invalid statement payload: ") + e.what());
  }
}

Json to_json(const AttestationEvidence& evidence) {
  Json j = Json::object();
  j["kind"] = std::string(kind::kEvidence);
  j["measurement"] = evidence.measurement.to_string();
  j["platform_id"] = evidence.platform_id;
  j["bound_keyid"] = evidence.bound_keyid.to_string();
  j["report_data"] = evidence.report_data.to_string();
  j["signature"] = hex_encode(evidence.signature.bytes);
  return j;
}

AttestationEvidence evidence_from_json(const Json& j) {
  expect_keys(j, "evidence",
              {"bound_keyid", "kind", "measurement", "platform_id", "report_data",
               "signature"});
  expect_kind(j, "evidence", kind::kEvidence);
  AttestationEvidence evidence;
  evidence.measurement = get_digest(j, "evidence", "measurement");
  evidence.platform_id = get_string(j, "evidence", "platform_id");
  evidence.bound_keyid = get_digest(j, "evidence", "bound_keyid");
  evidence.report_data = get_digest(j, "evidence", "report_data");
  evidence.signature = Signature{get_hex_bytes(j, "evidence", "signature",
                                               kSignatureSize)};
  return evidence;
}

Json to_json(const SignedStatement& stmt) {
  Json j = Json::object();
  j["payload"] = to_json(stmt.payload);
  Json signatures = Json::array();
  for (const StatementSignature& entry : stmt.signatures) {
    Json s = Json::object();
    s["keyid"] = entry.keyid.to_string();
    s["public_key"] = to_json(entry.public_key);
    s["signature"] = hex_encode(entry.signature.bytes);
    signatures.push_back(std::move(s));
  }
  j["signatures"] = std::move(signatures);
  if (stmt.evidence.has_value()) {
    j["evidence"] = to_json(*stmt.evidence);
  }
  return j;
}

SignedStatement signed_statement_from_json(const Json& j) {
  expect_keys(j, "signed statement", {"payload", "signatures"}, {"evidence"});
  SignedStatement stmt;
  stmt.payload = operation_statement_from_json(j.at("payload"));

  const Json& signatures = get_array(j, "signed statement", "signatures");
  if (signatures.empty()) {
    throw DecodeError("signed statement must carry at least one signature");
  }
  for (const Json& s : signatures) {
    expect_keys(s, "statement signature", {"keyid", "public_key", "signature"});
    StatementSignature entry;
    entry.keyid = get_digest(s, "statement signature", "keyid");
    entry.public_key = public_key_from_json(s.at("public_key"));
    entry.signature =
        Signature{get_hex_bytes(s, "statement signature", "signature", kSignatureSize)};
    if (!stmt.signatures.empty() && !(stmt.signatures.back().keyid < entry.keyid)) {
      throw DecodeError("statement signatures must be strictly ascending by keyid");
    }
    stmt.signatures.push_back(std::move(entry));
  }

  if (j.contains("evidence")) {
    stmt.evidence = evidence_from_json(j.at("evidence"));
  }
  return stmt;
}

Json to_json(const AuthorityCertificate& cert) {
  Json j = Json::object();
  j["kind"] = std::string(kind::kAuthorityCert);
  Json subject = Json::object();
  subject["name"] = cert.subject.name;
  subject["public_key"] = to_json(cert.subject.public_key);
  j["subject"] = std::move(subject);
  j["issuer_keyid"] = cert.issuer_keyid.to_string();
  j["validity"] = validity_to_json(cert.validity);
  j["signature"] = hex_encode(cert.signature.bytes);
  return j;
}

AuthorityCertificate authority_cert_from_json(const Json& j) {
  expect_keys(j, "authority certificate",
              {"issuer_keyid", "kind", "signature", "subject", "validity"});
  expect_kind(j, "authority certificate", kind::kAuthorityCert);
  AuthorityCertificate cert;
  const Json& subject = j.at("subject");
  expect_keys(subject, "authority subject", {"name", "public_key"});
  cert.subject.name = get_string(subject, "authority subject", "name");
  cert.subject.public_key = public_key_from_json(subject.at("public_key"));
  cert.issuer_keyid = get_digest(j, "authority certificate", "issuer_keyid");
  cert.validity = validity_from_json(j.at("validity"));
  cert.signature = Signature{get_hex_bytes(j, "authority certificate", "signature",
                                           kSignatureSize)};
  return cert;
}

Json to_json(const ToolCertification& cert) {
  Json j = Json::object();
  j["kind"] = std::string(kind::kToolCert);
  Json tool = Json::object();
  tool["id"] = cert.tool.id;
  tool["version_pattern"] = cert.tool.version_pattern;
  j["tool"] = std::move(tool);
  Json keyids = Json::array();
  for (const Digest& d : cert.certified_keyids) keyids.push_back(d.to_string());
  j["certified_keyids"] = std::move(keyids);
  Json measurements = Json::array();
  for (const Digest& d : cert.certified_measurements) {
    measurements.push_back(d.to_string());
  }
  j["certified_measurements"] = std::move(measurements);
  j["properties"] = Json(cert.properties);
  j["issuer_keyid"] = cert.issuer_keyid.to_string();
  j["validity"] = validity_to_json(cert.validity);
  j["signature"] = hex_encode(cert.signature.bytes);
  return j;
}

ToolCertification tool_certification_from_json(const Json& j) {
  expect_keys(j, "tool certification",
              {"certified_keyids", "certified_measurements", "issuer_keyid", "kind",
               "properties", "signature", "tool", "validity"});
  expect_kind(j, "tool certification", kind::kToolCert);
  ToolCertification cert;
  const Json& tool = j.at("tool");
  expect_keys(tool, "certification tool", {"id", "version_pattern"});
  cert.tool.id = get_string(tool, "certification tool", "id");
  cert.tool.version_pattern = get_string(tool, "certification tool", "version_pattern");

  for (const Json& d : get_array(j, "tool certification", "certified_keyids")) {
    if (!d.is_string()) throw DecodeError("certified_keyids entries must be strings");
    cert.certified_keyids.push_back(Digest::parse(d.get<std::string>()));
  }
  for (const Json& d : get_array(j, "tool certification", "certified_measurements")) {
    if (!d.is_string()) {
      throw DecodeError("certified_measurements entries must be strings");
    }
    cert.certified_measurements.push_back(Digest::parse(d.get<std::string>()));
  }
  if (cert.certified_keyids.empty() && cert.certified_measurements.empty()) {
    throw DecodeError("tool certification covers neither keyids nor measurements");
  }

  for (const Json& p : get_array(j, "tool certification", "properties")) {
    if (!p.is_string()) throw DecodeError("property entries must be strings");
    cert.properties.push_back(p.get<std::string>());
  }
  if (cert.properties.empty()) {
    throw DecodeError("tool certification must assert at least one property");
  }

  cert.issuer_keyid = get_digest(j, "tool certification", "issuer_keyid");
  cert.validity = validity_from_json(j.at("validity"));
  cert.signature =
      Signature{get_hex_bytes(j, "tool certification", "signature", kSignatureSize)};
  return cert;
}

Json to_json(const Bundle& bundle) {
  Json j = Json::object();
  j["deployed"] = artifact_to_json(bundle.deployed);
  Json statements = Json::array();
  for (const SignedStatement& stmt : bundle.statements) {
    statements.push_back(to_json(stmt));
  }
  j["statements"] = std::move(statements);
  Json certifications = Json::array();
  for (const ToolCertification& cert : bundle.certifications) {
    certifications.push_back(to_json(cert));
  }
  j["certifications"] = std::move(certifications);
  Json authority_certs = Json::array();
  for (const AuthorityCertificate& cert : bundle.authority_certs) {
    authority_certs.push_back(to_json(cert));
  }
  j["authority_certs"] = std::move(authority_certs);
  return j;
}

Bundle bundle_from_json(const Json& j) {
  expect_keys(j, "bundle",
              {"authority_certs", "certifications", "deployed", "statements"});
  Bundle bundle;
  bundle.deployed = artifact_from_json(j.at("deployed"), "deployed artifact");
  for (const Json& s : get_array(j, "bundle", "statements")) {
    bundle.statements.push_back(signed_statement_from_json(s));
  }
  for (const Json& c : get_array(j, "bundle", "certifications")) {
    bundle.certifications.push_back(tool_certification_from_json(c));
  }
  for (const Json& c : get_array(j, "bundle", "authority_certs")) {
    bundle.authority_certs.push_back(authority_cert_from_json(c));
  }
  return bundle;
}

Json to_json(const TrustPolicy& policy) {
  Json j = Json::object();
  Json roots = Json::array();
  for (const Digest& root : policy.trusted_roots) roots.push_back(root.to_string());
  j["trusted_roots"] = std::move(roots);

  Json requirements = Json::array();
  for (const PropertyRequirement& req : policy.requirements) {
    Json r = Json::object();
    r["property"] = req.property;
    r["threshold"] = req.threshold;
    if (req.applies_to.has_value()) {
      r["applies_to"] = std::string(to_string(*req.applies_to));
    }
    requirements.push_back(std::move(r));
  }
  j["requirements"] = std::move(requirements);

  j["require_tee"] = policy.require_tee;
  Json platform_keys = Json::array();
  for (const PublicKey& key : policy.trusted_platform_keys) {
    platform_keys.push_back(to_json(key));
  }
  j["trusted_platform_keys"] = std::move(platform_keys);
  j["allow_origin_inputs"] = policy.allow_origin_inputs;
  if (policy.evaluation_time.has_value()) {
    j["evaluation_time"] = *policy.evaluation_time;
  }
  return j;
}

TrustPolicy trust_policy_from_json(const Json& j) {
  expect_keys(j, "trust policy", {"requirements", "trusted_roots"},
              {"allow_origin_inputs", "evaluation_time", "require_tee",
               "trusted_platform_keys"});
  TrustPolicy policy;
  for (const Json& r : get_array(j, "trust policy", "trusted_roots")) {
    if (!r.is_string()) throw DecodeError("trusted_roots entries must be strings");
    policy.trusted_roots.insert(Digest::parse(r.get<std::string>()));
  }
  if (policy.trusted_roots.empty()) {
    throw DecodeError("trust policy must name at least one trusted root");
  }

  for (const Json& r : get_array(j, "trust policy", "requirements")) {
    expect_keys(r, "property requirement", {"property", "threshold"}, {"applies_to"});
    PropertyRequirement req;
    req.property = get_string(r, "property requirement", "property");
    std::int64_t threshold = get_int64(r, "property requirement", "threshold");
    if (threshold < 1 || threshold > std::numeric_limits<int>::max()) {
      throw DecodeError("requirement threshold must be a positive integer");
    }
    req.threshold = static_cast<int>(threshold);
    if (r.contains("applies_to")) {
      req.applies_to = operation_type_from_string(
          get_string(r, "property requirement", "applies_to"));
    }
    policy.requirements.push_back(std::move(req));
  }

  if (j.contains("require_tee")) {
    policy.require_tee = get_bool(j, "trust policy", "require_tee");
  }
  if (j.contains("trusted_platform_keys")) {
    for (const Json& k : get_array(j, "trust policy", "trusted_platform_keys")) {
      policy.trusted_platform_keys.push_back(public_key_from_json(k));
    }
  }
  if (j.contains("allow_origin_inputs")) {
    policy.allow_origin_inputs = get_bool(j, "trust policy", "allow_origin_inputs");
  }
  if (j.contains("evaluation_time")) {
    policy.evaluation_time = get_int64(j, "trust policy", "evaluation_time");
  }
  return policy;
}

Json to_json(const ValidationReport& report) {
  Json j = Json::object();
  j["verdict"] = report.pass ? "pass" : "fail";
  Json violations = Json::array();
  for (const Violation& v : report.violations) {
    Json entry = Json::object();
    entry["statement"] = v.statement;
    entry["rule"] = v.rule;
    entry["detail"] = v.detail;
    violations.push_back(std::move(entry));
  }
  j["violations"] = std::move(violations);
  Json trust = Json::object();
  for (const auto& [dig, properties] : report.per_statement_trust) {
    trust[dig.to_string()] = Json(properties);
  }
  j["per_statement_trust"] = std::move(trust);
  return j;
}

Bytes statement_signing_bytes(const OperationStatement& stmt) {
  return canonicalize(to_json(stmt));
}

namespace {

Bytes signing_bytes_without_signature(Json j) {
  j.erase("signature");
  return canonicalize(j);
}

}  // namespace

Bytes authority_cert_signing_bytes(const AuthorityCertificate& cert) {
  return signing_bytes_without_signature(to_json(cert));
}

Bytes tool_certification_signing_bytes(const ToolCertification& cert) {
  return signing_bytes_without_signature(to_json(cert));
}

Bytes evidence_signing_bytes(const AttestationEvidence& evidence) {
  return signing_bytes_without_signature(to_json(evidence));
}

Json to_public_key_file(const PublicKey& key) {
  return to_json(key);
}

Json to_private_key_file(const KeyPair& key) {
  Json j = to_json(key.pub);
  j["private"] = hex_encode(key.secret);
  return j;
}

PublicKey public_key_from_file_json(const Json& j) {
  return public_key_from_json(j);
}

KeyPair keypair_from_file_json(const Json& j) {
  expect_keys(j, "private key file", {"private", "public", "scheme"});
  KeyPair key;
  Json pub = Json::object();
  pub["public"] = j.at("public");
  pub["scheme"] = j.at("scheme");
  key.pub = public_key_from_json(pub);
  key.secret = get_hex_bytes(j, "private key file", "private", kSecretKeySize);
  // An Ed25519 secret key embeds the public half in its trailing 32 bytes;
  // a mismatch means the file was stitched together from different keys.
  if (!std::equal(key.pub.bytes.begin(), key.pub.bytes.end(),
                  key.secret.begin() + (kSecretKeySize - kPublicKeySize))) {
    throw DecodeError("private key file is inconsistent with its public key");
  }
  return key;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot read file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw Error("error while reading file: " + path.string());
  }
  return std::move(buffer).str();
}

Bytes read_binary_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  return Bytes(text.begin(), text.end());
}

void write_canonical_json_file(const std::filesystem::path& path, const Json& value) {
  Bytes bytes = canonicalize(value);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write file: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) {
    throw Error("error while writing file: " + path.string());
  }
}

Json load_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path));
}

}  // namespace cdi
