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
// cdi: command-line surface for recording, linking, and validating signed
// supply-chain provenance.
//
// Exit codes: 0 pass, 1 policy or integrity failure, 2 usage or I/O error.

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdi/canonical.h"
#include "cdi/crypto.h"
#include "cdi/error.h"
#include "cdi/json_io.h"
#include "cdi/policy.h"
#include "cdi/provenance.h"
#include "cdi/tee.h"
#include "cdi/vetting.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct GlobalOpts {
  std::string key_dir = ".";
  std::string seed_hex;  // empty = random keys
  std::int64_t time = 0;
  bool time_set = false;

  bool deterministic() const { return !seed_hex.empty(); }
};

// Caller-supplied time wherever a timestamp is needed. In seeded
// (deterministic) mode a wall-clock fallback would break byte-identical
// output, so it is refused.
std::int64_t pick_time(const GlobalOpts& g) {
  if (g.time_set) return g.time;
  if (g.deterministic()) {
    throw cdi::Error("--seed requires an explicit --time");
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

// Key arguments accept either a path to a key file or a bare name resolved
// under the key directory.
fs::path resolve_key_file(const std::string& arg, const GlobalOpts& g,
                          const char* suffix) {
  fs::path direct(arg);
  if (fs::exists(direct)) return direct;
  fs::path named = fs::path(g.key_dir) / (arg + suffix);
  if (fs::exists(named)) return named;
  throw cdi::Error("key not found: tried \"" + direct.string() + "\" and \"" +
                   named.string() + "\"");
}

cdi::KeyPair load_private_key(const std::string& arg, const GlobalOpts& g) {
  return cdi::keypair_from_file_json(
      cdi::load_json_file(resolve_key_file(arg, g, ".key.json")));
}

cdi::PublicKey load_public_key(const std::string& arg, const GlobalOpts& g) {
  return cdi::public_key_from_file_json(
      cdi::load_json_file(resolve_key_file(arg, g, ".pub.json")));
}

cdi::Digest hash_file(const fs::path& path) {
  return cdi::digest(cdi::read_binary_file(path));
}

std::string artifact_name(const fs::path& path) {
  std::string name = path.filename().string();
  if (name.empty()) {
    throw cdi::Error("cannot derive an artifact name from \"" + path.string() +
                     "\"");
  }
  return name;
}

void emit(const cdi::Json& value, const std::string& out_path) {
  cdi::write_canonical_json_file(out_path, value);
}

// ---- keygen ----------------------------------------------------------------

struct KeygenOpts {
  std::string name;
  bool force = false;
};

int cmd_keygen(const GlobalOpts& g, const KeygenOpts& opts) {
  if (opts.name.empty() || opts.name.find('/') != std::string::npos ||
      opts.name == "." || opts.name == "..") {
    throw cdi::Error("key name must be a plain file stem");
  }

  cdi::KeyPair key;
  if (g.deterministic()) {
    cdi::Bytes seed = cdi::hex_decode(g.seed_hex);
    key = cdi::generate_keypair(seed);
  } else {
    key = cdi::generate_keypair();
  }

  fs::create_directories(g.key_dir);
  fs::path priv = fs::path(g.key_dir) / (opts.name + ".key.json");
  fs::path pub = fs::path(g.key_dir) / (opts.name + ".pub.json");
  if (!opts.force && (fs::exists(priv) || fs::exists(pub))) {
    throw cdi::Error("key files for \"" + opts.name +
                     "\" already exist (use --force to overwrite)");
  }

  cdi::write_canonical_json_file(priv, cdi::to_private_key_file(key));
  fs::permissions(priv, fs::perms::owner_read | fs::perms::owner_write);
  cdi::write_canonical_json_file(pub, cdi::to_public_key_file(key.pub));

  std::cout << cdi::keyid(key.pub).to_string() << "\n";
  return kExitPass;
}

// ---- va (vetting authority) ------------------------------------------------

struct VaCommonOpts {
  std::string key;  // signing authority's private key
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;
  std::string out;
};

struct VaInitOpts {
  VaCommonOpts common;
  std::string name;
};

int cmd_va_init(const GlobalOpts& g, const VaInitOpts& opts) {
  cdi::KeyPair key = load_private_key(opts.common.key, g);
  cdi::AuthorityCertificate cert = cdi::issue_authority_cert(
      key, opts.name, key.pub, {opts.common.not_before, opts.common.not_after});
  emit(cdi::to_json(cert), opts.common.out);
  std::cout << cert.subject_keyid().to_string() << "\n";
  return kExitPass;
}

struct VaIssueOpts {
  VaCommonOpts common;
  std::string name;
  std::string subject_key;  // child authority's public key
};

int cmd_va_issue(const GlobalOpts& g, const VaIssueOpts& opts) {
  cdi::KeyPair issuer = load_private_key(opts.common.key, g);
  cdi::PublicKey subject = load_public_key(opts.subject_key, g);
  cdi::AuthorityCertificate cert = cdi::issue_authority_cert(
      issuer, opts.name, subject, {opts.common.not_before, opts.common.not_after});
  emit(cdi::to_json(cert), opts.common.out);
  std::cout << cert.subject_keyid().to_string() << "\n";
  return kExitPass;
}

struct VaCertifyToolOpts {
  VaCommonOpts common;
  std::string tool_id;
  std::string version_pattern = "*";
  std::vector<std::string> keyids;
  std::vector<std::string> measurements;
  std::vector<std::string> properties;
};

int cmd_va_certify_tool(const GlobalOpts& g, const VaCertifyToolOpts& opts) {
  cdi::KeyPair authority = load_private_key(opts.common.key, g);
  std::vector<cdi::Digest> keyids;
  for (const std::string& k : opts.keyids) keyids.push_back(cdi::Digest::parse(k));
  std::vector<cdi::Digest> measurements;
  for (const std::string& m : opts.measurements) {
    measurements.push_back(cdi::Digest::parse(m));
  }
  cdi::ToolCertification cert = cdi::issue_tool_certification(
      authority, {opts.tool_id, opts.version_pattern}, std::move(keyids),
      std::move(measurements), opts.properties,
      {opts.common.not_before, opts.common.not_after});
  emit(cdi::to_json(cert), opts.common.out);
  std::cout << cdi::digest(cdi::canonicalize(cdi::to_json(cert))).to_string()
            << "\n";
  return kExitPass;
}

// ---- record ----------------------------------------------------------------

struct RecordOpts {
  std::string tool_id;
  std::string tool_version;
  std::string type = "transform";
  std::vector<std::string> params;   // k=v
  std::vector<std::string> inputs;   // path[@upstream-digest]
  std::vector<std::string> outputs;  // path
  std::string key;
  std::string tee_platform_key;
  std::string tee_platform_id;
  std::string tee_code_digest;
  std::string out;
};

cdi::InputRef parse_input_arg(const std::string& arg) {
  cdi::InputRef input;
  // "@sha256:" cannot appear in the hex tail of a digest, so splitting at
  // its last occurrence is unambiguous.
  std::size_t at = arg.rfind("@sha256:");
  std::string path = arg;
  if (at != std::string::npos) {
    path = arg.substr(0, at);
    input.upstream = cdi::Digest::parse(arg.substr(at + 1));
  }
  input.artifact = {artifact_name(path), hash_file(path)};
  return input;
}

int cmd_record(const GlobalOpts& g, const RecordOpts& opts) {
  cdi::KeyPair key = load_private_key(opts.key, g);

  std::map<std::string, std::string> parameters;
  for (const std::string& kv : opts.params) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw cdi::Error("--param expects key=value, got \"" + kv + "\"");
    }
    parameters[kv.substr(0, eq)] = kv.substr(eq + 1);
  }

  std::vector<cdi::InputRef> inputs;
  for (const std::string& arg : opts.inputs) inputs.push_back(parse_input_arg(arg));
  std::vector<cdi::ArtifactRef> outputs;
  for (const std::string& path : opts.outputs) {
    outputs.push_back({artifact_name(path), hash_file(path)});
  }

  cdi::ToolInfo tool{opts.tool_id, opts.tool_version, cdi::keyid(key.pub)};
  cdi::OperationStatement stmt = cdi::create_statement(
      tool, cdi::operation_type_from_string(opts.type), std::move(parameters),
      std::move(inputs), std::move(outputs), pick_time(g));

  std::optional<cdi::AttestationEvidence> evidence;
  if (!opts.tee_platform_key.empty()) {
    cdi::KeyPair platform = load_private_key(opts.tee_platform_key, g);
    cdi::EnclaveMeasurement measurement = cdi::enclave_measurement(
        opts.tool_id, opts.tool_version, cdi::Digest::parse(opts.tee_code_digest));
    evidence =
        cdi::make_evidence(measurement, platform, opts.tee_platform_id, key.pub);
  }

  cdi::SignedStatement signed_stmt = cdi::sign_statement(stmt, key, evidence);
  emit(cdi::to_json(signed_stmt), opts.out);
  std::cout << cdi::statement_digest(signed_stmt).to_string() << "\n";
  return kExitPass;
}

// ---- bundle ----------------------------------------------------------------

struct BundleOpts {
  std::string artifact;
  std::vector<std::string> statement_files;
  std::vector<std::string> cert_files;
  std::vector<std::string> va_cert_files;
  std::string out;
};

int cmd_bundle(const GlobalOpts&, const BundleOpts& opts) {
  cdi::Bundle bundle;
  bundle.deployed = {artifact_name(opts.artifact), hash_file(opts.artifact)};

  // Dedup by statement digest; emit in digest order so the bundle bytes do
  // not depend on flag order.
  std::map<cdi::Digest, cdi::SignedStatement> statements;
  for (const std::string& file : opts.statement_files) {
    cdi::SignedStatement stmt =
        cdi::signed_statement_from_json(cdi::load_json_file(file));
    statements.emplace(cdi::statement_digest(stmt), std::move(stmt));
  }
  for (auto& [dig, stmt] : statements) {
    (void)dig;
    bundle.statements.push_back(std::move(stmt));
  }

  std::map<cdi::Digest, cdi::ToolCertification> certs;
  for (const std::string& file : opts.cert_files) {
    cdi::ToolCertification cert =
        cdi::tool_certification_from_json(cdi::load_json_file(file));
    certs.emplace(cdi::digest(cdi::canonicalize(cdi::to_json(cert))),
                  std::move(cert));
  }
  for (auto& [dig, cert] : certs) {
    (void)dig;
    bundle.certifications.push_back(std::move(cert));
  }

  std::map<cdi::Digest, cdi::AuthorityCertificate> va_certs;
  for (const std::string& file : opts.va_cert_files) {
    cdi::AuthorityCertificate cert =
        cdi::authority_cert_from_json(cdi::load_json_file(file));
    va_certs.emplace(cdi::digest(cdi::canonicalize(cdi::to_json(cert))),
                     std::move(cert));
  }
  for (auto& [dig, cert] : va_certs) {
    (void)dig;
    bundle.authority_certs.push_back(std::move(cert));
  }

  // A bundle that cannot even name its terminal statement is a construction
  // error, not a failing verdict.
  cdi::link_chain(bundle.statements, bundle.deployed.digest);

  emit(cdi::to_json(bundle), opts.out);
  std::cout << bundle.deployed.digest.to_string() << "\n";
  return kExitPass;
}

// ---- verify ----------------------------------------------------------------

struct VerifyOpts {
  std::string bundle_file;
  std::string policy_file;
};

int cmd_verify(const GlobalOpts& g, const VerifyOpts& opts) {
  cdi::Bundle bundle = cdi::bundle_from_json(cdi::load_json_file(opts.bundle_file));
  cdi::TrustPolicy policy =
      cdi::trust_policy_from_json(cdi::load_json_file(opts.policy_file));
  if (g.time_set) {
    policy.evaluation_time = g.time;
  } else if (!policy.evaluation_time.has_value()) {
    policy.evaluation_time = pick_time(g);
  }

  cdi::ValidationReport report = cdi::validate_bundle(bundle, policy);
  cdi::Bytes line = cdi::canonicalize(cdi::to_json(report));
  std::cout << cdi::as_string_view(line) << "\n";
  return report.pass ? kExitPass : kExitFail;
}

// ---- inspect ---------------------------------------------------------------

struct InspectOpts {
  std::string file;
};

int cmd_inspect(const GlobalOpts&, const InspectOpts& opts) {
  cdi::Json value = cdi::load_json_file(opts.file);
  std::cout << value.dump(2) << "\n";
  return kExitPass;
}

void add_validity_flags(CLI::App* cmd, VaCommonOpts& opts) {
  cmd->add_option("--key", opts.key, "signing authority private key (path or name)")
      ->required();
  cmd->add_option("--not-before", opts.not_before,
                  "validity start, Unix seconds (inclusive)")
      ->required();
  cmd->add_option("--not-after", opts.not_after,
                  "validity end, Unix seconds (inclusive)")
      ->required();
  cmd->add_option("-o,--output", opts.out, "output certificate file")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cdi: record, link, and validate signed supply-chain provenance"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--key-dir", g.key_dir,
                 "directory for named keys (env CDI_KEY_DIR)")
      ->envname("CDI_KEY_DIR");
  app.add_option("--seed", g.seed_hex,
                 "32-byte hex seed for deterministic key generation");
  CLI::Option* time_opt =
      app.add_option("--time", g.time, "timestamp override, Unix seconds");

  KeygenOpts keygen;
  CLI::App* keygen_cmd =
      app.add_subcommand("keygen", "generate a signing keypair");
  keygen_cmd->add_option("name", keygen.name, "key name (file stem)")->required();
  keygen_cmd->add_flag("--force", keygen.force, "overwrite existing key files");

  CLI::App* va_cmd = app.add_subcommand("va", "vetting authority operations");
  va_cmd->require_subcommand(1);
  va_cmd->fallthrough();

  VaInitOpts va_init;
  CLI::App* va_init_cmd =
      va_cmd->add_subcommand("init", "create a self-signed root authority");
  va_init_cmd->add_option("--name", va_init.name, "authority display name")
      ->required();
  add_validity_flags(va_init_cmd, va_init.common);

  VaIssueOpts va_issue;
  CLI::App* va_issue_cmd = va_cmd->add_subcommand(
      "issue", "certify a child authority's public key");
  va_issue_cmd->add_option("--name", va_issue.name, "child authority display name")
      ->required();
  va_issue_cmd
      ->add_option("--subject-key", va_issue.subject_key,
                   "child authority public key (path or name)")
      ->required();
  add_validity_flags(va_issue_cmd, va_issue.common);

  VaCertifyToolOpts va_certify;
  CLI::App* va_certify_cmd =
      va_cmd->add_subcommand("certify-tool", "assert properties of a tool");
  va_certify_cmd->add_option("--tool", va_certify.tool_id, "tool identifier")
      ->required();
  va_certify_cmd->add_option("--version", va_certify.version_pattern,
                             "exact version or \"*\"");
  va_certify_cmd->add_option("--keyid", va_certify.keyids,
                             "certified signing keyid (repeatable)");
  va_certify_cmd->add_option("--measurement", va_certify.measurements,
                             "certified enclave measurement (repeatable)");
  va_certify_cmd
      ->add_option("--property", va_certify.properties,
                   "asserted property (repeatable)")
      ->required();
  add_validity_flags(va_certify_cmd, va_certify.common);

  RecordOpts record;
  CLI::App* record_cmd =
      app.add_subcommand("record", "record one signed operation statement");
  record_cmd->add_option("--tool", record.tool_id, "tool identifier")->required();
  record_cmd->add_option("--version", record.tool_version, "tool version")
      ->required();
  record_cmd->add_option("--type", record.type, "transform or inspect")
      ->check(CLI::IsMember({"transform", "inspect"}));
  record_cmd->add_option("--param", record.params,
                         "operation parameter key=value (repeatable)");
  record_cmd->add_option("--input", record.inputs,
                         "input file, optionally path@upstream-digest "
                         "(repeatable)");
  record_cmd->add_option("--output", record.outputs, "output file (repeatable)");
  record_cmd->add_option("--key", record.key, "tool signing key (path or name)")
      ->required();
  CLI::Option* tee_key = record_cmd->add_option(
      "--tee-platform-key", record.tee_platform_key,
      "platform attestation key; enables simulated enclave evidence");
  CLI::Option* tee_id = record_cmd->add_option(
      "--tee-platform-id", record.tee_platform_id, "platform identifier");
  CLI::Option* tee_code = record_cmd->add_option(
      "--tee-code-digest", record.tee_code_digest,
      "digest of the tool binary, folded into the enclave measurement");
  tee_key->needs(tee_id)->needs(tee_code);
  tee_id->needs(tee_key);
  tee_code->needs(tee_key);
  record_cmd->add_option("-o,--output-file", record.out, "output statement file")
      ->required();

  BundleOpts bundle;
  CLI::App* bundle_cmd = app.add_subcommand(
      "bundle", "assemble statements and certificates around an artifact");
  bundle_cmd->add_option("--artifact", bundle.artifact, "deployed artifact file")
      ->required();
  bundle_cmd
      ->add_option("--statement", bundle.statement_files,
                   "signed statement file (repeatable)")
      ->required();
  bundle_cmd->add_option("--cert", bundle.cert_files,
                         "tool certification file (repeatable)");
  bundle_cmd->add_option("--va-cert", bundle.va_cert_files,
                         "authority certificate file (repeatable)");
  bundle_cmd->add_option("-o,--output", bundle.out, "output bundle file")
      ->required();

  VerifyOpts verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "validate a bundle against a trust policy");
  verify_cmd->add_option("--bundle", verify.bundle_file, "bundle file")->required();
  verify_cmd->add_option("--policy", verify.policy_file, "trust policy file")
      ->required();

  InspectOpts inspect;
  CLI::App* inspect_cmd =
      app.add_subcommand("inspect", "pretty-print any CDI JSON file");
  inspect_cmd->add_option("file", inspect.file, "file to inspect")->required();

  try {
    app.parse(argc, argv);
    g.time_set = time_opt->count() > 0;

    if (keygen_cmd->parsed()) return cmd_keygen(g, keygen);
    if (va_cmd->parsed()) {
      if (va_init_cmd->parsed()) return cmd_va_init(g, va_init);
      if (va_issue_cmd->parsed()) return cmd_va_issue(g, va_issue);
      return cmd_va_certify_tool(g, va_certify);
    }
    if (record_cmd->parsed()) return cmd_record(g, record);
    if (bundle_cmd->parsed()) return cmd_bundle(g, bundle);
    if (verify_cmd->parsed()) return cmd_verify(g, verify);
    return cmd_inspect(g, inspect);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "cdi: error: " << e.what() << "\n";
    return kExitUsage;
  }
}
