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

#include <gtest/gtest.h>

#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdi/error.h"
#include "cdi/json_io.h"
#include "testing_support.h"

namespace cdi {
namespace {

using ::cdi::testing::kEvalTime;
using ::cdi::testing::kProperty;
using ::cdi::testing::kValidityEnd;
using ::cdi::testing::kValidityStart;
using ::cdi::testing::make_pipeline_fixture;
using ::cdi::testing::make_random_cert_trial;
using ::cdi::testing::oracle_cert_path_exists;
using ::cdi::testing::PipelineFixture;
using ::cdi::testing::seeded_keypair;

constexpr Validity kWindow{testing::kValidityStart, testing::kValidityEnd};

ToolCertification certify(const KeyPair& issuer, const Digest& tool_keyid) {
  return issue_tool_certification(issuer, {"demo-tool", "*"}, {tool_keyid}, {},
                                  {std::string(kProperty)}, kWindow);
}

// A chain of `intermediates` authority certificates between the leaf issuer
// and a self-signed root, plus the tool certification signed by the leaf.
struct AuthorityChain {
  std::vector<KeyPair> keys;  // leaf first, root last
  std::vector<AuthorityCertificate> pool;
  ToolCertification tool_cert;
  Digest root_keyid;
};

AuthorityChain make_authority_chain(int depth, const Digest& tool_keyid) {
  AuthorityChain chain;
  for (int i = 0; i < depth; ++i) {
    chain.keys.push_back(seeded_keypair(static_cast<std::uint8_t>(0x70 + i)));
  }
  for (int i = 0; i + 1 < depth; ++i) {
    chain.pool.push_back(issue_authority_cert(chain.keys[i + 1],
                                              "authority-" + std::to_string(i),
                                              chain.keys[i].pub, kWindow));
  }
  const KeyPair& root = chain.keys.back();
  chain.pool.push_back(
      issue_authority_cert(root, "root", root.pub, kWindow));
  chain.tool_cert = certify(chain.keys.front(), tool_keyid);
  chain.root_keyid = keyid(root.pub);
  return chain;
}

TEST(ValidityTest, ContainsIsInclusive) {
  Validity window{100, 200};
  EXPECT_TRUE(window.contains(100));
  EXPECT_TRUE(window.contains(150));
  EXPECT_TRUE(window.contains(200));
  EXPECT_FALSE(window.contains(99));
  EXPECT_FALSE(window.contains(201));
}

TEST(ToolMatchTest, MatchesIdAndVersionPattern) {
  ToolInfo tool{"cc-tool", "13.2", digest("key")};
  EXPECT_TRUE((ToolMatch{"cc-tool", "*"}.matches(tool)));
  EXPECT_TRUE((ToolMatch{"cc-tool", "13.2"}.matches(tool)));
  EXPECT_FALSE((ToolMatch{"cc-tool", "13.3"}.matches(tool)));
  EXPECT_FALSE((ToolMatch{"ld-tool", "*"}.matches(tool)));
}

TEST(AuthorityCertTest, SelfSignedRootVerifies) {
  KeyPair root = seeded_keypair(0xa1);
  AuthorityCertificate cert =
      issue_authority_cert(root, "root", root.pub, kWindow);
  EXPECT_TRUE(cert.self_signed());
  EXPECT_EQ(cert.subject_keyid(), keyid(root.pub));
  Bytes signed_bytes = authority_cert_signing_bytes(cert);
  EXPECT_TRUE(verify(root.pub, std::span<const std::uint8_t>(signed_bytes),
                     cert.signature));
}

TEST(AuthorityCertTest, DelegationIsNotSelfSigned) {
  KeyPair root = seeded_keypair(0xa1);
  KeyPair child = seeded_keypair(0xa2);
  AuthorityCertificate cert =
      issue_authority_cert(root, "child", child.pub, kWindow);
  EXPECT_FALSE(cert.self_signed());
  EXPECT_EQ(cert.issuer_keyid, keyid(root.pub));
  EXPECT_EQ(cert.subject_keyid(), keyid(child.pub));
}

TEST(AuthorityCertTest, RejectsInvertedValidity) {
  KeyPair root = seeded_keypair(0xa1);
  EXPECT_THROW(issue_authority_cert(root, "root", root.pub, {2000, 1000}), Error);
  EXPECT_THROW(issue_authority_cert(root, "root", root.pub, {2000, 2000}), Error);
}

TEST(ToolCertificationTest, SignatureCoversTheRecord) {
  KeyPair authority = seeded_keypair(0xa1);
  ToolCertification cert = certify(authority, digest("tool-key"));
  Bytes signed_bytes = tool_certification_signing_bytes(cert);
  EXPECT_TRUE(verify(authority.pub, std::span<const std::uint8_t>(signed_bytes),
                     cert.signature));
  EXPECT_EQ(cert.issuer_keyid, keyid(authority.pub));
}

TEST(ToolCertificationTest, RejectsEmptyPropertiesAndCoverage) {
  KeyPair authority = seeded_keypair(0xa1);
  EXPECT_THROW(issue_tool_certification(authority, {"demo-tool", "*"},
                                        {digest("tool-key")}, {}, {}, kWindow),
               Error);
  EXPECT_THROW(issue_tool_certification(authority, {"demo-tool", "*"}, {}, {},
                                        {std::string(kProperty)}, kWindow),
               Error);
  Digest malformed;
  malformed.hex = "nope";
  EXPECT_THROW(issue_tool_certification(authority, {"demo-tool", "*"},
                                        {malformed}, {}, {std::string(kProperty)},
                                        kWindow),
               Error);
  EXPECT_THROW(issue_tool_certification(authority, {"demo-tool", "*"}, {},
                                        {malformed}, {std::string(kProperty)},
                                        kWindow),
               Error);
}

TEST(CertPathTest, DirectRootIssuerVerifies) {
  AuthorityChain chain = make_authority_chain(1, digest("tool-key"));
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  ASSERT_TRUE(result.ok) << result.reason;
  ASSERT_EQ(result.path.size(), 1u);
  EXPECT_TRUE(result.path[0].self_signed());
  EXPECT_EQ(result.root_keyid, chain.root_keyid);
}

TEST(CertPathTest, DelegatedPathEndsAtTheRoot) {
  AuthorityChain chain = make_authority_chain(3, digest("tool-key"));
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  ASSERT_TRUE(result.ok) << result.reason;
  ASSERT_EQ(result.path.size(), 3u);
  // Leaf issuer first, then its issuer, self-signed root last.
  EXPECT_EQ(result.path[0].subject_keyid(), keyid(chain.keys[0].pub));
  EXPECT_EQ(result.path[1].subject_keyid(), keyid(chain.keys[1].pub));
  EXPECT_TRUE(result.path[2].self_signed());
  EXPECT_EQ(result.root_keyid, chain.root_keyid);
}

TEST(CertPathTest, RejectsExpiredToolCertification) {
  AuthorityChain chain = make_authority_chain(2, digest("tool-key"));
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kValidityEnd + 1);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("certification window excludes evaluation time"),
            std::string::npos)
      << result.reason;
}

TEST(CertPathTest, RejectsExpiredIntermediate) {
  Digest tool_key = digest("tool-key");
  KeyPair leaf = seeded_keypair(0x70);
  KeyPair root = seeded_keypair(0x71);
  // The delegation expired long before the evaluation time.
  AuthorityCertificate stale =
      issue_authority_cert(root, "leaf", leaf.pub, {kValidityStart, kEvalTime - 10});
  AuthorityCertificate root_cert =
      issue_authority_cert(root, "root", root.pub, kWindow);
  ToolCertification cert = certify(leaf, tool_key);

  PathResult result = verify_cert_path(cert, std::vector{stale, root_cert},
                                       {keyid(root.pub)}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("validity violation on a candidate path"),
            std::string::npos)
      << result.reason;
}

TEST(CertPathTest, RejectsTamperedToolCertSignature) {
  AuthorityChain chain = make_authority_chain(2, digest("tool-key"));
  chain.tool_cert.signature.bytes[0] ^= 0x01;
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("signature failure"), std::string::npos)
      << result.reason;
}

TEST(CertPathTest, RejectsTamperedAuthorityCertSignature) {
  AuthorityChain chain = make_authority_chain(3, digest("tool-key"));
  chain.pool[0].signature.bytes[0] ^= 0x01;  // the leaf delegation
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("signature failure"), std::string::npos)
      << result.reason;
}

TEST(CertPathTest, RejectsRootOutsideTrustSet) {
  AuthorityChain chain = make_authority_chain(2, digest("tool-key"));
  KeyPair stranger = seeded_keypair(0x7f);
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {keyid(stranger.pub)}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("outside the trusted roots"), std::string::npos)
      << result.reason;
}

TEST(CertPathTest, ReportsMissingIssuerPlainly) {
  KeyPair leaf = seeded_keypair(0x70);
  ToolCertification cert = certify(leaf, digest("tool-key"));
  PathResult result =
      verify_cert_path(cert, {}, {keyid(leaf.pub)}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_EQ(result.reason, "no path to a trusted root");
}

TEST(CertPathTest, DepthCapAdmitsEightCertificates) {
  AuthorityChain chain = make_authority_chain(kMaxPathDepth, digest("tool-key"));
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  ASSERT_TRUE(result.ok) << result.reason;
  EXPECT_EQ(result.path.size(), static_cast<std::size_t>(kMaxPathDepth));
}

TEST(CertPathTest, DepthCapRejectsNineCertificates) {
  AuthorityChain chain =
      make_authority_chain(kMaxPathDepth + 1, digest("tool-key"));
  PathResult result = verify_cert_path(chain.tool_cert, chain.pool,
                                       {chain.root_keyid}, kEvalTime);
  EXPECT_FALSE(result.ok);
  EXPECT_NE(result.reason.find("path depth exceeded"), std::string::npos)
      << result.reason;
}

TEST(CertPathTest, BacktracksPastUntrustedSelfSignedCert) {
  // The leaf authority carries both a self-signed certificate (untrusted)
  // and a delegation from a trusted super-root. The search must not stop at
  // the dead end.
  KeyPair leaf = seeded_keypair(0x70);
  KeyPair super_root = seeded_keypair(0x71);
  AuthorityCertificate leaf_self =
      issue_authority_cert(leaf, "leaf", leaf.pub, kWindow);
  AuthorityCertificate leaf_delegated =
      issue_authority_cert(super_root, "leaf", leaf.pub, kWindow);
  AuthorityCertificate root_cert =
      issue_authority_cert(super_root, "root", super_root.pub, kWindow);
  ToolCertification cert = certify(leaf, digest("tool-key"));

  PathResult result =
      verify_cert_path(cert, std::vector{leaf_self, leaf_delegated, root_cert},
                       {keyid(super_root.pub)}, kEvalTime);
  ASSERT_TRUE(result.ok) << result.reason;
  EXPECT_EQ(result.root_keyid, keyid(super_root.pub));
  EXPECT_EQ(result.path.size(), 2u);
}

TEST(CertPathTest, SearchIsPoolOrderIndependent) {
  AuthorityChain chain = make_authority_chain(4, digest("tool-key"));
  // Add a decoy delegation so multiple candidates exist for one subject.
  chain.pool.push_back(issue_authority_cert(
      chain.keys[2], "authority-0", chain.keys[0].pub, kWindow));

  std::vector<AuthorityCertificate> reversed(chain.pool.rbegin(),
                                             chain.pool.rend());
  PathResult forward = verify_cert_path(chain.tool_cert, chain.pool,
                                        {chain.root_keyid}, kEvalTime);
  PathResult backward = verify_cert_path(chain.tool_cert, reversed,
                                         {chain.root_keyid}, kEvalTime);
  ASSERT_TRUE(forward.ok);
  ASSERT_TRUE(backward.ok);
  EXPECT_EQ(forward.path, backward.path);
  EXPECT_EQ(forward.root_keyid, backward.root_keyid);
}

TEST(CertifyingAuthoritiesTest, CountsTheFixtureAuthority) {
  PipelineFixture f = make_pipeline_fixture();
  const SignedStatement& compile = f.bundle.statements[1];
  auto authorities = certifying_authorities(
      compile, std::string(kProperty), f.bundle.certifications,
      f.bundle.authority_certs, f.policy.trusted_roots, kEvalTime);
  ASSERT_EQ(authorities.size(), 1u);
  EXPECT_EQ(authorities.begin()->first, keyid(f.authority_key.pub));
  EXPECT_EQ(authorities.begin()->second, keyid(f.authority_key.pub));
}

TEST(CertifyingAuthoritiesTest, UnknownPropertyCountsNothing) {
  PipelineFixture f = make_pipeline_fixture();
  auto authorities = certifying_authorities(
      f.bundle.statements[1], "reproducible-build", f.bundle.certifications,
      f.bundle.authority_certs, f.policy.trusted_roots, kEvalTime);
  EXPECT_TRUE(authorities.empty());
}

TEST(CertifyingAuthoritiesTest, VersionPatternMustMatch) {
  KeyPair authority = seeded_keypair(0xa1);
  KeyPair tool_key = seeded_keypair(0x11);
  AuthorityCertificate root =
      issue_authority_cert(authority, "root", authority.pub, kWindow);
  SignedStatement stmt = sign_statement(
      create_statement(ToolInfo{"demo-tool", "2.0", keyid(tool_key.pub)},
                       OperationType::kTransform, {}, {},
                       {{"out", digest("bytes")}}, 1700000000),
      tool_key);

  ToolCertification wrong_version = issue_tool_certification(
      authority, {"demo-tool", "1.0"}, {keyid(tool_key.pub)}, {},
      {std::string(kProperty)}, kWindow);
  auto none = certifying_authorities(stmt, std::string(kProperty),
                                     std::vector{wrong_version}, std::vector{root},
                                     {keyid(authority.pub)}, kEvalTime);
  EXPECT_TRUE(none.empty());

  ToolCertification exact_version = issue_tool_certification(
      authority, {"demo-tool", "2.0"}, {keyid(tool_key.pub)}, {},
      {std::string(kProperty)}, kWindow);
  auto one = certifying_authorities(stmt, std::string(kProperty),
                                    std::vector{exact_version}, std::vector{root},
                                    {keyid(authority.pub)}, kEvalTime);
  EXPECT_EQ(one.size(), 1u);
}

TEST(CertifyingAuthoritiesTest, OneAuthorityCountsOnce) {
  PipelineFixture f = make_pipeline_fixture();
  // Duplicate certification from the same authority for the same tool.
  f.bundle.certifications.push_back(issue_tool_certification(
      f.authority_key, {"cc-tool", "13.2"}, {keyid(f.compile_key.pub)}, {},
      {std::string(kProperty)}, kWindow));
  auto authorities = certifying_authorities(
      f.bundle.statements[1], std::string(kProperty), f.bundle.certifications,
      f.bundle.authority_certs, f.policy.trusted_roots, kEvalTime);
  EXPECT_EQ(authorities.size(), 1u);
}

TEST(CertifyingAuthoritiesTest, IndependentAuthoritiesCountSeparately) {
  testing::TwoAuthorityFixture f = testing::make_two_authority_fixture();
  auto authorities = certifying_authorities(
      f.base.bundle.statements[1], std::string(kProperty),
      f.base.bundle.certifications, f.base.bundle.authority_certs,
      f.base.policy.trusted_roots, kEvalTime);
  EXPECT_EQ(authorities.size(), 2u);
  EXPECT_TRUE(authorities.contains(keyid(f.base.authority_key.pub)));
  EXPECT_TRUE(authorities.contains(keyid(f.authority2_key.pub)));
}

TEST(CertifyingAuthoritiesTest, MeasurementCoverageNeedsEvidence) {
  KeyPair authority = seeded_keypair(0xa1);
  KeyPair platform = seeded_keypair(0x55);
  AuthorityCertificate root =
      issue_authority_cert(authority, "root", authority.pub, kWindow);

  EnclaveMeasurement m = enclave_measurement("demo-tool", "1.0", digest("code"));
  auto [enclave_key, evidence] = simulate_enclave_keygen(m, platform, "plat-01");
  OperationStatement payload = create_statement(
      ToolInfo{"demo-tool", "1.0", keyid(enclave_key.pub)},
      OperationType::kTransform, {}, {}, {{"out", digest("bytes")}}, 1700000000);

  // Certification covers the measurement only, not the signing keyid.
  ToolCertification by_measurement = issue_tool_certification(
      authority, {"demo-tool", "*"}, {}, {m}, {std::string(kProperty)}, kWindow);

  SignedStatement with_evidence = sign_statement(payload, enclave_key, evidence);
  auto counted = certifying_authorities(
      with_evidence, std::string(kProperty), std::vector{by_measurement},
      std::vector{root}, {keyid(authority.pub)}, kEvalTime);
  EXPECT_EQ(counted.size(), 1u);

  SignedStatement without_evidence = sign_statement(payload, enclave_key);
  auto skipped = certifying_authorities(
      without_evidence, std::string(kProperty), std::vector{by_measurement},
      std::vector{root}, {keyid(authority.pub)}, kEvalTime);
  EXPECT_TRUE(skipped.empty());
}

TEST(CertifyingAuthoritiesTest, UntrustedRootCountsNothing) {
  PipelineFixture f = make_pipeline_fixture();
  KeyPair stranger = seeded_keypair(0x7f);
  auto authorities = certifying_authorities(
      f.bundle.statements[1], std::string(kProperty), f.bundle.certifications,
      f.bundle.authority_certs, {keyid(stranger.pub)}, kEvalTime);
  EXPECT_TRUE(authorities.empty());
}

// Randomized agreement between the production search and the naive
// enumeration oracle. The full 200-trial run lives in the acceptance suite;
// this is the fast regression slice.
TEST(CertPathOracleTest, AgreesWithNaiveEnumeration) {
  std::mt19937_64 rng(20260814);
  int accepted = 0;
  int rejected = 0;
  for (int trial = 0; trial < 60; ++trial) {
    testing::CertPathTrial t = make_random_cert_trial(rng);
    bool expected = oracle_cert_path_exists(t);
    PathResult actual =
        verify_cert_path(t.tool_cert, t.pool, t.trusted_roots, t.at_time);
    ASSERT_EQ(actual.ok, expected)
        << "trial " << trial << " diverged; reason: " << actual.reason;
    (expected ? accepted : rejected) += 1;
  }
  // The trial generator must exercise both outcomes or the loop proves
  // nothing.
  EXPECT_GT(accepted, 0);
  EXPECT_GT(rejected, 0);
}

TEST(VettingJsonTest, CertificatesRoundTrip) {
  PipelineFixture f = make_pipeline_fixture();
  const AuthorityCertificate& root = f.bundle.authority_certs[0];
  Bytes root_bytes = canonicalize(to_json(root));
  EXPECT_EQ(authority_cert_from_json(
                parse_json(std::string(root_bytes.begin(), root_bytes.end()))),
            root);

  const ToolCertification& cert = f.bundle.certifications[0];
  Bytes cert_bytes = canonicalize(to_json(cert));
  EXPECT_EQ(tool_certification_from_json(
                parse_json(std::string(cert_bytes.begin(), cert_bytes.end()))),
            cert);
}

}  // namespace
}  // namespace cdi
