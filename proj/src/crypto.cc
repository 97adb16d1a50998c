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

#include "cdi/crypto.h"

#include <sodium.h>

#include <mutex>

#include "cdi/canonical.h"
#include "cdi/error.h"

static_assert(cdi::kSeedSize == crypto_sign_SEEDBYTES);
static_assert(cdi::kPublicKeySize == crypto_sign_PUBLICKEYBYTES);
static_assert(cdi::kSecretKeySize == crypto_sign_SECRETKEYBYTES);
static_assert(cdi::kSignatureSize == crypto_sign_BYTES);

namespace cdi {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw Error("libsodium initialization failed");
    }
  });
}

constexpr char kLowerHex[] = "0123456789abcdef";

bool is_lower_hex(std::string_view s) {
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string Digest::to_string() const {
  return std::string(kAlgorithm) + ":" + hex;
}

Digest Digest::parse(std::string_view rendered) {
  constexpr std::string_view prefix = "sha256:";
  if (rendered.substr(0, prefix.size()) != prefix) {
    throw DecodeError("digest must start with \"sha256:\"");
  }
  std::string_view hex = rendered.substr(prefix.size());
  if (hex.size() != 64 || !is_lower_hex(hex)) {
    throw DecodeError("digest hex must be 64 lowercase hex characters");
  }
  return Digest{std::string(hex)};
}

Digest digest(std::span<const std::uint8_t> data) {
  ensure_sodium();
  unsigned char out[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(out, data.data(), data.size());
  std::string hex;
  hex.reserve(2 * sizeof(out));
  for (unsigned char b : out) {
    hex.push_back(kLowerHex[b >> 4]);
    hex.push_back(kLowerHex[b & 0x0f]);
  }
  return Digest{std::move(hex)};
}

Digest digest(std::string_view data) {
  return digest(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

KeyPair generate_keypair() {
  ensure_sodium();
  KeyPair kp;
  kp.secret.resize(crypto_sign_SECRETKEYBYTES);
  kp.pub.scheme = std::string(kSignatureScheme);
  kp.pub.bytes.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_keypair(kp.pub.bytes.data(), kp.secret.data());
  return kp;
}

KeyPair generate_keypair(std::span<const std::uint8_t> seed) {
  ensure_sodium();
  if (seed.size() != crypto_sign_SEEDBYTES) {
    throw Error("seed must be exactly 32 bytes");
  }
  KeyPair kp;
  kp.secret.resize(crypto_sign_SECRETKEYBYTES);
  kp.pub.scheme = std::string(kSignatureScheme);
  kp.pub.bytes.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_seed_keypair(kp.pub.bytes.data(), kp.secret.data(), seed.data());
  return kp;
}

Signature sign(const KeyPair& key, std::span<const std::uint8_t> payload) {
  ensure_sodium();
  if (key.secret.size() != crypto_sign_SECRETKEYBYTES) {
    throw DecodeError("malformed secret key");
  }
  Signature sig;
  sig.bytes.resize(crypto_sign_BYTES);
  crypto_sign_detached(sig.bytes.data(), nullptr, payload.data(), payload.size(),
                       key.secret.data());
  return sig;
}

bool verify(const PublicKey& pubkey, std::span<const std::uint8_t> payload,
            const Signature& sig) {
  ensure_sodium();
  if (pubkey.scheme != kSignatureScheme) {
    throw DecodeError("unsupported signature scheme: " + pubkey.scheme);
  }
  if (pubkey.bytes.size() != crypto_sign_PUBLICKEYBYTES) {
    throw DecodeError("malformed public key: wrong length");
  }
  if (sig.bytes.size() != crypto_sign_BYTES) {
    throw DecodeError("malformed signature: wrong length");
  }
  return crypto_sign_verify_detached(sig.bytes.data(), payload.data(),
                                     payload.size(), pubkey.bytes.data()) == 0;
}

Bytes canonical_public_key(const PublicKey& pubkey) {
  Json j = Json::object();
  j["public"] = hex_encode(pubkey.bytes);
  j["scheme"] = pubkey.scheme;
  return canonicalize(j);
}

Digest keyid(const PublicKey& pubkey) {
  return digest(std::span<const std::uint8_t>(canonical_public_key(pubkey)));
}

}  // namespace cdi
