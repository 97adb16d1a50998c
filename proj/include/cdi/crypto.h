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

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "cdi/bytes.h"

namespace cdi {

// Content address of a byte sequence. Algorithm is fixed to SHA-256; the
// tag stays in the rendered form ("sha256:<hex>") for format evolution.
struct Digest {
  std::string hex;  // exactly 64 lowercase hex characters

  static constexpr std::string_view kAlgorithm = "sha256";

  std::string to_string() const;

  // Parses the rendered form "sha256:<64 lowercase hex>". Throws DecodeError.
  static Digest parse(std::string_view rendered);

  auto operator<=>(const Digest&) const = default;
};

struct Signature {
  Bytes bytes;  // 64-byte Ed25519 detached signature

  bool operator==(const Signature&) const = default;
};

struct PublicKey {
  std::string scheme;  // "ed25519"
  Bytes bytes;         // 32-byte raw public key

  bool operator==(const PublicKey&) const = default;
};

struct KeyPair {
  Bytes secret;   // opaque private material (64-byte Ed25519 secret key)
  PublicKey pub;
};

inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::string_view kSignatureScheme = "ed25519";

// SHA-256 of the input. Deterministic.
Digest digest(std::span<const std::uint8_t> data);
Digest digest(std::string_view data);

// Fresh keypair from the system CSPRNG.
KeyPair generate_keypair();

// Deterministic keypair from a 32-byte seed. Throws Error on any other
// seed length.
KeyPair generate_keypair(std::span<const std::uint8_t> seed);

// Detached Ed25519 signature over exactly payload. Deterministic.
Signature sign(const KeyPair& key, std::span<const std::uint8_t> payload);

// True iff sig was produced over exactly payload by the private counterpart
// of pubkey. Malformed key or signature (wrong scheme or sizes) throws
// DecodeError rather than returning false.
bool verify(const PublicKey& pubkey, std::span<const std::uint8_t> payload,
            const Signature& sig);

// Canonical serialization of the key record { "public": <hex>, "scheme" }.
Bytes canonical_public_key(const PublicKey& pubkey);

// Stable key identifier: digest of the key's canonical serialization.
// Depends only on key content, not construction path.
Digest keyid(const PublicKey& pubkey);

}  // namespace cdi
