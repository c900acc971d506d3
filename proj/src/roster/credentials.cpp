#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordify/error.hpp"
#include "wordify/roster.hpp"

namespace wordify {

namespace {

constexpr int kIterations = 20000;
constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kHashBytes = 32;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xF];
  }
  return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<unsigned char>(hi << 4 | lo));
  }
  return out;
}

std::array<unsigned char, kHashBytes> derive(std::string_view credential, const unsigned char* salt,
                                             std::size_t salt_len, int iterations) {
  std::array<unsigned char, kHashBytes> out{};
  if (PKCS5_PBKDF2_HMAC(credential.data(), static_cast<int>(credential.size()), salt, static_cast<int>(salt_len),
                        iterations, EVP_sha256(), static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(Errc::StorageFailure, "PBKDF2 derivation failed");
  }
  return out;
}

}  // namespace

std::string hash_credential(std::string_view credential) {
  std::array<unsigned char, kSaltBytes> salt{};
  if (RAND_bytes(salt.data(), static_cast<int>(salt.size())) != 1) {
    throw Error(Errc::StorageFailure, "no randomness for credential salt");
  }
  const auto hash = derive(credential, salt.data(), salt.size(), kIterations);
  return "pbkdf2-sha256$" + std::to_string(kIterations) + "$" + to_hex(salt.data(), salt.size()) + "$" +
         to_hex(hash.data(), hash.size());
}

bool verify_credential(std::string_view credential, std::string_view encoded) {
  constexpr std::string_view prefix = "pbkdf2-sha256$";
  if (!encoded.starts_with(prefix)) return false;
  encoded.remove_prefix(prefix.size());
  const auto d1 = encoded.find('$');
  if (d1 == std::string_view::npos) return false;
  const auto d2 = encoded.find('$', d1 + 1);
  if (d2 == std::string_view::npos) return false;

  int iterations = 0;
  try {
    iterations = std::stoi(std::string(encoded.substr(0, d1)));
  } catch (const std::exception&) {
    return false;
  }
  const auto salt = from_hex(encoded.substr(d1 + 1, d2 - d1 - 1));
  const auto expected = from_hex(encoded.substr(d2 + 1));
  if (iterations <= 0 || !salt || !expected || expected->size() != kHashBytes) return false;

  const auto actual = derive(credential, salt->data(), salt->size(), iterations);
  return CRYPTO_memcmp(actual.data(), expected->data(), kHashBytes) == 0;
}

}  // namespace wordify
