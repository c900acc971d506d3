#include "wordify/token.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>

#include "json.hpp"

namespace wordify {

namespace {

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += kDigits[c >> 4];
    out += kDigits[c & 0xF];
  }
  return out;
}

std::optional<std::string> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out += static_cast<char>(hi << 4 | lo);
  }
  return out;
}

std::string mac(std::string_view payload, std::string_view secret) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
       reinterpret_cast<const unsigned char*>(payload.data()), payload.size(), out.data(), &len);
  return std::string(reinterpret_cast<const char*>(out.data()), len);
}

}  // namespace

std::string issue_token(const TokenClaims& claims, std::string_view secret) {
  const nlohmann::json body{{"sub", claims.user_id}, {"role", role_name(claims.role)}, {"exp", claims.expires_at}};
  const std::string payload = body.dump();
  return to_hex(payload) + "." + to_hex(mac(payload, secret));
}

std::optional<TokenClaims> verify_token(std::string_view token, std::string_view secret, Timestamp now) {
  const auto dot = token.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto payload = from_hex(token.substr(0, dot));
  const auto signature = from_hex(token.substr(dot + 1));
  if (!payload || !signature) return std::nullopt;
  const std::string expected = mac(*payload, secret);
  if (signature->size() != expected.size() ||
      CRYPTO_memcmp(signature->data(), expected.data(), expected.size()) != 0) {
    return std::nullopt;
  }

  const auto body = nlohmann::json::parse(*payload, nullptr, false);
  if (!body.is_object()) return std::nullopt;
  const auto sub = body.find("sub");
  const auto role = body.find("role");
  const auto exp = body.find("exp");
  if (sub == body.end() || !sub->is_string() || role == body.end() || !role->is_string() || exp == body.end() ||
      !exp->is_number_integer()) {
    return std::nullopt;
  }
  const auto parsed_role = parse_role(role->get<std::string>());
  if (!parsed_role) return std::nullopt;
  TokenClaims claims{sub->get<std::string>(), *parsed_role, exp->get<Timestamp>()};
  if (claims.expires_at <= now) return std::nullopt;
  return claims;
}

}  // namespace wordify
