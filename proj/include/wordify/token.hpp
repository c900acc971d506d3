#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "wordify/game.hpp"
#include "wordify/roster.hpp"

namespace wordify {

struct TokenClaims {
  std::string user_id;
  Role role = Role::Student;
  Timestamp expires_at = 0;

  bool operator==(const TokenClaims&) const = default;
};

// "<hex claims>.<hex HMAC-SHA256 of the claims>". Any holder of the secret
// can verify a token, so no session state is kept.
std::string issue_token(const TokenClaims& claims, std::string_view secret);

// Empty when the signature is wrong, the token is malformed, or it has expired.
std::optional<TokenClaims> verify_token(std::string_view token, std::string_view secret, Timestamp now = now_ms());

}  // namespace wordify
