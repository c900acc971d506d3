#include <algorithm>
#include <array>
#include <charconv>
#include <tuple>

#include "wordify/error.hpp"
#include "wordify/roster.hpp"

namespace wordify {

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 5> kRoleNames = {{
    {Role::Student, "student"},
    {Role::Teacher, "teacher"},
    {Role::Administrator, "administrator"},
    {Role::Developer, "developer"},
    {Role::SystemAdministrator, "system_administrator"},
}};

long serial_of(std::string_view id) {
  if (!id.starts_with("u-")) return 0;
  long n = 0;
  const auto* begin = id.data() + 2;
  const auto* end = id.data() + id.size();
  auto [ptr, ec] = std::from_chars(begin, end, n);
  return (ec == std::errc() && ptr == end) ? n : 0;
}

}  // namespace

std::string_view role_name(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

nlohmann::json user_to_json(const User& user) {
  nlohmann::json out{{"id", user.id}, {"name", user.display_name}, {"role", role_name(user.role)}};
  out["teacher_id"] = user.teacher_id ? nlohmann::json(*user.teacher_id) : nlohmann::json(nullptr);
  out["school_id"] = user.school_id ? nlohmann::json(*user.school_id) : nlohmann::json(nullptr);
  return out;
}

Roster::Roster(std::vector<User> users) {
  for (auto& u : users) {
    next_serial_ = std::max(next_serial_, serial_of(u.id) + 1);
    auto id = u.id;
    users_.emplace(std::move(id), std::move(u));
  }
}

const User& Roster::create_user(const NewUserRequest& request) {
  const auto role = parse_role(request.role);
  if (!role) throw Error(Errc::InvalidRole, "'" + request.role + "'");
  if (request.name.empty()) throw Error(Errc::ConfigInvalid, "user name is empty");
  if (request.credential.empty()) throw Error(Errc::ConfigInvalid, "credential is empty");

  User user;
  user.display_name = request.name;
  user.role = *role;
  user.school_id = request.school_id;
  if (request.teacher_id) {
    if (*role != Role::Student) throw Error(Errc::ConfigInvalid, "only students are registered under a teacher");
    const User* teacher = find(*request.teacher_id);
    if (!teacher || teacher->role != Role::Teacher) throw Error(Errc::UnknownTeacher, "'" + *request.teacher_id + "'");
    user.teacher_id = teacher->id;
    if (!user.school_id) user.school_id = teacher->school_id;
  }

  for (const auto& [_, other] : users_) {
    if (other.display_name == user.display_name && other.school_id == user.school_id) {
      throw Error(Errc::DuplicateName, "'" + user.display_name + "' already exists" +
                                           (user.school_id ? " in school '" + *user.school_id + "'" : std::string()));
    }
  }

  user.credential_hash = hash_credential(request.credential);
  user.id = "u-" + std::to_string(next_serial_++);
  auto id = user.id;
  return users_.emplace(std::move(id), std::move(user)).first->second;
}

const User* Roster::find(std::string_view id) const {
  auto it = users_.find(id);
  return it == users_.end() ? nullptr : &it->second;
}

const User* Roster::authenticate(std::string_view name, std::string_view credential,
                                 const std::optional<std::string>& school_id) const {
  const User* match = nullptr;
  for (const auto& [_, u] : users_) {
    if (u.display_name != name) continue;
    if (school_id && u.school_id != school_id) continue;
    if (match) return nullptr;  // ambiguous without a school
    match = &u;
  }
  if (!match || !verify_credential(credential, match->credential_hash)) return nullptr;
  return match;
}

std::vector<const User*> Roster::students_of(std::string_view teacher_id) const {
  std::vector<const User*> out;
  for (const auto& [_, u] : users_) {
    if (u.role == Role::Student && u.teacher_id && *u.teacher_id == teacher_id) out.push_back(&u);
  }
  std::sort(out.begin(), out.end(), [](const User* a, const User* b) {
    return std::tie(a->display_name, a->id) < std::tie(b->display_name, b->id);
  });
  return out;
}

std::vector<const User*> Roster::all() const {
  std::vector<const User*> out;
  for (const auto& [_, u] : users_) out.push_back(&u);
  return out;
}

}  // namespace wordify
