#include <algorithm>
#include <sstream>

#include "wordify/error.hpp"
#include "wordify/roster.hpp"

namespace wordify {

using nlohmann::json;

namespace {

WordProgress& word_entry(ProgressRecord& r, const std::string& word_id) {
  auto it = std::find_if(r.per_word.begin(), r.per_word.end(),
                         [&](const WordProgress& w) { return w.word_id == word_id; });
  if (it != r.per_word.end()) return *it;
  return r.per_word.emplace_back(WordProgress{word_id, {}});
}

void tally(std::map<std::string, Tally, std::less<>>& into, const std::string& key, bool correct) {
  auto& t = into[key];
  (correct ? t.correct : t.incorrect) += 1;
}

json tallies_json(const std::map<std::string, Tally, std::less<>>& m) {
  json out = json::object();
  for (const auto& [k, t] : m) out[k] = {{"correct", t.correct}, {"incorrect", t.incorrect}};
  return out;
}

}  // namespace

ProgressRecord build_progress(const GameState& game, std::string_view owner_id, const Roster& roster) {
  const User* owner = roster.find(owner_id);
  if (!owner || owner->role != Role::Student) {
    throw Error(Errc::OrphanGame, "game '" + game_id_of(game) + "' has no student owner");
  }

  ProgressRecord r;
  r.student_id = owner->id;
  r.game_id = game_id_of(game);
  r.game_kind = kind_of(game);
  r.started_at = created_at_of(game);

  const auto* matching = std::get_if<MatchingGameState>(&game);
  for (const auto& e : events_of(game)) {
    switch (e.kind) {
      case EventKind::SoundChoice:
        ++word_entry(r, *e.word_id).attempts[std::string(kStageSound)];
        tally(r.per_category, *e.submitted, *e.correct);
        break;
      case EventKind::PatternChoice:
        ++word_entry(r, *e.word_id).attempts[std::string(kStagePattern)];
        tally(r.per_pattern, *e.submitted, *e.correct);
        break;
      case EventKind::SpellingAttempt:
        ++word_entry(r, *e.word_id).attempts[std::string(kStageSpell)];
        break;
      case EventKind::CardFlip:
        ++word_entry(r, *e.word_id).attempts[std::string(kStageFlip)];
        break;
      case EventKind::PairResolved:
        if (matching && e.cards[0] < matching->cards.size()) {
          tally(r.per_category, matching->cards[e.cards[0]].category, *e.correct);
        }
        break;
      case EventKind::Complete:
        r.finished_at = e.timestamp;
        break;
      case EventKind::Pause:
      case EventKind::Resume:
        break;
    }
  }
  return r;
}

void ProgressTotals::add(const ProgressRecord& record) {
  ++games;
  for (const auto& w : record.per_word) {
    auto& stages = per_word[w.word_id];
    for (const auto& [stage, n] : w.attempts) stages[stage] += n;
  }
  for (const auto& [k, t] : record.per_pattern) per_pattern[k] += t;
  for (const auto& [k, t] : record.per_category) per_category[k] += t;
}

void ProgressTotals::add(const ProgressTotals& other) {
  games += other.games;
  for (const auto& [word, stages] : other.per_word) {
    auto& mine = per_word[word];
    for (const auto& [stage, n] : stages) mine[stage] += n;
  }
  for (const auto& [k, t] : other.per_pattern) per_pattern[k] += t;
  for (const auto& [k, t] : other.per_category) per_category[k] += t;
}

ClassReport class_report(const Roster& roster, std::string_view teacher_id, std::span<const OwnedGame> games) {
  const User* teacher = roster.find(teacher_id);
  if (!teacher || teacher->role != Role::Teacher) throw Error(Errc::UnknownTeacher, "'" + std::string(teacher_id) + "'");

  ClassReport report;
  report.teacher_id = teacher->id;
  for (const User* student : roster.students_of(teacher->id)) {
    StudentSummary summary{student->id, student->display_name, {}};
    for (const auto& g : games) {
      if (g.owner_id == student->id) summary.totals.add(build_progress(g.state, g.owner_id, roster));
    }
    report.totals.add(summary.totals);
    report.students.push_back(std::move(summary));
  }
  return report;
}

json to_json(const ProgressRecord& record) {
  json per_word = json::array();
  for (const auto& w : record.per_word) per_word.push_back({{"word_id", w.word_id}, {"attempts", w.attempts}});
  json out{
      {"student_id", record.student_id},
      {"game_id", record.game_id},
      {"game_kind", game_kind_name(record.game_kind)},
      {"started_at", record.started_at},
      {"per_word", std::move(per_word)},
      {"per_pattern", tallies_json(record.per_pattern)},
      {"per_category", tallies_json(record.per_category)},
  };
  out["finished_at"] = record.finished_at ? json(*record.finished_at) : json(nullptr);
  return out;
}

json to_json(const ProgressTotals& totals) {
  json per_word = json::object();
  for (const auto& [word, stages] : totals.per_word) per_word[word] = stages;
  return json{
      {"games", totals.games},
      {"per_word", std::move(per_word)},
      {"per_pattern", tallies_json(totals.per_pattern)},
      {"per_category", tallies_json(totals.per_category)},
  };
}

json to_json(const ClassReport& report, bool anonymize) {
  json students = json::array();
  int n = 0;
  for (const auto& s : report.students) {
    ++n;
    const std::string alias = "student-" + std::to_string(n);
    students.push_back({{"student_id", anonymize ? alias : s.student_id},
                        {"name", anonymize ? alias : s.display_name},
                        {"totals", to_json(s.totals)}});
  }
  return json{{"teacher_id", report.teacher_id}, {"students", std::move(students)}, {"totals", to_json(report.totals)}};
}

std::string progress_csv(std::span<const ProgressRecord> records) {
  std::ostringstream out;
  out << "student_id,game_id,word_id,stage,attempts\n";
  for (const auto& r : records) {
    for (const auto& w : r.per_word) {
      for (const auto& [stage, n] : w.attempts) {
        out << r.student_id << ',' << r.game_id << ',' << w.word_id << ',' << stage << ',' << n << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace wordify
