#include "wordify/consistency.hpp"

#include <sstream>

namespace wordify {

namespace {

void record_witness(std::map<std::pair<std::string, PhonemeSequence>, std::vector<std::string>>& into,
                    const std::string& grapheme, const PhonemeSequence& phonemes, const std::string& word_id) {
  auto& ids = into[{grapheme, phonemes}];
  if (ids.empty() || ids.back() != word_id) ids.push_back(word_id);
}

std::vector<UnitWitness> flatten(std::map<std::pair<std::string, PhonemeSequence>, std::vector<std::string>>& m) {
  std::vector<UnitWitness> out;
  for (auto& [key, ids] : m) out.push_back({key.first, key.second, std::move(ids)});
  return out;
}

std::string bracketed(const PhonemeSequence& seq) { return "[" + join_phonemes(seq, ",") + "]"; }

}  // namespace

ConsistencyReport consistency_report(const Lexicon& lexicon) {
  ConsistencyReport r;
  std::map<std::pair<std::string, PhonemeSequence>, std::vector<std::string>> multi_phoneme;
  std::map<std::pair<std::string, PhonemeSequence>, std::vector<std::string>> multi_letter;

  for (const Word* w : lexicon.ordered()) {
    for (const auto& unit : w->units) {
      const std::string g = grapheme_text(w->spelling, unit);
      r.grapheme_to_phonemes[g].insert(unit.phonemes);
      for (const auto& p : unit.phonemes) r.phoneme_to_graphemes[p].insert(g);
      if (unit.phonemes.size() >= 2) record_witness(multi_phoneme, g, unit.phonemes, w->id);
      if (unit.letters.size() >= 2 && !unit.phonemes.empty()) record_witness(multi_letter, g, unit.phonemes, w->id);
    }
  }

  for (const auto& [g, realizations] : r.grapheme_to_phonemes) {
    if (realizations.size() >= 2) r.one_grapheme_many_sounds.push_back(g);
  }
  for (const auto& [p, graphemes] : r.phoneme_to_graphemes) {
    if (graphemes.size() >= 2) r.one_sound_many_graphemes.push_back(p);
  }
  r.multi_phoneme_units = flatten(multi_phoneme);
  r.multi_letter_units = flatten(multi_letter);
  return r;
}

nlohmann::json to_json(const ConsistencyReport& report) {
  using nlohmann::json;
  auto seq_json = [](const PhonemeSequence& seq) {
    json a = json::array();
    for (const auto& p : seq) a.push_back(p.code());
    return a;
  };
  auto witnesses_json = [&](const std::vector<UnitWitness>& ws) {
    json a = json::array();
    for (const auto& w : ws) a.push_back({{"grapheme", w.grapheme}, {"phonemes", seq_json(w.phonemes)}, {"words", w.word_ids}});
    return a;
  };

  json g2p = json::object();
  for (const auto& [g, set] : report.grapheme_to_phonemes) {
    json a = json::array();
    for (const auto& seq : set) a.push_back(seq_json(seq));
    g2p[g] = std::move(a);
  }
  json p2g = json::object();
  for (const auto& [p, set] : report.phoneme_to_graphemes) p2g[p.code()] = set;

  json one_grapheme = json::array();
  for (const auto& g : report.one_grapheme_many_sounds) {
    json realizations = json::array();
    for (const auto& seq : report.grapheme_to_phonemes.at(g)) realizations.push_back(seq_json(seq));
    one_grapheme.push_back({{"grapheme", g}, {"realizations", std::move(realizations)}});
  }
  json one_sound = json::array();
  for (const auto& p : report.one_sound_many_graphemes) {
    one_sound.push_back({{"phoneme", p.code()}, {"graphemes", report.phoneme_to_graphemes.at(p)}});
  }

  return json{
      {"grapheme_to_phonemes", std::move(g2p)},
      {"phoneme_to_graphemes", std::move(p2g)},
      {"one_grapheme_many_sounds", {{"count", report.one_grapheme_many_sounds.size()}, {"witnesses", std::move(one_grapheme)}}},
      {"one_sound_many_graphemes", {{"count", report.one_sound_many_graphemes.size()}, {"witnesses", std::move(one_sound)}}},
      {"multi_phoneme_units", {{"count", report.multi_phoneme_units.size()}, {"witnesses", witnesses_json(report.multi_phoneme_units)}}},
      {"multi_letter_units", {{"count", report.multi_letter_units.size()}, {"witnesses", witnesses_json(report.multi_letter_units)}}},
  };
}

std::string render_table(const ConsistencyReport& report) {
  std::ostringstream out;
  out << "one grapheme, many sounds (" << report.one_grapheme_many_sounds.size() << ")\n";
  for (const auto& g : report.one_grapheme_many_sounds) {
    out << "  " << g << "\t";
    bool first = true;
    for (const auto& seq : report.grapheme_to_phonemes.at(g)) {
      out << (first ? "" : " ") << bracketed(seq);
      first = false;
    }
    out << '\n';
  }
  out << "one sound, many graphemes (" << report.one_sound_many_graphemes.size() << ")\n";
  for (const auto& p : report.one_sound_many_graphemes) {
    out << "  " << p.code() << "\t";
    bool first = true;
    for (const auto& g : report.phoneme_to_graphemes.at(p)) {
      out << (first ? "" : " ") << g;
      first = false;
    }
    out << '\n';
  }
  auto units = [&](const char* title, const std::vector<UnitWitness>& ws) {
    out << title << " (" << ws.size() << ")\n";
    for (const auto& w : ws) {
      out << "  " << w.grapheme << "\t" << bracketed(w.phonemes) << "\t";
      for (std::size_t i = 0; i < w.word_ids.size(); ++i) out << (i ? "," : "") << w.word_ids[i];
      out << '\n';
    }
  };
  units("one grapheme, several phonemes", report.multi_phoneme_units);
  units("one sound, several letters", report.multi_letter_units);
  return out.str();
}

}  // namespace wordify
