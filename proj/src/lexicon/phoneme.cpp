#include "wordify/phoneme.hpp"

namespace wordify {

std::string join_phonemes(const PhonemeSequence& seq, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out += sep;
    out += seq[i].code();
  }
  return out;
}

const PhonemeInventory& PhonemeInventory::arpabet() {
  static const PhonemeInventory inventory({
      "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
      "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
      "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
      "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH",
  });
  return inventory;
}

}  // namespace wordify
