#include <array>

#include "cxg/annotate.hpp"

namespace cxg {

namespace {

constexpr std::array<std::string_view, kPosCount> kPosNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ",
    "NOUN", "NUM", "PART", "PRON", "PROPN", "PUNCT", "VERB",
};

void add_all(std::vector<std::pair<std::string_view, Pos>>& out, Pos tag,
             std::initializer_list<std::string_view> words) {
  for (std::string_view w : words) out.emplace_back(w, tag);
}

std::vector<std::pair<std::string_view, Pos>> make_table() {
  std::vector<std::pair<std::string_view, Pos>> t;
  add_all(t, Pos::DET, {"the", "a", "an", "this", "that", "these", "those", "every", "each",
                        "some", "any", "no", "another", "all", "both", "either", "neither",
                        "such", "much", "many", "few", "several", "most", "more"});
  add_all(t, Pos::PRON, {"i", "you", "he", "she", "it", "we", "they", "me", "him", "us",
                         "them", "my", "your", "his", "her", "its", "our", "their", "ur", "u",
                         "myself", "yourself", "himself", "herself", "itself", "ourselves",
                         "themselves", "mine", "yours", "ours", "theirs", "who", "whom",
                         "whose", "what", "which", "someone", "something", "anyone",
                         "anything", "everyone", "everything", "nobody", "nothing", "ya"});
  add_all(t, Pos::AUX, {"is", "are", "was", "were", "be", "been", "being", "am", "have", "has",
                        "had", "do", "does", "did", "can", "could", "will", "would", "shall",
                        "should", "may", "might", "must", "gonna", "wanna", "gotta"});
  add_all(t, Pos::ADP, {"of", "in", "on", "at", "by", "for", "with", "from", "into", "onto",
                        "about", "over", "under", "after", "before", "between", "through",
                        "during", "without", "within", "along", "across", "behind", "near",
                        "around", "against", "among", "toward", "towards", "upon", "off",
                        "since", "until", "as", "like", "per", "via"});
  add_all(t, Pos::CCONJ, {"and", "but", "or", "nor", "yet", "because", "if", "while",
                          "although", "though", "whether", "unless", "whereas", "than", "so"});
  add_all(t, Pos::PART, {"to", "not", "n't", "'s"});
  add_all(t, Pos::ADV, {"very", "really", "too", "also", "just", "now", "then", "here",
                        "there", "never", "always", "often", "still", "already", "again",
                        "soon", "only", "even", "quite", "almost", "maybe", "perhaps", "well",
                        "back", "away", "up", "down", "out", "today", "tonight", "tomorrow",
                        "yesterday", "ever", "how", "why", "where", "when", "rather",
                        "pretty", "totally", "literally", "actually", "definitely",
                        "probably", "finally", "seriously", "honestly", "heaps",
                        "super", "bloody"});
  add_all(t, Pos::INTJ, {"lol", "omg", "oh", "yes", "yeah", "hey", "wow", "ok", "okay",
                         "please", "haha", "thanks", "hi", "hello", "yay", "ugh", "cheers",
                         "nah", "eh"});
  add_all(t, Pos::NUM, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
                        "ten", "hundred", "thousand", "million"});
  add_all(t, Pos::VERB,
          {"go", "come", "get", "make", "take", "see", "know", "think", "say", "tell", "give",
           "find", "want", "need", "feel", "look", "try", "leave", "call", "keep", "let",
           "begin", "seem", "help", "show", "hear", "play", "run", "move", "live", "believe",
           "bring", "happen", "write", "sit", "stand", "lose", "pay", "meet", "learn",
           "change", "understand", "watch", "follow", "stop", "create", "speak", "read",
           "spend", "grow", "open", "walk", "win", "teach", "remember", "buy", "wait", "send",
           "build", "stay", "fall", "reach", "pass", "sell", "decide", "return", "explain",
           "hope", "carry", "break", "agree", "eat", "catch", "choose", "focus", "sleep",
           "compare", "allow", "force", "set", "shut", "love", "hate", "enjoy", "drive",
           "went", "got", "made", "said", "saw", "knew", "thought", "told", "gave", "found",
           "wanted", "felt", "looked", "tried", "left", "called", "kept", "seemed", "heard",
           "played", "moved", "lived", "brought", "happened", "wrote", "came", "took",
           "allowing", "forcing", "going", "getting", "making", "loved", "liked", "watching",
           "playing", "waiting", "trying", "thinking", "looking", "feeling", "eating",
           "drinking", "drink", "reckon", "cook", "dance", "sing", "laugh", "cry", "smile", "travel"});
  add_all(t, Pos::ADJ,
          {"new", "own", "mad", "good", "great", "awesome", "better", "best", "bad", "big",
           "small", "little", "old", "young", "long", "short", "high", "low", "happy", "sad",
           "nice", "beautiful", "amazing", "cool", "hot", "cold", "late", "early", "hard",
           "easy", "free", "full", "real", "true", "sure", "right", "wrong", "last", "next",
           "first", "different", "same", "important", "strong", "whole", "clear", "local",
           "social", "public", "lovely", "funny", "crazy", "busy", "tired", "ready", "fine",
           "huge", "tiny", "red", "blue", "green", "black", "white", "cheap", "expensive",
           "quiet", "loud", "bright", "dark", "fresh", "sweet", "weird", "perfect",
           "favourite", "favorite", "gorgeous", "brilliant", "massive", "grand", "wicked",
           "sick", "epic"});
  return t;
}

}  // namespace

std::string_view pos_name(Pos tag) noexcept { return kPosNames[static_cast<std::size_t>(tag)]; }

std::optional<Pos> parse_pos(std::string_view label) noexcept {
  for (std::size_t i = 0; i < kPosNames.size(); ++i) {
    if (kPosNames[i] == label) return static_cast<Pos>(i);
  }
  return std::nullopt;
}

const std::vector<std::pair<std::string_view, Pos>>& builtin_tag_table() {
  static const auto table = make_table();
  return table;
}

}  // namespace cxg
