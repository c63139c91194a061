#include "humor/annotate.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "humor/error.hpp"
#include "humor/utf8.hpp"

namespace humor {

namespace {

constexpr std::array<std::string_view, kUposCount> kUposNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

bool misc_has(const std::vector<std::string>& items, std::string_view key) {
  for (const auto& item : items) {
    if (item == key) return true;
  }
  return false;
}

void finish_sentence(std::vector<ConlluSentence>& out, ConlluSentence& current,
                     const std::vector<std::size_t>& token_lines) {
  if (current.tokens.empty()) {
    current = ConlluSentence{};
    return;
  }
  const int n = static_cast<int>(current.tokens.size());
  int roots = 0;
  for (std::size_t i = 0; i < current.tokens.size(); ++i) {
    const auto& tok = current.tokens[i];
    if (tok.head < 0 || tok.head > n) {
      throw DataError("head " + std::to_string(tok.head) + " points outside a sentence of " +
                          std::to_string(n) + " tokens",
                      token_lines[i]);
    }
    if (tok.head == 0) ++roots;
  }
  if (roots != 1) {
    throw DataError("sentence has " + std::to_string(roots) + " roots (expected exactly one)",
                    token_lines.front());
  }
  out.push_back(std::move(current));
  current = ConlluSentence{};
}

}  // namespace

std::string_view to_string(Upos tag) { return kUposNames[static_cast<std::size_t>(tag)]; }

Upos parse_upos(std::string_view name) {
  for (std::size_t i = 0; i < kUposNames.size(); ++i) {
    if (kUposNames[i] == name) return static_cast<Upos>(i);
  }
  throw UsageError("unknown UPOS tag '" + std::string(name) + "'");
}

std::vector<ConlluSentence> parse_conllu(std::istream& in) {
  std::vector<ConlluSentence> sentences;
  ConlluSentence current;
  std::vector<std::size_t> token_lines;
  std::string pending_doc;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      finish_sentence(sentences, current, token_lines);
      token_lines.clear();
      continue;
    }
    if (line[0] == '#') {
      std::string_view body = std::string_view(line).substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      constexpr std::string_view kNewdoc = "newdoc id =";
      constexpr std::string_view kText = "text =";
      if (body.substr(0, kNewdoc.size()) == kNewdoc) {
        auto id = body.substr(kNewdoc.size());
        while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
        pending_doc = std::string(id);
      } else if (body.substr(0, kText.size()) == kText) {
        auto text = body.substr(kText.size());
        while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
        current.text = std::string(text);
      }
      continue;
    }

    const auto fields = split(line, '\t');
    if (fields.size() != 10) {
      throw DataError("expected 10 tab-separated columns, found " + std::to_string(fields.size()),
                      line_no);
    }
    const auto& id = fields[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;
    const auto index = parse_int(id);
    if (!index) throw DataError("non-integer token ID '" + id + "'", line_no);
    if (*index != static_cast<int>(current.tokens.size()) + 1) {
      throw DataError("token ID " + id + " out of sequence", line_no);
    }
    const auto head = parse_int(fields[6]);
    if (!head) throw DataError("non-integer HEAD '" + fields[6] + "'", line_no);

    AnnotatedToken tok;
    tok.surface = fields[1];
    tok.lemma = fields[2] == "_" ? utf8::to_lower(fields[1]) : fields[2];
    try {
      tok.upos = fields[3] == "_" ? Upos::kX : parse_upos(fields[3]);
    } catch (const UsageError& e) {
      throw DataError(e.what(), line_no);
    }
    tok.head = *head;
    tok.deprel = fields[7];
    const auto misc = split(fields[9], '|');
    tok.is_entity = misc_has(misc, "NE=Yes");
    for (const auto& item : misc) {
      if (item.rfind("Entity=", 0) == 0) tok.is_entity = true;
    }
    tok.space_after = !misc_has(misc, "SpaceAfter=No");
    tok.position = static_cast<int>(current.tokens.size());
    if (current.tokens.empty() && !pending_doc.empty()) {
      current.doc_id = std::move(pending_doc);
      pending_doc.clear();
    }
    current.tokens.push_back(std::move(tok));
    token_lines.push_back(line_no);
  }
  finish_sentence(sentences, current, token_lines);
  return sentences;
}

std::vector<ConlluSentence> parse_conllu_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CoNLL-U file " + path.string());
  return parse_conllu(in);
}

void write_conllu(std::ostream& out, const std::vector<ConlluSentence>& sentences) {
  for (const auto& sentence : sentences) {
    if (!sentence.doc_id.empty()) out << "# newdoc id = " << sentence.doc_id << '\n';
    if (!sentence.text.empty()) out << "# text = " << sentence.text << '\n';
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      const auto& tok = sentence.tokens[i];
      std::string misc;
      if (tok.is_entity) misc = "NE=Yes";
      if (!tok.space_after) misc += misc.empty() ? "SpaceAfter=No" : "|SpaceAfter=No";
      if (misc.empty()) misc = "_";
      out << (i + 1) << '\t' << tok.surface << '\t' << (tok.lemma.empty() ? "_" : tok.lemma)
          << '\t' << to_string(tok.upos) << "\t_\t_\t" << tok.head << '\t'
          << (tok.deprel.empty() ? "_" : tok.deprel) << "\t_\t" << misc << '\n';
    }
    out << '\n';
  }
}

std::string serialize_conllu(const std::vector<ConlluSentence>& sentences) {
  std::ostringstream out;
  write_conllu(out, sentences);
  return out.str();
}

std::vector<ConlluDocument> group_documents(const std::vector<ConlluSentence>& sentences) {
  std::vector<ConlluDocument> docs;
  bool has_markers = false;
  for (const auto& s : sentences) has_markers = has_markers || !s.doc_id.empty();
  for (const auto& s : sentences) {
    if (!has_markers || !s.doc_id.empty() || docs.empty()) {
      docs.push_back(ConlluDocument{s.doc_id, {}});
    }
    docs.back().sentences.push_back(s.tokens);
  }
  return docs;
}

// --- heuristic annotator ---------------------------------------------------

namespace {

struct LexiconEntry {
  std::string_view word;
  Upos tag;
};

constexpr std::string_view kDeterminers[] = {
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its",
    "our", "their", "some", "any", "no", "every", "each", "all", "another", "which", "whose"};
constexpr std::string_view kPronouns[] = {
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them", "what", "who",
    "whom", "myself", "yourself", "himself", "herself", "itself", "ourselves", "themselves",
    "someone", "something", "anyone", "anything", "everyone", "everything", "nobody",
    "nothing", "one", "mine", "yours", "hers", "ours", "theirs", "i'm", "you're", "he's",
    "she's", "it's", "we're", "they're", "that's", "what's", "who's", "i'd", "i've", "i'll",
    "you'll", "you've", "he'll", "she'll", "we'll", "they'll", "there's", "here's"};
constexpr std::string_view kAdpositions[] = {
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "from", "up", "down", "out",
    "off", "over", "under", "to", "onto", "across", "behind", "like", "near", "without",
    "inside", "outside", "along", "around", "towards", "toward", "upon", "within"};
constexpr std::string_view kCoordinators[] = {"and", "or", "but", "nor", "yet", "so", "&"};
constexpr std::string_view kSubordinators[] = {
    "because", "if", "when", "while", "although", "though", "unless", "since", "whether",
    "than", "until", "whereas", "once"};
constexpr std::string_view kAuxiliaries[] = {
    "is", "am", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have",
    "has", "had", "will", "would", "can", "could", "should", "shall", "may", "might", "must",
    "'s", "'re", "'m", "'ve", "'ll", "'d", "don't", "doesn't", "didn't", "can't", "won't",
    "isn't", "aren't", "wasn't", "weren't", "couldn't", "wouldn't", "shouldn't", "haven't",
    "hasn't", "hadn't", "ain't"};
constexpr std::string_view kParticles[] = {"not", "n't", "'"};
constexpr std::string_view kInterjections[] = {
    "oh", "hey", "wow", "ok", "okay", "yes", "yeah", "lol", "haha", "hi", "hello", "please",
    "ah", "uh", "um", "well"};
constexpr std::string_view kAdverbs[] = {
    "very", "too", "also", "just", "already", "never", "always", "now", "then", "here",
    "there", "why", "how", "when", "where", "again", "still", "even", "only", "really",
    "not", "soon", "often", "ever", "almost", "quite", "rather", "away", "back", "today",
    "tomorrow", "tonight", "yesterday", "instead", "anyway", "maybe", "perhaps", "else",
    "together", "once", "twice", "later", "ago"};
constexpr std::string_view kNumerals[] = {
    "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "hundred",
    "thousand", "million", "billion", "twenty", "fifty", "ninety"};
constexpr std::string_view kVerbs[] = {
    "go", "goes", "went", "gone", "get", "gets", "got", "make", "makes", "made", "know",
    "knows", "knew", "think", "thinks", "thought", "take", "takes", "took", "see", "sees",
    "saw", "seen", "come", "comes", "came", "want", "wants", "look", "looks", "use", "uses",
    "find", "finds", "found", "give", "gives", "gave", "tell", "tells", "told", "work",
    "works", "call", "calls", "try", "tries", "ask", "asks", "need", "needs", "feel",
    "feels", "felt", "become", "leave", "left", "put", "puts", "mean", "means", "meant",
    "keep", "keeps", "kept", "let", "begin", "began", "seem", "seems", "help", "helps",
    "talk", "talks", "turn", "turns", "start", "starts", "show", "shows", "hear", "hears",
    "heard", "play", "plays", "run", "runs", "ran", "move", "live", "lives", "believe",
    "bring", "brought", "happen", "happens", "write", "wrote", "sit", "sat", "stand",
    "stood", "lose", "lost", "pay", "paid", "meet", "met", "include", "continue", "set",
    "learn", "change", "lead", "understand", "watch", "follow", "stop", "stops", "create",
    "speak", "spoke", "read", "spend", "spent", "grow", "grew", "open", "walk", "walks",
    "win", "won", "offer", "remember", "love", "loves", "consider", "appear", "buy",
    "bought", "wait", "serve", "die", "died", "send", "sent", "expect", "build", "built",
    "stay", "fall", "fell", "cut", "reach", "kill", "killed", "remain", "suggest", "raise",
    "pass", "sell", "sold", "require", "report", "decide", "pull", "cross", "crosses",
    "drive", "drove", "eat", "eats", "ate", "drink", "drank", "say", "says", "said", "like",
    "likes", "hate", "hates", "jump", "jumps", "cry", "laugh", "laughs", "fix", "install",
    "click", "clicked", "delete", "update", "load", "crash", "crashes", "restart", "close",
    "deliver", "delivered", "march", "marry", "married", "sleep", "slept", "kiss", "hit",
    "throw", "threw", "catch", "caught", "swim", "fly", "flies", "flew", "sing", "dance",
    "cook", "wear", "wore", "steal", "stole", "break", "broke", "explain", "answer",
    "reply", "ruin", "date", "occupy", "arrest", "arrested", "bear", "marry", "exploit",
    "forced", "force", "step", "explode", "explodes", "screw", "screws", "drop", "visit"};
constexpr std::string_view kAdjectives[] = {
    "good", "bad", "new", "old", "great", "big", "small", "little", "long", "short", "high",
    "low", "large", "young", "hard", "soft", "full", "empty", "right", "wrong", "different",
    "same", "important", "able", "late", "early", "easy", "difficult", "hot", "cold", "happy",
    "sad", "funny", "stupid", "smart", "dumb", "ugly", "pretty", "beautiful", "fat", "thin",
    "rich", "poor", "dead", "alive", "black", "white", "red", "blue", "green", "heavy",
    "light", "fast", "slow", "dark", "bright", "free", "sure", "real", "best", "worst",
    "better", "worse", "strong", "weak", "clean", "dirty", "quiet", "loud", "favorite",
    "favourite", "gay", "crazy", "weird", "simple", "enormous", "tiny", "huge", "broken",
    "wet", "dry", "open", "closed", "fake", "true", "false", "tall", "deep", "wide", "narrow",
    "smaller", "bigger", "heavier", "lighter", "older", "younger", "mexican", "equal"};

bool is_sentence_terminator(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c != '.' && c != '!' && c != '?') return false;
  }
  return true;
}

bool is_symbol(std::string_view token) {
  return token.size() == 1 && std::string_view("$%+=<>|~^#@").find(token[0]) != std::string_view::npos;
}

bool all_digits(std::string_view token) {
  if (token.empty()) return false;
  bool digit = false;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != ',' && c != '.') {
      return false;
    }
  }
  return digit;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

HeuristicAnnotator::HeuristicAnnotator() {
  auto add_all = [this](auto const& words, Upos tag) {
    for (auto w : words) lexicon_.emplace(std::string(w), tag);
  };
  // Earlier groups win on overlap ("that" stays DET, "one" stays PRON).
  add_all(kDeterminers, Upos::kDet);
  add_all(kPronouns, Upos::kPron);
  add_all(kAuxiliaries, Upos::kAux);
  add_all(kParticles, Upos::kPart);
  add_all(kCoordinators, Upos::kCconj);
  add_all(kSubordinators, Upos::kSconj);
  add_all(kAdpositions, Upos::kAdp);
  add_all(kAdverbs, Upos::kAdv);
  add_all(kInterjections, Upos::kIntj);
  add_all(kNumerals, Upos::kNum);
  add_all(kVerbs, Upos::kVerb);
  add_all(kAdjectives, Upos::kAdj);
}

void HeuristicAnnotator::load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotator lexicon " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw DataError("expected word<TAB>UPOS", line_no);
    }
    try {
      add_entry(fields[0], parse_upos(fields[1]));
    } catch (const UsageError& e) {
      throw DataError(e.what(), line_no);
    }
  }
}

void HeuristicAnnotator::add_entry(std::string word, Upos tag) {
  lexicon_[utf8::to_lower(word)] = tag;
}

bool HeuristicAnnotator::known_verb(std::string_view lowered) const {
  const auto it = lexicon_.find(std::string(lowered));
  return it != lexicon_.end() && it->second == Upos::kVerb;
}

std::string HeuristicAnnotator::verb_lemma(std::string_view lowered) const {
  for (std::string_view suffix : {"ing", "ed"}) {
    if (!ends_with(lowered, suffix) || lowered.size() <= suffix.size() + 1) continue;
    const std::string stem(lowered.substr(0, lowered.size() - suffix.size()));
    if (known_verb(stem)) return stem;
    if (known_verb(stem + "e")) return stem + "e";
    // Doubled final consonant: "stopped" -> "stop".
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        known_verb(stem.substr(0, stem.size() - 1))) {
      return stem.substr(0, stem.size() - 1);
    }
  }
  return {};
}

Upos HeuristicAnnotator::tag(std::string_view token, bool sentence_initial) const {
  if (utf8::is_all_punct(token)) return is_symbol(token) ? Upos::kSym : Upos::kPunct;
  if (all_digits(token)) return Upos::kNum;
  const std::string lowered = utf8::to_lower(token);
  if (const auto it = lexicon_.find(lowered); it != lexicon_.end()) return it->second;
  const auto cps = utf8::decode(token);
  if (!sentence_initial && !cps.empty() && utf8::is_uppercase(cps.front())) return Upos::kPropn;
  if (lowered.size() > 3 && ends_with(lowered, "ly")) return Upos::kAdv;
  if (!verb_lemma(lowered).empty()) return Upos::kVerb;
  return Upos::kNoun;
}

AnnotatedSentence HeuristicAnnotator::annotate(const std::vector<std::string>& tokens) const {
  std::vector<SpacedToken> spaced;
  spaced.reserve(tokens.size());
  for (const auto& t : tokens) spaced.push_back({t, true});
  if (!spaced.empty()) spaced.back().space_after = false;
  return annotate(spaced);
}

AnnotatedSentence HeuristicAnnotator::annotate(const std::vector<SpacedToken>& tokens) const {
  AnnotatedSentence out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    AnnotatedToken tok;
    tok.surface = tokens[i].surface;
    tok.space_after = tokens[i].space_after;
    tok.position = static_cast<int>(i);
    tok.upos = tag(tok.surface, i == 0);
    tok.is_entity = tok.upos == Upos::kPropn;
    const std::string lowered = utf8::to_lower(tok.surface);
    tok.lemma = lowered;
    if (tok.upos == Upos::kVerb) {
      if (auto stem = verb_lemma(lowered); !stem.empty()) tok.lemma = std::move(stem);
    }
    out.push_back(std::move(tok));
  }
  if (out.empty()) return out;

  std::optional<std::size_t> verb;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].upos == Upos::kVerb) {
      verb = i;
      break;
    }
  }
  const std::size_t root = verb.value_or(0);
  const int root_head = static_cast<int>(root) + 1;
  for (auto& tok : out) {
    tok.deprel = "dep";
    tok.head = root_head;
  }
  out[root].deprel = "root";
  out[root].head = 0;

  auto nominal = [&](std::size_t i, bool allow_pron) {
    const Upos t = out[i].upos;
    return t == Upos::kNoun || t == Upos::kPropn || (allow_pron && t == Upos::kPron);
  };
  if (verb) {
    for (std::size_t i = 0; i < *verb; ++i) {
      if (nominal(i, true)) {
        out[i].deprel = "nsubj";
        break;
      }
    }
    for (std::size_t i = *verb + 1; i < out.size(); ++i) {
      if (nominal(i, false)) {
        out[i].deprel = "dobj";
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (i != root && out[i].upos == Upos::kAdj && out[i + 1].upos == Upos::kNoun) {
      out[i].deprel = "amod";
      out[i].head = static_cast<int>(i) + 2;
    }
  }
  return out;
}

std::size_t AnnotatedJoke::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::string detokenize(const AnnotatedJoke& doc) {
  std::string out;
  for (const auto& sentence : doc.sentences) {
    for (const auto& tok : sentence) {
      out += tok.surface;
      if (tok.space_after) out.push_back(' ');
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

AnnotatedJoke annotate_heuristic(const Joke& joke, const HeuristicAnnotator& annotator) {
  AnnotatedJoke doc;
  doc.joke = joke;
  doc.joke.text = clean_text(joke.text);
  doc.boundary = split_setup_punchline(doc.joke.text);
  doc.approximate = true;

  const auto tokens = tokenize_spaced(doc.joke.text);
  std::vector<SpacedToken> sentence;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    sentence.push_back(tokens[i]);
    const bool terminator = is_sentence_terminator(tokens[i].surface);
    const bool next_continues = i + 1 < tokens.size() &&
                                (is_sentence_terminator(tokens[i + 1].surface) ||
                                 tokens[i + 1].surface == "\"" || tokens[i + 1].surface == ")");
    if (terminator && !next_continues && tokens[i].space_after) {
      doc.sentences.push_back(annotator.annotate(sentence));
      sentence.clear();
    }
  }
  if (!sentence.empty()) doc.sentences.push_back(annotator.annotate(sentence));
  return doc;
}

std::vector<AnnotatedJoke> attach_conllu(const std::vector<Joke>& jokes,
                                         const std::vector<ConlluDocument>& documents) {
  std::vector<AnnotatedJoke> out;
  out.reserve(jokes.size());
  const bool by_id = !documents.empty() && !documents.front().id.empty();
  std::unordered_map<std::string, const ConlluDocument*> index;
  if (by_id) {
    for (const auto& d : documents) {
      if (!index.emplace(d.id, &d).second) {
        throw DataError("CoNLL-U document id '" + d.id + "' appears twice");
      }
    }
  } else if (documents.size() != jokes.size()) {
    throw DataError("CoNLL-U file has " + std::to_string(documents.size()) +
                    " sentences but the corpus has " + std::to_string(jokes.size()) + " jokes");
  }
  for (std::size_t i = 0; i < jokes.size(); ++i) {
    const ConlluDocument* doc = nullptr;
    if (by_id) {
      const auto it = index.find(jokes[i].id);
      if (it == index.end()) {
        throw DataError("no CoNLL-U document for joke id '" + jokes[i].id + "'");
      }
      doc = it->second;
    } else {
      doc = &documents[i];
    }
    AnnotatedJoke annotated;
    annotated.joke = jokes[i];
    annotated.joke.text = clean_text(jokes[i].text);
    annotated.boundary = split_setup_punchline(annotated.joke.text);
    annotated.sentences = doc->sentences;
    if (annotated.sentences.empty()) {
      throw DataError("CoNLL-U document for joke '" + jokes[i].id + "' has no sentences");
    }
    out.push_back(std::move(annotated));
  }
  return out;
}

std::vector<ConlluSentence> to_conllu(const std::vector<AnnotatedJoke>& docs) {
  std::vector<ConlluSentence> out;
  for (const auto& doc : docs) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      ConlluSentence sentence;
      sentence.tokens = doc.sentences[s];
      if (s == 0) sentence.doc_id = doc.joke.id;
      for (const auto& tok : sentence.tokens) {
        sentence.text += tok.surface;
        if (tok.space_after) sentence.text.push_back(' ');
      }
      while (!sentence.text.empty() && sentence.text.back() == ' ') sentence.text.pop_back();
      out.push_back(std::move(sentence));
    }
  }
  return out;
}

}  // namespace humor
