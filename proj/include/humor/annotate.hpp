#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "humor/corpus.hpp"

namespace humor {

// The 17 universal part-of-speech tags.
enum class Upos {
  kAdj, kAdp, kAdv, kAux, kCconj, kDet, kIntj, kNoun, kNum,
  kPart, kPron, kPropn, kPunct, kSconj, kSym, kVerb, kX
};

inline constexpr std::size_t kUposCount = 17;

std::string_view to_string(Upos tag);
// Throws UsageError for names outside the universal tag set.
Upos parse_upos(std::string_view name);

struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  Upos upos = Upos::kX;
  std::string deprel;
  // 1-based head index, 0 for the root.
  int head = 0;
  bool is_entity = false;
  // 0-based index within the sentence.
  int position = 0;
  bool space_after = true;
};

using AnnotatedSentence = std::vector<AnnotatedToken>;

struct ConlluSentence {
  AnnotatedSentence tokens;
  std::string doc_id;  // from "# newdoc id = ..." when the sentence opens a document
  std::string text;    // from "# text = ..."
};

// Reads 10-column CoNLL-U. Multiword ranges and empty nodes are skipped.
std::vector<ConlluSentence> parse_conllu(std::istream& in);
std::vector<ConlluSentence> parse_conllu_file(const std::filesystem::path& path);

void write_conllu(std::ostream& out, const std::vector<ConlluSentence>& sentences);
std::string serialize_conllu(const std::vector<ConlluSentence>& sentences);

struct ConlluDocument {
  std::string id;  // empty when the file carries no newdoc markers
  std::vector<AnnotatedSentence> sentences;
};

// Groups sentences under their "# newdoc id" markers. Without any markers each
// sentence becomes its own anonymous document.
std::vector<ConlluDocument> group_documents(const std::vector<ConlluSentence>& sentences);

// Rule-based tagger/parser used when no external parse is available. The
// closed-class lexicon can be extended from a `word<TAB>UPOS` file.
class HeuristicAnnotator {
 public:
  HeuristicAnnotator();

  void load_lexicon(const std::filesystem::path& path);
  void add_entry(std::string word, Upos tag);

  // One sentence of word-level, punctuation-kept tokens. Always yields exactly
  // one root; labels come from {root, nsubj, dobj, amod, dep}.
  AnnotatedSentence annotate(const std::vector<std::string>& tokens) const;
  AnnotatedSentence annotate(const std::vector<SpacedToken>& tokens) const;

  Upos tag(std::string_view token, bool sentence_initial) const;

 private:
  bool known_verb(std::string_view lowered) const;
  std::string verb_lemma(std::string_view lowered) const;

  std::unordered_map<std::string, Upos> lexicon_;
};

struct AnnotatedJoke {
  Joke joke;
  std::vector<AnnotatedSentence> sentences;
  SetupPunchline boundary;
  // Set when annotations come from the heuristic annotator.
  bool approximate = false;

  std::size_t token_count() const;
};

// Reconstructs the text from token surfaces using the recorded spacing.
std::string detokenize(const AnnotatedJoke& doc);

// Cleans the joke text, splits it into sentences and annotates heuristically.
AnnotatedJoke annotate_heuristic(const Joke& joke, const HeuristicAnnotator& annotator);

// Pairs jokes with CoNLL-U documents: by document id when the file names
// documents, otherwise positionally.
std::vector<AnnotatedJoke> attach_conllu(const std::vector<Joke>& jokes,
                                         const std::vector<ConlluDocument>& documents);

// Converts annotated jokes to CoNLL-U sentences with newdoc/text comments.
std::vector<ConlluSentence> to_conllu(const std::vector<AnnotatedJoke>& docs);

}  // namespace humor
