#include "meqa/answer.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "meqa/error.hpp"
#include "meqa/log.hpp"

namespace meqa::answer {

std::string_view refusal_reason_name(RefusalReason reason) {
  switch (reason) {
    case RefusalReason::NoMedicine: return "NoMedicine";
    case RefusalReason::NonMarketedMedicine: return "NonMarketedMedicine";
    case RefusalReason::NoAnswerFound: return "NoAnswerFound";
  }
  return "NoAnswerFound";
}

std::string_view passage_source_name(PassageSource source) {
  switch (source) {
    case PassageSource::Classifier: return "classifier";
    case PassageSource::Vsm: return "VSM";
    case PassageSource::Lsi: return "LSI";
  }
  return "classifier";
}

std::string Passage::text() const {
  std::string out;
  if (context && (sentences.empty() || sentences.front().rfind(*context, 0) != 0)) out = *context;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::string AnswerBundle::main_text() const {
  std::string out;
  for (const auto& p : main) {
    if (!out.empty()) out += ' ';
    out += p.text();
  }
  return out;
}

std::optional<Refusal> check_answerable(const ner::EntitySet& entities, const MedicineRegistry& registry) {
  if (entities.medicines.empty()) {
    return Refusal{RefusalReason::NoMedicine, "La pregunta no menciona ningún medicamento."};
  }
  for (const auto& m : entities.medicines) {
    if (registry.lookup(m.resolved_id).empty() || registry.is_marketed(m.resolved_id)) return std::nullopt;
  }
  return Refusal{RefusalReason::NonMarketedMedicine, "El medicamento no está comercializado."};
}

bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) != tokens.end();
}

namespace {

std::vector<std::vector<std::string>> phrase_tokens(const std::vector<std::string>& query_terms) {
  std::vector<std::vector<std::string>> out;
  std::set<std::vector<std::string>> seen;
  for (const auto& term : query_terms) {
    auto t = text::tokens_of(term);
    if (!t.empty() && seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

void add_highlight(std::vector<Highlight>& hs, Highlight h) {
  if (std::find(hs.begin(), hs.end(), h) == hs.end()) hs.push_back(std::move(h));
}

// Original spelling of every occurrence of each phrase in `sentence`.
bool highlight_matches(const std::string& sentence, const std::vector<std::vector<std::string>>& phrases,
                       std::vector<Highlight>& out) {
  const auto toks = text::tokenize(sentence);
  bool matched = false;
  for (const auto& phrase : phrases) {
    if (phrase.size() > toks.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < phrase.size() && ok; ++j) ok = toks[i + j].text == phrase[j];
      if (!ok) continue;
      matched = true;
      const auto begin = toks[i].begin;
      const auto end = toks[i + phrase.size() - 1].end;
      add_highlight(out, {sentence.substr(begin, end - begin), HighlightKind::Concept});
    }
  }
  return matched;
}

const std::string* context_of(const Block& b) {
  if (b.heading) return &*b.heading;
  if (b.list_stem) return &*b.list_stem;
  return nullptr;
}

}  // namespace

std::vector<Passage> extract_passages(const Leaflet& leaflet, const std::vector<Section>& sections,
                                      const std::vector<std::string>& query_terms, PassageSource source) {
  const auto phrases = phrase_tokens(query_terms);
  std::vector<Passage> out;
  if (phrases.empty()) return out;
  for (auto s : sections) {
    std::optional<Passage> current;
    const std::string* current_context = nullptr;
    bool open_group = false;
    auto flush = [&] {
      if (current && !current->sentences.empty()) out.push_back(std::move(*current));
      current.reset();
    };
    for (const auto& block : leaflet.section(s)) {
      const std::string* ctx = context_of(block);
      const bool same_group = open_group && ctx && current_context && *ctx == *current_context;
      if (!same_group) {
        flush();
        current_context = ctx;
        open_group = true;
      }
      // A matching list stem or heading carries every sentence under it.
      std::vector<Highlight> ctx_hs;
      const bool ctx_match = ctx && highlight_matches(*ctx, phrases, ctx_hs);
      for (const auto& sentence : block.sentences) {
        std::vector<Highlight> hs;
        if (!highlight_matches(sentence, phrases, hs) && !ctx_match) continue;
        if (ctx_match) hs.insert(hs.end(), ctx_hs.begin(), ctx_hs.end());
        if (!current) {
          current.emplace();
          current->section = s;
          current->section_heading = std::string(section_title(s));
          current->source = source;
          if (ctx) current->context = *ctx;
        }
        current->sentences.push_back(sentence);
        for (auto& h : hs) add_highlight(current->highlights, std::move(h));
      }
    }
    flush();
  }
  for (auto& p : out) {
    if (p.context) add_highlight(p.highlights, {*p.context, HighlightKind::Context});
  }
  return out;
}

std::vector<Passage> dedupe(std::vector<Passage> passages) {
  std::unordered_set<std::string> seen;
  std::vector<Passage> out;
  for (auto& p : passages) {
    std::vector<std::string> kept;
    for (auto& s : p.sentences) {
      if (seen.insert(text::normalize_text(s)).second) kept.push_back(std::move(s));
    }
    if (kept.empty()) continue;
    p.sentences = std::move(kept);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Passage> rank_relevance(std::vector<Passage> passages, const std::vector<std::string>& query_terms,
                                    const retrieval::TfidfIndex& index) {
  const auto q = index.vectorize(retrieval::query_tokens(query_terms));
  for (auto& p : passages) p.relevance = retrieval::cosine(q, index.vectorize(text::tokens_of(p.text())));

  // Section groups in first-appearance order.
  std::vector<Section> order;
  std::map<Section, double> best;
  for (const auto& p : passages) {
    if (!best.count(p.section)) {
      order.push_back(p.section);
      best[p.section] = p.relevance;
    } else {
      best[p.section] = std::max(best[p.section], p.relevance);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](Section a, Section b) { return best[a] > best[b]; });
  std::vector<Passage> out;
  out.reserve(passages.size());
  for (auto s : order) {
    const auto first = out.size();
    for (auto& p : passages) {
      if (p.section == s) out.push_back(std::move(p));
    }
    std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                     [](const Passage& a, const Passage& b) { return a.relevance > b.relevance; });
  }
  return out;
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",       "al",      "algo",    "algun",    "alguna",  "algunas", "alguno",  "algunos", "ante",
      "antes",   "aun",     "bien",    "cada",     "como",    "con",     "cual",    "cuales",  "cuando",
      "cuanto",  "cuanta",  "cuantas", "cuantos",  "de",      "debo",    "debe",    "del",     "desde",
      "donde",   "durante", "e",       "el",       "ella",    "ellas",   "ellos",   "en",      "entre",
      "era",     "es",      "esa",     "esas",     "ese",     "eso",     "esos",    "esta",    "estas",
      "este",    "esto",    "estos",   "estoy",    "esta",    "estan",   "favor",   "fue",     "gracias",
      "ha",      "han",     "has",     "hay",      "he",      "hola",    "hasta",   "la",      "las",
      "le",      "les",     "lo",      "los",      "mas",     "me",      "mi",      "mis",     "mucho",
      "muy",     "nada",    "ni",      "no",       "nos",     "o",       "os",      "otra",    "otro",
      "para",    "pero",    "poco",    "por",      "porque",  "puede",   "pueden",  "puedo",   "que",
      "quien",   "se",      "sea",     "ser",      "si",      "sin",     "sobre",   "son",     "su",
      "sus",     "tambien", "te",      "tener",    "tengo",   "tiene",   "todo",    "todos",   "tu",
      "tus",     "u",       "un",      "una",      "unas",    "uno",     "unos",    "usted",   "y",
      "ya",      "yo",      "hacer",   "hago",     "pasa",    "saber",   "quiero",  "necesito", "sirve",
      "medicamento", "medicamentos"};
  return words;
}

}  // namespace

bool is_stopword(std::string_view token) { return stopwords().count(std::string(token)) != 0; }

QaSystem::QaSystem(std::shared_ptr<const CorpusStore> store, text::Vocabulary vocabulary,
                   clf::ClassifierParams params, AnswerConfig config,
                   std::shared_ptr<const ner::DependencyProvider> dependencies)
    : QaSystem(std::move(store), std::move(vocabulary), SectionPredictor{}, config, std::move(dependencies)) {
  params_ = std::move(params);
  params_->validate();
  const auto* p = &*params_;
  const auto threshold = config_.threshold;
  const auto max_length = config_.max_length;
  predictor_ = [p, threshold, max_length](const text::NormalizedQuestion& nq) {
    return clf::predict_sections(*p, nq.tokens, threshold, max_length);
  };
}

QaSystem::QaSystem(std::shared_ptr<const CorpusStore> store, text::Vocabulary vocabulary, SectionPredictor predictor,
                   AnswerConfig config, std::shared_ptr<const ner::DependencyProvider> dependencies)
    : store_(std::move(store)),
      vocabulary_(std::move(vocabulary)),
      predictor_(std::move(predictor)),
      config_(config),
      dependencies_(dependencies ? std::move(dependencies) : std::make_shared<ner::RuleBasedDependencies>()),
      recognizer_(*store_),
      leaflet_index_(*store_) {
  for (const auto& l : store_->leaflets()) {
    try {
      section_models_.emplace(l.reference_number, retrieval::build_section_model(l));
    } catch (const EmptyCollection&) {
      log::warn("leaflet " + l.reference_number + " has no section text");
    }
  }
}

const retrieval::SectionModel* QaSystem::section_model(const std::string& reference_number) const {
  auto it = section_models_.find(reference_number);
  return it == section_models_.end() ? nullptr : &it->second;
}

std::pair<std::vector<std::string>, bool> QaSystem::query_terms(const text::NormalizedQuestion& nq,
                                                                const ner::EntitySet& entities) const {
  if (!entities.expanded_concepts.empty()) return {entities.expanded_concepts, false};
  std::vector<bool> covered(nq.tokens.size(), false);
  auto cover = [&](const std::vector<ner::EntityAnnotation>& anns) {
    for (const auto& a : anns) {
      for (auto i = a.start; i < a.end && i < covered.size(); ++i) covered[i] = true;
    }
  };
  cover(entities.medicines);
  cover(entities.doses);
  cover(entities.forms);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < nq.tokens.size(); ++i) {
    const auto& t = nq.tokens[i];
    if (covered[i] || is_stopword(t) || !text::is_alphabetic(t) || ner::administration_verb_lemma(t)) continue;
    if (seen.insert(t).second) out.push_back(t);
  }
  return {out, true};
}

std::vector<const Leaflet*> QaSystem::candidates(const ner::EntitySet& entities) const {
  std::optional<std::string> dose;
  if (!entities.doses.empty()) dose = entities.doses.front().resolved_id;
  std::vector<const Leaflet*> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entities.medicines.size(); ++i) {
    const auto& name = entities.medicines[i].resolved_id;
    std::optional<std::vector<std::string>> forms;
    if (i < entities.medicine_forms.size() && !entities.medicine_forms[i].empty()) forms = entities.medicine_forms[i];
    auto found = store_->candidate_leaflets(name, dose, forms);
    if (found.empty() && forms) found = store_->candidate_leaflets(name, dose);
    if (found.empty() && dose) found = store_->candidate_leaflets(name);
    for (const auto* l : found) {
      if (l->marketed && seen.insert(l->reference_number).second) out.push_back(l);
    }
  }
  return out;
}

AnswerResult QaSystem::ask(std::string_view question, const std::optional<std::vector<Section>>& forced) const {
  AnswerResult result{Refusal{}, {}};
  auto& tr = result.trace;
  tr.question = text::normalize(question, &vocabulary_);
  tr.entities = recognizer_.extract_entities(tr.question, *dependencies_);

  if (auto refusal = check_answerable(tr.entities, store_->registry())) {
    result.outcome = *refusal;
    return result;
  }
  std::tie(tr.query_terms, tr.fallback_query) = query_terms(tr.question, tr.entities);

  const auto cands = candidates(tr.entities);
  for (const auto* l : cands) tr.candidates.push_back(l->reference_number);
  if (cands.empty()) {
    bool any_leaflet = false;
    for (const auto& m : tr.entities.medicines) any_leaflet = any_leaflet || !store_->candidate_leaflets(m.resolved_id).empty();
    result.outcome = any_leaflet
                         ? Refusal{RefusalReason::NonMarketedMedicine, "El medicamento no está comercializado."}
                         : Refusal{RefusalReason::NoAnswerFound, "No se ha encontrado el prospecto del medicamento."};
    return result;
  }
  const auto selected = leaflet_index_.select_leaflet(cands, tr.query_terms);
  const Leaflet& leaflet = *selected.leaflet;
  tr.selected_reference = leaflet.reference_number;
  tr.leaflet_score = selected.score;

  AnswerBundle bundle;
  bundle.reference_number = leaflet.reference_number;
  bundle.display_name = leaflet.display_name();
  if (predictor_) {
    tr.prediction = predictor_(tr.question);
    bundle.section_probabilities = tr.prediction->probabilities;
  }
  if (forced) {
    tr.main_sections = *forced;
  } else if (tr.prediction) {
    tr.main_sections = tr.prediction->predicted;
  }

  const auto* model = section_model(leaflet.reference_number);
  if (model) tr.extra = retrieval::extra_sections(*model, tr.query_terms, tr.main_sections, config_.k_extra, config_.extra_floor);

  auto main = extract_passages(leaflet, tr.main_sections, tr.query_terms, PassageSource::Classifier);
  std::vector<Passage> additional;
  for (const auto& e : tr.extra) {
    auto ps = extract_passages(leaflet, {e.section}, tr.query_terms,
                               e.source == retrieval::ScoreSource::Lsi ? PassageSource::Lsi : PassageSource::Vsm);
    additional.insert(additional.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
  }
  std::vector<Passage> all = std::move(main);
  all.insert(all.end(), std::make_move_iterator(additional.begin()), std::make_move_iterator(additional.end()));
  // Main passages come first, so a sentence shared with an extra section stays in the answer.
  for (auto& p : dedupe(std::move(all))) {
    (p.source == PassageSource::Classifier ? bundle.main : bundle.additional).push_back(std::move(p));
  }
  if (model) {
    bundle.main = rank_relevance(std::move(bundle.main), tr.query_terms, model->index);
    bundle.additional = rank_relevance(std::move(bundle.additional), tr.query_terms, model->index);
  }
  if (bundle.main.empty() && bundle.additional.empty()) {
    result.outcome = Refusal{RefusalReason::NoAnswerFound, "No se ha encontrado la respuesta en el prospecto."};
    return result;
  }
  result.outcome = std::move(bundle);
  return result;
}

}  // namespace meqa::answer
