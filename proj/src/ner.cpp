#include "meqa/ner.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>

namespace meqa::ner {

std::string_view entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::Disease: return "disease";
    case EntityKind::Medicine: return "medicine";
    case EntityKind::Dose: return "dose";
    case EntityKind::PharmForm: return "form";
  }
  return "";
}

std::vector<EntityAnnotation> max_match(const std::vector<std::string>& tokens, const NgramIndex& index,
                                        std::size_t max_n, EntityKind kind) {
  std::vector<EntityAnnotation> out;
  if (index.empty() || max_n == 0) return out;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const std::size_t longest = std::min(max_n, tokens.size() - pos);
    bool matched = false;
    for (std::size_t n = longest; n >= 1; --n) {
      std::string key = tokens[pos];
      for (std::size_t k = 1; k < n; ++k) key += ' ' + tokens[pos + k];
      auto it = index.find(key);
      if (it != index.end()) {
        out.push_back({pos, pos + n, kind, std::move(key), it->second});
        pos += n;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }
  return out;
}

namespace {

const std::regex& number_re() {
  static const std::regex re(R"(^\d+([.,]\d+)?$)");
  return re;
}

const std::regex& glued_dose_re() {
  static const std::regex re(R"(^\d+([.,]\d+)?(mg|g|ml|mcg|ug|%)$)");
  return re;
}

const std::regex& ratio_unit_re() {
  static const std::regex re(R"(^(mg|g|mcg|ug)/\d+([.,]\d+)?$)");
  return re;
}

bool is_unit(const std::string& t) {
  static const std::set<std::string> units = {"mg", "g", "ml", "mcg", "ug", "%", "mg/ml", "mg/g"};
  return units.count(t) != 0;
}

}  // namespace

std::vector<EntityAnnotation> parse_doses(const std::vector<std::string>& tokens) {
  std::vector<EntityAnnotation> out;
  auto emit = [&](std::size_t start, std::size_t end) {
    std::vector<std::string> span(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(end));
    auto surface = text::join(span);
    out.push_back({start, end, EntityKind::Dose, surface, dose_key(surface)});
  };
  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto& t = tokens[i];
    if (std::regex_match(t, glued_dose_re())) {
      emit(i, i + 1);
      i += 1;
      continue;
    }
    if (std::regex_match(t, number_re()) && i + 1 < tokens.size()) {
      const auto& u = tokens[i + 1];
      if (i + 2 < tokens.size() && std::regex_match(u, ratio_unit_re()) &&
          (tokens[i + 2] == "ml" || tokens[i + 2] == "g")) {
        emit(i, i + 3);
        i += 3;
        continue;
      }
      if (is_unit(u)) {
        emit(i, i + 2);
        i += 2;
        continue;
      }
    }
    ++i;
  }
  return out;
}

std::optional<std::string> administration_verb_lemma(std::string_view token) {
  static const auto table = [] {
    std::unordered_map<std::string, std::string> m;
    static constexpr std::array<std::string_view, 19> ar_endings = {
        "ar", "o", "as", "a", "amos", "an", "e", "es", "en", "ando", "ado",
        "arlo", "arla", "arlos", "arlas", "arme", "arse", "armelo", "ara"};
    static constexpr std::array<std::string_view, 16> er_endings = {
        "er", "o", "es", "e", "emos", "en", "a", "as", "an", "iendo", "ido", "erlo", "erla", "erme", "erse", "iera"};
    for (std::string_view lemma : {"tomar", "aplicar", "inyectar", "inhalar", "usar"}) {
      const std::string stem(lemma.substr(0, lemma.size() - 2));
      for (auto e : ar_endings) m.emplace(stem + std::string(e), std::string(lemma));
    }
    // aplicar: aplique/apliquen
    m.emplace("aplique", "aplicar");
    m.emplace("apliquen", "aplicar");
    for (auto e : er_endings) m.emplace("beb" + std::string(e), "beber");
    return m;
  }();
  auto it = table.find(std::string(token));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::size_t RuleBasedDependencies::head_of(const std::vector<std::string>& tokens, std::size_t index) const {
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (administration_verb_lemma(tokens[i])) {
      root = i;
      break;
    }
  }
  const std::size_t root_index = root.value_or(0);
  if (index == root_index) return index;
  if (administration_verb_lemma(tokens[index])) return root_index;
  for (std::size_t j = index; j-- > 0;) {
    if (administration_verb_lemma(tokens[j])) return j;
  }
  return root_index;
}

std::vector<std::string> expand_concepts(const std::vector<EntityAnnotation>& diseases,
                                         const ConceptLexicon& lexicon) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& s) {
    auto norm = text::normalize_text(s);
    if (!norm.empty() && seen.insert(norm).second) out.push_back(std::move(norm));
  };
  for (const auto& d : diseases) {
    add(d.surface);
    if (const auto* entry = lexicon.find(d.resolved_id)) {
      add(entry->preferred_name);
      for (const auto& syn : entry->synonyms) add(syn);
    }
  }
  return out;
}

namespace {

std::string pluralize_word(const std::string& w) {
  if (w.empty()) return w;
  const char last = w.back();
  if (last == 'a' || last == 'e' || last == 'i' || last == 'o' || last == 'u') return w + "s";
  if (last == 's') return w;
  // solucion -> soluciones; accents are already folded.
  return w + "es";
}

std::string pluralize(const std::string& phrase) {
  auto words = text::tokens_of(phrase);
  for (auto& w : words) w = pluralize_word(w);
  return text::join(words);
}

}  // namespace

EntityRecognizer::EntityRecognizer(const CorpusStore& store) : store_(&store) {
  for (const auto& e : store.lexicon().entries()) {
    auto add = [&](const std::string& s) {
      auto key = text::normalize_text(s);
      if (!key.empty()) diseases_.emplace(key, e.concept_id);  // first concept wins
    };
    add(e.preferred_name);
    for (const auto& syn : e.synonyms) add(syn);
  }
  for (const auto& name : store.medicine_names()) medicines_.emplace(name, name);

  std::set<std::string> forms;
  for (const auto& l : store.leaflets()) {
    for (const auto& f : l.pharmaceutical_forms) forms.insert(normalize_name(f));
  }
  for (const auto& e : store.registry().entries()) {
    for (const auto& f : e.pharmaceutical_forms) forms.insert(normalize_name(f));
  }
  for (const auto& [verb, fs] : store.registry().verb_form_compatibility()) forms.insert(fs.begin(), fs.end());
  for (const auto& f : forms) {
    forms_.emplace(f, f);
    forms_.emplace(pluralize(f), f);
  }
}

std::vector<std::string> EntityRecognizer::infer_pharm_forms(const text::NormalizedQuestion& nq,
                                                             const EntityAnnotation& medicine,
                                                             const DependencyProvider& dep) const {
  const auto registered = store_->registry().registered_forms(medicine.resolved_id);
  std::set<std::string> known(registered.begin(), registered.end());
  if (known.empty()) {
    // Medicine only present in the leaflet corpus.
    for (const auto* l : store_->candidate_leaflets(medicine.resolved_id)) {
      for (const auto& f : l->pharmaceutical_forms) known.insert(normalize_name(f));
    }
  }

  std::set<std::string> explicit_forms;
  for (const auto& f : max_match(nq.tokens, forms_, kFormMaxN, EntityKind::PharmForm)) {
    if (known.count(f.resolved_id)) explicit_forms.insert(f.resolved_id);
  }
  if (!explicit_forms.empty()) return {explicit_forms.begin(), explicit_forms.end()};

  if (medicine.start < nq.tokens.size()) {
    const auto head = dep.head_of(nq.tokens, medicine.start);
    if (head != medicine.start) {
      if (auto lemma = administration_verb_lemma(nq.tokens[head])) {
        const auto& compat = store_->registry().verb_form_compatibility();
        auto it = compat.find(*lemma);
        if (it != compat.end()) {
          std::vector<std::string> out;
          for (const auto& f : known) {
            if (it->second.count(f)) out.push_back(f);
          }
          return out;
        }
      }
    }
  }
  return {known.begin(), known.end()};
}

EntitySet EntityRecognizer::extract_entities(const text::NormalizedQuestion& nq,
                                             const DependencyProvider& dep) const {
  EntitySet set;
  if (nq.tokens.empty()) return set;
  set.diseases = max_match(nq.tokens, diseases_, kDiseaseMaxN, EntityKind::Disease);
  set.medicines = max_match(nq.tokens, medicines_, kMedicineMaxN, EntityKind::Medicine);
  set.doses = parse_doses(nq.tokens);
  set.forms = max_match(nq.tokens, forms_, kFormMaxN, EntityKind::PharmForm);
  for (const auto& m : set.medicines) set.medicine_forms.push_back(infer_pharm_forms(nq, m, dep));
  set.expanded_concepts = expand_concepts(set.diseases, store_->lexicon());
  return set;
}

}  // namespace meqa::ner
