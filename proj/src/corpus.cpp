#include "meqa/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "meqa/error.hpp"

namespace meqa {

using nlohmann::json;

Section section_from_code(int code) {
  if (code < 1 || code > static_cast<int>(kSectionCount)) {
    throw ValidationError("section code out of range: " + std::to_string(code));
  }
  return static_cast<Section>(code);
}

std::string section_key(Section s) { return "s" + std::to_string(section_code(s)); }

std::string_view section_title(Section s) {
  switch (s) {
    case Section::WhatItIsAndUse: return "Qué es y para qué se utiliza";
    case Section::BeforeYouTake: return "Qué necesita saber antes de empezar a tomar";
    case Section::HowToTake: return "Cómo tomar";
    case Section::SideEffects: return "Posibles efectos adversos";
    case Section::Storage: return "Conservación";
    case Section::ContentsAndInfo: return "Contenido del envase e información adicional";
  }
  return "";
}

std::string Leaflet::display_name() const {
  std::string out = active_substances.empty() ? medicine_name : text::join(active_substances, ", ");
  if (!dose.empty()) out += " " + dose;
  if (!pharmaceutical_forms.empty()) out += " " + pharmaceutical_forms.front();
  return out;
}

std::string normalize_name(std::string_view name) { return text::normalize_text(name); }

std::string dose_key(std::string_view dose) {
  std::string out;
  for (char c : text::normalize_text(dose)) {
    if (c == ' ') continue;
    out.push_back(c == ',' ? '.' : c);
  }
  return out;
}

std::vector<SentenceRef> section_text(const Leaflet& leaflet, Section section) {
  std::vector<SentenceRef> out;
  for (const auto& block : leaflet.section(section)) {
    for (const auto& sentence : block.sentences) out.push_back({&sentence, &block});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon and registry

ConceptLexicon::ConceptLexicon(std::vector<ConceptEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.concept_id.empty()) throw ValidationError("concept with empty concept_id");
    if (!by_id_.emplace(e.concept_id, i).second) {
      throw ValidationError("duplicate concept_id " + e.concept_id);
    }
    auto index_one = [&](const std::string& surface, bool required) {
      const auto key = text::normalize_text(surface);
      if (key.empty()) {
        if (required) throw ValidationError("empty synonym in concept " + e.concept_id);
        return;
      }
      auto& ids = synonym_index_[key];
      if (std::find(ids.begin(), ids.end(), e.concept_id) == ids.end()) ids.push_back(e.concept_id);
    };
    index_one(e.preferred_name, false);
    for (const auto& syn : e.synonyms) index_one(syn, true);
  }
}

const ConceptEntry* ConceptLexicon::find(const std::string& concept_id) const {
  auto it = by_id_.find(concept_id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

MedicineRegistry::MedicineRegistry(std::vector<RegistryEntry> entries,
                                   std::map<std::string, std::set<std::string>> verb_form_compatibility)
    : entries_(std::move(entries)) {
  for (const auto& [verb, forms] : verb_form_compatibility) {
    if (forms.empty()) throw ValidationError("verb '" + verb + "' maps to an empty form set");
    auto& dst = verb_forms_[normalize_name(verb)];
    for (const auto& f : forms) dst.insert(normalize_name(f));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const auto key = normalize_name(e.medicine_name);
    if (key.empty()) throw ValidationError("registry entry with empty medicine_name");
    if (e.reference_number.empty()) {
      throw ValidationError("registry entry '" + e.medicine_name + "' has no reference_number");
    }
    by_name_[key].push_back(i);
  }
}

std::vector<const RegistryEntry*> MedicineRegistry::lookup(const std::string& normalized_name) const {
  std::vector<const RegistryEntry*> out;
  auto it = by_name_.find(normalized_name);
  if (it == by_name_.end()) return out;
  for (auto i : it->second) out.push_back(&entries_[i]);
  return out;
}

std::vector<std::string> MedicineRegistry::registered_forms(const std::string& normalized_name) const {
  std::set<std::string> forms;
  for (const auto* e : lookup(normalized_name)) {
    for (const auto& f : e->pharmaceutical_forms) forms.insert(normalize_name(f));
  }
  return {forms.begin(), forms.end()};
}

bool MedicineRegistry::is_marketed(const std::string& normalized_name) const {
  auto entries = lookup(normalized_name);
  return std::any_of(entries.begin(), entries.end(), [](const auto* e) { return e->marketed; });
}

std::vector<std::string> MedicineRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : by_name_) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Store

CorpusStore::CorpusStore(std::vector<Leaflet> leaflets, ConceptLexicon lexicon, MedicineRegistry registry)
    : leaflets_(std::move(leaflets)), lexicon_(std::move(lexicon)), registry_(std::move(registry)) {
  for (std::size_t i = 0; i < leaflets_.size(); ++i) {
    const auto& l = leaflets_[i];
    if (l.reference_number.empty()) throw ValidationError("leaflet with empty reference_number");
    if (normalize_name(l.medicine_name).empty()) {
      throw ValidationError("leaflet " + l.reference_number + " has an empty medicine_name");
    }
    if (!by_ref_.emplace(l.reference_number, i).second) {
      throw ValidationError("duplicate reference_number " + l.reference_number);
    }
    by_name_[normalize_name(l.medicine_name)].push_back(i);
  }
}

const Leaflet* CorpusStore::get_leaflet(const std::string& reference_number) const {
  auto it = by_ref_.find(reference_number);
  return it == by_ref_.end() ? nullptr : &leaflets_[it->second];
}

std::vector<const Leaflet*> CorpusStore::candidate_leaflets(
    const std::string& normalized_name, const std::optional<std::string>& dose,
    const std::optional<std::vector<std::string>>& forms) const {
  std::vector<const Leaflet*> out;
  auto it = by_name_.find(normalized_name);
  if (it == by_name_.end()) return out;

  std::set<std::string> wanted_forms;
  if (forms) {
    for (const auto& f : *forms) wanted_forms.insert(normalize_name(f));
  }
  const auto wanted_dose = dose ? std::optional<std::string>(dose_key(*dose)) : std::nullopt;

  for (auto i : it->second) {
    const auto& l = leaflets_[i];
    if (wanted_dose && dose_key(l.dose) != *wanted_dose) continue;
    if (forms) {
      const bool hit = std::any_of(l.pharmaceutical_forms.begin(), l.pharmaceutical_forms.end(),
                                   [&](const std::string& f) { return wanted_forms.count(normalize_name(f)) != 0; });
      if (!hit) continue;
    }
    out.push_back(&l);
  }
  return out;
}

std::vector<std::string> CorpusStore::medicine_names() const {
  std::set<std::string> names;
  for (const auto& [name, _] : by_name_) names.insert(name);
  for (const auto& name : registry_.names()) names.insert(name);
  return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string block_kind_name(BlockKind k) { return k == BlockKind::ListItem ? "list_item" : "paragraph"; }

BlockKind block_kind_from(const std::string& s) {
  if (s == "paragraph") return BlockKind::Paragraph;
  if (s == "list_item") return BlockKind::ListItem;
  throw ValidationError("unknown block kind '" + s + "'");
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

Block block_from_json(const json& j) {
  Block b;
  if (j.contains("heading") && !j["heading"].is_null()) b.heading = j["heading"].get<std::string>();
  b.kind = block_kind_from(j.value("kind", std::string("paragraph")));
  if (j.contains("list_stem") && !j["list_stem"].is_null()) b.list_stem = j["list_stem"].get<std::string>();
  if (j.contains("sentences")) {
    b.sentences = j["sentences"].get<std::vector<std::string>>();
  } else if (j.contains("text")) {
    b.sentences = text::split_sentences(j["text"].get<std::string>());
  }
  if (b.sentences.empty()) throw ValidationError("block without sentences");
  return b;
}

json block_to_json(const Block& b) {
  json j;
  if (b.heading) j["heading"] = *b.heading;
  j["kind"] = block_kind_name(b.kind);
  if (b.list_stem) j["list_stem"] = *b.list_stem;
  j["sentences"] = b.sentences;
  return j;
}

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    try {
      fn(j, lineno);
    } catch (const ValidationError&) {
      throw;
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
}

}  // namespace

Leaflet leaflet_from_json(const json& j) {
  Leaflet l;
  l.reference_number = require<std::string>(j, "reference_number");
  l.medicine_name = require<std::string>(j, "medicine_name");
  l.active_substances = j.value("active_substances", std::vector<std::string>{});
  l.dose = j.value("dose", std::string{});
  l.pharmaceutical_forms = j.value("pharmaceutical_forms", std::vector<std::string>{});
  l.marketed = j.value("marketed", true);
  const auto& sections = j.at("sections");
  for (auto s : kAllSections) {
    const auto key = section_key(s);
    if (!sections.contains(key)) {
      throw ValidationError("leaflet " + l.reference_number + " is missing section key " + key);
    }
    for (const auto& bj : sections.at(key)) l.sections[section_index(s)].push_back(block_from_json(bj));
  }
  return l;
}

json leaflet_to_json(const Leaflet& l) {
  json sections = json::object();
  for (auto s : kAllSections) {
    json blocks = json::array();
    for (const auto& b : l.section(s)) blocks.push_back(block_to_json(b));
    sections[section_key(s)] = std::move(blocks);
  }
  return json{{"reference_number", l.reference_number},
              {"medicine_name", l.medicine_name},
              {"active_substances", l.active_substances},
              {"dose", l.dose},
              {"pharmaceutical_forms", l.pharmaceutical_forms},
              {"marketed", l.marketed},
              {"sections", std::move(sections)}};
}

ConceptEntry concept_from_json(const json& j) {
  ConceptEntry e;
  e.concept_id = require<std::string>(j, "concept_id");
  e.preferred_name = j.value("preferred_name", std::string{});
  e.synonyms = j.value("synonyms", std::vector<std::string>{});
  return e;
}

json concept_to_json(const ConceptEntry& e) {
  return json{{"concept_id", e.concept_id}, {"preferred_name", e.preferred_name}, {"synonyms", e.synonyms}};
}

std::vector<Leaflet> load_leaflets(const std::string& path) {
  std::vector<Leaflet> out;
  for_each_line(path, [&](const json& j, std::size_t lineno) {
    try {
      out.push_back(leaflet_from_json(j));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

ConceptLexicon load_lexicon(const std::string& path) {
  std::vector<ConceptEntry> entries;
  for_each_line(path, [&](const json& j, std::size_t) { entries.push_back(concept_from_json(j)); });
  return ConceptLexicon(std::move(entries));
}

MedicineRegistry load_registry(const std::string& path) {
  std::vector<RegistryEntry> entries;
  std::map<std::string, std::set<std::string>> compat;
  for_each_line(path, [&](const json& j, std::size_t) {
    if (j.contains("verb_form_compatibility")) {
      for (const auto& [verb, forms] : j["verb_form_compatibility"].items()) {
        auto& dst = compat[verb];
        for (const auto& f : forms) dst.insert(f.get<std::string>());
        if (dst.empty()) throw ValidationError("verb '" + verb + "' maps to an empty form set");
      }
      return;
    }
    RegistryEntry e;
    e.medicine_name = require<std::string>(j, "medicine_name");
    e.dose = j.value("dose", std::string{});
    e.pharmaceutical_forms = j.value("pharmaceutical_forms", std::vector<std::string>{});
    e.reference_number = require<std::string>(j, "reference_number");
    e.marketed = require<bool>(j, "marketed");
    entries.push_back(std::move(e));
  });
  return MedicineRegistry(std::move(entries), std::move(compat));
}

CorpusStore load_corpus(const std::string& leaflets_path, const std::string& lexicon_path,
                        const std::string& registry_path) {
  return CorpusStore(load_leaflets(leaflets_path), load_lexicon(lexicon_path), load_registry(registry_path));
}

void write_leaflets(const std::string& path, const std::vector<Leaflet>& leaflets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& l : leaflets) out << leaflet_to_json(l).dump() << '\n';
}

text::Vocabulary build_vocabulary(const CorpusStore& store, const std::vector<std::string>& extra_words) {
  text::Vocabulary vocab;
  for (const auto& l : store.leaflets()) {
    vocab.add_text(l.medicine_name);
    for (const auto& s : l.active_substances) vocab.add_text(s);
    for (const auto& f : l.pharmaceutical_forms) vocab.add_text(f);
    for (const auto& blocks : l.sections) {
      for (const auto& b : blocks) {
        if (b.heading) vocab.add_text(*b.heading);
        if (b.list_stem) vocab.add_text(*b.list_stem);
        for (const auto& s : b.sentences) vocab.add_text(s);
      }
    }
  }
  for (const auto& e : store.lexicon().entries()) {
    vocab.add_text(e.preferred_name);
    for (const auto& syn : e.synonyms) vocab.add_text(syn);
  }
  for (const auto& e : store.registry().entries()) {
    vocab.add_text(e.medicine_name);
    for (const auto& f : e.pharmaceutical_forms) vocab.add_text(f);
  }
  for (const auto& [verb, forms] : store.registry().verb_form_compatibility()) {
    vocab.add_text(verb);
    for (const auto& f : forms) vocab.add_text(f);
  }
  for (const auto& w : extra_words) vocab.add_text(w);
  return vocab;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace meqa
