#include "meqa/synthetic.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <set>

#include "meqa/error.hpp"

namespace meqa::synth {

namespace {

// {m} medicine, {d} disease. Every template opens and closes with a cue word
// of its section.
const std::array<std::vector<std::string>, kSectionCount>& templates() {
  static const std::array<std::vector<std::string>, kSectionCount> t = {{
      {
          "Indicado: ¿para qué sirve {m}? ¿Está indicado?",
          "Indicaciones de {m}, ¿para qué está indicado?",
          "Indicado para {d}: ¿{m} sirve para tratarlo?",
          "Tengo {d}, ¿puedo usar {m} para tratarlo?",
          "Padezco {d}, ¿me sirve {m} para tratarlo?",
          "Indicado {m} para el tratamiento de {d}? ¿Sirve para tratarlo?",
          "Tengo {d}, ¿sirve {m} para tratarlo?",
          "Tratamiento de {d}: ¿está indicado {m} para tratarlo?",
          "Indicaciones: ¿para qué se utiliza {m}? ¿Está indicado?",
          "Tengo {d}, ¿puedo aplicar {m} para tratarlo?",
          "Indicado: ¿para qué enfermedades está indicado {m}?",
      },
      {
          "Tengo {d}, ¿puedo tomar {m}?",
          "Padezco {d}, ¿puedo tomar {m}?",
          "Contraindicado: con {d}, ¿puedo tomar {m}?",
          "Contraindicaciones de {m} con {d}, ¿está contraindicado?",
          "Sufro {d}, ¿me puedo tomar {m}?",
          "Tengo {d} por {d}, ¿puedo tomar {m}?",
          "Embarazada, ¿puedo tomar {m}?",
          "Lactancia: ¿puedo tomar {m}?",
          "Contraindicado: precauciones si tengo {d}, ¿puedo tomar {m}?",
          "Alérgico, ¿puedo tomar {m}?",
          "Contraindicado: ¿puedo tomar alcohol con {m}?",
          "Padezco {d}, ¿es peligroso tomar {m}?",
      },
      {
          "Dosis de {m}: ¿cuántas veces al día? ¿Qué dosis?",
          "Dosis: ¿cuántas veces al día tengo que tomar {m}? ¿Qué dosis?",
          "Dosis: ¿cada cuántas horas se toma {m}? ¿Qué dosis?",
          "Dosis máxima de {m} al día, ¿qué dosis?",
          "Dosis: ¿cuántos comprimidos de {m} al día? ¿Qué dosis?",
          "Dosis olvidada de {m}, ¿qué dosis tomo?",
          "Posología de {m}: ¿cuántas dosis?",
          "Dosis: ¿cuánto tiempo tomar {m}? ¿Qué dosis?",
          "Dosis de {m} para un niño, ¿qué dosis?",
          "Dosis: ¿antes o después de las comidas se toma {m}? ¿Qué dosis?",
          "Sobredosis: tomé más {m} del que debo, ¿qué dosis?",
      },
      {
          "Efectos secundarios de {m}, ¿qué efectos?",
          "Efectos adversos: ¿qué efectos produce {m}? ¿Qué efectos?",
          "Efectos: ¿{m} produce {d}? ¿Es un efecto secundario?",
          "Efectos de {m}: ¿provoca somnolencia como efecto?",
          "Efectos: desde que tomo {m} noto {d}, ¿es un efecto adverso?",
          "Efectos: ¿{m} provoca {d}? ¿Es un efecto adverso?",
          "Efectos: reacciones adversas de {m}, ¿qué efectos?",
          "Efectos: ¿{m} acelera {d}? ¿Es un efecto secundario?",
          "Efectos: ¿{m} causa {d} como efecto adverso?",
          "Efectos secundarios frecuentes de {m}, ¿qué efectos?",
          "Efectos: ¿{m} empeora {d}? ¿Es un efecto adverso?",
      },
      {
          "Conservar: ¿{m} en la nevera? ¿Cómo conservar?",
          "Conservar: ¿cómo debo conservar {m}? ¿Cómo conservar?",
          "Conservación de {m}: ¿a temperatura ambiente? ¿Cómo conservar?",
          "Conservar: ¿hay que guardar {m} en la nevera? ¿Cómo conservar?",
          "Conservar: ¿qué hago con {m} caducado? ¿Cómo conservar?",
          "Conservar: ¿{m} necesita frío? ¿Cómo conservar?",
          "Conservar: ¿dónde guardo {m}? ¿Cómo conservar?",
          "Conservación: ¿a qué temperatura se conserva {m}? ¿Cómo conservar?",
          "Conservar: ¿cuánto dura {m} una vez abierto? ¿Cómo conservar?",
          "Conservar: ¿se estropea {m} si le da el sol? ¿Cómo conservar?",
      },
      {
          "Contiene: ¿qué lleva {m}? ¿Qué contiene?",
          "Contiene: ¿qué excipientes lleva {m}? ¿Qué contiene?",
          "Contiene: ¿{m} lleva lactosa? ¿Qué contiene?",
          "Contiene: ¿cuál es el principio activo de {m}? ¿Qué contiene?",
          "Contiene: ¿{m} tiene gluten? ¿Qué contiene?",
          "Composición de {m}: ¿qué excipientes contiene?",
          "Contiene: ¿qué aspecto tiene {m}? ¿Qué contiene el envase?",
          "Contiene: ¿quién fabrica {m}? ¿Qué contiene?",
          "Contiene: ¿qué componentes tiene {m}? ¿Qué contiene?",
          "Contiene: ¿de qué color son los comprimidos de {m}? ¿Qué contiene?",
      },
  }};
  return t;
}

const std::vector<std::string>& prefixes() {
  static const std::vector<std::string> p = {
      "Hola, ",
      "Buenas tardes. ",
      "Mi madre tiene 80 años. ",
      "Una persona mayor me pregunta. ",
      "Tengo el pie y el tobillo enrojecido desde ayer. ",
      "Mi hijo tiene seis años. ",
      "Me han operado hace un mes. ",
      "Llevo una semana con molestias. ",
      "Tengo una duda. ",
      "Mi médico me lo recetó. ",
      "Me quitaron el yeso la semana pasada. ",
      "Soy una mujer de 45 años. ",
  };
  return p;
}

const std::vector<std::string>& suffixes() {
  static const std::vector<std::string> s = {
      " Gracias.",
      " Muchas gracias de antemano.",
      " Un saludo.",
      " Estoy preocupada.",
  };
  return s;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fill(const std::string& tmpl, const SlotFillers& f, std::mt19937_64& rng, const std::string& medicine) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 3, "{m}") == 0) {
      out += medicine;
      i += 3;
    } else if (tmpl.compare(i, 3, "{d}") == 0) {
      out += f.diseases.empty() ? std::string("dolor") : f.diseases[pick(rng, f.diseases.size())];
      i += 3;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

}  // namespace

SlotFillers fillers_from_store(const CorpusStore& store) {
  std::set<std::string> meds, diseases;
  for (const auto& l : store.leaflets()) {
    meds.insert(l.medicine_name);
    if (!l.dose.empty()) meds.insert(l.medicine_name + " " + l.dose);
    if (!l.pharmaceutical_forms.empty()) meds.insert(l.pharmaceutical_forms.front() + " " + l.medicine_name);
  }
  for (const auto& e : store.registry().entries()) meds.insert(e.medicine_name);
  for (const auto& c : store.lexicon().entries()) {
    diseases.insert(c.preferred_name);
    diseases.insert(c.synonyms.begin(), c.synonyms.end());
  }
  SlotFillers f;
  f.medicines.assign(meds.begin(), meds.end());
  f.diseases.assign(diseases.begin(), diseases.end());
  return f;
}

std::vector<SyntheticQuestion> generate(const SlotFillers& fillers, const GeneratorOptions& options) {
  if (fillers.medicines.empty()) throw ValidationError("synthetic generator needs at least one medicine");
  std::mt19937_64 rng(options.seed);
  const auto& t = templates();
  std::vector<SyntheticQuestion> out;
  out.reserve(options.count);
  for (std::size_t n = 0; n < options.count; ++n) {
    const std::size_t first = pick(rng, kSectionCount);
    std::vector<std::size_t> labels = {first};
    if (unit(rng) < options.multi_label_rate) {
      std::size_t second = pick(rng, kSectionCount - 1);
      if (second >= first) ++second;
      labels.push_back(second);
    }
    const std::string medicine = fillers.medicines[pick(rng, fillers.medicines.size())];
    std::string text;
    if (unit(rng) < options.noise_rate) text += prefixes()[pick(rng, prefixes().size())];
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& pool = t[labels[i]];
      if (i) text += ' ';
      text += fill(pool[pick(rng, pool.size())], fillers, rng, medicine);
    }
    if (unit(rng) < options.noise_rate / 2) text += suffixes()[pick(rng, suffixes().size())];

    SyntheticQuestion q{std::move(text), {}};
    std::sort(labels.begin(), labels.end());
    for (auto k : labels) q.sections.push_back(section_at(k));
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<clf::LabeledQuestion> to_labeled(const std::vector<SyntheticQuestion>& questions,
                                             const text::Vocabulary* vocabulary) {
  std::vector<clf::LabeledQuestion> out;
  out.reserve(questions.size());
  for (const auto& q : questions) out.push_back({text::normalize(q.text, vocabulary).tokens, q.sections});
  return out;
}

nlohmann::json to_json(const SyntheticQuestion& q) {
  nlohmann::json sections = nlohmann::json::array();
  for (auto s : q.sections) sections.push_back(section_code(s));
  return {{"question", q.text}, {"sections", sections}};
}

SyntheticQuestion synthetic_from_json(const nlohmann::json& j) {
  SyntheticQuestion q;
  q.text = j.at("question").get<std::string>();
  for (int code : j.at("sections").get<std::vector<int>>()) q.sections.push_back(section_from_code(code));
  std::sort(q.sections.begin(), q.sections.end());
  if (q.sections.empty()) throw ValidationError("question without sections");
  return q;
}

void write_questions(const std::string& path, const std::vector<SyntheticQuestion>& questions) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& q : questions) out << to_json(q).dump() << '\n';
}

std::vector<SyntheticQuestion> load_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<SyntheticQuestion> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(synthetic_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

}  // namespace meqa::synth
