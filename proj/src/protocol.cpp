#include "mfeval/protocol.hpp"

#include <algorithm>
#include <set>

#include "json_fields.hpp"

namespace mfeval::protocol {

using nlohmann::json;

const Question* Protocol::find(int number) const noexcept {
    for (const auto& s : sections)
        for (const auto& q : s.questions)
            if (q.number == number) return &q;
    return nullptr;
}

const Question* Protocol::find_meta(int number) const noexcept {
    for (const auto& q : meta_questions)
        if (q.number == number) return &q;
    return nullptr;
}

const Section* Protocol::section_of(int number) const noexcept {
    for (const auto& s : sections)
        for (const auto& q : s.questions)
            if (q.number == number) return &s;
    return nullptr;
}

std::vector<const Question*> Protocol::questions() const {
    std::vector<const Question*> out;
    for (const auto& s : sections)
        for (const auto& q : s.questions) out.push_back(&q);
    return out;
}

std::vector<const Question*> Protocol::likert_questions() const {
    std::vector<const Question*> out;
    for (const auto* q : questions())
        if (q->is_likert()) out.push_back(q);
    return out;
}

namespace {

Question open(int number, std::string prompt, std::string description,
              std::string es_prompt, std::string es_description) {
    Question q;
    q.number = number;
    q.prompt = std::move(prompt);
    q.kind = OpenAnswer{};
    q.description = std::move(description);
    q.translations["es"] = {std::move(es_prompt), std::move(es_description)};
    return q;
}

Question likert(int number, std::string prompt, std::string description,
                std::string es_prompt, std::string es_description) {
    Question q = open(number, std::move(prompt), std::move(description), std::move(es_prompt),
                      std::move(es_description));
    q.kind = Likert{1, 5};
    return q;
}

Question dependent(Question q, int on) {
    q.depends_on = Dependency{on, kAffirmativeThreshold};
    q.required = false;
    return q;
}

}  // namespace

Protocol build_graimes_protocol() {
    Protocol p;
    p.id = "graimes-v1";
    p.title = "GrAImes microfiction evaluation protocol";
    p.language = "en";

    Section overview{"Story Overview and text complexity", {}};
    overview.questions.push_back(open(
        1, "What happens in the story?",
        "Evaluates how clearly the generated microfiction is understood by the reader.",
        "¿Qué sucede en la historia?",
        "Evalúa con qué claridad el lector comprende la minificción."));
    overview.questions.push_back(open(
        2, "What is the theme?",
        "Assesses whether the text has a recognizable structure and can be associated with a "
        "specific theme.",
        "¿Cuál es el tema?",
        "Evalúa si el texto tiene una estructura reconocible y puede asociarse con un tema "
        "específico."));
    overview.questions.push_back(likert(
        3, "Does it propose other interpretations, in addition to the literal one?",
        "Evaluates the literary depth of the microfiction. A text with multiple interpretations "
        "demonstrates greater literary complexity.",
        "¿Propone otras interpretaciones, además de la literal?",
        "Evalúa la profundidad literaria de la minificción. Un texto con múltiples "
        "interpretaciones muestra mayor complejidad literaria."));
    overview.questions.push_back(dependent(
        open(4, "If the above question was affirmative, Which interpretation is it?",
             "Explores whether the microfiction contains deeper literary elements such as "
             "metaphor, symbolism, or allusion.",
             "Si la respuesta anterior fue afirmativa, ¿cuál es esa interpretación?",
             "Explora si la minificción contiene elementos literarios más profundos como "
             "metáfora, simbolismo o alusión."),
        3));

    Section technical{"Technical Assessment", {}};
    technical.questions.push_back(likert(
        5, "Is the story credible?",
        "Measures how realistic and distinguishable the characters and events are within the "
        "microfiction.",
        "¿La historia es verosímil?",
        "Mide qué tan realistas y distinguibles son los personajes y los hechos de la "
        "minificción."));
    technical.questions.push_back(likert(
        6, "Does the text require your participation or cooperation to complete its form and "
           "meaning?",
        "Assesses the complexity of the microfiction by determining the extent to which it "
        "involves the reader in constructing meaning.",
        "¿El texto requiere tu participación o cooperación para completar su forma y sentido?",
        "Evalúa la complejidad de la minificción según el grado en que involucra al lector en "
        "la construcción del sentido."));
    technical.questions.push_back(likert(
        7, "Does it propose a new perspective on reality?",
        "Evaluates whether the microfiction immerses the reader in an alternate reality "
        "different from their own.",
        "¿Propone una nueva visión de la realidad?",
        "Evalúa si la minificción sumerge al lector en una realidad alterna distinta de la "
        "suya."));
    technical.questions.push_back(likert(
        8, "Does it propose a new vision of the genre it uses?",
        "Determines whether the microfiction offers a fresh approach to its literary genre.",
        "¿Propone una nueva visión del género que utiliza?",
        "Determina si la minificción ofrece un enfoque novedoso de su género literario."));
    technical.questions.push_back(likert(
        9, "Does it give an original way of using the language?",
        "Measures the creativity and uniqueness of the language used in the microfiction.",
        "¿Ofrece una manera original de usar el lenguaje?",
        "Mide la creatividad y singularidad del lenguaje usado en la minificción."));

    Section editorial{"Editorial / Commercial Quality", {}};
    editorial.questions.push_back(likert(
        10, "Does it remind you of another text or book you have read?",
        "Assesses the relevance of the text and its similarities to existing works in the "
        "literary market.",
        "¿Te recuerda otro texto o libro que hayas leído?",
        "Evalúa la relevancia del texto y sus semejanzas con obras existentes en el mercado "
        "literario."));
    editorial.questions.push_back(likert(
        11, "Would you like to read more texts like this?",
        "Measures the appeal of the microfiction and its potential marketability.",
        "¿Te gustaría leer más textos como este?",
        "Mide el atractivo de la minificción y su potencial comercial."));
    editorial.questions.push_back(likert(
        12, "Would you recommend it?",
        "Indicates whether the microfiction has an audience and whether readers might seek out "
        "more works by the author.",
        "¿Lo recomendarías?",
        "Indica si la minificción tiene público y si los lectores buscarían más obras del "
        "autor."));
    editorial.questions.push_back(likert(
        13, "Would you give it as a present?",
        "Evaluates whether the microfiction holds enough literary or commercial value for "
        "readers to gift it to others.",
        "¿Lo regalarías?",
        "Evalúa si la minificción tiene suficiente valor literario o comercial para que los "
        "lectores la regalen."));
    editorial.questions.push_back(dependent(
        open(14, "If the last answer was yes, to whom would you give it as a present?",
             "Identifies the type of reader the evaluator believes would appreciate the "
             "microfiction.",
             "Si la respuesta anterior fue sí, ¿a quién se lo regalarías?",
             "Identifica el tipo de lector que, a juicio del evaluador, apreciaría la "
             "minificción."),
        13));
    Question publisher = open(
        15, "Can you think of a specific publisher that you think would publish a text like this?",
        "Assesses the commercial viability of the microfiction by determining if respondents "
        "associate it with a specific publishing market.",
        "¿Se te ocurre alguna editorial específica que publicaría un texto como este?",
        "Evalúa la viabilidad comercial de la minificción según si los encuestados la asocian "
        "con un mercado editorial específico.");
    publisher.required = false;
    editorial.questions.push_back(std::move(publisher));

    p.sections = {std::move(overview), std::move(technical), std::move(editorial)};

    Question clear = open(16, "Is this microfiction evaluation protocol clear enough for you?",
                          "Yes or No answer.",
                          "¿Este protocolo de evaluación de minificciones te resulta lo "
                          "suficientemente claro?",
                          "Respuesta sí o no.");
    Question useful = open(17,
                           "Do you think that this protocol can be used to evaluate the literary "
                           "value of microfiction?",
                           "Opinion on the protocol's fitness for assessing literary value.",
                           "¿Crees que este protocolo puede usarse para evaluar el valor "
                           "literario de una minificción?",
                           "Opinión sobre la idoneidad del protocolo para valorar la calidad "
                           "literaria.");
    p.meta_questions = {std::move(clear), std::move(useful)};
    return p;
}

namespace {

std::string qname(int n) { return "Q" + std::to_string(n); }

void check_question(const Question& q, std::vector<Violation>& out) {
    if (q.number <= 0)
        out.push_back({"invalid_question_number", qname(q.number),
                       "question number must be positive: " + std::to_string(q.number)});
    if (q.prompt.empty())
        out.push_back({"empty_prompt", qname(q.number), qname(q.number) + " has an empty prompt"});
    if (const Likert* l = q.likert(); l && l->min >= l->max)
        out.push_back({"invalid_likert_bounds", qname(q.number),
                       qname(q.number) + " Likert bounds need min < max, got " +
                           std::to_string(l->min) + ".." + std::to_string(l->max)});
}

}  // namespace

std::vector<Violation> validate_protocol(const Protocol& p) {
    std::vector<Violation> out;
    if (p.id.empty()) out.push_back({"empty_id", "protocol", "protocol id is empty"});
    if (p.sections.empty()) out.push_back({"no_sections", "protocol", "protocol has no sections"});

    std::set<std::string> section_names;
    std::set<int> numbers;
    // Question numbers in declaration order, for the "earlier question" rule.
    std::vector<int> seen_order;
    auto note_number = [&](const Question& q) {
        if (!numbers.insert(q.number).second)
            out.push_back({"duplicate_question_number", qname(q.number),
                           "duplicate question number: " + std::to_string(q.number)});
        seen_order.push_back(q.number);
    };

    for (const auto& s : p.sections) {
        if (s.name.empty())
            out.push_back({"empty_section_name", "section", "section name is empty"});
        else if (!section_names.insert(s.name).second)
            out.push_back({"duplicate_section_name", s.name, "duplicate section name: " + s.name});
        if (s.questions.empty())
            out.push_back({"empty_section", s.name, "section has no questions: " + s.name});
        for (const auto& q : s.questions) {
            check_question(q, out);
            note_number(q);
        }
    }
    for (const auto& q : p.meta_questions) {
        check_question(q, out);
        if (q.depends_on)
            out.push_back({"meta_dependency", qname(q.number),
                           "meta question " + qname(q.number) + " cannot have a dependency"});
        note_number(q);
    }

    for (const auto& s : p.sections) {
        for (const auto& q : s.questions) {
            if (!q.depends_on) continue;
            const int target = q.depends_on->question;
            const Question* t = p.find(target);
            if (t == nullptr) {
                out.push_back({"dangling_dependency", qname(q.number),
                               "dangling dependency: " + qname(q.number) + " depends on " +
                                   qname(target) + ", which does not exist"});
                continue;
            }
            auto pos = [&](int n) {
                return std::find(seen_order.begin(), seen_order.end(), n) - seen_order.begin();
            };
            if (pos(target) >= pos(q.number))
                out.push_back({"forward_dependency", qname(q.number),
                               qname(q.number) + " depends on " + qname(target) +
                                   ", which is not an earlier question"});
            const Likert* l = t->likert();
            if (l == nullptr) {
                out.push_back({"dependency_not_likert", qname(q.number),
                               qname(q.number) + " depends on " + qname(target) +
                                   ", which is not a Likert question"});
            } else if (q.depends_on->min_value < l->min || q.depends_on->min_value > l->max) {
                out.push_back({"dependency_threshold_out_of_bounds", qname(q.number),
                               qname(q.number) + " activation threshold " +
                                   std::to_string(q.depends_on->min_value) + " is outside " +
                                   qname(target) + " bounds"});
            }
        }
    }
    return out;
}

// --- JSON ---------------------------------------------------------------

json to_json(const Question& q) {
    json j;
    j["number"] = q.number;
    j["prompt"] = q.prompt;
    if (const Likert* l = q.likert())
        j["kind"] = {{"type", "likert"}, {"min", l->min}, {"max", l->max}};
    else
        j["kind"] = {{"type", "open"}};
    j["description"] = q.description;
    if (q.depends_on)
        j["depends_on"] = {{"question", q.depends_on->question},
                           {"min_value", q.depends_on->min_value}};
    if (q.required != !q.depends_on.has_value()) j["required"] = q.required;
    if (!q.translations.empty()) {
        json t = json::object();
        for (const auto& [lang, tr] : q.translations)
            t[lang] = {{"prompt", tr.prompt}, {"description", tr.description}};
        j["translations"] = std::move(t);
    }
    return j;
}

json to_json(const Protocol& p) {
    json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["language"] = p.language;
    j["sections"] = json::array();
    for (const auto& s : p.sections) {
        json js;
        js["name"] = s.name;
        js["questions"] = json::array();
        for (const auto& q : s.questions) js["questions"].push_back(to_json(q));
        j["sections"].push_back(std::move(js));
    }
    j["meta_questions"] = json::array();
    for (const auto& q : p.meta_questions) j["meta_questions"].push_back(to_json(q));
    return j;
}

std::string serialize_protocol(const Protocol& p) { return to_json(p).dump(2) + "\n"; }

namespace {

using detail::Fields;

Question question_from_json(const json& doc, const std::string& path) {
    Fields f(doc, path);
    Question q;
    q.number = f.integer("number");
    q.prompt = f.string("prompt");
    q.description = f.string_or("description", "");

    Fields kind(f.required("kind"), f.path("kind"));
    const std::string type = kind.string("type");
    if (type == "likert") {
        q.kind = Likert{kind.integer("min"), kind.integer("max")};
    } else if (type == "open") {
        q.kind = OpenAnswer{};
    } else {
        throw ParseError(kind.path("type"), "expected \"likert\" or \"open\", got \"" + type + "\"");
    }
    kind.finish();

    if (const json* dep = f.optional("depends_on")) {
        Fields d(*dep, f.path("depends_on"));
        q.depends_on = Dependency{d.integer("question"), d.integer("min_value")};
        d.finish();
    }
    q.required = f.boolean_or("required", !q.depends_on.has_value());

    if (const json* tr = f.optional("translations")) {
        if (!tr->is_object()) throw ParseError(f.path("translations"), "expected an object");
        for (auto it = tr->begin(); it != tr->end(); ++it) {
            Fields t(it.value(), detail::join_path(f.path("translations"), it.key()));
            q.translations[it.key()] = {t.string("prompt"), t.string_or("description", "")};
            t.finish();
        }
    }
    f.finish();
    return q;
}

}  // namespace

Protocol protocol_from_json(const json& doc) {
    Fields f(doc, "");
    Protocol p;
    p.id = f.string("id");
    p.title = f.string("title");
    p.language = f.string("language");
    const json& sections = f.array("sections");
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const std::string spath = detail::index_path("sections", i);
        Fields s(sections[i], spath);
        Section sec;
        sec.name = s.string("name");
        const json& qs = s.array("questions");
        for (std::size_t k = 0; k < qs.size(); ++k)
            sec.questions.push_back(
                question_from_json(qs[k], detail::index_path(s.path("questions"), k)));
        s.finish();
        p.sections.push_back(std::move(sec));
    }
    if (const json* meta = f.optional("meta_questions")) {
        if (!meta->is_array()) throw ParseError("meta_questions", "expected an array");
        for (std::size_t k = 0; k < meta->size(); ++k)
            p.meta_questions.push_back(
                question_from_json((*meta)[k], detail::index_path("meta_questions", k)));
    }
    f.finish();

    auto violations = validate_protocol(p);
    if (!violations.empty()) {
        const std::string message = "protocol violates " + std::to_string(violations.size()) +
                                    " rule(s): " + violations.front().message;
        throw ValidationError("invalid_protocol", message, std::move(violations));
    }
    return p;
}

Protocol parse_protocol(std::string_view document) {
    return protocol_from_json(detail::parse_document(document));
}

}  // namespace mfeval::protocol
