#include "convqa/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>

#include "convqa/error.hpp"
#include "convqa/generator.hpp"
#include "convqa/recall.hpp"
#include "convqa/refiner.hpp"
#include "convqa/segment.hpp"

namespace convqa {
namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
}

TraceEvent ablated(const char* stage_name) {
    TraceEvent e;
    e.stage = stage_name;
    e.status = StageStatus::ablated;
    return e;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

std::string ranks_of(const std::vector<ScoredParagraph>& ps) {
    std::vector<std::string> r;
    for (const ScoredParagraph& p : ps) r.push_back(std::to_string(p.final_rank.value_or(0)));
    return join(r, ",");
}

// Wraps non-stage failures of stages that do not call a model.
template <typename Fn>
auto run_stage(const char* stage_name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage_name, "", e.what());
    }
}

// −FR evidence: connector snippets of the top documents, else their first paragraph.
std::vector<ScoredParagraph> snippet_evidence(const std::vector<Document>& docs, const PipelineConfig& config) {
    std::vector<ScoredParagraph> out;
    for (const Document& d : docs) {
        if (out.size() >= config.top_n) break;
        std::string text;
        if (d.snippet && !trim(*d.snippet).empty()) {
            text = std::string(trim(*d.snippet));
        } else {
            auto paragraphs = segment_paragraphs(d, config.max_paragraph_tokens, config.tokenizer);
            if (paragraphs.empty()) continue;
            text = std::move(paragraphs.front().text);
        }
        ScoredParagraph sp;
        sp.paragraph = Paragraph{std::move(text), d.doc_id, 0, d.rank, d.url};
        sp.recall_score = 0.0;
        sp.final_rank = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(sp));
    }
    return out;
}

}  // namespace

Ablations Ablations::parse(std::string_view codes) {
    Ablations a;
    std::string s(codes);
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string code(trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos
                                                                                                 : comma - pos)));
        if (code == "qf") {
            a.qf = true;
        } else if (code == "fr") {
            a.fr = true;
        } else if (code == "sc") {
            a.sc = true;
        } else if (code == "all") {
            a = {true, true, true};
        } else if (!code.empty() && code != "none") {
            throw FormatError("unknown ablation code '" + code + "' (expected qf, fr, sc, all)");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return a;
}

std::string Ablations::label() const {
    if (!qf && !fr && !sc) return "full";
    if (qf && fr && sc) return "-ALL";
    std::string out;
    if (qf) out += "-QF";
    if (fr) out += "-FR";
    if (sc) out += "-SC";
    return out;
}

std::vector<std::string> Ablations::codes() const {
    std::vector<std::string> out;
    if (qf) out.emplace_back("qf");
    if (fr) out.emplace_back("fr");
    if (sc) out.emplace_back("sc");
    return out;
}

void PipelineConfig::validate() const {
    if (max_documents < 1) throw FormatError("max_documents must be >= 1");
    if (top_n < 1) throw FormatError("top_n must be >= 1");
    if (k_recall < top_n) throw FormatError("top_n must not exceed k_recall");
    if (max_paragraph_tokens < 1) throw FormatError("max_paragraph_tokens must be >= 1");
}

Json encode(const PipelineConfig& c) {
    return Json{{"max_documents", c.max_documents},
                {"k_recall", c.k_recall},
                {"top_n", c.top_n},
                {"ablations", c.ablations.codes()},
                {"tokenizer", std::string(to_string(c.tokenizer))},
                {"score_function", std::string(to_string(c.score_function))},
                {"max_context_turns", c.max_context_turns},
                {"max_paragraph_tokens", c.max_paragraph_tokens},
                {"max_output_tokens", c.max_output_tokens},
                {"temperature", c.temperature}};
}

PipelineConfig decode_pipeline_config(const Json& j) {
    PipelineConfig c;
    if (!j.is_object()) throw FormatError("pipeline config must be an object");
    auto size_field = [&](const char* name, std::size_t& out) {
        if (auto v = codec::optional_int(j, name)) {
            if (*v < 0) throw FormatError(std::string("field '") + name + "': must be non-negative");
            out = static_cast<std::size_t>(*v);
        }
    };
    size_field("max_documents", c.max_documents);
    size_field("k_recall", c.k_recall);
    size_field("top_n", c.top_n);
    size_field("max_context_turns", c.max_context_turns);
    size_field("max_paragraph_tokens", c.max_paragraph_tokens);
    if (auto v = codec::optional_int(j, "max_output_tokens")) c.max_output_tokens = static_cast<int>(*v);
    if (auto v = codec::optional_number(j, "temperature")) c.temperature = *v;
    if (auto v = codec::optional_string(j, "tokenizer")) c.tokenizer = parse_tokenizer_mode(*v);
    if (auto v = codec::optional_string(j, "score_function")) c.score_function = parse_score_function(*v);
    if (auto it = j.find("ablations"); it != j.end()) {
        if (it->is_string()) {
            c.ablations = Ablations::parse(it->get<std::string>());
        } else if (it->is_array()) {
            std::string codes;
            for (const Json& code : *it) codes += code.get<std::string>() + ",";
            c.ablations = Ablations::parse(codes);
        } else {
            throw FormatError("field 'ablations': expected string or array");
        }
    }
    if (c.temperature < 0) throw FormatError("field 'temperature': must be >= 0");
    c.validate();
    return c;
}

Json encode(const TraceEvent& e, bool include_timings) {
    Json j{{"stage", e.stage}, {"status", e.status == StageStatus::executed ? "executed" : "ablated"}};
    if (e.role) j["role"] = std::string(to_string(*e.role));
    j["flags"] = e.flags;
    j["detail"] = e.detail;
    if (include_timings) j["elapsed_us"] = e.elapsed.count();
    return j;
}

Json encode(const TurnResult& r, const EncodeOptions& options) {
    Json p_top = Json::array();
    for (const ScoredParagraph& p : r.p_top) p_top.push_back(encode(p));
    Json verdicts = Json::array();
    for (const HelpfulnessVerdict& v : r.verdicts) verdicts.push_back(encode(v));
    Json j{{"refined_question",
            Json{{"text", r.refined_question.text}, {"source_turn_index", r.refined_question.source_turn_index}}},
           {"keywords", r.keywords.keywords()},
           {"documents_fetched", r.documents_fetched},
           {"p_top", std::move(p_top)},
           {"verdicts", std::move(verdicts)},
           {"response", r.response}};
    if (options.include_trace) {
        Json trace = Json::array();
        for (const TraceEvent& e : r.trace.events) trace.push_back(encode(e, options.include_timings));
        j["trace"] = std::move(trace);
    }
    return j;
}

Session::Session(std::string id, PipelineConfig config, Conversation history)
    : id_(std::move(id)), config_(std::move(config)), conversation_(std::move(history)) {
    config_.validate();
    if (conversation_.id().empty()) conversation_ = Conversation(id_, conversation_.turns());
}

Conversation Session::conversation() const {
    std::lock_guard lock(mutex_);
    return conversation_;
}

Pipeline::Pipeline(PipelineComponents components) : components_(std::move(components)) {
    for (BackendRole role : {BackendRole::refiner, BackendRole::keyword_extractor, BackendRole::responder}) {
        auto it = components_.backends.find(role);
        if (it == components_.backends.end() || !it->second) {
            throw Error("pipeline has no backend bound to role " + std::string(to_string(role)));
        }
    }
    if (!components_.connector) throw Error("pipeline has no search connector");
    if (!components_.scorer) throw Error("pipeline has no rerank scorer");
    if (!components_.embeddings) components_.embeddings = std::make_shared<EmbeddingModel>();
}

TextBackend& Pipeline::backend(BackendRole role) const { return *components_.backends.at(role); }

TurnResult Pipeline::answer(const Conversation& context, std::string_view question,
                            const PipelineConfig& config) const {
    if (trim(question).empty()) throw Error("question must not be blank");
    config.validate();
    const TemplateSet& templates = components_.templates;
    const RefinerOptions refiner_options{config.max_context_turns, 128, config.temperature};
    TurnResult result;
    auto& events = result.trace.events;

    // refine + extract
    if (config.ablations.qf) {
        result.refined_question = {std::string(trim(question)), static_cast<int>(context.size()) + 1};
        result.keywords = KeywordSet({std::string(question)});
        events.push_back(ablated(stage::refine));
        events.push_back(ablated(stage::extract));
    } else {
        auto start = Clock::now();
        Reformulation ref = reformulate(context, question, backend(BackendRole::refiner), templates, refiner_options);
        result.refined_question = ref.question;
        events.push_back({stage::refine, StageStatus::executed, BackendRole::refiner, ref.flags,
                          ref.question.text, since(start)});

        start = Clock::now();
        KeywordExtraction kw = extract_keywords(context, question, result.refined_question,
                                                backend(BackendRole::keyword_extractor), templates, refiner_options);
        result.keywords = kw.keywords;
        events.push_back({stage::extract, StageStatus::executed, BackendRole::keyword_extractor, kw.flags,
                          join(result.keywords.keywords(), "; "), since(start)});
    }

    // document-level retrieval
    auto start = Clock::now();
    const std::vector<Document> docs = run_stage(stage::search, [&] {
        return search_documents(result.keywords, *components_.connector, config.max_documents);
    });
    result.documents_fetched = docs.size();
    events.push_back({stage::search, StageStatus::executed, std::nullopt, {},
                      "query=\"" + result.keywords.joined() + "\" documents=" + std::to_string(docs.size()),
                      since(start)});

    if (config.ablations.fr) {
        result.p_top = snippet_evidence(docs, config);
        events.push_back(ablated(stage::segment));
        events.push_back(ablated(stage::recall));
        TraceEvent rr = ablated(stage::rerank);
        rr.detail = "p_top from document snippets: " + std::to_string(result.p_top.size());
        events.push_back(std::move(rr));
    } else {
        start = Clock::now();
        const std::vector<Paragraph> paragraphs = run_stage(stage::segment, [&] {
            std::vector<Paragraph> all;
            for (const Document& d : docs) {
                auto ps = segment_paragraphs(d, config.max_paragraph_tokens, config.tokenizer);
                all.insert(all.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
            }
            return all;
        });
        events.push_back({stage::segment, StageStatus::executed, std::nullopt, {},
                          "paragraphs=" + std::to_string(paragraphs.size()), since(start)});

        start = Clock::now();
        const std::vector<ScoredParagraph> candidates = run_stage(stage::recall, [&] {
            return recall_top(result.refined_question, result.keywords, paragraphs, *components_.embeddings,
                              config.k_recall, config.score_function);
        });
        events.push_back({stage::recall, StageStatus::executed, std::nullopt, {},
                          "candidates=" + std::to_string(candidates.size()), since(start)});

        start = Clock::now();
        RerankOutcome rr = run_stage(stage::rerank, [&] {
            return rerank(result.refined_question, candidates, *components_.scorer, config.top_n);
        });
        result.p_top = std::move(rr.top);
        TraceEvent ev{stage::rerank, StageStatus::executed, std::nullopt, {},
                      "p_top=" + std::to_string(result.p_top.size()), since(start)};
        if (rr.fell_back) {
            ev.flags.emplace_back("rerank_fallback");
            ev.detail += " scorer error: " + rr.error;
        }
        events.push_back(std::move(ev));
    }

    // check + respond
    start = Clock::now();
    const bool self_check = !config.ablations.sc;
    GenerationOutcome gen =
        self_check_and_respond(context, question, result.p_top, backend(BackendRole::responder), templates, self_check,
                               {config.max_context_turns, config.max_output_tokens, config.temperature});
    events.push_back({stage::generate, StageStatus::executed, BackendRole::responder, {},
                      self_check ? "mode=self_check" : "mode=plain", since(start)});
    result.response = gen.response;
    if (self_check) {
        result.verdicts = gen.verdicts;
        events.push_back({stage::self_check, StageStatus::executed, std::nullopt, gen.flags,
                          "p_top ranks=" + ranks_of(result.p_top) + " helpful ranks=" + ranks_of(gen.helpful),
                          std::chrono::microseconds{0}});
    } else {
        events.push_back(ablated(stage::self_check));
    }
    return result;
}

TurnResult Pipeline::answer_turn(Session& session, std::string_view question) const {
    bool expected = false;
    if (!session.busy_.compare_exchange_strong(expected, true)) throw SessionBusyError(session.id());
    struct Release {
        std::atomic<bool>& flag;
        ~Release() { flag.store(false); }
    } release{session.busy_};

    const Conversation context = session.conversation();
    TurnResult result = answer(context, question, session.config());
    {
        std::lock_guard lock(session.mutex_);
        session.conversation_.append({std::string(question), result.response});
    }
    return result;
}

std::vector<RecordOutcome> run_dataset(const std::vector<DatasetRecord>& records, const Pipeline& pipeline,
                                       const PipelineConfig& config) {
    std::vector<RecordOutcome> out;
    out.reserve(records.size());
    for (const DatasetRecord& r : records) {
        RecordOutcome o{r, std::nullopt, {}};
        try {
            o.result = pipeline.answer(Conversation(r.conv_id, r.context), r.question, config);
        } catch (const std::exception& e) {
            o.error = e.what();
        }
        out.push_back(std::move(o));
    }
    return out;
}

void write_predictions(const std::vector<RecordOutcome>& outcomes, const std::filesystem::path& path,
                       const EncodeOptions& options) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write predictions file " + path.string());
    for (const RecordOutcome& o : outcomes) {
        Json j{{"conv_id", o.record.conv_id},
               {"turn_index", o.record.turn_index},
               {"question", o.record.question},
               {"response", o.result ? o.result->response : std::string()}};
        if (o.result) {
            j["result"] = encode(*o.result, options);
        } else {
            j["error"] = o.error;
        }
        out << j.dump() << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> load_texts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> texts;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const Json j = Json::parse(line, nullptr, false);
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (j.is_discarded() || !j.is_object()) throw FormatError(where + ": not a JSON object");
        std::optional<std::string> text;
        for (const char* field : {"response", "reference_response", "reference"}) {
            if (auto v = codec::optional_string(j, field)) {
                text = std::move(v);
                break;
            }
        }
        if (!text) throw FormatError(where + ": no response, reference_response or reference field");
        texts.push_back(std::move(*text));
    }
    return texts;
}

}  // namespace convqa
