#include "convqa/codec.hpp"

#include <string>

#include "convqa/error.hpp"

namespace convqa {
namespace codec {
namespace {

[[noreturn]] void fail(const char* field, const std::string& what) {
    throw FormatError(std::string("field '") + field + "': " + what);
}

}  // namespace

const Json& require(const Json& j, const char* field) {
    if (!j.is_object()) throw FormatError(std::string("expected an object holding field '") + field + "'");
    auto it = j.find(field);
    if (it == j.end()) fail(field, "missing");
    return *it;
}

std::string require_string(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_string()) fail(field, "expected string");
    return v.get<std::string>();
}

long long require_int(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_number_integer()) fail(field, "expected integer");
    return v.get<long long>();
}

double require_number(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_number()) fail(field, "expected number");
    return v.get<double>();
}

bool require_bool(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_boolean()) fail(field, "expected boolean");
    return v.get<bool>();
}

std::optional<std::string> optional_string(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(field, "expected string");
    return it->get<std::string>();
}

std::optional<long long> optional_int(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) fail(field, "expected integer");
    return it->get<long long>();
}

std::optional<double> optional_number(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) fail(field, "expected number");
    return it->get<double>();
}

const Json& require_array(const Json& j, const char* field) {
    const Json& v = require(j, field);
    if (!v.is_array()) fail(field, "expected array");
    return v;
}

}  // namespace codec

using namespace codec;

Json encode(const Turn& turn) {
    return Json{{"question", turn.question}, {"response", turn.response}};
}

Json encode(const Conversation& conversation) {
    Json turns = Json::array();
    for (const Turn& t : conversation.turns()) turns.push_back(encode(t));
    return Json{{"id", conversation.id()}, {"turns", std::move(turns)}};
}

Json encode(const Paragraph& p) {
    Json j{{"text", p.text}, {"doc_id", p.doc_id}, {"index_in_doc", p.index_in_doc}, {"doc_rank", p.doc_rank}};
    if (p.source_url) j["source_url"] = *p.source_url;
    return j;
}

Json encode(const ScoredParagraph& s) {
    Json j{{"paragraph", encode(s.paragraph)}, {"recall_score", s.recall_score}};
    if (s.rerank_score) j["rerank_score"] = *s.rerank_score;
    if (s.final_rank) j["final_rank"] = *s.final_rank;
    return j;
}

Json encode(const HelpfulnessVerdict& v) {
    Json j{{"paragraph_rank", v.paragraph_rank}, {"helpful", v.helpful}};
    if (v.rationale) j["rationale"] = *v.rationale;
    return j;
}

Json encode(const LabeledParagraph& p) {
    Json j{{"text", p.text}};
    if (p.source_url) j["source_url"] = *p.source_url;
    j["helpful"] = p.helpful;
    if (p.votes) j["votes"] = *p.votes;
    return j;
}

Json encode(const DatasetRecord& r) {
    Json context = Json::array();
    for (const Turn& t : r.context) context.push_back(encode(t));
    Json paragraphs = Json::array();
    for (const LabeledParagraph& p : r.paragraphs) paragraphs.push_back(encode(p));
    return Json{{"conv_id", r.conv_id},
                {"turn_index", r.turn_index},
                {"context", std::move(context)},
                {"question", r.question},
                {"reformulated_question", r.reformulated_question},
                {"keywords", r.keywords},
                {"paragraphs", std::move(paragraphs)},
                {"reference_response", r.reference_response}};
}

Json encode(const DatasetStats& s) {
    return Json{{"num_conversations", s.num_conversations},
                {"turns_per_conv", s.turns_per_conv},
                {"tokens_per_turn", s.tokens_per_turn},
                {"keywords_per_refined_q", s.keywords_per_refined_q},
                {"paragraphs_per_refined_q", s.paragraphs_per_refined_q}};
}

Turn decode_turn(const Json& j) {
    return Turn{require_string(j, "question"), optional_string(j, "response").value_or("")};
}

Conversation decode_conversation(const Json& j) {
    std::vector<Turn> turns;
    for (const Json& t : require_array(j, "turns")) turns.push_back(decode_turn(t));
    return Conversation(require_string(j, "id"), std::move(turns));
}

Paragraph decode_paragraph(const Json& j) {
    Paragraph p;
    p.text = require_string(j, "text");
    p.doc_id = require_string(j, "doc_id");
    p.index_in_doc = static_cast<int>(require_int(j, "index_in_doc"));
    p.doc_rank = static_cast<int>(optional_int(j, "doc_rank").value_or(1));
    p.source_url = optional_string(j, "source_url");
    return p;
}

ScoredParagraph decode_scored_paragraph(const Json& j) {
    ScoredParagraph s;
    s.paragraph = decode_paragraph(require(j, "paragraph"));
    s.recall_score = require_number(j, "recall_score");
    s.rerank_score = optional_number(j, "rerank_score");
    if (auto r = optional_int(j, "final_rank")) s.final_rank = static_cast<int>(*r);
    return s;
}

HelpfulnessVerdict decode_verdict(const Json& j) {
    return HelpfulnessVerdict{static_cast<int>(require_int(j, "paragraph_rank")), require_bool(j, "helpful"),
                              optional_string(j, "rationale")};
}

DatasetRecord decode_record(const Json& j) {
    DatasetRecord r;
    r.conv_id = require_string(j, "conv_id");
    r.turn_index = static_cast<int>(require_int(j, "turn_index"));
    for (const Json& t : require_array(j, "context")) r.context.push_back(decode_turn(t));
    r.question = require_string(j, "question");
    r.reformulated_question = require_string(j, "reformulated_question");
    for (const Json& k : require_array(j, "keywords")) {
        if (!k.is_string()) throw FormatError("field 'keywords': expected array of strings");
        r.keywords.push_back(k.get<std::string>());
    }
    for (const Json& p : require_array(j, "paragraphs")) {
        LabeledParagraph lp;
        lp.text = require_string(p, "text");
        lp.source_url = optional_string(p, "source_url");
        lp.helpful = require_bool(p, "helpful");
        if (auto v = optional_int(p, "votes")) lp.votes = static_cast<int>(*v);
        r.paragraphs.push_back(std::move(lp));
    }
    r.reference_response = require_string(j, "reference_response");
    return r;
}

}  // namespace convqa
