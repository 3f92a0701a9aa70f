#include "convqa/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "convqa/codec.hpp"
#include "convqa/error.hpp"

namespace convqa {

std::vector<Violation> validate_record(const DatasetRecord& r) {
    std::vector<Violation> out;
    auto add = [&out](std::string field, std::string message) {
        out.push_back({std::move(field), std::move(message)});
    };

    if (trim(r.conv_id).empty()) add("conv_id", "conv_id is empty");
    if (r.turn_index != static_cast<int>(r.context.size()) + 1) {
        add("turn_index", "turn_index " + std::to_string(r.turn_index) + " != |context|+1 = " +
                              std::to_string(r.context.size() + 1));
    }
    for (std::size_t i = 0; i < r.context.size(); ++i) {
        const std::string field = "context[" + std::to_string(i) + "]";
        if (trim(r.context[i].question).empty()) add(field + ".question", "context question is empty");
        if (trim(r.context[i].response).empty()) add(field + ".response", "completed turn has an empty response");
    }
    if (trim(r.question).empty()) add("question", "question is empty");
    if (trim(r.reformulated_question).empty()) add("reformulated_question", "reformulated question is empty");

    std::set<std::string> seen;
    for (std::size_t i = 0; i < r.keywords.size(); ++i) {
        const std::string field = "keywords[" + std::to_string(i) + "]";
        std::string norm = normalize_whitespace(r.keywords[i]);
        if (norm.empty()) {
            add(field, "keyword is empty");
        } else if (!seen.insert(norm).second) {
            add(field, "duplicate keyword '" + norm + "'");
        }
    }

    for (std::size_t i = 0; i < r.paragraphs.size(); ++i) {
        const std::string field = "paragraphs[" + std::to_string(i) + "]";
        const LabeledParagraph& p = r.paragraphs[i];
        if (trim(p.text).empty()) add(field + ".text", "paragraph text is empty");
        if (p.votes) {
            if (*p.votes < 0 || *p.votes > 3) {
                add(field + ".votes", "votes must be in 0..3");
            } else if (p.helpful != (*p.votes >= 2)) {
                add(field + ".helpful", "helpful label contradicts majority vote");
            }
        }
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file " + path.string());

    std::vector<DatasetRecord> records;
    std::set<std::pair<std::string, int>> keys;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::string where = path.string() + " line " + std::to_string(line_no);

        DatasetRecord record;
        try {
            record = decode_record(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw FormatError(where + ": not a valid record: " + e.what());
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }

        if (auto violations = validate_record(record); !violations.empty()) {
            const Violation& v = violations.front();
            throw FormatError(where + ": record (conv_id=" + record.conv_id +
                              ", turn_index=" + std::to_string(record.turn_index) + ") field '" + v.field +
                              "': " + v.message);
        }
        if (!keys.emplace(record.conv_id, record.turn_index).second) {
            throw FormatError(where + ": duplicate record (conv_id=" + record.conv_id +
                              ", turn_index=" + std::to_string(record.turn_index) + ")");
        }
        records.push_back(std::move(record));
    }
    return records;
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write dataset file " + path.string());
    for (const DatasetRecord& r : records) out << encode(r).dump() << '\n';
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

DatasetStats dataset_stats(const std::vector<DatasetRecord>& records, TokenizerMode tokenizer) {
    if (records.empty()) throw Error("no records");

    // Longest record per conversation carries the full turn sequence.
    std::map<std::string, const DatasetRecord*> last_turn;
    long long keywords = 0;
    long long paragraphs = 0;
    for (const DatasetRecord& r : records) {
        keywords += static_cast<long long>(r.keywords.size());
        paragraphs += static_cast<long long>(r.paragraphs.size());
        auto [it, inserted] = last_turn.emplace(r.conv_id, &r);
        if (!inserted && r.turn_index > it->second->turn_index) it->second = &r;
    }

    long long turns = 0;
    long long tokens = 0;
    for (const auto& [id, r] : last_turn) {
        turns += r->turn_index;
        for (const Turn& t : r->context) {
            tokens += static_cast<long long>(count_tokens(t.question, tokenizer) + count_tokens(t.response, tokenizer));
        }
        tokens += static_cast<long long>(count_tokens(r->question, tokenizer) +
                                         count_tokens(r->reference_response, tokenizer));
    }
    DatasetStats s;
    s.num_conversations = static_cast<long>(last_turn.size());
    s.turns_per_conv = static_cast<double>(turns) / static_cast<double>(last_turn.size());
    s.tokens_per_turn = static_cast<double>(tokens) / static_cast<double>(turns);
    s.keywords_per_refined_q = static_cast<double>(keywords) / static_cast<double>(records.size());
    s.paragraphs_per_refined_q = static_cast<double>(paragraphs) / static_cast<double>(records.size());
    return s;
}

std::string format_stats_report(const DatasetStats& s) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%-22s %10ld\n%-22s %10.2f\n%-22s %10.2f\n%-22s %10.2f\n%-22s %10.2f\n",
                  "# Conv", s.num_conversations, "# Turns/Conv", s.turns_per_conv, "# Tokens/Turn",
                  s.tokens_per_turn, "# Keywords/Q'", s.keywords_per_refined_q, "# Paragraphs/Q'",
                  s.paragraphs_per_refined_q);
    return buf;
}

}  // namespace convqa
