#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "convqa/tokenizer.hpp"
#include "convqa/types.hpp"

namespace convqa {

/// A retrieved paragraph with its human helpfulness label. `votes` is the
/// number of "useful" votes out of three annotators, when released.
struct LabeledParagraph {
    std::string text;
    std::optional<std::string> source_url;
    bool helpful = false;
    std::optional<int> votes;

    friend bool operator==(const LabeledParagraph&, const LabeledParagraph&) = default;
};

/// One annotated conversational turn.
struct DatasetRecord {
    std::string conv_id;
    int turn_index = 1;  // == context.size() + 1
    std::vector<Turn> context;
    std::string question;
    std::string reformulated_question;
    std::vector<std::string> keywords;
    std::vector<LabeledParagraph> paragraphs;
    std::string reference_response;

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct Violation {
    std::string field;    // e.g. "keywords[1]"
    std::string message;  // e.g. "keyword is empty"

    friend bool operator==(const Violation&, const Violation&) = default;
};

[[nodiscard]] std::vector<Violation> validate_record(const DatasetRecord& record);

/// Reads a line-delimited record file. Blank lines are skipped. Throws
/// FormatError naming the line (and field) of the first malformed or
/// invalid record, or of a duplicate (conv_id, turn_index).
[[nodiscard]] std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

/// One record per line, UTF-8, no escaping of non-ASCII text.
void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

/// Corpus-level averages over a dataset.
struct DatasetStats {
    long num_conversations = 0;
    double turns_per_conv = 0.0;
    double tokens_per_turn = 0.0;
    double keywords_per_refined_q = 0.0;
    double paragraphs_per_refined_q = 0.0;
};

/// Conversations are grouped by conv_id; each conversation's turns are taken
/// from its highest-numbered record (context plus final question/reference).
/// A turn's tokens are those of its question plus its response. Keyword and
/// paragraph averages are over records. Throws Error("no records") on empty
/// input.
[[nodiscard]] DatasetStats dataset_stats(const std::vector<DatasetRecord>& records, TokenizerMode tokenizer);

/// Aligned text table, values to two decimals.
[[nodiscard]] std::string format_stats_report(const DatasetStats& stats);

}  // namespace convqa
