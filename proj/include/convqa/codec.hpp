#pragma once

// Structured-text encoding of the domain types. Encoders emit fields in
// declaration order; decoders throw FormatError naming the offending field.

#include <json.hpp>

#include "convqa/dataset.hpp"
#include "convqa/types.hpp"

namespace convqa {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json encode(const Turn& turn);
[[nodiscard]] Json encode(const Conversation& conversation);
[[nodiscard]] Json encode(const Paragraph& paragraph);
[[nodiscard]] Json encode(const ScoredParagraph& scored);
[[nodiscard]] Json encode(const HelpfulnessVerdict& verdict);
[[nodiscard]] Json encode(const LabeledParagraph& paragraph);
[[nodiscard]] Json encode(const DatasetRecord& record);
[[nodiscard]] Json encode(const DatasetStats& stats);

[[nodiscard]] Turn decode_turn(const Json& j);
[[nodiscard]] Conversation decode_conversation(const Json& j);
[[nodiscard]] Paragraph decode_paragraph(const Json& j);
[[nodiscard]] ScoredParagraph decode_scored_paragraph(const Json& j);
[[nodiscard]] HelpfulnessVerdict decode_verdict(const Json& j);
[[nodiscard]] DatasetRecord decode_record(const Json& j);

namespace codec {

// Field accessors shared by the decoders. Each throws FormatError("field
// '<name>': ...") on absence or type mismatch.
[[nodiscard]] const Json& require(const Json& j, const char* field);
[[nodiscard]] std::string require_string(const Json& j, const char* field);
[[nodiscard]] long long require_int(const Json& j, const char* field);
[[nodiscard]] double require_number(const Json& j, const char* field);
[[nodiscard]] bool require_bool(const Json& j, const char* field);
[[nodiscard]] std::optional<std::string> optional_string(const Json& j, const char* field);
[[nodiscard]] std::optional<long long> optional_int(const Json& j, const char* field);
[[nodiscard]] std::optional<double> optional_number(const Json& j, const char* field);
[[nodiscard]] const Json& require_array(const Json& j, const char* field);

}  // namespace codec
}  // namespace convqa
