#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace srl {

enum class InstrumentKind { Aslq, KnowledgeQuiz, Ues, Trust };

std::string_view to_string(InstrumentKind k) noexcept;
std::optional<InstrumentKind> instrument_kind_from(std::string_view s) noexcept;

struct ItemDef {
  std::string text;
  /// KnowledgeQuiz only.
  std::vector<std::string> options;
  std::optional<std::int64_t> answer_key;
};

/// Item numbers in `subscale_map` and `reverse_flags` are 1-based, matching
/// how questionnaires number their items.
struct Instrument {
  std::string instrument_id;
  InstrumentKind kind = InstrumentKind::Aslq;
  std::vector<ItemDef> items;
  std::int64_t scale_min = 1;
  std::int64_t scale_max = 7;
  std::map<std::size_t, std::string> subscale_map;
  std::set<std::size_t> reverse_flags;
};

struct ResponseSheet {
  std::string instrument_id;
  std::vector<std::int64_t> responses;
  std::string respondent_id;
  std::string timestamp;
};

struct ScoreReport {
  std::string instrument_id;
  std::string respondent_id;
  double overall = 0.0;
  std::map<std::string, double> subscales;
  std::optional<std::int64_t> correct_count;

  bool operator==(const ScoreReport&) const = default;
};

inline constexpr std::string_view kUesSubscales[] = {"FA", "PA", "AE", "RW"};

/// (min + max) - x; an involution on [min, max].
std::int64_t reverse_code(std::int64_t x, std::int64_t scale_min, std::int64_t scale_max) noexcept;

ScoreReport score_likert_mean(const Instrument& instrument, const ResponseSheet& sheet);
ScoreReport score_trust(const Instrument& instrument, const ResponseSheet& sheet);
ScoreReport score_ues(const Instrument& instrument, const ResponseSheet& sheet);
ScoreReport score_quiz(const Instrument& instrument, const ResponseSheet& sheet);

/// Dispatches on the instrument kind.
ScoreReport score(const Instrument& instrument, const ResponseSheet& sheet);

Instrument instrument_from_json(const nlohmann::json& j);
Instrument load_instrument(const std::filesystem::path& path);
/// Every *.json instrument in a directory, keyed by instrument_id.
std::map<std::string, Instrument> load_instruments(const std::filesystem::path& dir);

ResponseSheet sheet_from_json(const nlohmann::json& j);
nlohmann::json sheet_to_json(const ResponseSheet& sheet);
nlohmann::json report_to_json(const ScoreReport& report);
ScoreReport report_from_json(const nlohmann::json& j);

/// One CSV row: respondent_id,instrument_id,overall,FA,PA,AE,RW,correct_count.
/// Absent values are left empty.
std::string report_csv_header();
std::string report_csv_row(const ScoreReport& report);

}  // namespace srl
