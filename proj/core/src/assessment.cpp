#include "srl/assessment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srl/error.hpp"
#include "srl/json_reader.hpp"

namespace srl {

using nlohmann::json;

std::string_view to_string(InstrumentKind k) noexcept {
  switch (k) {
    case InstrumentKind::Aslq: return "aslq";
    case InstrumentKind::KnowledgeQuiz: return "knowledge_quiz";
    case InstrumentKind::Ues: return "ues";
    case InstrumentKind::Trust: return "trust";
  }
  return "?";
}

std::optional<InstrumentKind> instrument_kind_from(std::string_view s) noexcept {
  for (auto k : {InstrumentKind::Aslq, InstrumentKind::KnowledgeQuiz, InstrumentKind::Ues,
                 InstrumentKind::Trust}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::int64_t reverse_code(std::int64_t x, std::int64_t scale_min, std::int64_t scale_max) noexcept {
  return scale_min + scale_max - x;
}

namespace {

void check_kind(const Instrument& ins, InstrumentKind expected) {
  if (ins.kind != expected) {
    raise(ErrorCode::WrongInstrument, "instrument '" + ins.instrument_id + "' is " +
                                          std::string(to_string(ins.kind)) + ", not " +
                                          std::string(to_string(expected)));
  }
}

void check_sheet(const Instrument& ins, const ResponseSheet& sheet, bool likert) {
  if (!sheet.instrument_id.empty() && sheet.instrument_id != ins.instrument_id) {
    raise(ErrorCode::WrongInstrument,
          "sheet is for '" + sheet.instrument_id + "', not '" + ins.instrument_id + "'");
  }
  if (sheet.responses.size() != ins.items.size()) {
    raise(ErrorCode::LengthMismatch, "expected " + std::to_string(ins.items.size()) + " responses, got " +
                                         std::to_string(sheet.responses.size()));
  }
  if (!likert) return;
  for (std::size_t i = 0; i < sheet.responses.size(); ++i) {
    const auto v = sheet.responses[i];
    if (v < ins.scale_min || v > ins.scale_max) {
      raise(ErrorCode::OutOfRange, "response " + std::to_string(i + 1) + " is " + std::to_string(v) +
                                       ", outside " + std::to_string(ins.scale_min) + ".." +
                                       std::to_string(ins.scale_max));
    }
  }
}

std::int64_t coded(const Instrument& ins, const ResponseSheet& sheet, std::size_t index0) {
  const auto v = sheet.responses[index0];
  return ins.reverse_flags.count(index0 + 1) ? reverse_code(v, ins.scale_min, ins.scale_max) : v;
}

ScoreReport mean_report(const Instrument& ins, const ResponseSheet& sheet) {
  check_sheet(ins, sheet, true);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < sheet.responses.size(); ++i) sum += coded(ins, sheet, i);
  ScoreReport r;
  r.instrument_id = ins.instrument_id;
  r.respondent_id = sheet.respondent_id;
  r.overall = static_cast<double>(sum) / static_cast<double>(sheet.responses.size());
  return r;
}

}  // namespace

ScoreReport score_likert_mean(const Instrument& instrument, const ResponseSheet& sheet) {
  check_kind(instrument, InstrumentKind::Aslq);
  return mean_report(instrument, sheet);
}

ScoreReport score_trust(const Instrument& instrument, const ResponseSheet& sheet) {
  check_kind(instrument, InstrumentKind::Trust);
  return mean_report(instrument, sheet);
}

ScoreReport score_ues(const Instrument& instrument, const ResponseSheet& sheet) {
  check_kind(instrument, InstrumentKind::Ues);
  check_sheet(instrument, sheet, true);
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acc;  // sum, count
  for (std::size_t i = 0; i < sheet.responses.size(); ++i) {
    auto it = instrument.subscale_map.find(i + 1);
    if (it == instrument.subscale_map.end() ||
        std::find(std::begin(kUesSubscales), std::end(kUesSubscales), it->second) == std::end(kUesSubscales)) {
      raise(ErrorCode::UnmappedItem, "item " + std::to_string(i + 1) + " has no engagement subscale");
    }
    auto& [sum, count] = acc[it->second];
    sum += coded(instrument, sheet, i);
    ++count;
  }
  ScoreReport r;
  r.instrument_id = instrument.instrument_id;
  r.respondent_id = sheet.respondent_id;
  for (auto name : kUesSubscales) {
    auto it = acc.find(std::string(name));
    if (it == acc.end()) raise(ErrorCode::UnmappedItem, "subscale " + std::string(name) + " has no items");
    const double mean = static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
    r.subscales[std::string(name)] = mean;
    r.overall += mean;
  }
  return r;
}

ScoreReport score_quiz(const Instrument& instrument, const ResponseSheet& sheet) {
  check_kind(instrument, InstrumentKind::KnowledgeQuiz);
  check_sheet(instrument, sheet, false);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < sheet.responses.size(); ++i) {
    const auto& key = instrument.items[i].answer_key;
    if (key && sheet.responses[i] == *key) ++correct;
  }
  ScoreReport r;
  r.instrument_id = instrument.instrument_id;
  r.respondent_id = sheet.respondent_id;
  r.overall = static_cast<double>(correct);
  r.correct_count = correct;
  return r;
}

ScoreReport score(const Instrument& instrument, const ResponseSheet& sheet) {
  switch (instrument.kind) {
    case InstrumentKind::Aslq: return score_likert_mean(instrument, sheet);
    case InstrumentKind::Trust: return score_trust(instrument, sheet);
    case InstrumentKind::Ues: return score_ues(instrument, sheet);
    case InstrumentKind::KnowledgeQuiz: return score_quiz(instrument, sheet);
  }
  raise(ErrorCode::WrongInstrument, "unknown instrument kind");
}

Instrument instrument_from_json(const json& j) {
  ObjectReader r(j, "instrument");
  Instrument ins;
  ins.instrument_id = r.str("instrument_id");
  const auto kind_text = r.str("kind");
  const auto kind = instrument_kind_from(kind_text);
  if (!kind) r.fail("kind", "unknown instrument kind '" + kind_text + "'");
  ins.kind = *kind;
  r.optional("note");
  const bool quiz = ins.kind == InstrumentKind::KnowledgeQuiz;
  if (quiz) {
    if (r.optional("scale_min")) ins.scale_min = r.integer("scale_min");
    if (r.optional("scale_max")) ins.scale_max = r.integer("scale_max");
  } else {
    ins.scale_min = r.integer("scale_min");
    ins.scale_max = r.integer("scale_max");
    const auto expected_max = ins.kind == InstrumentKind::Ues ? 5 : 7;
    if (ins.scale_min != 1 || ins.scale_max != expected_max) {
      r.fail("scale_max", "scale must be 1.." + std::to_string(expected_max) + " for " + kind_text);
    }
  }
  const auto& items = r.array("items");
  if (items.empty()) r.fail("items", "an instrument needs at least one item");
  for (std::size_t i = 0; i < items.size(); ++i) {
    ObjectReader ir(items[i], r.child("items") + "[" + std::to_string(i) + "]");
    ItemDef item;
    item.text = ir.str("text");
    if (ir.optional("subscale")) ins.subscale_map[i + 1] = ir.str("subscale");
    if (ir.optional("reverse") && ir.boolean("reverse")) ins.reverse_flags.insert(i + 1);
    if (ir.optional("options")) item.options = ir.strings("options");
    if (ir.optional("answer")) item.answer_key = ir.integer("answer");
    ir.finish();
    if (quiz) {
      if (!item.answer_key) ir.fail("answer", "quiz items need an answer key");
      if (*item.answer_key < 0 || static_cast<std::size_t>(*item.answer_key) >= item.options.size()) {
        ir.fail("answer", "answer key must index one of the options");
      }
    } else if (!item.options.empty() || item.answer_key) {
      ir.fail("answer", "only quiz items carry options and answers");
    }
    ins.items.push_back(std::move(item));
  }
  r.finish();
  return ins;
}

Instrument load_instrument(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return instrument_from_json(j);
}

std::map<std::string, Instrument> load_instruments(const std::filesystem::path& dir) {
  std::map<std::string, Instrument> out;
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) raise(ErrorCode::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto ins = load_instrument(f);
    auto id = ins.instrument_id;
    if (!out.emplace(id, std::move(ins)).second) {
      raise(ErrorCode::SchemaError, "duplicate instrument id '" + id + "' in " + f.string());
    }
  }
  return out;
}

ResponseSheet sheet_from_json(const json& j) {
  ObjectReader r(j, "sheet", ErrorCode::InvalidPayload);
  ResponseSheet s;
  s.instrument_id = r.str_or("instrument_id", "");
  s.respondent_id = r.str_or("respondent_id", "");
  s.timestamp = r.str_or("timestamp", "");
  const auto& responses = r.array("responses");
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (!responses[i].is_number_integer()) {
      r.fail("responses", "response " + std::to_string(i + 1) + " is not an integer");
    }
    s.responses.push_back(responses[i].get<std::int64_t>());
  }
  r.optional("session_id");
  r.finish();
  return s;
}

json sheet_to_json(const ResponseSheet& sheet) {
  json j;
  j["instrument_id"] = sheet.instrument_id;
  j["respondent_id"] = sheet.respondent_id;
  j["responses"] = sheet.responses;
  if (!sheet.timestamp.empty()) j["timestamp"] = sheet.timestamp;
  return j;
}

json report_to_json(const ScoreReport& report) {
  json j;
  j["instrument_id"] = report.instrument_id;
  j["respondent_id"] = report.respondent_id;
  j["overall"] = report.overall;
  if (!report.subscales.empty()) j["subscales"] = report.subscales;
  if (report.correct_count) j["correct_count"] = *report.correct_count;
  return j;
}

ScoreReport report_from_json(const json& j) {
  ObjectReader r(j, "report", ErrorCode::InvalidPayload);
  ScoreReport rep;
  rep.instrument_id = r.str("instrument_id");
  rep.respondent_id = r.str_or("respondent_id", "");
  const auto& overall = r.required("overall");
  if (!overall.is_number()) r.fail("overall", "must be a number");
  rep.overall = overall.get<double>();
  if (const auto* sub = r.optional("subscales")) {
    if (!sub->is_object()) r.fail("subscales", "must be an object");
    for (const auto& [k, v] : sub->items()) {
      if (!v.is_number()) r.fail("subscales", k + " must be a number");
      rep.subscales[k] = v.get<double>();
    }
  }
  if (r.optional("correct_count")) rep.correct_count = r.integer("correct_count");
  r.finish();
  return rep;
}

namespace {

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv_header() { return "respondent_id,instrument_id,overall,FA,PA,AE,RW,correct_count"; }

std::string report_csv_row(const ScoreReport& report) {
  std::string row = csv_field(report.respondent_id) + "," + csv_field(report.instrument_id) + "," +
                    number(report.overall);
  for (auto name : kUesSubscales) {
    row += ",";
    if (auto it = report.subscales.find(std::string(name)); it != report.subscales.end()) {
      row += number(it->second);
    }
  }
  row += ",";
  if (report.correct_count) row += std::to_string(*report.correct_count);
  return row;
}

}  // namespace srl
