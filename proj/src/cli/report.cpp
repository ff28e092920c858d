#include <sstream>

#include <json.hpp>

#include "p2sc/cli.hpp"

namespace p2sc::cli {

namespace {

using nlohmann::json;

const char* kind_name(ErrorKind k) {
  switch (k) {
  case ErrorKind::Io:
    return "io";
  case ErrorKind::Parse:
    return "parse";
  case ErrorKind::Validation:
    return "validation";
  case ErrorKind::Usage:
    return "usage";
  case ErrorKind::Internal:
    return "internal";
  }
  return "internal";
}

json maybe_parse(const std::string& s) { return s.empty() ? json(nullptr) : json::parse(s); }

} // namespace

const char* mode_name(Mode m) {
  switch (m) {
  case Mode::PowerTranslate:
    return "power-translate";
  case Mode::PowerOracle:
    return "power-oracle";
  case Mode::Sc:
    return "sc";
  case Mode::Diff:
    return "diff";
  }
  return "";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::PowerTranslate, Mode::PowerOracle, Mode::Sc, Mode::Diff})
    if (s == mode_name(m))
      return m;
  return std::nullopt;
}

const char* diff_status_name(DiffStatus s) {
  switch (s) {
  case DiffStatus::Pass:
    return "PASS";
  case DiffStatus::Fail:
    return "FAIL";
  case DiffStatus::Inconclusive:
    return "INCONCLUSIVE";
  }
  return "";
}

int exit_code(const Report& r) {
  if (!r.diagnostics.empty())
    return static_cast<int>(r.diagnostics.front().kind);
  if (r.diff) {
    switch (*r.diff) {
    case DiffStatus::Pass:
      return 0;
    case DiffStatus::Inconclusive:
      return 2;
    case DiffStatus::Fail:
      return 3;
    }
  }
  if (r.results.empty())
    return static_cast<int>(ErrorKind::Internal);
  const auto& res = r.results.front();
  if (res.reachable)
    return 1;
  return res.bounded_out ? 2 : 0;
}

std::string report_to_json(const Report& r) {
  json doc{{"schema", 1}, {"command", r.command}, {"input", r.input}};
  doc["mode"] = r.mode ? json(mode_name(*r.mode)) : json(nullptr);
  doc["k"] = r.k;
  doc["targets"] = r.targets;
  auto results = json::array();
  for (const auto& e : r.results)
    results.push_back({{"engine", e.engine},
                       {"reachable", e.reachable},
                       {"boundedOut", e.bounded_out},
                       {"witness", maybe_parse(e.witness_json)},
                       {"stats", maybe_parse(e.stats_json)},
                       {"seconds", e.seconds}});
  doc["results"] = std::move(results);
  doc["diff"] = r.diff ? json(diff_status_name(*r.diff)) : json(nullptr);
  auto diags = json::array();
  for (const auto& d : r.diagnostics) {
    json j{{"kind", kind_name(d.kind)}, {"message", d.message}};
    if (d.line > 0) {
      j["line"] = d.line;
      j["column"] = d.column;
    }
    if (!d.label.empty())
      j["label"] = d.label;
    diags.push_back(std::move(j));
  }
  doc["diagnostics"] = std::move(diags);
  doc["exitCode"] = exit_code(r);
  return doc.dump(2);
}

std::string report_to_text(const Report& r) {
  std::ostringstream out;
  for (const auto& d : r.diagnostics) {
    out << "error";
    if (!r.input.empty())
      out << ": " << r.input;
    if (d.line > 0)
      out << ":" << d.line << ":" << d.column;
    out << ": " << d.message;
    if (!d.label.empty())
      out << " (at " << d.label << ")";
    out << "\n";
  }
  for (const auto& e : r.results) {
    out << e.engine << ": " << (e.reachable ? "reachable" : "unreachable");
    if (e.bounded_out)
      out << " (search bounded out)";
    out << " at k=" << r.k << "\n";
    if (!e.stats_json.empty())
      out << "  stats " << e.stats_json << "\n";
    if (!e.witness_json.empty())
      out << "  witness " << e.witness_json << "\n";
  }
  if (r.diff)
    out << "diff: " << diff_status_name(*r.diff) << "\n";
  return out.str();
}

} // namespace p2sc::cli
