#include "scenfuzz/prompt.h"

#include <fstream>
#include <map>
#include <sstream>

#include "scenfuzz/error.h"
#include "scenfuzz/text.h"

namespace scenfuzz {
namespace {

constexpr std::string_view kSeedSlot = "{{seed}}";
constexpr std::string_view kFeedbackSlot = "{{feedback}}";
constexpr std::string_view kExperienceSlot = "{{experience}}";

Error TemplateError(const std::string& what) {
  return Error(ErrorCode::kConfig, "prompt template: " + what);
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string JoinTrimmed(const std::vector<std::string_view>& lines) {
  size_t first = 0;
  size_t last = lines.size();
  while (first < last && Trim(lines[first]).empty()) ++first;
  while (last > first && Trim(lines[last - 1]).empty()) --last;
  std::string out;
  for (size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<std::string> ListItems(const std::string& section,
                                   const std::vector<std::string_view>& lines) {
  std::vector<std::string> items;
  for (std::string_view line : lines) {
    line = Trim(line);
    if (line.empty()) continue;
    if (line.substr(0, 2) != "- ") {
      throw TemplateError("[[" + section + "]] lines must start with '- '");
    }
    items.emplace_back(Trim(line.substr(2)));
  }
  return items;
}

void ReplaceAll(std::string& text, std::string_view slot,
                const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(slot, pos)) != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos += value.size();
  }
}

}  // namespace

PromptTemplate ParsePromptTemplate(std::string_view text) {
  std::map<std::string, std::vector<std::string_view>> sections;
  std::string current;
  for (std::string_view line : SplitLines(text)) {
    const std::string_view trimmed = Trim(line);
    if (trimmed.size() > 4 && trimmed.substr(0, 2) == "[[" &&
        trimmed.substr(trimmed.size() - 2) == "]]") {
      current = std::string(trimmed.substr(2, trimmed.size() - 4));
      if (sections.count(current)) {
        throw TemplateError("duplicate section [[" + current + "]]");
      }
      sections[current];
      continue;
    }
    if (current.empty()) {
      if (!trimmed.empty()) throw TemplateError("text before the first section");
      continue;
    }
    sections[current].push_back(line);
  }

  PromptTemplate tmpl;
  tmpl.output_format_marker.clear();
  for (const auto& [name, lines] : sections) {
    if (name == "role_assignment") {
      tmpl.role_assignment = JoinTrimmed(lines);
    } else if (name == "task_introduction") {
      tmpl.task_introduction = JoinTrimmed(lines);
    } else if (name == "overview") {
      tmpl.overview = JoinTrimmed(lines);
    } else if (name == "entity_information") {
      tmpl.entity_information = JoinTrimmed(lines);
    } else if (name == "state_description") {
      for (const std::string& item : ListItems(name, lines)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          throw TemplateError("state_description item '" + item +
                              "' needs 'name: description'");
        }
        tmpl.state_description.push_back(
            {std::string(Trim(std::string_view(item).substr(0, colon))),
             std::string(Trim(std::string_view(item).substr(colon + 1)))});
      }
    } else if (name == "constraints") {
      tmpl.constraints = ListItems(name, lines);
    } else if (name == "generation_workflow") {
      for (std::string_view line : lines) {
        line = Trim(line);
        if (!line.empty()) tmpl.generation_workflow.emplace_back(line);
      }
    } else if (name == "output_format_marker") {
      tmpl.output_format_marker = JoinTrimmed(lines);
    } else if (name == "input") {
      tmpl.input = JoinTrimmed(lines);
    } else {
      throw TemplateError("unknown section [[" + name + "]]");
    }
  }
  return tmpl;
}

PromptTemplate LoadPromptTemplate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open prompt template " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePromptTemplate(buffer.str());
}

std::vector<std::string> CheckTemplate(const PromptTemplate& tmpl,
                                       const ScenarioSpace& space) {
  std::vector<std::string> problems;
  const std::pair<const char*, const std::string*> blocks[] = {
      {"role_assignment", &tmpl.role_assignment},
      {"task_introduction", &tmpl.task_introduction},
      {"overview", &tmpl.overview},
      {"entity_information", &tmpl.entity_information},
      {"output_format_marker", &tmpl.output_format_marker},
      {"input", &tmpl.input}};
  for (const auto& [name, value] : blocks) {
    if (Trim(*value).empty()) problems.push_back(std::string(name) + " is empty");
  }
  if (tmpl.constraints.empty()) problems.push_back("constraints is empty");

  if (tmpl.state_description.size() != space.dims()) {
    problems.push_back("state_description describes " +
                       std::to_string(tmpl.state_description.size()) +
                       " dimensions, scenario space has " +
                       std::to_string(space.dims()));
  } else {
    for (size_t i = 0; i < space.dims(); ++i) {
      if (tmpl.state_description[i].name != space.dim_names()[i]) {
        problems.push_back("state_description item " + std::to_string(i) +
                           " is '" + tmpl.state_description[i].name +
                           "', expected '" + space.dim_names()[i] + "'");
      }
      if (tmpl.state_description[i].description.empty()) {
        problems.push_back("state_description item " + std::to_string(i) +
                           " has no description");
      }
    }
  }

  constexpr size_t kSteps = std::size(kWorkflowSteps);
  if (tmpl.generation_workflow.size() != kSteps) {
    problems.push_back("generation_workflow needs exactly " +
                       std::to_string(kSteps) + " steps");
  } else {
    for (size_t i = 0; i < kSteps; ++i) {
      const std::string expected =
          std::to_string(i + 1) + ". " + std::string(kWorkflowSteps[i]);
      if (tmpl.generation_workflow[i].rfind(expected, 0) != 0) {
        problems.push_back("generation_workflow step " + std::to_string(i + 1) +
                           " must start with '" + expected + "'");
      }
    }
  }

  for (std::string_view slot : {kSeedSlot, kFeedbackSlot, kExperienceSlot}) {
    if (tmpl.input.find(slot) == std::string::npos) {
      problems.push_back("input block lacks the " + std::string(slot) + " slot");
    }
  }
  return problems;
}

std::string RenderSeed(const ScenarioSpace& space,
                       std::span<const double> params) {
  std::string out;
  for (size_t i = 0; i < params.size(); ++i) {
    out += space.dim_names()[i] + " = " + FormatDouble(params[i]) + "\n";
  }
  out += std::string(kSeedScenarioLabel) + " " + FormatVector(params);
  return out;
}

std::string RenderFeedback(const FeedbackLedger& feedback) {
  if (feedback.empty()) return "None";
  std::string out;
  for (const BadCase& bad : feedback.cases()) {
    if (!out.empty()) out += '\n';
    out += "- [" + std::string(BadCaseCategoryName(bad.category)) +
           "] seed: " + FormatVector(bad.seed_params);
    if (!bad.new_params.empty()) {
      out += " -> generated: " + FormatVector(bad.new_params);
    }
    out += " (" + bad.detail + ")";
  }
  return out;
}

std::string RenderExperience(const ExpertExperience& experience) {
  if (experience.plans.empty()) return "None";
  std::string out;
  for (const std::string& plan : experience.plans) {
    if (!out.empty()) out += '\n';
    out += "- " + plan;
  }
  return out;
}

std::string RenderPrompt(const PromptTemplate& tmpl, const ScenarioSpace& space,
                         std::span<const double> seed_params,
                         const FeedbackLedger& feedback,
                         const ExpertExperience& experience) {
  const std::vector<std::string> problems = CheckTemplate(tmpl, space);
  if (!problems.empty()) throw TemplateError(problems.front());
  if (seed_params.size() != space.dims()) {
    throw InvalidArgument("render_prompt: seed length does not match space");
  }

  std::string out;
  out += "# Role\n";
  out += tmpl.role_assignment + "\n" + tmpl.task_introduction + "\n\n";

  out += "## Scenario Information\n";
  out += "### Overview\n" + tmpl.overview + "\n";
  out += "### Entity Information\n" + tmpl.entity_information + "\n";
  out += "### State Description\n";
  for (const StateDimension& dim : tmpl.state_description) {
    out += "- " + dim.name + ": " + dim.description + "\n";
  }
  out += "### Constraints\n";
  for (const std::string& c : tmpl.constraints) out += "- " + c + "\n";
  out += "\n";

  std::string input = tmpl.input;
  // Experience and feedback first so text inside the seed cannot be
  // mistaken for a slot.
  ReplaceAll(input, kExperienceSlot, RenderExperience(experience));
  ReplaceAll(input, kFeedbackSlot, RenderFeedback(feedback));
  ReplaceAll(input, kSeedSlot, RenderSeed(space, seed_params));
  out += "## Input\n" + input + "\n\n";

  out += "## Output\n";
  out += "Work through the following steps:\n";
  for (const std::string& step : tmpl.generation_workflow) out += step + "\n";
  out += "Output the new scenario on a single line, with the parameters in "
         "the same order as the seed scenario:\n";
  out += tmpl.output_format_marker + " [";
  for (size_t i = 0; i < space.dims(); ++i) {
    if (i) out += ", ";
    out += "<" + space.dim_names()[i] + ">";
  }
  out += "]\n";
  out += "Then briefly explain the scenario you generated.\n";
  return out;
}

std::string_view ParseErrorKindName(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kMarkerMissing:
      return "MarkerMissing";
    case ParseError::Kind::kArityMismatch:
      return "ArityMismatch";
    case ParseError::Kind::kNumberParseFailure:
      return "NumberParseFailure";
    case ParseError::Kind::kOutOfBounds:
      return "OutOfBounds";
    case ParseError::Kind::kConstraintViolation:
      return "ConstraintViolation";
  }
  return "?";
}

ParseResult ParseScenarioResponse(std::string_view response,
                                  const ScenarioSpace& space,
                                  std::string_view marker,
                                  const ConstraintHook& hook) {
  using Kind = ParseError::Kind;
  const size_t at = marker.empty() ? std::string_view::npos : response.rfind(marker);
  if (at == std::string_view::npos) {
    return ParseError{Kind::kMarkerMissing, -1,
                      "response lacks '" + std::string(marker) + "'", {}};
  }
  std::string_view rest = response.substr(at + marker.size());
  // Tolerate markdown emphasis/code fences between marker and list.
  const size_t open = rest.find_first_not_of(" \t*`");
  if (open == std::string_view::npos || rest[open] != '[') {
    return ParseError{Kind::kNumberParseFailure, -1,
                      "no bracketed list after marker", {}};
  }
  const size_t close = rest.find(']', open);
  if (close == std::string_view::npos) {
    return ParseError{Kind::kNumberParseFailure, -1, "unterminated list", {}};
  }
  const std::string_view body = rest.substr(open + 1, close - open - 1);

  std::vector<double> values;
  if (!Trim(body).empty()) {
    size_t start = 0;
    while (true) {
      const size_t comma = body.find(',', start);
      const std::string_view token = body.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start);
      const std::optional<double> v = ParseDouble(token);
      if (!v) {
        return ParseError{Kind::kNumberParseFailure, -1,
                          "cannot parse '" + std::string(Trim(token)) +
                              "' as a number",
                          values};
      }
      values.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (values.size() != space.dims()) {
    return ParseError{Kind::kArityMismatch, -1,
                      "expected " + std::to_string(space.dims()) +
                          " values, got " + std::to_string(values.size()),
                      values};
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < space.lower()[i] || values[i] > space.upper()[i]) {
      return ParseError{Kind::kOutOfBounds, static_cast<int>(i),
                        space.dim_names()[i] + " = " + FormatDouble(values[i]) +
                            " outside [" + FormatDouble(space.lower()[i]) +
                            ", " + FormatDouble(space.upper()[i]) + "]",
                        values};
    }
  }
  if (hook) {
    if (auto violation = hook(values)) {
      return ParseError{Kind::kConstraintViolation, -1, *violation, values};
    }
  }
  return Scenario{0, std::move(values), std::nullopt, Origin::kLlmMutation};
}

}  // namespace scenfuzz
