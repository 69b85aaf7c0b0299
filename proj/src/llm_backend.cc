#include "scenfuzz/llm_backend.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "scenfuzz/coop_nav.h"
#include "scenfuzz/prompt.h"
#include "scenfuzz/text.h"

namespace scenfuzz {
namespace {

using json = nlohmann::json;

// Models answer with "typical" numbers rather than arbitrary precision.
double RoundTo(double value, double step) {
  return std::round(value / step) * step;
}

std::optional<std::vector<double>> FindSeed(std::string_view prompt) {
  const size_t at = prompt.rfind(kSeedScenarioLabel);
  if (at == std::string_view::npos) return std::nullopt;
  std::string_view rest = prompt.substr(at + kSeedScenarioLabel.size());
  const size_t open = rest.find('[');
  const size_t close = rest.find(']');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return std::nullopt;
  }
  std::string_view body = rest.substr(open + 1, close - open - 1);
  std::vector<double> values;
  while (!body.empty()) {
    const size_t comma = body.find(',');
    auto v = ParseDouble(body.substr(0, comma));
    if (!v) return std::nullopt;
    values.push_back(*v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return values;
}

std::map<std::string, HeuristicBackend::Strategy>& Strategies() {
  static auto* strategies = new std::map<std::string, HeuristicBackend::Strategy>{
      {"collision-avoidance-2d", &CollisionCourseEdit},
      {"coop-nav", &CoopNavCrossingEdit},
  };
  return *strategies;
}

std::mutex& StrategiesMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

uint64_t HashText(std::string_view text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

MockBackend::MockBackend(std::vector<std::string> responses)
    : responses_(std::move(responses)) {
  if (responses_.empty()) throw InvalidArgument("mock backend needs responses");
}

std::string MockBackend::Complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  const std::string& out = responses_[std::min(next_, responses_.size() - 1)];
  ++next_;
  return out;
}

std::vector<ChatRequest> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

HeuristicBackend::HeuristicBackend(const std::string& env_name)
    : env_name_(env_name) {
  std::lock_guard lock(StrategiesMutex());
  auto it = Strategies().find(env_name);
  if (it == Strategies().end()) {
    throw Error(ErrorCode::kConfig,
                "heuristic backend has no strategy for '" + env_name + "'");
  }
  strategy_ = it->second;
}

HeuristicBackend::HeuristicBackend(std::string env_name, Strategy strategy)
    : env_name_(std::move(env_name)), strategy_(std::move(strategy)) {}

void HeuristicBackend::RegisterStrategy(const std::string& env_name,
                                        Strategy strategy) {
  std::lock_guard lock(StrategiesMutex());
  Strategies()[env_name] = std::move(strategy);
}

bool HeuristicBackend::HasStrategy(const std::string& env_name) {
  std::lock_guard lock(StrategiesMutex());
  return Strategies().count(env_name) > 0;
}

std::string HeuristicBackend::Complete(const ChatRequest& request) {
  std::string prompt;
  for (const ChatMessage& m : request.messages) {
    if (m.role == "user") prompt = m.content;
  }
  const std::optional<std::vector<double>> seed = FindSeed(prompt);
  if (!seed) {
    return "Scenario Analysis: the prompt does not contain a seed scenario, "
           "so no new scenario can be produced.";
  }
  const std::vector<double> edited = strategy_(*seed, HashText(prompt));
  std::string out;
  out += "Scenario Analysis: seed parameters " + FormatVector(*seed) + ".\n";
  out += "Evolution Prediction: without intervention the entities keep "
         "their current courses.\n";
  out += "Challenge Analysis: the policy reacts late to entities whose paths "
         "converge with its own.\n";
  out += "Plan Generation: move the relevant parameters so the paths meet.\n";
  out += "Plan Execution: parameters updated.\n";
  out += std::string(kDefaultOutputMarker) + " " + FormatVector(edited) + "\n";
  out += "Explanation: the " + env_name_ +
         " entities are placed on converging paths.\n";
  return out;
}

std::vector<double> CollisionCourseEdit(const std::vector<double>& seed,
                                        uint64_t salt) {
  if (seed.size() != 5) return seed;
  const double x = seed[0];
  const double y = seed[1];
  const double own_speed = seed[3];
  double int_speed = seed[4];
  // Occasionally push the intruder to full speed to shorten reaction time.
  if (salt % 3 == 0) int_speed = 200.0;

  // Earliest t > 0 with |(own_speed * t - x, -y)| = int_speed * t.
  auto intercept_time = [&](double vi) -> std::optional<double> {
    const double a = own_speed * own_speed - vi * vi;
    const double b = -2.0 * x * own_speed;
    const double c = x * x + y * y;
    if (std::abs(a) < 1e-9) {
      const double t = c / (-b);
      return t > 0 ? std::optional<double>(t) : std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double r = std::sqrt(disc);
    double best = -1.0;
    for (double t : {(-b - r) / (2.0 * a), (-b + r) / (2.0 * a)}) {
      if (t > 0.0 && (best < 0.0 || t < best)) best = t;
    }
    return best > 0.0 ? std::optional<double>(best) : std::nullopt;
  };

  std::optional<double> t = intercept_time(int_speed);
  if (!t) {
    int_speed = std::min(200.0, std::ceil(own_speed / 10.0) * 10.0);
    t = intercept_time(int_speed);
  }
  if (!t) return seed;
  const double heading = std::atan2(-y, own_speed * *t - x);
  return {RoundTo(x, 10.0), RoundTo(y, 10.0),
          std::clamp(RoundTo(heading, 0.01), -std::numbers::pi, std::numbers::pi),
          RoundTo(own_speed, 1.0), RoundTo(int_speed, 1.0)};
}

std::vector<double> CoopNavCrossingEdit(const std::vector<double>& seed,
                                        uint64_t salt) {
  constexpr int kN = CoopNavEnv::kAgents;
  if (seed.size() != 4 * kN) return seed;
  CoopNavEnv env;
  const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
  const double spares[][2] = {{-0.9, -0.9}, {0.9, -0.9}, {-0.9, 0.9},
                              {0.9, 0.9},   {0.0, -0.9}, {0.0, 0.9},
                              {-0.9, 0.0},  {0.9, 0.0}};
  const int first_pair = static_cast<int>(salt % 3);
  const int landmark_shift = static_cast<int>((salt / 3) % 3);

  for (double shrink : {1.0, 0.5}) {
    std::vector<double> agents(seed.begin(), seed.begin() + 2 * kN);
    for (double& v : agents) v = RoundTo(v * shrink, 0.01);
    for (int p = 0; p < 3; ++p) {
      const auto [a, b] = pairs[(first_pair + p) % 3];
      const double ax = agents[2 * a], ay = agents[2 * a + 1];
      const double bx = agents[2 * b], by = agents[2 * b + 1];
      const double d = std::hypot(bx - ax, by - ay);
      if (d < 0.2) continue;
      const double ux = (bx - ax) / d, uy = (by - ay) / d;
      for (double overshoot : {0.15, 0.3}) {
        // a's target lies just past b; b's target lies behind a, far enough
        // that a still prefers its own.
        const double behind = d + overshoot + 0.15;
        const double target_a[2] = {bx + ux * overshoot, by + uy * overshoot};
        const double target_b[2] = {ax - ux * behind, ay - uy * behind};
        for (const auto& spare : spares) {
          const double* placed[3] = {target_a, target_b, spare};
          std::vector<double> layout = agents;
          layout.resize(4 * kN);
          for (int k = 0; k < 3; ++k) {
            const int slot = (k + landmark_shift) % 3;
            layout[2 * kN + 2 * slot] = RoundTo(placed[k][0], 0.01);
            layout[2 * kN + 2 * slot + 1] = RoundTo(placed[k][1], 0.01);
          }
          if (!Validate(env.space(), layout, env.constraint_hook())) continue;
          env.Reset(layout);
          const auto assignment = env.Assignment();
          if (assignment[a] == landmark_shift % 3 &&
              assignment[b] == (1 + landmark_shift) % 3) {
            return layout;
          }
        }
      }
    }
  }
  return seed;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.base_url, m, kUrl)) {
    throw Error(ErrorCode::kConfig,
                "llm.base_url must look like http(s)://host[:port][/path], got '" +
                    options_.base_url + "'");
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

std::string HttpBackend::RequestBody(const ChatRequest& request) const {
  json messages = json::array();
  for (const ChatMessage& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return json{{"model", options_.model},
              {"messages", messages},
              {"temperature", request.temperature}}
      .dump();
}

std::string HttpBackend::ExtractContent(std::string_view response_body) {
  const json body = json::parse(response_body, nullptr, false);
  if (body.is_discarded()) {
    throw Error(ErrorCode::kGeneration, "chat completion: response is not JSON");
  }
  const json* content = nullptr;
  if (body.contains("choices") && body["choices"].is_array() &&
      !body["choices"].empty()) {
    const json& choice = body["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      content = &choice["message"]["content"];
    }
  }
  if (!content) {
    throw Error(ErrorCode::kGeneration,
                "chat completion: missing choices[0].message.content");
  }
  return content->get<std::string>();
}

std::string HttpBackend::Complete(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const std::string body = RequestBody(request);
  const std::string path = path_prefix_ + "/chat/completions";

  std::chrono::milliseconds backoff = options_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    httplib::Result res = client.Post(path, headers, body, "application/json");
    if (!res) {
      throw TransportError("chat completion: " +
                           httplib::to_string(res.error()) + " (" +
                           scheme_host_port_ + ")");
    }
    const int status = res->status;
    if (status == 200) return ExtractContent(res->body);
    const bool retryable = status == 429 || status >= 500;
    if (!retryable) {
      throw Error(ErrorCode::kBackendUnreachable,
                  "chat completion: HTTP " + std::to_string(status));
    }
    if (attempt >= options_.max_retries) {
      throw TransportError("chat completion: HTTP " + std::to_string(status) +
                           " after " + std::to_string(attempt) + " retries");
    }
    options_.sleep(backoff);
    backoff *= 2;
  }
}

}  // namespace scenfuzz
