#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <regex>

#include "symdiff/pipeline/llm.hpp"

namespace symdiff::pipeline {

HttpClient::HttpClient(std::string endpoint, std::string model, std::string token_env, std::size_t budget,
                       int timeout_seconds)
    : model_(std::move(model)), token_env_(std::move(token_env)), budget_(budget), timeout_(timeout_seconds) {
  static const std::regex re(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, re))
    throw LlmError("endpoint '" + endpoint + "' must look like http://host[:port]/path");
  host_ = m[1].str();
  if (m[2].matched) port_ = std::stoi(m[2].str());
  path_ = m[3].matched ? m[3].str() : "/";
}

std::string HttpClient::complete(const std::string& prompt) {
  httplib::Client cli(host_, port_);
  cli.set_read_timeout(timeout_, 0);
  cli.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (const char* tok = std::getenv(token_env_.c_str()); tok && *tok)
    headers.emplace("Authorization", std::string("Bearer ") + tok);
  nlohmann::json body = {{"model", model_},
                         {"temperature", 0},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw LlmError("request to " + host_ + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw LlmError("endpoint returned HTTP " + std::to_string(res->status));
  try {
    const auto j = nlohmann::json::parse(res->body);
    if (j.contains("choices")) return j.at("choices").at(0).at("message").at("content").get<std::string>();
    return j.at("response").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmError(std::string("unexpected response body: ") + e.what());
  }
}

}  // namespace symdiff::pipeline
