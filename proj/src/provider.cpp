#include "kgov/provider.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace kgov::provider {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

MockProvider::MockProvider(const std::filesystem::path& script_dir) {
    if (!std::filesystem::is_directory(script_dir))
        throw ProviderError("mock script directory not found: " + script_dir.string());

    for (int step = 1;; ++step) {
        auto txt = script_dir / ("step-" + std::to_string(step) + ".txt");
        if (!std::filesystem::exists(txt)) break;
        std::string response = read_file(txt);

        auto state = script_dir / ("step-" + std::to_string(step) + ".state");
        if (std::filesystem::exists(state)) {
            std::string lines = read_file(state);
            while (!lines.empty() && lines.back() == '\n') lines.pop_back();
            if (!response.empty() && response.back() != '\n') response += "\n";
            response += "\n```STATE:\n" + lines + "\n```\n";
        }
        responses_.emplace(step, std::move(response));
    }
    if (responses_.empty())
        throw ProviderError("no step-<k>.txt scripts in " + script_dir.string());
}

std::string MockProvider::complete(const std::optional<std::string>&,
                                   const std::vector<ChatMessage>& history) {
    int step = 0;
    for (const auto& m : history)
        if (m.role == ChatMessage::Role::User) ++step;
    auto it = responses_.find(step);
    if (it == responses_.end())
        throw ProviderError("mock has no script for step " + std::to_string(step));
    return it->second;
}

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

} // namespace

HttpProvider::HttpProvider() {
    endpoint_ = env_or_empty("PROVIDER_ENDPOINT");
    model_ = env_or_empty("PROVIDER_MODEL");
    api_key_ = env_or_empty("PROVIDER_API_KEY");
    if (endpoint_.empty() || model_.empty())
        throw ProviderError("live provider requires PROVIDER_ENDPOINT and PROVIDER_MODEL");
}

std::string HttpProvider::complete(const std::optional<std::string>& system,
                                   const std::vector<ChatMessage>& history) {
    // split the endpoint into origin + path for httplib
    auto scheme_end = endpoint_.find("://");
    if (scheme_end == std::string::npos)
        throw ProviderError("PROVIDER_ENDPOINT must be an http(s) URL");
    auto path_start = endpoint_.find('/', scheme_end + 3);
    std::string origin =
        path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    json body;
    body["model"] = model_;
    json messages = json::array();
    if (system) messages.push_back({{"role", "system"}, {"content", *system}});
    for (const auto& m : history)
        messages.push_back({{"role", m.role == ChatMessage::Role::User ? "user" : "assistant"},
                            {"content", m.content}});
    body["messages"] = std::move(messages);

    std::string last_error;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        httplib::Client client(origin);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            if (res->status == 401 || res->status == 403) break; // credential: no retry helps
            continue;
        }
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("unexpected response shape: ") + e.what();
        }
    }
    throw ProviderError(last_error.empty() ? "provider failed" : last_error);
}

} // namespace kgov::provider
