#pragma once
// Chat-completion providers: the abstract contract, the scripted
// deterministic mock, and the environment-configured live HTTP client.

#include "kgov/errors.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgov::provider {

struct ChatMessage {
    enum class Role { User, Assistant };
    Role role = Role::User;
    std::string content;
};

// Implementations must not touch engine state; they turn an optional system
// text plus a role-tagged history into one assistant text.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    virtual std::string complete(const std::optional<std::string>& system,
                                 const std::vector<ChatMessage>& history) = 0;

    // Deterministic providers always answer identically for the same inputs;
    // the orchestrator keeps their transcripts byte-reproducible by recording
    // zero wall time.
    virtual bool deterministic() const { return false; }
};

// Scripted provider: answers step k (the k-th user message in the history)
// with the contents of step-<k>.txt. When step-<k>.state exists its lines are
// appended as a fenced STATE block, the discovery emission channel.
class MockProvider : public CompletionProvider {
public:
    explicit MockProvider(const std::filesystem::path& script_dir);

    std::string complete(const std::optional<std::string>& system,
                         const std::vector<ChatMessage>& history) override;
    bool deterministic() const override { return true; }

    int step_count() const { return static_cast<int>(responses_.size()); }

private:
    std::map<int, std::string> responses_;
};

// Live provider speaking the chat-completions wire format. Endpoint, model,
// and credential come from PROVIDER_ENDPOINT, PROVIDER_MODEL, and
// PROVIDER_API_KEY; credentials never travel through flags or files.
class HttpProvider : public CompletionProvider {
public:
    // Throws ProviderError when the environment is not configured.
    HttpProvider();

    std::string complete(const std::optional<std::string>& system,
                         const std::vector<ChatMessage>& history) override;

    int retries = 1; // one retry on transport failure

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
};

} // namespace kgov::provider
