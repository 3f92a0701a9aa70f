#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace convqa {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid dataset / corpus / config input.
class FormatError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// A template was rendered without all of its placeholders bound.
class TemplateError : public Error {
  public:
    using Error::Error;
};

/// HTTP failure after the retry policy gave up. `status` is 0 when no
/// response was received at all.
class TransportError : public Error {
  public:
    TransportError(const std::string& what, int status)
        : Error(what), status_(status) {}

    [[nodiscard]] int status() const noexcept { return status_; }

  private:
    int status_;
};

/// The scripted backend received a prompt no rule matches.
class UnmatchedPromptError : public Error {
  public:
    explicit UnmatchedPromptError(std::string prompt)
        : Error("no scripted rule matches prompt: " + prompt), prompt_(std::move(prompt)) {}

    [[nodiscard]] const std::string& prompt() const noexcept { return prompt_; }

  private:
    std::string prompt_;
};

/// Failure inside one pipeline stage. `role` is empty for stages that do not
/// call a model.
class StageError : public Error {
  public:
    StageError(std::string stage, std::string role, const std::string& cause)
        : Error("stage '" + stage + "' failed" + (role.empty() ? "" : " (role=" + role + ")") + ": " +
                cause),
          stage_(std::move(stage)), role_(std::move(role)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    [[nodiscard]] const std::string& role() const noexcept { return role_; }

  private:
    std::string stage_;
    std::string role_;
};

/// A turn was requested on a session that is already answering one.
class SessionBusyError : public Error {
  public:
    explicit SessionBusyError(const std::string& session_id)
        : Error("session " + session_id + " is busy with another turn") {}
};

}  // namespace convqa
