#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace shnol {

// All library failures carry a stable machine-readable code next to the
// human-readable message, so callers can branch without parsing text.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace shnol
