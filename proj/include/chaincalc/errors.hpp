#pragma once

#include <stdexcept>
#include <string>

namespace chaincalc {

// Every failure carries a stable machine-readable code next to the human
// message; the CLI maps codes to error JSON and exit status.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

} // namespace chaincalc
