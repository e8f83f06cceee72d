#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

/// Failure classes surfaced by the library. The CLI maps each class onto a
/// distinct exit code.
enum class ErrorKind {
    shape,
    config,
    data,
    state,
    domain,
    divergence,
    network,
    integrity,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error shape_error(const std::string& what) { return {ErrorKind::shape, what}; }
inline Error config_error(const std::string& what) { return {ErrorKind::config, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::data, what}; }
inline Error state_error(const std::string& what) { return {ErrorKind::state, what}; }
inline Error domain_error(const std::string& what) { return {ErrorKind::domain, what}; }
inline Error network_error(const std::string& what) { return {ErrorKind::network, what}; }
inline Error integrity_error(const std::string& what) { return {ErrorKind::integrity, what}; }

} // namespace wavecast
