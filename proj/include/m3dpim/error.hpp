#ifndef M3DPIM_ERROR_HPP
#define M3DPIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace m3dpim {

// Every error the library raises derives from Error; kind() is the stable
// machine-readable tag the CLI puts into its stderr JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& what) : Error("shape_error", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error("input_error", what) {}
};

struct PlacementError : Error {
    explicit PlacementError(const std::string& what) : Error("placement_error", what) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error("usage_error", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

}  // namespace m3dpim

#endif  // M3DPIM_ERROR_HPP
