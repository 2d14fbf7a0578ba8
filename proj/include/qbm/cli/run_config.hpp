#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbm/bath_models.hpp"
#include "qbm/diffusion_observables.hpp"
#include "qbm/oscillatory_quadrature.hpp"
#include "qbm/thermal.hpp"

namespace qbm::cli {

enum class Observable { Msd, MsdRate, Correlation, Commutator, Width };
enum class Mode { Exact, Asymptotic };
enum class UnitSystem { Natural, Si, Explicit };

std::string to_string(Observable o);
std::string to_string(Mode m);
std::string to_string(UnitSystem u);

// Raised for malformed or inconsistent configuration. `field` names the
// dotted key, `line` is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, std::size_t line, const std::string& message);
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

struct Entry {
    std::string key;
    std::string value;
    std::size_t line{0};  // 0 = command line
};

// `key = value` lines; '#' starts a comment.
std::vector<Entry> parse_key_values(std::istream& in);

struct RunConfig {
    KernelParameters model;
    bool zero_temperature{true};
    double temperature{0.0};
    UnitSystem units{UnitSystem::Natural};
    double hbar{1.0};
    double kB{1.0};
    double t_min{0.0};
    double t_max{0.0};
    std::size_t n_points{0};
    Spacing spacing{Spacing::Log};
    quad::QuadratureSpec quadrature;
    Observable observable{Observable::Msd};
    Mode mode{Mode::Exact};
    std::optional<double> sigma1;
    std::optional<double> sigma2;
    std::string output{"-"};
    double tail_fraction{0.5};
    double slope_tol{0.02};
    std::size_t threads{0};  // 0 = hardware concurrency

    ThermalContext thermal() const;
    BathModel bath() const;  // throws DomainError for invalid parameters
    std::vector<double> grid() const;

    bool operator==(const RunConfig&) const = default;
};

enum class Purpose {
    Run,       // compute / asymptote: everything must be present and valid
    Validate,  // validate: only the model block is needed; ranges not enforced
};

// Applies entries in order (later keys win) and validates for `purpose`.
RunConfig build_config(const std::vector<Entry>& entries, Purpose purpose);

// Canonical key/value text; parsing it back yields an equal RunConfig.
std::string serialize(const RunConfig& config);

// Shortest round-trip decimal, '.' separator, locale independent.
std::string format_double(double v);

const std::vector<std::string>& known_keys();

} // namespace qbm::cli
