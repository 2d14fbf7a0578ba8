#include "qbm/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const Entry& e)
{
    if (e.key == "model.tau_e" && e.value == "tau_e")
        return units::tau_e_si;
    double v = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw ConfigError(e.key, e.line, "expected a finite real number, got '" + e.value + "'");
    return v;
}

std::size_t parse_count(const Entry& e)
{
    std::size_t v = 0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(e.key, e.line, "expected a non-negative integer, got '" + e.value + "'");
    return v;
}

template <class Enum>
Enum parse_enum(const Entry& e, std::initializer_list<std::pair<const char*, Enum>> options)
{
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (e.value == name)
            return value;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(e.key, e.line, "unknown value '" + e.value + "' (expected one of: " + allowed + ")");
}

struct Seen {
    std::vector<std::string> keys;
    std::vector<std::size_t> lines;
    bool has(const std::string& k) const { return std::find(keys.begin(), keys.end(), k) != keys.end(); }
    std::size_t line_of(const std::string& k) const
    {
        for (std::size_t i = keys.size(); i-- > 0;)
            if (keys[i] == k)
                return lines[i];
        return 0;
    }
};

} // namespace

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string("command line: ")) +
                         field + ": " + message),
      field_(std::move(field)),
      line_(line)
{
}

std::string to_string(Observable o)
{
    switch (o) {
    case Observable::Msd: return "msd";
    case Observable::MsdRate: return "msd-rate";
    case Observable::Correlation: return "correlation";
    case Observable::Commutator: return "commutator";
    case Observable::Width: return "width";
    }
    return "msd";
}

std::string to_string(Mode m) { return m == Mode::Exact ? "exact" : "asymptotic"; }

std::string to_string(UnitSystem u)
{
    switch (u) {
    case UnitSystem::Natural: return "natural";
    case UnitSystem::Si: return "si";
    case UnitSystem::Explicit: return "explicit";
    }
    return "natural";
}

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = {
        "model.kind",        "model.zeta",          "model.gamma",
        "model.b",           "model.m",             "model.M",
        "model.tau_e",       "temperature",         "units",
        "units.hbar",        "units.kB",            "grid.t_min",
        "grid.t_max",        "grid.n_points",       "grid.spacing",
        "quadrature.rel_tol", "quadrature.abs_tol", "quadrature.max_half_periods",
        "quadrature.panel_order", "quadrature.accel_depth", "observable",
        "mode",              "width.sigma1",        "width.sigma2",
        "output",            "asymptote.tail_fraction", "asymptote.slope_tol",
        "threads",
    };
    return keys;
}

std::vector<Entry> parse_key_values(std::istream& in)
{
    std::vector<Entry> entries;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("<syntax>", line, "expected 'key = value'");
        Entry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
        if (e.key.empty())
            throw ConfigError("<syntax>", line, "empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

RunConfig build_config(const std::vector<Entry>& entries, Purpose purpose)
{
    RunConfig c;
    c.model = KernelParameters{};
    c.model.kind.clear();
    Seen seen;
    std::optional<std::string> temperature_text;

    for (const auto& e : entries) {
        const auto& k = e.key;
        if (std::find(known_keys().begin(), known_keys().end(), k) == known_keys().end())
            throw ConfigError(k, e.line, "unknown key");
        if (e.value.empty())
            throw ConfigError(k, e.line, "missing value");
        seen.keys.push_back(k);
        seen.lines.push_back(e.line);

        if (k == "model.kind") {
            c.model.kind = parse_enum<std::string>(e, {{"ohmic", "ohmic"},
                                                       {"power-law", "power-law"},
                                                       {"harmonic", "harmonic"},
                                                       {"qed", "qed"},
                                                       {"free", "free"}});
        } else if (k == "model.zeta") {
            c.model.zeta = parse_real(e);
        } else if (k == "model.gamma") {
            c.model.gamma = parse_real(e);
        } else if (k == "model.b") {
            c.model.b = parse_real(e);
        } else if (k == "model.m") {
            c.model.m = parse_real(e);
        } else if (k == "model.M") {
            c.model.M = parse_real(e);
        } else if (k == "model.tau_e") {
            c.model.tau_e = parse_real(e);
        } else if (k == "temperature") {
            if (e.value == "zero") {
                c.zero_temperature = true;
                c.temperature = 0.0;
            } else {
                c.temperature = parse_real(e);
                if (c.temperature < 0.0)
                    throw ConfigError(k, e.line, "temperature must be >= 0 or 'zero'");
                c.zero_temperature = c.temperature == 0.0;
            }
            temperature_text = e.value;
        } else if (k == "units") {
            c.units = parse_enum<UnitSystem>(
                e, {{"natural", UnitSystem::Natural}, {"si", UnitSystem::Si}, {"explicit", UnitSystem::Explicit}});
        } else if (k == "units.hbar") {
            c.hbar = parse_real(e);
        } else if (k == "units.kB") {
            c.kB = parse_real(e);
        } else if (k == "grid.t_min") {
            c.t_min = parse_real(e);
        } else if (k == "grid.t_max") {
            c.t_max = parse_real(e);
        } else if (k == "grid.n_points") {
            c.n_points = parse_count(e);
        } else if (k == "grid.spacing") {
            c.spacing = parse_enum<Spacing>(e, {{"linear", Spacing::Linear}, {"log", Spacing::Log}});
        } else if (k == "quadrature.rel_tol") {
            c.quadrature.rel_tol = parse_real(e);
        } else if (k == "quadrature.abs_tol") {
            c.quadrature.abs_tol = parse_real(e);
        } else if (k == "quadrature.max_half_periods") {
            c.quadrature.max_half_periods = parse_count(e);
        } else if (k == "quadrature.panel_order") {
            c.quadrature.panel_order = static_cast<int>(parse_count(e));
        } else if (k == "quadrature.accel_depth") {
            c.quadrature.accel_depth = static_cast<int>(parse_count(e));
        } else if (k == "observable") {
            c.observable = parse_enum<Observable>(e, {{"msd", Observable::Msd},
                                                      {"msd-rate", Observable::MsdRate},
                                                      {"correlation", Observable::Correlation},
                                                      {"commutator", Observable::Commutator},
                                                      {"width", Observable::Width}});
        } else if (k == "mode") {
            c.mode = parse_enum<Mode>(e, {{"exact", Mode::Exact}, {"asymptotic", Mode::Asymptotic}});
        } else if (k == "width.sigma1") {
            c.sigma1 = parse_real(e);
        } else if (k == "width.sigma2") {
            c.sigma2 = parse_real(e);
        } else if (k == "output") {
            c.output = e.value;
        } else if (k == "asymptote.tail_fraction") {
            c.tail_fraction = parse_real(e);
        } else if (k == "asymptote.slope_tol") {
            c.slope_tol = parse_real(e);
        } else if (k == "threads") {
            c.threads = parse_count(e);
        }
    }

    // Unit presets.
    if (c.units == UnitSystem::Natural) {
        if (seen.has("units.hbar") || seen.has("units.kB"))
            throw ConfigError("units", seen.line_of("units"), "units.hbar / units.kB require units = explicit");
        c.hbar = 1.0;
        c.kB = 1.0;
    } else if (c.units == UnitSystem::Si) {
        if (seen.has("units.hbar") || seen.has("units.kB"))
            throw ConfigError("units", seen.line_of("units"), "units.hbar / units.kB require units = explicit");
        c.hbar = units::hbar_si;
        c.kB = units::kB_si;
        if (c.model.kind == "qed" && !seen.has("model.tau_e"))
            c.model.tau_e = units::tau_e_si;
    } else {
        for (const char* key : {"units.hbar", "units.kB"})
            if (!seen.has(key))
                throw ConfigError(key, 0, "required when units = explicit");
        if (!(c.hbar > 0.0))
            throw ConfigError("units.hbar", seen.line_of("units.hbar"), "must be > 0");
        if (!(c.kB > 0.0))
            throw ConfigError("units.kB", seen.line_of("units.kB"), "must be > 0");
    }

    if (c.model.kind.empty())
        throw ConfigError("model.kind", 0, "required");
    if (purpose == Purpose::Validate)
        return c;

    try {
        (void)make_model(c.model);
    } catch (const DomainError& err) {
        throw ConfigError("model." + std::string(c.model.kind == "power-law" ? "gamma" : "kind"),
                          seen.line_of(c.model.kind == "power-law" ? "model.gamma" : "model.kind"), err.what());
    }

    if (!temperature_text)
        throw ConfigError("temperature", 0, "required (a value >= 0 or 'zero')");
    for (const char* key : {"grid.t_min", "grid.t_max", "grid.n_points", "observable"})
        if (!seen.has(key))
            throw ConfigError(key, 0, "required");
    if (!(c.t_min > 0.0))
        throw ConfigError("grid.t_min", seen.line_of("grid.t_min"), "must be > 0");
    if (!(c.t_max > c.t_min))
        throw ConfigError("grid.t_max", seen.line_of("grid.t_max"), "must be > grid.t_min");
    if (c.n_points < 2)
        throw ConfigError("grid.n_points", seen.line_of("grid.n_points"), "must be >= 2");

    try {
        c.quadrature.validate(quad::Kernel::Sin);
    } catch (const DomainError& err) {
        throw ConfigError("quadrature", 0, err.what());
    }

    const bool wants_width = c.observable == Observable::Width;
    if (wants_width) {
        if (!c.sigma1)
            throw ConfigError("width.sigma1", 0, "required when observable = width");
        if (!(*c.sigma1 > 0.0))
            throw ConfigError("width.sigma1", seen.line_of("width.sigma1"),
                              "must be > 0 (the initial width cannot vanish)");
        if (!c.sigma2)
            c.sigma2 = 0.0;
        if (!(*c.sigma2 >= 0.0))
            throw ConfigError("width.sigma2", seen.line_of("width.sigma2"), "must be >= 0");
    } else if (c.sigma1 || c.sigma2) {
        throw ConfigError(c.sigma1 ? "width.sigma1" : "width.sigma2",
                          seen.line_of(c.sigma1 ? "width.sigma1" : "width.sigma2"),
                          "only allowed when observable = width");
    }
    if (c.mode == Mode::Asymptotic && c.observable == Observable::Correlation)
        throw ConfigError("mode", seen.line_of("mode"), "no asymptotic form for observable = correlation");
    if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0))
        throw ConfigError("asymptote.tail_fraction", seen.line_of("asymptote.tail_fraction"), "must lie in (0, 1]");
    if (!(c.slope_tol > 0.0))
        throw ConfigError("asymptote.slope_tol", seen.line_of("asymptote.slope_tol"), "must be > 0");
    return c;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        return "nan";
    return std::string(buf, ptr);
}

std::string serialize(const RunConfig& c)
{
    std::ostringstream out;
    auto put = [&](const char* key, const std::string& value) { out << key << " = " << value << "\n"; };
    put("model.kind", c.model.kind);
    put("model.zeta", format_double(c.model.zeta));
    put("model.gamma", format_double(c.model.gamma));
    put("model.b", format_double(c.model.b));
    put("model.m", format_double(c.model.m));
    put("model.M", format_double(c.model.M));
    put("model.tau_e", format_double(c.model.tau_e));
    put("temperature", c.zero_temperature ? std::string("zero") : format_double(c.temperature));
    put("units", to_string(c.units));
    if (c.units == UnitSystem::Explicit) {
        put("units.hbar", format_double(c.hbar));
        put("units.kB", format_double(c.kB));
    }
    put("grid.t_min", format_double(c.t_min));
    put("grid.t_max", format_double(c.t_max));
    put("grid.n_points", std::to_string(c.n_points));
    put("grid.spacing", c.spacing == Spacing::Log ? "log" : "linear");
    put("quadrature.rel_tol", format_double(c.quadrature.rel_tol));
    put("quadrature.abs_tol", format_double(c.quadrature.abs_tol));
    put("quadrature.max_half_periods", std::to_string(c.quadrature.max_half_periods));
    put("quadrature.panel_order", std::to_string(c.quadrature.panel_order));
    put("quadrature.accel_depth", std::to_string(c.quadrature.accel_depth));
    put("observable", to_string(c.observable));
    put("mode", to_string(c.mode));
    if (c.sigma1)
        put("width.sigma1", format_double(*c.sigma1));
    if (c.sigma2)
        put("width.sigma2", format_double(*c.sigma2));
    put("output", c.output);
    put("asymptote.tail_fraction", format_double(c.tail_fraction));
    put("asymptote.slope_tol", format_double(c.slope_tol));
    put("threads", std::to_string(c.threads));
    return out.str();
}

ThermalContext RunConfig::thermal() const
{
    return ThermalContext::make(zero_temperature ? 0.0 : temperature, hbar, kB);
}

BathModel RunConfig::bath() const { return make_model(model); }

std::vector<double> RunConfig::grid() const { return make_time_grid(t_min, t_max, n_points, spacing); }

} // namespace qbm::cli
