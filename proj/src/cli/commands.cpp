#include "qbm/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "qbm/bath_models.hpp"
#include "qbm/cli/run_config.hpp"
#include "qbm/diffusion_observables.hpp"
#include "qbm/errors.hpp"
#include "qbm/special_functions.hpp"
#include "qbm/wavepacket.hpp"

namespace qbm::cli {

namespace {

struct Row {
    double t{0.0};
    bool ok{false};
    double value{0.0};
    double err{0.0};
    std::string dominant;
    std::string diagnostic;
    bool divergent{false};
};

// Splits `--key=value` / `--key value` overrides for known config keys out of
// the argument list; everything else is left for the command parser.
std::vector<Entry> extract_overrides(std::vector<std::string>& args)
{
    std::vector<Entry> overrides;
    std::vector<std::string> rest;
    const auto& keys = known_keys();
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) {
            rest.push_back(a);
            continue;
        }
        std::string key = a.substr(2);
        std::optional<std::string> value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        }
        if (key == "output" || std::find(keys.begin(), keys.end(), key) == keys.end()) {
            rest.push_back(a);
            continue;
        }
        if (!value) {
            if (i + 1 >= args.size())
                throw ConfigError(key, 0, "missing value");
            value = args[++i];
        }
        overrides.push_back(Entry{key, *value, 0});
    }
    args = std::move(rest);
    return overrides;
}

std::vector<Entry> gather_entries(const std::string& config_path, const std::vector<Entry>& overrides,
                                  const std::optional<std::string>& output)
{
    std::vector<Entry> entries;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("--config", 0, "cannot open '" + config_path + "'");
        entries = parse_key_values(in);
    }
    entries.insert(entries.end(), overrides.begin(), overrides.end());
    if (output)
        entries.push_back(Entry{"output", *output, 0});
    return entries;
}

// Evaluates `eval` on every grid point with up to `threads` workers; rows come
// back in grid order.
template <class Eval>
std::vector<Row> sweep(const std::vector<double>& grid, std::size_t threads, Eval eval)
{
    std::vector<Row> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            Row& r = rows[i];
            r.t = grid[i];
            try {
                eval(r);
                r.ok = true;
            } catch (const NonConvergence& e) {
                r.diagnostic = e.what();
            } catch (const DivergentObservable& e) {
                r.divergent = true;
                r.diagnostic = e.what();
            } catch (const std::exception& e) {
                r.diagnostic = e.what();
            }
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(grid.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < threads; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    return rows;
}

std::vector<Row> evaluate(const RunConfig& c, Observable observable, Mode mode)
{
    const BathModel model = c.bath();
    const ThermalContext ctx = c.thermal();
    const auto& spec = c.quadrature;
    return sweep(c.grid(), c.threads, [&](Row& r) {
        const double t = r.t;
        Evaluation e;
        if (mode == Mode::Asymptotic) {
            switch (observable) {
            case Observable::Msd: e.value = msd_asymptotic(model, ctx, t); break;
            case Observable::MsdRate: e.value = msd_rate_asymptotic(model, ctx, t); break;
            case Observable::Commutator: e.value = commutator_asymptotic(model, t, ctx.hbar); break;
            case Observable::Width: {
                const auto w = packet_width_asymptotic(model, ctx, MeasurementSetup::make(*c.sigma1, *c.sigma2, t));
                e.value = w.value();
                r.dominant = to_string(w.dominant);
                break;
            }
            case Observable::Correlation: throw DomainError("no asymptotic form for the correlation");
            }
        } else {
            switch (observable) {
            case Observable::Msd: e = msd(model, ctx, t, spec); break;
            case Observable::MsdRate: e = msd_rate(model, ctx, t, spec); break;
            case Observable::Correlation: e = position_correlation(model, ctx, t, spec); break;
            case Observable::Commutator: e = commutator_magnitude(model, t, ctx.hbar, spec); break;
            case Observable::Width:
                e = packet_width_sq(model, ctx, MeasurementSetup::make(*c.sigma1, *c.sigma2, t), spec);
                break;
            }
        }
        r.value = e.value;
        r.err = e.err_estimate;
    });
}

// Returns the first divergence diagnostic, if any.
std::optional<std::string> divergence(const std::vector<Row>& rows)
{
    for (const auto& r : rows)
        if (r.divergent)
            return r.diagnostic;
    return std::nullopt;
}

// Output sink: the configured file or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback)
    {
        if (path == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw ConfigError("output", 0, "cannot open '" + path + "' for writing");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_{nullptr};
};

int cmd_compute(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const auto rows = evaluate(c, c.observable, c.mode);
    if (const auto d = divergence(rows)) {
        err << "error: " << *d << "\n";
        return ExitConfig;
    }
    const bool with_dominant = c.observable == Observable::Width && c.mode == Mode::Asymptotic;
    std::ostringstream csv;
    csv << "t,value,err_estimate" << (with_dominant ? ",dominant_term" : "") << "\n";
    int status = ExitOk;
    for (const auto& r : rows) {
        csv << format_double(r.t) << ',';
        if (r.ok) {
            csv << format_double(r.value) << ',' << format_double(r.err);
        } else {
            csv << ',';
            err << "t=" << format_double(r.t) << ": " << r.diagnostic << "\n";
            status = ExitNonConvergence;
        }
        if (with_dominant)
            csv << ',' << r.dominant;
        csv << "\n";
    }
    Sink sink(c.output, out);
    *sink << csv.str();
    return status;
}

int cmd_validate(const RunConfig& c, std::ostream& out)
{
    const ValidationReport report = validate_positive_real(c.model);
    out << report.to_text();
    if (report.to_text().empty() || report.to_text().back() != '\n')
        out << "\n";
    return report.passed() ? ExitOk : ExitValidationFailed;
}

int cmd_asymptote(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    if (c.observable != Observable::Msd && c.observable != Observable::MsdRate) {
        err << "error: observable: asymptote requires msd or msd-rate\n";
        return ExitConfig;
    }
    const auto numeric = evaluate(c, c.observable, Mode::Exact);
    if (const auto d = divergence(numeric)) {
        err << "error: " << *d << "\n";
        return ExitConfig;
    }
    const auto asym = evaluate(c, c.observable, Mode::Asymptotic);
    ObservableSeries series;
    std::vector<double> asymptotic;
    bool failed = false;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        if (!numeric[i].ok || !asym[i].ok) {
            err << "t=" << format_double(numeric[i].t) << ": "
                << (numeric[i].ok ? asym[i].diagnostic : numeric[i].diagnostic) << "\n";
            failed = true;
            continue;
        }
        series.times.push_back(numeric[i].t);
        series.values.push_back(numeric[i].value);
        series.err_estimates.push_back(numeric[i].err);
        asymptotic.push_back(asym[i].value);
    }
    if (failed)
        return ExitNonConvergence;

    const BathModel model = c.bath();
    const ThermalContext ctx = c.thermal();
    const bool positive = std::all_of(series.values.begin(), series.values.end(), [](double v) { return v > 0.0; }) &&
                          std::all_of(asymptotic.begin(), asymptotic.end(), [](double v) { return v > 0.0; });
    const bool drift = std::holds_alternative<Harmonic>(model) || !positive;

    AsymptoteComparison cmp;
    double fitted = 0.0;
    double expected = 0.0;
    if (drift) {
        // Bound or frozen motion: no power law, test for zero linear drift.
        cmp.times = series.times;
        cmp.numeric = series.values;
        cmp.asymptotic = asymptotic;
        const std::size_t n = series.size();
        const std::size_t first = n - std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(c.tail_fraction * n)));
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::abs(series.values[i] - asymptotic[i]) / std::max(std::abs(asymptotic[i]), 1e-300);
            cmp.deviation.push_back(d);
            if (i >= first)
                cmp.max_tail_deviation = std::max(cmp.max_tail_deviation, d);
        }
        fitted = fit_linear_drift(series);
    } else {
        cmp = compare_asymptote(series, asymptotic, c.tail_fraction);
        fitted = cmp.fitted_slope;
        expected = expected_exponent(model, ctx, c.observable == Observable::Msd);
        if (std::isnan(expected))
            expected = cmp.asymptotic_slope;
    }

    Sink sink(c.output, out);
    std::ostream& o = *sink;
    o << "t,numeric,asymptotic,deviation\n";
    for (std::size_t i = 0; i < cmp.times.size(); ++i)
        o << format_double(cmp.times[i]) << ',' << format_double(cmp.numeric[i]) << ','
          << format_double(cmp.asymptotic[i]) << ',' << format_double(cmp.deviation[i]) << "\n";
    const bool ok = std::abs(fitted - expected) <= c.slope_tol;
    std::ostringstream summary;
    summary << "# " << (drift ? "drift" : "slope") << " fitted=" << format_double(fitted)
            << " expected=" << format_double(expected) << " max_tail_deviation=" << format_double(cmp.max_tail_deviation)
            << " tolerance=" << format_double(c.slope_tol) << " -> " << (ok ? "PASS" : "FAIL") << "\n";
    o << summary.str();
    if (&o != &out)
        out << summary.str();
    return ok ? ExitOk : ExitSlopeMismatch;
}

struct CheckRow {
    std::string name;
    std::string detail;
    double value;
    double reference;
    double tolerance;

    double rel_error() const { return std::abs(value - reference) / std::max(std::abs(reference), 1e-300); }
    bool passed() const { return std::isfinite(value) && rel_error() <= tolerance; }
};

void sine_power_rows(std::vector<CheckRow>& rows)
{
    for (double g : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        quad::QuadratureSpec spec;
        spec.rel_tol = 1e-10;
        spec.endpoint_exponent = g + 1.0;
        const auto r = quad::integrate_oscillatory([g](double x) { return std::pow(x, -g - 1.0); }, quad::Kernel::Sin,
                                                   1.0, spec);
        const double exact = special::pi / (2.0 * std::tgamma(1.0 + g) * std::cos(special::pi * g / 2.0));
        std::ostringstream d;
        d << "gamma=" << format_double(g);
        rows.push_back({"sine-power", d.str(), r.value, exact, 1e-6});
    }
}

void v_function_rows(std::vector<CheckRow>& rows)
{
    for (int i = 0; i < 20; ++i) {
        const double x = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
        quad::QuadratureSpec spec;
        spec.rel_tol = 1e-11;
        spec.abs_tol = 1e-16;
        const auto r =
            quad::integrate_oscillatory([x](double w) { return x * x / (x * x + w * w); }, quad::Kernel::Sin, 1.0, spec);
        std::ostringstream d;
        d << "x=" << format_double(x);
        rows.push_back({"v-function", d.str(), r.value, special::v_function(x), 1e-8});
    }
}

void qed_form_rows(std::vector<CheckRow>& rows)
{
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Qed q{1.0, 0.5, 1.0};
    double worst = 0.0;
    Complex worst_z{};
    for (int i = 0; i < 100; ++i) {
        const Complex z(std::pow(10.0, -3.0 + 6.0 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0),
                        std::pow(10.0, -3.0 + 6.0 * unit(rng)));
        const Complex a = susceptibility(q, z);
        const Complex b = qed_susceptibility_cutoff_form(q, z);
        const double rel = std::abs(a - b) / std::abs(b);
        if (rel > worst) {
            worst = rel;
            worst_z = z;
        }
    }
    std::ostringstream d;
    d << "100 points, worst at z=" << format_double(worst_z.real()) << (worst_z.imag() < 0 ? "" : "+")
      << format_double(worst_z.imag()) << "i";
    rows.push_back({"qed-forms", d.str(), 1.0 + worst, 1.0, 1e-12});
}

void moment_rows(std::vector<CheckRow>& rows)
{
    const BathModel h = Harmonic{1.0, 1.0};
    for (double T : {0.0, 0.5, 2.0}) {
        const auto ctx = ThermalContext::make(T, 1.0, 1.0);
        const auto setup = MeasurementSetup::make(0.7, 0.3, 1.3);
        const auto params = joint_gaussian_params(h, ctx, setup);
        const double moment =
            integrate_joint_density(params, [](double x1, double x2) { return (x1 - x2) * (x1 - x2); });
        std::ostringstream d;
        d << "harmonic T=" << format_double(T);
        rows.push_back({"width-moment", d.str(), moment, packet_width_sq(h, ctx, setup).value, 1e-8});
    }
}

int cmd_selfcheck(std::ostream& out)
{
    std::vector<CheckRow> rows;
    using Stage = void (*)(std::vector<CheckRow>&);
    const std::pair<const char*, Stage> stages[] = {
        {"sine-power", sine_power_rows},
        {"v-function", v_function_rows},
        {"qed-forms", qed_form_rows},
        {"width-moment", moment_rows},
    };
    bool all = true;
    for (const auto& [name, stage] : stages) {
        try {
            stage(rows);
        } catch (const std::exception& e) {
            rows.push_back({name, std::string("error: ") + e.what(), std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0});
        }
    }
    out << std::left << std::setw(14) << "check" << std::setw(52) << "case" << std::setw(12) << "rel_error"
        << std::setw(10) << "tolerance" << "status\n";
    for (const auto& r : rows) {
        std::ostringstream e;
        e << std::scientific << std::setprecision(2) << r.rel_error();
        std::ostringstream tol;
        tol << std::scientific << std::setprecision(0) << r.tolerance;
        out << std::left << std::setw(14) << r.name << std::setw(52) << r.detail << std::setw(12) << e.str()
            << std::setw(10) << tol.str() << (r.passed() ? "pass" : "FAIL") << "\n";
        all = all && r.passed();
    }
    out << (all ? "all checks passed\n" : "some checks FAILED\n");
    return all ? ExitOk : ExitSelfcheckFailed;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args = raw_args;
    std::vector<Entry> overrides;
    try {
        overrides = extract_overrides(args);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    }

    CLI::App app{"Quantum Brownian motion observables: mean-square displacement, commutators, packet widths"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    std::string config_path;
    std::optional<std::string> output;

    auto add_common = [&](CLI::App* sub, bool with_output) {
        sub->add_option("--config", config_path, "key = value configuration file");
        if (with_output)
            sub->add_option("--output", output, "output path, '-' for standard output");
        sub->footer("Any configuration key may be overridden with --<key>=<value>, e.g. --model.gamma=0.5");
    };
    auto* compute = app.add_subcommand("compute", "evaluate an observable on a time grid, CSV output");
    add_common(compute, true);
    auto* validate = app.add_subcommand("validate", "check the bath kernel for positive-real behaviour");
    add_common(validate, false);
    auto* asymptote = app.add_subcommand("asymptote", "compare msd / msd-rate with its long-time law");
    add_common(asymptote, true);
    auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in identity suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    }

    if (selfcheck->parsed())
        return cmd_selfcheck(out);

    try {
        const auto entries = gather_entries(config_path, overrides, output);
        if (validate->parsed())
            return cmd_validate(build_config(entries, Purpose::Validate), out);
        const RunConfig config = build_config(entries, Purpose::Run);
        if (compute->parsed())
            return cmd_compute(config, out, err);
        if (asymptote->parsed())
            return cmd_asymptote(config, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    } catch (const DivergentObservable& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    }
    return ExitConfig;
}

} // namespace qbm::cli
