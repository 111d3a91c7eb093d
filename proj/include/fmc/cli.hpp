#pragma once

// Command-line driver. `main_entry` parses argv and runs one command,
// returning the process exit status:
//   0 success, 1 `check` found the operator not invariant,
//   2 validation error, 3 numerical contract failure, 4 I/O or parse error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "fmc/analysis.hpp"
#include "fmc/io.hpp"
#include "fmc/multiplier.hpp"
#include "fmc/report.hpp"
#include "fmc/spectral.hpp"
#include "fmc/torus.hpp"

namespace fmc::cli {

enum class Format { json, text };

struct RunConfig {
    std::string command;
    std::vector<std::string> ops;
    std::vector<std::string> symbols;
    std::string partition;
    std::optional<double> tol;
    std::optional<double> cluster_tol;
    std::string schatten;
    std::optional<double> nu;
    std::optional<int> dim;
    std::optional<int> cutoff;
    std::string out;
    std::optional<Format> format;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = {"partition", "check",   "symbol",  "quantize",  "norm",
                                                   "trace",     "compose", "sobolev", "torus-demo"};
    return names;
}

/// Comma-separated exponents; `inf` selects the operator norm.
inline std::vector<SchattenExponent> parse_exponents(const std::string& list) {
    std::vector<SchattenExponent> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf" || item == "infinity") {
            out.push_back(SchattenExponent::infinity());
            continue;
        }
        std::size_t used = 0;
        double r = 0.0;
        try {
            r = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) throw ArgumentError("invalid Schatten exponent '" + item + "'");
        out.emplace_back(r);
    }
    if (out.empty()) throw ArgumentError("empty Schatten exponent list");
    return out;
}

/// Level from FMC_LOG (error|warn|info|debug), default warn; logs go to stderr.
inline void configure_logging() {
    static const bool done = [] {
        auto logger = spdlog::stderr_logger_mt("fmc");
        logger->set_pattern("fmc: %l: %v");
        spdlog::set_default_logger(logger);
        return true;
    }();
    (void)done;
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("FMC_LOG")) {
        const std::string_view v(env);
        if (v == "error") level = spdlog::level::err;
        else if (v == "info") level = spdlog::level::info;
        else if (v == "debug") level = spdlog::level::debug;
    }
    spdlog::set_level(level);
}

namespace detail {

template <typename T>
T require(const std::optional<T>& v, const char* flag, const std::string& command) {
    if (!v) throw ArgumentError(command + " requires " + flag);
    return *v;
}

inline const std::string& require(const std::string& v, const char* flag, const std::string& command) {
    if (v.empty()) throw ArgumentError(command + " requires " + flag);
    return v;
}

inline void require_count(const std::vector<std::string>& v, std::size_t n, const char* flag,
                          const std::string& command) {
    if (v.size() != n) {
        throw ArgumentError(command + " requires " + std::to_string(n) + " " + flag + " argument" +
                            (n == 1 ? "" : "s") + ", got " + std::to_string(v.size()));
    }
}

inline void check_positive(const std::optional<double>& v, const char* flag) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw ArgumentError(std::string(flag) + " must be positive");
}

inline DenseOperator load_operator(const std::string& path) {
    return DenseOperator(io::read_file(path, [](std::istream& in, const std::string& src) {
        return io::read_cmat(in, src);
    }));
}

inline EigenPartition load_partition(const std::string& path) {
    return io::read_file(path, [](std::istream& in, const std::string& src) { return io::read_part(in, src); });
}

inline io::SymbolFile load_symbol(const std::string& path) {
    return io::read_file(path, [](std::istream& in, const std::string& src) { return io::read_sym(in, src); });
}

class Runner {
public:
    Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

    int run() {
        check_positive(cfg_.tol, "--tol");
        check_positive(cfg_.cluster_tol, "--cluster-tol");
        check_positive(cfg_.nu, "--nu");
        const auto& c = cfg_.command;
        spdlog::debug("running {}", c);
        if (c == "partition") return partition();
        if (c == "check") return check();
        if (c == "symbol") return symbol();
        if (c == "quantize") return quantize_cmd();
        if (c == "norm") return norm();
        if (c == "trace") return trace();
        if (c == "compose") return compose();
        if (c == "sobolev") return sobolev();
        if (c == "torus-demo") return torus_demo();
        throw ArgumentError("unknown command '" + c + "'");
    }

private:
    Format report_format() const { return cfg_.format.value_or(Format::json); }

    void emit(const std::string& text) const {
        if (cfg_.out.empty()) {
            out_ << text;
        } else {
            io::write_text_file(cfg_.out, text);
            spdlog::info("wrote {}", cfg_.out);
        }
    }

    int partition() {
        require_count(cfg_.ops, 1, "--op", "partition");
        ClusteringPolicy policy;
        if (cfg_.cluster_tol) policy.rel_tol = *cfg_.cluster_tol;
        else if (cfg_.tol) policy.rel_tol = *cfg_.tol;
        const auto p = partition_from_operator(load_operator(cfg_.ops[0]), policy);
        spdlog::info("{} blocks in dimension {}", p.block_count(), p.dim());
        emit(io::to_text([&](std::ostream& os) { io::write_part(os, p); }));
        return 0;
    }

    int check() {
        if (cfg_.ops.empty() || cfg_.ops.size() > 2) {
            throw ArgumentError("check requires --op T and optionally a second --op E");
        }
        const auto t = load_operator(cfg_.ops[0]);
        const auto p = load_partition(require(cfg_.partition, "--partition", "check"));
        const auto r = is_invariant(t, p, cfg_.tol.value_or(1e-8));
        std::optional<double> commutator;
        if (cfg_.ops.size() == 2) commutator = commutes_with(t, load_operator(cfg_.ops[1]));

        if (report_format() == Format::json) {
            report::Json j;
            j["invariance"] = report::invariance(r);
            if (commutator) j["commutator"] = report::number(*commutator);
            emit(report::dump(j));
        } else {
            std::string s = std::string("invariant ") + (r.invariant ? "true" : "false") + "\n";
            s += "leakage " + io::format_double(r.max_leakage) + "\n";
            if (r.worst_pair) {
                s += "worst_pair " + std::to_string(r.worst_pair->source) + " " +
                     std::to_string(r.worst_pair->target) + "\n";
            }
            if (commutator) s += "commutator " + io::format_double(*commutator) + "\n";
            emit(s);
        }
        return r.invariant ? 0 : 1;
    }

    int symbol() {
        require_count(cfg_.ops, 1, "--op", "symbol");
        const auto t = load_operator(cfg_.ops[0]);
        const auto p = load_partition(require(cfg_.partition, "--partition", "symbol"));
        const auto sigma = extract_symbol(t, p);
        emit(io::to_text([&](std::ostream& os) { io::write_sym(os, sigma, p.lambdas()); }));
        return 0;
    }

    int quantize_cmd() {
        require_count(cfg_.symbols, 1, "--symbol", "quantize");
        const auto s = load_symbol(cfg_.symbols[0]);
        const auto p = load_partition(require(cfg_.partition, "--partition", "quantize"));
        const auto t = quantize(s.symbol, p);
        emit(io::to_text([&](std::ostream& os) { io::write_cmat(os, t.matrix()); }));
        return 0;
    }

    int norm() {
        require_count(cfg_.symbols, 1, "--symbol", "norm");
        const auto s = load_symbol(cfg_.symbols[0]);
        report::Json j;
        std::string text;
        if (cfg_.schatten.empty()) {
            const double v = operator_norm_from_symbol(s.symbol);
            j["op_norm"] = report::number(v);
            text = "op_norm " + io::format_double(v) + "\n";
        } else {
            report::Json sch = report::Json::object();
            for (const auto& r : parse_exponents(cfg_.schatten)) {
                const double v = schatten_norm(s.symbol, r);
                sch[report::exponent_key(r)] = report::number(v);
                text += "schatten " + report::exponent_key(r) + " " + io::format_double(v) + "\n";
            }
            j["schatten"] = sch;
        }
        emit(report_format() == Format::json ? report::dump(j) : text);
        return 0;
    }

    int trace() {
        require_count(cfg_.symbols, 1, "--symbol", "trace");
        const Complex t = trace_from_symbol(load_symbol(cfg_.symbols[0]).symbol);
        if (report_format() == Format::json) {
            emit(report::dump(report::Json{{"trace", report::complex_value(t)}}));
        } else {
            emit("trace " + io::format_double(t.real()) + " " + io::format_double(t.imag()) + "\n");
        }
        return 0;
    }

    int compose() {
        require_count(cfg_.symbols, 2, "--symbol", "compose");
        const auto s = load_symbol(cfg_.symbols[0]);
        const auto t = load_symbol(cfg_.symbols[1]);
        if (s.lambdas != t.lambdas) throw ArgumentError("compose: symbols carry different block eigenvalues");
        const auto st = compose_symbols(s.symbol, t.symbol);
        emit(io::to_text([&](std::ostream& os) { io::write_sym(os, st, s.lambdas); }));
        return 0;
    }

    int sobolev() {
        require_count(cfg_.symbols, 1, "--symbol", "sobolev");
        const double nu = require(cfg_.nu, "--nu", "sobolev");
        const auto s = load_symbol(cfg_.symbols[0]);
        const auto fit = sobolev_fit(s.symbol, s.lambdas, nu);
        if (report_format() == Format::json) {
            emit(report::dump(report::Json{{"sobolev", report::sobolev(fit)}}));
        } else {
            emit("nu " + io::format_double(fit.nu) + "\nm " + io::format_double(fit.m) + "\nC " +
                 io::format_double(fit.C) + "\n");
        }
        return 0;
    }

    int torus_demo() {
        const int n = require(cfg_.dim, "--dim", "torus-demo");
        const int k = require(cfg_.cutoff, "--cutoff", "torus-demo");
        const auto model = torus::build_torus_model(n, k);
        const auto fine = torus::fine_partition(model);
        const auto coarse = torus::coarse_partition(model);
        const auto table = torus::multiplicity_table(model);
        const double tol = cfg_.tol.value_or(1e-8);

        std::string tsv = "ell\td\n";
        for (const auto& [ell, d] : table) tsv += std::to_string(ell) + "\t" + std::to_string(d) + "\n";

        // Rotation inside the |j|^2 = 1 block: unit vectors e_1, e_2 (or -1, +1 when n = 1).
        torus::Frequency a{1, 0, 0}, b{0, 1, 0};
        if (n == 1) a = {-1, 0, 0}, b = {1, 0, 0};
        const double angle = std::acos(-1.0) / 4.0;
        const auto rotation = torus::frequency_rotation(model, a, b, angle);
        const auto heat = torus::translation_invariant_operator(
            torus::MultiplierFunction::total(
                [](const torus::Frequency& j) { return Complex(std::exp(-static_cast<double>(torus::norm_squared(j)))); }),
            model);
        const auto laplacian = torus::laplacian(model);

        report::Json j;
        j["dim"] = n;
        j["cutoff"] = k;
        j["ambient_dim"] = model.dim();
        report::Json mult = report::Json::array();
        for (const auto& [ell, d] : table) {
            mult.push_back(report::Json{{"ell", ell}, {"d", d}, {"possibly_truncated", model.possibly_truncated(ell)}});
        }
        j["multiplicities"] = mult;
        j["rotation"] = report::Json{
            {"frequencies", report::Json::array({torus::to_string(a, n), torus::to_string(b, n)})},
            {"angle", report::number(angle)},
            {"coarse", report::invariance(is_invariant(rotation, coarse, tol))},
            {"fine", report::invariance(is_invariant(rotation, fine, tol))},
            {"laplacian_commutator", report::number(commutes_with(rotation, laplacian))}};
        j["translation_invariant"] = report::Json{
            {"multiplier", "exp(-|j|^2)"},
            {"coarse", report::invariance(is_invariant(heat, coarse, tol))},
            {"fine", report::invariance(is_invariant(heat, fine, tol))}};
        const std::string json = report::dump(j);

        if (!cfg_.out.empty()) {
            const std::filesystem::path dir(cfg_.out);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw IoError("cannot create directory '" + cfg_.out + "': " + ec.message());
            io::write_text_file((dir / "multiplicities.tsv").string(), tsv);
            io::write_text_file((dir / "fine.part").string(),
                                io::to_text([&](std::ostream& os) { io::write_part(os, fine); }));
            io::write_text_file((dir / "coarse.part").string(),
                                io::to_text([&](std::ostream& os) { io::write_part(os, coarse); }));
            io::write_text_file((dir / "report.json").string(), json);
            spdlog::info("wrote torus demo files to {}", cfg_.out);
        }
        out_ << (cfg_.format.value_or(Format::text) == Format::json ? json : tsv);
        return 0;
    }

    const RunConfig& cfg_;
    std::ostream& out_;
};

}  // namespace detail

/// Runs a parsed configuration; errors are mapped to exit statuses.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        return detail::Runner(cfg, out).run();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    configure_logging();
    RunConfig cfg;
    CLI::App app{"Fourier multiplier calculus relative to a reference operator", "fmc"};
    app.add_option("command", cfg.command, "One of: partition check symbol quantize norm trace compose sobolev torus-demo")
        ->required()
        ->check(CLI::IsMember(commands()));
    app.add_option("--op", cfg.ops, "CMAT operator file (check accepts a second one as reference E)");
    app.add_option("--symbol", cfg.symbols, "SYM symbol file (compose takes two)");
    app.add_option("--partition", cfg.partition, "PART partition file");
    app.add_option("--tol", cfg.tol, "Invariance tolerance; clustering tolerance for partition");
    app.add_option("--cluster-tol", cfg.cluster_tol, "Relative eigenvalue clustering tolerance");
    app.add_option("--schatten", cfg.schatten, "Comma-separated Schatten exponents, inf allowed");
    app.add_option("--nu", cfg.nu, "Order of the reference operator");
    app.add_option("--dim", cfg.dim, "Torus dimension (1-3)");
    app.add_option("--cutoff", cfg.cutoff, "Torus frequency cutoff");
    app.add_option("--out", cfg.out, "Output path (directory for torus-demo)");
    app.add_option("--format", cfg.format, "json or text")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::json}, {"text", Format::text}}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return run(cfg, out, err);
}

}  // namespace fmc::cli
