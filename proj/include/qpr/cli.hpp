#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpr/report.hpp"

namespace qpr::cli {

// Exit codes: 0 success/reducible, 2 not reducible, 3 input error,
// 4 verification failure.
inline constexpr int kOk = 0;
inline constexpr int kNotReducible = 2;
inline constexpr int kInputError = 3;
inline constexpr int kVerifyFailure = 4;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Bindings parse_bindings(const std::vector<std::string>& raw) {
    Bindings out;
    for (const std::string& item : raw) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("--bind expects name=p/q, got \"" + item + "\"");
        out[item.substr(0, eq)] = parse_rational(item.substr(eq + 1));
    }
    return out;
}

inline std::vector<double> parse_state(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(parse_rational(item)));
    if (out.empty()) throw Error("--x0 expects a comma-separated state");
    return out;
}

inline RatMatrix parse_csv_matrix(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<Rational>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (std::size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        if (blank) continue;
        std::vector<Rational> row;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) row.push_back(parse_rational(item));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("empty matrix file \"" + path + "\"");
    RatMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw Error("ragged matrix in \"" + path + "\"");
        m.set_row(i, rows[i]);
    }
    return m;
}

struct CommonArgs {
    std::string file;
    std::vector<std::string> bind_raw;
};

struct Loaded {
    std::string text;
    QPSystem raw;       // structurally normalized, no rank gate
    Bindings bindings;  // from --bind
};

inline Loaded load(const CommonArgs& args, bool substitute) {
    Loaded out;
    out.text = read_file(args.file);
    out.bindings = parse_bindings(args.bind_raw);
    out.raw = parse_system_raw(out.text);
    if (substitute && !out.bindings.empty())
        out.raw = substitute_params(out.raw, out.bindings);
    return out;
}

inline Json base_report(const std::string& command, const CommonArgs& args,
                        const Loaded& loaded) {
    Json bindings = Json::object();
    for (const auto& [name, value] : loaded.bindings) bindings[name] = to_string(value);
    return Json{{"schema", "qpr-report/1"},
                {"command", command},
                {"input", Json{{"path", args.file}, {"digest", "fnv1a64:" + fnv1a64(loaded.text)}}},
                {"bindings", std::move(bindings)}};
}

inline void emit(std::ostream& out, Json report, int exit_code,
                 const std::string& error = "") {
    report["status"] = Json{{"exit_code", exit_code}, {"ok", exit_code == kOk}};
    if (!error.empty()) report["status"]["error"] = error;
    out << report.dump(2) << "\n";
}

}  // namespace detail

/// Parses a single-product-term coefficient such as "a2" or "2*a1^2".
inline Coefficient parse_coefficient_term(const std::string& expr,
                                          const std::vector<std::string>& params) {
    std::string text;
    if (!params.empty()) {
        text = "params: ";
        for (std::size_t i = 0; i < params.size(); ++i) text += (i ? ", " : "") + params[i];
        text += ";\n";
    }
    // every mentioned name must be a declared parameter of the system
    text += "__t__' = " + expr + "*__t__\n";
    OdeAst ast;
    try {
        ast = parse(text);
    } catch (const UnknownSymbolError& e) {
        throw Error("prefactor mentions \"" + e.name + "\" which is not a system parameter");
    }
    const auto& terms = ast.equations.front();
    if (terms.empty()) throw ZeroPrefactorError();
    if (terms.size() != 1) throw Error("prefactor must be a single product term");
    const AstTerm& t = terms.front();
    if (!t.var_pows.empty() && !(t.var_pows.size() == 1 && t.var_pows.begin()->first == "__t__"))
        throw Error("prefactor must not mention variables");
    return Coefficient::term(t.weight, ParamAtom(t.param_pows.begin(), t.param_pows.end()));
}

/// Runs one CLI invocation; reports go to `out` as JSON (exception: `export
/// --format text` emits canonical .qp text).
inline int execute(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"quasipolynomial reduction toolkit"};
    app.require_subcommand(1);

    detail::CommonArgs parse_args, classify_args, cond_args, reduce_args, verify_args,
        export_args;

    auto* cmd_parse = app.add_subcommand("parse", "echo the canonical system and matrices");
    cmd_parse->add_option("file", parse_args.file, "input .qp file")->required();

    auto* cmd_classify = app.add_subcommand("classify", "print the case label");
    cmd_classify->add_option("file", classify_args.file, "input .qp file")->required();
    cmd_classify->add_option("--bind", classify_args.bind_raw, "parameter binding name=p/q");

    auto* cmd_cond = app.add_subcommand("conditions", "exponential-rate uniformity conditions");
    cmd_cond->add_option("file", cond_args.file, "input .qp file")->required();
    cmd_cond->add_option("--bind", cond_args.bind_raw, "parameter binding name=p/q");

    std::string policy_name = "completion", qmt_path, prefactor_expr, out_path;
    auto* cmd_reduce = app.add_subcommand("reduce", "decouple the first variable");
    cmd_reduce->add_option("file", reduce_args.file, "input .qp file")->required();
    cmd_reduce->add_option("--policy", policy_name, "cvm|completion")
        ->check(CLI::IsMember({"cvm", "completion"}));
    cmd_reduce->add_option("--qmt", qmt_path, "explicit QMT matrix as rational CSV");
    cmd_reduce->add_option("--prefactor", prefactor_expr, "new-time prefactor term");
    cmd_reduce->add_option("--bind", reduce_args.bind_raw, "parameter binding name=p/q");
    cmd_reduce->add_option("-o,--output", out_path, "write the reduced system as .qp");

    std::string x0_csv;
    double t_end = 1.0, tol = 1e-10, max_rel_error = 1e-6;
    auto* cmd_verify = app.add_subcommand("verify", "numeric trajectory round-trip");
    cmd_verify->add_option("file", verify_args.file, "input .qp file")->required();
    cmd_verify->add_option("--x0", x0_csv, "initial state v1,v2,...")->required();
    cmd_verify->add_option("--t-end", t_end, "integration horizon")->required();
    cmd_verify->add_option("--tol", tol, "integration tolerance");
    cmd_verify->add_option("--max-rel-error", max_rel_error, "acceptance threshold");
    cmd_verify->add_option("--bind", verify_args.bind_raw, "parameter binding name=p/q");
    cmd_verify->add_option("--policy", policy_name, "cvm|completion")
        ->check(CLI::IsMember({"cvm", "completion"}));
    cmd_verify->add_option("--qmt", qmt_path, "explicit QMT matrix as rational CSV");
    cmd_verify->add_option("--prefactor", prefactor_expr, "new-time prefactor term");

    std::string format = "json";
    auto* cmd_export = app.add_subcommand("export", "re-emit the system");
    cmd_export->add_option("file", export_args.file, "input .qp file")->required();
    cmd_export->add_option("--format", format, "json|text")
        ->check(CLI::IsMember({"json", "text"}));

    try {
        std::vector<const char*> argv;
        argv.push_back("qpr");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    auto make_policy = [&](const QPSystem& sys) -> BPrimePolicy {
        BPrimePolicy policy = policy_name == "cvm" ? BPrimePolicy::cvm()
                                                   : BPrimePolicy::completion();
        if (!qmt_path.empty())
            policy = BPrimePolicy::explicit_qmt(detail::parse_csv_matrix(qmt_path));
        if (!prefactor_expr.empty())
            policy.prefactor = parse_coefficient_term(prefactor_expr, sys.parameters());
        return policy;
    };

    try {
        if (cmd_parse->parsed()) {
            detail::Loaded loaded = detail::load(parse_args, false);
            Json report = detail::base_report("parse", parse_args, loaded);
            report["system"] = to_json(loaded.raw);
            report["text"] = render(loaded.raw);
            report["standard_form"] =
                loaded.raw.m > 0 ? rank(loaded.raw.B) == loaded.raw.n
                                 : !loaded.raw.lambda_is_zero();
            detail::emit(out, std::move(report), kOk);
            return kOk;
        }

        if (cmd_classify->parsed()) {
            detail::Loaded loaded = detail::load(classify_args, true);
            const QPSystem sys = normalize(loaded.raw);
            Json report = detail::base_report("classify", classify_args, loaded);
            report["system"] = to_json(sys);
            report["case"] = to_string(classify(sys));
            detail::emit(out, std::move(report), kOk);
            return kOk;
        }

        if (cmd_cond->parsed()) {
            detail::Loaded loaded = detail::load(cond_args, true);
            const QPSystem sys = normalize(loaded.raw);
            const ExpQPSystem esys = exp_scale(sys);
            const ConditionSet conds = gamma_conditions(esys);
            Json report = detail::base_report("conditions", cond_args, loaded);
            report["system"] = to_json(sys);
            report["case"] = to_string(classify(sys));
            report["gamma"] = to_json(esys.gamma);
            report["conditions"] = to_json(conds);
            const int code = conds.satisfiable == Satisfiability::No ? kNotReducible : kOk;
            detail::emit(out, std::move(report), code);
            return code;
        }

        if (cmd_reduce->parsed() || cmd_verify->parsed()) {
            const bool verifying = cmd_verify->parsed();
            detail::CommonArgs& cargs = verifying ? verify_args : reduce_args;
            detail::Loaded loaded = detail::load(cargs, true);
            const QPSystem sys = normalize(loaded.raw);
            const BPrimePolicy policy = make_policy(sys);
            Json report =
                detail::base_report(verifying ? "verify" : "reduce", cargs, loaded);
            report["system"] = to_json(sys);
            report["case"] = to_string(classify(sys));
            report["policy"] = policy.name();

            ReductionResult result;
            try {
                result = reduce(sys, policy);
            } catch (const NotReducibleError& e) {
                if (e.btilde_rank) report["witness"] = Json{{"btilde_rank", *e.btilde_rank}};
                if (e.conditions) report["conditions"] = to_json(*e.conditions);
                detail::emit(out, std::move(report), kNotReducible, e.what());
                return kNotReducible;
            }
            report["result"] = to_json(result);

            if (!verifying) {
                if (!out_path.empty()) {
                    if (result.reduced_is_exp())
                        throw Error(
                            "kernel reductions have no autonomous .qp form; "
                            "see the JSON report instead of -o");
                    std::ofstream f(out_path, std::ios::binary);
                    if (!f) throw Error("cannot write \"" + out_path + "\"");
                    f << render(result.reduced_qp());
                    report["output_path"] = out_path;
                }
                detail::emit(out, std::move(report), kOk);
                return kOk;
            }

            const QPSystem bound_sys = bind_params(sys, loaded.bindings);
            const ReductionResult bound_result = bind_params(result, loaded.bindings);
            VerifyReport vr;
            try {
                vr = verify_reduction(bound_sys, bound_result, detail::parse_state(x0_csv),
                                      t_end, tol);
            } catch (const Error& e) {
                detail::emit(out, std::move(report), kVerifyFailure, e.what());
                return kVerifyFailure;
            }
            report["verification"] = to_json(vr);
            const bool pass = (bound_result.method == ReductionMethod::QmtNtt
                                   ? vr.max_rel_error
                                   : vr.constants_drift) <= max_rel_error;
            const int code = pass ? kOk : kVerifyFailure;
            detail::emit(out, std::move(report), code,
                         pass ? "" : "relative error above threshold");
            return code;
        }

        if (cmd_export->parsed()) {
            detail::Loaded loaded = detail::load(export_args, false);
            if (format == "text") {
                out << render(loaded.raw);
                return kOk;
            }
            Json report = detail::base_report("export", export_args, loaded);
            report["system"] = to_json(loaded.raw);
            detail::emit(out, std::move(report), kOk);
            return kOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace qpr::cli
