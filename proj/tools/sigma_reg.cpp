#include "sigreg/corpus.hpp"
#include "sigreg/json_io.hpp"
#include "sigreg/parse.hpp"
#include "sigreg/tableau.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace sigreg;

namespace {

// Exit codes: 0 success, 1 usage or parse errors, 2 SA failure without
// conversion, 3 conversion stuck, 4 ill posed.
int exit_code_for(Verdict v) {
    switch (v) {
    case Verdict::Success:
    case Verdict::CancellationDetected:
        return 0;
    case Verdict::IdenticallySingular:
    case Verdict::StructurallySingular:
        return 2;
    case Verdict::ConversionStuck:
        return 3;
    case Verdict::StructurallyIllPosed:
        return 4;
    }
    return 1;
}

struct CommonArgs {
    std::string file;
    bool json = false;
    bool fold = false;
    std::vector<std::string> subst;
    std::string offsets_c, offsets_d;
    std::uint64_t seed = 20240901;
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

DaeSystem load_system(const CommonArgs& args) {
    DaeSystem sys = parse_dae_file(args.file);
    if (args.fold) sys = sys.folded();
    return sys;
}

PipelineOptions options_for(const DaeSystem& sys, const CommonArgs& args) {
    PipelineOptions opt;
    opt.seed = args.seed;
    for (auto& s : args.subst) opt.reductions.push_back(parse_expression(sys, s));
    if (!args.offsets_c.empty() || !args.offsets_d.empty()) {
        if (args.offsets_c.empty() || args.offsets_d.empty())
            throw Error("--offsets-c and --offsets-d must be given together");
        Offsets off;
        off.c = parse_int_list(args.offsets_c);
        off.d = parse_int_list(args.offsets_d);
        opt.user_offsets = off;
    }
    return opt;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural analysis and regularization of DAE systems"};
    app.require_subcommand(1);
    bool no_color = false;
    app.add_flag("--no-color", no_color, "disable color output (output is plain already)");

    CommonArgs parse_args;
    auto* cmd_parse = app.add_subcommand("parse", "parse a DAE file and echo it back");
    cmd_parse->add_option("file", parse_args.file)->required();
    cmd_parse->add_flag("--json", parse_args.json);

    CommonArgs an_args;
    auto* cmd_analyze = app.add_subcommand("analyze", "run structural analysis");
    cmd_analyze->add_option("file", an_args.file)->required();
    cmd_analyze->add_flag("--json", an_args.json);
    cmd_analyze->add_flag("--fold", an_args.fold, "fold declared constant values");
    cmd_analyze->add_option("--subst", an_args.subst,
                            "declared substitution rel=0 applied before classification");
    cmd_analyze->add_option("--offsets-c", an_args.offsets_c, "user equation offsets");
    cmd_analyze->add_option("--offsets-d", an_args.offsets_d, "user variable offsets");
    cmd_analyze->add_option("--seed", an_args.seed);

    CommonArgs cv_args;
    std::string method = "auto";
    int pivot = 0;
    std::string user_u;
    int max_iters = -1;
    auto* cmd_convert = app.add_subcommand("convert", "regularize by conversion steps");
    cmd_convert->add_option("file", cv_args.file)->required();
    cmd_convert->add_option("--method", method)->check(CLI::IsMember({"lc", "es", "auto"}));
    cmd_convert->add_option("--pivot", pivot, "1-based pivot for the first step");
    cmd_convert->add_option("--u", user_u, "semicolon-separated kernel vector for the first step");
    cmd_convert->add_option("--max-iters", max_iters);
    cmd_convert->add_flag("--json", cv_args.json);
    cmd_convert->add_flag("--fold", cv_args.fold);
    cmd_convert->add_option("--subst", cv_args.subst);
    cmd_convert->add_option("--seed", cv_args.seed);

    CommonArgs sc_args;
    int stages = 0;
    auto* cmd_scheme = app.add_subcommand("scheme", "print the stage-wise solution scheme");
    cmd_scheme->add_option("file", sc_args.file)->required();
    cmd_scheme->add_option("--stages", stages, "highest stage k to print");
    cmd_scheme->add_flag("--json", sc_args.json);
    cmd_scheme->add_option("--offsets-c", sc_args.offsets_c);
    cmd_scheme->add_option("--offsets-d", sc_args.offsets_d);

    CommonArgs ck_args;
    std::string point_file;
    double tol_r = 1e-9, tol_s = -1.0;
    auto* cmd_check = app.add_subcommand("check", "numeric success check at a point");
    cmd_check->add_option("file", ck_args.file)->required();
    cmd_check->add_option("--point", point_file)->required();
    cmd_check->add_option("--tol-r", tol_r);
    cmd_check->add_option("--tol-s", tol_s);
    cmd_check->add_flag("--json", ck_args.json);
    cmd_check->add_flag("--fold", ck_args.fold);

    std::string corpus_dir;
    bool corpus_json = false;
    auto* cmd_corpus = app.add_subcommand("corpus", "run a corpus directory of .dae files");
    cmd_corpus->add_option("dir", corpus_dir)->required();
    cmd_corpus->add_flag("--json", corpus_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_parse) {
            DaeSystem sys = parse_dae_file(parse_args.file);
            if (parse_args.json)
                std::cout << system_to_json(sys).dump(2) << "\n";
            else
                std::cout << render_dae(sys);
            return 0;
        }
        if (*cmd_analyze) {
            DaeSystem sys = load_system(an_args);
            PipelineOptions opt = options_for(sys, an_args);
            AnalysisReport rep = analyze(sys, opt);
            if (an_args.json)
                std::cout << report_to_json(sys, rep).dump(2) << "\n";
            else
                std::cout << render_report(sys, rep);
            return exit_code_for(rep.verdict);
        }
        if (*cmd_convert) {
            DaeSystem sys = load_system(cv_args);
            PipelineOptions opt = options_for(sys, cv_args);
            opt.max_iters = max_iters;
            if (pivot > 0) opt.pivot = pivot - 1;
            if (!user_u.empty()) {
                if (method == "auto")
                    throw Error("--u requires --method lc or --method es");
                std::vector<Expression> u;
                std::istringstream in(user_u);
                std::string tok;
                while (std::getline(in, tok, ';'))
                    u.push_back(parse_expression(sys, tok));
                opt.user_u = std::move(u);
            }
            opt.policy = method == "lc"   ? Policy::LcOnly
                         : method == "es" ? Policy::EsOnly
                                          : Policy::LcFirst;
            AnalysisReport rep = regularize(sys, opt);
            if (cv_args.json)
                std::cout << report_to_json(sys, rep).dump(2) << "\n";
            else
                std::cout << render_report(sys, rep);
            return exit_code_for(rep.verdict);
        }
        if (*cmd_scheme) {
            DaeSystem sys = load_system(sc_args);
            PipelineOptions opt = options_for(sys, sc_args);
            SignatureMatrix sm = signature_matrix(sys);
            if (!sm.finite()) {
                std::cerr << "structurally ill-posed: no finite transversal\n";
                return 4;
            }
            Offsets off = opt.user_offsets ? *opt.user_offsets : canonical_offsets(sm);
            if (opt.user_offsets && !validate_offsets(sm, off.c, off.d))
                throw Error("user-supplied offsets are not valid for this system");
            SolutionScheme sch = solution_scheme(sys, sm, off, stages);
            if (sc_args.json)
                std::cout << scheme_to_json(sys, sch).dump(2) << "\n";
            else
                std::cout << render_scheme(sys, sch);
            return 0;
        }
        if (*cmd_check) {
            DaeSystem sys = load_system(ck_args);
            SignatureMatrix sm = signature_matrix(sys);
            if (!sm.finite()) {
                std::cerr << "structurally ill-posed: no finite transversal\n";
                return 4;
            }
            Offsets off = canonical_offsets(sm);
            ValuePoint p = parse_point_file(sys, point_file);
            SuccessCheck chk = success_check(sys, sm, off, p, tol_r, tol_s);
            if (ck_args.json)
                std::cout << check_to_json(sys, chk).dump(2) << "\n";
            else {
                for (auto& r : chk.residuals)
                    std::cout << "stage " << r.k << "  " << sys.eqs[r.eq].name
                              << (r.order ? "^(" + std::to_string(r.order) + ")" : "")
                              << " residual = " << r.residual << "\n";
                std::cout << "det(J) = " << chk.det << "  (tol_s = " << chk.tol_s << ")\n"
                          << "verdict: " << (chk.success ? "success" : "failure");
                if (!chk.success) std::cout << "  (" << chk.detail << ")";
                std::cout << "\n";
            }
            return chk.success ? 0 : 2;
        }
        if (*cmd_corpus) {
            CorpusSummary sum = corpus_run(corpus_dir);
            if (corpus_json) {
                json j = json::array();
                for (auto& e : sum.entries)
                    j.push_back({{"file", e.file},
                                 {"status", e.config_error ? "config-error"
                                            : e.pass      ? "pass"
                                                          : "fail"},
                                 {"message", e.message}});
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << render_corpus_summary(sum);
            }
            return sum.failed == 0 ? 0 : 2;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
