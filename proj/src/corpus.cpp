#include "sigreg/corpus.hpp"
#include "sigreg/parse.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace sigreg {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(trim(tok)));
    return out;
}

} // namespace

Expectation parse_expectation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Expectation e;
    e.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "mode") e.mode = val;
        else if (key == "val") e.val = std::stoll(val);
        else if (key == "index") e.index = std::stoi(val);
        else if (key == "dof") e.dof = std::stoll(val);
        else if (key == "verdict") e.verdict = val;
        else if (key == "det") e.det = val;
        else if (key == "iterations") e.iterations = std::stoi(val);
        else if (key == "val_trace") e.val_trace = val;
        else if (key == "dindex") e.dindex = std::stoi(val);
        else if (key == "subst") e.subst.push_back(val);
        else if (key == "offsets_c") e.offsets_c = val;
        else if (key == "offsets_d") e.offsets_d = val;
        else if (key == "pivot") e.pivot = std::stoi(val);
        else throw Error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return e;
}

CorpusEntry run_expectation(const std::string& dae_path, const Expectation& exp) {
    CorpusEntry out;
    out.file = dae_path;
    std::ostringstream msg;
    bool ok = true;

    DaeSystem sys = parse_dae_file(dae_path);
    PipelineOptions opt;
    for (auto& s : exp.subst) opt.reductions.push_back(parse_expression(sys, s));
    if (exp.offsets_c && exp.offsets_d) {
        Offsets off;
        off.c = parse_int_list(*exp.offsets_c);
        off.d = parse_int_list(*exp.offsets_d);
        opt.user_offsets = off;
    }
    if (exp.pivot) opt.pivot = *exp.pivot - 1;

    AnalysisReport rep;
    if (exp.mode == "analyze") {
        rep = analyze(sys, opt);
    } else if (exp.mode == "regularize-lc") {
        opt.policy = Policy::LcOnly;
        rep = regularize(sys, opt);
    } else if (exp.mode == "regularize-es") {
        opt.policy = Policy::EsOnly;
        rep = regularize(sys, opt);
    } else if (exp.mode == "regularize-auto") {
        opt.policy = Policy::LcFirst;
        rep = regularize(sys, opt);
    } else {
        throw Error("unknown mode '" + exp.mode + "'");
    }

    auto check = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            msg << (msg.tellp() > 0 ? "; " : "") << what;
        }
    };

    const IterationRecord& first = rep.iterations.front();
    const IterationRecord& last = rep.iterations.back();
    if (exp.val) check(first.sigma.finite() && first.sigma.val == *exp.val,
                       "val mismatch");
    if (exp.verdict) check(verdict_name(rep.verdict) == *exp.verdict,
                           std::string("verdict = ") + verdict_name(rep.verdict));
    if (exp.index)
        check(last.sigma.finite() && last.index == *exp.index, "index mismatch");
    if (exp.dof) check(first.sigma.finite() && first.dof == *exp.dof, "dof mismatch");
    if (exp.dindex)
        check(last.sigma.finite() && last.index >= *exp.dindex,
              "structural index below differentiation index");
    if (exp.iterations) {
        int steps = 0;
        for (auto& it : rep.iterations)
            if (it.step) ++steps;
        check(steps == *exp.iterations, "iteration count mismatch");
    }
    if (exp.val_trace) {
        std::ostringstream tr;
        for (size_t i = 0; i < rep.iterations.size(); ++i) {
            if (!rep.iterations[i].sigma.finite()) break;
            tr << (i ? "," : "") << rep.iterations[i].sigma.val;
        }
        check(tr.str() == *exp.val_trace, "val trace " + tr.str());
    }
    if (exp.det) {
        if (!last.det) {
            check(false, "no determinant reported");
        } else {
            Expression expected = parse_expression(*rep.final_system, *exp.det);
            Expression got = *last.det;
            for (auto& rel : opt.reductions) got = got.reduce_mod(rel);
            check(same_equation(got, expected),
                  "det = " + got.str(rep.final_system->namer()));
        }
    }

    out.pass = ok;
    out.message = ok ? "ok" : msg.str();
    return out;
}

CorpusSummary corpus_run(const std::string& dir) {
    namespace fs = std::filesystem;
    CorpusSummary sum;
    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (auto& p : fs::directory_iterator(dir))
            if (p.path().extension() == ".dae") files.push_back(p.path());
    std::sort(files.begin(), files.end());

    std::vector<std::future<CorpusEntry>> jobs;
    for (auto& f : files) {
        jobs.push_back(std::async(std::launch::async, [f]() {
            CorpusEntry out;
            out.file = f.string();
            fs::path exp_path = f;
            exp_path.replace_extension(".exp");
            try {
                if (!fs::exists(exp_path)) {
                    // no expectations: parse and analyze only
                    DaeSystem sys = parse_dae_file(f.string());
                    analyze(sys);
                    out.pass = true;
                    out.message = "analyzed (no expectations)";
                    return out;
                }
                Expectation exp;
                try {
                    exp = parse_expectation(exp_path.string());
                } catch (const Error& e) {
                    out.config_error = true;
                    out.message = e.what();
                    return out;
                }
                return run_expectation(f.string(), exp);
            } catch (const std::exception& e) {
                out.pass = false;
                out.message = e.what();
                return out;
            }
        }));
    }
    for (auto& j : jobs) {
        CorpusEntry e = j.get();
        if (e.config_error) ++sum.config_errors;
        else if (e.pass) ++sum.passed;
        else ++sum.failed;
        sum.entries.push_back(std::move(e));
    }
    return sum;
}

std::string render_corpus_summary(const CorpusSummary& s) {
    std::ostringstream os;
    for (auto& e : s.entries) {
        std::string status = e.config_error ? "CONFIG" : (e.pass ? "PASS" : "FAIL");
        os << status << "  " << e.file;
        if (!e.pass || e.config_error) os << "  (" << e.message << ")";
        os << "\n";
    }
    os << s.passed << " passed, " << s.failed << " failed, " << s.config_errors
       << " config errors\n";
    return os.str();
}

} // namespace sigreg
