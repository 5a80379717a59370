#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "presym/report.hpp"

using namespace presym;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;       // parse/load/usage errors
constexpr int kExitBifurcation = 2;  // stabilization aborted or capped
constexpr int kExitVerifyFail = 3;   // verify rows failed

struct CommonArgs {
    std::string example;
    std::string model_file;
    std::string report = "text";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    auto* ex = cmd->add_option("--example", args.example, "built-in model name");
    auto* mf = cmd->add_option("--model", args.model_file, "model file path");
    ex->excludes(mf);
    cmd->add_option("--report", args.report, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", args.seed, "seed for all sampling")->capture_default_str();
}

Model load(const CommonArgs& args) {
    ValidationOptions vo;
    vo.seed = args.seed;
    if (!args.example.empty()) return builtin_model(args.example, vo);
    if (!args.model_file.empty()) return load_model_file(args.model_file, vo);
    throw std::runtime_error("pass --example NAME or --model FILE");
}

std::vector<Rational> parse_mu(const std::string& text) {
    std::vector<Rational> mu;
    std::string cur;
    auto flush = [&] {
        size_t a = cur.find_first_not_of(" \t");
        if (a == std::string::npos) throw std::runtime_error("empty entry in --mu");
        auto chart = Chart::make("mu", {});
        Poly p = parse_poly(cur, chart);
        if (!p.is_constant()) throw std::runtime_error("non-rational entry in --mu");
        mu.push_back(p.constant_value());
        cur.clear();
    };
    for (char c : text) {
        if (c == ',')
            flush();
        else
            cur += c;
    }
    flush();
    return mu;
}

std::map<int, Rational> parse_point(const std::string& text, const Chart::Ptr& chart) {
    std::map<int, Rational> pt;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--point entries must look like var=value");
        std::string var = item.substr(0, eq);
        var.erase(0, var.find_first_not_of(" \t"));
        var.erase(var.find_last_not_of(" \t") + 1);
        auto scalar = Chart::make("pt", {});
        Poly v = parse_poly(item.substr(eq + 1), scalar);
        pt[chart->require_index(var)] = v.constant_value();
    }
    for (int i = 0; i < chart->size(); ++i)
        if (!pt.count(i))
            throw std::runtime_error("--point misses variable " + chart->var_name(i));
    return pt;
}

void emit(const std::string& text, const Json& json, const std::string& format) {
    if (format == "json")
        std::cout << json.dump(2) << "\n";
    else
        std::cout << text;
}

int cmd_stabilize(const CommonArgs& args, bool sode) {
    Model model = load(args);
    StabilizeOptions opts;
    opts.seed = args.seed;
    StabilizationReport rep = stabilize_model(model, sode, opts);
    emit(render_text(rep, model.name), render_json(rep, model.name, args.seed), args.report);
    if (rep.bifurcation || !rep.terminated) return kExitBifurcation;
    return kExitOk;
}

int cmd_reduce(const CommonArgs& args, bool sode, const std::string& mu_text,
               const std::string& point_text, const std::string& route) {
    Model model = load(args);
    StabilizeOptions sopts;
    sopts.seed = args.seed;
    Finalized fin = finalize_model(model, sode, sopts);
    MomentumMap mm = build_momentum(fin.system, fin.action);
    std::vector<Rational> mu = mu_text.empty() ? model.default_mu : parse_mu(mu_text);
    if (mu.size() != mm.action.size())
        throw std::runtime_error("--mu needs " + std::to_string(mm.action.size()) +
                                 " entries for this model, got " + std::to_string(mu.size()));
    ConstraintSet level = level_set(mm, mu);

    std::map<int, Rational> pt;
    if (point_text.empty() || point_text == "auto") {
        // sample on the level set (plus the carried ambient constraints)
        std::vector<Poly> cs = level.constraints();
        if (fin.ambient_constraints)
            for (const auto& c : fin.ambient_constraints->constraints()) cs.push_back(c);
        bool same_chart = fin.system.chart()->same_as(*model.chart);
        OnSetSampler sampler(fin.system.chart(),
                             same_chart ? model.sampler : std::optional<SamplerHints>{});
        Rng rng(args.seed);
        auto sampled = sampler.sample(cs, rng);
        if (!sampled)
            throw std::runtime_error("could not sample an on-level point; pass --point");
        pt = *sampled;
    } else {
        pt = parse_point(point_text, fin.system.chart());
    }

    ReduceOptions ropts;
    ropts.seed = args.seed;
    if (route == "all") {
        RouteReport rep = route_equivalence(fin.system, mm, mu, pt, ropts);
        emit(render_text(rep, model.name), render_json(rep, model.name, args.seed), args.report);
        return rep.consistent ? kExitOk : kExitError;
    }
    std::optional<ReducedSpace> red;
    if (route == "complete") {
        red = reduce(fin.system, mm, mu, pt, ropts);
    } else {
        RouteReport rep = route_equivalence(fin.system, mm, mu, pt, ropts);
        for (auto& p : rep.pipelines) {
            if (p.name != route) continue;
            if (!p.ok) throw std::runtime_error(p.name + " pipeline failed: " + p.error);
            red = std::move(p.space);
        }
        if (!red) throw std::runtime_error("unknown route " + route);
    }
    emit(render_text(*red, model.name, route), render_json(*red, model.name, route, args.seed),
         args.report);
    return kExitOk;
}

int cmd_verify(const CommonArgs& args) {
    std::string name, text;
    if (!args.example.empty()) {
        name = args.example;
        text = builtin_model_text(args.example);
    } else if (!args.model_file.empty()) {
        std::ifstream in(args.model_file);
        if (!in) throw std::runtime_error("cannot open model file " + args.model_file);
        std::stringstream buf;
        buf << in.rdbuf();
        name = args.model_file;
        text = buf.str();
    } else {
        throw std::runtime_error("pass --example NAME or --model FILE");
    }
    VerifyReport rep = run_verify_text(text, args.seed);
    emit(render_text(rep, name), render_json(rep, name, args.seed), args.report);
    return rep.all_pass() ? kExitOk : kExitVerifyFail;
}

int cmd_examples(bool show, const std::string& name) {
    if (show) {
        std::cout << builtin_model_text(name);
        return kExitOk;
    }
    for (const auto& n : builtin_model_names()) std::cout << n << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"presym: exact presymplectic constraint analysis and reduction"};
    app.require_subcommand(1);

    CommonArgs stab_args, red_args, ver_args;
    bool stab_sode = false, red_sode = false;
    std::string mu_text, point_text = "auto", route = "complete";
    std::string show_name;

    auto* stab = app.add_subcommand("stabilize", "run the constraint stabilization algorithm");
    add_common(stab, stab_args);
    stab->add_flag("--sode", stab_sode, "demand second-order solutions");

    auto* red = app.add_subcommand("reduce", "momentum level sets and reduction");
    add_common(red, red_args);
    red->add_flag("--sode", red_sode, "stabilize with the SODE condition first");
    red->add_option("--mu", mu_text, "comma-separated momentum value");
    red->add_option("--point", point_text, "base point var=val,... or 'auto'");
    red->add_option("--route", route, "reduction pipeline")
        ->check(CLI::IsMember({"complete", "gauge-then-symplectic", "coisotropic", "all"}));

    auto* ver = app.add_subcommand("verify", "run the invariant battery");
    add_common(ver, ver_args);

    auto* ex = app.add_subcommand("examples", "list or show the built-in models");
    ex->add_option("--show", show_name, "print a built-in model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (stab->parsed()) return cmd_stabilize(stab_args, stab_sode);
        if (red->parsed()) return cmd_reduce(red_args, red_sode, mu_text, point_text, route);
        if (ver->parsed()) return cmd_verify(ver_args);
        if (ex->parsed()) return cmd_examples(!show_name.empty(), show_name);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const BifurcationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBifurcation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
