#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rd/drformulas.hpp"
#include "rd/hierarchy.hpp"
#include "rd/parser.hpp"

namespace rdcli {

namespace {

using json = nlohmann::ordered_json;
using namespace rd;

json poly_json(const DiffPoly& p)
{
    json terms = json::array();
    for (const auto& [key, c] : p.terms()) {
        json jets = json::object();
        for (const auto& [order, e] : key.mono.jet_powers()) {
            jets[std::to_string(order)] = e;
        }
        terms.push_back({key.eps, key.mono.u_power(), jets,
                         c.is_numeric() ? to_fraction_string(c.constant()) : c.to_string()});
    }
    return {{"text", p.to_string()}, {"terms", terms}};
}

// Ordered entries rendered both as "key = value" text and as one JSON object.
class Report {
public:
    void value(const std::string& key, const std::string& text, json j)
    {
        text_.push_back(key + " = " + text);
        json_[key] = std::move(j);
    }
    void text(const std::string& key, const std::string& s) { value(key, s, s); }
    void rational(const std::string& key, const Rational& q) { value(key, to_string(q), to_fraction_string(q)); }
    void integer(const std::string& key, long n) { value(key, std::to_string(n), n); }
    void flag(const std::string& key, bool b) { value(key, b ? "yes" : "no", b); }
    void poly(const std::string& key, const DiffPoly& p) { value(key, p.to_string(), poly_json(p)); }
    void functional(const std::string& key, const LocalFunctional& f)
    {
        json j = poly_json(f.density());
        j["text"] = f.to_string();
        value(key, f.to_string(), j);
    }
    void op(const std::string& key, const DiffOperator& k)
    {
        json coeffs = json::array();
        for (const auto& c : k.coefficients()) {
            coeffs.push_back(poly_json(c));
        }
        value(key, k.to_string(), {{"text", k.to_string()}, {"coefficients", coeffs}});
    }
    void miura(const std::string& key, const MiuraTransformation& phi)
    {
        value(key, phi.to_string(), {{"text", phi.to_string()}, {"shift", poly_json(phi.shift())}});
    }
    void lines(const std::string& key, const std::vector<std::string>& ls)
    {
        for (const auto& l : ls) {
            text_.push_back(l);
        }
        json_[key] = ls;
    }
    void table(const std::string& key, const std::vector<std::string>& header, const std::vector<std::vector<Rational>>& rows,
               const std::vector<std::string>& extra)
    {
        std::string head;
        for (const auto& h : header) {
            head += (head.empty() ? "" : "\t") + h;
        }
        text_.push_back(head);
        json arr = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::string line;
            json row = json::object();
            for (std::size_t c = 0; c < rows[i].size(); ++c) {
                line += (c ? "\t" : "") + to_string(rows[i][c]);
                row[header[c]] = to_fraction_string(rows[i][c]);
            }
            line += "\t" + extra[i];
            row[header.back()] = extra[i];
            text_.push_back(line);
            arr.push_back(row);
        }
        json_[key] = arr;
    }
    void verdict(bool pass)
    {
        pass_ = pass;
        json_["status"] = pass ? "PASS" : "FAIL";
    }
    bool passed() const { return pass_; }

    void write(std::ostream& os, bool as_json, const std::string& command) const
    {
        if (as_json) {
            json j = {{"command", command}};
            j.update(json_);
            os << j.dump(2) << "\n";
            return;
        }
        for (const auto& l : text_) {
            os << l << "\n";
        }
        if (json_.contains("status")) {
            os << (pass_ ? "PASS" : "FAIL") << "\n";
        }
    }

private:
    std::vector<std::string> text_;
    json json_ = json::object();
    bool pass_ = true;
};

struct Config {
    int eps_order = 6;
    int u_cap = 0;
    std::string mode = "strict";
    std::vector<std::string> params;
    unsigned seed = 0;
    std::string format = "text";
    std::string out;
};

class Context {
public:
    Context(const Config& cfg, std::istream& in) : cfg_(cfg), in_(in)
    {
        if (cfg.eps_order < 0) {
            throw Error(ErrorCode::InvalidArgument, "--eps-order must be >= 0");
        }
        options_.truncation.eps = cfg.eps_order;
        if (cfg.u_cap > 0) {
            options_.truncation.u = cfg.u_cap;
        }
        options_.truncation.series = cfg.mode == "series";
        for (const auto& p : cfg.params) {
            const auto eq = p.find('=');
            const std::string name = p.substr(0, eq);
            if (name.empty()) {
                throw Error(ErrorCode::InvalidArgument, "empty parameter name in --param " + p);
            }
            options_.params[name] =
                eq == std::string::npos ? std::nullopt : std::optional<Rational>(parse_rational(p.substr(eq + 1)));
        }
    }

    int e() const { return cfg_.eps_order; }
    unsigned seed() const { return cfg_.seed; }
    const ParseOptions& options() const { return options_; }

    // "-" reads the expression from stdin (once).
    std::string source(const std::string& arg)
    {
        if (arg != "-") {
            return arg;
        }
        if (!stdin_) {
            stdin_ = std::string(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
        }
        return *stdin_;
    }

    DiffPoly poly(const std::string& arg) { return parse_poly(source(arg), options_); }
    LocalFunctional functional(const std::string& arg) { return parse_functional(source(arg), options_); }
    DiffOperator op(const std::string& arg) { return parse_operator(source(arg), options_); }

private:
    Config cfg_;
    std::istream& in_;
    ParseOptions options_;
    std::optional<std::string> stdin_;
};

DiffPoly kdv_flow(int e)
{
    return (DiffPoly::u() * DiffPoly::jet(1) + DiffPoly::monomial(ParamExpr(make_rational(1, 12)), Monomial(0, {3}), 2))
        .with_eps_cap(e);
}

LocalFunctional kdv_hamiltonian(int e)
{
    return integrate((DiffPoly::monomial(ParamExpr(make_rational(1, 6)), Monomial(3, {})) +
                      DiffPoly::monomial(ParamExpr(make_rational(-1, 24)), Monomial(0, {1, 1}), 2))
                         .with_eps_cap(e));
}

DiffPoly first_flow(Context& ctx, const std::string& spec)
{
    if (spec == "kdv") {
        return kdv_flow(ctx.e());
    }
    if (spec == "riemann") {
        return riemann_flow(1).with_eps_cap(ctx.e());
    }
    return ctx.poly(spec);
}

LocalFunctional first_hamiltonian(Context& ctx, const std::string& spec)
{
    if (spec == "kdv") {
        return kdv_hamiltonian(ctx.e());
    }
    if (spec == "riemann") {
        return riemann_hamiltonian(1);
    }
    return ctx.functional(spec);
}

Execution execution(const std::string& name)
{
    return name == "serial" ? Execution::serial : Execution::parallel;
}

void add_check(Report& r, const std::string& name, const CheckReport& c)
{
    r.integer(name + "_checks", c.checks);
    r.flag(name, c.passed);
    if (!c.passed) {
        r.text(name + "_failure", c.failure);
    }
}

// ---------------------------------------------------------------------------
// Subcommand options and handlers

struct Args {
    std::string p = "kdv";
    std::string q0;
    std::string h0;
    std::string h1 = "kdv";
    std::string k;
    std::string flows = "kdv";
    std::string templ = "alm";
    std::string exec = "parallel";
    std::vector<std::string> fix;
    int d = -1;
    int max_d = 3;
    int max_g = 3;
    int sample_weight = 6;
    int scramble = 0;
    bool no_precheck = false;
    bool all_orders = false;
};

Report cmd_reconstruct_flow(Context& ctx, const Args& a)
{
    const DiffPoly p = first_flow(ctx, a.p);
    DiffPoly q0;
    if (!a.q0.empty()) {
        q0 = ctx.poly(a.q0);
    } else if (a.d >= 0) {
        q0 = riemann_flow(a.d);
    } else {
        throw Error(ErrorCode::InvalidArgument, "give --q0 or --d");
    }
    Report r;
    r.integer("eps_order", ctx.e());
    r.poly("P", p);
    r.poly("Q", reconstruct_flow(p, q0, ctx.e()));
    return r;
}

Report cmd_reconstruct_conserved(Context& ctx, const Args& a)
{
    const DiffPoly p = first_flow(ctx, a.p);
    LocalFunctional h0;
    if (!a.h0.empty()) {
        h0 = ctx.functional(a.h0);
    } else if (a.d >= 0) {
        h0 = riemann_hamiltonian(a.d);
    } else {
        throw Error(ErrorCode::InvalidArgument, "give --h0 or --d");
    }
    Report r;
    r.integer("eps_order", ctx.e());
    r.poly("P", p);
    r.functional("h", reconstruct_conserved(p, h0, ctx.e()));
    return r;
}

Report cmd_commute(Context& ctx, const Args& a)
{
    const Hierarchy h = hierarchy_from_flow(first_flow(ctx, a.flows), a.max_d, ctx.e());
    Report r;
    r.integer("eps_order", ctx.e());
    for (int d = 0; d <= h.depth(); ++d) {
        r.poly("Q" + std::to_string(d), h.flows[d]);
    }
    const CheckReport c = commute_certificate(h, execution(a.exec));
    add_check(r, "commute", c);
    r.verdict(c.passed);
    return r;
}

Report cmd_reduce_dlyz(Context& ctx, const Args& a)
{
    LocalFunctional h1 = first_hamiltonian(ctx, a.h1);
    Report r;
    r.integer("eps_order", ctx.e());
    if (a.scramble > 0) {
        std::mt19937 rng(ctx.seed());
        MiuraTransformation scr = MiuraTransformation::identity(ctx.e());
        for (int s = 0; s < a.scramble && ctx.e() >= 3; ++s) {
            const int level = std::uniform_int_distribution<int>(3, ctx.e())(rng);
            const auto lambdas = partitions_of(level - 1, PartitionKind::circ);
            const auto& lambda = lambdas[std::uniform_int_distribution<std::size_t>(0, lambdas.size() - 1)(rng)];
            const int num = std::uniform_int_distribution<int>(1, 3)(rng) * (rng() % 2 ? 1 : -1);
            const LocalFunctional g = integrate(DiffPoly::monomial(ParamExpr(num), Monomial::from_partition(lambda)));
            scr = compose(phi_hamiltonian(g, level, ctx.e()), scr);
        }
        h1 = integrate(apply_to_poly(scr, h1.density()));
        r.miura("scramble", scr);
        r.functional("scrambled", h1);
    }
    const DlyzResult res = dlyz_reduce(h1, ctx.e());
    r.miura("phi", res.phi);
    r.functional("h1", res.h1);
    r.flag("generalized_standard_form", is_generalized_standard_form(res.h1));
    r.lines("log", res.log);
    return r;
}

Report cmd_alm(Context& ctx, const Args& a)
{
    const DiffPoly p = a.p == "kdv" ? kdv_p1(ParamExpr(1)).with_eps_cap(ctx.e()) : ctx.poly(a.p);
    const AlmResult res = alm_normal_form(p, ctx.e());
    Report r;
    r.integer("eps_order", ctx.e());
    r.miura("phi", res.phi);
    r.poly("f", res.f);
    r.poly("normal_form", res.normal_form);
    return r;
}

Report cmd_poisson_check(Context& ctx, const Args& a)
{
    const DiffOperator k = ctx.op(a.k.empty() ? "D" : a.k);
    const PoissonReport rep = is_poisson(k, default_poisson_samples(a.sample_weight), ctx.e(), execution(a.exec));
    Report r;
    r.integer("eps_order", ctx.e());
    r.op("K", k);
    r.flag("skew", rep.skew);
    r.flag("jacobi", rep.jacobi);
    if (!rep.passed()) {
        r.text("violation", rep.violation);
    }
    r.verdict(rep.passed());
    return r;
}

Report cmd_normalize_poisson(Context& ctx, const Args& a)
{
    const DiffOperator k = ctx.op(a.k.empty() ? "D" : a.k);
    NormalizeOptions opts;
    opts.precheck = !a.no_precheck;
    opts.sample_weight = a.sample_weight;
    opts.exec = execution(a.exec);
    const NormalizationReport rep = normalize_poisson(k, ctx.e(), opts);
    const DiffOperator result = conjugate(k.with_eps_cap(ctx.e()), rep.phi);
    Report r;
    r.integer("eps_order", ctx.e());
    r.miura("phi", rep.phi);
    r.integer("steps", rep.steps);
    r.op("conjugated", result);
    r.lines("log", rep.log);
    r.verdict(result == DiffOperator::dx().with_eps_cap(ctx.e()));
    return r;
}

Report cmd_tau_check(Context& ctx, const Args& a)
{
    const Hierarchy h = special_hierarchy(first_hamiltonian(ctx, a.h1), a.max_d, ctx.e());
    Report r;
    r.integer("eps_order", ctx.e());
    for (std::size_t d = 0; d < h.hamiltonians.size(); ++d) {
        r.functional("h" + std::to_string(d), h.hamiltonians[d]);
    }
    const CheckReport special = check_special(h);
    const CheckReport tau = check_tau(h);
    add_check(r, "special", special);
    add_check(r, "tau", tau);
    r.verdict(special.passed && tau.passed);
    return r;
}

Report cmd_constants(Context&, const Args& a)
{
    if (a.max_g < 2) {
        throw Error(ErrorCode::OutOfRange, "--max-g must be >= 2");
    }
    std::vector<std::vector<Rational>> rows;
    std::vector<std::string> heads;
    for (int g = 2; g <= a.max_g; ++g) {
        rows.push_back({Rational(g), alpha(g), beta(g), gamma(g), a_2g_head(g), hodge_value(HodgeKind::b_h, g),
                        hodge_value(HodgeKind::lambda_triple, g)});
        heads.push_back(c2g_head(g).to_string());
    }
    Report r;
    r.rational("c_2", c2g_head(1).constant());
    r.table("table", {"g", "alpha", "beta", "gamma", "a_2g_head", "b_h", "lambda_triple", "c_2g_head"}, rows, heads);
    for (int g = 2; g <= a.max_g; ++g) {
        r.rational("alpha_" + std::to_string(g), alpha(g));
        r.rational("beta_" + std::to_string(g), beta(g));
        r.rational("gamma_" + std::to_string(g), gamma(g));
    }
    return r;
}

Report cmd_constraints(Context& ctx, const Args& a)
{
    std::map<std::string, Rational> fixed;
    for (const auto& f : a.fix) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "--fix expects NAME=p/q, got " + f);
        }
        fixed[f.substr(0, eq)] = parse_rational(f.substr(eq + 1));
    }
    for (const auto& [name, v] : ctx.options().params) {
        if (v) {
            fixed[name] = *v;
        }
    }
    DiffPoly tmpl;
    if (a.templ == "alm") {
        tmpl = alm_template(ctx.e(), fixed, !a.all_orders);
    } else {
        tmpl = ctx.poly(a.templ);
        for (const auto& [name, v] : fixed) {
            tmpl = tmpl.substitute_parameter(name, ParamExpr(v));
        }
    }
    const ConstraintReport rep = extract_constraints(tmpl, ctx.e());
    Report r;
    r.integer("eps_order", ctx.e());
    r.poly("template", tmpl);
    for (const auto& [name, v] : rep.solved) {
        if (v.is_numeric()) {
            r.rational(name, v.constant());
        } else {
            r.text(name, v.to_string());
        }
    }
    std::string under;
    for (const auto& n : rep.underdetermined) {
        under += (under.empty() ? "" : ", ") + n;
    }
    r.value("underdetermined", under.empty() ? "none" : under, rep.underdetermined);
    std::vector<std::string> residual;
    for (const auto& e : rep.residual) {
        residual.push_back("0 = " + e.to_string());
    }
    r.lines("residual", residual);
    return r;
}

Report cmd_bridge(Context& ctx, const Args& a)
{
    const BridgeReport rep = gsf_alm_bridge(first_hamiltonian(ctx, a.h1), ctx.e());
    Report r;
    r.integer("eps_order", ctx.e());
    r.poly("P1", rep.p1);
    r.flag("normal_form", rep.normal_form);
    r.flag("relations", rep.relations);
    r.lines("lines", rep.lines);
    r.verdict(rep.passed());
    return r;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact computations with deformations of the Riemann hierarchy"};
    app.fallthrough();
    app.require_subcommand(1);
    Config cfg;
    Args a;
    app.add_option("--eps-order", cfg.eps_order, "truncation order E")->envname("RD_EPS_ORDER");
    app.add_option("--u-cap", cfg.u_cap, "maximal u-degree (0: none)");
    app.add_option("--mode", cfg.mode, "u-degree overflow handling")->check(CLI::IsMember({"strict", "series"}));
    app.add_option("--param", cfg.params, "declare a parameter, NAME or NAME=p/q");
    app.add_option("--seed", cfg.seed, "seed for randomized steps");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--out", cfg.out, "write output to a file");

    const auto exec_opt = [&](CLI::App* s) {
        s->add_option("--exec", a.exec, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
    };
    auto* rf = app.add_subcommand("reconstruct-flow", "Q with Q|eps=0 = Q0 commuting with P");
    rf->add_option("--p", a.p, "first flow P (or kdv, riemann)");
    rf->add_option("--q0", a.q0, "dispersionless part of Q");
    rf->add_option("--d", a.d, "use Q0 = u^d/d! u1");
    auto* rc = app.add_subcommand("reconstruct-conserved", "conserved quantity extending h0");
    rc->add_option("--p", a.p, "first flow P (or kdv, riemann)");
    rc->add_option("--h0", a.h0, "dispersionless functional int(...)");
    rc->add_option("--d", a.d, "use h0 = int u^{d+2}/(d+2)!");
    auto* cm = app.add_subcommand("commute", "reconstruct Q_0..Q_D and certify commutativity");
    cm->add_option("--flows", a.flows, "kdv, riemann or a first flow P");
    cm->add_option("--max-d", a.max_d, "depth D");
    exec_opt(cm);
    auto* dl = app.add_subcommand("reduce-dlyz", "bring h1 to generalized standard form");
    dl->add_option("--h1", a.h1, "h1 = int(...) (or kdv)");
    dl->add_option("--scramble", a.scramble, "apply N random d_x-preserving normal maps first (uses --seed)");
    auto* al = app.add_subcommand("alm-normal-form", "ALM normal form of a conservation law u_t = d_x P");
    al->add_option("--p", a.p, "P (or kdv)");
    auto* pc = app.add_subcommand("poisson-check", "skew-symmetry and Jacobi identity of K");
    pc->add_option("--k", a.k, "operator, e.g. 'D + eps^2*D^3'");
    pc->add_option("--sample-weight", a.sample_weight, "maximal weight of sample functionals");
    exec_opt(pc);
    auto* np = app.add_subcommand("normalize-poisson", "normal Miura map taking K to D");
    np->add_option("--k", a.k, "operator");
    np->add_option("--sample-weight", a.sample_weight, "maximal weight of sample functionals");
    np->add_flag("--no-precheck", a.no_precheck, "skip the Poisson precheck");
    exec_opt(np);
    auto* tc = app.add_subcommand("tau-check", "special and tau-symmetry checks of the hierarchy of h1");
    tc->add_option("--h1", a.h1, "h1 = int(...) (or kdv, riemann)");
    tc->add_option("--max-d", a.max_d, "depth D");
    auto* co = app.add_subcommand("constants", "closed-form DR coefficients");
    co->add_option("--max-g", a.max_g, "largest genus");
    auto* cs = app.add_subcommand("constraints", "solve commutativity for template parameters");
    cs->add_option("--template", a.templ, "alm or a parametric P");
    cs->add_option("--fix", a.fix, "pin a parameter, NAME=p/q");
    cs->add_flag("--all-orders", a.all_orders, "include odd eps orders in the alm template");
    auto* br = app.add_subcommand("bridge-check", "normal form and c-relations of P_1 = delta h1");
    br->add_option("--h1", a.h1, "h1 in generalized standard form (or kdv)");

    std::vector<const char*> argv;
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx(cfg, in);
        const std::map<CLI::App*, Report (*)(Context&, const Args&)> handlers = {
            {rf, cmd_reconstruct_flow}, {rc, cmd_reconstruct_conserved}, {cm, cmd_commute},
            {dl, cmd_reduce_dlyz},      {al, cmd_alm},                   {pc, cmd_poisson_check},
            {np, cmd_normalize_poisson}, {tc, cmd_tau_check},            {co, cmd_constants},
            {cs, cmd_constraints},      {br, cmd_bridge}};
        CLI::App* sub = app.get_subcommands().front();
        const Report report = handlers.at(sub)(ctx, a);
        if (cfg.out.empty()) {
            report.write(out, cfg.format == "json", sub->get_name());
        } else {
            std::ofstream file(cfg.out);
            if (!file) {
                err << "cannot open " << cfg.out << "\n";
                return 1;
            }
            report.write(file, cfg.format == "json", sub->get_name());
        }
        return report.passed() ? 0 : 2;
    } catch (const Error& e) {
        err << "error " << static_cast<int>(e.code()) << ": " << e.what() << "\n";
        return is_mathematical(e.code()) ? 2 : 1;
    }
}

} // namespace rdcli
