#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "rd/parser.hpp"

using namespace rd;

namespace {

DiffPoly u() { return DiffPoly::u(); }
DiffPoly j(int n) { return DiffPoly::jet(n); }
DiffPoly eps(int k = 1) { return DiffPoly::eps(k); }
DiffPoly q(long a, long b = 1) { return DiffPoly(ParamExpr(make_rational(a, b))); }

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, const std::string& input = "")
{
    args.insert(args.begin(), "rd");
    std::istringstream in(input);
    std::ostringstream out, err;
    const int status = rdcli::run(args, in, out, err);
    return {status, out.str(), err.str()};
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("parse: examples")
{
    CHECK(parse_poly("u^2/2 + (1/12)*eps^2*u2") == q(1, 2) * u() * u() + q(1, 12) * eps(2) * j(2));
    const Expression h = parse("int(u^3/6 - (1/24)*eps^2*u1^2)");
    REQUIRE(std::holds_alternative<LocalFunctional>(h));
    CHECK(std::get<LocalFunctional>(h) == integrate(q(1, 6) * u() * u() * u() - q(1, 24) * eps(2) * j(1) * j(1)));

    ParseOptions declared;
    declared.params["c2"] = std::nullopt;
    CHECK(parse_poly("c2*eps^2*u2", declared) == DiffPoly::parameter("c2") * eps(2) * j(2));
    declared.params["c4"] = make_rational(3, 2);
    CHECK(parse_poly("c4*u4", declared) == q(3, 2) * j(4));

    CHECK(parse_poly("ux*uxx + uxxx") == j(1) * j(2) + j(3));
    CHECK(parse_poly("dx(u^2)") == q(2) * u() * j(1));
    CHECK(parse_poly("-(u - 2)^2") == -(u() * u()) + q(4) * u() - q(4));
    CHECK(parse_operator("D*u") == DiffOperator({j(1), u()}));
    CHECK(parse_operator("D^3 + (u)*D + (u1)").to_string() == "D^3 + (u)*D + (u1)");
    CHECK(parse_miura("u -> u - eps^2*u2", 4).shift() == -eps(2) * j(2));
}

TEST_CASE("parse: errors")
{
    CHECK(code_of([] { (void)parse_poly("c2*u"); }) == ErrorCode::UnknownParameter);
    CHECK(code_of([] { (void)parse_poly("u +"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { (void)parse_poly("u / u1"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { (void)parse_poly("u / 0"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { (void)parse_poly("D*u"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { (void)parse_poly("(u"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { (void)parse_poly("u $ 2"); }) == ErrorCode::SyntaxError);
    try {
        (void)parse_poly("u + + ");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("column 5") != std::string::npos);
    }
    ParseOptions capped;
    capped.truncation.u = 2;
    CHECK(code_of([&] { (void)parse_poly("u^3", capped); }) == ErrorCode::UDegreeOverflow);
    capped.truncation.series = true;
    const DiffPoly dropped = parse_poly("u^3 + u", capped);
    CHECK(dropped == u());
    CHECK(dropped.truncated());
}

TEST_CASE("property: parse/render round trip")
{
    rdtest::Gen g(100);
    ParseOptions declared;
    for (const char* name : {"a", "b", "c22"}) {
        declared.params[name] = std::nullopt;
    }
    for (int i = 0; i < 100; ++i) {
        DiffPoly p = g.poly(4, g.integer(0, 6), 4, 4);
        if (i % 3 == 0) {
            // parametric coefficients, including mixed constant + parameter
            p += DiffPoly::monomial(ParamExpr::parameter("a", g.nonzero_rational()) + ParamExpr(g.rational()),
                                    g.monomial(g.integer(0, 3), 3), g.integer(0, 4));
            p += DiffPoly::monomial(ParamExpr::parameter("c22", g.nonzero_rational()), g.monomial(2, 2), 2);
        }
        const std::string text = p.to_string();
        CHECK_MESSAGE(parse_poly(text, declared) == p, text);
        if (i % 2 == 0) {
            const LocalFunctional f = integrate(p);
            const Expression e = parse(render(f), declared);
            REQUIRE(std::holds_alternative<LocalFunctional>(e));
            CHECK(std::get<LocalFunctional>(e) == f);
        }
    }
}

TEST_CASE("cli: spec examples")
{
    const Run constants = cli({"constants", "--max-g", "3"});
    CHECK(constants.status == 0);
    CHECK(constants.out.find("alpha_2 = 1/60") != std::string::npos);
    CHECK(constants.out.find("beta_2 = 1/48") != std::string::npos);
    CHECK(constants.out.find("gamma_2 = 1/60") != std::string::npos);

    const Run commute = cli({"commute", "--flows", "kdv", "--max-d", "3", "--eps-order", "6"});
    CHECK(commute.status == 0);
    CHECK(commute.out.ends_with("PASS\n"));

    // the c22 relation has weight 8, so it is pinned at eps^8, not eps^6
    const Run six = cli({"constraints", "--param", "c22", "--fix", "c2=1", "--fix", "c4=0", "--fix", "c6=1",
                         "--eps-order", "6"});
    CHECK(six.status == 0);
    CHECK(six.out.find("underdetermined = c22") != std::string::npos);
    const Run eight = cli({"constraints", "--param", "c22", "--fix", "c2=1", "--fix", "c4=0", "--fix", "c6=1",
                           "--fix", "c8=0", "--eps-order", "8"});
    CHECK(eight.status == 0);
    CHECK(eight.out.find("c22 = 35/18") != std::string::npos);
}

TEST_CASE("cli: subcommands")
{
    const Run flow = cli({"reconstruct-flow", "--p", "kdv", "--d", "2", "--eps-order", "4"});
    CHECK(flow.status == 0);
    CHECK(flow.out.find("Q = 1/2*u^2*u1 + 1/12*eps^2*u*u3 + 1/6*eps^2*u2*u1 + 1/240*eps^4*u5") != std::string::npos);

    const Run h = cli({"reconstruct-conserved", "--p", "u*u1 + 1/12*eps^2*u3", "--h0", "int(u^3/6)"});
    CHECK(h.status == 0);
    CHECK(h.out.find("h = int(1/6*u^3 - 1/24*eps^2*u1^2)") != std::string::npos);

    const Run alm = cli({"alm-normal-form", "--p", "u^2/2 + eps^2*u1^2", "--eps-order", "4"});
    CHECK(alm.status == 0);
    CHECK(alm.out.find("phi = u -> u - eps^2*u2 + 1/2*eps^4*u4") != std::string::npos);

    const Run dl = cli({"reduce-dlyz", "--h1", "kdv", "--scramble", "3", "--seed", "5"});
    CHECK(dl.status == 0);
    CHECK(dl.out.find("h1 = int(1/6*u^3 - 1/24*eps^2*u1^2)") != std::string::npos);
    CHECK(dl.out.find("generalized_standard_form = yes") != std::string::npos);

    CHECK(cli({"poisson-check", "--k", "D + eps^2*D^3", "--eps-order", "4", "--sample-weight", "4"}).status == 0);
    const Run skew = cli({"poisson-check", "--k", "u*D", "--eps-order", "2", "--sample-weight", "4"});
    CHECK(skew.status == 2);
    CHECK(skew.out.ends_with("FAIL\n"));

    const Run np = cli({"normalize-poisson", "--k", "D - eps^2*D^3", "--eps-order", "4", "--sample-weight", "4"});
    CHECK(np.status == 0);
    CHECK(np.out.find("conjugated = D") != std::string::npos);

    CHECK(cli({"tau-check", "--h1", "kdv", "--max-d", "2", "--eps-order", "4"}).status == 0);
    CHECK(cli({"bridge-check", "--h1", "int(u^3/6 + 3*eps^2*u1^2 + 5*eps^4*u2^2)"}).status == 0);
    CHECK(cli({"bridge-check", "--h1", "int(u^3/6 + eps^4*u1^4)"}).status == 2);
}

TEST_CASE("cli: exit codes and errors")
{
    CHECK(cli({}).status == 1);
    CHECK(cli({"no-such-command"}).status == 1);
    CHECK(cli({"constants", "--max-g", "x"}).status == 1);
    CHECK(cli({"--help"}).status == 0);
    const Run syntax = cli({"reconstruct-flow", "--p", "u*u1 +", "--d", "2"});
    CHECK(syntax.status == 1);
    CHECK(syntax.err.find("error 30") != std::string::npos);
    const Run unknown = cli({"alm-normal-form", "--p", "u^2/2 + c*eps^2*u2"});
    CHECK(unknown.status == 1);
    CHECK(unknown.err.find("UnknownParameter") != std::string::npos);
    // a wrong pinned c22 makes the system inconsistent
    const Run nosol = cli({"constraints", "--fix", "c2=1", "--fix", "c4=0", "--fix", "c6=0", "--fix", "c8=0", "--fix",
                           "c22=1", "--eps-order", "8"});
    CHECK(nosol.status == 2);
    CHECK(nosol.err.find("NoSolution") != std::string::npos);
}

TEST_CASE("cli: json mirrors text")
{
    const Run text = cli({"reconstruct-flow", "--p", "kdv", "--d", "2", "--eps-order", "4"});
    const Run js = cli({"reconstruct-flow", "--p", "kdv", "--d", "2", "--eps-order", "4", "--format", "json"});
    REQUIRE(js.status == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc["command"] == "reconstruct-flow");
    const std::string q_text = doc["Q"]["text"];
    CHECK(text.out.find("Q = " + q_text) != std::string::npos);
    // rebuild Q from the term arrays [eps, u_power, {jet: exp}, "p/q"]
    DiffPoly rebuilt;
    for (const auto& t : doc["Q"]["terms"]) {
        std::vector<int> jets;
        for (const auto& [order, e] : t[2].items()) {
            jets.insert(jets.end(), e.get<int>(), std::stoi(order));
        }
        const std::string coeff = t[3];
        CHECK(coeff.find('/') != std::string::npos);
        rebuilt.add_term(t[0].get<int>(), Monomial(t[1].get<int>(), jets), ParamExpr(parse_rational(coeff)));
    }
    CHECK(rebuilt == parse_poly(q_text));

    const Run cjs = cli({"constants", "--max-g", "2", "--format", "json"});
    const auto c = nlohmann::json::parse(cjs.out);
    CHECK(c["alpha_2"] == "1/60");
    CHECK(c["table"][0]["beta"] == "1/48");
}

TEST_CASE("cli: determinism, stdin, env and --out")
{
    const std::vector<std::string> args = {"reduce-dlyz", "--h1", "kdv", "--scramble", "2", "--seed", "9",
                                           "--format", "json"};
    CHECK(cli(args).out == cli(args).out);
    CHECK(cli({"reduce-dlyz", "--h1", "kdv", "--scramble", "2", "--seed", "9"}).out !=
          cli({"reduce-dlyz", "--h1", "kdv", "--scramble", "2", "--seed", "10"}).out);

    const Run piped = cli({"reconstruct-conserved", "--p", "kdv", "--h0", "-"}, "int(u^3/6)\n");
    CHECK(piped.status == 0);
    CHECK(piped.out.find("h = int(1/6*u^3 - 1/24*eps^2*u1^2)") != std::string::npos);

    setenv("RD_EPS_ORDER", "2", 1);
    const Run env = cli({"reconstruct-flow", "--p", "kdv", "--d", "2"});
    unsetenv("RD_EPS_ORDER");
    CHECK(env.out.find("eps_order = 2") != std::string::npos);
    CHECK(env.out.find("eps^4") == std::string::npos);

    const auto path = std::filesystem::temp_directory_path() / "rd_cli_out.txt";
    CHECK(cli({"constants", "--max-g", "2", "--out", path.string()}).status == 0);
    std::ifstream file(path);
    const std::string content((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    CHECK(content == cli({"constants", "--max-g", "2"}).out);
    std::filesystem::remove(path);
}
