#include <catch_amalgamated.hpp>

#include <cli.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using cavex::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) v.push_back(f);
    return v;
}

} // namespace

TEST_CASE("pi trace as csv") {
    const Result r = call({"pi", "--k", "6", "--stages", "4", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "stage,sides,lower,upper,width");
    const auto last = fields(ls[5]);
    CHECK(last[1] == "96");
    CHECK(std::abs(std::stod(last[2]) - 3.1410319508905096) < 1e-12);
    CHECK(std::abs(std::stod(last[3]) - 3.1427145996453683) < 1e-12);
}

TEST_CASE("pi rejects unsupported k and bad flags") {
    const Result r = call({"pi", "--k", "5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("3, 4, 6") != std::string::npos);
    CHECK(call({"pi"}).code == 2);
    CHECK(call({"pi", "--k", "6", "--stages", "2", "--width-tol", "1e-3"}).code == 2);
    CHECK(call({"pi", "--k", "6", "--precision-bits", "4"}).code == 2);
    CHECK(call({"pi", "--k", "6", "--format", "xml"}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("pi reaches a width tolerance") {
    const Result r = call({"pi", "--k", "6", "--width-tol", "1e-12", "--precision-bits", "128", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto last = fields(lines(r.out).back());
    CHECK(std::stod(last[4]) <= 1e-12);
    CHECK(std::stoi(last[0]) == 20);
}

TEST_CASE("pi reports precision exhaustion") {
    const Result r = call({"pi", "--k", "6", "--stages", "50", "--precision-bits", "24", "--format", "csv"});
    CHECK(r.code == 3);
    CHECK(r.err.find("precision exhausted") != std::string::npos);
    CHECK(lines(r.out).size() > 2);
}

TEST_CASE("precision default comes from the environment") {
    ::setenv("CAVEX_PRECISION_BITS", "53", 1);
    const Result d = call({"pi", "--k", "6", "--stages", "1", "--format", "csv"});
    ::unsetenv("CAVEX_PRECISION_BITS");
    const Result b = call({"pi", "--k", "6", "--stages", "1", "--format", "csv"});
    REQUIRE(d.code == 0);
    REQUIRE(b.code == 0);
    CHECK(fields(lines(d.out)[1])[2] == "3");
    CHECK(fields(lines(b.out)[1])[2] == "3.0000000000000000");
}

TEST_CASE("pi json has raw numbers") {
    const Result r = call({"pi", "--k", "4", "--stages", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"sides\": 8") != std::string::npos);
    CHECK(r.out.find("\"lower\": 3.06146745892071") != std::string::npos);
}

TEST_CASE("arclen parabola with oracle") {
    const Result r = call({"arclen", "--fn", "x^2", "--from", "0", "--to", "1", "--tol", "1e-6", "--oracle", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "segment,stage,points,secant,tangent,gap");
    CHECK(r.out.find("oracle_agrees,true") != std::string::npos);
    CHECK(r.out.find("converged,true") != std::string::npos);
}

TEST_CASE("arclen error exits") {
    const Result p = call({"arclen", "--fn", "2x", "--from", "0", "--to", "1"});
    CHECK(p.code == 2);
    CHECK(p.err.find("offset 1") != std::string::npos);
    CHECK(call({"arclen", "--fn", "x^2"}).code == 2);
    CHECK(call({"arclen", "--curve", "ellipse"}).code == 2);
    CHECK(call({"arclen", "--curve", "parabola", "--fn", "x"}).code == 2);
    CHECK(call({"arclen", "--fn", "log(x)", "--from", "0", "--to", "1"}).code == 2);
    CHECK(call({"arclen", "--curve", "parabola", "--tol", "1e-12", "--max-stages", "3"}).code == 3);
    CHECK(call({"arclen", "--fn", "sin(x)", "--from", "0", "--to", "60", "--grid", "64"}).code == 4);
}

TEST_CASE("arclen splits x^3 symmetrically") {
    const Result r = call({"arclen", "--fn", "x^3", "--from", "-1", "--to", "1", "--tol", "1e-6", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"orientation\": \"concave\"") != std::string::npos);
    CHECK(r.out.find("\"orientation\": \"convex\"") != std::string::npos);
}

TEST_CASE("metric demo is deterministic") {
    const std::vector<std::string> args = {"metric-demo", "--curve", "parabola", "--partitions", "10", "--seed", "4", "--format", "csv"};
    const Result a = call(args), b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto ls = lines(a.out);
    REQUIRE(ls.size() == 11);
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i])[2] == "2");
    CHECK(call({"metric-demo", "--fn", "x^2", "--from", "-1", "--to", "1"}).code == 2);
}

TEST_CASE("compare verdicts") {
    const Result n = call({"compare", "--inner", "x^2", "--outer", "2*x^2 - x", "--from", "0", "--to", "1"});
    CHECK(n.code == 0);
    CHECK(n.out.find("verdict: inner shorter") != std::string::npos);
    const Result c = call({"compare", "--inner", "x", "--outer", "x^2", "--from", "0", "--to", "1"});
    CHECK(c.code == 0);
    CHECK(call({"compare", "--inner", "x^2 + 0.5*x*(1 - x)*(x - 0.5)", "--outer", "x^2", "--from", "0", "--to", "1"}).code == 5);
    CHECK(call({"compare", "--inner", "x^3", "--outer", "x^2", "--from", "0", "--to", "1"}).code == 5);
}

TEST_CASE("out writes to a file") {
    const std::string path = "cli_test_out.csv";
    const Result r = call({"pi", "--k", "3", "--stages", "2", "--format", "csv", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "stage,sides,lower,upper,width");
    std::remove(path.c_str());
    CHECK(call({"pi", "--k", "3", "--out", "/nonexistent/dir/x.csv"}).code == 2);
}
