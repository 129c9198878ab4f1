#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "nc/json_io.hpp"
#include "nc/json_writer.hpp"
#include "nc/matcore.hpp"

using namespace nc;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("nc");
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code =
        nc_cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "nc_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_tuple_file(const MatrixTuple& x, const std::string& name) {
    const fs::path p = temp_dir() / name;
    std::ofstream f(p);
    JsonWriter w(f);
    write_tuple(w, x);
    f << "\n";
    return p.string();
}

}  // namespace

TEST_CASE("cli eval reports the value") {
    ComplexMatrix a(2, 2), b(2, 2);
    a(0, 1) = 1.0;
    b(1, 0) = 1.0;
    const std::string point = write_tuple_file(MatrixTuple({a, b}), "point2.json");
    const CliRun r = run_cli({"eval", "--expr", "1 + x1*x2", "--point", point});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "ok");
    const ComplexMatrix v = matrix_from_json(j["value"]);
    CHECK(rel_err(v, ComplexMatrix::diagonal({2.0, 1.0})) < 1e-15);
}

TEST_CASE("cli rejects giving both an expression and a file") {
    const std::string point = write_tuple_file(random_tuple(2, 1, 1), "point1.json");
    const fs::path ef = temp_dir() / "expr.txt";
    std::ofstream(ef) << "x1";
    const CliRun r = run_cli(
        {"eval", "--expr", "x1", "--expr-file", ef.string(), "--point", point});
    CHECK(r.code == 2);
}

TEST_CASE("cli exit codes: usage, numerical, check failure") {
    CHECK(run_cli({"no-such-command"}).code == 2);

    const std::string zero = write_tuple_file(MatrixTuple(2, 1), "zero.json");
    CHECK(run_cli({"divisor", "--expr", "x1", "--point", zero}).code == 1);

    const fs::path vals = temp_dir() / "values.json";
    std::ofstream(vals) << "[{\"increment\": [1.0, 0.0], \"n\": 1}]";
    CHECK(run_cli({"quantize", "--loops", vals.string()}).code == 3);

    const fs::path good = temp_dir() / "good_values.json";
    std::ofstream(good) << "[{\"increment\": [0.0, 6.283185307179586], \"n\": 1}]";
    CHECK(run_cli({"quantize", "--loops", good.string()}).code == 0);
}

TEST_CASE("cli check-div-eq passes the Weinstein-Aronszajn pair") {
    const CliRun r = run_cli({"check-div-eq", "--e1", "1 + x1*x2", "--e2", "1 + x2*x1",
                              "--sizes", "1,2,3,4", "--trials", "5", "--seed", "0",
                              "--tol", "1e-8"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "pass");
    CHECK(j["checked"].get<int>() > 0);
}

TEST_CASE("cli reports are byte-identical for identical argv and seed") {
    const std::vector<std::string> args = {"check-div-eq", "--e1", "inv(x1)", "--e2",
                                           "inv(x1)",      "--sizes", "2", "--trials",
                                           "3",            "--seed", "11"};
    const CliRun a = run_cli(args);
    const CliRun b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli gen-path emits the documented built-ins") {
    const fs::path circ = temp_dir() / "circle256.json";
    REQUIRE(run_cli({"gen-path", "--kind", "circle-det", "--samples", "256", "--out",
                     circ.string()})
                .code == 0);
    CHECK(path_from_json(load_json_file(circ.string())).nodes.size() == 256);

    const fs::path loop = temp_dir() / "loop.json";
    const CliRun r = run_cli({"gen-path", "--kind", "unit-det-2x2", "--samples", "64",
                              "--out", loop.string()});
    REQUIRE(r.code == 0);
    const PathSpec p = path_from_json(load_json_file(loop.string()));
    CHECK(p.n == 2);
    // At t=0 the path sits at [[1,1],[0,1]] and it closes up.
    const ComplexMatrix want(2, 2, {Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0)});
    CHECK(rel_err(p.nodes.front().x[0], want) == 0.0);
    CHECK(rel_err(p.nodes.front().x, p.nodes.back().x) == 0.0);
}

TEST_CASE("cli loop-phi and continue agree on the unit circle") {
    const fs::path loop = temp_dir() / "circle.json";
    REQUIRE(run_cli({"gen-path", "--kind", "circle-det", "--samples", "128", "--out",
                     loop.string()})
                .code == 0);
    const CliRun phi = run_cli(
        {"loop-phi", "--germ", "logdet:x1", "--path", loop.string(), "--gl"});
    REQUIRE(phi.code == 0);
    const nlohmann::json j = nlohmann::json::parse(phi.out);
    CHECK(std::abs(j["phi"][0].get<double>()) <= 1e-8);
    CHECK(std::abs(j["phi"][1].get<double>() - 6.283185307179586) <= 1e-6);

    const CliRun cont = run_cli(
        {"continue", "--germ", "logdet:x1", "--path", loop.string(), "--gl"});
    REQUIRE(cont.code == 0);
    const nlohmann::json cj = nlohmann::json::parse(cont.out);
    CHECK(std::abs(cj["increment"][1].get<double>() - 6.283185307179586) <= 1e-6);
}

TEST_CASE("cli integrality and trace-equiv run end to end") {
    const fs::path loop = temp_dir() / "circle2.json";
    REQUIRE(run_cli({"gen-path", "--kind", "circle-det", "--samples", "128", "--out",
                     loop.string()})
                .code == 0);
    const CliRun ok = run_cli(
        {"integrality", "--form", "inv(x1)", "--loops", loop.string(), "--gl"});
    CHECK(ok.code == 0);
    const CliRun bad = run_cli({"integrality", "--form", "0.3333333333333333*inv(x1)",
                                "--loops", loop.string(), "--gl"});
    CHECK(bad.code == 3);

    const CliRun te = run_cli({"trace-equiv", "--path1", loop.string(), "--path2",
                               loop.string(), "--germ", "logdet:x1", "--gl"});
    CHECK(te.code == 0);
}

TEST_CASE("cli concat reparametrizes to the half intervals") {
    const fs::path loop = temp_dir() / "circle3.json";
    REQUIRE(run_cli({"gen-path", "--kind", "circle-det", "--samples", "32", "--out",
                     loop.string()})
                .code == 0);
    const fs::path out = temp_dir() / "cat.json";
    const CliRun r = run_cli({"concat", "--path1", loop.string(), "--path2",
                              loop.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    const PathSpec p = path_from_json(load_json_file(out.string()));
    CHECK(p.nodes.size() == 63);  // 32 + 32 nodes sharing the midpoint
    CHECK(p.nodes[31].t == 0.5);
}

TEST_CASE("cli NC_SEED provides the default seed") {
    setenv("NC_SEED", "123", 1);
    const CliRun r = run_cli({"check-div-eq", "--e1", "x1", "--e2", "x1", "--sizes", "2",
                              "--trials", "2"});
    unsetenv("NC_SEED");
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["seed"].get<int>() == 123);
}

TEST_CASE("cli text format prints key-value lines") {
    const std::string point = write_tuple_file(random_tuple(2, 1, 2), "pt_text.json");
    const CliRun r =
        run_cli({"eval", "--expr", "x1", "--point", point, "--format", "text"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("command: eval") != std::string::npos);
    CHECK(r.out.find("status: ok") != std::string::npos);
}
