#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("SHAPDAG_CLI");
    REQUIRE_MESSAGE(env != nullptr, "SHAPDAG_CLI must point at the built binary");
    return env;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe) != nullptr) r.output += buf;
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("generate writes datasets, truths and a manifest") {
    const fs::path dir = fresh_dir("shapdag_cli_gen");
    const RunResult r = run("generate --family linear --variables 10 --samples 500 "
                            "--datasets 3 --seed 9 --out " +
                            dir.string());
    CHECK(r.exit_code == 0);
    for (int i = 0; i < 3; ++i) {
        char suffix[8];
        std::snprintf(suffix, sizeof(suffix), "%03d", i);
        CHECK(fs::exists(dir / ("data_" + std::string(suffix) + ".csv")));
        CHECK(fs::exists(dir / ("truth_" + std::string(suffix) + ".txt")));
        CHECK(fs::exists(dir / ("truth_" + std::string(suffix) + ".dot")));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("schema_version") == 1);
    CHECK(manifest.at("files").size() == 3);

    // CSV shape: header + 500 rows, 10 columns.
    std::ifstream in(dir / "data_000.csv");
    std::string line;
    int rows = -1;
    int commas = 0;
    while (std::getline(in, line)) {
        if (rows < 0) commas = static_cast<int>(std::count(line.begin(), line.end(), ','));
        ++rows;
    }
    CHECK(rows == 500);
    CHECK(commas == 9);
}

TEST_CASE("generate with zero datasets succeeds with an empty manifest") {
    const fs::path dir = fresh_dir("shapdag_cli_gen0");
    const RunResult r = run("generate --datasets 0 --seed 1 --out " + dir.string());
    CHECK(r.exit_code == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("files").empty());
    CHECK_FALSE(fs::exists(dir / "data_000.csv"));
}

TEST_CASE("generate is byte-identical for a fixed seed") {
    const fs::path d1 = fresh_dir("shapdag_cli_det1");
    const fs::path d2 = fresh_dir("shapdag_cli_det2");
    const std::string args = "generate --family polynomial --variables 5 --samples 60 "
                             "--datasets 2 --seed 33 --out ";
    CHECK(run(args + d1.string()).exit_code == 0);
    CHECK(run(args + d2.string()).exit_code == 0);
    for (const char* name : {"data_000.csv", "data_001.csv", "truth_000.txt", "truth_001.txt",
                             "manifest.json"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
}

TEST_CASE("evaluate scores edge-list files") {
    const fs::path dir = fresh_dir("shapdag_cli_eval");
    std::ofstream(dir / "truth.txt") << "# nodes: a b c\na b\nb c\n";
    std::ofstream(dir / "same.txt") << "# nodes: a b c\na b\nb c\n";
    std::ofstream(dir / "reversed.txt") << "# nodes: a b c\nb a\nb c\n";

    SUBCASE("identical files give f1 = 1") {
        const RunResult r =
            run("evaluate --estimate " + (dir / "same.txt").string() + " --truth " +
                (dir / "truth.txt").string());
        CHECK(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.output);
        CHECK(j.at("f1").get<double>() == doctest::Approx(1.0));
        CHECK(j.at("shd").get<int>() == 0);
    }
    SUBCASE("a reversed edge costs one shd unit") {
        const RunResult r =
            run("evaluate --estimate " + (dir / "reversed.txt").string() + " --truth " +
                (dir / "truth.txt").string());
        CHECK(r.exit_code == 0);
        const auto j = nlohmann::json::parse(r.output);
        CHECK(j.at("shd").get<int>() == 1);
        CHECK(j.at("tp").get<int>() == 1);
        CHECK(j.at("fp").get<int>() == 1);
        CHECK(j.at("fn").get<int>() == 1);
    }
    SUBCASE("csv mode emits a header and one row") {
        const RunResult r =
            run("evaluate --csv --estimate " + (dir / "same.txt").string() + " --truth " +
                (dir / "truth.txt").string());
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("tp,fp,fn") != std::string::npos);
    }
    SUBCASE("node mismatch exits with code 2") {
        std::ofstream(dir / "other.txt") << "# nodes: a b\na b\n";
        const RunResult r =
            run("evaluate --estimate " + (dir / "other.txt").string() + " --truth " +
                (dir / "truth.txt").string());
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("discover handles malformed input with exit code 2") {
    const fs::path dir = fresh_dir("shapdag_cli_badcsv");
    std::ofstream(dir / "bad.csv") << "a,b\n1,notanumber\n3,4\n";
    const RunResult r = run("discover --data " + (dir / "bad.csv").string() + " --out " +
                            (dir / "out").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("discover recovers the collider adjacency and respects mode containment") {
    const fs::path dir = fresh_dir("shapdag_cli_discover");
    // Small deterministic collider dataset via the generator CLI would give
    // a random DAG; write the fixture directly instead.
    {
        std::ofstream csv(dir / "collider.csv");
        csv << "X,Z,Y\n";
        std::mt19937_64 rng(7);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 400; ++i) {
            const double x = gauss(rng);
            const double y = gauss(rng);
            const double z = x + y + 0.1 * gauss(rng);
            csv << x << ',' << z << ',' << y << '\n';
        }
    }
    const std::string common = " --data " + (dir / "collider.csv").string() +
                               " --regressors gbt --iterations 6 --budget 0 --seed 3 "
                               "--permutations 60 --jobs 2";
    const RunResult u =
        run("discover" + common + " --mode union --out " + (dir / "u").string());
    CHECK(u.exit_code == 0);
    CHECK(fs::exists(dir / "u" / "dag.dot"));
    CHECK(fs::exists(dir / "u" / "dag.json"));
    CHECK(fs::exists(dir / "u" / "report.json"));

    const auto dag = nlohmann::json::parse(slurp(dir / "u" / "dag.json"));
    std::set<std::pair<std::string, std::string>> adj;
    for (const auto& e : dag.at("edges")) {
        adj.insert({e.at("from").get<std::string>(), e.at("to").get<std::string>()});
    }
    auto adjacent = [&](const std::string& a, const std::string& b) {
        return adj.count({a, b}) > 0 || adj.count({b, a}) > 0;
    };
    CHECK(adjacent("X", "Z"));
    CHECK(adjacent("Y", "Z"));
    CHECK_FALSE(adjacent("X", "Y"));

    // With a single regressor, union and intersection coincide; the
    // containment check still exercises both paths.
    const RunResult i =
        run("discover" + common + " --mode intersection --out " + (dir / "i").string());
    CHECK(i.exit_code == 0);
    const auto dag_i = nlohmann::json::parse(slurp(dir / "i" / "dag.json"));
    std::set<std::pair<std::string, std::string>> adj_i;
    for (const auto& e : dag_i.at("edges")) {
        adj_i.insert({e.at("from").get<std::string>(), e.at("to").get<std::string>()});
    }
    for (const auto& e : adj_i) CHECK(adj.count(e) == 1);
}

TEST_CASE("config file merges under explicit flags") {
    const fs::path dir = fresh_dir("shapdag_cli_config");
    {
        std::ofstream csv(dir / "pair.csv");
        csv << "A,B\n";
        std::mt19937_64 rng(11);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 120; ++i) {
            const double a = gauss(rng);
            csv << a << ',' << a * a * a + 0.3 * gauss(rng) << '\n';
        }
    }
    std::ofstream(dir / "cfg.json")
        << R"({"regressors": "gbt", "bootstrap_iterations": 4, "hpo_budget": 0,)"
        << R"( "hsic_permutations": 60, "tau": 0.2})";
    const RunResult r = run("discover --data " + (dir / "pair.csv").string() + " --config " +
                            (dir / "cfg.json").string() + " --iterations 3 --out " +
                            (dir / "out").string());
    CHECK(r.exit_code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    // Flag wins over config for iterations; config fills the rest.
    CHECK(report.at("config").at("bootstrap_iterations").get<int>() == 3);
    CHECK(report.at("config").at("regressors").get<std::string>() == "gbt");
    CHECK(report.at("config").at("hpo_budget").get<int>() == 0);
}

TEST_CASE("unknown arguments exit with code 2") {
    CHECK(run("discover --no-such-flag").exit_code == 2);
    CHECK(run("nosuchcommand").exit_code == 2);
}
