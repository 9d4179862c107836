// End-to-end checks of the mq binary. Each case shells out to the real
// executable (path injected via MQ_CLI_PATH) and inspects exit codes and
// output files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::filesystem::path work_dir = "cli_test_scratch";

int run_cli(std::string const &args) {
    const std::string command = std::string(MQ_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

std::string last_stdout() { return read_file("cli_stdout.txt"); }

std::vector<std::string> lines_of(std::string const &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

struct ScratchDir {
    ScratchDir() {
        std::filesystem::remove_all(work_dir);
        std::filesystem::create_directories(work_dir);
    }
};

}  // namespace

TEST_CASE("theory table lands on stdout by default") {
    const int code = run_cli("theory -c 2 -p 56 --k-max 10");
    CHECK(code == 0);
    const auto lines = lines_of(last_stdout());
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "k,tail");
    CHECK(lines[1] == "0,1");
    CHECK(lines[2].rfind("1,0.98214", 0) == 0);
}

TEST_CASE("theory json output") {
    ScratchDir scratch;
    const int code =
        run_cli("theory -c 2 -p 56 --k-max 5 --format json -o " + (work_dir / "t.json").string());
    CHECK(code == 0);
    const auto doc = nlohmann::json::parse(read_file(work_dir / "t.json"));
    CHECK(doc.at("c").get<double>() == 2.0);
    CHECK(doc.at("p").get<int>() == 56);
    CHECK(doc.at("q2").get<double>() == doctest::Approx(1.0 / 56.0));
    CHECK(doc.at("tail").size() == 6);
    CHECK(doc.at("tail")[0].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("quality json summary and csv histogram") {
    ScratchDir scratch;
    const std::string base =
        "quality -p 4 -c 2 --prefill 1000 --ops 20000 --key-max 100000 ";
    int code = run_cli(base + "--format json -o " + (work_dir / "q.json").string());
    CHECK(code == 0);
    const auto doc = nlohmann::json::parse(read_file(work_dir / "q.json"));
    CHECK(doc.at("total_deletes").get<std::uint64_t>() == 10'000);
    CHECK(doc.at("mean_rank").get<double>() >= 0.0);
    const auto &quartiles = doc.at("quartiles");
    for (auto const *key : {"0", "25", "50", "75", "100"}) {
        REQUIRE(quartiles.contains(key));
    }
    CHECK(doc.at("context").at("num_queues").get<int>() == 8);

    code = run_cli(base + "--format csv -o " + (work_dir / "q.csv").string());
    CHECK(code == 0);
    const auto lines = lines_of(read_file(work_dir / "q.csv"));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "rank,count");
}

TEST_CASE("fixed seeds give byte-identical outputs") {
    ScratchDir scratch;
    const std::string base =
        "quality -p 8 -c 2 --prefill 2000 --ops 30000 --seed 12345 --format json -o ";
    REQUIRE(run_cli(base + (work_dir / "a.json").string()) == 0);
    REQUIRE(run_cli(base + (work_dir / "b.json").string()) == 0);
    CHECK(read_file(work_dir / "a.json") == read_file(work_dir / "b.json"));

    const std::string theory = "theory -c 2 -p 256 --k-max 2000 -o ";
    REQUIRE(run_cli(theory + (work_dir / "ta.csv").string()) == 0);
    REQUIRE(run_cli(theory + (work_dir / "tb.csv").string()) == 0);
    CHECK(read_file(work_dir / "ta.csv") == read_file(work_dir / "tb.csv"));
}

TEST_CASE("bench csv has the documented header") {
    ScratchDir scratch;
    const int code = run_cli("bench -p 1 --prefill 100 --duration-ms 50 -o " +
                             (work_dir / "b.csv").string());
    CHECK(code == 0);
    const auto lines = lines_of(read_file(work_dir / "b.csv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "p,c,num_queues,n0,mode,ops,seconds,ops_per_sec,failed_locks");
    CHECK(lines[1].rfind("1,2,2,100,uniform,", 0) == 0);
    CHECK(last_stdout().find("[bench]") != std::string::npos);
}

TEST_CASE("bench size sweep emits one row per size") {
    ScratchDir scratch;
    const int code = run_cli("bench --sizes 0,100 --duration-ms 20 -o " +
                             (work_dir / "s.csv").string());
    CHECK(code == 0);
    const auto lines = lines_of(read_file(work_dir / "s.csv"));
    REQUIRE(lines.size() == 3);
}

TEST_CASE("monotonic bench smoke") {
    const int code = run_cli("bench --mode monotonic -p 1 --prefill 10 --duration-ms 30");
    CHECK(code == 0);
    CHECK(last_stdout().find("mode=monotonic") != std::string::npos);
}

TEST_CASE("verify round trip through a recorded log") {
    ScratchDir scratch;
    const std::string log_path = (work_dir / "ops.csv").string();
    int code = run_cli("verify -p 2 --prefill 500 --ops 20000 --record-log " + log_path);
    CHECK(code == 0);
    CHECK(last_stdout().find("[verify] PASS") != std::string::npos);
    code = run_cli("quality --replay " + log_path + " --format json -o " +
                   (work_dir / "r.json").string());
    CHECK(code == 0);
    const auto doc = nlohmann::json::parse(read_file(work_dir / "r.json"));
    CHECK(doc.at("total_deletes").get<std::uint64_t>() == 10'000);
}

TEST_CASE("relative outputs honor MQ_OUTPUT_DIR") {
    ScratchDir scratch;
    const std::string env_dir = (work_dir / "redirected").string();
    const std::string command = "MQ_OUTPUT_DIR=" + env_dir + " " + MQ_CLI_PATH +
                                " theory -c 2 -p 8 --k-max 3 -o t.csv > cli_stdout.txt 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(work_dir / "redirected" / "t.csv"));
}

TEST_CASE("bad invocations exit nonzero") {
    CHECK(run_cli("") != 0);
    CHECK(run_cli("frobnicate") != 0);
    CHECK(run_cli("bench --mode sideways") != 0);
    CHECK(run_cli("bench -p 0") != 0);
    CHECK(run_cli("quality --seed not_a_number --ops 10") != 0);
    CHECK(run_cli("quality --replay missing_file_321.csv") != 0);
    CHECK(run_cli("theory -c 0 -p 8") != 0);
    CHECK(run_cli("bench --mode size-sweep --duration-ms 10") != 0);
    CHECK(run_cli("verify -p 300 --ops 100") != 0);
}
