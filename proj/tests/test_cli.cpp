#include "lukq/http_server.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

using namespace lukq;

namespace {

struct CliRun {
    int status;
    std::string out;
};

// Runs the CLI through the shell; `redirect` picks what reaches `out`.
CliRun run(const std::string& args, const std::string& redirect = "2>/dev/null") {
    std::string cmd = std::string(LUKQ_CLI) + " " + args + " " + redirect;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, {}};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

CliRun run_stderr(const std::string& args) { return run(args, "2>&1 >/dev/null"); }

std::string q(const std::string& s) { return "'" + s + "'"; }

// Asks the kernel for an unused port, then releases it.
int free_port() {
    int fd = socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    int port = -1;
    if (bind(fd, reinterpret_cast<sockaddr*>(&addr), len) == 0 &&
        getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
        port = ntohs(addr.sin_port);
    close(fd);
    return port;
}

}  // namespace

TEST(Cli, QueryTable) {
    CliRun r = run("query " + q("X11^2 and (!X12) and (!X0)^3 and (!X6)^2") + " --limit 3");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
    EXPECT_NE(r.out.find("["), std::string::npos);
}

TEST(Cli, QueryCsv) {
    CliRun r = run("query " + q("(0.875<=X11) and (X12<=0.25)") + " --format csv --only-positive");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "id,degree,degree_exact,display");
    EXPECT_NE(r.out.find("1001,1.000,1/1,"), std::string::npos);
}

TEST(Cli, JsonMatchesServiceBody) {
    std::ifstream sin(LUKQ_DATA_DIR "/cars.schema.json");
    Schema schema = schema_from_json(nlohmann::json::parse(sin));
    std::ifstream din(LUKQ_DATA_DIR "/cars.csv");
    DataTable t = load_csv(din, schema);
    std::ifstream nin(LUKQ_DATA_DIR "/cars.norm.json");
    Service s(std::move(t), normalization_from_json(nlohmann::json::parse(nin)));
    const std::string formula = "2*((X11^2 and (!X12)) - (X0))";
    CliRun r = run("query " + q(formula) + " --format json --limit 5");
    ASSERT_EQ(r.status, 0);
    nlohmann::json body{{"formula", formula}, {"limit", 5}};
    EXPECT_EQ(r.out, s.handle("POST", "/query", body.dump()).text());
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("query X0 --data /nonexistent.csv").status, 1);
    EXPECT_EQ(run(q("query") + " " + q("X11 ox ox")).status, 2);
    EXPECT_EQ(run("query X99").status, 3);
    EXPECT_EQ(run("synth-literal --q1 0.5 --q2 0.5").status, 4);
    EXPECT_EQ(run("synth-literal --q1 0.6 --q2 0.2").status, 4);
    EXPECT_EQ(run("transpile " + q("X1 and")).status, 2);
    EXPECT_EQ(run("transpile X99").status, 3);
}

TEST(Cli, SyntaxErrorCaret) {
    CliRun r = run_stderr("query " + q("X11 ox ox"));
    EXPECT_NE(r.out.find("  X11 ox ox\n         ^^\n"), std::string::npos) << r.out;
}

TEST(Cli, StdoutCarriesOnlyPayload) {
    EXPECT_TRUE(run("query X99").out.empty());
    EXPECT_TRUE(run_stderr("query X0 --limit 1").out.empty());
}

TEST(Cli, Transpile) {
    CliRun r = run("transpile " + q("X1 and (X5 or X7)") + " --project id,trim,length,seats,horsepower");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out,
              "SELECT id, trim, length, seats, horsepower, least(length,greatest(seats,horsepower)) As Results FROM "
              "auto;\n");
    r = run("transpile X1 --table cars --order");
    EXPECT_EQ(r.out, "SELECT length As Results FROM cars ORDER BY Results DESC;\n");
}

TEST(Cli, SynthLiteral) {
    CliRun r = run("synth-literal --q1 0.3 --q2 0.5");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "literal: (2*X)^2^2");
    EXPECT_NE(r.out.find("q1       0.300  0.000\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("q2       0.500  1.000\n"), std::string::npos) << r.out;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2 + 1 + 2 + 21);

    r = run("synth-literal --q1 0 --q2 1");
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "literal: X");

    r = run("synth-literal --delta 0.25 --var X12 --leq");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("literal: ", 0), 0u);
}

TEST(Cli, ExtremaAndNormalize) {
    CliRun r = run("extrema");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("max_speed"), std::string::npos);
    EXPECT_NE(r.out.find("350"), std::string::npos);
    EXPECT_EQ(run("normalize --check").status, 0);

    std::string bad = ::testing::TempDir() + "bad_norm.json";
    std::ofstream(bad) << R"({"price":{"min":5,"max":1}})";
    EXPECT_EQ(run("normalize --check --norm " + bad).status, 4);
    std::string partial = ::testing::TempDir() + "partial_norm.json";
    std::ofstream(partial) << R"({"price":{"min":1,"max":5}})";
    EXPECT_EQ(run("normalize --check --norm " + partial).status, 4);

    r = run("normalize");
    EXPECT_EQ(r.out.substr(0, 7), "id,X0,X");
}

TEST(Cli, ServeBadAddressAndMissingData) {
    EXPECT_EQ(run("serve --addr nonsense").status, 1);
    EXPECT_EQ(run("serve --addr 127.0.0.1:notaport").status, 1);
    EXPECT_EQ(run("serve --addr 127.0.0.1:0 --data /nonexistent.csv").status, 1);
}

TEST(Cli, ServeAnswersSchema) {
    int port = free_port();
    ASSERT_GT(port, 0);
    std::string addr = "127.0.0.1:" + std::to_string(port);
    std::vector<std::string> args{LUKQ_CLI, "serve", "--addr", addr};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid;
    ASSERT_EQ(posix_spawn(&pid, LUKQ_CLI, nullptr, nullptr, argv.data(), environ), 0);

    httplib::Client client("127.0.0.1", port);
    httplib::Result res;
    for (int i = 0; i < 100 && !res; ++i) {
        res = client.Get("/schema");
        if (!res) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    kill(pid, SIGTERM);
    waitpid(pid, nullptr, 0);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(nlohmann::json::parse(res->body)["version"], 1);
}
