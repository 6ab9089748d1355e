#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include <layerwise/dyadic.hpp>

using Json = nlohmann::json;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::filesystem::path scratch() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("layerwise_cli_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

CliResult cli(const std::string& args) {
    const char* exe = std::getenv("LAYERWISE_CLI");
    if (exe == nullptr) throw std::runtime_error("LAYERWISE_CLI is not set");
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string("'") + exe + "' " + args + " 2>'" + err.string() + "'";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = ::pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = slurp(err);
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream s(text);
    std::string line;
    while (std::getline(s, line)) out.push_back(line);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

TEST(Cli, TestAuditDepthTen) {
    const CliResult r = cli("test-audit --depth 10");
    ASSERT_EQ(r.status, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["audit"]["all_pass"].get<bool>());
    ASSERT_EQ(j["audit"]["levels"].size(), 11U);
    for (const auto& l : j["audit"]["levels"]) {
        EXPECT_LE(layerwise::Dyadic::parse(l["measure"].get<std::string>()),
                  layerwise::Dyadic::parse(l["bound"].get<std::string>()));
    }
    const CliResult csv = cli("test-audit --depth 10 --format csv");
    EXPECT_EQ(lines(csv.out).size(), 12U);
}

TEST(Cli, LayGadgetSeed42) {
    const CliResult r = cli("gadget-run --which lay --bound-set 0,1,2 --seed 42");
    ASSERT_EQ(r.status, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["verdict"]["verification"], "PASS");
    EXPECT_EQ(j["verdict"]["details"]["insertions"].size(), 3U);
    std::size_t dilute = 0;
    for (const auto& e : j["events"]) dilute += e["phase"] == "dilute" ? 1 : 0;
    EXPECT_EQ(dilute, 3U);
    for (const char* level : {"0", "1", "2"}) EXPECT_TRUE(j["verdict"]["details"]["lay"]["excluded_levels"].contains(level));
    EXPECT_EQ(j["input_digest"].get<std::string>().size(), 64U);
}

TEST(Cli, BrownianPathCsv) {
    const CliResult r = cli("brownian-path --seed 7 --grid 5 --stage 7");
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 34U);  // header + 33 grid points
    EXPECT_EQ(rows[0], "t_numerator,t_denominator_exp,lo,hi,tube_lo,tube_hi");
    for (std::size_t m = 1; m < rows.size(); ++m) {
        const auto c = cells(rows[m]);
        ASSERT_EQ(c.size(), 6U) << rows[m];
        EXPECT_EQ(c[0], std::to_string(m - 1));
        const auto lo = layerwise::Dyadic::parse(c[2]);
        const auto hi = layerwise::Dyadic::parse(c[3]);
        EXPECT_LE(lo, hi);
    }
    // a layer bound certifies the tube
    const CliResult tube = cli("brownian-path --seed 7 --grid 3 --stage 3 --layer-bound 0 --modulus-offset 3");
    ASSERT_EQ(tube.status, 0) << tube.err;
    EXPECT_FALSE(cells(lines(tube.out)[1])[4].empty());
    const CliResult svg = cli("brownian-path --seed 7 --grid 5 --stage 7 --format svg");
    EXPECT_NE(svg.out.find("<svg"), std::string::npos);
}

TEST(Cli, ByteIdenticalReruns) {
    for (const std::string args : {"brownian-path --seed 3 --grid 4 --stage 5",
                                   "brownian-path --seed 3 --grid 4 --stage 5 --format json",
                                   "lil-run --seed 4 --length 500", "lil-run --seed 4 --length 200 --format csv",
                                   "birkhoff-run --seed 4 --length 300 --start 50",
                                   "harmonic-run --seed 4 --length 300 --sequence 0,1,3/2",
                                   "harmonic-run --seed 4 --length 100 --format csv", "hitting-demo --seed 8",
                                   "gadget-run --which kol --bound-set 2,5", "test-audit --depth 6 --format csv"}) {
        const CliResult a = cli(args);
        const CliResult b = cli(args);
        ASSERT_EQ(a.status, 0) << args << "\n" << a.err;
        EXPECT_EQ(a.out, b.out) << args;
    }
}

TEST(Cli, EveryGadgetVerifies) {
    for (const char* which : {"lay", "kol", "phi", "lil", "birkhoff", "harmonic", "hitting-open", "hitting-closed"}) {
        const CliResult r = cli(std::string("gadget-run --seed 5 --bound-set 1,3 --which ") + which);
        ASSERT_EQ(r.status, 0) << which << "\n" << r.err << r.out;
        const Json j = Json::parse(r.out);
        EXPECT_EQ(j["verdict"]["verification"], "PASS") << which;
        EXPECT_EQ(j["operator"], "gadget-run");
        EXPECT_TRUE(j["parameters"]["source"].contains("seed"));
    }
    const Json open = Json::parse(cli("gadget-run --which hitting-open --bound-set 4,2,7").out);
    EXPECT_EQ(open["verdict"]["details"]["value"], 2);
    EXPECT_TRUE(open["verdict"]["export"].contains("q_prefix_hex"));
    EXPECT_TRUE(open["verdict"]["export"].contains("V"));
    const Json closed = Json::parse(cli("gadget-run --which hitting-closed --bound-set 0,1,2").out);
    EXPECT_GT(closed["verdict"]["details"]["hitting_time"].get<std::size_t>(), 2U);
    for (const auto& e : closed["events"]) {
        EXPECT_TRUE(e.contains("claim"));
        EXPECT_TRUE(e.contains("at_fuel"));
    }
}

TEST(Cli, LimitLawCommands) {
    // 0101...: alternating signs, 1 - 1/2 + 1/3 - 1/4 under the complement convention
    const CliResult h = cli("harmonic-run --hex 55 --length 4 --convention complement");
    ASSERT_EQ(h.status, 0) << h.err;
    const Json hj = Json::parse(h.out);
    const mpq_class want(7, 12);
    EXPECT_LE(layerwise::Dyadic::parse(hj["verdict"]["partial"]["lo"].get<std::string>()).to_rational(), want);
    EXPECT_GE(layerwise::Dyadic::parse(hj["verdict"]["partial"]["hi"].get<std::string>()).to_rational(), want);

    // 1^32: the walk leaves the margin
    const Json lil = Json::parse(cli("lil-run --hex ffffffff --length 32 --start 10").out);
    EXPECT_FALSE(lil["verdict"]["holds"].get<bool>());
    EXPECT_EQ(lil["verdict"]["index"], 10);

    // (10)^20 from n = 4 stays within 1/4 of 1/2
    const Json bk = Json::parse(cli("birkhoff-run --hex aaaaaaaaaa --length 40 --start 4 --k 2").out);
    EXPECT_TRUE(bk["verdict"]["holds"].get<bool>());
    const auto rows = lines(cli("birkhoff-run --hex d08 --length 10 --format csv").out);
    ASSERT_EQ(rows.size(), 11U);
    EXPECT_EQ(cells(rows[10])[2], "2/5");  // 1101000010
}

TEST(Cli, HittingDemo) {
    const CliResult r = cli("hitting-demo --hex 5a --words 11 --block-bound 2 --members 1 --fuel 8");
    ASSERT_EQ(r.status, 0) << r.err;
    const Json j = Json::parse(r.out);
    // 01011010: first 11 at index 3
    EXPECT_EQ(j["verdict"]["open"]["n"], 3);
    EXPECT_EQ(j["verdict"]["clopen"], 3);
    EXPECT_EQ(j["verdict"]["closed"]["final_claim"], 0);
    EXPECT_EQ(j["verdict"]["block"]["decoded"], 1);
    EXPECT_EQ(j["verdict"]["avoid_set"]["measure_bound"], "7/2^3");
}

TEST(Cli, ErrorsAreJson) {
    struct Case {
        std::string args;
        std::string code;
    };
    for (const auto& c : {Case{"birkhoff-run --hex zz", "ParseError"},
                          Case{"brownian-path --grid 9 --stage 2", "StageTooShallow"},
                          Case{"birkhoff-run --hex 0f --length 100", "SourceExhausted"},
                          Case{"lil-run --start 2", "DomainTooSmall"},
                          Case{"test-audit --format svg", "InvalidArgument"},
                          Case{"gadget-run --which birkhoff --k 1", "UnachievableTolerance"},
                          Case{"lil-run --no-such-flag", "ParseError"},
                          Case{"--seed 1 --hex 00 lil-run", "ParseError"}}) {
        const CliResult r = cli(c.args);
        EXPECT_NE(r.status, 0) << c.args;
        const Json j = Json::parse(r.err);
        EXPECT_EQ(j["error"], c.code) << c.args;
        EXPECT_FALSE(j["message"].get<std::string>().empty());
        EXPECT_TRUE(r.out.empty()) << c.args;
    }
}

TEST(Cli, ConfigFileAndOverrides) {
    const auto cfg = scratch() / "config.json";
    std::ofstream(cfg) << R"({"command": "brownian-path", "seed": 7, "grid": 5, "stage": 7})";
    const CliResult from_file = cli("--config '" + cfg.string() + "'");
    ASSERT_EQ(from_file.status, 0) << from_file.err;
    EXPECT_EQ(from_file.out, cli("brownian-path --seed 7 --grid 5 --stage 7").out);
    // flags win over the file, including the bit source as a whole
    EXPECT_EQ(cli("brownian-path --config '" + cfg.string() + "' --grid 3").out,
              cli("brownian-path --seed 7 --grid 3 --stage 7").out);
    EXPECT_EQ(cli("brownian-path --config '" + cfg.string() + "' --hex 0123456789abcdef0123456789abcdef --stage 1 --grid 1").out,
              cli("brownian-path --hex 0123456789abcdef0123456789abcdef --stage 1 --grid 1").out);

    // a required option may come from the file
    const auto lay = scratch() / "lay.json";
    std::ofstream(lay) << R"({"command": "gadget-run", "which": "lay", "seed": 42, "bound-set": "1,3"})";
    EXPECT_EQ(cli("--config '" + lay.string() + "'").out, cli("--seed 42 gadget-run --which lay --bound-set 1,3").out);
    EXPECT_EQ(Json::parse(cli("gadget-run").err)["error"], "ParseError");

    std::ofstream(scratch() / "bad.json") << R"({"no-such-key": 1})";
    const CliResult bad = cli("lil-run --config '" + (scratch() / "bad.json").string() + "'");
    EXPECT_NE(bad.status, 0);
    EXPECT_EQ(Json::parse(bad.err)["error"], "InvalidArgument");
}

TEST(Cli, OutFileMatchesStdout) {
    const auto out = scratch() / "path.csv";
    const CliResult r = cli("brownian-path --seed 2 --grid 3 --stage 4 --out '" + out.string() + "'");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(out), cli("brownian-path --seed 2 --grid 3 --stage 4").out);
}

TEST(Cli, BitsFileSource) {
    const auto bits = scratch() / "bits.bin";
    {
        std::ofstream f(bits, std::ios::binary);
        const unsigned char b[] = {0xd0, 0x80};
        f.write(reinterpret_cast<const char*>(b), 2);
    }
    const CliResult r = cli("birkhoff-run --bits-file '" + bits.string() + "' --length 10 --format csv");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(cells(lines(r.out)[10])[2], "2/5");
}

TEST(Cli, OracleSuitePasses) {
    const CliResult r = cli("oracle-suite --format json");
    ASSERT_EQ(r.status, 0) << r.out;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["all_pass"].get<bool>());
    EXPECT_GE(j["results"].size(), 40U);
    const CliResult table = cli("oracle-suite --module hitting_time");
    EXPECT_EQ(table.status, 0);
    EXPECT_EQ(table.out.find("FAIL"), std::string::npos);
}
