#include <catch2/catch_amalgamated.hpp>

#include <spherecs/io.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace spherecs;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + SPHERECS_CLI + std::string(" ") + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "spherecs_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("usage errors exit with 2", "[cli]") {
    CHECK(run("").code == 2);
    CHECK(run("bogus").code == 2);
    CHECK(run("design --n 3 --lambda 1").code == 2);  // missing --mu
    CHECK(run("design --n 3 --mu 0.4").code == 2);     // no curvature
    CHECK(run("design --n 3 --lambda -1 --mu 0.4").code == 2);
    CHECK(run("design --n 3 --lambda 1 --mu 0.4 --format xml").code == 2);
    CHECK(run("design --n 3 --lambda 1 --mu 0.4 --alphas 0.1,0.2").code == 2);
    CHECK(run("sweep-negativity --lambda-grid 2:1:0.5").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("design output", "[cli]") {
    const Run r = run("design --n 3 --lambda 1 --mu 0.4 --reproducible");
    REQUIRE(r.code == 0);
    const auto t = io::csv_from_string(r.out);
    CHECK(t.columns.front() == "lambda");
    CHECK(t.column_values("ratio_3").size() == 1);
    CHECK(t.column_values("ls_residual")[0] < 1e-12);
    CHECK(t.column_values("feasible")[0] == 1.0);
    CHECK(*t.find_meta("N") == "3");
    CHECK(t.find_meta("generated_at") == nullptr);
    // Deterministic output with --reproducible.
    CHECK(run("design --n 3 --lambda 1 --mu 0.4 --reproducible").out == r.out);
    CHECK(run("design --n 3 --lambda 1 --mu 0.4").out.find("generated_at") != std::string::npos);

    const Run j = run("--format json design --n 3 --lambda-grid 0:1:0.5 --mu 0.4 --reproducible");
    REQUIRE(j.code == 0);
    const auto tj = io::table_from_json(j.out);
    CHECK(tj.rows.size() == 3);
    CHECK(tj.column_values("lambda")[2] == 1.0);
}

TEST_CASE("an infeasible design exits with 3", "[cli]") {
    CHECK(run("design --n 3 --lambda 1 --mu 0.4 --alphas 0.2,0.2,0.3").code == 3);
}

TEST_CASE("files, output directory and config", "[cli]") {
    const auto dir = scratch("");
    const Run r = run("-o state.json --format json --reproducible state --n 2 --lambda 1 --mu 0.4",
                      "SPHERECS_OUTPUT_DIR=" + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto t = io::table_from_json(io::read_file((dir / "state.json").string()));
    const auto amp = t.column_values("re");
    REQUIRE(amp.size() == 3);
    CHECK(std::abs(amp[0] - 0.48623) < 1e-5);

    const auto cfg = scratch("cfg.json");
    io::write_file(cfg.string(), R"({"n": 2, "lambda": 1.0, "mu": 0.4, "reproducible": true})");
    const Run c = run("state --config " + cfg.string());
    REQUIRE(c.code == 0);
    CHECK(c.out == run("state --n 2 --lambda 1 --mu 0.4 --reproducible").out);
    // Command-line flags win over the config file.
    const Run o = run("state --config " + cfg.string() + " --lambda 0");
    CHECK(io::csv_from_string(o.out).column_values("re")[1] != amp[1]);

    const auto kv = scratch("cfg.txt");
    io::write_file(kv.string(), "n=2\nlambda=1\nmu=0.4\nreproducible=true\n");
    CHECK(run("state --config " + kv.string()).out == c.out);

    io::write_file(cfg.string(), R"({"n": 2, "nonsense": 1})");
    CHECK(run("state --config " + cfg.string()).code == 2);
}

TEST_CASE("wigner output round-trips", "[cli]") {
    const Run r = run("wigner --n 2 --lambda 1 --mu 0.4 --spacing 0.1 --reproducible");
    REQUIRE(r.code == 0);
    const auto t = io::csv_from_string(r.out);
    const auto w = io::wigner_from_table(t);
    CHECK(std::abs(w.integral() - 1.0) < 1e-4);
    CHECK(*t.find_meta("extrema") == "3");
    CHECK(std::stod(*t.find_meta("delta")) > 0.0);

    const Run j = run("--format json wigner --n 2 --lambda 1 --mu 0.4 --spacing 0.1 --reproducible");
    REQUIRE(j.code == 0);
    CHECK(io::wigner_from_json(j.out).values == w.values);
}

TEST_CASE("sweeps, evolution and relaxation", "[cli]") {
    const Run s = run("sweep-squeezing --n 4 --lambda-grid 0:1:0.5 --reproducible");
    REQUIRE(s.code == 0);
    const auto ts = io::csv_from_string(s.out);
    CHECK(ts.rows.size() == 3);
    CHECK(ts.columns.size() == 3);

    const Run n = run("sweep-negativity --n 2 --lambda-grid 0,1 --spacing 0.1 --reproducible");
    REQUIRE(n.code == 0);
    const auto tn = io::csv_from_string(n.out);
    CHECK(tn.column_values("delta_N2")[1] > tn.column_values("delta_N2")[0]);

    const Run e = run("evolve --n 2 --lambda 1 --mu 0.4 --gamma-t 0,0.5 --engine both --spacing 0.1 --reproducible");
    REQUIRE(e.code == 0);
    const auto te = io::csv_from_string(e.out);
    for (double d : te.column_values("sup_diff")) CHECK(d < 1e-3);

    const Run x = run("relax --n 2 --gamma-a 1 --t-max 20 --samples 5 --reproducible");
    REQUIRE(x.code == 0);
    const auto tx = io::csv_from_string(x.out);
    CHECK(tx.rows.size() == 5);
    CHECK(tx.column_values("fidelity_0").back() > 0.9);
}
