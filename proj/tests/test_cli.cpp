#include "doctest.h"

#include "bregcr/divergence.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace bregcr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

struct ScratchDir {
    fs::path path = fs::temp_directory_path() / ("bregcr_cli_test_" + std::to_string(::getpid()));
    ScratchDir() { fs::create_directories(path); }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path scratch() {
    static const ScratchDir dir;
    return dir.path;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// `env` is a prefix such as "OMP_NUM_THREADS=3 ".
Run cli(const std::string& args, const std::string& env = "") {
    const char* exe = std::getenv("BREGCR_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "BREGCR_CLI must point at the bregcr executable");
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = "env -u BREGCR_SEED " + env + "'" + exe + "' " + args + " 2>'" + err.string() + "'";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int st = ::pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = slurp(err);
    return r;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << body;
    return p;
}

struct Row {
    double sweep = 0.0;
    double value = 0.0;
    std::string quantity;
    bool valid = true;
    std::string std_error;
};

std::vector<Row> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "sweep_var,value,quantity,valid,std_error");
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        REQUIRE(f.size() == 5);
        rows.push_back({std::stod(f[0]), std::stod(f[1]), f[2], f[3] == "true", f[4]});
    }
    return rows;
}

const Row& find_row(const std::vector<Row>& rows, double at, const std::string& q) {
    for (const Row& r : rows)
        if (r.sweep == at && r.quantity == q) return r;
    FAIL("no row for " << q << " at " << at);
    return rows.front();
}

}  // namespace

TEST_CASE("fig4 preset starts at the published values") {
    const Run r = cli("preset fig4");
    REQUIRE(r.status == 0);
    const auto rows = parse_csv(r.out);
    CHECK(rows.size() == 200);
    CHECK(find_row(rows, 0.0, "mmse-exact").value == doctest::Approx(0.680272108843537).epsilon(1e-12));
    CHECK(find_row(rows, 0.0, "cr-mmse").value == doctest::Approx(0.226757369614512).epsilon(1e-12));
    CHECK(find_row(rows, 15.0, "mmse-exact").value == doctest::Approx(0.0835421888053467).epsilon(1e-12));
    CHECK(find_row(rows, 15.0, "cr-mmse").value == doctest::Approx(0.0496031746031746).epsilon(1e-12));
    for (const Row& row : rows) {
        CHECK(row.std_error.empty());
        CHECK(row.valid);
    }
    // Closed forms carry 17 significant digits.
    CHECK(r.out.find("0,0.68027210884353739,mmse-exact,true,\n") != std::string::npos);
}

TEST_CASE("fig6, fig7 and fig8 presets") {
    SUBCASE("fig6 orders the Bregman quantities") {
        const Run r = cli("preset fig6");
        REQUIRE(r.status == 0);
        const auto rows = parse_csv(r.out);
        CHECK(rows.size() == 400);
        for (const Row& row : rows) {
            if (row.quantity == "cr-linear") CHECK(row.value < find_row(rows, row.sweep, "bregman-exact").value);
            if (row.quantity == "cr-mmse") CHECK(row.value < find_row(rows, row.sweep, "mmse-exact").value);
        }
    }
    SUBCASE("fig7 runs the verbatim curve") {
        const Run r = cli("preset fig7");
        REQUIRE(r.status == 0);
        const auto rows = parse_csv(r.out);
        CHECK(rows.size() == 200);
        CHECK(find_row(rows, 1, "cr-mmse").value == doctest::Approx(0.00882705073044494).epsilon(1e-9));
        CHECK(find_row(rows, 1, "mmse-exact").value == doctest::Approx(0.0334458562306664).epsilon(1e-9));
        CHECK(r.err.find("note: ") != std::string::npos);
    }
    SUBCASE("fig8 reports the discrepancy on stderr") {
        const Run r = cli("preset fig8");
        REQUIRE(r.status == 0);
        const auto rows = parse_csv(r.out);
        CHECK(rows.size() == 40);
        CHECK(find_row(rows, 1, "bregman-exact").value == doctest::Approx(0.0878463).epsilon(1e-6));
        const Row& mc = find_row(rows, 1, "mc-risk");
        REQUIRE_FALSE(mc.std_error.empty());
        CHECK(std::abs(mc.value - 0.0878463) < 3.0 * std::stod(mc.std_error));
        CHECK(r.err.find("0.0977901") != std::string::npos);
    }
    SUBCASE("fig2 exports the generalized I-divergence balls") {
        const Run r = cli("preset fig2");
        REQUIRE(r.status == 0);
        CHECK(r.out.rfind("curve,angle,x1,x2\n", 0) == 0);
        CHECK(r.out.find("bregman-reversed,") != std::string::npos);
    }
}

TEST_CASE("MC output is byte-identical across runs and thread counts") {
    const Run one = cli("preset fig8", "OMP_NUM_THREADS=1 ");
    const Run three = cli("preset fig8", "OMP_NUM_THREADS=3 ");
    const Run again = cli("preset fig8", "OMP_NUM_THREADS=3 ");
    REQUIRE(one.status == 0);
    CHECK(one.out == three.out);
    CHECK(three.out == again.out);

    const Run reseeded = cli("preset fig8", "BREGCR_SEED=7 ");
    REQUIRE(reseeded.status == 0);
    CHECK(reseeded.out != one.out);
    const auto a = parse_csv(one.out), b = parse_csv(reseeded.out);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].quantity != "mc-risk") CHECK(a[i].value == b[i].value);

    const Run fig6_serial = cli("preset fig6", "OMP_NUM_THREADS=1 ");
    const Run fig6_parallel = cli("preset fig6", "OMP_NUM_THREADS=4 ");
    CHECK(fig6_serial.out == fig6_parallel.out);
}

TEST_CASE("sweep configs, overrides and JSON output") {
    const fs::path cfg = write_config("ok.json", R"({
        "model": "beta-binomial",
        "prior": {"alpha": 3, "beta": 5},
        "channel": {"a": 1},
        "sweep": {"variable": "n", "range": {"from": 1, "to": 21, "points": 3}},
        "quantities": ["mmse-exact", "lmmse", "cr-mmse", "cr-linear", "cr-universal", "mc-risk"],
        "mc": {"n_samples": 2000, "seed": 11}
    })");
    const Run csv = cli("sweep --config '" + cfg.string() + "'");
    REQUIRE(csv.status == 0);
    const auto rows = parse_csv(csv.out);
    REQUIRE(rows.size() == 18);
    CHECK(rows[0].sweep == 1.0);
    CHECK(rows[6].sweep == 11.0);
    CHECK(find_row(rows, 1, "cr-universal").value == doctest::Approx(0.0188383045525902).epsilon(1e-12));

    const fs::path out = scratch() / "out.json";
    const Run js = cli("sweep --config '" + cfg.string() + "' --format json --out '" + out.string() + "'");
    REQUIRE(js.status == 0);
    CHECK(js.out.empty());
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc.at("model") == "beta-binomial");
    CHECK(doc.at("sweep_variable") == "n");
    REQUIRE(doc.at("rows").size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(doc["rows"][i]["value"].get<double>() == rows[i].value);
        CHECK(doc["rows"][i]["quantity"].get<std::string>() == rows[i].quantity);
    }
}

TEST_CASE("exit codes") {
    SUBCASE("missing or malformed config is a config error") {
        const Run r = cli("sweep --config /nonexistent/bregcr.json");
        CHECK(r.status == 2);
        CHECK(r.err.find("error:") != std::string::npos);
        CHECK(cli("sweep --config '" + write_config("bad.json", "{ not json").string() + "'").status == 2);
    }
    SUBCASE("validation errors carry a JSON path") {
        const Run unsorted = cli("sweep --config '" + write_config("unsorted.json", R"({
            "model": "gamma-poisson", "prior": {"alpha": 2.1, "theta": 3},
            "sweep": {"variable": "a", "grid": [1, 0.5]}, "quantities": ["cr-mmse"]})").string() + "'");
        CHECK(unsorted.status == 2);
        CHECK(unsorted.err.find("$.sweep.grid[1]") != std::string::npos);

        const Run unknown = cli("sweep --config '" + write_config("unknown.json", R"({
            "model": "gamma-poisson", "prior": {"alpha": 2.1, "theta": 3}, "colour": 1,
            "sweep": {"variable": "a", "grid": [1]}, "quantities": ["cr-mmse"]})").string() + "'");
        CHECK(unknown.status == 2);
        CHECK(unknown.err.find("colour") != std::string::npos);

        const Run seedless = cli("sweep --config '" + write_config("seedless.json", R"({
            "model": "gamma-poisson", "prior": {"alpha": 2.1, "theta": 3},
            "sweep": {"variable": "a", "grid": [1]}, "quantities": ["mc-risk"]})").string() + "'");
        CHECK(seedless.status == 2);
        CHECK(seedless.err.find("seed") != std::string::npos);
    }
    SUBCASE("the default seed comes from the environment") {
        const fs::path p = write_config("envseed.json", R"({
            "model": "gamma-poisson", "prior": {"alpha": 2.1, "theta": 3},
            "sweep": {"variable": "a", "grid": [1]}, "quantities": ["mc-risk"], "mc": {"n_samples": 500}})");
        const Run a = cli("sweep --config '" + p.string() + "'", "BREGCR_SEED=5 ");
        const Run b = cli("sweep --config '" + p.string() + "'", "BREGCR_SEED=5 ");
        CHECK(a.status == 0);
        CHECK(a.out == b.out);
        CHECK(cli("sweep --config '" + p.string() + "'", "BREGCR_SEED=five ").status == 2);
    }
    SUBCASE("numerical failures name the quantity") {
        const Run r = cli("sweep --config '" + write_config("huge.json", R"({
            "model": "gamma-poisson", "prior": {"alpha": 2.1, "theta": 3},
            "sweep": {"variable": "a", "grid": [1, 1e300]}, "quantities": ["cr-mmse", "bregman-exact"]})").string() +
                          "'");
        CHECK(r.status == 3);
        CHECK(r.err.find("bregman-exact") != std::string::npos);
    }
    SUBCASE("balls need a two-dimensional generator") {
        const Run r = cli("balls --gen neg-entropy --center 2,2 --radius 1");
        CHECK(r.status == 2);
        CHECK(r.err.find("one-dimensional") != std::string::npos);
        CHECK(cli("balls --gen squared --center 2").status == 2);
    }
    SUBCASE("usage errors") {
        CHECK(cli("").status == 2);
        CHECK(cli("preset fig5").status == 2);
        CHECK(cli("verify --suite everything").status == 2);
        CHECK(cli("--help").status == 0);
    }
    SUBCASE("verify passes and prints one line per check") {
        const Run r = cli("verify --suite priors");
        CHECK(r.status == 0);
        std::istringstream in(r.out);
        std::string line;
        int checks = 0;
        while (std::getline(in, line))
            if (line.rfind("PASS", 0) == 0 || line.rfind("FAIL", 0) == 0) {
                ++checks;
                CHECK(line.rfind("PASS", 0) == 0);
            }
        CHECK(checks > 10);
    }
}

TEST_CASE("ball export lies on the requested level sets") {
    auto curves = [](const std::string& text) {
        std::map<std::string, std::vector<Point>> m;
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        CHECK(line == "curve,angle,x1,x2");
        while (std::getline(in, line)) {
            std::stringstream ls(line);
            std::string name, angle, x1, x2;
            std::getline(ls, name, ',');
            std::getline(ls, angle, ',');
            std::getline(ls, x1, ',');
            std::getline(ls, x2, ',');
            Point p(2);
            p << std::stod(x1), std::stod(x2);
            m[name].push_back(p);
        }
        return m;
    };
    Point c(2);
    c << 2.0, 2.0;

    SUBCASE("generalized I-divergence") {
        const Run r = cli("balls --gen generalized-i-divergence --center 2,2 --radius 1 --resolution 90");
        REQUIRE(r.status == 0);
        auto m = curves(r.out);
        REQUIRE(m["bregman"].size() == 90);
        REQUIRE(m["bregman-reversed"].size() == 90);
        REQUIRE(m["euclidean"].size() == 90);
        const Generator g = Generator::generalized_i_divergence(2);
        double worst = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < 90; ++i) {
            worst = std::max(worst, std::abs(bregman(g, m["bregman"][i], c) - 1.0));
            worst = std::max(worst, std::abs(bregman(g, c, m["bregman-reversed"][i]) - 1.0));
            gap = std::max(gap, (m["bregman"][i] - m["bregman-reversed"][i]).norm());
        }
        CHECK(worst < 1e-8);
        CHECK(gap > 0.1);
    }
    SUBCASE("squared generator gives a circle") {
        const Run r = cli("balls --gen squared --center 2,2 --radius 1 --resolution 64");
        REQUIRE(r.status == 0);
        auto m = curves(r.out);
        const double rho = (m["bregman"][0] - c).norm();
        for (const auto& name : {"bregman", "bregman-reversed", "euclidean"})
            for (const Point& p : m[name]) CHECK((p - c).norm() == doctest::Approx(rho).epsilon(1e-9));
    }
}
