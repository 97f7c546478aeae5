#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "snr/csv.hpp"
#include "snr/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SNR_CLI_PATH;
const fs::path kData = SNR_DATA_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("snr_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string data_args() {
    std::ostringstream os;
    os << "--nodes " << (kData / "nodes.csv") << " --edges " << (kData / "edges.csv")
       << " --events " << (kData / "events.csv") << " --covariates "
       << (kData / "covariates.csv");
    return os.str();
}

}  // namespace

TEST_CASE("fit reproduces the golden outputs byte for byte") {
    TempDir dir;
    std::string args = "fit " + data_args() + " --model " + (kData / "model.cfg").string() +
                       " --out " + dir.path.string();
    REQUIRE(run(args) == 0);
    for (const char* name : {"coefficients.csv", "criteria.csv", "fitted.csv",
                             "smooth_park_dist.csv"}) {
        INFO(name);
        REQUIRE(slurp(dir.path / name) == slurp(kData / "golden" / name));
    }

    // rerunning is byte-identical
    TempDir again;
    REQUIRE(run("fit " + data_args() + " --model " + (kData / "model.cfg").string() +
                " --out " + again.path.string()) == 0);
    REQUIRE(slurp(again.path / "coefficients.csv") == slurp(dir.path / "coefficients.csv"));
}

TEST_CASE("simulate is deterministic for a fixed seed") {
    TempDir dir;
    std::string base = "simulate --graph " + (kData / "nodes.csv").string() + " " +
                       (kData / "edges.csv").string() +
                       " --intensity \"exp(0.6 + 0.5*z - 3.0*bowl)\" --covariates " +
                       (kData / "covariates.csv").string() + " --seed 2024 --out ";
    REQUIRE(run(base + (dir.path / "a.csv").string()) == 0);
    REQUIRE(run(base + (dir.path / "b.csv").string()) == 0);
    REQUIRE(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
    // the bundled events are this exact draw
    REQUIRE(slurp(dir.path / "a.csv") == slurp(kData / "events.csv"));

    // a different seed gives a different pattern
    REQUIRE(run("simulate --graph " + (kData / "nodes.csv").string() + " " +
                (kData / "edges.csv").string() +
                " --intensity 2.0 --seed 1 --out " + (dir.path / "c.csv").string()) == 0);
    REQUIRE(run("simulate --graph " + (kData / "nodes.csv").string() + " " +
                (kData / "edges.csv").string() +
                " --intensity 2.0 --seed 2 --out " + (dir.path / "d.csv").string()) == 0);
    REQUIRE(slurp(dir.path / "c.csv") != slurp(dir.path / "d.csv"));
}

TEST_CASE("summarize emits the five-number layout") {
    TempDir dir;
    REQUIRE(run("summarize --covariates " + (kData / "covariates.csv").string() + " --out " +
                dir.path.string()) == 0);
    auto table = snr::read_csv((dir.path / "covariate_summary.csv").string());
    REQUIRE(table.header == std::vector<std::string>{"covariate", "Min", "1st Q", "Median",
                                                     "Mean", "3rd Q", "Max"});
    // z, park_dist and bowl are numeric; categorical soil is skipped
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0][0] == "z");
}

TEST_CASE("stats reports the small-path hand values") {
    TempDir dir;
    std::ofstream(dir.path / "nodes.csv") << "id,x,y\na,0,0\nb,1,0\nc,2,0\n";
    std::ofstream(dir.path / "edges.csv")
        << "id,tail,head,directed\ne1,a,b,0\ne2,b,c,0\n";
    REQUIRE(run("stats --nodes " + (dir.path / "nodes.csv").string() + " --edges " +
                (dir.path / "edges.csv").string() + " --communities 3 --out " +
                dir.path.string()) == 0);
    std::string text = slurp(dir.path / "stats.txt");
    CHECK(text.find("mean degree 1.3333333333333333") != std::string::npos);
    CHECK(text.find("components 1") != std::string::npos);
    CHECK(text.find("diameter 2") != std::string::npos);
    CHECK(text.find("communities 3") != std::string::npos);
}

TEST_CASE("intensity outputs are round-trippable by the csv reader") {
    TempDir dir;
    std::string args = "intensity --nodes " + (kData / "nodes.csv").string() + " --edges " +
                       (kData / "edges.csv").string() + " --events " +
                       (kData / "events.csv").string();
    REQUIRE(run(args + " --out " + dir.path.string()) == 0);
    auto edges = snr::read_csv((dir.path / "edge_intensity.csv").string());
    REQUIRE(edges.header ==
            std::vector<std::string>{"edge_id", "count", "length", "intensity"});
    auto nodes = snr::read_csv((dir.path / "node_intensity.csv").string());
    REQUIRE(nodes.header ==
            std::vector<std::string>{"node_id", "mode", "intensity", "defined"});
    // every edge row parses numerically and reproduces count/length
    int count_col = edges.require_column("count"), len_col = edges.require_column("length"),
        int_col = edges.require_column("intensity");
    for (const auto& row : edges.rows) {
        double c = snr::parse_double(row[count_col], "count");
        double l = snr::parse_double(row[len_col], "length");
        double i = snr::parse_double(row[int_col], "intensity");
        REQUIRE(i == c / l);
    }
}

TEST_CASE("errors exit nonzero with a diagnostic") {
    CHECK(run("stats --nodes /nonexistent.csv --edges /nope.csv") != 0);
    CHECK(run("fit --nodes /nonexistent.csv --edges /nope.csv --events /no.csv --model /no.cfg") != 0);
    TempDir dir;
    std::ofstream(dir.path / "bad.cfg") << "wibble\n";
    CHECK(run("fit " + data_args() + " --model " + (dir.path / "bad.cfg").string()) != 0);
}
