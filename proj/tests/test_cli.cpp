#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "circense/io.hpp"

namespace fs = std::filesystem;
using circense::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("circense_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate then estimate") {
    TempDir dir;
    REQUIRE(call({"simulate", "--model", "model1", "-n", "500", "--seed", "3", "-o", dir / "s.csv"}).code == 0);
    const auto r = call({"estimate", "-i", dir / "s.csv", "-o", dir / "d.csv", "--trace", dir / "t.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("m=") == 0);
    CHECK(r.out.find("truncated=no") != std::string::npos);
    std::istringstream trace(slurp(dir / "t.csv"));
    const auto rows = circense::read_selection_trace(trace);
    CHECK(rows.size() <= 25);
    CHECK_FALSE(rows.empty());
    const auto grid = slurp(dir / "d.csv");
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 1025);
  }

  TEST_CASE("estimate honours kappa, resolution and the default trace path") {
    TempDir dir;
    REQUIRE(call({"simulate", "--model", "model2", "-n", "100", "-o", dir / "s.csv"}).code == 0);
    const auto r = call({"estimate", "-i", dir / "s.csv", "-o", dir / "d.csv", "--kappa", "5", "--resolution", "16"});
    CHECK(r.code == 0);
    CHECK(r.out.find("kappa=5 (user)") != std::string::npos);
    CHECK(fs::exists(dir / "d.trace.csv"));
    CHECK(slurp(dir / "d.trace.csv").rfind("# kappa=5,source=user", 0) == 0);
    const auto grid = slurp(dir / "d.csv");
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 17);
  }

  TEST_CASE("estimate exit codes") {
    TempDir dir;
    CHECK(call({"estimate", "-i", dir / "missing.csv", "-o", dir / "d.csv"}).code == 1);

    {
      std::ofstream f(dir / "bad.csv");
      f << "delta,x,l,u\n1,3.0,2.0,4.0\n1,1.0,2.0,4.0\n";
    }
    const auto bad = call({"estimate", "-i", dir / "bad.csv", "-o", dir / "d.csv"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 3") != std::string::npos);

    {
      std::ofstream f(dir / "sparse.csv");
      f << "delta,x,l,u\n";
      for (int i = 0; i < 6; ++i) f << "0,-3.1415926535897931,0,0.0001\n";
    }
    CHECK(call({"estimate", "-i", dir / "sparse.csv", "-o", dir / "d.csv"}).code == 2);
    CHECK(call({"estimate", "-i", dir / "sparse.csv"}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({}).code == 1);
    CHECK(call({"--help"}).code == 0);
  }

  TEST_CASE("mise is byte-deterministic") {
    TempDir dir;
    const std::vector<std::string> base{"mise", "--model", "model1", "-n", "50,100", "-N", "10", "--seed", "9"};
    auto a = base;
    a.insert(a.end(), {"-o", dir / "a.csv"});
    auto b = base;
    b.insert(b.end(), {"-o", dir / "b.csv", "--jobs", "3"});
    CHECK(call(a).code == 0);
    CHECK(call(b).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").rfind("scenario,n,N,mise,stderr,censored_frac,mean_dim,failures\n", 0) == 0);
  }

  TEST_CASE("mise input errors") {
    TempDir dir;
    CHECK(call({"mise", "--model", "model1", "-N", "1"}).code == 1);
    CHECK(call({"mise"}).code == 1);
    CHECK(call({"mise", "--config", dir / "none.cfg"}).code == 1);
    {
      std::ofstream f(dir / "bad.cfg");
      f << "model = model1\nreplicatons = 5\n";
    }
    const auto r = call({"mise", "--config", dir / "bad.cfg"});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("mise reads a config file") {
    TempDir dir;
    {
      std::ofstream f(dir / "t.cfg");
      f << "name = custom\ntarget = vonmises(2, 1)\nlower = vonmises(0, 0)\noffset = 1\nn = 40\nreplications = 4\nseed = 2\n";
    }
    const auto r = call({"mise", "--config", dir / "t.cfg", "-o", dir / "m.csv"});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "m.csv").find("\ncustom,40,4,") != std::string::npos);
  }

  TEST_CASE("seed falls back to the environment") {
    TempDir dir;
    ::setenv("CIRCENSE_SEED", "77", 1);
    CHECK(call({"simulate", "--model", "model4", "-n", "20", "-o", dir / "env.csv"}).code == 0);
    ::setenv("CIRCENSE_SEED", "not-a-number", 1);
    CHECK(call({"simulate", "--model", "model4", "-n", "20", "-o", dir / "x.csv"}).code == 1);
    ::unsetenv("CIRCENSE_SEED");
    CHECK(call({"simulate", "--model", "model4", "-n", "20", "--seed", "77", "-o", dir / "flag.csv"}).code == 0);
    CHECK(slurp(dir / "env.csv") == slurp(dir / "flag.csv"));
  }

  TEST_CASE("oracle scan") {
    TempDir dir;
    const auto r = call({"oracle-scan", "--model", "model1", "-n", "60", "-N", "5", "--grid-cap", "6", "-o", dir / "o.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("best fixed m=") == 0);
    const auto csv = slurp(dir / "o.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }

  TEST_CASE("fit-vonmises") {
    TempDir dir;
    REQUIRE(call({"simulate", "--model", "offset", "--alpha", "1", "-n", "100", "--seed", "4", "-o", dir / "s.csv"}).code == 0);
    const auto r = call({"fit-vonmises", "-i", dir / "s.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("mu=", 0) == 0);
    const auto dot = r.out.find('.');
    const auto space = r.out.find(' ');
    CHECK(space - dot - 1 == 6);

    // uniform data: X uniform, windows never censor
    {
      std::ofstream f(dir / "u.csv");
      f << "delta,x,l,u\n";
      for (int i = 0; i < 400; ++i) {
        const double x = 6.283185307179586 * (i + 0.5) / 400;
        f << "1," << circense::format_double(x) << ',' << circense::format_double(x - 1e-3) << ','
          << circense::format_double(x - 2e-3) << '\n';
      }
    }
    const auto flat = call({"fit-vonmises", "-i", dir / "u.csv", "--kappa", "1000"});
    CHECK(flat.code == 0);
    CHECK(flat.out.find("kappa=0.000000") != std::string::npos);
    CHECK(flat.err.find("warning") != std::string::npos);
    CHECK(call({"fit-vonmises", "-i", dir / "missing.csv"}).code == 1);
  }
}
