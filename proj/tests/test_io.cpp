#include <doctest.h>

#include <clocale>
#include <cmath>
#include <locale>
#include <sstream>
#include <string>

#include "circense/io.hpp"
#include "oracles.hpp"

using namespace circense;

namespace {

CensoredSample parse(const std::string& text) {
  std::istringstream in(text);
  return read_sample_csv(in);
}

std::size_t error_line(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("sample rows") {
    const auto s = parse("delta,x,l,u\n1,3.14159,2.0,4.0\n0,-3.14159265358979,2.0,4.0\n");
    REQUIRE(s.size() == 2);
    CHECK(s[0].observed);
    CHECK(s[0].angle.value() == doctest::Approx(3.14159));
    CHECK(s[0].arc == CircularArc{2.0, 4.0});
    CHECK_FALSE(s[1].observed);
  }

  TEST_CASE("invalid rows report their line") {
    CHECK(error_line("delta,x,l,u\n1,3.0,2.0,4.0\n1,1.0,2.0,4.0\n") == 3);
    CHECK(error_line("delta,x,l,u\n1,3.0,2.0,2.0\n") == 2);
    CHECK(error_line("delta,x,l,u\n2,3.0,2.0,4.0\n") == 2);
    CHECK(error_line("delta,x,l,u\n1,abc,2.0,4.0\n") == 2);
    CHECK(error_line("delta,x,l,u\n1,3.0,2.0\n") == 2);
    CHECK(error_line("delta,x,l,u\n0,1.5,2.0,4.0\n") == 2);
    CHECK(error_line("x,delta,l,u\n") == 1);
    CHECK_THROWS_AS((void)parse(""), ParseError);
    CHECK_THROWS_AS((void)parse("delta,x,l,u\n"), ParseError);
    CHECK_THROWS_AS((void)read_sample_csv(std::filesystem::path("/nonexistent/file.csv")), ParseError);
  }

  TEST_CASE("wrapped windows and CRLF input") {
    const auto s = parse("delta,x,l,u\r\n1,0.1,6.0,1.0\r\n\r\n1,12.566370614359172,6.0,1.0\r\n");
    REQUIRE(s.size() == 2);
    CHECK(s[0].arc.wraps());
    CHECK(s[1].angle.value() < 1e-12);
  }

  TEST_CASE("samples round-trip exactly") {
    std::mt19937_64 gen(4);
    const auto s = oracle::random_sample(200, gen, 0.2);
    std::ostringstream out;
    write_sample_csv(s, out);
    CHECK(parse(out.str()) == s);
    CHECK(out.str().find("-3.1415926535897931") != std::string::npos);
  }

  TEST_CASE("output ignores the global locale") {
    const char* previous = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = previous ? previous : "C";
    // de_DE may be missing in a minimal container; the check still runs under C
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
    CHECK(format_double(0.5) == "0.5");
    CHECK(parse_double("1.25") == 1.25);
    std::setlocale(LC_NUMERIC, saved.c_str());
  }

  TEST_CASE("density grid") {
    const double uniform[] = {1 / std::sqrt(kTwoPi), 0.0, 0.0};
    std::ostringstream out;
    write_density_grid(make_estimate(uniform), 4, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,density");
    int rows = 0;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      CHECK(parse_double(line.substr(0, comma)) == doctest::Approx(kTwoPi * rows / 4));
      CHECK(parse_double(line.substr(comma + 1)) == doctest::Approx(1 / kTwoPi).epsilon(1e-15));
      ++rows;
    }
    CHECK(rows == 4);
    CHECK_THROWS_AS(write_density_grid(make_estimate(uniform), 1, out), DomainError);
  }

  TEST_CASE("density grid of a truncated estimate is zero") {
    const double c[] = {1.0, 2.0, 3.0};
    auto est = make_estimate(c);
    est.truncated = true;
    std::ostringstream out;
    write_density_grid(est, 8, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(line.substr(line.find(',') + 1) == "0");
  }

  TEST_CASE("density grid peaks at the Von Mises mode") {
    std::vector<double> c(21);
    const auto truth = make_von_mises(kPi, 1.0);
    for (int l = 0; l < 21; ++l)
      c[l] = oracle::trapezoid([&](double x) { return truth.density(Angle{x}) * oracle::phi(l, x); }, 0, kTwoPi, 8192);
    std::ostringstream out;
    write_density_grid(make_estimate(c), 4096, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    double best_x = -1, best_f = -1;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double f = parse_double(line.substr(comma + 1));
      if (f > best_f) {
        best_f = f;
        best_x = parse_double(line.substr(0, comma));
      }
    }
    CHECK(std::abs(best_x - kPi) < 2 * kTwoPi / 4096);
  }

  TEST_CASE("selection trace round-trips and reproduces the choice") {
    Rng rng(8, 0);
    const auto fit = estimate_adaptive(generate_sample(model_scenario(3), 400, rng));
    std::ostringstream out;
    write_selection_trace(fit.trace, out);
    CHECK(out.str().rfind("# kappa=", 0) == 0);
    std::istringstream in(out.str());
    const auto rows = read_selection_trace(in);
    CHECK(rows.size() == ModelGrid::for_sample_size(400).models.size());
    int chosen = 0, chosen_m = 0, argmin_m = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      CHECK(r.dim == 2 * r.m + 1);
      if (r.chosen) {
        ++chosen;
        chosen_m = r.m;
      }
      if (r.admissible && r.contrast + r.penalty < best) {
        best = r.contrast + r.penalty;
        argmin_m = r.m;
      }
    }
    CHECK(chosen == 1);
    CHECK(chosen_m == fit.trace.chosen.m());
    CHECK(argmin_m == chosen_m);
  }

  TEST_CASE("expressions and distributions") {
    CHECK(parse_expression("2*pi/3") == doctest::Approx(2 * kPi / 3));
    CHECK(parse_expression("-pi/12 + (1 - 0.5) * 2") == doctest::Approx(-kPi / 12 + 1));
    CHECK(parse_expression(" 1e-3 ") == 0.001);
    CHECK_THROWS_AS((void)parse_expression("2 pi"), ParseError);
    CHECK_THROWS_AS((void)parse_expression("1/0"), ParseError);
    CHECK_THROWS_AS((void)parse_expression("(1"), ParseError);

    const auto vm = parse_distribution("vonmises(pi, 1)");
    CHECK(vm.density(Angle{kPi}) == doctest::Approx(von_mises_density(Angle{kPi}, 1.0, Angle{kPi})));
    const auto mix = parse_distribution("mixture(0.6, pi/3, 3; 0.4, 15*pi/9, 3)");
    CHECK(mix.density(Angle{1.0}) == doctest::Approx(model_scenario(3).target.density(Angle{1.0})));
    const auto ua = parse_distribution("uniform_arc(-pi/12, pi + pi/12)");
    CHECK(ua.density(Angle{0.0}) == doctest::Approx(1 / (kPi + kPi / 6)));
    CHECK_THROWS_AS((void)parse_distribution("cauchy(0, 1)"), ParseError);
    CHECK_THROWS_AS((void)parse_distribution("vonmises(0)"), ParseError);
    CHECK_THROWS_AS((void)parse_distribution("vonmises(0, -1)"), ParseError);
    CHECK_THROWS_AS((void)parse_distribution("mixture(0.5, 0, 1)"), ParseError);
  }

  TEST_CASE("study configs") {
    std::istringstream named("# first row of the reference study\nmodel = model1\nn = 50, 100,500\nreplications = 100\nseed = 42\n");
    const auto a = parse_study_config(named);
    CHECK(a.scenario.name == "model1");
    CHECK(a.sample_sizes == std::vector<std::size_t>{50, 100, 500});
    CHECK(a.replications == 100);
    CHECK(a.seed == 42u);
    CHECK_FALSE(a.kappa.has_value());

    std::istringstream custom(
        "name = mine\ntarget = vonmises(2, 1)\nlower = vonmises(0, 0)\noffset = 1\nkappa = 4\nstrategy = slope\ngrid_cap = 10\n");
    const auto b = parse_study_config(custom);
    CHECK(b.scenario.name == "mine");
    CHECK(std::holds_alternative<FixedOffset>(b.scenario.coupling));
    CHECK(b.kappa == 4.0);
    CHECK(b.strategy == KappaStrategy::slope_regression);
    CHECK(b.grid_cap == 10);

    std::istringstream offset("model = offset\nalpha = 3\n");
    CHECK(std::get<FixedOffset>(parse_study_config(offset).scenario.coupling).alpha == 3.0);
  }

  TEST_CASE("bad configs report their line") {
    const auto line_of = [](const std::string& text) -> std::size_t {
      std::istringstream in(text);
      try {
        (void)parse_study_config(in);
      } catch (const ParseError& e) {
        return e.line() == 0 ? 999 : e.line();
      }
      return 0;
    };
    CHECK(line_of("model = model1\nbogus = 3\n") == 2);
    CHECK(line_of("model = model7\n") == 1);
    CHECK(line_of("model = model1\nn = 50, 2\n") == 2);
    CHECK(line_of("model = model1\nmodel = model2\n") == 2);
    CHECK(line_of("model = model1\nkappa = -1\n") == 2);
    CHECK(line_of("just words\n") == 1);
    CHECK(line_of("target = vonmises(0, 1)\n") == 999);
    CHECK(line_of("model = model1\ntarget = vonmises(0, 1)\n") == 2);
  }

  TEST_CASE("MISE report formats") {
    MiseReport r{"model1", {}};
    MiseRow row;
    row.n = 50;
    row.replications = 100;
    row.mise = 0.04;
    row.std_error = 0.004;
    row.censored_fraction = 0.44;
    row.mean_dim = 5.1;
    r.rows.push_back(row);
    std::ostringstream csv, table;
    write_mise_csv(r, csv);
    CHECK(csv.str() == "scenario,n,N,mise,stderr,censored_frac,mean_dim,failures\n"
                       "model1,50,100,0.040000000000000001,0.0040000000000000001,0.44,5.0999999999999996,0\n");
    print_mise_table(r, table);
    CHECK(table.str().find("0.0400") != std::string::npos);
    CHECK(count_lines(table.str()) == 3);
  }
}
