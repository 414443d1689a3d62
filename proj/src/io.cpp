#include "circense/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace circense {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string context(std::size_t line) {
  return line == 0 ? std::string{} : "line " + std::to_string(line) + ": ";
}

// Recursive-descent evaluator: expr = term {(+|-) term}; term = factor {(*|/) factor};
// factor = [+|-] (number | pi | '(' expr ')').
class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, std::size_t line) : text_(text), line_(line) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + text_.substr(pos_) + "'");
    return v;
  }

 private:
  double expr() {
    double v = term();
    for (;;) {
      skip_space();
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      skip_space();
      if (accept('*')) v *= factor();
      else if (accept('/')) v /= factor();
      else return v;
    }
  }

  double factor() {
    skip_space();
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      const double v = expr();
      skip_space();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (text_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
    if (ec != std::errc{} || ptr == first) fail("expected a number in '" + text_ + "'");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(context(line_) + msg, line_);
  }

  const std::string& text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::size_t parse_count(const std::string& text, std::size_t line, const char* what) {
  std::size_t v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(context(line) + "invalid " + what + " '" + t + "'", line);
  }
  return v;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& text, std::size_t line) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ParseError(context(line) + "invalid boolean '" + text + "'", line);
}

bool getline_numbered(std::istream& in, std::string& out, std::size_t& line) {
  if (!std::getline(in, out)) return false;
  ++line;
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return true;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(what), line_(line) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && t.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(context(line) + "invalid number '" + t + "'", line);
  }
  return v;
}

CensoredSample read_sample_csv(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  do {
    if (!getline_numbered(in, text, line)) throw ParseError("empty input: missing header 'delta,x,l,u'", 0);
  } while (trim(text).empty());
  if (lower(trim(text)) != "delta,x,l,u") {
    throw ParseError(context(line) + "expected header 'delta,x,l,u', got '" + trim(text) + "'", line);
  }

  std::vector<CensoredObservation> obs;
  while (getline_numbered(in, text, line)) {
    if (trim(text).empty()) continue;
    const auto fields = split(text, ',');
    if (fields.size() != 4) {
      throw ParseError(context(line) + "expected 4 fields, got " + std::to_string(fields.size()), line);
    }
    const std::string& delta = fields[0];
    if (delta != "0" && delta != "1") {
      throw ParseError(context(line) + "delta must be 0 or 1, got '" + delta + "'", line);
    }
    const double l = parse_double(fields[2], line);
    const double u = parse_double(fields[3], line);
    if (!std::isfinite(l) || !std::isfinite(u)) {
      throw ParseError(context(line) + "window endpoints must be finite", line);
    }
    const Angle la{l};
    const Angle ua{u};
    if (la == ua) {
      throw ParseError(context(line) + "invalid window: l and u coincide", line);
    }
    const CircularArc window{la, ua};
    if (delta == "1") {
      const double x = parse_double(fields[1], line);
      if (!std::isfinite(x)) throw ParseError(context(line) + "x must be finite", line);
      const Angle xa{x};
      if (!contains(window, xa)) {
        throw ParseError(context(line) + "inconsistent row: delta = 1 but x = " + fields[1] +
                             " is outside [" + fields[2] + ", " + fields[3] + "]",
                         line);
      }
      obs.push_back(CensoredObservation::make_observed(xa, window));
    } else {
      const double x = parse_double(fields[1], line);
      if (std::abs(x - kCensoredSentinel) > 1e-9) {
        throw ParseError(context(line) + "censored rows must carry x = -pi, got " + fields[1], line);
      }
      obs.push_back(CensoredObservation::make_censored(window));
    }
  }
  if (obs.empty()) throw ParseError("sample has no rows", line);
  return CensoredSample{std::move(obs)};
}

CensoredSample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return read_sample_csv(in);
}

void write_sample_csv(const CensoredSample& sample, std::ostream& out) {
  out << "delta,x,l,u\n";
  for (const auto& o : sample.observations()) {
    out << (o.observed ? '1' : '0') << ','
        << format_double(o.observed ? o.angle.value() : kCensoredSentinel) << ','
        << format_double(o.arc.start().value()) << ',' << format_double(o.arc.end().value()) << '\n';
  }
}

void write_density_grid(const DensityEstimate& est, int resolution, std::ostream& out) {
  if (resolution < 2) throw DomainError("density grid resolution must be at least 2");
  out << "x,density\n";
  for (int j = 0; j < resolution; ++j) {
    const double x = kTwoPi * j / resolution;
    out << format_double(x) << ',' << format_double(evaluate_density(est, Angle{x})) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing density grid");
}

void write_selection_trace(const SelectionTrace& trace, std::ostream& out) {
  out << "# kappa=" << format_double(trace.kappa) << ",source=" << to_string(trace.kappa_source)
      << ",n=" << trace.n << '\n';
  out << "m,dim,admissible,contrast,op_norm_inv,penalty,chosen\n";
  for (const auto& r : trace.records) {
    out << r.m.m() << ',' << r.m.dim() << ',' << format_bool(r.admissible) << ','
        << format_double(r.contrast) << ',' << format_double(r.op_norm_inv) << ','
        << format_double(r.penalty) << ',' << format_bool(r.m == trace.chosen) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing selection trace");
}

std::vector<TraceRow> read_selection_trace(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  bool header = false;
  std::vector<TraceRow> rows;
  while (getline_numbered(in, text, line)) {
    const std::string t = trim(text);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "m,dim,admissible,contrast,op_norm_inv,penalty,chosen") {
        throw ParseError(context(line) + "unexpected trace header", line);
      }
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 7) throw ParseError(context(line) + "expected 7 fields", line);
    const auto num = [&](const std::string& s) {
      return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_double(s, line);
    };
    rows.push_back(TraceRow{static_cast<int>(parse_count(f[0], line, "m")),
                            static_cast<int>(parse_count(f[1], line, "dim")), parse_bool(f[2], line),
                            num(f[3]), num(f[4]), num(f[5]), parse_bool(f[6], line)});
  }
  return rows;
}

void write_mise_csv(const MiseReport& report, std::ostream& out) {
  out << "scenario,n,N,mise,stderr,censored_frac,mean_dim,failures\n";
  for (const auto& r : report.rows) {
    out << report.scenario << ',' << r.n << ',' << r.replications << ',' << format_double(r.mise)
        << ',' << format_double(r.std_error) << ',' << format_double(r.censored_fraction) << ','
        << format_double(r.mean_dim) << ',' << r.failures << '\n';
  }
  if (!out) throw std::runtime_error("failed writing MISE report");
}

void print_mise_table(const MiseReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "scenario: " << report.scenario << '\n';
  out << std::setw(8) << "n" << std::setw(6) << "N" << std::setw(12) << "MISE" << std::setw(12)
      << "stderr" << std::setw(10) << "% cens." << std::setw(10) << "mean D" << std::setw(10)
      << "failures" << '\n';
  out << std::fixed;
  for (const auto& r : report.rows) {
    out << std::setw(8) << r.n << std::setw(6) << r.replications << std::setprecision(4)
        << std::setw(12) << r.mise << std::setw(12) << r.std_error << std::setprecision(1)
        << std::setw(10) << 100.0 * r.censored_fraction << std::setprecision(2) << std::setw(10)
        << r.mean_dim << std::setw(10) << r.failures << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_oracle_scan_csv(const OracleScan& scan, std::ostream& out) {
  out << "scenario,n,N,m,dim,mise,stderr,failures\n";
  for (const auto& r : scan.rows) {
    out << scan.scenario << ',' << scan.n << ',' << scan.replications << ',' << r.m.m() << ','
        << r.m.dim() << ',' << format_double(r.mise) << ',' << format_double(r.std_error) << ','
        << r.failures << '\n';
  }
  if (!out) throw std::runtime_error("failed writing oracle scan");
}

double parse_expression(const std::string& text, std::size_t line) {
  const double v = ExpressionParser(text, line).parse();
  if (!std::isfinite(v)) throw ParseError(context(line) + "expression is not finite: " + text, line);
  return v;
}

CircularDistribution parse_distribution(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') {
    throw ParseError(context(line) + "expected name(args), got '" + t + "'", line);
  }
  const std::string name = lower(trim(t.substr(0, open)));
  const std::string args = t.substr(open + 1, t.size() - open - 2);
  const auto numbers = [&](const std::string& s, std::size_t expected) {
    const auto parts = split(s, ',');
    if (parts.size() != expected) {
      throw ParseError(context(line) + name + " expects " + std::to_string(expected) + " arguments", line);
    }
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(parse_expression(p, line));
    return v;
  };
  try {
    if (name == "vonmises") {
      const auto v = numbers(args, 2);
      return make_von_mises(v[0], v[1]);
    }
    if (name == "uniform_arc") {
      const auto v = numbers(args, 2);
      return make_uniform_arc(v[0], v[1]);
    }
    if (name == "mixture") {
      std::vector<MixtureComponent> comps;
      for (const auto& part : split(args, ';')) {
        const auto v = numbers(part, 3);
        if (!(v[2] >= 0.0)) throw DomainError("Von Mises concentration must be non-negative");
        comps.push_back({v[0], VonMises{Angle{v[1]}, v[2]}});
      }
      return make_mixture(std::move(comps));
    }
  } catch (const DomainError& e) {
    throw ParseError(context(line) + e.what(), line);
  }
  throw ParseError(context(line) + "unknown distribution '" + name + "'", line);
}

StudyConfig parse_study_config(std::istream& in) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::string text;
  std::size_t line = 0;
  while (getline_numbered(in, text, line)) {
    const auto hash = text.find('#');
    const std::string t = trim(hash == std::string::npos ? text : text.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(context(line) + "expected 'key = value'", line);
    const std::string key = lower(trim(t.substr(0, eq)));
    if (kv.count(key)) throw ParseError(context(line) + "duplicate key '" + key + "'", line);
    kv[key] = {trim(t.substr(eq + 1)), line};
  }

  static const char* known[] = {"model", "alpha", "name", "target", "lower", "upper", "offset",
                                "n", "seed", "replications", "grid_cap", "kappa", "strategy"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known)) {
      throw ParseError(context(value.second) + "unknown key '" + key + "'", value.second);
    }
  }
  const auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  StudyConfig cfg;
  try {
    if (const auto* model = get("model")) {
      const std::string m = lower(model->first);
      if (m == "offset") {
        const auto* alpha = get("alpha");
        if (!alpha) throw ParseError(context(model->second) + "model = offset needs 'alpha'", model->second);
        cfg.scenario = offset_scenario(parse_expression(alpha->first, alpha->second));
      } else if (m.size() == 6 && m.rfind("model", 0) == 0 && m[5] >= '1' && m[5] <= '4') {
        cfg.scenario = model_scenario(m[5] - '0');
      } else {
        throw ParseError(context(model->second) + "unknown model '" + model->first + "'", model->second);
      }
      for (const char* k : {"target", "lower", "upper", "offset"}) {
        if (const auto* v = get(k)) {
          throw ParseError(context(v->second) + "'" + k + "' conflicts with 'model'", v->second);
        }
      }
    } else {
      const auto* target = get("target");
      const auto* lower_law = get("lower");
      if (!target || !lower_law) {
        throw ParseError("config needs either 'model' or both 'target' and 'lower'", 0);
      }
      ScenarioSpec spec{"custom", parse_distribution(target->first, target->second),
                        parse_distribution(lower_law->first, lower_law->second),
                        make_von_mises(0.0, 0.0)};
      const auto* upper = get("upper");
      const auto* offset = get("offset");
      if ((upper != nullptr) == (offset != nullptr)) {
        throw ParseError("config needs exactly one of 'upper' and 'offset'", 0);
      }
      if (upper) {
        spec.upper_law = parse_distribution(upper->first, upper->second);
      } else {
        const double alpha = parse_expression(offset->first, offset->second);
        if (!(alpha > 0.0 && alpha < kTwoPi)) {
          throw ParseError(context(offset->second) + "offset must lie in (0, 2pi)", offset->second);
        }
        spec.coupling = FixedOffset{alpha};
      }
      cfg.scenario = std::move(spec);
    }
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0);
  }

  if (const auto* v = get("name")) cfg.scenario.name = v->first;
  if (const auto* v = get("n")) {
    cfg.sample_sizes.clear();
    for (const auto& part : split(v->first, ',')) {
      const std::size_t n = parse_count(part, v->second, "sample size");
      if (n < 4) throw ParseError(context(v->second) + "sample sizes must be at least 4", v->second);
      cfg.sample_sizes.push_back(n);
    }
  }
  if (const auto* v = get("replications")) cfg.replications = parse_count(v->first, v->second, "replications");
  if (const auto* v = get("seed")) cfg.seed = parse_count(v->first, v->second, "seed");
  if (const auto* v = get("grid_cap")) {
    cfg.grid_cap = static_cast<int>(parse_count(v->first, v->second, "grid_cap"));
    if (cfg.grid_cap < 1 || cfg.grid_cap > kMaxModel) {
      throw ParseError(context(v->second) + "grid_cap must lie in [1, 64]", v->second);
    }
  }
  if (const auto* v = get("kappa")) {
    const double k = parse_expression(v->first, v->second);
    if (!(k > 0.0)) throw ParseError(context(v->second) + "kappa must be positive", v->second);
    cfg.kappa = k;
  }
  if (const auto* v = get("strategy")) {
    try {
      cfg.strategy = parse_kappa_strategy(lower(v->first));
    } catch (const DomainError& e) {
      throw ParseError(context(v->second) + e.what(), v->second);
    }
  }
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return parse_study_config(in);
}

}  // namespace circense
