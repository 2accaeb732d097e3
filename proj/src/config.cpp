#include "halpern/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace halpern {

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& field,
                         const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + field + ": " + message),
      line_(line),
      field_(field) {}

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(lineno, line, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        static const std::set<std::string> known{"problem", "solver", "step", "batch",
                                                 "experiment"};
        if (!known.count(section)) fail(lineno, "[" + section + "]", "unknown section");
        section_line_[section] = lineno;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, line, "expected 'key = value'");
      if (section.empty()) fail(lineno, trim(line.substr(0, eq)), "key outside any section");
      Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
      if (e.key.empty()) fail(lineno, "=", "missing key");
      if (e.value.empty()) fail(lineno, qualified(section, e.key), "missing value");
      entries_[section].push_back(std::move(e));
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& msg) const {
    throw ConfigError(source_, line, field, msg);
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section + "." + key;
  }

  /// Single-valued key; repeated keys are rejected.
  const Entry* find(const std::string& section, const std::string& key) {
    const Entry* hit = nullptr;
    for (const auto& e : entries_[section]) {
      if (e.key != key) continue;
      if (hit) fail(e.line, qualified(section, key), "given more than once");
      hit = &e;
    }
    if (hit) used_.insert(hit);
    return hit;
  }

  const Entry& require(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) fail(section_line_.count(section) ? section_line_[section] : 0,
                 qualified(section, key), "required key missing");
    return *e;
  }

  std::vector<const Entry*> all(const std::string& section, const std::string& key) {
    std::vector<const Entry*> out;
    for (const auto& e : entries_[section]) {
      if (e.key == key) {
        out.push_back(&e);
        used_.insert(&e);
      }
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [section, list] : entries_) {
      for (const auto& e : list) {
        if (!used_.count(&e)) fail(e.line, qualified(section, e.key), "unknown or unused key");
      }
    }
  }

  double number(const std::string& section, const Entry& e) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (trim(e.value.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, qualified(section, e.key), "expected a finite number, got '" + e.value + "'");
  }

  std::uint64_t integer(const std::string& section, const Entry& e) const {
    const auto& s = e.value;
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
      }
    }
    // Accept integral values in exponent notation such as 1e4.
    const double v = number(section, e);
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
    fail(e.line, qualified(section, e.key), "expected a nonnegative integer, got '" + s + "'");
  }

  std::vector<double> numbers(const std::string& section, const Entry& e,
                              const std::string& text) const {
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      Entry tmp{e.key, tok, e.line};
      out.push_back(number(section, tmp));
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::vector<Entry>> entries_;
  std::map<std::string, std::size_t> section_line_;
  std::set<const Entry*> used_;
};

template <class F>
auto guarded(Reader& r, const std::string& field, std::size_t line, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    r.fail(line, field, e.what());
  }
}

void parse_problem(Reader& r, ProblemSpec& p) {
  const std::string s = "problem";
  const auto& fam = r.require(s, "family");
  if (fam.value == "halfspaces") {
    p.family = ProblemFamily::halfspaces;
  } else if (fam.value == "random_halfspaces") {
    p.family = ProblemFamily::random_halfspaces;
  } else if (fam.value == "quadratic") {
    p.family = ProblemFamily::quadratic;
  } else if (fam.value == "random_quadratic") {
    p.family = ProblemFamily::random_quadratic;
  } else {
    r.fail(fam.line, "problem.family",
           "expected halfspaces, random_halfspaces, quadratic or random_quadratic, got '" +
               fam.value + "'");
  }

  const auto& dim = r.require(s, "dim");
  p.dim = r.integer(s, dim);
  if (p.dim < 1) r.fail(dim.line, "problem.dim", "must be >= 1");

  const bool random = p.family == ProblemFamily::random_halfspaces ||
                      p.family == ProblemFamily::random_quadratic;
  if (random) {
    const auto& n = r.require(s, "n");
    p.n = r.integer(s, n);
    if (p.n < 1) r.fail(n.line, "problem.n", "must be >= 1");
    p.data_seed = r.integer(s, r.require(s, "data_seed"));
    if (const auto* e = r.find(s, "x0_scale")) {
      p.x0_scale = r.number(s, *e);
      if (!(p.x0_scale > 0.0)) r.fail(e->line, "problem.x0_scale", "must be > 0");
    }
  }

  if (p.family == ProblemFamily::halfspaces) {
    const auto list = r.all(s, "halfspace");
    if (list.empty()) r.fail(fam.line, "problem.halfspace", "at least one halfspace required");
    for (const auto* e : list) {
      const auto bar = e->value.find('|');
      if (bar == std::string::npos) r.fail(e->line, "problem.halfspace", "expected 'a_1 ... a_d | beta'");
      const auto a = r.numbers(s, *e, e->value.substr(0, bar));
      const auto beta = r.numbers(s, *e, e->value.substr(bar + 1));
      if (a.size() != p.dim)
        r.fail(e->line, "problem.halfspace",
               "normal has " + std::to_string(a.size()) + " entries, dim is " + std::to_string(p.dim));
      if (beta.size() != 1) r.fail(e->line, "problem.halfspace", "expected one offset after '|'");
      Vector normal = Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
      p.halfspaces.push_back(
          guarded(r, "problem.halfspace", e->line, [&] { return Halfspace(normal, beta[0]); }));
    }
  }

  if (p.family == ProblemFamily::quadratic) {
    const auto list = r.all(s, "term");
    if (list.empty()) r.fail(fam.line, "problem.term", "at least one term required");
    for (const auto* e : list) {
      const auto bar = e->value.find('|');
      if (bar == std::string::npos)
        r.fail(e->line, "problem.term", "expected 'row; row; ... | b_1 ... b_m'");
      std::vector<std::vector<double>> rows;
      std::istringstream in(e->value.substr(0, bar));
      std::string row;
      while (std::getline(in, row, ';')) {
        rows.push_back(r.numbers(s, *e, row));
        if (rows.back().size() != p.dim)
          r.fail(e->line, "problem.term",
                 "row " + std::to_string(rows.size()) + " has " +
                     std::to_string(rows.back().size()) + " entries, dim is " +
                     std::to_string(p.dim));
      }
      const auto b = r.numbers(s, *e, e->value.substr(bar + 1));
      if (b.size() != rows.size())
        r.fail(e->line, "problem.term",
               "A has " + std::to_string(rows.size()) + " rows but b has " +
                   std::to_string(b.size()) + " entries");
      Matrix a(rows.size(), p.dim);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < p.dim; ++j) a(i, j) = rows[i][j];
      Vector bv = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
      p.terms.push_back(
          guarded(r, "problem.term", e->line, [&] { return QuadraticTerm(a, bv); }));
    }
  }

  if (p.family == ProblemFamily::random_quadratic) {
    const auto& rows = r.require(s, "rows");
    p.rows = r.integer(s, rows);
    if (p.rows < 1) r.fail(rows.line, "problem.rows", "must be >= 1");
  }

  if (p.family == ProblemFamily::quadratic || p.family == ProblemFamily::random_quadratic) {
    if (const auto* e = r.find(s, "eta"); e && e->value != "auto") {
      p.eta = r.number(s, *e);
      if (!(*p.eta > 0.0)) r.fail(e->line, "problem.eta", "must be > 0 or 'auto'");
    }
  }

  if (const auto* e = r.find(s, "x0")) {
    const auto v = r.numbers(s, *e, e->value);
    if (v.size() != p.dim)
      r.fail(e->line, "problem.x0",
             "has " + std::to_string(v.size()) + " entries, dim is " + std::to_string(p.dim));
    p.x0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } else if (!random) {
    r.fail(fam.line, "problem.x0", "required key missing");
  }
}

StepSchedule parse_step(Reader& r, double lambda) {
  const std::string s = "step";
  const auto& kind = r.require(s, "kind");
  if (kind.value == "poly") {
    const auto& a = r.require(s, "a");
    return guarded(r, "step.a", a.line, [&] { return StepSchedule::poly(r.number(s, a)); });
  }
  if (kind.value == "lambda_poly") {
    const auto& a = r.require(s, "a");
    return guarded(r, "step.a", a.line,
                   [&] { return StepSchedule::lambda_poly(r.number(s, a), lambda); });
  }
  if (kind.value == "constant") {
    const auto& c = r.require(s, "c");
    return guarded(r, "step.c", c.line, [&] { return StepSchedule::constant(r.number(s, c)); });
  }
  r.fail(kind.line, "step.kind", "expected poly, lambda_poly or constant, got '" + kind.value + "'");
}

BatchSchedule parse_batch(Reader& r) {
  const std::string s = "batch";
  const auto& kind = r.require(s, "kind");
  std::optional<BatchSchedule> out;
  if (kind.value == "constant") {
    const auto& b = r.require(s, "b");
    out = guarded(r, "batch.b", b.line, [&] { return BatchSchedule::constant(r.integer(s, b)); });
  } else if (kind.value == "polynomial") {
    const auto& a0 = r.require(s, "a0");
    const auto& b0 = r.require(s, "b0");
    const auto& c = r.require(s, "c");
    out = guarded(r, "batch", kind.line, [&] {
      return BatchSchedule::polynomial(r.number(s, a0), r.number(s, b0), r.number(s, c));
    });
  } else if (kind.value == "exponential") {
    const auto& b0 = r.require(s, "b0");
    const auto& delta = r.require(s, "delta");
    out = guarded(r, "batch", kind.line, [&] {
      return BatchSchedule::exponential(r.number(s, b0), r.number(s, delta));
    });
  } else {
    r.fail(kind.line, "batch.kind",
           "expected constant, polynomial or exponential, got '" + kind.value + "'");
  }
  if (const auto* cap = r.find(s, "cap")) {
    out = guarded(r, "batch.cap", cap->line, [&] { return out->with_cap(r.integer(s, *cap)); });
  }
  return *out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Reader r(text, source);
  ExperimentConfig cfg;
  cfg.source = source;
  parse_problem(r, cfg.problem);

  const auto& method = r.require("solver", "method");
  const auto m = parse_method(method.value);
  if (!m)
    r.fail(method.line, "solver.method",
           "expected km, halpern, stoch_km, stoch_halpern or stoch_halpern_lambda, got '" +
               method.value + "'");
  cfg.solver.method = *m;

  const Entry* lambda = r.find("solver", "lambda");
  if (lambda) {
    cfg.solver.lambda = r.number("solver", *lambda);
    if (*m == Method::stoch_halpern_lambda &&
        !(cfg.solver.lambda > 0.5 && cfg.solver.lambda <= 0.75))
      r.fail(lambda->line, "solver.lambda", "must lie in (1/2, 3/4] for stoch_halpern_lambda");
  }
  const auto& iters = r.require("solver", "iterations");
  cfg.solver.iterations = r.integer("solver", iters);
  if (cfg.solver.iterations < 1) r.fail(iters.line, "solver.iterations", "must be >= 1");
  if (const auto* e = r.find("solver", "record_every")) {
    cfg.solver.record_every = r.integer("solver", *e);
    if (cfg.solver.record_every < 1) r.fail(e->line, "solver.record_every", "must be >= 1");
  }

  cfg.solver.step = parse_step(r, cfg.solver.lambda);
  // Deterministic methods ignore the batch, but a given one is still checked.
  if (is_stochastic(*m) || r.find("batch", "kind")) cfg.solver.batch = parse_batch(r);

  const std::string e = "experiment";
  if (const auto* t = r.find(e, "trials")) {
    cfg.trials = r.integer(e, *t);
    if (cfg.trials < 2) r.fail(t->line, "experiment.trials", "must be >= 2");
  }
  if (const auto* sd = r.find(e, "seed")) cfg.solver.seed = r.integer(e, *sd);
  if (const auto* o = r.find(e, "out")) cfg.out_prefix = o->value;
  if (const auto* p = r.find(e, "probes")) cfg.probes = r.integer(e, *p);
  if (const auto* w = r.find(e, "fit_window")) {
    const auto v = r.numbers(e, *w, w->value);
    if (v.size() != 2 || v[0] < 1 || v[1] <= v[0] || v[0] != std::floor(v[0]) ||
        v[1] != std::floor(v[1]))
      r.fail(w->line, "experiment.fit_window", "expected two integers 1 <= k_lo < k_hi");
    cfg.fit_window = {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
  }

  try {
    check_config(cfg.solver);
  } catch (const ConfigurationError& err) {
    r.fail(method.line, "solver", err.what());
  }
  r.reject_unused();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "file", "cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

Problem build_problem(const ProblemSpec& spec) {
  const auto d = static_cast<Eigen::Index>(spec.dim);
  std::mt19937_64 rng(spec.data_seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&](Eigen::Index m) {
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = normal(rng);
    return v;
  };

  switch (spec.family) {
    case ProblemFamily::halfspaces:
      return feasibility_problem(spec.halfspaces, Point(*spec.x0));

    case ProblemFamily::random_halfspaces: {
      // The origin lies strictly inside every halfspace, so the intersection
      // is nonempty with an interior.
      std::uniform_real_distribution<double> slack(0.1, 1.0);
      std::vector<Halfspace> hs;
      for (std::size_t i = 0; i < spec.n; ++i) {
        Vector a = gaussian(d);
        hs.emplace_back(a, slack(rng) * a.norm());
      }
      Vector x0 = spec.x0 ? *spec.x0 : Vector(spec.x0_scale * gaussian(d));
      return feasibility_problem(std::move(hs), Point(std::move(x0)));
    }

    case ProblemFamily::quadratic:
      return quadratic_problem(spec.terms, Point(*spec.x0), spec.eta, spec.data_seed);

    case ProblemFamily::random_quadratic: {
      const auto m = static_cast<Eigen::Index>(spec.rows);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      std::vector<QuadraticTerm> terms;
      for (std::size_t i = 0; i < spec.n; ++i) {
        Matrix a(m, d);
        for (Eigen::Index c = 0; c < d; ++c) a.col(c) = scale * gaussian(m);
        terms.emplace_back(std::move(a), gaussian(m));
      }
      Vector x0 = spec.x0 ? *spec.x0 : Vector(spec.x0_scale * gaussian(d));
      return quadratic_problem(std::move(terms), Point(std::move(x0)), spec.eta, spec.data_seed);
    }
  }
  throw DomainError("build_problem: unknown family");
}

}  // namespace halpern
