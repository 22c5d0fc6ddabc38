#include "skt/netparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include "skt/errors.hpp"

namespace skt {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  const auto pos = line.find('#');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// Parses the whole token as a double.
std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

struct Term {
  std::size_t species;
  double coef;
};

class NetworkParser {
public:
  explicit NetworkParser(std::vector<ParseWarning>* warnings) : warnings_(warnings) {}

  void parse_line(std::string_view raw, int line) {
    const auto body = trim(strip_comment(raw));
    if (body.empty()) return;

    const auto at = body.find('@');
    if (at == std::string_view::npos) throw ParseError(line, "missing '@ <rate>' clause");
    if (body.find('@', at + 1) != std::string_view::npos) throw ParseError(line, "duplicate '@' clause");
    const auto lhs_rhs = body.substr(0, at);
    const auto rates_text = body.substr(at + 1);

    bool reversible = false;
    std::size_t arrow = lhs_rhs.find("<->");
    std::size_t arrow_len = 3;
    if (arrow != std::string_view::npos) {
      reversible = true;
    } else {
      arrow = lhs_rhs.find("->");
      arrow_len = 2;
      if (arrow == std::string_view::npos) throw ParseError(line, "missing '->' or '<->'");
    }
    const auto rest = lhs_rhs.substr(arrow + arrow_len);
    if (rest.find("->") != std::string_view::npos || rest.find('<') != std::string_view::npos ||
        lhs_rhs.substr(0, arrow).find('<') != std::string_view::npos ||
        lhs_rhs.substr(0, arrow).find('>') != std::string_view::npos) {
      throw ParseError(line, "more than one reaction arrow");
    }

    auto source = parse_complex(lhs_rhs.substr(0, arrow), line);
    auto target = parse_complex(rest, line);

    const auto rate_tokens = split(rates_text, ',');
    const std::size_t expected = reversible ? 2 : 1;
    if (rate_tokens.size() != expected) {
      throw ParseError(line, reversible ? "'<->' needs two rate constants 'kf, kb'"
                                        : "'->' needs exactly one rate constant");
    }
    std::vector<double> rates;
    for (auto tok : rate_tokens) {
      const auto v = to_double(tok);
      if (!v) throw ParseError(line, "unknown token '" + std::string(tok) + "' in rate clause");
      if (!(*v > 0.0) || !std::isfinite(*v)) {
        throw ParseError(line, "nonpositive rate constant " + std::string(tok));
      }
      rates.push_back(*v);
    }

    pending_.push_back({source, target, rates[0], line});
    if (reversible) pending_.push_back({target, source, rates[1], line});
  }

  ReactionNetwork finish() {
    ReactionNetwork net;
    net.species = species_;
    const auto n = static_cast<Eigen::Index>(species_.size());
    auto dense = [n](const std::vector<Term>& terms) {
      Vector y = Vector::Zero(n);
      for (const auto& t : terms) y(static_cast<Eigen::Index>(t.species)) += t.coef;
      return y;
    };
    for (const auto& p : pending_) {
      Reaction rx{dense(p.source), dense(p.target), p.rate};
      if (rx.source == rx.target) throw ParseError(p.line, "reaction does not change any species");
      for (const Vector* y : {&rx.source, &rx.target}) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double c = (*y)(j);
          if (c > 0.0 && c < 1.0 && warnings_) {
            warnings_->push_back({p.line, "coefficient " + format_number(c) + " of " +
                                              species_[static_cast<std::size_t>(j)] +
                                              " lies in (0,1)"});
          }
        }
      }
      net.reactions.push_back(std::move(rx));
    }
    return net;
  }

private:
  struct Pending {
    std::vector<Term> source;
    std::vector<Term> target;
    double rate;
    int line;
  };

  std::size_t intern(std::string_view name) {
    for (std::size_t i = 0; i < species_.size(); ++i) {
      if (species_[i] == name) return i;
    }
    species_.emplace_back(name);
    return species_.size() - 1;
  }

  std::vector<Term> parse_complex(std::string_view text, int line) {
    const auto body = trim(text);
    if (body.empty()) throw ParseError(line, "empty complex (write 0 for the empty complex)");
    if (body == "0") return {};
    std::vector<Term> terms;
    for (auto term : split(body, '+')) {
      if (term.empty()) throw ParseError(line, "empty term in complex '" + std::string(body) + "'");
      double coef = 1.0;
      std::size_t pos = 0;
      if (!is_name_start(term[0])) {
        while (pos < term.size() && !is_name_start(term[pos]) && term[pos] != ' ' && term[pos] != '\t') ++pos;
        const auto v = to_double(term.substr(0, pos));
        if (!v) throw ParseError(line, "unknown token '" + std::string(term) + "'");
        if (*v < 0.0 || !std::isfinite(*v)) {
          throw ParseError(line, "negative stoichiometric coefficient in '" + std::string(term) + "'");
        }
        if (*v == 0.0) throw ParseError(line, "zero coefficient in '" + std::string(term) + "' (omit the term)");
        coef = *v;
      }
      const auto name = trim(term.substr(pos));
      if (name.empty()) {
        throw ParseError(line, "term '" + std::string(term) + "' has no species (0 must stand alone)");
      }
      if (!is_name_start(name[0]) || !std::all_of(name.begin(), name.end(), is_name_char)) {
        throw ParseError(line, "unknown token '" + std::string(name) + "'");
      }
      terms.push_back({intern(name), coef});
    }
    return terms;
  }

  std::vector<ParseWarning>* warnings_;
  std::vector<std::string> species_;
  std::vector<Pending> pending_;
};

std::string format_complex(const ReactionNetwork& network, const Vector& y) {
  std::string out;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y(j) == 0.0) continue;
    if (!out.empty()) out += " + ";
    if (y(j) != 1.0) out += format_number(y(j)) + " ";
    out += network.species[static_cast<std::size_t>(j)];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

ReactionNetwork parse_network(std::string_view text, std::vector<ParseWarning>* warnings) {
  NetworkParser parser(warnings);
  int line_no = 0;
  for (auto line : split_lines(text)) parser.parse_line(line, ++line_no);
  return parser.finish();
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_network(const ReactionNetwork& network) {
  std::string out;
  for (const auto& rx : network.reactions) {
    out += format_complex(network, rx.source) + " -> " + format_complex(network, rx.target) + " @ " +
           format_number(rx.rate) + "\n";
  }
  return out;
}

// --------------------------------------------------------------------------

double InitialProfile::operator()(double x) const {
  const auto& p = params;
  switch (kind) {
    case ProfileKind::Constant:
      return p[0];
    case ProfileKind::Step:
      return x < p[0] ? p[1] : p[2];
    case ProfileKind::Gaussian: {
      const double z = (x - p[1]) / p[2];
      return p[3] + p[0] * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

std::string InitialProfile::to_string() const {
  switch (kind) {
    case ProfileKind::Constant:
      return "constant " + format_number(params[0]);
    case ProfileKind::Step:
      return "step " + format_number(params[0]) + " " + format_number(params[1]) + " " +
             format_number(params[2]);
    case ProfileKind::Gaussian:
      return "gaussian " + format_number(params[0]) + " " + format_number(params[1]) + " " +
             format_number(params[2]) + " " + format_number(params[3]);
  }
  return {};
}

namespace {

std::vector<double> parse_numbers(std::string_view text, int line, const std::string& key) {
  std::vector<double> out;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream ss(buf);
  std::string tok;
  while (ss >> tok) {
    const auto v = to_double(tok);
    if (!v || !std::isfinite(*v)) throw ParseError(line, "invalid number '" + tok + "' for " + key);
    out.push_back(*v);
  }
  if (out.empty()) throw ParseError(line, "empty value for " + key);
  return out;
}

double parse_scalar(std::string_view text, int line, const std::string& key) {
  const auto v = parse_numbers(text, line, key);
  if (v.size() != 1) throw ParseError(line, key + " expects a single number");
  return v[0];
}

std::uint64_t parse_unsigned(std::string_view text, int line, const std::string& key) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(line, key + " expects a nonnegative integer");
  }
  return v;
}

InitialProfile parse_profile(std::string_view text, int line, const std::string& species) {
  std::istringstream ss{std::string(text)};
  std::string kind;
  ss >> kind;
  std::string rest;
  std::getline(ss, rest);
  InitialProfile p;
  std::size_t count = 0;
  if (kind == "constant") {
    p.kind = ProfileKind::Constant;
    count = 1;
  } else if (kind == "step") {
    p.kind = ProfileKind::Step;
    count = 3;
  } else if (kind == "gaussian") {
    p.kind = ProfileKind::Gaussian;
    count = 4;
  } else {
    throw ParseError(line, "unknown profile '" + kind + "' for " + species +
                               " (expected constant, step or gaussian)");
  }
  const auto values = parse_numbers(rest, line, species);
  if (values.size() != count) {
    throw ParseError(line, "profile '" + kind + "' expects " + std::to_string(count) + " numbers");
  }
  std::copy(values.begin(), values.end(), p.params.begin());
  if (p.kind == ProfileKind::Gaussian && !(p.params[2] > 0.0)) {
    throw ParseError(line, "gaussian width must be positive");
  }
  return p;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::map<std::string, int> section_line;
  std::map<std::string, int> profile_line;
  int line_no = 0;

  static const std::map<std::string, std::set<std::string>> known = {
      {"", {"network"}},
      {"domain", {"length", "cells"}},
      {"time", {"dt", "end", "stride"}},
      {"diffusion", {"a0", "a"}},
      {"initial", {}},
      {"solver", {"newton_tol", "newton_max_iter", "seed"}},
  };

  for (auto raw : split_lines(text)) {
    ++line_no;
    const auto body = trim(strip_comment(raw));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(line_no, "malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      if (!known.count(section) || section.empty()) {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      if (section_line.count(section)) throw ParseError(line_no, "duplicate section [" + section + "]");
      section_line[section] = line_no;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const auto value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");

    const std::string full = section + "." + key;
    if (seen.count(full)) throw ParseError(line_no, "duplicate key '" + key + "'");
    seen[full] = line_no;

    if (section == "initial") {
      cfg.initial.emplace_back(key, parse_profile(value, line_no, key));
      profile_line[key] = line_no;
      continue;
    }
    if (!known.at(section).count(key)) {
      throw ParseError(line_no, "unknown key '" + key + "'" +
                                    (section.empty() ? std::string() : " in [" + section + "]"));
    }
    if (full == ".network") {
      if (value.empty()) throw ParseError(line_no, "empty network path");
      cfg.network_path = std::string(value);
    } else if (full == "domain.length") {
      cfg.length = parse_scalar(value, line_no, key);
      if (!(cfg.length > 0)) throw ParseError(line_no, "length must be positive");
    } else if (full == "domain.cells") {
      cfg.cells = parse_unsigned(value, line_no, key);
      if (cfg.cells < 2) throw ParseError(line_no, "cells must be at least 2");
    } else if (full == "time.dt") {
      cfg.dt = parse_scalar(value, line_no, key);
      if (!(cfg.dt > 0)) throw ParseError(line_no, "dt must be positive");
    } else if (full == "time.end") {
      cfg.end_time = parse_scalar(value, line_no, key);
    } else if (full == "time.stride") {
      cfg.output_stride = parse_unsigned(value, line_no, key);
      if (cfg.output_stride < 1) throw ParseError(line_no, "stride must be at least 1");
    } else if (full == "diffusion.a0") {
      const auto v = parse_numbers(value, line_no, key);
      if (std::any_of(v.begin(), v.end(), [](double x) { return x < 0; })) {
        throw ParseError(line_no, "negative coefficient in a0");
      }
      cfg.a0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (full == "diffusion.a") {
      std::vector<std::vector<double>> rows;
      for (auto row : split(value, ';')) {
        if (row.empty()) continue;
        rows.push_back(parse_numbers(row, line_no, key));
      }
      const auto width = rows.empty() ? 0 : rows.front().size();
      for (const auto& r : rows) {
        if (r.size() != width) throw ParseError(line_no, "rows of a have different lengths");
        if (std::any_of(r.begin(), r.end(), [](double x) { return x < 0; })) {
          throw ParseError(line_no, "negative coefficient in a");
        }
      }
      cfg.a.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) cfg.a(i, j) = rows[i][j];
      }
    } else if (full == "solver.newton_tol") {
      cfg.newton_tol = parse_scalar(value, line_no, key);
      if (!(cfg.newton_tol > 0)) throw ParseError(line_no, "newton_tol must be positive");
    } else if (full == "solver.newton_max_iter") {
      cfg.newton_max_iter = static_cast<int>(parse_unsigned(value, line_no, key));
      if (cfg.newton_max_iter < 1) throw ParseError(line_no, "newton_max_iter must be at least 1");
    } else if (full == "solver.seed") {
      cfg.seed = parse_unsigned(value, line_no, key);
    }
  }

  auto missing = [&](const std::string& sec, const std::string& key) {
    const int where = section_line.count(sec) ? section_line[sec] : line_no;
    throw ParseError(where, "missing mandatory key '" + key + "'" + (sec.empty() ? "" : " in [" + sec + "]"));
  };
  if (!seen.count(".network")) missing("", "network");
  if (!seen.count("domain.length")) missing("domain", "length");
  if (!seen.count("domain.cells")) missing("domain", "cells");
  if (!seen.count("time.dt")) missing("time", "dt");
  if (!seen.count("time.end")) missing("time", "end");
  if (!seen.count("diffusion.a0")) missing("diffusion", "a0");
  if (!seen.count("diffusion.a")) missing("diffusion", "a");
  if (cfg.initial.empty()) missing("initial", "<species>");

  if (!(cfg.end_time > cfg.dt)) throw ParseError(seen["time.end"], "end time must exceed dt");
  if (cfg.a.rows() != cfg.a0.size() || cfg.a.cols() != cfg.a0.size()) {
    throw ParseError(seen["diffusion.a"], "dimension mismatch: a is " + std::to_string(cfg.a.rows()) +
                                               "x" + std::to_string(cfg.a.cols()) + " but a0 has " +
                                               std::to_string(cfg.a0.size()) + " entries");
  }
  if (cfg.initial.size() != static_cast<std::size_t>(cfg.a0.size())) {
    throw ParseError(section_line.count("initial") ? section_line["initial"] : line_no,
                     "dimension mismatch: " + std::to_string(cfg.initial.size()) +
                         " initial profiles but a0 has " + std::to_string(cfg.a0.size()) + " entries");
  }

  const double h = cfg.length / static_cast<double>(cfg.cells);
  for (const auto& [name, profile] : cfg.initial) {
    for (std::size_t k = 0; k < cfg.cells; ++k) {
      const double v = profile((static_cast<double>(k) + 0.5) * h);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ParseError(profile_line[name], "initial profile of " + name + " is negative on the mesh");
      }
    }
  }
  return cfg;
}

void validate_config(const RunConfig& config, const ReactionNetwork& network) {
  const auto n = static_cast<Eigen::Index>(network.num_species());
  if (config.a0.size() != n) {
    throw std::invalid_argument("dimension mismatch: a0 has " + std::to_string(config.a0.size()) +
                                " entries but the network has " + std::to_string(n) + " species");
  }
  for (const auto& name : network.species) {
    const auto it = std::find_if(config.initial.begin(), config.initial.end(),
                                 [&](const auto& p) { return p.first == name; });
    if (it == config.initial.end()) throw std::invalid_argument("no initial profile for species " + name);
  }
}

}  // namespace skt
