#include "w3cert/sdpa.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace w3cert {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) throw std::invalid_argument("sdpa: bad number '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size()) throw std::invalid_argument("sdpa: bad integer '" + tok + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> tokens(const std::string& line) {
  std::string cleaned = line;
  for (char& ch : cleaned) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

std::string write_sdpa(const SdpaData& d) {
  std::string out;
  for (const auto& c : d.comments) out += "* " + c + "\n";
  out += std::to_string(d.m) + "\n";
  out += std::to_string(d.block_struct.size()) + "\n";
  for (std::size_t i = 0; i < d.block_struct.size(); ++i) {
    out += (i ? " " : "") + std::to_string(d.block_struct[i]);
  }
  out += "\n";
  for (std::size_t i = 0; i < d.c.size(); ++i) out += (i ? " " : "") + fmt(d.c[i]);
  out += "\n";
  for (const auto& e : d.entries) {
    out += std::to_string(e.matrix) + " " + std::to_string(e.block) + " " + std::to_string(e.row) + " " +
           std::to_string(e.col) + " " + fmt(e.value) + "\n";
  }
  return out;
}

SdpaData parse_sdpa(std::string_view text) {
  SdpaData d;
  std::istringstream in{std::string(text)};
  std::vector<std::string> body;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      std::string c = line.substr(1);
      if (!c.empty() && c[0] == ' ') c.erase(0, 1);
      if (body.empty()) d.comments.push_back(c);
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    body.push_back(line);
  }
  if (body.size() < 4) throw std::invalid_argument("sdpa: truncated header");
  const auto first = [](const std::string& l) {
    const auto t = tokens(l);
    if (t.empty()) throw std::invalid_argument("sdpa: empty header line");
    return t.front();
  };
  d.m = parse_int(first(body[0]));
  const int nblocks = parse_int(first(body[1]));
  for (const auto& t : tokens(body[2])) d.block_struct.push_back(parse_int(t));
  if (static_cast<int>(d.block_struct.size()) != nblocks) throw std::invalid_argument("sdpa: block count mismatch");
  for (const auto& t : tokens(body[3])) d.c.push_back(parse_double(t));
  if (static_cast<int>(d.c.size()) != d.m) throw std::invalid_argument("sdpa: objective length mismatch");
  for (std::size_t i = 4; i < body.size(); ++i) {
    const auto t = tokens(body[i]);
    if (t.size() != 5) throw std::invalid_argument("sdpa: bad entry line '" + body[i] + "'");
    SdpaEntry e{parse_int(t[0]), parse_int(t[1]), parse_int(t[2]), parse_int(t[3]), parse_double(t[4])};
    if (e.matrix < 0 || e.matrix > d.m || e.block < 1 || e.block > nblocks) {
      throw std::invalid_argument("sdpa: entry index out of range in '" + body[i] + "'");
    }
    const int size = std::abs(d.block_struct[static_cast<std::size_t>(e.block - 1)]);
    if (e.row < 1 || e.col < 1 || e.row > size || e.col > size) {
      throw std::invalid_argument("sdpa: entry position out of range in '" + body[i] + "'");
    }
    d.entries.push_back(e);
  }
  return d;
}

SdpaData to_sdpa(const SdpProblem& p) {
  const auto& t = *p.moment_template;
  SdpaData d;
  d.m = static_cast<int>(t.variable_count()) - 1;
  const int n = static_cast<int>(t.size());
  const int nc = static_cast<int>(p.constraints.size());
  d.block_struct = {n};
  if (nc > 0) d.block_struct.push_back(-2 * nc);

  d.comments.push_back("w3cert moment relaxation");
  d.comments.push_back("objective_constant " + fmt(p.objective.constant));
  std::string words = "words ";
  for (std::size_t i = 0; i < t.words().size(); ++i) words += (i ? ";" : "") + t.words()[i].to_string();
  d.comments.push_back(words);
  for (const auto& c : p.constraints) {
    d.comments.push_back("box " + c.name + " " + fmt(c.expr.constant) + " " + fmt(c.lower) + " " + fmt(c.upper));
  }

  d.c.assign(static_cast<std::size_t>(d.m), 0.0);
  for (const auto& [id, coeff] : p.objective.coeffs) d.c[static_cast<std::size_t>(id - 1)] = coeff;

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int v = t.cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (v == 0) {
        d.entries.push_back({0, 1, i + 1, j + 1, -1.0});
      } else {
        d.entries.push_back({v, 1, i + 1, j + 1, 1.0});
      }
    }
  }
  for (int k = 0; k < nc; ++k) {
    const auto& c = p.constraints[static_cast<std::size_t>(k)];
    const int lo = 2 * k + 1;
    const int hi = 2 * k + 2;
    d.entries.push_back({0, 2, lo, lo, c.lower - c.expr.constant});
    d.entries.push_back({0, 2, hi, hi, c.expr.constant - c.upper});
    for (const auto& [id, coeff] : c.expr.coeffs) {
      d.entries.push_back({id, 2, lo, lo, coeff});
      d.entries.push_back({id, 2, hi, hi, -coeff});
    }
  }
  std::sort(d.entries.begin(), d.entries.end(), [](const SdpaEntry& a, const SdpaEntry& b) {
    return std::tie(a.matrix, a.block, a.row, a.col) < std::tie(b.matrix, b.block, b.row, b.col);
  });
  return d;
}

SdpProblem from_sdpa(const SdpaData& d) {
  SdpProblem p;
  std::vector<OperatorWord> words;
  bool have_words = false;
  for (const auto& c : d.comments) {
    if (starts_with(c, "objective_constant ")) {
      p.objective.constant = parse_double(c.substr(19));
    } else if (starts_with(c, "words ")) {
      for (const auto& w : split(std::string_view(c).substr(6), ';')) words.push_back(OperatorWord::parse(w));
      have_words = true;
    } else if (starts_with(c, "box ")) {
      const auto t = tokens(c);
      if (t.size() != 5) throw std::invalid_argument("sdpa: bad box comment '" + c + "'");
      BoxConstraint b;
      b.name = t[1];
      b.expr.constant = parse_double(t[2]);
      b.lower = parse_double(t[3]);
      b.upper = parse_double(t[4]);
      p.constraints.push_back(std::move(b));
    }
  }
  if (!have_words) throw std::invalid_argument("sdpa: missing word list; not written by w3cert");
  auto t = std::make_shared<const MomentMatrixTemplate>(std::move(words));
  if (static_cast<int>(t->variable_count()) - 1 != d.m) throw std::invalid_argument("sdpa: variable count mismatch");
  for (int k = 0; k < d.m; ++k) {
    if (d.c[static_cast<std::size_t>(k)] != 0.0) p.objective.coeffs[k + 1] = d.c[static_cast<std::size_t>(k)];
  }
  for (const auto& e : d.entries) {
    if (e.block != 2 || e.matrix == 0 || e.row % 2 == 0) continue;
    const auto k = static_cast<std::size_t>((e.row - 1) / 2);
    if (k >= p.constraints.size()) throw std::invalid_argument("sdpa: slack row without box comment");
    p.constraints[k].expr.coeffs[e.matrix] = e.value;
  }
  p.moment_template = std::move(t);
  return p;
}

std::string export_sdpa(const SdpProblem& p) { return write_sdpa(to_sdpa(p)); }

void export_sdpa_file(const SdpProblem& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << export_sdpa(p);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace w3cert
