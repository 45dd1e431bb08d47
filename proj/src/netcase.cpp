#include "gridjac/netcase.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gridjac {

namespace {

struct Token {
  std::string text;
  int line;
};

// Strips a trailing '%' comment and returns whitespace-separated tokens.
void tokenize_line(const std::string& line, int line_no, std::vector<Token>& out) {
  std::string body = line;
  if (auto pos = body.find('%'); pos != std::string::npos) body.resize(pos);
  size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    size_t start = i;
    while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i > start) out.push_back({body.substr(start, i - start), line_no});
  }
}

double parse_number(const std::string& tok, int line) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("malformed numeric token '" + tok + "'", line);
  return v;
}

// Rows of a MATLAB matrix block. Rows are separated by ';' or by newline.
using MatrixRows = std::vector<std::vector<Token>>;

// Reads one `name = [ ... ];` block into rows of numeric tokens. `lead` is
// whatever followed the '[' on the opening line (usually empty).
MatrixRows read_matrix_block(std::istream& in, int& line_no, std::string lead) {
  MatrixRows rows;
  std::vector<Token> current;

  auto consume = [&](std::string body, int at_line) {
    bool closed = false;
    if (auto pos = body.find(']'); pos != std::string::npos) {
      body.resize(pos);
      closed = true;
    }
    // split on ';' row separators within the line
    size_t start = 0;
    while (true) {
      size_t semi = body.find(';', start);
      std::string piece = body.substr(start, semi == std::string::npos ? semi : semi - start);
      std::vector<Token> toks;
      tokenize_line(piece, at_line, toks);
      current.insert(current.end(), toks.begin(), toks.end());
      if (semi == std::string::npos) break;
      if (!current.empty()) {
        rows.push_back(std::move(current));
        current.clear();
      }
      start = semi + 1;
    }
    // a line break also terminates a row when tokens are pending
    if (!current.empty()) {
      rows.push_back(std::move(current));
      current.clear();
    }
    return closed;
  };

  if (consume(std::move(lead), line_no)) return rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    if (auto pos = body.find('%'); pos != std::string::npos) body.resize(pos);
    if (consume(std::move(body), line_no)) return rows;
  }
  throw CaseError("matrix block not terminated with ']'");
}

}  // namespace

RawCase parse_matpower(std::istream& text) {
  RawCase c;
  bool saw_base = false, saw_bus = false, saw_branch = false;

  std::string line;
  int line_no = 0;
  while (std::getline(text, line)) {
    ++line_no;
    std::string body = line;
    if (auto pos = body.find('%'); pos != std::string::npos) body.resize(pos);

    auto field_pos = [&](const char* field) {
      auto p = body.find(field);
      if (p == std::string::npos) return std::string::npos;
      // must be a struct field access: require a '.' right before
      if (p == 0 || body[p - 1] != '.') return std::string::npos;
      return p;
    };

    if (auto p = field_pos("baseMVA"); p != std::string::npos) {
      auto eq = body.find('=', p);
      if (eq == std::string::npos) continue;
      std::string rhs = body.substr(eq + 1);
      if (auto semi = rhs.find(';'); semi != std::string::npos) rhs.resize(semi);
      std::vector<Token> toks;
      tokenize_line(rhs, line_no, toks);
      if (toks.size() != 1) throw ParseError("expected a single baseMVA value", line_no);
      c.base_mva = parse_number(toks[0].text, toks[0].line);
      saw_base = true;
      continue;
    }

    // returns the text after '[' when this line opens the named block
    auto block_open_tail = [&](const char* field) -> std::optional<std::string> {
      auto p = field_pos(field);
      if (p == std::string::npos) return std::nullopt;
      auto eq = body.find('=', p);
      if (eq == std::string::npos) return std::nullopt;
      auto bracket = body.find('[', eq);
      if (bracket == std::string::npos) return std::nullopt;
      return body.substr(bracket + 1);
    };

    if (auto tail = block_open_tail("bus")) {
      MatrixRows rows = read_matrix_block(text, line_no, *tail);
      for (const auto& row : rows) {
        if (row.size() < 9)
          throw ParseError("bus row has fewer than 9 columns", row.empty() ? line_no : row[0].line);
        RawBus b;
        b.bus_id = static_cast<long long>(parse_number(row[0].text, row[0].line));
        b.gs = parse_number(row[4].text, row[4].line);
        b.bs = parse_number(row[5].text, row[5].line);
        b.vm = parse_number(row[7].text, row[7].line);
        b.va_deg = parse_number(row[8].text, row[8].line);
        c.buses.push_back(b);
      }
      saw_bus = true;
      continue;
    }

    if (auto tail = block_open_tail("branch")) {
      MatrixRows rows = read_matrix_block(text, line_no, *tail);
      for (const auto& row : rows) {
        if (row.size() < 11)
          throw ParseError("branch row has fewer than 11 columns",
                           row.empty() ? line_no : row[0].line);
        RawBranch b;
        b.from_bus = static_cast<long long>(parse_number(row[0].text, row[0].line));
        b.to_bus = static_cast<long long>(parse_number(row[1].text, row[1].line));
        b.r = parse_number(row[2].text, row[2].line);
        b.x = parse_number(row[3].text, row[3].line);
        b.b = parse_number(row[4].text, row[4].line);
        b.tap = parse_number(row[8].text, row[8].line);
        b.shift_deg = parse_number(row[9].text, row[9].line);
        b.status = static_cast<int>(parse_number(row[10].text, row[10].line));
        c.branches.push_back(b);
      }
      saw_branch = true;
      continue;
    }
  }

  if (!saw_base) throw CaseError("missing baseMVA");
  if (!saw_bus) throw CaseError("missing bus block");
  if (!saw_branch) throw CaseError("missing branch block");
  if (c.base_mva <= 0.0) throw CaseError("baseMVA must be positive");

  std::unordered_set<long long> ids;
  for (const auto& b : c.buses) {
    if (!ids.insert(b.bus_id).second)
      throw CaseError("duplicate bus id " + std::to_string(b.bus_id));
  }
  return c;
}

RawCase parse_matpower(const std::string& text) {
  std::istringstream in(text);
  return parse_matpower(in);
}

RawCase parse_matpower_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseError("cannot open case file: " + path);
  return parse_matpower(in);
}

std::string serialize_matpower(const RawCase& c, const std::string& name) {
  std::ostringstream out;
  out.precision(17);
  out << "function mpc = " << name << "\n";
  out << name << ".baseMVA = " << c.base_mva << ";\n";
  out << name << ".bus = [\n";
  for (const auto& b : c.buses) {
    // captured columns in place, filler in the rest
    out << "\t" << b.bus_id << "\t1\t0\t0\t" << b.gs << "\t" << b.bs << "\t1\t" << b.vm << "\t"
        << b.va_deg << "\t0\t1\t1.1\t0.9;\n";
  }
  out << "];\n";
  out << name << ".branch = [\n";
  for (const auto& b : c.branches) {
    out << "\t" << b.from_bus << "\t" << b.to_bus << "\t" << b.r << "\t" << b.x << "\t" << b.b
        << "\t0\t0\t0\t" << b.tap << "\t" << b.shift_deg << "\t" << b.status << "\t-360\t360;\n";
  }
  out << "];\n";
  return out.str();
}

IndexedNetwork index_network(const RawCase& c) {
  constexpr double deg = std::numbers::pi / 180.0;

  IndexedNetwork net;
  net.n_b = static_cast<index_t>(c.buses.size());
  net.bus_shunt.reserve(c.buses.size());
  net.vm0.reserve(c.buses.size());
  net.va0.reserve(c.buses.size());

  std::unordered_map<long long, index_t> id_to_idx;
  id_to_idx.reserve(c.buses.size());
  for (index_t i = 0; i < net.n_b; ++i) {
    const auto& b = c.buses[i];
    id_to_idx.emplace(b.bus_id, i);
    net.bus_shunt.push_back(cplx{b.gs, b.bs} / c.base_mva);
    net.vm0.push_back(b.vm);
    net.va0.push_back(b.va_deg * deg);
  }

  for (const auto& br : c.branches) {
    if (br.status == 0) continue;
    auto from = id_to_idx.find(br.from_bus);
    auto to = id_to_idx.find(br.to_bus);
    if (from == id_to_idx.end())
      throw CaseError("branch references unknown bus id " + std::to_string(br.from_bus));
    if (to == id_to_idx.end())
      throw CaseError("branch references unknown bus id " + std::to_string(br.to_bus));
    if (from->second == to->second)
      throw CaseError("branch connects bus " + std::to_string(br.from_bus) + " to itself");
    if (br.r == 0.0 && br.x == 0.0)
      throw CaseError("in-service branch " + std::to_string(br.from_bus) + "-" +
                      std::to_string(br.to_bus) + " has zero impedance");

    net.from_idx.push_back(from->second);
    net.to_idx.push_back(to->second);
    net.y_series.push_back(1.0 / cplx{br.r, br.x});
    net.y_sh_from.push_back(cplx{0.0, br.b / 2.0});
    net.y_sh_to.push_back(cplx{0.0, br.b / 2.0});
    net.tap_m.push_back(br.tap == 0.0 ? 1.0 : br.tap);
    net.tap_phi.push_back(br.shift_deg * deg);
  }
  net.n_l = static_cast<index_t>(net.from_idx.size());
  return net;
}

IndexedNetwork replicate_case(const IndexedNetwork& net, int k) {
  if (k <= 0) throw std::domain_error("replicate_case: k must be >= 1");

  IndexedNetwork out;
  out.n_b = net.n_b * k;
  out.n_l = net.n_l * k;
  out.from_idx.reserve(out.n_l);
  out.to_idx.reserve(out.n_l);
  out.y_series.reserve(out.n_l);
  out.y_sh_from.reserve(out.n_l);
  out.y_sh_to.reserve(out.n_l);
  out.tap_m.reserve(out.n_l);
  out.tap_phi.reserve(out.n_l);
  out.bus_shunt.reserve(out.n_b);
  out.vm0.reserve(out.n_b);
  out.va0.reserve(out.n_b);

  for (int copy = 0; copy < k; ++copy) {
    const index_t offset = net.n_b * copy;
    for (index_t e = 0; e < net.n_l; ++e) {
      out.from_idx.push_back(net.from_idx[e] + offset);
      out.to_idx.push_back(net.to_idx[e] + offset);
      out.y_series.push_back(net.y_series[e]);
      out.y_sh_from.push_back(net.y_sh_from[e]);
      out.y_sh_to.push_back(net.y_sh_to[e]);
      out.tap_m.push_back(net.tap_m[e]);
      out.tap_phi.push_back(net.tap_phi[e]);
    }
    out.bus_shunt.insert(out.bus_shunt.end(), net.bus_shunt.begin(), net.bus_shunt.end());
    out.vm0.insert(out.vm0.end(), net.vm0.begin(), net.vm0.end());
    out.va0.insert(out.va0.end(), net.va0.begin(), net.va0.end());
  }
  return out;
}

}  // namespace gridjac
