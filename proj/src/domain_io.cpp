// Line-oriented text format for multi-patch domains:
//
//   patch <id> degree <pu> <pv> knots_u <k...> knots_v <k...> weights <w...> points <x y ...>
//   interface <k> <side> <l> <side> <normal|reversed>
//   dirichlet <k> <side>
//
// '#' starts a comment. Patch ids are 0-based and must be contiguous.

#include <charconv>
#include <map>
#include <sstream>

#include "ietidp/geometry.hpp"

namespace ietidp {

namespace {

struct Token {
  std::string_view text;
  int line;
  int column;
};

std::vector<Token> tokenize_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#')
      ++j;
    out.push_back({line.substr(i, j - i), line_no, static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

[[noreturn]] void fail(const Token& t, const std::string& msg) {
  throw ParseError(msg + " ('" + std::string(t.text) + "')", t.line, t.column);
}

double parse_number(const Token& t) {
  double x = 0.0;
  const char* end = t.text.data() + t.text.size();
  auto res = std::from_chars(t.text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) fail(t, "malformed number");
  return x;
}

int parse_int(const Token& t) {
  int x = 0;
  const char* end = t.text.data() + t.text.size();
  auto res = std::from_chars(t.text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) fail(t, "malformed integer");
  return x;
}

Side parse_side(const Token& t) {
  auto s = side_from_name(t.text);
  if (!s) fail(t, "unknown side (expected umin, umax, vmin or vmax)");
  return *s;
}

class Cursor {
 public:
  Cursor(const std::vector<Token>& tokens, int line_no, std::size_t line_len)
      : tokens_(tokens), line_(line_no), line_len_(line_len) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& next() {
    if (done()) throw ParseError("unexpected end of line", line_, static_cast<int>(line_len_) + 1);
    return tokens_[pos_++];
  }
  const Token& peek() const { return tokens_.at(pos_); }
  void expect(std::string_view keyword) {
    const Token& t = next();
    if (t.text != keyword) fail(t, "expected '" + std::string(keyword) + "'");
  }
  std::vector<Token> take_until_keyword(std::initializer_list<std::string_view> keywords) {
    std::vector<Token> out;
    while (!done()) {
      bool stop = false;
      for (auto k : keywords) stop = stop || peek().text == k;
      if (stop) break;
      out.push_back(next());
    }
    return out;
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  int line_;
  std::size_t line_len_;
};

struct PatchRecord {
  NurbsPatchMap map;
  Token id_token;
};

struct PatchRef {
  int patch;
  Token token;
};

}  // namespace

MultiPatchDomain parse_domain(std::string_view text) {
  std::map<int, PatchRecord> patches;
  std::vector<std::pair<Interface, std::array<Token, 2>>> interfaces;
  std::vector<std::pair<BoundarySide, Token>> boundary;
  // Token views point into `text`, which outlives this function body.

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    const auto tokens = tokenize_line(line, line_no);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    Cursor cur(tokens, line_no, line.size());
    const Token& head = cur.next();
    if (head.text == "patch") {
      const Token& id_tok = cur.next();
      const int id = parse_int(id_tok);
      if (id < 0) fail(id_tok, "negative patch id");
      if (patches.count(id)) fail(id_tok, "duplicate patch id");
      cur.expect("degree");
      const Token& pu_tok = cur.next();
      const Token& pv_tok = cur.next();
      const int pu = parse_int(pu_tok), pv = parse_int(pv_tok);
      const Token& ku_tok = cur.next();
      if (ku_tok.text != "knots_u") fail(ku_tok, "expected 'knots_u'");
      std::vector<double> ku, kv, weights;
      for (const auto& t : cur.take_until_keyword({"knots_v"})) ku.push_back(parse_number(t));
      const Token& kv_tok = cur.next();
      if (kv_tok.text != "knots_v") fail(kv_tok, "expected 'knots_v'");
      for (const auto& t : cur.take_until_keyword({"weights"})) kv.push_back(parse_number(t));
      const Token& w_tok = cur.next();
      if (w_tok.text != "weights") fail(w_tok, "expected 'weights'");
      for (const auto& t : cur.take_until_keyword({"points"})) weights.push_back(parse_number(t));
      const Token& p_tok = cur.next();
      if (p_tok.text != "points") fail(p_tok, "expected 'points'");
      std::vector<double> coords;
      for (const auto& t : cur.take_until_keyword({})) coords.push_back(parse_number(t));

      auto make_kv = [&](int p, std::vector<double> k, const Token& where) {
        try {
          return KnotVector(p, std::move(k));
        } catch (const ArgumentError& e) {
          fail(where, e.what());
        }
      };
      KnotVector kvu = make_kv(pu, std::move(ku), ku_tok);
      KnotVector kvv = make_kv(pv, std::move(kv), kv_tok);
      TensorSplineSpace space(std::move(kvu), std::move(kvv));
      const auto n = static_cast<std::size_t>(space.size());
      if (weights.size() != n)
        fail(w_tok, "expected " + std::to_string(n) + " weights, got " + std::to_string(weights.size()));
      if (coords.size() != 2 * n)
        fail(p_tok, "expected " + std::to_string(2 * n) + " point coordinates, got " +
                        std::to_string(coords.size()));
      std::vector<Eigen::Vector2d> points(n);
      for (std::size_t i = 0; i < n; ++i) points[i] = {coords[2 * i], coords[2 * i + 1]};
      try {
        patches.emplace(id, PatchRecord{NurbsPatchMap(std::move(space), std::move(points), weights), id_tok});
      } catch (const ArgumentError& e) {
        fail(w_tok, e.what());
      }
    } else if (head.text == "interface") {
      const Token& ka = cur.next();
      const Token& sa = cur.next();
      const Token& kb = cur.next();
      const Token& sb = cur.next();
      const Token& orient = cur.next();
      bool reversed = false;
      if (orient.text == "reversed")
        reversed = true;
      else if (orient.text != "normal")
        fail(orient, "expected 'normal' or 'reversed'");
      interfaces.push_back(
          {Interface{parse_int(ka), parse_side(sa), parse_int(kb), parse_side(sb), reversed}, {ka, kb}});
    } else if (head.text == "dirichlet") {
      const Token& k = cur.next();
      const Token& s = cur.next();
      boundary.push_back({BoundarySide{parse_int(k), parse_side(s)}, k});
    } else {
      fail(head, "unknown record type");
    }
    if (!cur.done()) fail(cur.next(), "unexpected trailing token");
    if (end == text.size()) break;
  }

  const int K = static_cast<int>(patches.size());
  std::vector<NurbsPatchMap> maps;
  for (auto& [id, rec] : patches) {
    if (id != static_cast<int>(maps.size())) fail(rec.id_token, "patch ids must be contiguous from 0");
    maps.push_back(std::move(rec.map));
  }
  std::vector<Interface> ifaces;
  for (auto& [f, toks] : interfaces) {
    if (f.patch_a < 0 || f.patch_a >= K) fail(toks[0], "interface references a missing patch");
    if (f.patch_b < 0 || f.patch_b >= K) fail(toks[1], "interface references a missing patch");
    ifaces.push_back(f);
  }
  std::vector<BoundarySide> bsides;
  for (auto& [b, tok] : boundary) {
    if (b.patch < 0 || b.patch >= K) fail(tok, "dirichlet entry references a missing patch");
    bsides.push_back(b);
  }
  return make_domain(std::move(maps), std::move(ifaces), std::move(bsides));
}

std::string serialize_domain(const MultiPatchDomain& domain) {
  std::ostringstream os;
  for (int k = 0; k < domain.num_patches(); ++k) {
    const auto& G = domain.patches[k];
    os << "patch " << k << " degree " << G.space.kv_u().degree() << ' ' << G.space.kv_v().degree();
    os << " knots_u";
    for (double x : G.space.kv_u().knots()) os << ' ' << format_double(x);
    os << " knots_v";
    for (double x : G.space.kv_v().knots()) os << ' ' << format_double(x);
    os << " weights";
    for (double w : G.weights) os << ' ' << format_double(w);
    os << " points";
    for (const auto& p : G.control_points) os << ' ' << format_double(p.x()) << ' ' << format_double(p.y());
    os << '\n';
  }
  for (const auto& f : domain.interfaces) {
    os << "interface " << f.patch_a << ' ' << side_name(f.side_a) << ' ' << f.patch_b << ' '
       << side_name(f.side_b) << ' ' << (f.reversed ? "reversed" : "normal") << '\n';
  }
  for (const auto& b : domain.boundary_sides) os << "dirichlet " << b.patch << ' ' << side_name(b.side) << '\n';
  return os.str();
}

}  // namespace ietidp
