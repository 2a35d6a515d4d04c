#include "linconn/spec_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace linconn {

std::optional<std::size_t> max_index(const Expr& e, VarKind kind) {
  std::optional<std::size_t> best;
  auto merge = [&](std::optional<std::size_t> o) {
    if (o && (!best || *o > *best)) best = o;
  };
  const auto& v = e.node().v;
  if (auto* var = std::get_if<Variable>(&v)) {
    if (var->kind == kind) best = var->index;
  } else if (auto* b = std::get_if<Binary>(&v)) {
    merge(max_index(b->lhs, kind));
    merge(max_index(b->rhs, kind));
  } else if (auto* n = std::get_if<Negate>(&v)) {
    merge(max_index(n->operand, kind));
  } else if (auto* c = std::get_if<Call>(&v)) {
    merge(max_index(c->arg, kind));
  }
  return best;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string key;
  std::string value;
  bool quoted;
  std::size_t line;
};

struct Block {
  std::string kind;  // space, connection, field, section, curve
  std::string name;
  std::size_t line;
  std::vector<Entry> entries;
};

// Splits a line into `key = value` pairs separated by ';' outside quotes and
// drops a trailing '#' comment.
std::vector<Entry> split_entries(std::string_view line, std::size_t lineno) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_quote = false;
  for (char c : line) {
    if (c == '"') in_quote = !in_quote;
    if (!in_quote && c == '#') break;
    if (!in_quote && c == ';') {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (in_quote) throw SpecError("unterminated quote", lineno);
  parts.push_back(cur);
  std::vector<Entry> out;
  for (const auto& p : parts) {
    auto t = trim(p);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw SpecError("expected key = value", lineno);
    auto key = trim(std::string_view(t).substr(0, eq));
    auto val = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw SpecError("missing key", lineno);
    bool quoted = val.size() >= 2 && val.front() == '"' && val.back() == '"';
    if (quoted) val = val.substr(1, val.size() - 2);
    else if (val.find('"') != std::string::npos) throw SpecError("malformed quoted value for " + key, lineno);
    out.push_back({key, val, quoted, lineno});
  }
  return out;
}

std::vector<Block> split_blocks(std::string_view text) {
  std::vector<Block> blocks;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) throw SpecError("unterminated section header", lineno);
      if (!trim(std::string_view(line).substr(close + 1)).empty() &&
          trim(std::string_view(line).substr(close + 1))[0] != '#')
        throw SpecError("trailing text after section header", lineno);
      std::istringstream hs(line.substr(1, close - 1));
      Block b;
      b.line = lineno;
      hs >> b.kind >> b.name;
      std::string extra;
      if (hs >> extra) throw SpecError("malformed section header", lineno);
      if (b.kind == "space" || b.kind == "connection") {
        if (!b.name.empty()) throw SpecError("[" + b.kind + "] takes no name", lineno);
      } else if (b.kind == "field" || b.kind == "section" || b.kind == "curve") {
        if (b.name.empty()) throw SpecError("[" + b.kind + "] needs a name", lineno);
      } else {
        throw SpecError("unknown section [" + b.kind + "]", lineno);
      }
      blocks.push_back(std::move(b));
      continue;
    }
    if (blocks.empty()) throw SpecError("entry outside of any section", lineno);
    for (auto& e : split_entries(line, lineno)) blocks.back().entries.push_back(std::move(e));
  }
  return blocks;
}

long parse_count(const Entry& e) {
  long v = 0;
  auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || p != e.value.data() + e.value.size() || v < 1)
    throw SpecError(e.key + " must be a positive integer", e.line);
  return v;
}

double parse_real(const Entry& e) {
  double v = 0;
  auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || p != e.value.data() + e.value.size()) throw SpecError(e.key + " must be a real", e.line);
  return v;
}

Expr parse_at(const Entry& e) {
  try {
    return parse(e.value);
  } catch (const SyntaxError& err) {
    throw SpecError(e.key + ": " + err.what(), e.line);
  }
}

// Restricts variables to the allowed kinds and index ranges.
void check_vars(const Expr& ex, const Entry& e, std::size_t n, std::size_t k, bool allow_x, bool allow_y,
                bool allow_t) {
  auto bad = [&](const std::string& what) { throw SpecError(e.key + ": " + what, e.line); };
  if (ex.references(VarKind::Z)) bad("z variables are not allowed here");
  if (!allow_t && ex.references(VarKind::T)) bad("t is not allowed here");
  if (!allow_x && ex.references(VarKind::X)) bad("x variables are not allowed here");
  if (!allow_y && ex.references(VarKind::Y)) bad("y variables are not allowed here");
  if (auto m = max_index(ex, VarKind::X); m && *m >= n) bad("x" + std::to_string(*m + 1) + " exceeds base_dim");
  if (auto m = max_index(ex, VarKind::Y); m && *m >= k) bad("y" + std::to_string(*m + 1) + " exceeds fiber_dim");
}

// Matches `prefix<digits>` and returns the 1-based index.
std::optional<std::size_t> indexed(const std::string& key, const std::string& prefix) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  std::size_t v = 0;
  const char* b = key.data() + prefix.size();
  const char* end = key.data() + key.size();
  if (*b == '0') return std::nullopt;
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end || v == 0) return std::nullopt;
  return v;
}

// Collects `prefix<i>` entries for i = 1..count into a vector.
class IndexedSlots {
 public:
  IndexedSlots(std::string prefix, std::size_t count) : prefix_(std::move(prefix)), slots_(count) {}

  bool take(const Entry& e, const Expr& ex) {
    auto i = indexed(e.key, prefix_);
    if (!i) return false;
    if (*i > slots_.size()) throw SpecError(e.key + " index out of range", e.line);
    if (slots_[*i - 1]) throw SpecError("duplicate " + e.key, e.line);
    slots_[*i - 1] = ex;
    return true;
  }

  std::vector<Expr> finish(std::size_t line) const {
    std::vector<Expr> out;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!slots_[i]) throw SpecError("missing " + prefix_ + std::to_string(i + 1), line);
      out.push_back(*slots_[i]);
    }
    return out;
  }

 private:
  std::string prefix_;
  std::vector<std::optional<Expr>> slots_;
};

void need_quoted(const Entry& e) {
  if (!e.quoted) throw SpecError(e.key + " must be a quoted expression", e.line);
}

}  // namespace

SpecFile parse_spec(std::string_view text) {
  auto blocks = split_blocks(text);
  const Block* space = nullptr;
  const Block* connection = nullptr;
  for (const auto& b : blocks) {
    if (b.kind == "space") {
      if (space) throw SpecError("duplicate [space]", b.line);
      space = &b;
    } else if (b.kind == "connection") {
      if (connection) throw SpecError("duplicate [connection]", b.line);
      connection = &b;
    }
  }
  if (!space) throw SpecError("missing [space]");
  if (!connection) throw SpecError("missing [connection]");

  std::optional<long> n_opt, k_opt;
  for (const auto& e : space->entries) {
    if (e.key == "base_dim" && !n_opt) n_opt = parse_count(e);
    else if (e.key == "fiber_dim" && !k_opt) k_opt = parse_count(e);
    else if (e.key == "base_dim" || e.key == "fiber_dim") throw SpecError("duplicate " + e.key, e.line);
    else throw SpecError("unknown key " + e.key + " in [space]", e.line);
  }
  if (!n_opt) throw SpecError("missing base_dim", space->line);
  if (!k_opt) throw SpecError("missing fiber_dim", space->line);
  std::size_t n = static_cast<std::size_t>(*n_opt), k = static_cast<std::size_t>(*k_opt);

  std::vector<std::vector<std::optional<Expr>>> gamma(k, std::vector<std::optional<Expr>>(n));
  std::optional<Predicate> domain;
  std::optional<std::string> domain_text;
  for (const auto& e : connection->entries) {
    if (e.key == "domain") {
      if (domain) throw SpecError("duplicate domain", e.line);
      need_quoted(e);
      try {
        domain = parse_predicate(e.value);
      } catch (const SyntaxError& err) {
        throw SpecError(std::string("domain: ") + err.what(), e.line);
      }
      if (domain->references(VarKind::Z)) throw SpecError("z not allowed in domain", e.line);
      if (domain->references(VarKind::T)) throw SpecError("t not allowed in domain", e.line);
      for (const auto& clause : domain->clauses)
        for (const auto& c : clause)
          for (const auto* side : {&c.lhs, &c.rhs}) check_vars(*side, e, n, k, true, true, false);
      domain_text = e.value;
      continue;
    }
    // gamma_<A>_<i>
    auto sep = e.key.rfind('_');
    auto A_opt = indexed(e.key.substr(0, sep), "gamma_");
    auto i = sep == std::string::npos ? std::nullopt : indexed(e.key.substr(sep), "_");
    if (!A_opt || !i) throw SpecError("unknown key " + e.key + " in [connection]", e.line);
    std::size_t A = *A_opt;
    if (A > k || *i > n) throw SpecError(e.key + " index out of range", e.line);
    if (gamma[A - 1][*i - 1]) throw SpecError("duplicate " + e.key, e.line);
    need_quoted(e);
    auto ex = parse_at(e);
    check_vars(ex, e, n, k, true, true, false);
    gamma[A - 1][*i - 1] = ex;
  }
  std::vector<std::vector<Expr>> g(k);
  for (std::size_t A = 0; A < k; ++A)
    for (std::size_t i = 0; i < n; ++i) {
      if (!gamma[A][i])
        throw SpecError("missing gamma_" + std::to_string(A + 1) + "_" + std::to_string(i + 1), connection->line);
      g[A].push_back(*gamma[A][i]);
    }

  SpecFile spec{NonlinearConnection(BundleSpace(n, k, domain), std::move(g)), domain_text, {}, {}, {}};

  std::set<std::string> names;
  for (const auto& b : blocks) {
    if (b.kind == "space" || b.kind == "connection") continue;
    if (!names.insert(b.kind + " " + b.name).second) throw SpecError("duplicate [" + b.kind + " " + b.name + "]", b.line);
    if (b.kind == "field") {
      IndexedSlots X("X_", n), eta("eta_", k);
      for (const auto& e : b.entries) {
        need_quoted(e);
        auto ex = parse_at(e);
        check_vars(ex, e, n, k, true, false, false);
        if (!X.take(e, ex) && !eta.take(e, ex)) throw SpecError("unknown key " + e.key + " in [field]", e.line);
      }
      spec.fields.emplace(b.name, HorBasicField(X.finish(b.line), eta.finish(b.line)));
    } else if (b.kind == "section") {
      IndexedSlots sigma("sigma_", k);
      for (const auto& e : b.entries) {
        need_quoted(e);
        auto ex = parse_at(e);
        check_vars(ex, e, n, k, true, true, false);
        if (!sigma.take(e, ex)) throw SpecError("unknown key " + e.key + " in [section]", e.line);
      }
      spec.sections.emplace(b.name, SectionAlongPi{sigma.finish(b.line)});
    } else {
      IndexedSlots xs("x_", n), ys("y_", k);
      CurveInE c;
      bool has_t0 = false, has_t1 = false;
      for (const auto& e : b.entries) {
        if (e.key == "t0" || e.key == "t1") {
          bool& seen = e.key == "t0" ? has_t0 : has_t1;
          if (seen) throw SpecError("duplicate " + e.key, e.line);
          seen = true;
          (e.key == "t0" ? c.t0 : c.t1) = parse_real(e);
          continue;
        }
        need_quoted(e);
        auto ex = parse_at(e);
        check_vars(ex, e, n, k, false, false, true);
        if (!xs.take(e, ex) && !ys.take(e, ex)) throw SpecError("unknown key " + e.key + " in [curve]", e.line);
      }
      c.comp_x = xs.finish(b.line);
      c.comp_y = ys.finish(b.line);
      spec.curves.emplace(b.name, std::move(c));
    }
  }
  return spec;
}

SpecFile load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace linconn
